"""Discretized Loewner flows.

Chains are batched: every array carries a leading axis over independent
sample paths, so one python-level step advances all of them.  Each step
uses the exact map of the Loewner equation with the driving value frozen
over the step (a vertical slit in the half-plane, a radial slit in the
disk), followed by a jump of the driving value.
"""

import csv
from dataclasses import dataclass

import numpy as np

SWALLOW_EPS = 1e-9


def slit_map(z, w, dt):
    """Vertical slit step at w: returns (image, derivative factor)."""
    u = z - w
    with np.errstate(divide="ignore", invalid="ignore"):
        img = u * np.sqrt(1 + 4 * dt / (u * u))
        der = u / img
    # dt == 0 leaves points untouched, even u == 0
    still = dt == 0
    if np.any(still):
        img = np.where(still, u, img)
        der = np.where(still, 1, der)
    return w + img, der


def slit_inverse(z, w, dt):
    v = z - w
    s = np.sqrt(v * v - 4 * dt)
    flip = (s.imag < 0) | ((s.imag == 0) & (s.real * v.real < 0))
    return w + np.where(flip, -s, s)


def radial_map(z, theta, dt):
    """Radial slit step from e^{i theta} for time dt acting on interior points."""
    xi = np.exp(1j * theta)
    u = z / xi
    e = np.exp(-dt)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = e * (u + 1) ** 2 / u
        d = c - 2
        s = np.sqrt(d * d - 4)
        s = np.where((np.conj(s) * d).real < 0, -s, s)
        g = 2 / (d + s)
        der = e * (u - 1) * (u + 1) / (u * u) * g * g / ((g - 1) * (g + 1))
    at0 = u == 0
    g = np.where(at0, 0, g)
    der = np.where(at0, np.exp(dt) + 0j, der)
    still = dt == 0
    if np.any(still):
        g = np.where(still, u, g)
        der = np.where(still, 1, der)
    return xi * g, der


def radial_angle_map(phi, theta, dt):
    """Radial slit step acting on boundary angles: returns (angle, angular derivative)."""
    alpha = np.remainder(phi - theta + np.pi, 2 * np.pi) - np.pi
    half = np.exp(-dt / 2)
    beta = 2 * np.arccos(np.clip(half * np.cos(alpha / 2), -1, 1)) * np.sign(alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        der = half * np.sin(alpha / 2) / np.sin(beta / 2)
    der = np.where(dt == 0, 1.0, der)
    beta = np.where(dt == 0, alpha, beta)
    return theta + beta, der


def radial_inverse(z, theta, dt):
    xi = np.exp(1j * theta)
    w = z / xi
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.exp(dt) * (w + 1) ** 2 / w
        d = c - 2
        s = np.sqrt(d * d - 4)
        r1, r2 = (d + s) / 2, (d - s) / 2
    inside1 = np.abs(r1) <= 1 + 1e-12
    inside2 = np.abs(r2) <= 1 + 1e-12
    both = inside1 & inside2
    pick = np.where(inside1 & ~inside2, r1, r2)
    closer = np.where(np.abs(r1 - w) <= np.abs(r2 - w), r1, r2)
    pick = np.where(both, closer, pick)
    pick = np.where(w == 0, 0, pick)
    return xi * pick


@dataclass
class ChainState:
    """A batch of Loewner chains with tracked marked points.

    Chordal chains keep points in the half-plane; radial chains keep interior
    points as complex numbers and boundary points as angles (rows flagged in
    `angular`).  `deriv` holds g'(z) (angular derivative for boundary angles)."""

    kind: str
    t: np.ndarray
    W: np.ndarray
    labels: tuple
    z: np.ndarray
    deriv: np.ndarray
    alive: np.ndarray
    swallowed_at: np.ndarray
    angular: np.ndarray
    history: list = None
    log_deriv0: np.ndarray = None

    @classmethod
    def chordal(cls, points, batch=1, W0=0.0, record=False):
        labels, values = _split_points(points)
        z = np.tile(np.asarray(values, dtype=complex), (batch, 1))
        return cls(
            kind="chordal",
            t=np.zeros(batch),
            W=np.full(batch, float(W0)),
            labels=labels,
            z=z,
            deriv=np.ones_like(z),
            alive=np.ones(z.shape, dtype=bool),
            swallowed_at=np.full(z.shape, np.nan),
            angular=np.zeros(len(labels), dtype=bool),
            history=[] if record else None,
        )

    @classmethod
    def radial(cls, points=(), angles=(), batch=1, theta0=0.0, record=False):
        """Radial chain from e^{i theta0} to 0; angles are boundary points."""
        plabels, pvalues = _split_points(points)
        alabels, avalues = _split_points(angles)
        labels = plabels + alabels
        values = [complex(v) for v in pvalues] + [complex(float(v)) for v in avalues]
        z = np.tile(np.asarray(values, dtype=complex).reshape(1, -1), (batch, 1))
        angular = np.array([False] * len(plabels) + [True] * len(alabels), dtype=bool)
        return cls(
            kind="radial",
            t=np.zeros(batch),
            W=np.full(batch, float(theta0)),
            labels=labels,
            z=z,
            deriv=np.ones_like(z),
            alive=np.ones(z.shape, dtype=bool),
            swallowed_at=np.full(z.shape, np.nan),
            angular=angular,
            history=[] if record else None,
            log_deriv0=np.zeros(batch),
        )

    @property
    def batch(self):
        return self.t.shape[0]

    def index(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown marked point {label!r}") from None

    def value(self, label):
        return self.z[:, self.index(label)]

    def derivative(self, label):
        return self.deriv[:, self.index(label)]

    def is_alive(self, label):
        return self.alive[:, self.index(label)]

    def copy(self):
        return ChainState(
            kind=self.kind,
            t=self.t.copy(),
            W=self.W.copy(),
            labels=self.labels,
            z=self.z.copy(),
            deriv=self.deriv.copy(),
            alive=self.alive.copy(),
            swallowed_at=self.swallowed_at.copy(),
            angular=self.angular.copy(),
            history=None if self.history is None else list(self.history),
            log_deriv0=None if self.log_deriv0 is None else self.log_deriv0.copy(),
        )


def _split_points(points):
    if isinstance(points, dict):
        return tuple(points), list(points.values())
    points = list(points)
    return tuple(f"p{i}" for i in range(len(points))), points


def _as_batch(v, batch):
    v = np.asarray(v, dtype=float)
    if v.ndim == 0:
        v = np.full(batch, float(v))
    return v


def step_chordal(state, dW, dt):
    """Slit at the current driving value, then shift the driving value by dW."""
    if state.kind != "chordal":
        raise ValueError("chordal step on a radial chain")
    dt = _as_batch(dt, state.batch)
    dW = _as_batch(dW, state.batch)
    if np.any(dt < 0):
        raise ValueError("dt must be non-negative")
    W = state.W
    if state.history is not None:
        state.history.append((W.copy(), dt.copy()))
    live = state.alive
    img, der = slit_map(state.z, W[:, None], dt[:, None])
    state.z = np.where(live, img, state.z)
    state.deriv = np.where(live, state.deriv * der, state.deriv)
    newW = W + dW
    state.t = state.t + dt
    # real points: the driving value jumping across a point swallows it
    real = live & (state.z.imag == 0)
    before = np.sign(state.z.real - W[:, None])
    after = np.sign(state.z.real - newW[:, None])
    crossed = real & (before != after)
    close = live & (np.abs(state.z - newW[:, None]) <= SWALLOW_EPS * np.sqrt(np.maximum(state.t, 1e-300))[:, None])
    dead = crossed | close
    if np.any(dead):
        state.alive = live & ~dead
        state.swallowed_at = np.where(dead, state.t[:, None], state.swallowed_at)
    state.W = newW
    return state


def step_radial(state, dtheta, dt):
    """Radial slit step from e^{iW}, then rotate the driving angle by dtheta."""
    if state.kind != "radial":
        raise ValueError("radial step on a chordal chain")
    dt = _as_batch(dt, state.batch)
    dtheta = _as_batch(dtheta, state.batch)
    theta = state.W
    if state.history is not None:
        state.history.append((theta.copy(), dt.copy()))
    live = state.alive
    ang = state.angular[None, :] & live
    bulk = ~state.angular[None, :] & live
    if np.any(bulk):
        img, der = radial_map(state.z, theta[:, None], dt[:, None])
        state.z = np.where(bulk, img, state.z)
        state.deriv = np.where(bulk, state.deriv * der, state.deriv)
    if np.any(ang):
        phi, der = radial_angle_map(state.z.real, theta[:, None], dt[:, None])
        state.z = np.where(ang, phi + 0j, state.z)
        state.deriv = np.where(ang, state.deriv * der, state.deriv)
    state.t = state.t + dt
    state.log_deriv0 = state.log_deriv0 + dt
    new = theta + dtheta
    if np.any(ang):
        a = np.remainder(state.z.real - theta[:, None] + np.pi, 2 * np.pi) - np.pi
        b = a - dtheta[:, None]
        crossed = ang & (np.sign(a) != np.sign(b)) & (np.abs(a) < np.pi / 2)
        if np.any(crossed):
            state.alive = state.alive & ~crossed
            state.swallowed_at = np.where(crossed, state.t[:, None], state.swallowed_at)
    state.W = new
    return state


def distance_proxy(state, label):
    """|g(z) - W| / |g'(z)|, within a factor 4 of the distance from z to the hull tip region."""
    k = state.index(label)
    if state.angular[k]:
        raise ValueError("proxy is defined for interior points only")
    if not np.all(state.alive[:, k]):
        raise ValueError(f"marked point {label!r} is no longer alive")
    return proxy_array(state, state.z[:, k : k + 1], state.deriv[:, k : k + 1])[:, 0]


def proxy_array(state, z, deriv):
    if state.kind == "chordal":
        gap = np.abs(z - state.W[:, None])
    else:
        gap = np.abs(z - np.exp(1j * state.W)[:, None])
    return gap / np.abs(deriv)


def trace_points(history, steps, radial=False):
    """Trace positions after the given step counts, for every path in the batch.

    The tip after k steps is the preimage of the last slit tip, pulled back
    through the earlier steps newest first."""
    steps = list(steps)
    if not steps:
        return np.zeros((0, 0), dtype=complex)
    if max(steps) > len(history) or min(steps) < 1:
        raise ValueError("requested step outside the recorded history")
    batch = history[0][0].shape[0]
    out = np.zeros((batch, len(steps)), dtype=complex)
    order = np.argsort(steps)[::-1]
    pts = np.zeros((batch, 0), dtype=complex)
    cols = []
    pos = 0
    for k in range(max(steps), 0, -1):
        W, dt = history[k - 1]
        while pos < len(order) and steps[order[pos]] == k:
            if radial:
                tip = radial_tip_point(W, dt)
            else:
                tip = W + 2j * np.sqrt(dt)
            pts = np.concatenate([pts, tip[:, None]], axis=1)
            cols.append(order[pos])
            pos += 1
        if k > 1:
            W, dt = history[k - 2]
            if radial:
                pts = radial_inverse(pts, W[:, None], dt[:, None])
            else:
                pts = slit_inverse(pts, W[:, None], dt[:, None])
    for j, c in enumerate(cols):
        out[:, c] = pts[:, j]
    return out


def radial_tip_point(theta, dt):
    e = np.exp(dt)
    r = 2 * e - 1 - 2 * np.sqrt(e * e - e)
    return r * np.exp(1j * theta)


def far_field_capacity(history, z=1e6):
    """Coefficient c in g(z) = z + c/z + ..., read off at the large points +-z.

    Offsets g(z) - z are accumulated step by step to avoid cancellation, and
    averaging the two sides removes the 1/z^2 term."""
    total = 0.0
    for side in (z, -z):
        offset = np.zeros(history[0][0].shape)
        for W, dt in history:
            u = side + offset - W
            offset = offset + 4 * dt / (u * (np.sqrt(1 + 4 * dt / (u * u)) + 1))
        total = total + offset * side
    return total / 2


def write_driving_csv(fh, history, final_W, path=0):
    """Dump one path of a recorded chain as (t, W) rows; W is the value used from t on."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["t", "W"])
    t = 0.0
    for W, dt in history:
        writer.writerow([repr(float(t)), repr(float(W[path]))])
        t += float(dt[path])
    writer.writerow([repr(float(t)), repr(float(np.asarray(final_W)[path]))])


def read_driving_csv(fh):
    rows = list(csv.reader(fh))
    if not rows or rows[0] != ["t", "W"]:
        raise ValueError("expected a header row t,W")
    return [(float(t), float(w)) for t, w in rows[1:]]


def replay_chordal(rows, points, record=False):
    """Rebuild a single chordal chain from (t, W) rows."""
    if not rows:
        raise ValueError("no driving rows")
    state = ChainState.chordal(points, W0=rows[0][1], record=record)
    for (t0, w0), (t1, w1) in zip(rows, rows[1:]):
        if t1 < t0:
            raise ValueError("times must be nondecreasing")
        step_chordal(state, w1 - w0, t1 - t0)
    return state
