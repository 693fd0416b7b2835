"""Driving processes for chordal and radial SLE_kappa(rho) and interleaved
growth of several SLEs."""

import math
from dataclasses import dataclass, field

import numpy as np

from .flow import ChainState, slit_inverse, slit_map, step_chordal, step_radial

# near a force point the step is capped at GAP_FRACTION * gap^2, which keeps
# a Brownian increment from jumping across the point (about 6 sigma)
GAP_FRACTION = 0.01


def make_rng(seed):
    """Counter-based generator: streams are reproducible for a given seed."""
    return np.random.Generator(np.random.Philox(int(seed)))


@dataclass
class RhoSpec:
    kappa: float
    rho: list = field(default_factory=list)
    target: str = "infinity"

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        self.rho = [(str(l), float(w)) for l, w in self.rho]


def sle_drift(spec, state):
    """sum rho_i / (W - Z_i) for chordal chains."""
    drift = np.zeros(state.batch)
    for label, w in spec.rho:
        if not w:
            continue
        k = state.index(label)
        z = state.z[:, k].real
        with np.errstate(divide="ignore"):
            drift += np.where(state.alive[:, k], w / (state.W - z), 0.0)
    return drift


def radial_drift(spec, state):
    """(rho_i / 2) cot((theta - phi_i) / 2) in angle coordinates."""
    drift = np.zeros(state.batch)
    for label, w in spec.rho:
        if not w:
            continue
        k = state.index(label)
        phi = state.z[:, k].real
        with np.errstate(divide="ignore"):
            drift += np.where(state.alive[:, k], (w / 2) / np.tan((state.W - phi) / 2), 0.0)
    return drift


def force_gap(spec, state):
    """Distance from the driving value to the nearest live boundary marked point.

    Every real point counts, not only force points: a jump across any of
    them would swallow it spuriously."""
    if state.kind == "chordal":
        on_line = (state.z.imag == 0) & state.alive
        d = np.abs(state.W[:, None] - state.z.real)
    else:
        on_line = state.angular[None, :] & state.alive
        d = 2 * np.abs(np.sin((state.W[:, None] - state.z.real) / 2))
    return np.where(on_line, d, np.inf).min(axis=1, initial=np.inf)


def adaptive_dt(spec, state, dt, relative=True, fraction=GAP_FRACTION):
    """Step size: dt * max(1, t) (scale-relative) capped by fraction * gap^2."""
    base = dt * np.maximum(1.0, state.t) if relative else np.full(state.batch, float(dt))
    gap = force_gap(spec, state)
    return np.minimum(base, fraction * gap * gap)


def drive_sle_rho(spec, state, rng, dt):
    """Euler step of dW = sqrt(kappa) dB + sum rho_i/(W - Z_i) dt."""
    dt = np.broadcast_to(np.asarray(dt, dtype=float), (state.batch,))
    noise = rng.standard_normal(state.batch)
    return math.sqrt(spec.kappa) * np.sqrt(dt) * noise + sle_drift(spec, state) * dt


def drive_radial_rho(spec, state, rng, dt):
    """Angle increment: sqrt(kappa) dB + sum (rho_i/2) cot((theta - phi_i)/2) dt."""
    dt = np.broadcast_to(np.asarray(dt, dtype=float), (state.batch,))
    noise = rng.standard_normal(state.batch)
    return math.sqrt(spec.kappa) * np.sqrt(dt) * noise + radial_drift(spec, state) * dt


def advance(spec, state, rng, dt, active=None):
    """One driven step; inactive paths are frozen (zero step)."""
    if active is not None:
        dt = np.where(active, dt, 0.0)
    dW = (drive_sle_rho if state.kind == "chordal" else drive_radial_rho)(spec, state, rng, dt)
    if active is not None:
        dW = np.where(active, dW, 0.0)
    if state.kind == "chordal":
        return step_chordal(state, dW, dt)
    return step_radial(state, dW, dt)


def drift_from_partition(psi, kappa, point, growth):
    """kappa * d_growth log psi at a numeric configuration (psi in product form)."""
    logd = psi.log_derivative(growth)
    try:
        value = float(logd.evaluate({k: _exact(v) for k, v in point.items()}))
    except ZeroDivisionError:
        raise ValueError("psi vanishes at this configuration") from None
    if not math.isfinite(value):
        raise ValueError("psi vanishes at this configuration")
    return kappa * value


def _exact(v):
    from fractions import Fraction

    return Fraction(v) if isinstance(v, (int, Fraction)) else v


@dataclass
class GrowthSchedule:
    """Seats (starting points) and an ordered list of (seat, capacity) increments.

    Capacities are measured in the original half-plane: a step of size c for
    seat j becomes c * D_j^2 in the current domain, where D_j is the
    derivative accumulated at seat j through the other seats' steps."""

    seats: list
    order: list

    def __post_init__(self):
        if len(set(self.seats)) != len(self.seats):
            raise ValueError("seats must be distinct")
        for j, c in self.order:
            if not 0 <= j < len(self.seats):
                raise ValueError(f"unknown seat {j}")
            if c <= 0:
                raise ValueError("capacity increments must be positive")

    @classmethod
    def sequential(cls, seats, budgets, dt, first=0):
        """All of one seat's budget, then the next seat's (cyclic from `first`)."""
        order = []
        n = len(seats)
        for k in range(n):
            j = (first + k) % n
            steps = int(round(budgets[j] / dt))
            order += [(j, budgets[j] / steps)] * steps if steps else []
        return cls(list(seats), order)

    @classmethod
    def alternating(cls, seats, total, dt):
        n = len(seats)
        steps = int(round(total / dt))
        return cls(list(seats), [(k % n, total / steps) for k in range(steps)])


class Zipper:
    """Incremental vertical-slit zipper for a curve grown from the real line.

    Points are fed in order along the curve; each one is sent to the real line
    by the vertical slit below it, after the slits of all earlier points.
    `capacity` accumulates the slit sizes (half-plane capacity in t units)."""

    def __init__(self, batch):
        self.slits = []
        self.capacity = np.zeros(batch)

    def feed(self, pts, valid=None):
        pts = np.array(pts, dtype=complex)
        if valid is None:
            valid = np.ones(pts.shape, dtype=bool)
        for a, t in self.slits:
            pts, _ = slit_map(pts, a[:, None], t[:, None])
        for j in range(pts.shape[1]):
            q = pts[:, j]
            a = q.real
            t = np.where(valid[:, j], np.maximum(q.imag, 0.0) ** 2 / 4, 0.0)
            if j + 1 < pts.shape[1]:
                pts[:, j + 1 :], _ = slit_map(pts[:, j + 1 :], a[:, None], t[:, None])
            self.slits.append((a, t))
            self.capacity = self.capacity + t
        return self.capacity


def zipper_capacity(curve, valid=None):
    """Half-plane capacity (in t units) of the hull traced by `curve` (batch, m) from the real line."""
    curve = np.asarray(curve)
    return Zipper(curve.shape[0]).feed(curve, valid)


class _View:
    """Marked points of a sub-batch, enough for _seat_forces."""

    def __init__(self, z, alive, labels):
        self.z, self.alive, self.labels = z, alive, labels

    def index(self, label):
        return self.labels.index(label)


def _seat_forces(spec, j, seats, seat_alive, chain):
    """Drift on seat j and the distance to the nearest boundary marked point."""
    batch = seats.shape[0]
    W = seats[:, j]
    gap = np.full(batch, np.inf)
    drift = np.zeros(batch)
    for label, w in spec.rho:
        if label.startswith("seat"):
            k = int(label[4:])
            z = seats[:, k]
            ok = seat_alive[:, k]
        else:
            idx = chain.index(label)
            z = chain.z[:, idx].real
            ok = chain.alive[:, idx]
        with np.errstate(divide="ignore"):
            drift += np.where(ok, w / (W - z), 0.0)
    for k in range(seats.shape[1]):
        if k != j:
            gap = np.where(seat_alive[:, k], np.minimum(gap, np.abs(W - seats[:, k])), gap)
    real = (chain.z.imag == 0) & chain.alive
    if real.shape[1]:
        d = np.where(real, np.abs(W[:, None] - chain.z.real), np.inf)
        gap = np.minimum(gap, d.min(axis=1))
    return drift, gap


class MultiGrowth:
    """Resumable interleaved growth of several chordal SLEs on a batch of paths.

    All marked points, including the other seats, are flowed through every
    step.  specs[j] is the RhoSpec of seat j; force-point labels "seat<k>"
    refer to other seats, any other label to a spectator point."""

    def __init__(self, seats, specs, rng, batch=1, spectators=(), guard=None, monitor=None):
        self.nseat = len(seats)
        if len(specs) != self.nseat:
            raise ValueError("one RhoSpec per seat is required")
        if len(set(seats)) != len(seats):
            raise ValueError("seats must be distinct")
        self.start = np.asarray(seats, dtype=float)
        self.specs = specs
        self.rng = rng
        self.batch = batch
        self.chain = ChainState.chordal(spectators, batch=batch)
        self.seats = np.tile(self.start, (batch, 1))
        self.correction = np.ones((batch, self.nseat))
        self.image_capacity = np.zeros((batch, self.nseat))
        self.seat_alive = np.ones((batch, self.nseat), dtype=bool)
        self.active = np.ones(batch, dtype=bool)
        # sparse record: (seat, path indices, driving values, step sizes)
        self.history = []
        self.guard = guard
        self.monitor = monitor
        self._zippers = {}

    def grow(self, j, amount, max_dt=np.inf):
        """Grow seat j by `amount` (per path) of capacity in the current domain.

        Substeps are capped by max_dt, by GAP_FRACTION * gap^2 near boundary
        marked points and by the optional guard.  Only paths with capacity
        left are touched, so a few slow paths do not stall the batch."""
        spec = self.specs[j]
        others = [k for k in range(self.nseat) if k != j]
        remaining = np.where(self.active, np.broadcast_to(np.asarray(amount, dtype=float), (self.batch,)), 0.0)
        floor = 1e-12 * max(float(np.max(remaining, initial=0.0)), 1e-300)
        chain = self.chain
        idx = np.flatnonzero(remaining > floor)
        while idx.size:
            seats = self.seats[idx]
            z, deriv, alive = chain.z[idx], chain.deriv[idx], chain.alive[idx]
            view = _View(z, alive, chain.labels)
            drift, gap = _seat_forces(spec, j, seats, self.seat_alive[idx], view)
            rem = remaining[idx]
            dt = np.minimum(np.minimum(rem, max_dt), GAP_FRACTION * gap * gap)
            if self.guard is not None:
                dt = np.minimum(dt, self.guard(self, idx, j))
            dt = np.where(rem - dt <= floor, rem, dt)
            W = seats[:, j].copy()
            dW = math.sqrt(spec.kappa) * np.sqrt(dt) * self.rng.standard_normal(idx.size) + drift * dt
            self.history.append((j, idx, W, dt))
            if others:
                img, der = slit_map(seats[:, others] + 0j, W[:, None], dt[:, None])
                seats[:, others] = img.real
                self.correction[np.ix_(idx, others)] *= der.real
            if z.shape[1]:
                img, der = slit_map(z, W[:, None], dt[:, None])
                z = np.where(alive, img, z)
                deriv = np.where(alive, deriv * der, deriv)
                real = alive & (z.imag == 0)
                crossed = real & (np.sign(z.real - W[:, None]) != np.sign(z.real - (W + dW)[:, None]))
                if np.any(crossed):
                    chain.swallowed_at[idx] = np.where(crossed, chain.t[idx, None] + dt[:, None], chain.swallowed_at[idx])
                    alive = alive & ~crossed
                chain.z[idx], chain.deriv[idx], chain.alive[idx] = z, deriv, alive
            newW = W + dW
            for k in others:
                hit = np.sign(seats[:, k] - W) != np.sign(seats[:, k] - newW)
                self.seat_alive[idx, k] &= ~hit
            seats[:, j] = newW
            self.seats[idx] = seats
            chain.W[idx] = newW
            chain.t[idx] += dt
            self.image_capacity[idx, j] += dt
            remaining[idx] = rem - dt
            if self.monitor is not None:
                stop = self.monitor(self, idx)
                if np.any(stop):
                    self.active[idx[stop]] = False
                    remaining[idx[stop]] = 0.0
            idx = idx[remaining[idx] > floor]

    def seat_trace(self, j, start=0, resolution=0.0):
        """Tips of seat j's steps recorded at history index >= start, in original coordinates.

        A tip is kept once the seat has grown by `resolution` (current-domain
        capacity) since the last kept tip; the last tip is always kept.
        Returns (points, valid) padded to (batch, m), in order along the trace."""
        keep_rec, keep_path = [], []
        cum = np.zeros(self.batch)
        last = np.full(self.batch, -1)
        kept_last = np.zeros(self.batch, dtype=bool)
        for k in range(start, len(self.history)):
            seat, idx, W, dt = self.history[k]
            if seat != j:
                continue
            cum[idx] += dt
            keep = (cum[idx] >= resolution) & (dt > 0)
            sel = idx[keep]
            keep_rec.append(np.full(sel.size, k))
            keep_path.append(sel)
            cum[sel] = 0.0
            moved = idx[dt > 0]
            last[moved] = k
            kept_last[moved] = False
            kept_last[sel] = True
        extra = np.flatnonzero((last >= 0) & ~kept_last)
        keep_rec.append(last[extra])
        keep_path.append(extra)
        rec = np.concatenate(keep_rec) if keep_rec else np.zeros(0, dtype=int)
        path = np.concatenate(keep_path) if keep_path else np.zeros(0, dtype=int)
        # newest first, so the points still to be pulled back form a prefix
        order = np.lexsort((path, -rec))
        rec, path = rec[order], path[order]
        pts = np.zeros(rec.size, dtype=complex)
        Wfull = np.full(self.batch, np.nan)
        dtfull = np.zeros(self.batch)
        n = 0
        for k in range(len(self.history) - 1, -1, -1):
            seat, idx, W, dt = self.history[k]
            if n:
                Wfull[idx], dtfull[idx] = W, dt
                w, d = Wfull[path[:n]], dtfull[path[:n]]
                hit = ~np.isnan(w)
                if np.any(hit):
                    pts[:n][hit] = slit_inverse(pts[:n][hit], w[hit], d[hit])
                Wfull[idx], dtfull[idx] = np.nan, 0.0
            if seat == j:
                m = n
                while m < rec.size and rec[m] == k:
                    m += 1
                if m > n:
                    pos = np.searchsorted(idx, path[n:m])
                    pts[n:m] = W[pos] + 2j * np.sqrt(dt[pos])
                    n = m
        # pad into rows, oldest tip first
        counts = np.bincount(path, minlength=self.batch)
        width = int(counts.max(initial=0))
        out = np.zeros((self.batch, width), dtype=complex)
        valid = np.zeros((self.batch, width), dtype=bool)
        if rec.size:
            order = np.lexsort((rec, path))
            path, pts = path[order], pts[order]
            first = np.concatenate([[0], np.cumsum(counts)[:-1]])
            col = np.arange(path.size) - first[path]
            out[path, col] = pts
            valid[path, col] = True
        return out, valid

    def original_capacity(self, j, resolution=0.0):
        """Capacity of seat j's hull alone in the original half-plane (t units)."""
        done, zipper = self._zippers.get(j, (0, None))
        if zipper is None:
            zipper = Zipper(self.batch)
        pts, valid = self.seat_trace(j, start=done, resolution=resolution)
        if pts.shape[1]:
            zipper.feed(pts, valid)
        self._zippers[j] = (len(self.history), zipper)
        return zipper.capacity.copy()

    def grow_original(self, j, target, max_dt=np.inf, resolution=0.0, tol=1e-3, max_rounds=24):
        """Grow seat j until its original-domain capacity reaches `target`.

        The first pass converts with the squared boundary derivative at the
        seat; later passes top up using the observed conversion rate.  Each
        pass aims at half the deficit: the marginal rate can fall quickly when
        the hull grows into a fjord next to another seat, and capacity cannot
        be taken back."""
        rate = self.correction[:, j] ** 2
        have = self.original_capacity(j, resolution)
        for _ in range(max_rounds):
            deficit = target - have
            todo = self.active & (deficit > tol * target)
            if not np.any(todo):
                break
            before = self.image_capacity[:, j].copy()
            self.grow(j, np.where(todo, 0.5 * deficit * rate, 0.0), max_dt)
            now = self.original_capacity(j, resolution)
            gained = now - have
            ok = gained > 0
            rate = np.where(ok, (self.image_capacity[:, j] - before) / np.where(ok, gained, 1.0), rate)
            have = now
        return have


def grow_multi(schedule, specs, rng, batch=1, spectators=(), guard=None, monitor=None, correct=True):
    """Run a GrowthSchedule; increments are converted to the current domain
    with the squared boundary derivative accumulated at each seat."""
    g = MultiGrowth(schedule.seats, specs, rng, batch=batch, spectators=spectators, guard=guard, monitor=monitor)
    for j, c in schedule.order:
        g.grow(j, c * g.correction[:, j] ** 2 if correct else c)
    return g
