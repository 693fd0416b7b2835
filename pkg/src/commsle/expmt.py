"""Monte Carlo experiments: avoidance probabilities, martingale checks and
two-sample comparisons, each summarized in an ExperimentReport.

Every experiment is a deterministic function of its parameters and seed.
Paths are simulated in vectorized batches; loops that run until a stopping
rule keep only the unfinished paths in play.
"""

import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .confmap import CompositeMap, HalfDisk, RadialSlit, VerticalSlit
from .drive import GAP_FRACTION, MultiGrowth, RhoSpec, Zipper, adaptive_dt, advance, make_rng
from .flow import ChainState, proxy_array, radial_angle_map, radial_map, slit_inverse, slit_map

KS_THRESHOLD = 0.01
TAINT_LIMIT = 0.01
KAPPA_RESTRICTION = 8 / 3


@dataclass
class ExperimentReport:
    name: str
    estimate: float
    stderr: float
    reference: float
    reference_source: str
    tolerance: float
    verdict: str
    n_samples: int
    excluded_runs: int
    seed: int
    wall_time: float
    tainted: bool = False
    p_value: float = None
    extra: dict = field(default_factory=dict)
    samples: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_dict(self, wall_time=True):
        d = asdict(self)
        d.pop("samples")
        if not wall_time:
            d.pop("wall_time")
        return _plain(d)

    def to_json(self, wall_time=True):
        return json.dumps(self.to_dict(wall_time), sort_keys=True, indent=2)

    def summary(self):
        ref = f"p={self.p_value:.4g} (threshold {self.tolerance})" if self.p_value is not None else (
            f"{self.estimate:.5g} vs {self.reference:.5g} (tol {self.tolerance:.3g})"
        )
        flag = " TAINTED" if self.tainted else ""
        return f"{self.verdict.upper():4s} {self.name}: {ref}{flag}"


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else str(v)
    return v


def _report(name, estimate, stderr, reference, source, tolerance, n, excluded, seed, start, p_value=None, **extra):
    samples = extra.pop("samples", {})
    if p_value is None:
        ok = abs(estimate - reference) <= tolerance
    else:
        ok = p_value >= tolerance
    return ExperimentReport(
        name=name,
        estimate=float(estimate),
        stderr=float(stderr),
        reference=float(reference),
        reference_source=source,
        tolerance=float(tolerance),
        verdict="pass" if ok else "fail",
        n_samples=int(n),
        excluded_runs=int(excluded),
        seed=int(seed),
        wall_time=time.perf_counter() - start,
        tainted=excluded > TAINT_LIMIT * n,
        p_value=None if p_value is None else float(p_value),
        extra=extra,
        samples=samples,
    )


# -- statistics ----------------------------------------------------------------


def mean_stderr(x):
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return float(x.mean()), math.nan
    return float(np.sum(x) / x.size), float(np.std(x, ddof=1) / math.sqrt(x.size))


def proportion(hits):
    hits = np.asarray(hits, dtype=bool)
    p = hits.mean()
    return float(p), math.sqrt(p * (1 - p) / hits.size)


def ks_two_sample(a, b):
    """Two-sample Kolmogorov-Smirnov statistic and p-value."""
    r = stats.ks_2samp(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    return float(r.statistic), float(r.pvalue)


def substreams(seed, k):
    """k independent generators derived from one seed."""
    return [np.random.Generator(np.random.Philox(s)) for s in np.random.SeedSequence(int(seed)).spawn(k)]


def _chunks(n, size):
    while n > 0:
        yield min(n, size)
        n -= size


# -- zippers for the hull-removing maps -------------------------------------------


def chordal_zipper_map(curve, points):
    """Apply the map removing the hull bounded by `curve` (batch, m), ordered
    from one foot on the real line, to real `points` (batch, k).

    Returns images and derivatives."""
    zipper = Zipper(curve.shape[0])
    zipper.feed(curve)
    y = np.asarray(points, dtype=complex)
    d = np.ones_like(y)
    for a, t in zipper.slits:
        y, dd = slit_map(y, a[:, None], t[:, None])
        d = d * dd
    return y.real, d.real


def radial_zipper_map(curve, angles):
    """Radial analogue: `curve` (batch, m) runs from the circle into the disk.

    Returns the image angles, their angular derivatives and log h'(0)."""
    pts = np.array(curve, dtype=complex)
    ang = np.array(angles, dtype=float)
    der = np.ones_like(ang)
    log0 = np.zeros(pts.shape[0])
    for j in range(pts.shape[1]):
        q = pts[:, j]
        a = np.angle(q)
        r = np.abs(q)
        tau = np.log((1 + r) ** 2 / (4 * r))
        if j + 1 < pts.shape[1]:
            pts[:, j + 1 :], _ = radial_map(pts[:, j + 1 :], a[:, None], tau[:, None])
        ang, d = radial_angle_map(ang, a[:, None], tau[:, None])
        der = der * d
        log0 = log0 + tau
    return ang, der, log0


def hull_boundary(A, spacing=0.02):
    """Sample points on the boundary of a chordal hull (relative spacing)."""
    steps = A.steps if isinstance(A, CompositeMap) else (A,)
    pts = []
    for k, s in enumerate(steps):
        if isinstance(s, HalfDisk):
            if s.radius == 0:
                continue
            m = int(math.ceil(math.pi / spacing))
            th = (np.arange(m) + 0.5) * math.pi / m
            local = s.center + s.radius * np.exp(1j * th)
        elif isinstance(s, VerticalSlit):
            if s.t == 0:
                continue
            m = int(math.ceil(1 / spacing))
            local = s.base + 2j * math.sqrt(s.t) * (np.arange(m) + 1) / m
        else:
            raise ValueError(f"unsupported hull step {s!r}")
        earlier = CompositeMap(steps[:k])
        pts += [earlier.inverse(p) for p in local]
    return np.asarray(pts, dtype=complex)


def _hull_scale(A):
    steps = A.steps if isinstance(A, CompositeMap) else (A,)
    sizes = [s.radius if isinstance(s, HalfDisk) else 2 * math.sqrt(s.t) for s in steps]
    return max(sizes, default=0.0)


def _restriction_exponents(kappa):
    return (6 - kappa) / (2 * kappa), 2 / kappa


# -- leftmost point of the SLE_8 hull --------------------------------------------------


def _leftmost_batch(rng, batch, dt, kappa, t_floor, max_steps):
    """Leftmost real point G of the hull of chordal SLE_kappa from 0, stopped when 1 is swallowed.

    Tracks the images of the leftmost hull point and of 1; steps are dt * t so
    that the small-scale start is resolved.  G is the leftmost image pulled back."""
    W = np.zeros(batch)
    left = np.zeros(batch)
    one = np.ones(batch)
    t = np.zeros(batch)
    act = np.arange(batch)
    hist = []
    for _ in range(max_steps):
        if not act.size:
            break
        w, o, y = W[act], left[act], one[act]
        h = dt * np.maximum(t_floor, t[act])
        o2 = w - np.sqrt((w - o) ** 2 + 4 * h)
        y2 = w + np.sqrt((y - w) ** 2 + 4 * h)
        wn = w + math.sqrt(kappa) * np.sqrt(h) * rng.standard_normal(act.size)
        hist.append((act, w, h))
        o2 = np.minimum(o2, wn)
        W[act], left[act], one[act], t[act] = wn, o2, y2, t[act] + h
        done = (wn >= y2) | ((y2 - wn) / (y2 - o2) < 1e-6)
        act = act[~done]
    g = left.copy()
    for a, w, h in reversed(hist):
        v = g[a]
        g[a] = w - np.sqrt(np.maximum((w - v) ** 2 - 4 * h, 0))
    unfinished = np.zeros(batch, dtype=bool)
    unfinished[act] = True
    return g, unfinished


def leftmost_cdf(g):
    """Law of |G|: (2/pi) arctan(sqrt(g))."""
    return 2 / math.pi * np.arctan(np.sqrt(np.maximum(g, 0)))


def leftmost_law(g=1.0, n_samples=4000, dt=1e-3, seed=1, chunk=250, t_floor=1e-10, max_steps=400_000):
    """Estimate P(G <= -g) for SLE_8 started at 0 and stopped when it swallows 1.

    The same sample gives the KS distance between the law of |G| and
    (2/pi) arctan(sqrt(g)); it is stored in `extra`."""
    if g <= 0:
        raise ValueError("g must be positive")
    start = time.perf_counter()
    rng = make_rng(seed)
    parts, bad = [], []
    for b in _chunks(n_samples, chunk):
        G, unfinished = _leftmost_batch(rng, b, dt, 8.0, t_floor, max_steps)
        parts.append(G)
        bad.append(unfinished)
    G = np.concatenate(parts)
    ok = ~np.concatenate(bad)
    depth = -G[ok]
    p, se = proportion(depth >= g)
    ks = stats.kstest(depth, leftmost_cdf)
    return _report(
        "leftmost_law", p, se, leftmost_cdf(g), "(2/pi)arctan(sqrt(g))", 0.02,
        n_samples, (~ok).sum(), seed, start,
        g=g, dt=dt, ks_distance=float(ks.statistic), ks_pvalue=float(ks.pvalue), ks_tolerance=0.03,
        samples={"G": G[ok]},
    )


# -- chordal restriction --------------------------------------------------------------


def restriction_chordal(A=None, seats=(0.0,), n_samples=5000, dt=1e-3, horizon=0.5, seed=1, **options):
    """Restriction check for SLE_8/3 against the hull A.

    One seat: frequency of avoiding A.  Two seats: conservation of the
    restriction martingale over a fixed growth horizon."""
    if A is None:
        A = HalfDisk(4.0, 1.0)
    if not isinstance(A, CompositeMap):
        A = CompositeMap([A])
    for y in seats:
        for s in A.steps:
            if s.contains(y):
                raise ValueError(f"seat {y} touches the hull")
    if len(seats) == 1:
        return _restriction_one(A, float(seats[0]), n_samples, dt, seed, **options)
    if len(seats) == 2:
        return _restriction_two(A, sorted(map(float, seats)), n_samples, dt, horizon, seed, **options)
    raise ValueError("one or two seats are supported")


def _restriction_one(A, y, n_samples, dt, seed, spacing=0.02, threshold=1.0, rel=0.02, escape=20.0, chunk=1000):
    start = time.perf_counter()
    kappa = KAPPA_RESTRICTION
    alpha, _ = _restriction_exponents(kappa)
    _, d = A.eval_with_deriv(y)
    reference = d.real**alpha
    scale = _hull_scale(A)
    grid = hull_boundary(A, spacing)
    sp = spacing * scale
    rng = make_rng(seed)
    hits = []
    if grid.size == 0:
        hits.append(np.zeros(n_samples, dtype=bool))
    else:
        for b in _chunks(n_samples, chunk):
            z = np.tile(grid, (b, 1))
            deriv = np.ones_like(z)
            W = np.full(b, y)
            t = np.zeros(b)
            near = np.full(b, np.inf)
            hit = np.zeros(b, dtype=bool)
            act = np.arange(b)
            while act.size:
                h = np.minimum(np.maximum(dt, rel * t[act]), (np.maximum(near[act], sp) / 4) ** 2)
                img, der = slit_map(z[act], W[act, None], h[:, None])
                z[act] = img
                deriv[act] = deriv[act] * der
                W[act] += math.sqrt(kappa) * np.sqrt(h) * rng.standard_normal(act.size)
                t[act] += h
                zz = z[act]
                prox = (np.abs(zz - W[act, None]) / np.abs(deriv[act])).min(axis=1)
                near[act] = prox
                touched = prox < threshold * sp
                hit[act[touched]] = True
                # once the image of A is small compared with its distance to W it stays clear
                re = zz.real
                width = (re.max(axis=1) - re.min(axis=1)) / 2
                far = width / np.abs(re.mean(axis=1) - W[act]) < 1 / escape
                act = act[~(touched | far)]
            hits.append(hit)
    hit = np.concatenate(hits)
    p, se = proportion(~hit)
    return _report(
        "restriction_chordal", p, se, reference, "phi_A'(y)^(5/8)", 0.015, n_samples, 0, seed, start,
        seat=y, dt=dt, grid_points=int(grid.size), samples={"avoided": (~hit).astype(float)},
    )


def restriction_product(h_seats, dh_seats, seats, kappa=KAPPA_RESTRICTION):
    """prod h'(Y_i)^alpha prod ((h(Y_j) - h(Y_i)) / (Y_j - Y_i))^(2/kappa) for rows of two seats."""
    alpha, beta = _restriction_exponents(kappa)
    ratio = (h_seats[:, 1] - h_seats[:, 0]) / (seats[:, 1] - seats[:, 0])
    return (dh_seats[:, 0] * dh_seats[:, 1]) ** alpha * ratio**beta


def _restriction_two(A, seats, n_samples, dt, horizon, seed, spacing=0.02, threshold=1.0, rounds=50):
    start = time.perf_counter()
    kappa = KAPPA_RESTRICTION
    if len(A.steps) != 1 or not isinstance(A.steps[0], HalfDisk):
        raise ValueError("the two-seat check needs a single half-disk hull")
    disk = A.steps[0]
    m = int(math.ceil(math.pi / spacing)) + 1
    arc = disk.center + disk.radius * np.exp(1j * np.linspace(math.pi, 0, m))
    arc[0], arc[-1] = disk.center - disk.radius, disk.center + disk.radius
    sp = math.pi * disk.radius / (m - 1)
    Y0 = np.array([seats])

    def value(curve, Y):
        h, dh = chordal_zipper_map(curve, Y)
        return restriction_product(h, dh, Y, kappa)

    closed = [A.eval_with_deriv(y) for y in seats]
    exact0 = restriction_product(
        np.array([[c[0].real for c in closed]]), np.array([[c[1].real for c in closed]]), Y0, kappa
    )[0]
    N0 = value(arc[None, :], Y0)[0]

    def proximity(g, idx, j):
        W = g.seats[idx, j]
        return (np.abs(g.chain.z[idx] - W[:, None]) / np.abs(g.chain.deriv[idx])).min(axis=1)

    def guard(g, idx, j):
        return (np.maximum(proximity(g, idx, j), sp) / 4) ** 2

    def monitor(g, idx):
        return (proximity(g, idx, 0) < threshold * sp) | (proximity(g, idx, 1) < threshold * sp)

    specs = [RhoSpec(kappa, [("seat1", 2)]), RhoSpec(kappa, [("seat0", 2)])]
    spectators = {f"a{i}": complex(v) for i, v in enumerate(arc)}
    g = MultiGrowth(seats, specs, make_rng(seed), batch=n_samples, spectators=spectators, guard=guard, monitor=monitor)
    per_round = horizon / 2 / rounds
    for _ in range(rounds):
        for j in (0, 1):
            g.grow(j, per_round, max_dt=dt)
    excluded = ~g.seat_alive.all(axis=1)
    N = value(g.chain.z, g.seats)
    keep = ~excluded
    est, se = mean_stderr(N[keep])
    return _report(
        "restriction_chordal_two_seat", est, se, N0, "time-0 value of the restriction martingale",
        3 * se, n_samples, excluded.sum(), seed, start,
        seats=list(seats), horizon=horizon, closed_form_start=float(exact0), zipper_start=float(N0),
        stopped_near_hull=float((~g.active).mean()), samples={"N": N[keep]},
    )


# -- radial restriction ----------------------------------------------------------------


def _radial_grid(A, spacing):
    if A is None:
        return np.zeros(0, dtype=complex)
    tip = abs(A.tip)
    m = max(int(math.ceil((1 - tip) / spacing)), 1)
    rad = tip + (np.arange(m) + 0.5) * (1 - tip) / m
    return rad * np.exp(1j * A.angle)


def radial_exponents(kappa=KAPPA_RESTRICTION):
    """Exponents of |phi'(0)| and |phi'(chi)| for one radial seat."""
    from .specfun import weights

    w = weights(kappa)
    return float(2 * w.h(0, 0.5)), float(w.alpha)


def restriction_radial(A=None, chi=0.0, n_samples=5000, dt=0.01, horizon=None, seed=1,
                       spacing=0.02, threshold=1.0, conformal_radius=1e-3, chunk=1000):
    """Avoidance frequency of a radial slit A by radial SLE_8/3 from e^{i chi} to 0.

    Paths stop when the conformal radius of 0 drops below `conformal_radius`
    (or after capacity `horizon` when given)."""
    start = time.perf_counter()
    kappa = KAPPA_RESTRICTION
    e0, e1 = radial_exponents(kappa)
    if A is not None and not isinstance(A, RadialSlit):
        raise ValueError("A must be a RadialSlit")
    if A is None or A.duration == 0:
        reference, grid = 1.0, np.zeros(0, dtype=complex)
    else:
        _, d0 = A.forward(0)
        _, dchi = A.forward_angle(chi)
        reference = abs(d0) ** e0 * abs(dchi) ** e1
        grid = _radial_grid(A, spacing)
    tmax = -math.log(conformal_radius) if horizon is None else float(horizon)
    rng = make_rng(seed)
    hits = []
    for b in _chunks(n_samples, chunk):
        hit = np.zeros(b, dtype=bool)
        if grid.size:
            z = np.tile(grid, (b, 1))
            deriv = np.ones_like(z)
            th = np.full(b, float(chi))
            t = np.zeros(b)
            near = np.ones(b)
            act = np.arange(b)
            while act.size:
                h = np.minimum(np.minimum(dt, (np.maximum(near[act], spacing) / 4) ** 2), tmax - t[act])
                img, der = radial_map(z[act], th[act, None], h[:, None])
                z[act] = img
                deriv[act] = deriv[act] * der
                th[act] += math.sqrt(kappa) * np.sqrt(h) * rng.standard_normal(act.size)
                t[act] += h
                prox = (np.abs(z[act] - np.exp(1j * th[act])[:, None]) / np.abs(deriv[act])).min(axis=1)
                near[act] = prox
                touched = prox < threshold * spacing
                hit[act[touched]] = True
                act = act[~(touched | (t[act] >= tmax - 1e-12))]
        hits.append(hit)
    hit = np.concatenate(hits)
    p, se = proportion(~hit)
    return _report(
        "restriction_radial", p, se, reference, "|phi'(0)|^(5/48) |phi'(chi)|^(5/8)", 0.015,
        n_samples, 0, seed, start,
        chi=chi, dt=dt, capacity_limit=tmax, exponents=[e0, e1], samples={"avoided": (~hit).astype(float)},
    )


# -- non-intersection probability ------------------------------------------------------


def nonintersection_psi(x=0.5, n_samples=5000, dt=1e-3, seed=1, stop_gap=1e-5, chunk=1250, max_steps=200_000):
    """E[phi_K'(0)^(5/8)] for K an SLE_8/3 from x to 1, simulated as SLE_8/3(kappa-6) aimed at 1."""
    from .specfun import psi_kappa

    if not 0 < x < 1:
        raise ValueError("x must lie in (0, 1)")
    start = time.perf_counter()
    kappa = KAPPA_RESTRICTION
    alpha, _ = _restriction_exponents(kappa)
    spec = RhoSpec(kappa, [("one", kappa - 6)])
    rng = make_rng(seed)
    values, bad = [], []
    for b in _chunks(n_samples, chunk):
        s = ChainState.chordal({"one": 1.0, "zero": 0.0}, batch=b, W0=x)
        active = np.ones(b, dtype=bool)
        for _ in range(max_steps):
            if not active.any():
                break
            h = adaptive_dt(spec, s, dt, relative=True, fraction=GAP_FRACTION)
            advance(spec, s, rng, h, active)
            gap = np.abs(s.W - s.value("one").real)
            active &= s.is_alive("one") & (gap > stop_gap)
        values.append(s.derivative("zero").real ** alpha)
        bad.append(active | ~s.is_alive("zero"))
    v = np.concatenate(values)
    bad = np.concatenate(bad)
    est, se = mean_stderr(v[~bad])
    return _report(
        "nonintersection_psi", est, se, psi_kappa(x, kappa), "psi_kappa(x, 8/3)", 0.01,
        n_samples, bad.sum(), seed, start, x=x, dt=dt, samples={"weight": v[~bad]},
    )


# -- order of growth -------------------------------------------------------------------

COMMUTE_CASES = {
    # name: (kappa at 0, kappa at 1, rho at 0, rho at 1)
    "ii-rho2": (8 / 3, 8 / 3, 2.0, 2.0),
    "iii-dual": (8 / 3, 6.0, -4 / 3, -3.0),
    "i-kappa6": (6.0, 6.0, 0.0, 0.0),
    "rho3-control": (8 / 3, 8 / 3, 3.0, 3.0),
}


def _grow_pair(case, order, rng, n, dt, budget, collision):
    k0, k1, r0, r1 = COMMUTE_CASES[case]
    specs = [RhoSpec(k0, [("seat1", r0)]), RhoSpec(k1, [("seat0", r1)])]

    def monitor(g, idx):
        return np.abs(g.seats[idx, 0] - g.seats[idx, 1]) < collision

    g = MultiGrowth([0.0, 1.0], specs, rng, batch=n, spectators={"a": -1.0, "b": 2.0}, monitor=monitor)
    first = order
    g.grow(first, budget, max_dt=dt)
    g.grow_original(1 - first, budget, max_dt=dt, resolution=dt / 2)
    obs = np.column_stack([g.chain.value("a").real, g.chain.value("b").real, g.seats[:, 0], g.seats[:, 1]])
    bad = ~g.active | ~g.seat_alive.all(axis=1) | ~g.chain.alive.all(axis=1)
    return obs, bad


COMMUTE_OBSERVABLES = ("image_minus_one", "image_two", "drive_seat0", "drive_seat1")


def commute_order_test(case="ii-rho2", n_samples=10_000, dt=1e-3, seed=1, budget=0.05, collision=1e-6):
    """Compare growing the seat at 0 first with growing the seat at 1 first.

    Each seat ends with capacity `budget` measured in the original half-plane.
    The observables are the final images of -1 and 2 and both driving values;
    the per-component KS p-values are combined with a Bonferroni correction."""
    if case not in COMMUTE_CASES:
        raise ValueError(f"unknown case {case!r}; choose from {sorted(COMMUTE_CASES)}")
    start = time.perf_counter()
    ra, rb = substreams(seed, 2)
    X, badx = _grow_pair(case, 0, ra, n_samples, dt, budget, collision)
    Y, bady = _grow_pair(case, 1, rb, n_samples, dt, budget, collision)
    X, Y = X[~badx], Y[~bady]
    per = {}
    for k, name in enumerate(COMMUTE_OBSERVABLES):
        d, p = ks_two_sample(X[:, k], Y[:, k])
        per[name] = {"ks": d, "p": p, "mean_shift": float(X[:, k].mean() - Y[:, k].mean())}
    p_min = min(v["p"] for v in per.values())
    p = min(1.0, len(per) * p_min)
    stat = max(v["ks"] for v in per.values())
    return _report(
        f"commute_order[{case}]", stat, math.nan, 0.0, "equal laws (KS, Bonferroni over 4 observables)",
        KS_THRESHOLD, n_samples, badx.sum() + bady.sum(), seed, start, p_value=p,
        case=case, budget=budget, dt=dt, components=per,
        samples={"seat0_first": X, "seat1_first": Y},
    )


# -- coordinate change -------------------------------------------------------------------


def _exit_angles(spec, points, rng, n, dt, center, radius, mapper, max_steps):
    """Angle of mapper(first exit point of the trace from the disk |z - center| < radius)."""
    s = ChainState.chordal(points, batch=n)
    hist = []
    out = np.full(n, np.nan)
    prev = np.zeros(n, dtype=complex)
    act = np.ones(n, dtype=bool)
    for _ in range(max_steps):
        if not act.any():
            break
        h = np.where(act, adaptive_dt(spec, s, dt, relative=False), 0.0)
        hist.append((s.W.copy(), h))
        advance(spec, s, rng, h, act)
        tip = hist[-1][0] + 2j * np.sqrt(h)
        for W, hh in reversed(hist[:-1]):
            tip = slit_inverse(tip, W, hh)
        left = act & (np.abs(tip - center) >= radius)
        if left.any():
            a, b = prev[left], tip[left]
            d, f = b - a, a - center
            qa = np.abs(d) ** 2
            qb = 2 * (f.real * d.real + f.imag * d.imag)
            qc = np.abs(f) ** 2 - radius**2
            frac = (-qb + np.sqrt(qb * qb - 4 * qa * qc)) / (2 * qa)
            out[left] = np.angle(mapper(a + frac * d))
        prev = np.where(act, tip, prev)
        act &= ~left
    return out


def to_strip_end(z):
    """Moebius map of the half-plane sending 0 to 0 and infinity to 1."""
    return z / (z + 1)


def coordinate_change_test(kappa=8 / 3, n_samples=2000, dt=1e-3, seed=1, control=False, max_steps=100_000):
    """SLE_kappa(kappa-6) from 0 with force point 1 against plain SLE_kappa mapped by z/(z+1).

    Observable: angle of the first exit from |z| < 1/2.  The plain sample
    exits the preimage disk |z - 1/3| < 2/3.  With control=True the plain
    sample is left unmapped, which must be detected."""
    if kappa > 4:
        raise ValueError("kappa must be at most 4")
    start = time.perf_counter()
    ra, rb = substreams(seed, 2)
    A = _exit_angles(RhoSpec(kappa, [("one", kappa - 6)]), {"one": 1.0}, ra, n_samples, dt, 0.0, 0.5, lambda z: z, max_steps)
    if control:
        B = _exit_angles(RhoSpec(kappa), {}, rb, n_samples, dt, 0.0, 0.5, lambda z: z, max_steps)
    else:
        B = _exit_angles(RhoSpec(kappa), {}, rb, n_samples, dt, 1 / 3, 2 / 3, to_strip_end, max_steps)
    bad = np.isnan(A).sum() + np.isnan(B).sum()
    A, B = A[~np.isnan(A)], B[~np.isnan(B)]
    d, p = ks_two_sample(A, B)
    name = "coordinate_change_control" if control else "coordinate_change"
    return _report(
        name, d, math.nan, 0.0, "equal exit-angle laws (KS)", KS_THRESHOLD, n_samples, bad, seed, start,
        p_value=p, kappa=kappa, dt=dt, mean_forced=float(A.mean()), mean_plain=float(B.mean()),
        samples={"forced": A, "plain": B},
    )


# -- radial martingale ---------------------------------------------------------------------


def radial_martingale_value(curve, theta, force, rho, kappa=KAPPA_RESTRICTION):
    """Product martingale for radial SLE_kappa(rho) against the slit traced by `curve`.

    theta: driving angles (batch,); force: force-point angles (batch, n).
    The loop-soup factor is 1 at kappa = 8/3, the only value supported."""
    if abs(kappa - KAPPA_RESTRICTION) > 1e-12:
        raise ValueError("only kappa = 8/3 is supported")
    rho = [float(r) for r in rho]
    ang = np.column_stack([theta, force]) if len(rho) else np.asarray(theta)[:, None]
    if curve.shape[1] == 0:
        return np.ones(ang.shape[0])
    new, der, log0 = radial_zipper_map(curve, ang)

    def sin_ratio(i, j):
        return (np.sin((new[:, i] - new[:, j]) / 2) / np.sin((ang[:, i] - ang[:, j]) / 2)) ** 2

    logN = (6 - kappa) / (2 * kappa) * np.log(der[:, 0]) + (6 - kappa) * (kappa - 2) / (8 * kappa) * log0
    for i, r in enumerate(rho, start=1):
        logN += r * (r + 4 - kappa) / (4 * kappa) * np.log(der[:, i])
        logN += r / (2 * kappa) * np.log(sin_ratio(i, 0))
        logN += r * (r + 4) / (8 * kappa) * log0
        for j in range(i + 1, len(rho) + 1):
            c = r * rho[j - 1] / (4 * kappa)
            logN += c * (np.log(sin_ratio(i, j)) + log0)
    return np.exp(logN)


def radial_martingale_drift(rho=(2.0,), n_samples=5000, dt=1e-3, t_end=0.2, seed=1,
                            slit_angle=math.pi, slit_duration=0.05, force_angles=None,
                            slit_points=50, stop_proxy=0.05):
    """E[N_t_end] - N_0 for the radial restriction product, stopping paths that threaten the slit."""
    start = time.perf_counter()
    kappa = KAPPA_RESTRICTION
    rho = [float(r) for r in rho]
    if force_angles is None:
        force_angles = [math.pi / 2 * (k + 1) / len(rho) for k in range(len(rho))]
    if len(force_angles) != len(rho):
        raise ValueError("one angle per force point is required")
    if slit_duration > 0:
        from .confmap import radial_tip

        tip = radial_tip(slit_duration)
        slit = (1 - np.arange(1, slit_points + 1) / slit_points * (1 - tip)) * np.exp(1j * slit_angle)
    else:
        slit = np.zeros(0, dtype=complex)
    n = n_samples
    labels = {f"f{k}": a for k, a in enumerate(force_angles)}
    spec = RhoSpec(kappa, list(zip(labels, rho)))
    state = ChainState.radial({f"s{k}": p for k, p in enumerate(slit)}, labels, batch=n)
    m = slit.size
    force = lambda st: st.z[:, m:].real
    N0 = radial_martingale_value(np.tile(slit, (n, 1)), state.W, force(state), rho, kappa)
    rng = make_rng(seed)
    final = np.zeros(n)
    stopped = np.zeros(n, dtype=bool)
    steps = int(round(t_end / dt))
    for _ in range(steps):
        live = ~stopped
        advance(spec, state, rng, np.where(live, dt, 0.0), live)
        if m:
            prox = proxy_array(state, state.z[:, :m], state.deriv[:, :m]).min(axis=1)
            new = live & (prox < stop_proxy)
            if new.any():
                final[new] = radial_martingale_value(state.z[new, :m], state.W[new], force(state)[new], rho, kappa)
                stopped |= new
    live = ~stopped
    final[live] = radial_martingale_value(state.z[live, :m], state.W[live], force(state)[live], rho, kappa)
    swallowed = ~state.alive[:, m:].all(axis=1)
    D = (final - N0)[~swallowed]
    est, se = mean_stderr(D)
    tol = 3 * se if np.isfinite(se) and se > 0 else 1e-12
    return _report(
        "radial_martingale_drift", est, se, 0.0, "local martingale (zero drift)", tol, n,
        swallowed.sum(), seed, start,
        rho=rho, t_end=t_end, dt=dt, start_value=float(N0[0]), stopped_fraction=float(stopped.mean()),
        samples={"increment": D},
    )


# -- everything at once ------------------------------------------------------------------------


def acceptance_experiments(seed=1):
    """The Monte Carlo acceptance configurations, as (label, thunk) pairs."""
    return [
        ("leftmost_law", lambda: leftmost_law(1.0, 4000, 1e-3, seed)),
        ("restriction_chordal", lambda: restriction_chordal(HalfDisk(4.0, 1.0), (0.0,), 5000, 1e-3, seed=seed)),
        ("restriction_chordal_two_seat", lambda: restriction_chordal(HalfDisk(4.0, 1.0), (-1.0, 1.0), 5000, 1e-3, 0.5, seed)),
        ("nonintersection_psi", lambda: nonintersection_psi(0.5, 5000, 1e-3, seed)),
        ("commute_order", lambda: commute_order_test("ii-rho2", 10_000, 1e-3, seed)),
        ("commute_order_control", lambda: commute_order_test("rho3-control", 10_000, 1e-3, seed)),
        ("coordinate_change", lambda: coordinate_change_test(8 / 3, 2000, 1e-3, seed)),
        ("coordinate_change_control", lambda: coordinate_change_test(8 / 3, 2000, 1e-3, seed, control=True)),
        ("restriction_radial", lambda: restriction_radial(RadialSlit(math.pi, 0.05), 0.0, 5000, 0.01, seed=seed)),
        ("radial_martingale_drift", lambda: radial_martingale_drift((2.0,), 5000, 1e-3, 0.2, seed)),
    ]
