import math
from fractions import Fraction

import numpy as np
import pytest

from commsle.drive import (
    GrowthSchedule,
    MultiGrowth,
    RhoSpec,
    adaptive_dt,
    advance,
    drift_from_partition,
    grow_multi,
    make_rng,
    radial_drift,
    sle_drift,
    zipper_capacity,
)
from commsle.exactalg import var
from commsle.flow import ChainState, step_chordal, trace_points
from commsle.genops import ProductForm

x, y, z1 = var("x"), var("y"), var("z1")


def test_chordal_drift_examples():
    s = ChainState.chordal({"Z": 1.0})
    assert sle_drift(RhoSpec(8 / 3), s)[0] == 0
    assert sle_drift(RhoSpec(8 / 3, [("Z", 2)]), s)[0] == -2


def test_radial_drift_examples():
    s = ChainState.radial(angles={"chi": math.pi})
    assert abs(radial_drift(RhoSpec(8 / 3, [("chi", 2)]), s)[0]) < 1e-15
    assert radial_drift(RhoSpec(8 / 3), s)[0] == 0
    # e^{i theta} stays on the circle: the driving value is an angle
    rng = make_rng(1)
    spec = RhoSpec(8 / 3)
    for _ in range(100):
        advance(spec, s, rng, 1e-3)
    assert abs(abs(np.exp(1j * s.W[0])) - 1) < 1e-10


def test_rhospec_validation():
    with pytest.raises(ValueError):
        RhoSpec(0)
    with pytest.raises(ValueError):
        GrowthSchedule([0.0, 0.0], [])
    with pytest.raises(ValueError):
        GrowthSchedule([0.0, 1.0], [(0, -0.1)])
    with pytest.raises(ValueError):
        GrowthSchedule([0.0, 1.0], [(2, 0.1)])


def _path(seed, steps=200):
    spec = RhoSpec(8 / 3, [("Z", 2)])
    s = ChainState.chordal({"Z": 1.0, "b": 0.2 + 0.5j}, batch=8)
    rng = make_rng(seed)
    for _ in range(steps):
        advance(spec, s, rng, adaptive_dt(spec, s, 1e-3))
    return s


def test_replays_are_bit_identical():
    a, b, c = _path(5), _path(5), _path(6)
    assert np.array_equal(a.W, b.W) and np.array_equal(a.z, b.z)
    assert not np.array_equal(a.W, c.W)


def test_non_crossing_for_large_rho():
    # rho = 2 >= kappa/2 - 2: the sign of W - Z never changes
    spec = RhoSpec(8 / 3, [("Z", 2)])
    s = ChainState.chordal({"Z": 0.5}, batch=500)
    rng = make_rng(3)
    while np.any(s.t < 1):
        active = s.t < 1
        advance(spec, s, rng, np.minimum(adaptive_dt(spec, s, 1e-3), 1 - s.t), active)
        assert np.all(s.value("Z").real > s.W)
    assert np.all(s.is_alive("Z"))


def test_strong_negative_rho_reaches_force_point():
    # rho = -10/3 < kappa/2 - 2: (g(1) - W)/sqrt(kappa) is a dimension-0 Bessel
    # process from sqrt(3/8), so P(not hit by t) = 1 - exp(-3/(16 t))
    spec = RhoSpec(8 / 3, [("Z", Fraction(-10, 3))])
    n = 2000
    s = ChainState.chordal({"Z": 1.0}, batch=n)
    rng = make_rng(17)
    horizon = 5.0
    while True:
        active = s.is_alive("Z") & (s.t < horizon)
        if not np.any(active):
            break
        step = np.minimum(adaptive_dt(spec, s, 1e-3), horizon - s.t)
        advance(spec, s, rng, step, active)
    hit = s.swallowed_at[:, 0]
    for t in (0.2, 1.0, horizon):
        p = 1 - math.exp(-3 / (16 * t))
        survived = np.mean(~(hit <= t))
        assert abs(survived - p) <= 4 * math.sqrt(p * (1 - p) / n)


def test_drift_from_partition_examples():
    kappa = Fraction(8, 3)
    psi = ProductForm().times(y - x, 2 / kappa)
    point = {"x": Fraction(1, 3), "y": 2}
    assert drift_from_partition(psi, kappa, point, "x") == pytest.approx(float(2 / (point["x"] - point["y"])), rel=1e-15)
    assert drift_from_partition(ProductForm(), kappa, point, "x") == 0
    scaled = psi.times(Fraction(7, 2) + 0 * x, 1)
    assert drift_from_partition(scaled, kappa, point, "x") == drift_from_partition(psi, kappa, point, "x")
    with pytest.raises(ValueError):
        drift_from_partition(psi, kappa, {"x": 2, "y": 2}, "x")


def test_drift_from_partition_finite_difference():
    kappa = 8 / 3
    psi = ProductForm().times(y - x, Fraction(3, 4)).times(z1 - x, Fraction(-1, 3)).times(z1 - y, Fraction(5, 2))
    point = {"x": 0.1, "y": 0.9, "z1": 2.3}
    h = 1e-6

    def log_psi(v):
        return math.log(psi.evaluate({**point, "x": v}))

    fd = kappa * (log_psi(point["x"] + h) - log_psi(point["x"] - h)) / (2 * h)
    assert drift_from_partition(psi, kappa, point, "x") == pytest.approx(fd, abs=1e-6)


def test_single_seat_schedule_matches_plain_chain():
    spec = RhoSpec(2.0)
    sched = GrowthSchedule.sequential([0.0], [0.1], 1e-3)
    g = grow_multi(sched, [spec], make_rng(8), batch=16, spectators={"b": 0.4 + 0.3j})
    s = ChainState.chordal({"b": 0.4 + 0.3j}, batch=16)
    rng = make_rng(8)
    for _, c in sched.order:
        advance(spec, s, rng, c)
    assert np.array_equal(g.seats[:, 0], s.W)
    assert np.array_equal(g.chain.z, s.z)


def test_zero_budget_second_seat_is_a_spectator():
    spec = RhoSpec(8 / 3)
    sched = GrowthSchedule.sequential([0.0, 3.0], [0.1, 0.0], 1e-3)
    g = grow_multi(sched, [spec, RhoSpec(8 / 3)], make_rng(4), batch=16)
    s = ChainState.chordal({"seat": 3.0}, batch=16)
    rng = make_rng(4)
    for _, c in sched.order:
        advance(spec, s, rng, c)
    assert np.array_equal(g.seats[:, 0], s.W)
    assert np.array_equal(g.seats[:, 1], s.value("seat").real)


def test_zipper_capacity_exact_for_one_chain():
    spec = RhoSpec(8 / 3)
    s = ChainState.chordal([], batch=6, record=True)
    rng = make_rng(12)
    for _ in range(300):
        advance(spec, s, rng, 1e-3)
    tips = trace_points(s.history, range(1, 301))
    assert np.allclose(zipper_capacity(tips), s.t, rtol=1e-10)


def test_original_capacity_of_second_seat():
    specs = [RhoSpec(8 / 3, [("seat1", 2)]), RhoSpec(8 / 3, [("seat0", 2)])]
    g = MultiGrowth([0.0, 1.0], specs, make_rng(2), batch=200)
    g.grow(0, 0.02, max_dt=1e-3)
    have = g.grow_original(1, 0.02, max_dt=1e-3, resolution=5e-4)
    rel = have / 0.02 - 1
    assert np.all(rel >= -1e-3)
    assert np.median(rel) < 2e-3
    assert np.all(rel < 0.05)
    # growing seat 1 alone does not touch seat 0's original capacity
    before = g.original_capacity(0)
    assert np.allclose(before, 0.02, rtol=1e-9)


def test_step_chordal_rejects_negative_dt():
    with pytest.raises(ValueError):
        step_chordal(ChainState.chordal([1.0]), 0.0, -1e-3)


def test_radial_force_point_never_collides():
    spec = RhoSpec(8 / 3, [("chi", 2)])
    s = ChainState.radial(angles={"chi": math.pi}, batch=1000)
    rng = make_rng(23)
    while np.any(s.t < 3):
        active = s.t < 3
        advance(spec, s, rng, np.minimum(adaptive_dt(spec, s, 1e-3), 3 - s.t), active)
    assert np.all(s.is_alive("chi"))
