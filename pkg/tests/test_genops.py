import itertools
from fractions import Fraction

import pytest
import sympy as sp

from commsle.exactalg import const, substitute, var
from commsle.genops import (
    DriftSpec,
    Op,
    ProductForm,
    WeightSpec,
    bracket,
    build_generator,
    build_integrability_system,
    build_l0n,
    build_multisle_system,
    build_paired_system,
    check_annihilation,
    check_h_equation,
    classify_n0,
    commutation_residual,
    commuting_family,
    compose,
    conjugate,
    elementary_psi,
    kappa_infinity_rank,
    kappa_limit_system,
    order0_combination,
    pairing_factor,
    two_seat_generators,
)

from conftest import sympy_equal, to_sympy

k, kt = var("kappa"), var("kappat")
x, y, z1 = var("x"), var("y"), var("z1")


def test_compose_leibniz_examples():
    assert compose(Op.d("x"), Op.mult(x)) == x * Op.d("x") + Op.mult(1)
    f, g = x * y, 1 / (x - y)
    lhs = compose(f * Op.d("x"), g * Op.d("x"))
    rhs = (f * g) * Op.d("x", "x") + (f * g.differentiate("x")) * Op.d("x")
    assert lhs == rhs


def test_generator_display():
    L = build_generator(k, DriftSpec.rational({"y": 2}), "x", ["y"])
    expected = (k / 2) * Op.d("x", "x") + (2 / (x - y)) * Op.d("x") + (2 / (y - x)) * Op.d("y")
    assert L == expected
    plain = build_generator(k, DriftSpec.rational({"y": 0}), "x", ["y"])
    assert plain == (k / 2) * Op.d("x", "x") + (2 / (y - x)) * Op.d("y")


def test_partition_drift_equals_rho_two():
    psi = ProductForm().times(y - x, 2 / k)
    a = build_generator(k, DriftSpec.partition(psi), "x", ["y"])
    b = build_generator(k, DriftSpec.rational({"y": 2}), "x", ["y"])
    assert a == b


def test_commutator_identity_case_ii_n0():
    L, M = two_seat_generators(k, k, const(2), const(2))
    assert bracket(L, M) == (4 / (y - x) ** 2) * (M - L)


@pytest.mark.parametrize("case", ["i", "ii", "iii"])
def test_families_commute_with_symbolic_weights(case):
    for n in (0, 1):
        L, M = two_seat_generators(*commuting_family(case, n))
        assert commutation_residual(L, M, "x", "y").is_zero()


def test_rho_three_does_not_commute():
    L, M = two_seat_generators(k, k, const(3), const(3))
    R = commutation_residual(L, M, "x", "y")
    assert not R.is_zero()
    point = {"kappa": Fraction(7, 3), "x": Fraction(-1, 2), "y": Fraction(5, 4)}
    assert any(c.evaluate(point) != 0 for c in R.terms.values())


def _sympy_residual(kappa, kappat, bx, by, others):
    """[L, M] f - 4/(y-x)^2 (M - L) f for a generic f, computed by sympy."""
    X, Y = sp.symbols("x y")
    syms = [X, Y] + [sp.Symbol(o) for o in others]
    f = sp.Function("f")(*syms)

    def L(g):
        out = kappa / 2 * sp.diff(g, X, 2) + bx * sp.diff(g, X)
        for s in syms[1:]:
            out += 2 / (s - X) * sp.diff(g, s)
        return out

    def M(g):
        out = kappat / 2 * sp.diff(g, Y, 2) + by * sp.diff(g, Y)
        for s in [syms[0]] + syms[2:]:
            out += 2 / (s - Y) * sp.diff(g, s)
        return out

    return sp.expand(L(M(f)) - M(L(f)) - 4 / (Y - X) ** 2 * (M(f) - L(f)))


def test_residual_matches_independent_sympy_route():
    K = sp.Symbol("kappa")
    X, Y, Z = sp.symbols("x y z1")
    # a non-commuting choice, so both sides are nontrivial
    bx = 3 / (X - Y) + sp.Rational(1, 2) / (X - Z)
    by = 3 / (Y - X) - 1 / (Y - Z)
    theirs = _sympy_residual(K, K, bx, by, ["z1"])
    L = build_generator(k, DriftSpec.rational({"y": 3, "z1": Fraction(1, 2)}), "x", ["y", "z1"])
    M = build_generator(k, DriftSpec.rational({"x": 3, "z1": -1}), "y", ["x", "z1"])
    R = commutation_residual(L, M, "x", "y")
    f = sp.Function("f")(X, Y, Z)
    names = {"x": X, "y": Y, "z1": Z}
    mine = 0
    for alpha, c in R.terms.items():
        d = f
        for name, m in alpha:
            d = sp.diff(d, names[name], m)
        mine += to_sympy(c) * d
    assert sp.simplify(sp.expand(mine - theirs)) == 0


def test_residual_antisymmetry():
    L, M = two_seat_generators(k, kt, const(3), const(-1))
    assert commutation_residual(L, M, "x", "y") == -commutation_residual(M, L, "y", "x")


def test_dxy_coefficient_condition():
    rho, rhot = const(3), const(Fraction(1, 2))
    L, M = two_seat_generators(k, kt, rho, rhot)
    R = commutation_residual(L, M, "x", "y")
    b = rho / (x - y)
    bt = rhot / (y - x)
    assert R.coefficient("x", "y") == k * bt.differentiate("x") - kt * b.differentiate("y")


def test_classification_families_and_resultant():
    c = classify_n0()
    fams = {(str(a), str(b), str(r)) for a, b, r in c.families}
    expected = {
        (str(k), str(const(2)), str(const(2))),
        (str(k), str(k - 6), str(k - 6)),
        (str(16 / k), str(-k / 2), str(-8 / k)),
    }
    assert fams == expected
    target = 12 * kt * (kt - k) ** 2 * (k * kt - 16) / k**3
    ratio = c.resultant / target
    assert ratio.is_constant() and ratio.constant_value() != 0


def test_dual_family_merges_at_kappa_four():
    fams = classify_n0().families
    at4 = {tuple(substitute(v, {"kappa": 4}) for v in f) for f in fams}
    assert (const(4), const(-2), const(-2)) in at4
    assert len(at4) == 2


def test_integrability_system_display():
    M1, _ = build_integrability_system(k, k, WeightSpec(), 0)
    expected = (k / 2) * Op.d("x", "x") + (2 / (y - x)) * Op.d("y") + Op.mult((1 - 6 / k) / (y - x) ** 2)
    assert M1 == expected


def test_order0_coefficient():
    M1, M2 = build_integrability_system(k, kt, WeightSpec(), 0)
    R = order0_combination(M1, M2)
    assert R.order() == 0
    c = R.coefficient()
    assert c == 3 * (k * kt - 16) * (k - kt) / (k * kt) / (x - y) ** 4
    assert substitute(c, {"kappat": 16 / k}).is_zero()


def test_annihilation_examples():
    M1, M2 = build_integrability_system(2, 2, WeightSpec(mu=[0]), 1)
    psi = ProductForm().times(z1 - x, -1).times(z1 - y, -1).times(y - x, 1)
    assert check_annihilation(M1, psi).is_zero()
    assert check_annihilation(M2, psi).is_zero()
    assert elementary_psi(2, 2, [0], {}, [-1]).factors == psi.factors

    M1, M2 = build_integrability_system(k, k, WeightSpec(), 0)
    good = ProductForm().times(y - x, 2 / k)
    assert check_annihilation(M1, good).is_zero() and check_annihilation(M2, good).is_zero()
    bad = ProductForm().times(y - x, 1)
    assert not check_annihilation(M1, bad).is_zero()


def test_annihilation_matches_sympy():
    K = sp.Symbol("kappa")
    X, Y = sp.symbols("x y")
    psi = (Y - X) ** (2 / K)
    M1, _ = build_integrability_system(k, k, WeightSpec(), 0)
    direct = K / 2 * sp.diff(psi, X, 2) + 2 / (Y - X) * sp.diff(psi, Y) + (1 - 6 / K) / (Y - X) ** 2 * psi
    assert sp.simplify(direct / psi) == 0
    assert check_annihilation(M1, ProductForm().times(y - x, 2 / k)).is_zero()


@pytest.mark.parametrize("kappa", [Fraction(2), Fraction(8, 3)])
def test_elementary_psi_both_dualities(kappa):
    roots = [Fraction(1), Fraction(-1, 3)]
    mu = [-(kappa / 2 * a * (a - 1) + 2 * a) for a in roots]
    nu = {(1, 2): Fraction(2, 5)}
    for kappat in (kappa, 16 / kappa):
        psi = elementary_psi(const(kappa), const(kappat), mu, nu, roots)
        M1, M2 = build_integrability_system(const(kappa), const(kappat), WeightSpec(mu=mu, nu=nu), 2)
        assert check_annihilation(M1, psi).is_zero()
        assert check_annihilation(M2, psi).is_zero()


def test_h_equation_examples():
    nu = var("nu")
    assert check_h_equation(WeightSpec(mu=[-2 * nu]), 1).is_zero()
    assert check_h_equation(WeightSpec(), 1).is_zero()
    mu = [var("m1"), var("m2")]
    assert check_h_equation(WeightSpec(mu=mu, nu={(1, 2): var("n12")}), 2).is_zero()


def test_h_equation_invariant_under_scaling_f():
    z2 = var("z2")
    f = (z2 - z1) ** 3 / (z1 * z1 + 1)
    for c in (1, 7, Fraction(-2, 3)):
        h = WeightSpec(mu=[var("m1"), var("m2")], nu={(1, 2): var("n12")}, f=c * f)
        assert check_h_equation(h, 2).is_zero()


def test_l0n():
    assert build_l0n(0, 2).is_zero()
    nu = var("nu")
    h = -2 * nu / (x - z1) ** 2
    assert build_l0n(1, 1).apply(h).is_zero()
    # (x - z)^-m is annihilated for m = 1, 2 only
    assert build_l0n(1, 1).apply(1 / (x - z1)).is_zero()
    assert build_l0n(1, 1).apply(1 / (x - z1) ** 3) == -1 / (x - z1) ** 6


def test_l0n_matches_sympy():
    X, Z = sp.symbols("x z1")
    h = 1 / (X - Z) ** 3 + X / (X - Z) ** 5
    for n in (1, 2):
        direct = sp.Rational(n, (n + 1) * (n + 2)) * sp.diff(h, X, n + 2)
        direct += sp.diff(h, Z, 1, X, n) / (Z - X) - sp.factorial(n) * sp.diff(h, Z) / (Z - X) ** (n + 1)
        mine = build_l0n(n, 1).apply(1 / (x - z1) ** 3 + x / (x - z1) ** 5)
        assert sympy_equal(to_sympy(mine), direct)


def test_multisle_n1_solution():
    ops = build_multisle_system(1, k)
    assert len(ops) == 5
    x1, x2 = var("x1"), var("x2")
    psi = ProductForm().times(x2 - x1, (k - 6) / k)
    for op in ops:
        assert check_annihilation(op, psi).is_zero()


@pytest.mark.parametrize("n", [1, 2])
def test_conjugation_gives_paired_operators(n):
    base = build_multisle_system(n, k)[: 2 * n]
    paired = build_paired_system(n, k)
    factor = pairing_factor(n, k)
    for a, b in zip(base, paired):
        assert conjugate(a, factor) == b


def test_kappa_limit_solution_n2():
    xs = [var(f"x{i}") for i in range(1, 5)]
    psi = (xs[1] - xs[0]) * (xs[3] - xs[2])
    for op in kappa_limit_system(2):
        assert op.apply(psi).is_zero()


@pytest.mark.parametrize("n,expected", [(1, 1), (2, 2)])
def test_kappa_infinity_rank_small(n, expected):
    assert kappa_infinity_rank(n) == expected


def test_kappa_infinity_rank_n2_sympy_oracle():
    xs = sp.symbols("x1:5")
    monos = [m for m in itertools.combinations_with_replacement(xs, 2)]
    cs = sp.symbols(f"c0:{len(monos)}")
    psi = sum(c * sp.Mul(*m) for c, m in zip(cs, monos))
    eqs = [sp.diff(psi, v, 2) for v in xs]
    eqs.append(sum(sp.diff(psi, v) for v in xs))
    eqs.append(sum(v * v * sp.diff(psi, v) for v in xs) - sum(xs) * psi)
    coeffs = []
    for e in eqs:
        coeffs += sp.Poly(sp.expand(e), *xs).coeffs()
    A = sp.Matrix([[sp.diff(c, v) for v in cs] for c in coeffs])
    assert len(cs) - A.rank() == 2


def test_kappa_infinity_rank_degree_guard():
    with pytest.raises(ValueError):
        kappa_infinity_rank(2, max_degree=1)
