"""Linear differential operators with rational-function coefficients.

Builders for the two-seat generators, the integrability system, the
2n-point boundary system and its large-kappa limit, together with exact
commutator, annihilation and classification checks.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb, factorial

from .exactalg import (
    AlgebraError,
    Polynomial,
    RationalFunction,
    const,
    gcd,
    lift,
    rational_sum,
    resultant,
    substitute,
    var,
    var_key,
)

ZERO = const(0)


def _index(pairs):
    """Canonical multi-index: sorted tuple of (variable, order) with order > 0."""
    merged = {}
    for name, k in pairs:
        if k:
            merged[name] = merged.get(name, 0) + k
    return tuple(sorted(merged.items(), key=lambda p: var_key(p[0])))


def _sub_indices(alpha):
    """All (gamma, binomial weight) with gamma <= alpha componentwise."""
    names = [n for n, _ in alpha]
    ranges = [range(k + 1) for _, k in alpha]
    for ks in product(*ranges):
        weight = 1
        for (_, k), j in zip(alpha, ks):
            weight *= comb(k, j)
        yield _index(zip(names, ks)), _index((n, k - j) for (n, k), j in zip(alpha, ks)), weight


def _derive(f, alpha, cache=None):
    if cache is not None:
        key = (f, alpha)
        if key in cache:
            return cache[key]
    out = f
    for name, k in alpha:
        for _ in range(k):
            if out.is_zero():
                break
            out = out.differentiate(name)
    if cache is not None:
        cache[key] = out
    return out


class LinearDifferentialOperator:
    """Finite sum of coefficient * partial-derivative monomials."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for alpha, c in (terms or {}).items():
            c = lift(c)
            if not c.is_zero():
                alpha = _index(alpha)
                if alpha in clean:
                    c = clean[alpha] + c
                    if c.is_zero():
                        del clean[alpha]
                        continue
                clean[alpha] = c
        self.terms = clean

    @classmethod
    def d(cls, *names):
        return cls({_index((n, 1) for n in names): const(1)})

    @classmethod
    def mult(cls, f):
        return cls({(): lift(f)})

    def is_zero(self):
        return not self.terms

    def order(self):
        return max((sum(k for _, k in a) for a in self.terms), default=-1)

    def coefficient(self, *names):
        return self.terms.get(_index((n, 1) for n in names), ZERO)

    def coefficient_of(self, alpha):
        return self.terms.get(_index(alpha), ZERO)

    def __add__(self, other):
        out = dict(self.terms)
        for a, c in other.terms.items():
            s = out.get(a, ZERO) + c
            if s.is_zero():
                out.pop(a, None)
            else:
                out[a] = s
        return LinearDifferentialOperator._raw(out)

    def __neg__(self):
        return LinearDifferentialOperator._raw({a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, f):
        f = lift(f)
        if f.is_zero():
            return LinearDifferentialOperator._raw({})
        return LinearDifferentialOperator._raw({a: f * c for a, c in self.terms.items()})

    def __matmul__(self, other):
        return compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, LinearDifferentialOperator):
            return NotImplemented
        return self.terms == other.terms

    @classmethod
    def _raw(cls, terms):
        op = object.__new__(cls)
        op.terms = terms
        return op

    def apply(self, f, cache=None):
        f = lift(f)
        total = ZERO
        for alpha, c in self.terms.items():
            df = _derive(f, alpha, cache)
            if not df.is_zero():
                total = total + c * df
        return total

    def substitute(self, bindings):
        return LinearDifferentialOperator(
            {a: substitute(c, bindings) for a, c in self.terms.items()}
        )

    def __repr__(self):
        parts = []
        for alpha, c in sorted(self.terms.items(), key=lambda t: str(t[0])):
            d = "".join(f"d{n}" + (f"^{k}" if k > 1 else "") for n, k in alpha) or "1"
            parts.append(f"[{c}]*{d}")
        return " + ".join(parts) or "0"


Op = LinearDifferentialOperator


def compose(A, B):
    """Operator A o B with coefficients expanded by the Leibniz rule."""
    out = {}
    cache = {}
    for alpha, a in A.terms.items():
        subs = list(_sub_indices(alpha))
        for beta, b in B.terms.items():
            for gamma, rest, weight in subs:
                db = _derive(b, gamma, cache)
                if db.is_zero():
                    continue
                idx = _index(rest + beta)
                term = a * db * weight
                s = out.get(idx, ZERO) + term
                if s.is_zero():
                    out.pop(idx, None)
                else:
                    out[idx] = s
    return Op._raw(out)


def bracket(A, B):
    return compose(A, B) - compose(B, A)


# -- product-form functions -------------------------------------------------


@dataclass
class ProductForm:
    """psi = prod base_k ** exponent_k with rational bases and symbolic exponents."""

    factors: list = field(default_factory=list)

    def times(self, base, exponent):
        return ProductForm(self.factors + [(lift(base), lift(exponent))])

    def log_derivative(self, name):
        total = ZERO
        for base, e in self.factors:
            d = base.differentiate(name)
            if not d.is_zero():
                total = total + e * d / base
        return total

    def evaluate(self, point):
        value = 1.0
        for base, e in self.factors:
            value *= float(base.evaluate(point)) ** float(e.evaluate(point))
        return value


def cofactor(op, psi):
    """Exact rational function (op psi)/psi for a product-form psi."""
    logd = {}
    table = {(): const(1)}

    def D(alpha):
        if alpha in table:
            return table[alpha]
        # peel one derivative off the last variable
        name, k = alpha[-1]
        prev = _index(alpha[:-1] + ((name, k - 1),))
        if name not in logd:
            logd[name] = psi.log_derivative(name)
        p = D(prev)
        val = logd[name] * p + p.differentiate(name)
        table[alpha] = val
        return val

    total = ZERO
    for alpha, c in op.terms.items():
        total = total + c * D(alpha)
    return total


def check_annihilation(op, psi):
    return cofactor(op, psi)


# -- drifts and generators --------------------------------------------------


@dataclass
class DriftSpec:
    """Drift of a growth point: rational weights or a partition function."""

    kind: str
    weights: dict = field(default_factory=dict)
    psi: ProductForm = None

    @classmethod
    def rational(cls, weights):
        return cls("rational", weights={k: lift(v) for k, v in weights.items()})

    @classmethod
    def partition(cls, psi):
        return cls("partition", psi=psi)

    def drift(self, kappa, growth):
        kappa = lift(kappa)
        x = var(growth)
        if self.kind == "rational":
            total = ZERO
            for name, w in self.weights.items():
                if name == growth:
                    raise AlgebraError("force point coincides with growth point")
                total = total + w / (x - var(name))
            return total
        if self.kind == "partition":
            if self.psi is None:
                raise AlgebraError("partition drift needs psi")
            return kappa * self.psi.log_derivative(growth)
        raise AlgebraError(f"unknown drift kind {self.kind!r}")


def loewner_part(growth, others):
    x = var(growth)
    op = Op()
    for w in others:
        op = op + (2 / (var(w) - x)) * Op.d(w)
    return op


def build_generator(kappa, drift, growth, others):
    if growth in others:
        raise AlgebraError("growth variable must differ from the others")
    kappa = lift(kappa)
    b = drift.drift(kappa, growth)
    op = (kappa / 2) * Op.d(growth, growth) + loewner_part(growth, others)
    if not b.is_zero():
        op = op + b * Op.d(growth)
    return op


def commutation_residual(L, M, x, y):
    """[L, M] - 4/(y-x)^2 (M - L); zero iff the pair commutes."""
    X, Y = var(x), var(y)
    return bracket(L, M) - (4 / (Y - X) ** 2) * (M - L)


def z_names(n):
    return [f"z{i}" for i in range(1, n + 1)]


def two_seat_generators(kappa, kappat, rho, rhot, rho_z=(), rhot_z=()):
    """L at x and M at y for drifts rho/(x-y)+sum rho_i/(x-z_i) and the mirror."""
    n = len(rho_z)
    zs = z_names(n)
    bx = {"y": rho, **{z: r for z, r in zip(zs, rho_z)}}
    by = {"x": rhot, **{z: r for z, r in zip(zs, rhot_z)}}
    L = build_generator(kappa, DriftSpec.rational(bx), "x", ["y"] + zs)
    M = build_generator(kappat, DriftSpec.rational(by), "y", ["x"] + zs)
    return L, M


def commuting_family(case, n=1):
    """(kappa, kappat, rho, rhot, rho_z, rhot_z) for the three commuting families,
    with kappa and the marked-point weights symbolic."""
    k = var("kappa")
    rz = [var(f"r{i}") for i in range(1, n + 1)]
    if case == "i":
        return k, k, k - 6, k - 6, [ZERO] * n, [ZERO] * n
    if case == "ii":
        return k, k, const(2), const(2), rz, rz
    if case == "iii":
        kt = 16 / k
        return k, kt, -k / 2, -kt / 2, rz, [-(4 / k) * r for r in rz]
    raise ValueError(f"unknown family {case!r}")


def residual_conditions(L, M, x="x", y="y"):
    """The d_xy, d_x and d_y coefficients of the commutation residual."""
    R = commutation_residual(L, M, x, y)
    return R.coefficient(x, y), R.coefficient(x), R.coefficient(y), R


# -- classification of rational drifts with no marked points ----------------


def _poly_sqrt(p):
    """Exact square root of a polynomial if it is a perfect square, else None."""
    if p.is_zero():
        return p
    e, c = p.leading()
    if any(k % 2 for k in e):
        return None
    num, den = c.numerator, c.denominator
    rn, rd = _isqrt(num), _isqrt(den)
    if rn is None or rd is None:
        return None
    root = Polynomial({tuple(k // 2 for k in e): Fraction(rn, rd)}, p.variables)
    lead2 = root * 2
    for _ in range(p.total_degree() + 2):
        r = p - root * root
        if r.is_zero():
            return root
        re_, rc = r.leading()
        le, lc = lead2.leading()
        qe = tuple(i - j for i, j in zip(*_align_exp(r, re_, lead2, le)))
        if min(qe) < 0:
            return None
        names = tuple(sorted(set(r.variables) | set(lead2.variables), key=var_key))
        root = root + Polynomial({qe: rc / lc}, names)
    return None


def _align_exp(a, ea, b, eb):
    names = tuple(sorted(set(a.variables) | set(b.variables), key=var_key))
    fa = tuple(ea[a.variables.index(n)] if n in a.variables else 0 for n in names)
    fb = tuple(eb[b.variables.index(n)] if n in b.variables else 0 for n in names)
    return fa, fb


def _isqrt(n):
    if n < 0:
        return None
    from math import isqrt

    r = isqrt(n)
    return r if r * r == n else None


def _roots(p, name):
    """Roots in the coefficient field of a polynomial whose square-free part,
    after removing powers of the variable, has degree at most two."""
    from .exactalg import divide_exact

    roots = []
    coeffs = p.coefficients(name)
    low = min(coeffs)
    if low > 0:
        roots.append(const(0))
        p = divide_exact(p, Polynomial.var(name) ** low)
    if p.degree(name) <= 0:
        return roots
    g = gcd(p, p.differentiate(name))
    if g.degree(name) > 0:
        p = divide_exact(p, g)
    deg = p.degree(name)
    coeffs = p.coefficients(name)
    c = [RationalFunction(coeffs.get(i, Polynomial.const(0))) for i in range(deg + 1)]
    if deg == 1:
        roots.append(-c[0] / c[1])
    elif deg == 2:
        disc = c[1] * c[1] - 4 * c[0] * c[2]
        s_num = _poly_sqrt(disc.num)
        s_den = _poly_sqrt(disc.den)
        if s_num is None or s_den is None:
            raise AlgebraError("quadratic factor is irreducible over the coefficient field")
        s = RationalFunction(s_num, s_den)
        for sign in (1, -1):
            r = (-c[1] + sign * s) / (2 * c[2])
            if r not in roots:
                roots.append(r)
    else:
        raise AlgebraError("square-free part of degree above two")
    return roots


@dataclass
class Classification:
    resultant: RationalFunction
    kappat_roots: list
    families: list
    equations: tuple
    overlaps: list


def classify_n0():
    """Solve the commutation conditions for drifts rho/(x-y), rhot/(y-x)."""
    k, kt, r, rt = var("kappa"), var("kappat"), var("rho"), var("rhot")
    L, M = two_seat_generators(k, kt, r, rt)
    dxy, dx, dy, _ = residual_conditions(L, M)
    X, Y = var("x"), var("y")
    e1 = dxy * (X - Y) ** 2
    e2 = dx * (X - Y) ** 3
    e3 = dy * (Y - X) ** 3
    for e in (e1, e2, e3):
        if "x" in e.variables or "y" in e.variables:
            raise AlgebraError("conditions are not homogeneous constants")
    # first condition is linear in rhot
    coeffs = e1.num.coefficients("rhot")
    rt_sol = -RationalFunction(coeffs.get(0, Polynomial.const(0))) / RationalFunction(coeffs[1])
    q2 = substitute(e2, {"rhot": rt_sol})
    q3 = substitute(e3, {"rhot": rt_sol})
    res = resultant(q2, q3, "rho")
    kt_roots = _roots(res.num, "kappat")
    families = []
    for kts in kt_roots:
        if kts.is_zero():
            continue  # kappat = 0 is not an SLE
        a = substitute(q2, {"kappat": kts})
        b = substitute(q3, {"kappat": kts})
        g = gcd(a.num, b.num)
        for rho in _roots(g, "rho"):
            rhot = substitute(rt_sol, {"kappat": kts, "rho": rho})
            fam = (kts, rho, rhot)
            if fam not in families:
                families.append(fam)
    overlaps = []
    for (a, b) in combinations(range(len(families)), 2):
        fa, fb = families[a], families[b]
        diff = [(u - v) for u, v in zip(fa, fb)]
        common = diff[0].num
        for d in diff[1:]:
            common = gcd(common, d.num)
        if not common.is_constant():
            overlaps.append((a, b, common))
    return Classification(res, kt_roots, families, (e1, e2, e3), overlaps)


# -- integrability system ---------------------------------------------------


@dataclass
class WeightSpec:
    """h(x,z) = sum mu_i/(x-z_i)^2 + sum nu_ij/((x-z_i)(x-z_j)) + l_x log f."""

    mu: list = field(default_factory=list)
    nu: dict = field(default_factory=dict)
    f: object = None

    def __post_init__(self):
        self.mu = [lift(m) for m in self.mu]
        self.nu = {tuple(k): lift(v) for k, v in self.nu.items()}
        if self.f is not None:
            self.f = lift(self.f)
            if any(v in ("x", "y") for v in self.f.variables):
                raise AlgebraError("f may only depend on the marked points")

    def h(self, at, n):
        X = var(at)
        zs = [var(z) for z in z_names(n)]
        terms = []
        for m, z in zip(self.mu, zs):
            if not m.is_zero():
                terms.append(m / (X - z) ** 2)
        for (i, j), v in self.nu.items():
            if not v.is_zero():
                terms.append(v / ((X - zs[i - 1]) * (X - zs[j - 1])))
        if self.f is not None:
            # l_x log f with f depending on z only
            for name, z in zip(z_names(n), zs):
                df = self.f.differentiate(name)
                if not df.is_zero():
                    terms.append((2 / (z - X)) * df / self.f)
        return rational_sum(terms)


def build_integrability_system(kappa, kappat, h, n):
    kappa, kappat = lift(kappa), lift(kappat)
    zs = z_names(n)
    X, Y = var("x"), var("y")
    M1 = (kappa / 2) * Op.d("x", "x") + loewner_part("x", ["y"] + zs)
    M1 = M1 + Op.mult((1 - 6 / kappat) / (Y - X) ** 2 + h.h("x", n))
    M2 = (kappat / 2) * Op.d("y", "y") + loewner_part("y", ["x"] + zs)
    M2 = M2 + Op.mult((1 - 6 / kappa) / (X - Y) ** 2 + h.h("y", n))
    return M1, M2


def order0_combination(M1, M2):
    X, Y = var("x"), var("y")
    return bracket(M1, M2) + (4 / (X - Y) ** 2) * (M1 - M2)


def h_equation_residual(h, n):
    """Residual of the two-point functional equation for h."""
    zs = z_names(n)
    X, Y = var("x"), var("y")
    hx = h.h("x", n)
    hy = h.h("y", n)
    terms = [hy.differentiate("y") / (Y - X), -hx.differentiate("x") / (X - Y)]
    for name in zs:
        z = var(name)
        terms.append(hy.differentiate(name) / (z - X))
        terms.append(-hx.differentiate(name) / (z - Y))
    terms.append(2 * hx / (X - Y) ** 2)
    terms.append(-2 * hy / (X - Y) ** 2)
    return rational_sum(terms)


def check_h_equation(h, n):
    if n < 1:
        raise ValueError("need at least one marked point")
    return h_equation_residual(h, n)


def elementary_psi(kappa, kappat, mu, nu, roots):
    """Product-form solution for rational h; roots[i] solves
    (kappa/2) a (a-1) + 2a + mu_i = 0.  The pair exponent absorbs the cross
    term kappa*a_i*a_j produced by the second derivative."""
    kappa, kappat = lift(kappa), lift(kappat)
    n = len(mu)
    zs = [var(z) for z in z_names(n)]
    X, Y = var("x"), var("y")
    if kappat == kappa:
        b = 2 / kappa
        at = [lift(a) for a in roots]
    elif kappat * kappa == 16:
        b = const(Fraction(-1, 2))
        at = [-lift(a) * kappa / 4 for a in roots]
    else:
        raise AlgebraError("kappat must be kappa or 16/kappa")
    for a, m in zip(roots, mu):
        a = lift(a)
        if not ((kappa / 2) * a * (a - 1) + 2 * a + lift(m)).is_zero():
            raise AlgebraError("exponent does not solve the indicial equation")
    psi = ProductForm()
    for a, ta, z in zip(roots, at, zs):
        psi = psi.times(z - X, a).times(z - Y, ta)
    psi = psi.times(Y - X, b)
    for i, j in combinations(range(n), 2):
        v = lift(nu.get((i + 1, j + 1), 0))
        e = (v + kappa * lift(roots[i]) * lift(roots[j])) / 2
        psi = psi.times(zs[j] - zs[i], e)
    return psi


# -- one-point family annihilating h -----------------------------------------


def build_l0n(n, m):
    if n < 0:
        raise ValueError("n must be non-negative")
    X = var("x")
    op = Op()
    top = Fraction(n, (n + 1) * (n + 2))
    if top:
        op = op + Op({(("x", n + 2),): const(top)})
    for name in z_names(m):
        u = var(name) - X
        op = op + Op({_index([(name, 1), ("x", n)]): 1 / u})
        op = op - Op({((name, 1),): factorial(n) / u ** (n + 1)})
    return op


# -- 2n-point boundary system ------------------------------------------------


def x_names(n):
    return [f"x{i}" for i in range(1, 2 * n + 1)]


def build_multisle_system(n, kappa):
    if n < 1:
        raise ValueError("need at least one pair")
    kappa = lift(kappa)
    names = x_names(n)
    xs = [var(v) for v in names]
    c = (kappa - 6) / kappa
    ops = []
    for k, xk in enumerate(xs):
        op = (kappa / 2) * Op.d(names[k], names[k])
        pot = ZERO
        for l, xl in enumerate(xs):
            if l == k:
                continue
            op = op + (2 / (xl - xk)) * Op.d(names[l])
            pot = pot + 1 / (xl - xk) ** 2
        ops.append(op + Op.mult(c * pot))
    a = 1 - 6 / kappa
    ops.append(sum((Op.d(v) for v in names), Op()))
    ops.append(sum((xv * Op.d(v) for xv, v in zip(xs, names)), Op()) - Op.mult(n * a))
    ops.append(
        sum((xv * xv * Op.d(v) for xv, v in zip(xs, names)), Op())
        - Op.mult(a * sum(xs, ZERO))
    )
    return ops


def partner(k):
    """Index of the paired point for the pairing (1 2)(3 4)... (0-based)."""
    return k + 1 if k % 2 == 0 else k - 1


def build_paired_system(n, kappa):
    """The asymmetric operators attached to the pairing (1 2)(3 4)..."""
    kappa = lift(kappa)
    names = x_names(n)
    xs = [var(v) for v in names]
    c = (kappa - 6) / kappa
    ops = []
    for k, xk in enumerate(xs):
        op = (kappa / 2) * Op.d(names[k], names[k])
        for l, xl in enumerate(xs):
            if l != k:
                op = op + (2 / (xl - xk)) * Op.d(names[l])
        op = op + ((kappa - 6) / (xk - xs[partner(k)])) * Op.d(names[k])
        pot = ZERO
        for j in range(0, 2 * n, 2):
            if j in (k, partner(k)):
                continue
            pot = pot + (1 / (xs[j] - xk) - 1 / (xs[j + 1] - xk)) ** 2
        ops.append(op + Op.mult(c * pot))
    return ops


def pairing_factor(n, kappa):
    kappa = lift(kappa)
    xs = [var(v) for v in x_names(n)]
    psi = ProductForm()
    for j in range(n):
        psi = psi.times(xs[2 * j + 1] - xs[2 * j], 1 - 6 / kappa)
    return psi


def conjugate(op, psi):
    """psi^{-1} o op o psi as an operator (psi in product form)."""
    out = Op()
    for alpha, c in op.terms.items():
        # expand d^alpha (psi u) / psi = sum_gamma C(alpha,gamma) (d^gamma psi / psi) d^(alpha-gamma) u
        for gamma, rest, weight in _sub_indices(alpha):
            co = cofactor(Op({gamma: const(1)}), psi)
            if co.is_zero():
                continue
            out = out + Op({rest: c * co * weight})
    return out


def kappa_limit_system(n):
    """Large-kappa limit: d_kk, sum d_k, sum x_k d_k - n, sum x_k^2 d_k - sum x_k."""
    names = x_names(n)
    xs = [var(v) for v in names]
    ops = [Op.d(v, v) for v in names]
    ops.append(sum((Op.d(v) for v in names), Op()))
    ops.append(sum((xv * Op.d(v) for xv, v in zip(xs, names)), Op()) - Op.mult(n))
    ops.append(
        sum((xv * xv * Op.d(v) for xv, v in zip(xs, names)), Op()) - Op.mult(sum(xs, ZERO))
    )
    return ops


def _monomials(nvars, max_degree):
    out = []

    def rec(prefix, left, remaining):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for k in range(left + 1):
            rec(prefix + [k], left - k, remaining - 1)

    rec([], max_degree, nvars)
    return out


def nullspace_rank(rows, ncols):
    """Dimension of the kernel of a sparse rational matrix (rows as dicts)."""
    pivots = {}
    rank = 0
    for row in rows:
        row = {j: Fraction(v) for j, v in row.items() if v}
        while row:
            j = min(row)
            if j in pivots:
                prow = pivots[j]
                f = row[j]
                for jj, vv in prow.items():
                    s = row.get(jj, 0) - f * vv
                    if s:
                        row[jj] = s
                    else:
                        row.pop(jj, None)
            else:
                inv = 1 / row[j]
                pivots[j] = {jj: vv * inv for jj, vv in row.items()}
                rank += 1
                break
    return ncols - rank


def kappa_infinity_rank(n, max_degree=None):
    """Dimension of polynomial solutions of the large-kappa system."""
    if max_degree is None:
        max_degree = n
    if max_degree < n:
        raise ValueError("max_degree must be at least n")
    m = 2 * n
    monos = _monomials(m, max_degree)
    equations = {}

    def add(key, j, v):
        row = equations.setdefault(key, {})
        row[j] = row.get(j, 0) + v

    for j, e in enumerate(monos):
        deg = sum(e)
        for k in range(m):
            ek = e[k]
            if ek >= 2:
                t = list(e)
                t[k] -= 2
                add(("dkk", k, tuple(t)), j, ek * (ek - 1))
            if ek >= 1:
                t = list(e)
                t[k] -= 1
                add(("sum", tuple(t)), j, ek)
            # x_k^2 d_k x^e = e_k x^(e + e_k); minus x_k x^e
            t = list(e)
            t[k] += 1
            add(("mob", tuple(t)), j, ek - 1)
        add(("hom", e), j, deg - n)
    rows = [r for r in equations.values() if any(r.values())]
    return nullspace_rank(rows, len(monos))
