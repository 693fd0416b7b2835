"""Exact multivariate polynomials and rational functions over the rationals.

Polynomials are sparse maps from exponent tuples to Fraction coefficients.
The variable tuple of a value only lists the variables that actually occur,
sorted by a fixed global order, so that equal values have equal
representations.  Rational functions are kept reduced, with a monic
denominator under the lexicographic monomial order.
"""

import math
import re
from fractions import Fraction
from functools import reduce


class AlgebraError(ValueError):
    pass


_SPLIT = re.compile(r"^(.*?)(\d*)$")


def var_key(name):
    head, digits = _SPLIT.match(name).groups()
    return (head, int(digits) if digits else -1, name)


def _check_name(name):
    if not isinstance(name, str) or not name.isidentifier():
        raise AlgebraError(f"bad variable name {name!r}")
    return name


def _coerce_scalar(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"not an exact scalar: {c!r}")


class Polynomial:
    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, terms=None, variables=()):
        variables = tuple(variables)
        terms = {} if terms is None else terms
        clean = {}
        for e, c in terms.items():
            c = _coerce_scalar(c)
            if c:
                if len(e) != len(variables):
                    raise AlgebraError("exponent length mismatch")
                clean[tuple(e)] = c
        order = sorted(range(len(variables)), key=lambda i: var_key(variables[i]))
        used = [i for i in order if any(e[i] for e in clean)]
        if len(set(variables[i] for i in used)) != len(used):
            raise AlgebraError("duplicate variable")
        if used != list(range(len(variables))):
            clean = {tuple(e[i] for i in used): c for e, c in clean.items()}
            variables = tuple(variables[i] for i in used)
        self.variables = variables
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms, variables):
        p = object.__new__(cls)
        p.variables = variables
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c):
        c = _coerce_scalar(c)
        return cls._raw({(): c} if c else {}, ())

    @classmethod
    def var(cls, name):
        return cls._raw({(1,): Fraction(1)}, (_check_name(name),))

    # -- structure ---------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.variables

    def constant_value(self):
        if self.variables:
            raise AlgebraError("not a constant")
        return self.terms.get((), Fraction(0))

    def is_monomial(self):
        return len(self.terms) == 1

    def leading(self):
        e = max(self.terms)
        return e, self.terms[e]

    def degree(self, name):
        if name not in self.variables:
            return 0 if self.terms else -1
        i = self.variables.index(name)
        return max(e[i] for e in self.terms)

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def _expand(self, variables):
        if variables == self.variables:
            return self.terms
        idx = [variables.index(v) for v in self.variables]
        n = len(variables)
        out = {}
        for e, c in self.terms.items():
            full = [0] * n
            for j, k in zip(idx, e):
                full[j] = k
            out[tuple(full)] = c
        return out

    def _union(self, other):
        if self.variables == other.variables:
            return self.variables
        names = set(self.variables) | set(other.variables)
        return tuple(sorted(names, key=var_key))

    def coefficients(self, name):
        """Map degree -> coefficient polynomial with respect to one variable."""
        if name not in self.variables:
            return {0: self} if self.terms else {}
        i = self.variables.index(name)
        rest = self.variables[:i] + self.variables[i + 1:]
        groups = {}
        for e, c in self.terms.items():
            groups.setdefault(e[i], {})[e[:i] + e[i + 1:]] = c
        return {d: Polynomial(t, rest) for d, t in groups.items()}

    @classmethod
    def from_coefficients(cls, name, coeffs):
        x = cls.var(name)
        total = cls.const(0)
        for d, c in coeffs.items():
            total = total + c * x ** d
        return total

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def lift(v):
        if isinstance(v, Polynomial):
            return v
        return Polynomial.const(v)

    def __add__(self, other):
        if isinstance(other, RationalFunction):
            return NotImplemented
        other = Polynomial.lift(other)
        vs = self._union(other)
        a = self._expand(vs)
        out = dict(a)
        for e, c in other._expand(vs).items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial(out, vs)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({e: -c for e, c in self.terms.items()}, self.variables)

    def __sub__(self, other):
        if isinstance(other, RationalFunction):
            return NotImplemented
        return self + (-Polynomial.lift(other))

    def __rsub__(self, other):
        return Polynomial.lift(other) - self

    def __mul__(self, other):
        if isinstance(other, RationalFunction):
            return NotImplemented
        if isinstance(other, (int, Fraction)):
            if not other:
                return Polynomial.const(0)
            return Polynomial._raw({e: c * other for e, c in self.terms.items()}, self.variables)
        vs = self._union(other)
        a = self._expand(vs)
        b = other._expand(vs)
        out = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(i + j for i, j in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return Polynomial(out, vs)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = Polynomial.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, other):
        return RationalFunction(self) / other

    def __rtruediv__(self, other):
        return RationalFunction(Polynomial.lift(other)) / self

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(other)
        if isinstance(other, RationalFunction):
            return other == self
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def scale(self, c):
        return self * _coerce_scalar(c)

    def differentiate(self, name):
        _check_name(name)
        if name not in self.variables:
            return Polynomial.const(0)
        i = self.variables.index(name)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                out[e[:i] + (k - 1,) + e[i + 1:]] = c * k
        return Polynomial(out, self.variables)

    def evaluate(self, point):
        """Evaluate at a mapping name -> number; all variables must be bound."""
        total = 0
        for e, c in self.terms.items():
            term = c
            for name, k in zip(self.variables, e):
                if k:
                    term = term * point[name] ** k
            total = total + term
        return total

    def monic(self):
        if not self.terms:
            return self
        _, lc = self.leading()
        return self * (1 / lc)

    def content(self):
        """Positive rational content: gcd of numerators over lcm of denominators."""
        nums = [c.numerator for c in self.terms.values()]
        dens = [c.denominator for c in self.terms.values()]
        if not nums:
            return Fraction(0)
        g = reduce(_igcd, nums)
        l = reduce(_ilcm, dens)
        return Fraction(abs(g), l)

    # -- printing ----------------------------------------------------------

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _igcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


def _ilcm(a, b):
    return a // _igcd(a, b) * b


# -- division and gcd -------------------------------------------------------


def divide_exact(a, b):
    """Return q with a == q*b; raise AlgebraError if b does not divide a."""
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if a.is_zero():
        return a
    if b.is_constant():
        return a * (1 / b.constant_value())
    vs = a._union(b)
    if vs != a.variables:
        raise AlgebraError("not divisible")
    bt = b._expand(vs)
    be, bc = max(bt.items())
    rem = dict(a.terms)
    quot = {}
    while rem:
        re_ = max(rem)
        rc = rem[re_]
        qe = tuple(i - j for i, j in zip(re_, be))
        if min(qe) < 0:
            raise AlgebraError("not divisible")
        qc = rc / bc
        quot[qe] = qc
        for e, c in bt.items():
            k = tuple(i + j for i, j in zip(qe, e))
            s = rem.get(k, 0) - qc * c
            if s:
                rem[k] = s
            else:
                rem.pop(k, None)
    return Polynomial(quot, vs)


def _divides(b, a):
    try:
        return divide_exact(a, b)
    except AlgebraError:
        return None


def _monomial_gcd(m, p):
    (e, _), = m.terms.items()
    vs = m.variables
    exps = {}
    for name, k in zip(vs, e):
        if name in p.variables:
            i = p.variables.index(name)
            low = min(f[i] for f in p.terms)
            if low:
                exps[name] = min(k, low)
        # variables absent from p contribute nothing
    if not exps:
        return Polynomial.const(1)
    names = tuple(sorted(exps, key=var_key))
    return Polynomial({tuple(exps[n] for n in names): 1}, names)


def _prem(a, b, name):
    """Sparse pseudo-remainder of a by b in the given variable."""
    db = b.degree(name)
    bc = b.coefficients(name)
    lcb = bc[db]
    x = Polynomial.var(name)
    r = a
    while not r.is_zero() and r.degree(name) >= db:
        dr = r.degree(name)
        lcr = r.coefficients(name)[dr]
        r = lcb * r - lcr * x ** (dr - db) * b
    return r


def _integer_primitive(p):
    """p scaled by a rational unit to coprime integer coefficients.

    Keeps pseudo-remainder sequences from growing Fraction coefficients."""
    cs = p.terms.values()
    den = reduce(math.lcm, (c.denominator for c in cs), 1)
    num = reduce(math.gcd, (c.numerator for c in cs), 0)
    return p.scale(Fraction(den, num))


def _content_in(p, name):
    coeffs = list(p.coefficients(name).values())
    return reduce(gcd, coeffs)


def gcd(a, b):
    """Monic greatest common divisor of two polynomials."""
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.is_constant() or b.is_constant():
        return Polynomial.const(1)
    if a == b:
        return a.monic()
    if a.is_monomial():
        return _monomial_gcd(a, b)
    if b.is_monomial():
        return _monomial_gcd(b, a)
    shared = [v for v in a.variables if v in b.variables]
    if not shared:
        return Polynomial.const(1)
    # a cheap exact-division probe catches the common "one divides the other" case
    if len(b.terms) <= len(a.terms):
        if _divides(b, a) is not None:
            return b.monic()
    elif _divides(a, b) is not None:
        return a.monic()
    name = shared[0]
    ca = _content_in(a, name)
    cb = _content_in(b, name)
    c = gcd(ca, cb)
    pa = _integer_primitive(divide_exact(a, ca))
    pb = _integer_primitive(divide_exact(b, cb))
    if pa.degree(name) < pb.degree(name):
        pa, pb = pb, pa
    while True:
        r = _prem(pa, pb, name)
        if r.is_zero():
            g = divide_exact(pb, _content_in(pb, name))
            break
        if r.degree(name) == 0:
            g = Polynomial.const(1)
            break
        pa, pb = pb, _integer_primitive(divide_exact(r, _content_in(r, name)))
    return (c * g).monic()


# -- rational functions -----------------------------------------------------


def _linear(p):
    return p.total_degree() == 1


def _split_base(p):
    """Split a polynomial into (monic base, multiplicity) pieces and a scalar."""
    _, lc = p.leading()
    p = p * (1 / lc)
    if p.is_constant():
        return lc, []
    if p.is_monomial():
        (e, _), = p.terms.items()
        return lc, [(Polynomial.var(v), k) for v, k in zip(p.variables, e)]
    return lc, [(p, 1)]


def _coprime_pair(p, q):
    if p == q:
        return p
    if _linear(p) and _linear(q):
        return None
    if not set(p.variables) & set(q.variables):
        return None
    g = gcd(p, q)
    return None if g.is_constant() else g


def _refine(factors, extra):
    """Merge (base, exponent) pairs into a pairwise coprime base.

    factors is a coprime dict {base: exponent}; the result is a new dict whose
    product equals the product of both inputs."""
    out = dict(factors)
    work = list(extra)
    while work:
        q, k = work.pop()
        if q.is_constant() or not k:
            continue
        if q.is_monomial() and len(q.variables) + sum(next(iter(q.terms))) > 2:
            # x^a y^b splits into the bases x and y
            (e, _), = q.terms.items()
            work.extend((Polynomial.var(v), a * k) for v, a in zip(q.variables, e))
            continue
        if q in out:
            out[q] += k
            continue
        for p in list(out):
            g = _coprime_pair(p, q)
            if g is None:
                continue
            j = out.pop(p)
            work.append((g, j + k))
            pr = divide_exact(p, g)
            qr = divide_exact(q, g)
            for r, m in ((pr, j), (qr, k)):
                if not r.is_constant():
                    _, lc = r.leading()
                    work.append((r * (1 / lc), m))
            break
        else:
            out[q] = k
    return out


def _reduce(num, factors):
    """Cancel common factors of num against a coprime base."""
    factors = dict(factors)
    if num.is_zero():
        return num, {}
    changed = True
    while changed:
        changed = False
        for p in list(factors):
            k = factors[p]
            while k:
                q = _divides(p, num)
                if q is None:
                    break
                num = q
                k -= 1
            if k:
                factors[p] = k
            else:
                del factors[p]
                continue
            if _linear(p) or p.is_monomial():
                continue
            g = gcd(num, p)
            if not g.is_constant():
                # split the base and retry with the finer pieces
                del factors[p]
                factors = _refine(factors, [(g, k), (divide_exact(p, g), k)])
                changed = True
                break
    return num, factors


def _expand_factors(factors):
    out = Polynomial.const(1)
    for p, k in factors.items():
        out = out * p ** k
    return out


class RationalFunction:
    """Quotient num/den kept in lowest terms.  The denominator is stored as a
    pairwise coprime product of monic bases, which keeps sums cheap."""

    __slots__ = ("num", "factors", "_den", "_hash")

    def __init__(self, num, den=None, _reduced=False):
        num = Polynomial.lift(num)
        factors = {}
        if den is not None:
            den = Polynomial.lift(den)
            if den.is_zero():
                raise ZeroDivisionError("zero denominator")
            lc, pieces = _split_base(den)
            num = num * (1 / lc)
            factors = _refine({}, pieces)
        if not _reduced:
            num, factors = _reduce(num, factors)
        self._set(num, factors)

    def _set(self, num, factors):
        self.num = num
        self.factors = {} if num.is_zero() else factors
        self._den = None
        self._hash = None

    @classmethod
    def _make(cls, num, factors, reduced=False):
        f = object.__new__(cls)
        if not reduced:
            num, factors = _reduce(num, factors)
        f._set(num, factors)
        return f

    @property
    def den(self):
        if self._den is None:
            self._den = _expand_factors(self.factors)
        return self._den

    @classmethod
    def var(cls, name):
        return cls._make(Polynomial.var(name), {}, True)

    @classmethod
    def const(cls, c):
        return cls._make(Polynomial.const(c), {}, True)

    @staticmethod
    def lift(v):
        if isinstance(v, RationalFunction):
            return v
        if isinstance(v, Polynomial):
            return RationalFunction._make(v, {}, True)
        return RationalFunction._make(Polynomial.const(v), {}, True)

    @property
    def variables(self):
        names = set(self.num.variables)
        for p in self.factors:
            names.update(p.variables)
        return tuple(sorted(names, key=var_key))

    def is_zero(self):
        return self.num.is_zero()

    def is_constant(self):
        return self.num.is_constant() and not self.factors

    def constant_value(self):
        if not self.is_constant():
            raise AlgebraError("not a constant")
        return self.num.constant_value()

    def is_polynomial(self):
        return not self.factors

    def _over(self, common):
        """Numerator after rewriting self over the coprime base common."""
        num = self.num
        mine = {}
        for p, k in self.factors.items():
            if p in common:
                mine[p] = mine.get(p, 0) + k
                continue
            # p splits into several bases of common
            rest = p
            for r in common:
                while not rest.is_constant():
                    q = _divides(r, rest)
                    if q is None:
                        break
                    rest = q
                    mine[r] = mine.get(r, 0) + k
            if not rest.is_constant():
                raise AlgebraError("denominator base does not split over the common base")
            num = num * (1 / rest.constant_value())
        return num, mine

    def __add__(self, other):
        if not isinstance(other, (RationalFunction, Polynomial, int, Fraction)):
            return NotImplemented
        return rational_sum([self, other])

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._make(-self.num, self.factors, True)

    def __sub__(self, other):
        if not isinstance(other, (RationalFunction, Polynomial, int, Fraction)):
            return NotImplemented
        return self + (-RationalFunction.lift(other))

    def __rsub__(self, other):
        return RationalFunction.lift(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return RationalFunction.const(0)
            return RationalFunction._make(self.num * other, self.factors, True)
        if not isinstance(other, (RationalFunction, Polynomial)):
            return NotImplemented
        other = RationalFunction.lift(other)
        if self.is_zero() or other.is_zero():
            return RationalFunction.const(0)
        a, fa = _reduce(self.num, other.factors)
        b, fb = _reduce(other.num, self.factors)
        factors = _refine(fb, list(fa.items()))
        # a and b are each coprime to every base, hence so is a*b
        return RationalFunction._make(a * b, factors, True)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        lc, pieces = _split_base(self.num)
        num = _expand_factors(self.factors) * (1 / lc)
        return RationalFunction._make(num, _refine({}, pieces), True)

    def __truediv__(self, other):
        if not isinstance(other, (RationalFunction, Polynomial, int, Fraction)):
            return NotImplemented
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return self * (1 / Fraction(other))
        return self * RationalFunction.lift(other).inverse()

    def __rtruediv__(self, other):
        return RationalFunction.lift(other) * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return RationalFunction.const(1)
        return RationalFunction._make(self.num ** k, {p: j * k for p, j in self.factors.items()}, True)

    def __eq__(self, other):
        if not isinstance(other, (RationalFunction, Polynomial, int, Fraction)):
            return NotImplemented
        other = RationalFunction.lift(other)
        if self.factors == other.factors:
            return self.num == other.num
        # the coprime base is not unique, the expanded monic denominator is
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    def differentiate(self, name):
        _check_name(name)
        dn = self.num.differentiate(name)
        moving = [(p, k, p.differentiate(name)) for p, k in self.factors.items()]
        moving = [m for m in moving if not m[2].is_zero()]
        if not moving:
            if dn.is_zero():
                return RationalFunction.const(0)
            return RationalFunction._make(dn, self.factors)
        # d(N / prod p^k) = (N' prod p - N sum k p' prod_{q != p} q) / (prod p^k * prod p)
        bases = [m[0] for m in moving]
        prod_all = Polynomial.const(1)
        for p in bases:
            prod_all = prod_all * p
        num = dn * prod_all
        for i, (p, k, dp) in enumerate(moving):
            others = Polynomial.const(1)
            for j, q in enumerate(bases):
                if j != i:
                    others = others * q
            num = num - self.num * dp * others * k
        factors = dict(self.factors)
        for p in bases:
            factors[p] += 1
        return RationalFunction._make(num, factors)

    def evaluate(self, point):
        d = Fraction(1)
        for p, k in self.factors.items():
            d *= p.evaluate(point) ** k
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the point")
        return self.num.evaluate(point) / d

    def __repr__(self):
        return f"RationalFunction({self})"

    def __str__(self):
        if not self.factors:
            return str(self.num)
        return f"({self.num})/({self.den})"


def rational_sum(terms):
    """Sum rational functions over one common denominator, reducing once."""
    terms = [RationalFunction.lift(t) for t in terms]
    terms = [t for t in terms if not t.is_zero()]
    if not terms:
        return RationalFunction.const(0)
    if len(terms) == 1:
        return terms[0]
    common = {}
    for t in terms:
        common = _refine(common, [(p, 1) for p in t.factors if p not in common])
    for p in common:
        common[p] = 0
    rewritten = []
    for t in terms:
        num, mine = t._over(common)
        rewritten.append((num, mine))
        for p, k in mine.items():
            common[p] = max(common[p], k)
    common = {p: k for p, k in common.items() if k}
    total = Polynomial.const(0)
    for num, mine in rewritten:
        for p, k in common.items():
            extra = k - mine.get(p, 0)
            if extra:
                num = num * p ** extra
        total = total + num
    return RationalFunction._make(total, common)


def var(name):
    return RationalFunction.var(name)


def const(c):
    return RationalFunction.const(c)


def lift(v):
    return RationalFunction.lift(v)


_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


def arith(lhs, rhs, op):
    try:
        fn = _OPS[op]
    except KeyError:
        raise AlgebraError(f"unknown operation {op!r}") from None
    return fn(lift(lhs), lift(rhs))


def differentiate(f, name):
    return lift(f).differentiate(name)


def substitute(f, bindings):
    """Replace variables by rational functions (simultaneously)."""
    f = lift(f)
    bindings = {k: lift(v) for k, v in bindings.items()}

    def subst_poly(p):
        if not any(v in bindings for v in p.variables):
            return lift(p)
        powers = {}
        total = const(0)
        for e, c in p.terms.items():
            term = const(c)
            for name, k in zip(p.variables, e):
                if not k:
                    continue
                if name in bindings:
                    key = (name, k)
                    if key not in powers:
                        powers[key] = bindings[name] ** k
                    term = term * powers[key]
                else:
                    term = term * var(name) ** k
            total = total + term
        return total

    num = subst_poly(f.num)
    den = subst_poly(f.den)
    if den.is_zero():
        raise ZeroDivisionError("denominator vanishes after substitution")
    return num / den


def _as_coefficient_list(p, name):
    p = lift(p)
    if name in p.den.variables:
        raise AlgebraError(f"{name} occurs in a denominator")
    coeffs = p.num.coefficients(name)
    deg = max(coeffs, default=-1)
    return [RationalFunction(coeffs[d], p.den) if d in coeffs else const(0) for d in range(deg + 1)]


def determinant(rows):
    """Determinant of a square matrix of rational functions (Gaussian elimination)."""
    m = [[lift(x) for x in row] for row in rows]
    n = len(m)
    det = const(1)
    for col in range(n):
        pivot = None
        best = None
        for r in range(col, n):
            if not m[r][col].is_zero():
                size = len(m[r][col].num.terms) + len(m[r][col].den.terms)
                if best is None or size < best:
                    pivot, best = r, size
        if pivot is None:
            return const(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        p = m[col][col]
        det = det * p
        inv = p.inverse()
        for r in range(col + 1, n):
            if m[r][col].is_zero():
                continue
            factor = m[r][col] * inv
            m[r] = [m[r][j] - factor * m[col][j] if j > col else const(0) for j in range(n)]
    return det


def resultant(p, q, name):
    """Sylvester resultant of p and q with respect to one variable."""
    a = _as_coefficient_list(p, name)
    b = _as_coefficient_list(q, name)
    m, n = len(a) - 1, len(b) - 1
    if m < 1 or n < 1:
        raise AlgebraError(f"both arguments need positive degree in {name}")
    size = m + n
    rows = []
    for i in range(n):
        row = [const(0)] * size
        for j, c in enumerate(reversed(a)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [const(0)] * size
        for j, c in enumerate(reversed(b)):
            row[i + j] = c
        rows.append(row)
    return determinant(rows)
