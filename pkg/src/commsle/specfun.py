"""Gamma, digamma, Gauss hypergeometric 2F1 and the SLE weight constants."""

import math
from dataclasses import dataclass
from fractions import Fraction

# Lanczos approximation, g = 7, nine coefficients
_LANCZOS_G = 7
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_EPS = 1e-16
_MAX_TERMS = 10_000
_DIRECT_LIMIT = 0.98


class ParameterError(ValueError):
    pass


def _is_nonpositive_int(v):
    return v <= 0 and v == math.floor(v)


def gamma(x):
    x = float(x)
    if _is_nonpositive_int(x):
        raise ParameterError(f"gamma has a pole at {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma(1 - x))
    x -= 1
    acc = _LANCZOS[0]
    for k, c in enumerate(_LANCZOS[1:], start=1):
        acc += c / (x + k)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def lgamma(x):
    """log|Gamma(x)|."""
    x = float(x)
    if _is_nonpositive_int(x):
        raise ParameterError(f"gamma has a pole at {x}")
    if x < 0.5:
        return math.log(math.pi / abs(math.sin(math.pi * x))) - lgamma(1 - x)
    x -= 1
    acc = _LANCZOS[0]
    for k, c in enumerate(_LANCZOS[1:], start=1):
        acc += c / (x + k)
    t = x + _LANCZOS_G + 0.5
    return 0.5 * math.log(2 * math.pi) + (x + 0.5) * math.log(t) - t + math.log(acc)


def _rgamma(x):
    """1/Gamma(x), zero at the poles."""
    if _is_nonpositive_int(x):
        return 0.0
    return 1.0 / gamma(x)


def digamma(x):
    x = float(x)
    if _is_nonpositive_int(x):
        raise ParameterError(f"digamma has a pole at {x}")
    if x < 0.5:
        return digamma(1 - x) - math.pi / math.tan(math.pi * x)
    acc = 0.0
    while x < 8:
        acc -= 1 / x
        x += 1
    inv2 = 1 / (x * x)
    # asymptotic series with Bernoulli numbers
    tail = inv2 * (1 / 12 - inv2 * (1 / 120 - inv2 * (1 / 252 - inv2 * (1 / 240 - inv2 / 132))))
    return acc + math.log(x) - 0.5 / x - tail


def _series(a, b, c, x):
    term = 1.0
    total = 1.0
    for n in range(_MAX_TERMS):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * x
        total += term
        if term == 0 or abs(term) < _EPS * abs(total):
            return total
    raise ArithmeticError("hypergeometric series did not converge")


def _integer_gap(a, b, m, y):
    """F(a, b; a+b+m; 1-y) for an integer m >= 0 (logarithmic case)."""
    c = a + b + m
    head = 0.0
    if m > 0:
        term = 1.0
        for n in range(m):
            if n:
                term *= (a + n - 1) * (b + n - 1) / (n * (n - m)) * y
            head += term
        head *= gamma(m) * gamma(c) * _rgamma(a + m) * _rgamma(b + m)
    pref = gamma(c) * _rgamma(a) * _rgamma(b)
    if pref == 0:
        return head
    logy = math.log(y)
    coef = 1.0 / math.factorial(m)
    tail = 0.0
    for n in range(_MAX_TERMS):
        if n:
            coef *= (a + m + n - 1) * (b + m + n - 1) / (n * (n + m)) * y
        bracket = (
            logy - digamma(n + 1) - digamma(n + m + 1) + digamma(a + n + m) + digamma(b + n + m)
        )
        piece = coef * bracket
        tail += piece
        if n > 2 and abs(piece) < _EPS * max(abs(tail), 1e-300):
            break
    # (x-1)^m = (-y)^m
    return head - pref * (-y) ** m * tail


def hyp2f1(a, b, c, x):
    """Gauss hypergeometric function for real parameters and 0 <= x < 1."""
    a, b, c, x = float(a), float(b), float(c), float(x)
    if _is_nonpositive_int(c):
        raise ParameterError("c must not be a non-positive integer")
    if not 0 <= x < 1:
        raise ParameterError("x must lie in [0, 1)")
    if x == 0:
        return 1.0
    if _is_nonpositive_int(a) or _is_nonpositive_int(b) or x <= 0.5:
        return _series(a, b, c, x)
    gap = c - a - b
    y = 1 - x
    if gap < 0:
        # Euler transformation makes the gap positive
        return y**gap * hyp2f1(c - a, c - b, c, x)
    m = round(gap)
    if abs(gap - m) < 1e-12:
        return _integer_gap(a, b, m, y)
    if abs(gap - m) < 0.1 and x <= _DIRECT_LIMIT:
        # the connection coefficients nearly cancel here; the plain series is safer
        return _series(a, b, c, x)
    first = gamma(c) * gamma(gap) * _rgamma(c - a) * _rgamma(c - b) * _series(a, b, 1 - gap, y)
    second = gamma(c) * gamma(-gap) * _rgamma(a) * _rgamma(b) * y**gap * _series(c - a, c - b, 1 + gap, y)
    return first + second


def gauss_sum(a, b, c):
    """F(a, b; c; 1) when c - a - b > 0."""
    if c - a - b <= 0:
        raise ParameterError("Gauss summation needs c - a - b > 0")
    return math.exp(lgamma(c) + lgamma(c - a - b) - lgamma(c - a) - lgamma(c - b))


def psi_kappa(x, kappa):
    """Non-intersection probability of two SLEs in (H, inf, 0, x, 1)."""
    kappa = float(kappa)
    if not 0 < kappa <= 8 / 3 + 1e-15:
        raise ParameterError("kappa must lie in (0, 8/3]")
    if not 0 < x < 1:
        raise ParameterError("x must lie in (0, 1)")
    k = 4 / kappa
    log_pref = lgamma(k) + lgamma(3 * k - 1) - lgamma(2 * k) - lgamma(2 * k - 1)
    return math.exp(log_pref) * x ** (2 / kappa) * hyp2f1(k, 1 - k, 2 * k, x)


@dataclass(frozen=True)
class Weights:
    kappa: object

    @property
    def alpha(self):
        k = self.kappa
        return (6 - k) / (2 * k)

    @property
    def lam(self):
        k = self.kappa
        return (6 - k) * (8 - 3 * k) / (2 * k)

    def h(self, p, q):
        k = self.kappa
        return ((p * k - 4 * q) ** 2 - (k - 4) ** 2) / (16 * k)


def weights(kappa):
    if kappa <= 0:
        raise ParameterError("kappa must be positive")
    if isinstance(kappa, int):
        kappa = Fraction(kappa)
    return Weights(kappa)


def catalan(n):
    if n < 0:
        raise ParameterError("n must be non-negative")
    return math.comb(2 * n, n) // (n + 1)
