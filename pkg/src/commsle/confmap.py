"""Elementary hull maps of the half-plane and the disk, their compositions,
and the cocycles built from them."""

import cmath
import math
from dataclasses import dataclass


class SwallowedError(ValueError):
    """Raised when a point lies on or inside a hull."""


def slit_forward(u, t):
    """Vertical slit of height 2*sqrt(t) at 0: u -> sqrt(u^2 + 4t) on the upper sheet.

    Writing it as u*sqrt(1 + 4t/u^2) with the principal root keeps the map
    continuous off the slit and sign-correct on the real line."""
    return u * cmath.sqrt(1 + 4 * t / (u * u))


def slit_inverse(w, t):
    """Inverse of slit_forward; real inputs in (-2sqrt(t), 2sqrt(t)) land on the slit."""
    s = cmath.sqrt(w * w - 4 * t)
    if s.imag < 0 or (s.imag == 0 and (s.real * w.real < 0)):
        s = -s
    return s


def radial_forward(z, t):
    """Loewner flow for time t with constant driving 1 (slit along [r, 1])."""
    if z == 0:
        return 0j, complex(math.exp(t))
    c = math.exp(-t) * (z + 1) ** 2 / z
    d = c - 2
    s = cmath.sqrt(d * d - 4)
    if (s.conjugate() * d).real < 0:
        s = -s
    big = (d + s) / 2
    g = 1 / big
    deriv = math.exp(-t) * (z - 1) * (z + 1) / (z * z) * g * g / ((g - 1) * (g + 1))
    return g, deriv


def radial_angle(alpha, t):
    """Image angle of the boundary point e^{i alpha}, alpha in (-pi, pi], and its angular derivative."""
    half = math.cos(alpha / 2) * math.exp(-t / 2)
    beta = 2 * math.acos(half)
    if alpha < 0:
        beta = -beta
    if alpha == 0:
        raise SwallowedError("the driving point itself is on the hull")
    deriv = math.exp(-t / 2) * math.sin(alpha / 2) / math.sin(beta / 2)
    return beta, deriv


def radial_inverse(w, t):
    if w == 0:
        return 0j
    c = math.exp(t) * (w + 1) ** 2 / w
    d = c - 2
    s = cmath.sqrt(d * d - 4)
    roots = ((d + s) / 2, (d - s) / 2)
    inside = [r for r in roots if abs(r) <= 1 + 1e-12]
    if len(inside) == 1:
        return inside[0]
    # both on the circle or on the slit: keep the one continuous with w
    return min(roots, key=lambda r: abs(r - w))


def radial_tip(t):
    """Radius r of the slit [r, 1] grown in time t."""
    e = math.exp(t)
    # (1 + r)^2 / (4 r) = e^t
    return 2 * e - 1 - 2 * math.sqrt(e * e - e)


@dataclass(frozen=True)
class VerticalSlit:
    base: float
    t: float

    @property
    def capacity(self):
        return 2 * self.t

    def contains(self, z):
        z = complex(z)
        return z.real == self.base and 0 <= z.imag <= 2 * math.sqrt(self.t)

    def forward(self, z):
        if self.contains(z):
            raise SwallowedError(f"{z} lies on the slit")
        u = complex(z) - self.base
        w = slit_forward(u, self.t)
        return self.base + w, u / w

    def inverse(self, w):
        return self.base + slit_inverse(complex(w) - self.base, self.t)


@dataclass(frozen=True)
class HalfDisk:
    center: float
    radius: float

    @property
    def capacity(self):
        return self.radius**2

    def contains(self, z):
        z = complex(z)
        return z.imag >= 0 and abs(z - self.center) <= self.radius

    def forward(self, z):
        if self.contains(z):
            raise SwallowedError(f"{z} lies in the half-disk")
        u = complex(z) - self.center
        r2 = self.radius**2
        return self.center + u + r2 / u, 1 - r2 / (u * u)

    def inverse(self, w):
        v = complex(w) - self.center
        s = cmath.sqrt(v * v - 4 * self.radius**2)
        a, b = (v + s) / 2, (v - s) / 2
        u = a if abs(a) >= abs(b) else b
        return self.center + u


@dataclass(frozen=True)
class RadialSlit:
    """Hull grown in the unit disk from e^{i angle} by constant driving for a duration."""

    angle: float
    duration: float

    @property
    def capacity(self):
        return self.duration

    @property
    def tip(self):
        return radial_tip(self.duration) * cmath.exp(1j * self.angle)

    def contains(self, z):
        z = complex(z)
        rot = z * cmath.exp(-1j * self.angle)
        return abs(rot.imag) < 1e-15 and radial_tip(self.duration) <= rot.real <= 1

    def forward(self, z):
        if self.contains(z):
            raise SwallowedError(f"{z} lies on the radial slit")
        xi = cmath.exp(1j * self.angle)
        g, d = radial_forward(complex(z) / xi, self.duration)
        return xi * g, d

    def forward_angle(self, theta):
        """Boundary version acting on angles."""
        alpha = math.remainder(theta - self.angle, 2 * math.pi)
        beta, d = radial_angle(alpha, self.duration)
        return self.angle + beta, d

    def inverse(self, w):
        xi = cmath.exp(1j * self.angle)
        return xi * radial_inverse(complex(w) / xi, self.duration)


class CompositeMap:
    """phi = phi_n o ... o phi_1 for steps [phi_1, ..., phi_n]; phi_{A.B} = phi_B o phi_A."""

    def __init__(self, steps=()):
        self.steps = tuple(steps)

    def then(self, other):
        """The concatenation self.other."""
        return CompositeMap(self.steps + other.steps)

    @property
    def capacity(self):
        return sum(s.capacity for s in self.steps)

    def eval_with_deriv(self, z):
        w, d = complex(z), 1 + 0j
        for s in self.steps:
            w, ds = s.forward(w)
            d *= ds
        return w, d

    def eval(self, z):
        return self.eval_with_deriv(z)[0]

    def eval_deriv(self, z):
        return self.eval_with_deriv(z)[1]

    def inverse(self, w):
        w = complex(w)
        for s in reversed(self.steps):
            w = s.inverse(w)
        return w


def _real(v):
    return v.real if abs(v.imag) <= 1e-9 * max(1.0, abs(v)) else v


def cocycle_cij(phi, zi, zj):
    """phi'(zi) phi'(zj) ((zj - zi)/(phi(zj) - phi(zi)))^2; zj may be infinite."""
    if zi == zj:
        raise ValueError("points must be distinct")
    wi, di = phi.eval_with_deriv(zi)
    if math.isinf(zj):
        return _real(di)
    wj, dj = phi.eval_with_deriv(zj)
    return _real(di * dj * ((zj - zi) / (wj - wi)) ** 2)


def cocycle_general(phi, weights, z):
    """prod c_ij^{nu_ij} * f(phi(z)) / f(z) for a WeightSpec-like object."""
    total = 1.0
    for (i, j), v in weights.nu.items():
        nu = float(_as_number(v))
        if nu:
            total *= cocycle_cij(phi, z[i - 1], z[j - 1]) ** nu
    f = getattr(weights, "f", None)
    if f is not None:
        names = [f"z{i}" for i in range(1, len(z) + 1)]
        before = {n: v for n, v in zip(names, z)}
        after = {n: _real(phi.eval(v)) for n, v in zip(names, z)}
        total *= float(f.evaluate(after)) / float(f.evaluate(before))
    return total


def _as_number(v):
    if hasattr(v, "constant_value"):
        return v.constant_value()
    return v


def check_multiplicativity(A, B, weights, z):
    """|C(A.B, z) - C(A, z) C(B, phi_A(z))|."""
    moved = [_real(A.eval(v)) for v in z]
    lhs = cocycle_general(A.then(B), weights, z)
    rhs = cocycle_general(A, weights, z) * cocycle_general(B, weights, moved)
    return abs(lhs - rhs)
