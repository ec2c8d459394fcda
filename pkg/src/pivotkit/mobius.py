"""Complex Moebius maps: complex lengths, the omega invariant, fixed points and axis distances.

Every numeric routine takes ``bits``: 53 uses ``cmath`` on Python complex
numbers; anything larger runs under ``mpmath.workprec(bits)`` and returns
``mpc`` values.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import mpmath

INF_I = complex(0.0, math.inf)  # omega of a parabolic
CINF = math.inf  # the point at infinity of the Riemann sphere


def _is_mp(*vals) -> bool:
    return any(isinstance(v, (mpmath.mpc, mpmath.mpf)) for v in vals)


def _lib(*vals):
    return mpmath if _is_mp(*vals) else cmath


def _is_inf(z) -> bool:
    if isinstance(z, (mpmath.mpc, mpmath.mpf)):
        return bool(mpmath.isinf(z))
    return isinstance(z, (int, float, complex)) and cmath.isinf(z)


def _eps(bits: int) -> float:
    return 2.0 ** (-bits + 12)


def _to(bits: int, z):
    if bits <= 53:
        return complex(z)
    return mpmath.mpc(z) if not isinstance(z, mpmath.mpc) else z


@dataclass(frozen=True)
class MoebiusC:
    """A matrix [[a, b], [c, d]] of determinant one, up to sign."""

    a: object
    b: object
    c: object
    d: object

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        scale = (abs(self.a) + abs(self.b)) * (abs(self.c) + abs(self.d))
        if abs(det - 1) > 1e-12 * max(1, scale):
            raise ValueError(f"determinant {det} is not 1")

    @classmethod
    def normalized(cls, a, b, c, d) -> "MoebiusC":
        """Scale an invertible matrix to determinant one."""
        det = a * d - b * c
        s = _lib(det).sqrt(det)
        return cls(a / s, b / s, c / s, d / s)

    @property
    def trace(self):
        return self.a + self.d

    def __matmul__(self, o: "MoebiusC") -> "MoebiusC":
        return MoebiusC(
            self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d,
        )

    def inverse(self) -> "MoebiusC":
        return MoebiusC(self.d, -self.b, -self.c, self.a)

    def __call__(self, z):
        if _is_inf(z):
            return CINF if self.c == 0 else self.a / self.c
        den = self.c * z + self.d
        if den == 0:
            return CINF
        return (self.a * z + self.b) / den

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def to_json(self) -> list:
        return [[float(complex(v).real), float(complex(v).imag)] for v in self.entries()]

    @classmethod
    def from_json(cls, data) -> "MoebiusC":
        return cls(*(complex(re, im) for re, im in data))


def commutator(m1: MoebiusC, m2: MoebiusC) -> MoebiusC:
    return m1 @ m2 @ m1.inverse() @ m2.inverse()


@dataclass(frozen=True)
class ComplexLength:
    """lambda = ell + i*theta with ell >= 0 and theta in (-pi, pi]; (0, 0) marks a parabolic."""

    ell: object
    theta: object

    def __post_init__(self):
        if self.ell < 0:
            raise ValueError("ell must be nonnegative")
        if not (-math.pi < self.theta <= math.pi + 1e-15):
            raise ValueError(f"theta {self.theta} outside (-pi, pi]")
        if self.ell == 0 and self.theta != 0:
            raise ValueError("elliptic elements have no complex length here")

    @property
    def is_parabolic(self) -> bool:
        return self.ell == 0 and self.theta == 0

    @property
    def value(self):
        if _is_mp(self.ell, self.theta):
            return mpmath.mpc(self.ell, self.theta)
        return complex(self.ell, self.theta)

    def __complex__(self):
        return complex(float(self.ell), float(self.theta))


PARABOLIC = ComplexLength(0.0, 0.0)


def _wrap_theta(theta, pi):
    """Reduce an angle to (-pi, pi]."""
    t = theta % (2 * pi)
    return t - 2 * pi if t > pi else t


def complex_length(trace, bits: int = 53, parabolic_tol: float | None = None) -> ComplexLength:
    """The complex length with 2 cosh(lambda/2) = +-trace, normalized."""
    with mpmath.workprec(max(bits, 53)):
        t = _to(bits, trace)
        # pick a sign representative so that t and -t give identical output
        if t.real < 0 or (t.real == 0 and t.imag < 0):
            t = -t
        tol = parabolic_tol if parabolic_tol is not None else _eps(bits)
        if abs(t - 2) <= tol * max(1.0, float(abs(t))):
            return PARABOLIC
        lib = _lib(t)
        lam = 2 * lib.acosh(t / 2)
        ell, theta = lam.real, lam.imag
        if ell < 0:
            ell, theta = -ell, -theta
        pi = mpmath.pi if bits > 53 else math.pi
        theta = _wrap_theta(theta, pi)
        if ell == 0:
            raise ValueError(f"trace {trace} is elliptic")
        if bits > 53:
            ell, theta = mpmath.mpf(ell), mpmath.mpf(theta)
        return ComplexLength(ell, theta)


def omega(lam: ComplexLength):
    """2*pi*i/lambda; a parabolic gives INF_I."""
    if lam.is_parabolic:
        return INF_I
    v = lam.value
    pi = mpmath.pi if _is_mp(v) else math.pi
    return 2j * pi / v


def lambda_from_omega(w) -> ComplexLength:
    if is_inf_i(w):
        return PARABOLIC
    pi = mpmath.pi if _is_mp(w) else math.pi
    lam = 2j * pi / w
    return ComplexLength(lam.real, _wrap_theta(lam.imag, pi))


def is_inf_i(w) -> bool:
    return _is_inf(w)


def _half_plane_dist(dz, y1, y2):
    lib = mpmath if _is_mp(dz, y1, y2) else math
    return 2 * lib.asinh(abs(dz) / (2 * lib.sqrt(y1 * y2)))


def omega_distance(w1, w2):
    """Hyperbolic distance in the upper half-plane; infinite against INF_I."""
    if is_inf_i(w1) or is_inf_i(w2):
        return 0.0 if is_inf_i(w1) and is_inf_i(w2) else math.inf
    return _half_plane_dist(w1 - w2, w1.imag, w2.imag)


def lambda_distance(l1: ComplexLength, l2: ComplexLength):
    """Hyperbolic distance in the right half-plane {Re > 0}."""
    return _half_plane_dist(l1.value - l2.value, l1.ell, l2.ell)


def fixed_points(m: MoebiusC, tol: float | None = None) -> tuple:
    """Fixed points on the Riemann sphere; a single point iff parabolic."""
    a, b, c, d = m.entries()
    lib = _lib(a, b, c, d)
    scale = float(abs(a) + abs(b) + abs(c) + abs(d))
    tol = (tol if tol is not None else (1e-12 if not _is_mp(a, b, c, d) else _eps(mpmath.mp.prec))) * scale
    if abs(b) <= tol and abs(c) <= tol and abs(a - d) <= tol:
        raise ValueError("the identity has no isolated fixed points")
    disc = (a + d) ** 2 - 4
    # tol already carries the entry scale; the trace error is that times |tr|
    parabolic = abs(disc) <= tol * max(1.0, float(abs(a + d)))
    if abs(c) <= tol:
        if abs(a - d) <= tol:
            return (CINF,)
        return (CINF, b / (d - a))
    if parabolic:
        return ((a - d) / (2 * c),)
    r = lib.sqrt(disc)
    return (((a - d) + r) / (2 * c), ((a - d) - r) / (2 * c))


def line_matrix(p, q) -> tuple:
    """Trace-free matrix of the half-turn about the geodesic with endpoints p, q (up to sign)."""
    if _is_inf(p):
        return (1, -2 * q, 0, -1)
    if _is_inf(q):
        return (-1, 2 * p, 0, 1)
    s = p - q
    return ((p + q) / s, -2 * p * q / s, 2 / s, -(p + q) / s)


def _axis_of(m: MoebiusC):
    fp = fixed_points(m)
    if len(fp) != 2:
        raise ValueError("a parabolic has no axis")
    return fp


def _same_point(p, q, tol=1e-10) -> bool:
    if _is_inf(p) or _is_inf(q):
        return _is_inf(p) and _is_inf(q)
    return abs(p - q) <= tol * max(1.0, float(abs(p)), float(abs(q)))


def axis_cosh(m1: MoebiusC, m2: MoebiusC, bits: int = 53):
    """cosh of the complex distance between the two axes, defined up to sign."""
    with mpmath.workprec(max(bits, 53)):
        if bits > 53:
            m1 = MoebiusC(*(mpmath.mpc(v) for v in m1.entries()))
            m2 = MoebiusC(*(mpmath.mpc(v) for v in m2.entries()))
        p1, q1 = _axis_of(m1)
        p2, q2 = _axis_of(m2)
        for u in (p1, q1):
            for v in (p2, q2):
                if _same_point(u, v):
                    raise ValueError("axes share an endpoint (degenerate)")
        a1, b1, c1, d1 = line_matrix(p1, q1)
        a2, b2, c2, d2 = line_matrix(p2, q2)
        return (a1 * a2 + b1 * c2 + c1 * b2 + d1 * d2) / 2


def canonical_distance(delta):
    """Representative of {+-delta + i*pi*k} with Re >= 0 and Im in (-pi/2, pi/2]."""
    mp = _is_mp(delta)
    pi = mpmath.pi if mp else math.pi
    if delta.real < 0 or (delta.real == 0 and delta.imag < 0):
        delta = -delta
    im = delta.imag % pi
    if im > pi / 2:
        im -= pi
    return (mpmath.mpc if mp else complex)(delta.real, im)


def axis_complex_distance(m1: MoebiusC, m2: MoebiusC, bits: int = 53):
    c = axis_cosh(m1, m2, bits)
    with mpmath.workprec(max(bits, 53)):
        return canonical_distance(_lib(c).acosh(c))


def sinh2_distance(m1: MoebiusC, m2: MoebiusC, bits: int = 53):
    """sinh^2 of the axis distance; free of the sign and i*pi ambiguities."""
    c = axis_cosh(m1, m2, bits)
    with mpmath.workprec(max(bits, 53)):
        return c * c - 1


def abs_re_from_cosh2(c2) -> float:
    """|Re delta| recovered from cosh(2*delta)."""
    lib = _lib(c2)
    return abs(lib.acosh(c2).real) / 2


def diagonal(lam: ComplexLength) -> MoebiusC:
    """diag(e^{lambda/2}, e^{-lambda/2})."""
    lib = _lib(lam.value)
    e = lib.exp(lam.value / 2)
    return MoebiusC(e, 0, 0, 1 / e)


__all__ = [
    "CINF", "INF_I", "PARABOLIC", "ComplexLength", "MoebiusC", "abs_re_from_cosh2",
    "axis_complex_distance", "axis_cosh", "canonical_distance", "commutator", "complex_length",
    "diagonal", "fixed_points", "is_inf_i", "lambda_distance", "lambda_from_omega", "line_matrix",
    "omega", "omega_distance", "sinh2_distance",
]
