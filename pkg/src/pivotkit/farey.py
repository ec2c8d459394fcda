"""Farey graph: slopes, neighbors, Dehn twists and integer Moebius maps.

Everything here is exact.  Slopes are reduced integer pairs, irrational
boundary points are :class:`~pivotkit.surd.QuadSurd` or
:class:`~pivotkit.surd.CFPrefix` values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Iterator, NamedTuple

from .surd import CFPrefix, QuadSurd, Truncated, compare, parse_cf, parse_surd


@dataclass(frozen=True, order=False)
class Slope:
    """A vertex p/q of the Farey graph; infinity is 1/0."""

    p: int
    q: int

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if p == 0 and q == 0:
            raise ValueError("0/0 is not a slope")
        g = math.gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def _coprime(cls, p: int, q: int) -> "Slope":
        """Trusted constructor for a pair already known to be coprime; only the sign is fixed."""
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        obj = object.__new__(cls)
        object.__setattr__(obj, "p", p)
        object.__setattr__(obj, "q", q)
        return obj

    @classmethod
    def from_fraction(cls, x) -> "Slope":
        x = Fraction(x)
        return cls(x.numerator, x.denominator)

    @property
    def is_inf(self) -> bool:
        return self.q == 0

    def to_fraction(self) -> Fraction:
        if self.q == 0:
            raise ValueError("infinity has no finite value")
        return Fraction(self.p, self.q)

    def __float__(self):
        return math.inf if self.q == 0 else self.p / self.q

    def __str__(self):
        if self.q == 0:
            return "inf"
        return str(self.p) if self.q == 1 else f"{self.p}/{self.q}"

    def __repr__(self):
        return f"Slope({self})"


INF = Slope(1, 0)


def sb_key(s: Slope) -> tuple[int, int, int]:
    """Sort key for deterministic tie-breaks: smaller denominator first, then |p|, then p."""
    return (s.q, abs(s.p), s.p)


def parse_slope(text: str) -> Slope:
    t = text.strip().lower()
    if t in ("inf", "infinity", "oo", "1/0", "-1/0"):
        return INF
    if "/" in t:
        p, q = t.split("/")
        return Slope(int(p), int(q))
    return Slope(int(t), 1)


def parse_boundary(text: str):
    """Parse a rational slope, a surd or a continued fraction."""
    t = text.strip()
    if "sqrt" in t:
        return parse_surd(t)
    if t.startswith("["):
        return parse_cf(t)
    return parse_slope(t)


def intersection_number(a: Slope, b: Slope) -> int:
    return abs(a.p * b.q - a.q * b.p)


def is_neighbor(a: Slope, b: Slope) -> bool:
    return intersection_number(a, b) == 1


@dataclass(frozen=True)
class FareyEdge:
    a: Slope
    b: Slope

    def __post_init__(self):
        if not is_neighbor(self.a, self.b):
            raise ValueError(f"{self.a} and {self.b} are not Farey neighbors")

    def key(self) -> frozenset:
        return frozenset((self.a, self.b))

    def __contains__(self, s: Slope) -> bool:
        return s == self.a or s == self.b


@dataclass(frozen=True)
class FareyTriangle:
    vertices: tuple[Slope, Slope, Slope]

    def __post_init__(self):
        u, v, w = self.vertices
        if not (is_neighbor(u, v) and is_neighbor(v, w) and is_neighbor(u, w)):
            raise ValueError(f"{self.vertices} is not a Farey triangle")

    def __contains__(self, s: Slope) -> bool:
        return s in self.vertices


BASE_TRIANGLE = FareyTriangle((INF, Slope(0, 1), Slope(1, 1)))


def edge_links(e: FareyEdge) -> tuple[Slope, Slope]:
    """The two slopes completing the edge to a Farey triangle (mediant first)."""
    a, b = e.a, e.b
    # neighbors have determinant +-1, so both completions are already reduced
    return Slope._coprime(a.p + b.p, a.q + b.q), Slope._coprime(a.p - b.p, a.q - b.q)


def third_vertex(u: Slope, v: Slope, w: Slope) -> Slope:
    """Vertex across edge uv from w (u, v must be neighbors)."""
    if abs(u.p * v.q - u.q * v.p) != 1:
        raise ValueError(f"{u} and {v} are not Farey neighbors")
    m1, m2 = Slope._coprime(u.p + v.p, u.q + v.q), Slope._coprime(u.p - v.p, u.q - v.q)
    return m2 if m1 == w else m1


# -- projective integer group -------------------------------------------------


@dataclass(frozen=True)
class IntegerMoebius:
    """z -> (a z + b)/(c z + d) with ad - bc = 1, stored up to sign."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        if a * d - b * c != 1:
            raise ValueError("determinant must be 1")
        if c < 0 or (c == 0 and d < 0):
            for name, val in zip("abcd", (-a, -b, -c, -d)):
                object.__setattr__(self, name, val)

    def __matmul__(self, o: "IntegerMoebius") -> "IntegerMoebius":
        return IntegerMoebius(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def inverse(self) -> "IntegerMoebius":
        return IntegerMoebius(self.d, -self.b, -self.c, self.a)

    def __pow__(self, k: int) -> "IntegerMoebius":
        base = self if k >= 0 else self.inverse()
        out = IDENTITY
        for _ in range(abs(k)):
            out = out @ base
        return out

    def __call__(self, x):
        return apply(self, x)


IDENTITY = IntegerMoebius(1, 0, 0, 1)


def translation(k: int) -> IntegerMoebius:
    return IntegerMoebius(1, k, 0, 1)


def apply(m: IntegerMoebius, x):
    """Act by m on a slope, an exact real, a surd or a half-plane point.

    Half-plane points are any objects with ``x`` and ``y`` attributes and a
    two-argument constructor; rational coordinates stay exact.
    """
    a, b, c, d = m.a, m.b, m.c, m.d
    if isinstance(x, Slope):
        # unimodular maps preserve coprimality
        return Slope._coprime(a * x.p + b * x.q, c * x.p + d * x.q)
    if isinstance(x, (int, Fraction)):
        p, q = x.numerator, x.denominator
        den = c * p + d * q
        if den == 0:
            return INF
        return Fraction(a * p + b * q, den)
    if isinstance(x, QuadSurd):
        # r = R/D, s = S/D; with ad - bc = 1 the image is
        # ((aR+bD)(cR+dD) - ac S^2 d) / N + (S D / N) sqrt(d),  N = (cR+dD)^2 - c^2 S^2 d
        r, s, dd = x.r, x.s, x.d
        D = math.lcm(r.denominator, s.denominator)
        R, S = r.numerator * (D // r.denominator), s.numerator * (D // s.denominator)
        num, den = a * R + b * D, c * R + d * D
        cs2 = c * S * S * dd
        norm = den * den - c * cs2
        if norm == 0:
            return INF
        return QuadSurd._make(Fraction(num * den - a * cs2, norm), Fraction(S * D, norm), dd)
    if isinstance(x, CFPrefix):
        raise TypeError("a truncated continued fraction has no exact image")
    if hasattr(x, "x") and hasattr(x, "y"):
        re_, im = x.x, x.y
        if isinstance(re_, (int, Fraction)) and isinstance(im, (int, Fraction)):
            # integers over a common denominator: two Fraction normalizations instead of a dozen
            q = math.lcm(re_.denominator, im.denominator)
            X, Y = re_.numerator * (q // re_.denominator), im.numerator * (q // im.denominator)
            cx = c * X + d * q
            den = cx * cx + c * c * Y * Y
            nre = a * c * (X * X + Y * Y) + (a * d + b * c) * X * q + b * d * q * q
            return type(x)(Fraction(nre, den), Fraction(Y * q, den))
        den = (c * re_ + d) ** 2 + (c * im) ** 2
        nre = (a * c * (re_ * re_ + im * im) + (a * d + b * c) * re_ + b * d) / den
        return type(x)(nre, im / den)
    if isinstance(x, complex):
        return (a * x + b) / (c * x + d)
    if isinstance(x, float):
        den = c * x + d
        return math.inf if den == 0 else (a * x + b) / den
    raise TypeError(f"cannot act on {type(x).__name__}")


def neighbor_parents(alpha: Slope) -> list[Slope]:
    """Neighbors of alpha with the smallest denominator, sorted by sb_key."""
    p, q = alpha.p, alpha.q
    if q == 0:
        return [Slope(0, 1)]
    if q == 1:
        return [INF]
    s1 = pow(p, -1, q)
    r1 = (p * s1 - 1) // q
    s2, r2 = q - s1, p - r1
    cands = [Slope(r1, s1), Slope(r2, s2)]
    smallest = min(c.q for c in cands)
    return sorted((c for c in cands if c.q == smallest), key=sb_key)


@lru_cache(maxsize=1 << 14)
def normalize_at(alpha: Slope) -> IntegerMoebius:
    """Canonical element sending alpha to infinity and its smallest neighbor to 0."""
    if alpha.is_inf:
        return IDENTITY
    beta = neighbor_parents(alpha)[0]
    p, q, r, s = alpha.p, alpha.q, beta.p, beta.q
    t = -(p * s - q * r)  # +-1
    return IntegerMoebius(t * s, -t * r, q, -p)


def dehn_twist(alpha: Slope, k: int, beta):
    """D_alpha^k applied to beta (positive twists about infinity add 1)."""
    n = normalize_at(alpha)
    return apply(n.inverse() @ translation(k) @ n, beta)


def twist_map(alpha: Slope, k: int = 1) -> IntegerMoebius:
    n = normalize_at(alpha)
    return n.inverse() @ translation(k) @ n


# -- navigation ---------------------------------------------------------------


def _cmp_slope(x, s: Slope) -> int:
    """Sign of x - s for a finite slope s; integer arithmetic when x is rational."""
    if isinstance(x, Slope):
        v = x.p * s.q - s.p * x.q
        return (v > 0) - (v < 0)
    if isinstance(x, Fraction):
        v = x.numerator * s.q - s.p * x.denominator
        return (v > 0) - (v < 0)
    if isinstance(x, QuadSurd) and x.s:
        a, b = x.float_parts()
        c = s.p / s.q
        gap = a + b - c
        if abs(gap) > 1e-12 * (abs(a) + abs(b) + abs(c)):
            return 1 if gap > 0 else -1
    return compare(x, Fraction(s.p, s.q))


def _side(u: Slope, v: Slope, x) -> int:
    """Which side of the geodesic uv the boundary point x lies on (+1 inside, -1 outside, 0 on an endpoint)."""
    if isinstance(x, Slope):
        if x == u or x == v:
            return 0
        if x.q == 0:
            return -1
    elif isinstance(x, int):
        x = Fraction(x)
    if u.is_inf or v.is_inf:
        return _cmp_slope(x, v if u.is_inf else u)
    if u.p * v.q > v.p * u.q:
        u, v = v, u
    c1, c2 = _cmp_slope(x, u), _cmp_slope(x, v)
    if c1 == 0 or c2 == 0:
        return 0
    return 1 if (c1 > 0 and c2 < 0) else -1


class Flip(NamedTuple):
    kept: tuple[Slope, Slope]  # the crossed edge
    dropped: Slope  # vertex left behind
    added: Slope  # new vertex
    triangle: tuple[Slope, Slope, Slope]  # triangle entered, ordered (kept0, kept1, added)


def farey_path(target, start: FareyTriangle = BASE_TRIANGLE) -> Iterator[Flip]:
    """Triangle flips from ``start`` toward a boundary point.

    Stops after entering a triangle with the target as a vertex (rational
    target); never stops for an irrational target.  A truncated continued
    fraction raises :class:`~pivotkit.surd.Truncated` once exhausted.
    """
    tri = tuple(start.vertices)
    first = True
    while True:
        if isinstance(target, Slope) and target in tri:
            return
        u, v, new = tri
        # the fast step needs an arc (u, v) that avoids infinity
        straddles = u.q and v.q and (u.p * new.q > new.p * u.q) == (v.p * new.q > new.p * v.q)
        if first or new.q == 0 or straddles:
            flip = _generic_flip(tri, target, range(3) if first else range(2))
        else:
            # entered through (u, v): one comparison with the new vertex picks the next edge
            c = _cmp_slope(target, new)
            if c == 0:
                return
            if u.q == 0:
                upper = u if v.p * new.q < new.p * v.q else v
            elif v.q == 0:
                upper = v if u.p * new.q < new.p * u.q else u
            else:
                upper = u if u.p * v.q > v.p * u.q else v
            lower = v if upper is u else u
            dropped = lower if c > 0 else upper
            kept = (v, new) if dropped is u else (new, u)
            nxt = third_vertex(kept[0], kept[1], dropped)
            flip = Flip(kept, dropped, nxt, (kept[0], kept[1], nxt))
        first = False
        tri = flip.triangle
        yield flip


def _generic_flip(tri, target, sides) -> Flip:
    for i in sides:
        w = tri[i]
        u, v = tri[(i + 1) % 3], tri[(i + 2) % 3]
        sx = _side(u, v, target)
        if sx != 0 and sx != _side(u, v, w):
            new = third_vertex(u, v, w)
            return Flip((u, v), w, new, (u, v, new))
    raise AssertionError("target not located in any complementary arc")


def slope_depth(s: Slope, start: FareyTriangle = BASE_TRIANGLE) -> int:
    return sum(1 for _ in farey_path(s, start))


__all__ = [
    "Slope", "INF", "FareyEdge", "FareyTriangle", "BASE_TRIANGLE", "IntegerMoebius",
    "IDENTITY", "Flip", "Truncated", "apply", "dehn_twist", "edge_links", "farey_path",
    "intersection_number", "is_neighbor", "normalize_at", "parse_boundary", "parse_slope",
    "sb_key", "slope_depth", "third_vertex", "translation", "twist_map",
]
