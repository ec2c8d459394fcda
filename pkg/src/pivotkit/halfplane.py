"""Upper half-plane points, end invariants, the integer bracket and shortest curves."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .farey import (
    IDENTITY, INF, IntegerMoebius, Slope, apply, normalize_at, parse_boundary, sb_key,
)
from .surd import CFPrefix, QuadSurd

TIE_TOL = 1e-12


@dataclass(frozen=True)
class UHPoint:
    """x + iy with y > 0.  Coordinates may be Fractions (exact) or floats."""

    x: object
    y: object

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"imaginary part must be positive, got {self.y}")

    @classmethod
    def from_complex(cls, z: complex) -> "UHPoint":
        return cls(z.real, z.imag)

    @property
    def exact(self) -> bool:
        return isinstance(self.x, (int, Fraction)) and isinstance(self.y, (int, Fraction))

    def __complex__(self):
        return complex(float(self.x), float(self.y))

    def __add__(self, other: "UHPoint") -> "UHPoint":
        return UHPoint(self.x + other.x, self.y + other.y)

    def __str__(self):
        return f"{self.x}+{self.y}i"


def _num(text: str):
    text = text.replace(" ", "")
    if "/" in text:
        return Fraction(text)
    if re.fullmatch(r"[+-]?\d+", text):
        return Fraction(int(text))
    return float(text)


def parse_uhpoint(text: str) -> UHPoint:
    """Parse "x+yi", "yi", "1/2+3/2i" or "0.25-0.5+2i"-style text (y > 0)."""
    t = text.strip().replace(" ", "")
    if not t.endswith("i"):
        raise ValueError(f"not a half-plane point: {text!r}")
    body = t[:-1].rstrip("*")
    # split at the last sign that is not at the start or after an exponent
    idx = -1
    for k in range(len(body) - 1, 0, -1):
        if body[k] in "+-" and body[k - 1] not in "eE":
            idx = k
            break
    if idx == -1:
        re_part, im_part = "0", body or "1"
    else:
        re_part, im_part = body[:idx], body[idx:]
    if im_part in ("+", "-", ""):
        im_part += "1"
    return UHPoint(_num(re_part), _num(im_part))


@dataclass(frozen=True)
class EndInvariant:
    """One end invariant: an interior point, a rational slope, or an irrational boundary point."""

    kind: str  # "interior" | "rational" | "irrational"
    value: object

    def __post_init__(self):
        ok = {
            "interior": (UHPoint,),
            "rational": (Slope,),
            "irrational": (QuadSurd, CFPrefix),
        }.get(self.kind)
        if ok is None or not isinstance(self.value, ok):
            raise ValueError(f"bad end invariant {self.kind}: {self.value!r}")
        if isinstance(self.value, QuadSurd) and self.value.is_rational:
            raise ValueError("a surd end invariant must be irrational")

    @classmethod
    def interior(cls, x, y) -> "EndInvariant":
        return cls("interior", UHPoint(x, y))

    @classmethod
    def rational(cls, s: Slope) -> "EndInvariant":
        return cls("rational", s)

    @classmethod
    def irrational(cls, v) -> "EndInvariant":
        return cls("irrational", v)

    @property
    def on_boundary(self) -> bool:
        return self.kind != "interior"

    @property
    def truncated(self) -> bool:
        return isinstance(self.value, CFPrefix)

    def image(self, m: IntegerMoebius):
        """The invariant seen in the chart m: a UHPoint, a Slope, or an exact real."""
        if isinstance(self.value, CFPrefix):
            if m == IDENTITY:
                return self.value.approx()
            return _apply_approx(m, self.value)
        return apply(m, self.value)

    def __str__(self):
        return str(self.value)


def _apply_approx(m: IntegerMoebius, cf: CFPrefix):
    v = apply(m, cf.approx())
    return v.to_fraction() if isinstance(v, Slope) else v


def parse_end_invariant(text: str) -> EndInvariant:
    t = text.strip()
    if t.endswith("i") and not t.lower().startswith("inf") or t.endswith("*i"):
        return EndInvariant("interior", parse_uhpoint(t))
    v = parse_boundary(t)
    if isinstance(v, Slope):
        return EndInvariant.rational(v)
    if isinstance(v, QuadSurd) and v.is_rational:
        return EndInvariant.rational(Slope.from_fraction(v.r))
    return EndInvariant.irrational(v)


# -- geometry -----------------------------------------------------------------


def hyp_dist(z: UHPoint, w: UHPoint) -> float:
    dx = float(z.x) - float(w.x)
    dy = float(z.y) - float(w.y)
    return 2.0 * math.asinh(math.hypot(dx, dy) / (2.0 * math.sqrt(float(z.y) * float(w.y))))


def _closest_int(x, toward, lo: int, hi: int) -> int:
    f, c = math.floor(x), math.ceil(x)
    f, c = min(max(f, lo), hi), min(max(c, lo), hi)
    if f == c:
        return f
    df, dc = x - f, c - x
    if df < dc:
        return f
    if dc < df:
        return c
    return c if toward > x else f


def bracket_ends(x, y) -> tuple[int, int]:
    """(j, k): the integers nearest x and y in the closed interval between them."""
    lo_v, hi_v = (x, y) if x <= y else (y, x)
    lo, hi = math.ceil(lo_v), math.floor(hi_v)
    if lo > hi:
        raise ValueError(f"no integer between {x} and {y}")
    return _closest_int(x, y, lo, hi), _closest_int(y, x, lo, hi)


def bracket(x, y) -> int:
    """k - j where j (k) is the integer nearest x (y) in the closed interval between them."""
    j, k = bracket_ends(x, y)
    return k - j


def _reduce(tau: UHPoint, tol: float):
    m = IDENTITY
    z = tau
    for _ in range(10_000):
        n = round(z.x)
        d2 = (z.x - n) ** 2 + z.y ** 2
        if d2 < 1 - tol:
            s = IntegerMoebius(0, -1, 1, -n)
            z = apply(s, z)
            m = s @ m
        else:
            return m, z
    raise RuntimeError("reduction did not terminate")


def shortest_vertex(tau: UHPoint) -> tuple[Slope, list[Slope]]:
    """A hyperbolically shortest slope at tau and the other co-minimal slopes.

    tau is reduced into the closure of H(inf) = {|z - n| > 1 for all n}; the
    preimage of infinity is shortest, and preimages of integers n with
    |z - n| = 1 tie with it.
    """
    tol = 0.0 if tau.exact else TIE_TOL
    m, z = _reduce(tau, tol)
    inv = m.inverse()
    cands = [INF]
    for n in {math.floor(z.x), math.ceil(z.x)}:
        if abs((z.x - n) ** 2 + z.y ** 2 - 1) <= tol:
            cands.append(Slope(n, 1))
    slopes = sorted((apply(inv, s) for s in cands), key=sb_key)
    return slopes[0], slopes[1:]


def teich_sum(annuli) -> UHPoint:
    """Teichmueller parameter of a torus glued from annuli: the componentwise sum."""
    annuli = list(annuli)
    if not annuli:
        raise ValueError("need at least one annulus")
    out = annuli[0]
    for a in annuli[1:]:
        out = out + a
    return out


def extremal_length(alpha: Slope, tau: UHPoint):
    return 1 / apply(normalize_at(alpha), tau).y
