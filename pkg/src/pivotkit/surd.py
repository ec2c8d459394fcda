"""Exact boundary points: quadratic surds and continued-fraction prefixes."""

from __future__ import annotations

import math
import re
from fractions import Fraction


def _squarefree_split(d: int) -> tuple[int, int]:
    """Write d = f*f*core with core squarefree; return (f, core)."""
    f, core = 1, d
    p = 2
    while p * p <= core:
        while core % (p * p) == 0:
            core //= p * p
            f *= p
        p += 1
    return f, core


class QuadSurd:
    """The real number r + s*sqrt(d) with r, s rational and d > 1 squarefree.

    Arithmetic with ints, Fractions and other surds over the same d is exact.
    When s == 0 the value is rational and d is irrelevant.
    """

    __slots__ = ("r", "s", "d", "_floats")

    def __init__(self, r, s=0, d: int = 1):
        r, s = Fraction(r), Fraction(s)
        if s != 0:
            if d <= 0:
                raise ValueError("radicand must be positive")
            f, d = _squarefree_split(d)
            s *= f
            if d == 1:
                r, s = r + s, Fraction(0)
        if s == 0:
            d = 1
        self.r, self.s, self.d = r, s, d
        self._floats = None

    @classmethod
    def _make(cls, r: Fraction, s: Fraction, d: int) -> "QuadSurd":
        """Trusted constructor: d already squarefree (or irrelevant when s == 0)."""
        obj = object.__new__(cls)
        obj.r, obj.s, obj.d = r, s, (d if s else 1)
        obj._floats = None
        return obj

    def float_parts(self) -> tuple[float, float]:
        """(float(r), float(s)*sqrt(d)), cached; each carries relative error below 1e-15."""
        if self._floats is None:
            self._floats = (float(self.r), float(self.s) * math.sqrt(self.d) if self.s else 0.0)
        return self._floats

    @classmethod
    def from_parts(cls, a: int, b: int, d: int, c: int = 1) -> "QuadSurd":
        """(a + b*sqrt(d)) / c"""
        if c == 0:
            raise ZeroDivisionError("zero denominator")
        return cls(Fraction(a, c), Fraction(b, c), d)

    @property
    def is_rational(self) -> bool:
        return self.s == 0

    def _coerce(self, other):
        if isinstance(other, QuadSurd):
            if other.s != 0 and self.s != 0 and other.d != self.d:
                raise ValueError("surds over different quadratic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadSurd._make(Fraction(other), Fraction(0), 1)
        return NotImplemented

    def _field(self, other) -> int:
        return self.d if self.s != 0 else other.d

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadSurd._make(self.r + o.r, self.s + o.s, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadSurd._make(-self.r, -self.s, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d = self._field(o)
        return QuadSurd._make(self.r * o.r + self.s * o.s * d, self.r * o.s + self.s * o.r, d)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadSurd":
        return QuadSurd._make(self.r, -self.s, self.d)

    def _norm(self) -> Fraction:
        return self.r * self.r - self.s * self.s * self.d

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = o._norm()
        if n == 0:
            raise ZeroDivisionError("division by zero surd")
        num = self * o.conjugate()
        return QuadSurd._make(num.r / n, num.s / n, num.d)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def sign(self) -> int:
        return _sign2(self.r, self.s, self.d)

    def _cmp(self, other) -> int:
        if isinstance(other, QuadSurd) and self.s and other.s and self.d != other.d:
            return _cross_sign(self.r - other.r, self.s, self.d, -other.s, other.d)
        o = self._coerce(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare QuadSurd with {type(other).__name__}")
        return (self - o).sign()

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        if self.s == 0:
            return hash(self.r)
        return hash((self.r, self.s, self.d))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __float__(self):
        return float(self.r) + float(self.s) * math.sqrt(self.d)

    def __floor__(self) -> int:
        n = math.floor(float(self))
        while compare(self, Fraction(n)) < 0:
            n -= 1
        while compare(self, Fraction(n + 1)) >= 0:
            n += 1
        return n

    def __ceil__(self) -> int:
        n = math.floor(self)
        return n if self == n else n + 1

    def __repr__(self):
        if self.s == 0:
            return f"QuadSurd({self.r})"
        return f"QuadSurd({self.r} + {self.s}*sqrt({self.d}))"

    def __str__(self):
        if self.s == 0:
            return str(self.r)
        # (a + b*sqrt(d))/c with integer a, b, c
        c = math.lcm(self.r.denominator, self.s.denominator)
        a = int(self.r * c)
        b = int(self.s * c)
        sign = "+" if b >= 0 else "-"
        coef = "" if abs(b) == 1 else f"{abs(b)}*"
        head = f"{a}{sign}" if a else ("-" if b < 0 else "")
        body = f"{head}{coef}sqrt({self.d})"
        return body if c == 1 and not a else (f"({body})" if c == 1 else f"({body})/{c}")

    def continued_fraction(self):
        """Yield the (infinite) continued-fraction terms of an irrational surd."""
        if self.s == 0:
            raise ValueError("rational value has a finite expansion")
        x = self
        while True:
            a = math.floor(x)
            yield a
            x = 1 / (x - a)


def _sqrt_bounds(s: Fraction, d: int, bits: int) -> tuple[Fraction, Fraction]:
    """An enclosing interval for s*sqrt(d) of width about |s| / 2**bits."""
    root = math.isqrt(d << (2 * bits))
    lo, hi = Fraction(root, 1 << bits), Fraction(root + 1, 1 << bits)
    return (s * lo, s * hi) if s > 0 else (s * hi, s * lo)


def _cross_sign(r: Fraction, s1: Fraction, d1: int, s2: Fraction, d2: int) -> int:
    """Sign of r + s1*sqrt(d1) + s2*sqrt(d2) for distinct squarefree d1, d2 > 1 and s1, s2 != 0.

    The value is never zero (1, sqrt(d1), sqrt(d2) are independent over Q), so
    refining enclosures terminates.
    """
    bits = 64
    while True:
        a_lo, a_hi = _sqrt_bounds(s1, d1, bits)
        b_lo, b_hi = _sqrt_bounds(s2, d2, bits)
        if r + a_lo + b_lo > 0:
            return 1
        if r + a_hi + b_hi < 0:
            return -1
        bits *= 2


class CFPrefix:
    """An irrational number known only through its first continued-fraction terms.

    Without a period the tail is unknown: the value lies strictly between the
    last convergent and the mediant of the last two convergents.
    """

    __slots__ = ("terms",)

    def __init__(self, terms):
        terms = [int(t) for t in terms]
        if not terms:
            raise ValueError("empty continued fraction")
        if any(t < 1 for t in terms[1:]):
            raise ValueError("partial quotients after the first must be positive")
        self.terms = tuple(terms)

    def convergents(self) -> list[Fraction | None]:
        out = []
        p0, q0, p1, q1 = 1, 0, self.terms[0], 1
        out.append(Fraction(p1, q1))
        for a in self.terms[1:]:
            p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
            out.append(Fraction(p1, q1))
        return out

    def interval(self) -> tuple[Fraction, Fraction]:
        """Open interval (lo, hi) known to contain the value."""
        p0, q0, p1, q1 = 1, 0, self.terms[0], 1
        for a in self.terms[1:]:
            p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        a, b = Fraction(p1, q1), Fraction(p1 + p0, q1 + q0)
        return (a, b) if a < b else (b, a)

    def approx(self) -> Fraction:
        return self.convergents()[-1]

    def __float__(self):
        lo, hi = self.interval()
        return float((lo + hi) / 2)

    def __eq__(self, other):
        return isinstance(other, CFPrefix) and other.terms == self.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        return f"CFPrefix({list(self.terms)})"

    def __str__(self):
        head, *rest = self.terms
        return f"[{head};{','.join(map(str, rest))}]"


class Truncated(Exception):
    """Raised when a continued-fraction prefix cannot decide a comparison."""


def compare(x, r: Fraction) -> int:
    """Sign of x - r for an exact boundary value x; raises Truncated if undecidable."""
    if isinstance(x, CFPrefix):
        lo, hi = x.interval()
        if r <= lo:
            return 1
        if r >= hi:
            return -1
        raise Truncated(f"prefix {x} too short to compare with {r}")
    if isinstance(x, QuadSurd):
        if x.s:
            # float filter; every term carries relative error below 1e-15, so a
            # gap above 1e-12 of their total magnitude decides the sign
            a, b = x.float_parts()
            c = float(r)
            gap = a + b - c
            if abs(gap) > 1e-12 * (abs(a) + abs(b) + abs(c)):
                return 1 if gap > 0 else -1
        return _sign2(x.r - r, x.s, x.d)
    d = x - r
    return (d > 0) - (d < 0)


def _sign2(t: Fraction, s: Fraction, d: int) -> int:
    """Sign of t + s*sqrt(d) without building a surd."""
    if s == 0 or t == 0:
        v = t if s == 0 else s
        return (v > 0) - (v < 0)
    if (t > 0) == (s > 0):
        return 1 if t > 0 else -1
    if t * t > s * s * d:
        return 1 if t > 0 else -1
    return 1 if s > 0 else -1


def periodic_cf_to_surd(terms, period: int) -> QuadSurd:
    """Exact value of [t0; t1, ...] whose last `period` terms repeat forever."""
    terms = [int(t) for t in terms]
    if not 1 <= period <= len(terms):
        raise ValueError("period must be between 1 and the number of terms")
    head, cycle = terms[:-period], terms[-period:]
    if any(t < 1 for t in cycle) or any(t < 1 for t in head[1:]):
        raise ValueError("partial quotients after the first must be positive")
    if not head and cycle[0] < 1:
        raise ValueError("purely periodic expansion needs a positive leading term")
    # y = [c0; c1, ..., y] gives y = (P*y + P')/(Q*y + Q')
    p0, q0, p1, q1 = 1, 0, cycle[0], 1
    for a in cycle[1:]:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
    # q1*y^2 + (q0 - p1)*y - p0 = 0, positive root
    a, b, c = q1, q0 - p1, -p0
    disc = b * b - 4 * a * c
    y = QuadSurd(Fraction(-b, 2 * a), Fraction(1, 2 * a), disc)
    for t in reversed(head):
        y = t + 1 / y
    return y


_SURD_RE = re.compile(
    r"^\s*\(?\s*(?:([+-]?\d+)\s*(?=[+-]))?([+-])?\s*(?:(\d+)\s*\*?)?\s*sqrt\(\s*(\d+)\s*\)\s*\)?\s*(?:/\s*(\d+))?\s*$"
)
_CF_RE = re.compile(r"^\s*\[\s*(-?\d+)\s*(?:;\s*([\d\s,]*))?\]\s*(?:period\s*=\s*(\d+))?\s*$")


def parse_surd(text: str) -> QuadSurd:
    """Parse "(a+b*sqrt(d))/c" (a, b and c optional)."""
    m = _SURD_RE.match(text)
    if not m:
        raise ValueError(f"not a surd: {text!r}")
    a, sign, b, d, c = m.groups()
    a = int(a) if a else 0
    b = int(b) if b else 1
    if sign == "-":
        b = -b
    return QuadSurd.from_parts(a, b, int(d), int(c) if c else 1)


def parse_cf(text: str):
    """Parse "[a0;a1,...]" with an optional "period=k" suffix.

    Returns an exact QuadSurd when periodic, otherwise a CFPrefix.
    """
    m = _CF_RE.match(text)
    if not m:
        raise ValueError(f"not a continued fraction: {text!r}")
    head, rest, period = m.groups()
    terms = [int(head)]
    if rest and rest.strip():
        terms += [int(t) for t in rest.replace(" ", "").split(",") if t]
    if period:
        return periodic_cf_to_surd(terms, int(period))
    return CFPrefix(terms)
