"""Markov triples as punctured-torus representations and the Farey trace recursion.

A triple (x, y, z) sits on the base triangle (inf, 0, 1): x = tr A at inf,
y = tr B at 0 and z = tr AB at 1, where the homology class P*a + Q*b has
slope P/Q.  Arithmetic is duck-typed, so Python complex, mpmath ``mpc`` and
exact sympy numbers all flow through ``flip`` and ``vertex_trace``.
"""

from __future__ import annotations

import cmath
import math
import random
import re
from dataclasses import dataclass

import mpmath

from .farey import (
    BASE_TRIANGLE, IDENTITY, INF, IntegerMoebius, Slope, apply, farey_path, parse_slope,
    twist_map,
)
from .mobius import MoebiusC

MAX_BITS = 4096
RESIDUAL_TOL = 1e-10


class PrecisionError(ArithmeticError):
    """Trace magnitudes outgrew the largest allowed working precision."""


class DegenerateChart(ValueError):
    """No normal form: both generators are parabolic."""


class RejectedSample(ValueError):
    """No real completion of (x, y) to a Markov triple."""


class SolveError(RuntimeError):
    """Root finding for a fixed triple failed."""


def markov_residual(t) -> object:
    x, y, z = t
    return x * x + y * y + z * z - x * y * z


@dataclass(frozen=True)
class MarkovTriple:
    """Traces (x, y, z) on x^2 + y^2 + z^2 = xyz, anchored on (inf, 0, 1)."""

    x: object
    y: object
    z: object

    def __post_init__(self):
        vals = tuple(self)
        if not all(_float_kind(v) for v in vals):
            res = markov_residual(vals)
            expand = getattr(res, "expand", None)  # symbolic values (sympy) are checked exactly
            if expand is not None and expand() == 0:
                return
            vals = tuple(complex(v) for v in vals)
        x, y, z = vals
        res = markov_residual(vals)
        scale = abs(x) ** 2 + abs(y) ** 2 + abs(z) ** 2 + abs(x * y * z)
        if not abs(res) <= RESIDUAL_TOL * max(1, scale):
            raise ValueError(f"not a Markov triple (residual {complex(res):.3g})")

    def __iter__(self):
        return iter((self.x, self.y, self.z))

    @property
    def residual(self):
        return markov_residual(self)

    def to_json(self) -> dict:
        return {k: [float(complex(v).real), float(complex(v).imag)] for k, v in zip("xyz", self)}

    @classmethod
    def from_json(cls, data: dict) -> "MarkovTriple":
        return cls(*(complex(*data[k]) for k in "xyz"))


AnchoredRep = MarkovTriple

_KEEP = {"xy": 2, "yx": 2, "xz": 1, "zx": 1, "yz": 0, "zy": 0}


def flip(t: MarkovTriple, keep: str = "xy") -> MarkovTriple:
    """Replace the coordinate not in ``keep`` by (product of kept) - (old value)."""
    vals = list(t)
    k = _KEEP[keep]
    others = [vals[i] for i in range(3) if i != k]
    vals[k] = others[0] * others[1] - vals[k]
    return MarkovTriple(*vals)


def parse_triple(text: str) -> MarkovTriple:
    """"3,3,3" or "2,2,2+2i" (Python complex syntax with i or j)."""
    parts = [p.strip().replace("i", "j") for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"need three comma-separated traces: {text!r}")
    return MarkovTriple(*(complex(p) for p in parts))


# -- precision ---------------------------------------------------------------


def _limit(bits: int):
    if bits <= 53:
        return 1e300
    return mpmath.mpf(10) ** (300 * bits // 53)


def _float_kind(v) -> bool:
    return isinstance(v, (int, float, complex, mpmath.mpc, mpmath.mpf))


def _lift(t: MarkovTriple, bits: int):
    if bits <= 53:
        return tuple(t)
    return tuple(mpmath.mpc(v) for v in t)


def _with_escalation(fn, t: MarkovTriple, bits: int):
    """Run fn(values, limit) raising OverflowError on growth; double bits until it fits."""
    if not all(_float_kind(v) for v in t):
        return fn(tuple(t), None)
    while True:
        if bits > MAX_BITS:
            raise PrecisionError(f"trace magnitude needs more than {MAX_BITS} bits")
        try:
            with mpmath.workprec(max(bits, 53)):
                return fn(_lift(t, bits), _limit(bits))
        except OverflowError:
            bits *= 2


def _check(v, limit):
    if limit is not None and not abs(v) < limit:
        raise OverflowError


# -- traces on the Farey graph ------------------------------------------------


def vertex_trace(t: MarkovTriple, v: Slope, bits: int = 53):
    """Trace at slope v, flipping along the Farey path from the base triangle."""

    def run(vals, limit):
        tri = dict(zip(BASE_TRIANGLE.vertices, vals))
        if v in tri:
            return tri[v]
        for step in farey_path(v):
            u, w = step.kept
            new = tri[u] * tri[w] - tri[step.dropped]
            _check(new, limit)
            tri = {u: tri[u], w: tri[w], step.added: new}
        return tri[v]

    return _with_escalation(run, t, bits)


def spectrum(t: MarkovTriple, depth: int, bits: int = 53) -> dict:
    """Trace at every slope within ``depth`` flips of the base triangle."""

    def run(vals, limit):
        (a, b, c) = [(s.p, s.q) for s in BASE_TRIANGLE.vertices]
        out = {a: vals[0], b: vals[1], c: vals[2]}
        # (u, v, w): cross edge uv away from w
        stack = [(a, b, c, 1), (b, c, a, 1), (a, c, b, 1)]
        while stack:
            u, v, w, d = stack.pop()
            if d > depth:
                continue
            new = (u[0] + v[0], u[1] + v[1])
            if new == w or (-new[0], -new[1]) == w:
                new = (u[0] - v[0], u[1] - v[1])
            if new[1] < 0 or (new[1] == 0 and new[0] < 0):
                new = (-new[0], -new[1])
            tr = out[u] * out[v] - out[w]
            _check(tr, limit)
            out[new] = tr
            stack.append((u, new, v, d + 1))
            stack.append((v, new, u, d + 1))
        return out

    raw = _with_escalation(run, t, bits)
    return {Slope(p, q): tr for (p, q), tr in raw.items()}


def spectrum_depths(depth: int) -> dict:
    """Flip depth of every slope within ``depth`` of the base triangle."""
    out = {s: 0 for s in BASE_TRIANGLE.vertices}
    a, b, c = BASE_TRIANGLE.vertices
    stack = [(a, b, c, 1), (b, c, a, 1), (a, c, b, 1)]
    while stack:
        u, v, w, d = stack.pop()
        if d > depth:
            continue
        m1 = Slope(u.p + v.p, u.q + v.q)
        new = m1 if m1 != w else Slope(u.p - v.p, u.q - v.q)
        out[new] = d
        stack.append((u, new, v, d + 1))
        stack.append((v, new, u, d + 1))
    return out


# -- explicit matrices ----------------------------------------------------------


def build_matrices(t: MarkovTriple, tol: float = 1e-9) -> tuple[MoebiusC, MoebiusC]:
    """Generators with tr A = x, tr B = y, tr AB = z; A diagonal unless x = +-2."""
    x, y, z = t
    if abs(x * x - 4) > tol:
        return _normal_form(x, y, z)
    if abs(y * y - 4) > tol:
        b, a = _normal_form(y, x, z)
        return a, b
    raise DegenerateChart("both generators parabolic; no diagonal chart")


def _normal_form(x, y, z):
    lib = mpmath if isinstance(x, (mpmath.mpc, mpmath.mpf)) else cmath
    e = (x + lib.sqrt(x * x - 4)) / 2
    A = MoebiusC(e, 0, 0, 1 / e)
    b11 = (z - y / e) / (e - 1 / e)
    b22 = y - b11
    B = MoebiusC(b11, 1, b11 * b22 - 1, b22)
    return A, B


def word_matrix(p: int, q: int, A: MoebiusC, B: MoebiusC, memo: dict | None = None) -> MoebiusC:
    """Christoffel-word matrix for the primitive class p*a + q*b (q >= 0).

    Built by Stern-Brocot descent: each node is the product of its two
    parents, which always form a generating pair.
    """
    if memo is None:
        memo = {}
    if (p, q) in memo:
        return memo[(p, q)]
    sgn = -1 if p < 0 else 1
    a_mat = A if sgn > 0 else A.inverse()
    lw, rw = (0, 1), (1, 0)
    lm, rm = B, a_mat
    target = (abs(p), q)
    while True:
        mp, mq = lw[0] + rw[0], lw[1] + rw[1]
        key = (sgn * mp, mq)
        if key not in memo:
            memo[key] = lm @ rm
        mm = memo[key]
        if (mp, mq) == target:
            return mm
        if target[0] * mq < mp * target[1]:
            rw, rm = (mp, mq), mm
        else:
            lw, lm = (mp, mq), mm


def matrix_trace_oracle(t: MarkovTriple, v: Slope, matrices=None, memo=None):
    A, B = matrices if matrices is not None else build_matrices(t)
    if v.is_inf:
        return A.trace
    if v.p == 0:
        return B.trace
    return word_matrix(v.p, v.q, A, B, memo).trace


def _scaled(m) -> tuple:
    """(a, b, c, d, e) with the matrix equal to 2**e times the entries, max entry near 1."""
    a, b, c, d = m
    _, e = math.frexp(max(abs(a), abs(b), abs(c), abs(d)))
    k = 2.0 ** -e
    return a * k, b * k, c * k, d * k, e


def _smul(x: tuple, y: tuple) -> tuple:
    a, b, c, d, e = x
    p, q, r, s, f = y
    m = _scaled((a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s))
    return m[:4] + (m[4] + e + f,)


def oracle_traces(t: MarkovTriple, slopes) -> dict:
    """Traces of explicit matrix words, immune to overflow.

    Products are carried in double precision as a normalized matrix times a
    power of two, so only relative accuracy is tracked.  Values beyond the
    float range come back as mpmath numbers.
    """
    A, B = build_matrices(MarkovTriple(*(complex(v) for v in (t.x, t.y, t.z))))
    sa = _scaled(tuple(complex(v) for v in A.entries()))
    sai = _scaled(tuple(complex(v) for v in A.inverse().entries()))
    sb = _scaled(tuple(complex(v) for v in B.entries()))
    memo: dict = {}

    def word(p: int, q: int) -> tuple:
        sgn = -1 if p < 0 else 1
        lw, rw = (0, 1), (1, 0)
        lm, rm = sb, (sa if sgn > 0 else sai)
        target = (abs(p), q)
        while True:
            mp_, mq = lw[0] + rw[0], lw[1] + rw[1]
            key = (sgn * mp_, mq)
            mm = memo.get(key)
            if mm is None:
                mm = memo[key] = _smul(lm, rm)
            if (mp_, mq) == target:
                return mm
            if target[0] * mq < mp_ * target[1]:
                rw, rm = (mp_, mq), mm
            else:
                lw, lm = (mp_, mq), mm

    out = {}
    for v in slopes:
        if v.is_inf:
            m = sa
        elif v.p == 0:
            m = sb
        else:
            m = word(v.p, v.q)
        tr, e = m[0] + m[3], m[4]
        if e < 1000:
            out[v] = tr * 2.0 ** e
        else:
            out[v] = mpmath.mpc(tr) * mpmath.ldexp(1, e)
    return out


# -- families ------------------------------------------------------------------


def maskit_triple(y, sign: int = 1, unit=1j) -> MarkovTriple:
    """(2, y, y + 2*sign*i); ``unit`` may be an exact imaginary unit such as sympy.I."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return MarkovTriple(2, y, y + sign * 2 * unit)


def fuchsian_sample(x: float, y: float, branch: int = 1) -> MarkovTriple:
    if not (x > 2 and y > 2):
        raise RejectedSample("need x, y > 2")
    disc = x * x * y * y - 4 * x * x - 4 * y * y
    if disc < 0:
        raise RejectedSample(f"discriminant {disc} < 0: no real completion")
    z = (x * y + (1 if branch >= 0 else -1) * math.sqrt(disc)) / 2
    return MarkovTriple(x, y, z)


_TWIST_RE = re.compile(r"D\(\s*([^)]+?)\s*\)\s*(?:\^\s*([+-]?\d+))?")


def parse_twist_word(text: str) -> list[tuple[Slope, int]]:
    """Parse "D(inf)^1 D(0)^-1" into [(slope, exponent), ...]."""
    out, pos = [], 0
    text = text.strip()
    for m in _TWIST_RE.finditer(text):
        if text[pos:m.start()].strip():
            raise ValueError(f"bad twist word: {text!r}")
        out.append((parse_slope(m.group(1)), int(m.group(2) or 1)))
        pos = m.end()
    if text[pos:].strip() or not out:
        raise ValueError(f"bad twist word: {text!r}")
    return out


def twist_word_map(word) -> IntegerMoebius:
    """Product of the twists, leftmost factor applied last."""
    m = IDENTITY
    for s, k in word:
        m = m @ twist_map(s, k)
    return m


def monodromy_fixed_triple(word, bits: int = 128, seed: int = 0, starts: int = 40,
                           tol: float = 1e-9) -> MarkovTriple:
    """A non-real triple whose trace function is invariant under the word's mapping class.

    Solves t(phi(inf)) = x, t(phi(0)) = y and the Markov equation by Newton
    iteration from seeded random starts; the remaining vertex t(phi(1)) = z is
    checked afterwards.  Of a complex-conjugate pair the root with Im x > 0 is
    returned.
    """
    phi = twist_word_map(word)
    if abs(phi.a + phi.d) <= 2:
        raise ValueError("the word does not act hyperbolically on the circle")
    img = [apply(phi, s) for s in BASE_TRIANGLE.vertices]
    rng = random.Random(seed)
    found = []
    with mpmath.workprec(max(bits, 106)):

        def traces(x, y, z):
            t = _Raw(x, y, z)
            return [_raw_trace(t, s) for s in img]

        def eqs(x, y, z):
            tx, ty, _ = traces(x, y, z)
            return [tx - x, ty - y, x * x + y * y + z * z - x * y * z]

        for _ in range(starts):
            x0 = [mpmath.mpc(rng.uniform(-3, 3), rng.uniform(-3, 3)) for _ in range(3)]
            try:
                sol = mpmath.findroot(eqs, x0, tol=mpmath.mpf(2) ** (-bits + 20), maxsteps=80)
            except (ZeroDivisionError, ValueError, OverflowError):
                continue
            x, y, z = (sol[i] for i in range(3))
            if max(abs(v.imag) for v in (x, y, z)) < 1e-6:
                continue
            tz = traces(x, y, z)
            err = max(abs(a - b) for a, b in zip(tz, (x, y, z)))
            scale = max(1, *(abs(v) for v in (x, y, z)))
            if err > tol * scale or abs(markov_residual((x, y, z))) > tol * scale ** 3:
                continue
            found.append((x, y, z))
    if not found:
        raise SolveError(f"no non-real fixed triple found from {starts} starts")
    found.sort(key=lambda s: (float(s[0].imag) <= 0, round(float(abs(s[0])), 6),
                              round(float(s[0].real), 6)))
    x, y, z = found[0]
    if bits <= 53:
        return MarkovTriple(complex(x), complex(y), complex(z))
    return MarkovTriple(x, y, z)


class _Raw(tuple):
    """Unvalidated triple used inside root finding."""

    def __new__(cls, x, y, z):
        return super().__new__(cls, (x, y, z))


def _raw_trace(vals, v: Slope):
    tri = dict(zip(BASE_TRIANGLE.vertices, vals))
    if v in tri:
        return tri[v]
    for step in farey_path(v):
        u, w = step.kept
        new = tri[u] * tri[w] - tri[step.dropped]
        tri = {u: tri[u], w: tri[w], step.added: new}
    return tri[v]


__all__ = [
    "AnchoredRep", "DegenerateChart", "MarkovTriple", "PrecisionError", "RejectedSample",
    "SolveError", "build_matrices", "flip", "fuchsian_sample", "markov_residual",
    "maskit_triple", "matrix_trace_oracle", "monodromy_fixed_triple", "oracle_traces", "parse_triple",
    "parse_twist_word", "spectrum", "spectrum_depths", "twist_word_map", "vertex_trace",
    "word_matrix",
]
