"""The pivot engine.

From a pair of end invariants (nu_minus, nu_plus) compute the closest points
alpha_-, alpha_+, the Farey edges E separating them, the pivot sequence with
its widths, and the predicted omega values at each pivot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .farey import INF, Slope, Truncated, apply, farey_path, normalize_at, sb_key
from .halfplane import EndInvariant, UHPoint, bracket, shortest_vertex
from .markov import MarkovTriple, spectrum, vertex_trace
from .mobius import INF_I, complex_length, is_inf_i, omega, omega_distance
from .surd import CFPrefix, QuadSurd

NORMAL, EMPTY, SINGLETON = "Normal", "EmptyE", "SingletonE"


class DiagonalInput(ValueError):
    """nu_minus and nu_plus are the same point of the closed disk."""


class InsufficientPrecision(ValueError):
    """A continued-fraction prefix is too short for the requested window."""


@dataclass(frozen=True)
class IrrationalPoint:
    """Marker for an irrational closest point (not a Farey vertex)."""

    value: object

    def __str__(self):
        return str(self.value)


def closest_vertex_with_ties(nu: EndInvariant):
    """The closest point to nu and any co-minimal alternatives (interior case only)."""
    if nu.kind == "rational":
        return nu.value, []
    if nu.kind == "irrational":
        return IrrationalPoint(nu.value), []
    return shortest_vertex(nu.value)


def closest_vertex(nu: EndInvariant):
    return closest_vertex_with_ties(nu)[0]


def _same_point(a: EndInvariant, b: EndInvariant) -> bool:
    if a.kind != b.kind:
        return False
    if a.kind == "interior":
        return a.value.x == b.value.x and a.value.y == b.value.y
    return a.value == b.value


# -- edge enumeration -----------------------------------------------------------


def _crossings(target):
    for f in farey_path(target):
        yield f.kept


class _Side:
    """Edges crossed after the junction on the way to one closest point (lazy)."""

    def __init__(self, buffered, gen, point):
        self.edges = list(buffered)
        self.gen = gen
        self.done = gen is None
        self.truncated = False
        self.point = point

    def extend(self, n: int) -> None:
        """Pull up to n more edges; a prefix that runs out marks the side as truncated."""
        for _ in range(n):
            if self.done:
                return
            try:
                self.edges.append(next(self.gen))
            except StopIteration:
                self.done = True
            except Truncated:
                self.done = self.truncated = True

    def require(self) -> None:
        if self.done:
            raise InsufficientPrecision(
                f"continued fraction {self.point} is too short for the requested window"
            )


def _split_paths(a_minus, a_plus):
    """Walk both Farey paths in step and split them at the junction."""
    target = lambda a: a.value if isinstance(a, IrrationalPoint) else a  # noqa: E731
    gm, gp = _crossings(target(a_minus)), _crossings(target(a_plus))
    try:
        while True:
            em, ep = next(gm, None), next(gp, None)
            if em is None or ep is None or frozenset(em) != frozenset(ep):
                break
    except Truncated as exc:
        raise InsufficientPrecision("continued-fraction prefix ends before the paths separate") from exc
    side_m = _Side([em] if em else [], gm if em else None, a_minus)
    side_p = _Side([ep] if ep else [], gp if ep else None, a_plus)
    return side_m, side_p


def _pivots_of(edges, exclude):
    """Vertices in >= 2 edges, ordered by first appearance."""
    count, first = {}, {}
    for i, e in enumerate(edges):
        for v in e:
            count[v] = count.get(v, 0) + 1
            first.setdefault(v, i)
    piv = [v for v in count if count[v] >= 2 and v not in exclude]
    piv.sort(key=lambda v: first[v])
    return piv, first


def _between(x, y) -> int:
    """Number of integers strictly between two exact reals."""
    lo, hi = (x, y) if x <= y else (y, x)
    return max(0, math.ceil(hi) - math.floor(lo) - 1)


def _images(m, a):
    """Exact image(s) of a closest point; a prefix gives the images of its interval ends."""
    if isinstance(a, IrrationalPoint):
        if isinstance(a.value, CFPrefix):
            return [apply(m, e) for e in a.value.interval()]
        return [apply(m, a.value)]
    return [apply(m, a)]


def is_pivot(s: Slope, alpha_minus, alpha_plus) -> bool:
    """Exact test: s lies on at least two Farey edges separating alpha_- from alpha_+.

    In the chart sending s to infinity the edges at s are vertical lines over
    the integers, so the test counts integers strictly between the two images.
    """
    if s == alpha_minus or s == alpha_plus:
        return False
    m = normalize_at(s)
    xs, ys = _images(m, alpha_minus), _images(m, alpha_plus)
    results = set()
    for x in xs:
        for y in ys:
            if isinstance(x, Slope) or isinstance(y, Slope):
                if INF in (x, y):
                    raise Truncated(f"prefix too short to test {s}")
                x = x.to_fraction() if isinstance(x, Slope) else x
                y = y.to_fraction() if isinstance(y, Slope) else y
            results.add(_between(x, y) >= 2)
    if len(results) > 1:
        raise Truncated(f"prefix too short to test {s}")
    return results.pop()


# -- the sequence -----------------------------------------------------------------


@dataclass(frozen=True)
class PivotSequence:
    pivots: dict  # index -> Slope, in increasing index order
    widths: dict  # index -> int or None
    alpha_minus: object  # Slope or IrrationalPoint
    alpha_plus: object
    case: str
    window: int | None
    edges: tuple  # the enumerated part of E, ordered from alpha_- to alpha_+
    boundary_minus: int | None = None  # index of alpha_0 when alpha_- is a vertex
    boundary_plus: int | None = None  # index of alpha_{p+1} when alpha_+ is a vertex
    truncated_minus: bool = False
    truncated_plus: bool = False
    flags: dict = field(default_factory=dict)  # index -> tuple of strings
    alternates: tuple = ((), ())  # co-minimal closest vertices for interior ends

    @property
    def indices(self) -> list[int]:
        return list(self.pivots)

    @property
    def internal_indices(self) -> list[int]:
        return [n for n in self.pivots if n not in (self.boundary_minus, self.boundary_plus)]

    def kind(self, n: int) -> str:
        if n == self.boundary_minus and n == self.boundary_plus:
            return "double"
        if n == self.boundary_minus:
            return "minus"
        if n == self.boundary_plus:
            return "plus"
        return "internal"

    def slopes(self) -> list[Slope]:
        return list(self.pivots.values())


def _re(v):
    """Real part of a chart image: UHPoint -> x, exact reals unchanged."""
    return v.x if isinstance(v, UHPoint) else v


def _nu_image(nu: EndInvariant, m):
    v = nu.image(m)
    if isinstance(v, Slope):
        return INF if v.is_inf else v.to_fraction()
    return v


def _neighbor_int(m, s: Slope) -> int:
    img = apply(m, s)
    if img.q != 1:
        raise AssertionError(f"{s} is not a Farey neighbor of the pivot")
    return img.p


def pivot_sequence(nu_minus: EndInvariant, nu_plus: EndInvariant, window: int = 8,
                   allow_interior_diagonal: bool = False) -> PivotSequence:
    """The pivot sequence of (nu_minus, nu_plus).

    ``window`` is the number of internal pivots emitted toward each irrational
    end; it is ignored when both closest points are vertices.  Equal interior
    invariants (the Fuchsian locus) are rejected unless explicitly allowed.
    """
    if window < 1:
        raise ValueError("window must be positive")
    if _same_point(nu_minus, nu_plus) and not (allow_interior_diagonal and nu_minus.kind == "interior"):
        raise DiagonalInput("nu_minus and nu_plus coincide (diagonal input)")
    am, alt_m = closest_vertex_with_ties(nu_minus)
    ap, alt_p = closest_vertex_with_ties(nu_plus)
    alternates = (tuple(alt_m), tuple(alt_p))
    irr_m, irr_p = isinstance(am, IrrationalPoint), isinstance(ap, IrrationalPoint)

    if am == ap:
        return _finish(nu_minus, nu_plus, [am], 0, am, ap, EMPTY, None, (), alternates)

    side_m, side_p = _split_paths(am, ap)
    excl = {a for a in (am, ap) if isinstance(a, Slope)}

    def assemble():
        e_m = [e for e in side_m.edges if not (excl & set(e))]
        e_p = [e for e in side_p.edges if not (excl & set(e))]
        edges = list(reversed(e_m)) + e_p
        piv, first = _pivots_of(edges, excl)
        k_minus = sum(1 for v in piv if first[v] < len(e_m))
        return edges, piv, k_minus

    if not irr_m:
        side_m.extend(10**9)
    if not irr_p:
        side_p.extend(10**9)
    need = window + 1
    step = 8
    while True:
        edges, piv, k_minus = assemble()
        if irr_m and irr_p:
            ok_m, ok_p = k_minus >= need, len(piv) - k_minus >= need
        elif irr_p:
            ok_m, ok_p = True, len(piv) >= need
        elif irr_m:
            ok_m, ok_p = len(piv) >= need, True
        else:
            ok_m = ok_p = True
        if ok_m and ok_p:
            break
        for ok, side in ((ok_m, side_m), (ok_p, side_p)):
            if not ok:
                side.require()
                side.extend(step)
        step *= 2

    if not edges:
        seq = [am, ap]
        return _finish(nu_minus, nu_plus, seq, 0, am, ap, EMPTY, None, (), alternates)
    case = NORMAL
    if len(edges) == 1:
        case = SINGLETON
        piv = [min(edges[0], key=sb_key)]

    if irr_m and irr_p:
        start = 1 - k_minus
        full = piv
        lo, hi = 1 - window, window
    elif irr_m:
        full = piv + [ap]
        start = 1 - len(piv)
        lo, hi = 1 - window, 1
    elif irr_p:
        full = [am] + piv
        start = 0
        lo, hi = 0, window
    else:
        full = [am] + piv + [ap]
        start = 0
        lo, hi = 0, len(full) - 1
    return _finish(nu_minus, nu_plus, full, start, am, ap, case, (lo, hi) if (irr_m or irr_p) else None,
                   tuple(edges), alternates, window=window if (irr_m or irr_p) else None)


def _finish(nu_minus, nu_plus, full, start, am, ap, case, emit, edges, alternates, window=None):
    """Attach indices and widths; ``full`` may carry one extra pivot per irrational end."""
    indexed = {start + i: s for i, s in enumerate(full)}
    lo, hi = emit if emit is not None else (start, start + len(full) - 1)
    b_minus = start if isinstance(am, Slope) else None
    b_plus = start + len(full) - 1 if isinstance(ap, Slope) else None
    widths, flags = {}, {}
    for n in range(lo, hi + 1):
        s = indexed[n]
        m = normalize_at(s)
        fl = []
        if n == b_minus or n == b_plus:
            fl.append("boundary")
            w = _boundary_width(n, s, m, indexed, nu_minus, nu_plus, b_minus, b_plus, fl)
        else:
            w = _neighbor_int(m, indexed[n + 1]) - _neighbor_int(m, indexed[n - 1])
        widths[n] = w
        if fl:
            flags[n] = tuple(fl)
    pivots = {n: indexed[n] for n in range(lo, hi + 1)}
    return PivotSequence(
        pivots=pivots, widths=widths, alpha_minus=am, alpha_plus=ap, case=case, window=window,
        edges=edges, boundary_minus=b_minus, boundary_plus=b_plus,
        truncated_minus=isinstance(am, IrrationalPoint) and am.value.__class__ is CFPrefix,
        truncated_plus=isinstance(ap, IrrationalPoint) and ap.value.__class__ is CFPrefix,
        flags=flags, alternates=alternates,
    )


def _boundary_width(n, s, m, indexed, nu_minus, nu_plus, b_minus, b_plus, fl):
    """Width at a boundary pivot, replacing the missing neighbor by Re nu.

    None when the relevant invariant is the pivot itself (a cusp).
    """
    left = right = None
    if n == b_minus:
        if nu_minus.kind == "rational":
            return None
        left = _re(_nu_image(nu_minus, m))
    else:
        left = Fraction(_neighbor_int(m, indexed[n - 1]))
    if n == b_plus:
        if nu_plus.kind == "rational":
            return None
        right = _re(_nu_image(nu_plus, m))
    else:
        right = Fraction(_neighbor_int(m, indexed[n + 1]))
    try:
        return bracket(left, right)
    except ValueError:
        fl.append("bracket_undefined")
        return 0


def width_formula(seq: PivotSequence, n: int):
    """floor-bracket of the two closest points seen from alpha_n (internal pivots)."""
    m = normalize_at(seq.pivots[n])
    vals = []
    for a in (seq.alpha_minus, seq.alpha_plus):
        v = a.value if isinstance(a, IrrationalPoint) else a
        if isinstance(v, CFPrefix):
            v = v.approx()
        img = apply(m, v)
        vals.append(img.to_fraction() if isinstance(img, Slope) else img)
    return bracket(*vals)


# -- predictions ------------------------------------------------------------------


def _split_real(v):
    """Rational part and irrational float part of an exact real."""
    if isinstance(v, QuadSurd):
        return v.r, v.float_parts()[1]
    return v, 0.0


def _rational_float(x, y, sign: int = 1, extra: int = 0) -> float:
    """float(x + sign*y + extra) for rationals, correctly rounded without normalizing a Fraction."""
    xn, xd, yn, yd = x.numerator, x.denominator, y.numerator, y.denominator
    den = xd * yd
    return (xn * yd + sign * yn * xd + extra * den) / den


def _exact_local(nu: EndInvariant, m):
    """nu seen from the chart m, kept exact; floats are converted losslessly to Fractions."""
    if nu.kind == "interior":
        p = nu.value
        if not p.exact:
            p = UHPoint(Fraction(p.x), Fraction(p.y))
        return apply(m, p)
    return _nu_image(nu, m)


@dataclass(frozen=True)
class PivotPrediction:
    index: int
    slope: Slope
    width: int | None
    omega_hat: complex  # INF_I for a parabolic prediction
    nu_plus_local: object
    nu_minus_local: object
    internal_hat: complex | None = None  # w(n) + i
    ell_bounds: tuple | None = None  # (c2/w^2, c3/w^2)
    inv_theta_bounds: tuple | None = None  # 2*pi/theta within w +- c4
    flags: tuple = ()


def omega_hat(nu_minus: EndInvariant, nu_plus: EndInvariant, m) -> tuple:
    """m(nu_+) - conj(m(nu_-)) + i, computed exactly; returns (value, local_plus, local_minus)."""
    lp, lm = _exact_local(nu_plus, m), _exact_local(nu_minus, m)
    if lp is INF or lm is INF:
        return INF_I, lp, lm
    rp, ip = (lp.x, lp.y) if isinstance(lp, UHPoint) else (lp, 0)
    rm, im = (lm.x, lm.y) if isinstance(lm, UHPoint) else (lm, 0)
    (qp, fp), (qm, fm) = _split_real(rp), _split_real(rm)
    re = _rational_float(qp, qm, -1) + (fp - fm)
    return complex(re, _rational_float(ip, im, 1, 1)), lp, lm


def predict(seq: PivotSequence, nu_minus: EndInvariant, nu_plus: EndInvariant,
            c2: float | None = None, c3: float | None = None, c4: float | None = None,
            chart=normalize_at) -> list[PivotPrediction]:
    """Predicted omega at every pivot; ``chart`` chooses the normalizer (for invariance tests)."""
    out = []
    for n, s in seq.pivots.items():
        w = seq.widths.get(n)
        value, lp, lm = omega_hat(nu_minus, nu_plus, chart(s))
        flags = []
        if nu_minus.truncated or nu_plus.truncated:
            flags.append("truncated_invariant")
        internal = complex(w, 1) if (w is not None and seq.kind(n) == "internal") else None
        ell_b = theta_b = None
        if internal is not None and w != 0:
            if c2 is not None and c3 is not None:
                ell_b = (c2 / w**2, c3 / w**2)
            if c4 is not None:
                theta_b = (w - c4, w + c4)
        out.append(PivotPrediction(n, s, w, value, lp, lm, internal, ell_b, theta_b, tuple(flags)))
    return out


# -- comparison against a representation ---------------------------------------


def _pair(z):
    if is_inf_i(z):
        return "inf"
    z = complex(z)
    return [z.real, z.imag]


def _num(x):
    x = float(x)
    return "inf" if math.isinf(x) else x


def compare(rep: MarkovTriple, seq: PivotSequence, preds, bits: int = 53) -> dict:
    """Actual versus predicted omega at every pivot, with summary statistics."""
    records = []
    for pr in preds:
        tr = vertex_trace(rep, pr.slope, bits)
        lam = complex_length(tr, bits)
        w_act = omega(lam)
        flags = list(pr.flags)
        hat_inf, act_inf = is_inf_i(pr.omega_hat), lam.is_parabolic
        if act_inf and not hat_inf:
            flags.append("parabolic_actual_finite_prediction")
        elif hat_inf and not act_inf:
            flags.append("finite_actual_parabolic_prediction")
        elif hat_inf and act_inf:
            flags.append("parabolic_agreement")
        w_c = INF_I if act_inf else complex(w_act)
        d = omega_distance(w_c, pr.omega_hat)
        d_int = omega_distance(w_c, pr.internal_hat) if pr.internal_hat is not None else None
        records.append({
            "index": pr.index,
            "slope": str(pr.slope),
            "width": pr.width,
            "trace": _pair(complex(tr)),
            "omega_hat": _pair(pr.omega_hat),
            "omega_actual": _pair(w_c),
            "lambda_actual": [float(lam.ell), float(lam.theta)],
            "h2_distance": _num(d),
            "h2_distance_internal": None if d_int is None else _num(d_int),
            "flags": flags,
        })
    finite = [r["h2_distance"] for r in records if r["h2_distance"] != "inf"]
    finite_int = [r["h2_distance_internal"] for r in records
                  if r["h2_distance_internal"] not in (None, "inf")]
    lengths = [r["lambda_actual"][0] for r in records]
    summary = {
        "pivots": len(records),
        "max_h2_distance": max(finite) if finite else None,
        "mean_h2_distance": sum(finite) / len(finite) if finite else None,
        "max_h2_distance_internal": max(finite_int) if finite_int else None,
        "max_pivot_length": max(lengths) if lengths else None,
    }
    return {"records": records, "summary": summary}


def short_curves_are_pivots(rep: MarkovTriple, seq: PivotSequence, eps: float, depth: int,
                            bits: int = 53) -> list[Slope]:
    """Slopes within ``depth`` flips whose length is at most eps but which are not pivots."""
    if eps <= 0:
        return []
    pivot_set = set(seq.pivots.values())
    pivot_set |= {a for a in (seq.alpha_minus, seq.alpha_plus) if isinstance(a, Slope)}
    out = []
    for s, tr in spectrum(rep, depth, bits).items():
        lam = complex_length(tr, bits)
        if float(lam.ell) > eps or s in pivot_set:
            continue
        if seq.case == NORMAL and is_pivot(s, seq.alpha_minus, seq.alpha_plus):
            continue
        out.append(s)
    return sorted(out, key=sb_key)


__all__ = [
    "DiagonalInput", "EMPTY", "InsufficientPrecision", "IrrationalPoint", "NORMAL", "PivotPrediction",
    "PivotSequence", "SINGLETON", "closest_vertex", "closest_vertex_with_ties", "compare", "is_pivot",
    "omega_hat", "pivot_sequence", "predict", "short_curves_are_pivots", "width_formula",
]
