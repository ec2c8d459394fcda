"""Model-manifold data: the combinatorial data (W, v+, v-), block boundary tori and tube shapes."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .halfplane import EndInvariant, UHPoint, bracket_ends
from .mobius import INF_I, is_inf_i
from .farey import apply, normalize_at
from .pivot import PivotSequence, _exact_local, _split_real

SCHEMA_VERSION = 1

INTERNAL, PLUS, MINUS, DOUBLE, PARABOLIC, CUSP = (
    "Internal", "BoundaryPlus", "BoundaryMinus", "DoubleBoundary", "Parabolic", "Cusp",
)


@dataclass(frozen=True)
class CombinatorialData:
    """W maps index to width (an int, None at a cusp end, or math.inf); v+- are UHPoints, INF_I or None."""

    W: dict
    v_plus: object = None
    v_minus: object = None

    def __post_init__(self):
        idx = sorted(self.W)
        if idx and idx != list(range(idx[0], idx[-1] + 1)):
            raise ValueError("width indices must form an interval")
        for v in (self.v_plus, self.v_minus):
            if isinstance(v, UHPoint) and abs(v.x) > 1:
                raise ValueError(f"|Re v| must be at most 1, got {v}")


@dataclass(frozen=True)
class BlockTorusParam:
    index: int
    kind: str
    tau: object  # UHPoint or INF_I


@dataclass(frozen=True)
class TubeShape:
    ell: float
    theta: float
    r: float


class TubeSolveError(ValueError):
    """No tube with unit-length longitude has the requested boundary parameter."""


def _int_image(m, s) -> int:
    img = apply(m, s)
    assert img.q == 1, "pivot neighbors map to integers"
    return img.p


def _shift(p: UHPoint, k) -> UHPoint:
    return UHPoint(p.x - k, p.y)


def _reflect(k, p: UHPoint) -> UHPoint:
    """k - conj(p), still in the upper half-plane."""
    return UHPoint(k - p.x, p.y)


def _local(nu: EndInvariant, s):
    return _exact_local(nu, normalize_at(s))


def combinatorial_data(seq: PivotSequence, nu_minus: EndInvariant, nu_plus: EndInvariant) -> CombinatorialData:
    W = dict(seq.widths)
    v_plus = v_minus = None
    bp, bm = seq.boundary_plus, seq.boundary_minus
    if bp is not None and bm is not None and bp == bm:
        s = seq.pivots[bp]
        v_plus, v_minus = _double_split(_local(nu_minus, s), _local(nu_plus, s), nu_minus, nu_plus)
        return CombinatorialData(W, v_plus, v_minus)
    if bp is not None:
        s = seq.pivots[bp]
        if nu_plus.kind == "rational":
            v_plus = INF_I
        else:
            prev = _int_image(normalize_at(s), seq.pivots[bp - 1])
            v_plus = _shift(_local(nu_plus, s), prev + W[bp])
    if bm is not None:
        s = seq.pivots[bm]
        if nu_minus.kind == "rational":
            v_minus = INF_I
        else:
            nxt = _int_image(normalize_at(s), seq.pivots[bm + 1])
            v_minus = _reflect(nxt - W[bm], _local(nu_minus, s))
    return CombinatorialData(W, v_plus, v_minus)


def _double_split(lm, lp, nu_minus, nu_plus):
    """Split a single boundary block between both ends: w(0) + v+ + v- = nu+ - conj(nu-)."""
    if nu_plus.kind == "rational" and nu_minus.kind == "rational":
        return INF_I, INF_I
    if nu_plus.kind == "rational":
        return INF_I, _reflect(round(lm.x), lm)
    if nu_minus.kind == "rational":
        return _shift(lp, round(lp.x)), INF_I
    try:
        j, k = bracket_ends(lm.x, lp.x)
    except ValueError:
        j = k = math.floor(lm.x)
    return _shift(lp, k), _reflect(j, lm)


def block_kind(seq: PivotSequence, n: int, nu_minus: EndInvariant, nu_plus: EndInvariant) -> str:
    w = seq.widths.get(n)
    if w is not None and isinstance(w, float) and math.isinf(w):
        return CUSP
    kind = seq.kind(n)
    if kind == "internal":
        return INTERNAL
    if (kind in ("plus", "double") and nu_plus.kind == "rational") or (
        kind in ("minus", "double") and nu_minus.kind == "rational"
    ):
        return PARABOLIC
    return {"plus": PLUS, "minus": MINUS, "double": DOUBLE}[kind]


def block_torus_param(seq: PivotSequence, index: int, nu_minus: EndInvariant, nu_plus: EndInvariant) -> BlockTorusParam:
    """Boundary torus of the solid torus at pivot ``index``, summed from its four annuli."""
    kind = block_kind(seq, index, nu_minus, nu_plus)
    if kind in (PARABOLIC, CUSP):
        return BlockTorusParam(index, kind, INF_I)
    if kind == INTERNAL:
        return BlockTorusParam(index, kind, UHPoint(seq.widths[index], 2))
    s = seq.pivots[index]
    m = normalize_at(s)
    half = Fraction(1, 2)
    # each side annulus contributes (t1 - t0) i
    t0 = Fraction(1, 4) if kind == PLUS else Fraction(0)
    t1 = Fraction(3, 4) if kind == MINUS else Fraction(1)
    side = 2 * (t1 - t0)
    # top and bottom annuli: a boundary end gives nu - i/2 (reflected below), an internal face gives an integer + i/2
    if kind == MINUS:
        top = (Fraction(_int_image(m, seq.pivots[index + 1])), half)
    else:
        p = _local(nu_plus, s)
        top = (p.x, p.y - half)
    if kind == PLUS:
        bottom = (-Fraction(_int_image(m, seq.pivots[index - 1])), half)
    else:
        q = _local(nu_minus, s)
        bottom = (-q.x, q.y - half)
    tau = UHPoint(top[0] + bottom[0], top[1] + bottom[1] + side)
    return BlockTorusParam(index, kind, tau)


# -- tubes ------------------------------------------------------------------------


def boundary_param_forward(shape: TubeShape) -> complex:
    """Marked parameter (meridian over longitude) of the radius-r tube boundary."""
    ch, sh = math.cosh(shape.r), math.sinh(shape.r)
    return 2j * math.pi * sh / complex(shape.ell * ch, shape.theta * sh)


def unit_radius(ell: float, theta: float) -> float:
    """Radius at which the core curve has length 1 on the boundary torus."""
    if not 0 < ell < 1:
        raise TubeSolveError("a unit-length longitude needs 0 < ell < 1")
    return math.asinh(math.sqrt((1 - ell * ell) / (ell * ell + theta * theta)))


def tube_from_boundary(tau) -> TubeShape:
    """Invert the forward map: the tube whose boundary has parameter tau and unit longitude.

    With u = 2 pi i / tau the longitude is u sinh r, so sinh r = 1/|u|,
    theta = Im u and ell = Re(u) tanh r.
    """
    z = complex(float(tau.x), float(tau.y)) if isinstance(tau, UHPoint) else complex(tau)
    if not z.imag > 0:
        raise TubeSolveError("boundary parameter must lie in the upper half-plane")
    u = 2j * math.pi / z
    theta = u.imag
    # absorb rounding at the edge of (-pi, pi]; the two ends describe the same twist
    if abs(theta) > math.pi * (1 + 1e-12):
        raise TubeSolveError(f"rotation {theta} exceeds pi: no tube for tau = {z}")
    if abs(theta) >= math.pi:
        theta = math.pi
    r = math.asinh(1 / abs(u))
    ell = u.real * math.tanh(r)
    return TubeShape(ell, theta, r)


# -- export -------------------------------------------------------------------------


def _pair(v):
    if v is None:
        return None
    if is_inf_i(v):
        return "inf"
    if isinstance(v, UHPoint):
        return [_float(v.x), float(v.y)]
    v = complex(v)
    return [v.real, v.imag]


def _float(x) -> float:
    q, f = _split_real(x)
    return float(q) + f


def _width(w):
    if isinstance(w, float) and math.isinf(w):
        return "inf"
    return w


SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "pivot-kit model document",
    "type": "object",
    "required": ["version", "sigma", "blocks"],
    "properties": {
        "version": {"const": SCHEMA_VERSION},
        "meta": {"type": "object"},
        "sigma": {
            "type": "object",
            "required": ["W", "v_plus", "v_minus"],
            "properties": {
                "W": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "prefixItems": [{"type": "integer"}, {"$ref": "#/$defs/width"}],
                        "minItems": 2, "maxItems": 2,
                    },
                },
                "v_plus": {"$ref": "#/$defs/point_or_null"},
                "v_minus": {"$ref": "#/$defs/point_or_null"},
            },
        },
        "blocks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["n", "kind", "width", "tau", "tube", "omega_hat"],
                "properties": {
                    "n": {"type": "integer"},
                    "kind": {"enum": [INTERNAL, PLUS, MINUS, DOUBLE, PARABOLIC, CUSP]},
                    "width": {"$ref": "#/$defs/width"},
                    "tau": {"$ref": "#/$defs/point"},
                    "tube": {
                        "oneOf": [
                            {"type": "null"},
                            {
                                "type": "object",
                                "required": ["ell", "theta", "r"],
                                "properties": {k: {"type": "number"} for k in ("ell", "theta", "r")},
                            },
                        ]
                    },
                    "omega_hat": {"oneOf": [{"$ref": "#/$defs/point"}, {"type": "null"}]},
                },
            },
        },
    },
    "$defs": {
        "width": {"oneOf": [{"type": "integer"}, {"const": "inf"}, {"type": "null"}]},
        "point": {
            "oneOf": [
                {"const": "inf"},
                {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            ]
        },
        "point_or_null": {"oneOf": [{"$ref": "#/$defs/point"}, {"type": "null"}]},
    },
}


def export_model(sigma: CombinatorialData, seq: PivotSequence, preds, nu_minus: EndInvariant,
                 nu_plus: EndInvariant) -> dict:
    """The model as a JSON-ready document, blocks in index order."""
    hats = {p.index: p.omega_hat for p in preds}
    blocks = []
    for n in seq.pivots:
        bt = block_torus_param(seq, n, nu_minus, nu_plus)
        tube = None
        if not is_inf_i(bt.tau):
            t = tube_from_boundary(bt.tau)
            tube = {"ell": t.ell, "theta": t.theta, "r": t.r}
        blocks.append({
            "n": n,
            "kind": bt.kind,
            "width": _width(sigma.W.get(n)),
            "tau": _pair(bt.tau),
            "tube": tube,
            "omega_hat": _pair(hats[n]) if n in hats else None,
        })
    return {
        "version": SCHEMA_VERSION,
        "meta": {
            "case": seq.case,
            "alpha_minus": str(seq.alpha_minus),
            "alpha_plus": str(seq.alpha_plus),
            "slopes": {str(n): str(s) for n, s in seq.pivots.items()},
        },
        "sigma": {
            "W": [[n, _width(w)] for n, w in sorted(sigma.W.items())],
            "v_plus": _pair(sigma.v_plus),
            "v_minus": _pair(sigma.v_minus),
        },
        "blocks": blocks,
    }


def dumps(doc: dict) -> str:
    """Deterministic serialization."""
    return json.dumps(doc, sort_keys=True, indent=2)


def parse_model(doc) -> dict:
    """Parse a document (text or dict), checking the structural essentials."""
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    if doc.get("version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported model version {doc.get('version')!r}")
    for key in ("sigma", "blocks"):
        if key not in doc:
            raise ValueError(f"missing {key!r}")
    ns = [b["n"] for b in doc["blocks"]]
    if ns != sorted(ns):
        raise ValueError("blocks out of order")
    return doc


__all__ = [
    "BlockTorusParam", "CombinatorialData", "SCHEMA", "SCHEMA_VERSION", "TubeShape", "TubeSolveError",
    "block_kind", "block_torus_param", "boundary_param_forward", "combinatorial_data", "dumps",
    "export_model", "parse_model", "tube_from_boundary", "unit_radius",
]
