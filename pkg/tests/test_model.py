import json
import math
from fractions import Fraction

import jsonschema
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from pivotkit.farey import INF, Slope, apply, normalize_at
from pivotkit.halfplane import EndInvariant, UHPoint, parse_end_invariant
from pivotkit.mobius import INF_I, is_inf_i
from pivotkit.model import (
    SCHEMA, BlockTorusParam, CombinatorialData, TubeShape, TubeSolveError, block_kind, block_torus_param,
    boundary_param_forward, combinatorial_data, dumps, export_model, parse_model, tube_from_boundary,
    unit_radius,
)
from pivotkit.pivot import DiagonalInput, pivot_sequence, predict
from pivotkit.surd import QuadSurd

from strategies import end_invariants, interior_invariants

F = Fraction
S = Slope
GOLDEN = EndInvariant.irrational(QuadSurd(F(1, 2), F(1, 2), 5))
GOLDEN_CONJ = EndInvariant.irrational(QuadSurd(F(1, 2), F(-1, 2), 5))


def build(a, b, window=4):
    seq = pivot_sequence(a, b, window)
    return seq, combinatorial_data(seq, a, b)


# -- the pullback-metric oracle for tube boundaries ---------------------------------------


def _embed(t, phi, r):
    """Point at distance r from the vertical axis over 0 in upper half-space, height parameter t."""
    h = math.exp(t) / math.cosh(r)
    rho = math.exp(t) * math.tanh(r)
    return np.array([rho * math.cos(phi), rho * math.sin(phi), h])


def _gram(t, phi, r, eps=1e-6):
    p = _embed(t, phi, r)
    dt = (_embed(t + eps, phi, r) - _embed(t - eps, phi, r)) / (2 * eps)
    dp = (_embed(t, phi + eps, r) - _embed(t, phi - eps, r)) / (2 * eps)
    J = np.stack([dt, dp], axis=1)
    return J.T @ J / p[2] ** 2


def oracle_boundary_param(ell, theta, r):
    """Flat structure of the radius-r equidistant torus by numerically pulling back the hyperbolic metric.

    The loxodromic z -> e^(ell + i theta) z identifies (t, phi) with (t + ell, phi + theta); the
    meridian is phi -> phi + 2 pi.  Returns (tau, longitude length).
    """
    G = _gram(0.3, 0.7, r)
    mer, lon = np.array([0.0, 2 * math.pi]), np.array([ell, theta])
    ll = lon @ G @ lon
    area = math.sqrt(np.linalg.det(G)) * abs(lon[0] * mer[1] - lon[1] * mer[0])
    return complex((mer @ G @ lon) / ll, area / ll), math.sqrt(ll)


@pytest.mark.parametrize("ell, theta, r", [(0.3, 0.0, 1.0), (0.05, 1.2, 2.5), (0.8, -2.9, 0.4), (1.5, 3.0, 0.1)])
def test_forward_formula_matches_pullback_metric(ell, theta, r):
    tau, _ = oracle_boundary_param(ell, theta, r)
    assert boundary_param_forward(TubeShape(ell, theta, r)) == pytest.approx(tau, rel=1e-8)


@pytest.mark.parametrize("ell, theta", [(0.3, 0.0), (0.05, 1.2), (0.8, -2.9), (0.999, 3.1)])
def test_unit_radius_gives_unit_longitude(ell, theta):
    _, length = oracle_boundary_param(ell, theta, unit_radius(ell, theta))
    assert length == pytest.approx(1, rel=1e-8)


def test_unit_radius_domain():
    for ell in (0, 1, 1.5):
        with pytest.raises(TubeSolveError):
            unit_radius(ell, 0.2)


def _grid():
    ells = np.linspace(1e-4, 0.999, 20)
    thetas = np.linspace(-math.pi, math.pi, 21)[1:]  # (-pi, pi]
    return [(float(a), float(b)) for a in ells for b in thetas]


def test_tube_round_trip_grid():
    worst = 0.0
    for ell, theta in _grid():
        shape = TubeShape(ell, theta, unit_radius(ell, theta))
        back = tube_from_boundary(boundary_param_forward(shape))
        worst = max(worst, abs(back.ell - ell), abs(back.theta - theta), abs(back.r - shape.r) / max(1, shape.r))
    assert worst < 1e-9


@given(st.floats(-50, 50), st.floats(0.1, 100))
def test_reverse_round_trip_on_tau(x, y):
    tau = complex(x, y)
    try:
        shape = tube_from_boundary(tau)
    except TubeSolveError:
        assume(False)
    assert boundary_param_forward(shape) == pytest.approx(tau, rel=1e-9, abs=1e-9)


def test_tube_symmetry_and_trend():
    assert tube_from_boundary(UHPoint(0, 5)).theta == 0
    t10, t100 = tube_from_boundary(UHPoint(0, 10)), tube_from_boundary(UHPoint(0, 100))
    assert t100.ell < t10.ell and t100.r > t10.r
    with pytest.raises(TubeSolveError):
        tube_from_boundary(complex(1, -1))


def test_tube_prediction_close_to_tau_for_large_widths():
    dists = []
    for w in (2, 8, 32):
        tau = complex(w, 2)
        t = tube_from_boundary(tau)
        omega = 2j * math.pi / complex(t.ell, t.theta)
        dists.append(2 * math.asinh(abs(omega - tau) / (2 * math.sqrt(omega.imag * tau.imag))))
    assert dists[0] > dists[1] > dists[2]


# -- block tori ------------------------------------------------------------------------


def test_internal_blocks_are_exact():
    seq, _ = build(GOLDEN, GOLDEN_CONJ, window=5)
    for n in seq.internal_indices:
        bt = block_torus_param(seq, n, GOLDEN, GOLDEN_CONJ)
        assert bt.kind == "Internal"
        assert bt.tau == UHPoint(seq.widths[n], 2)
        assert type(bt.tau.x) is int and bt.tau.y == 2


def test_parabolic_end_gives_inf():
    nu_m, nu_p = EndInvariant.interior(0, 2), EndInvariant.rational(S(2, 5))
    seq, sigma = build(nu_m, nu_p)
    last = seq.indices[-1]
    assert block_kind(seq, last, nu_m, nu_p) == "Parabolic"
    assert is_inf_i(block_torus_param(seq, last, nu_m, nu_p).tau)
    assert sigma.v_plus is INF_I


def test_bi_infinite_has_no_boundary_data():
    _, sigma = build(GOLDEN, GOLDEN_CONJ)
    assert sigma.v_plus is None and sigma.v_minus is None


def _annulus_sum(seq, n, nu_m, nu_p):
    """Independent four-annulus assembly for a boundary block."""
    kind = seq.kind(n)
    m = normalize_at(seq.pivots[n])
    t0 = F(1, 4) if kind == "plus" else F(0)
    t1 = F(3, 4) if kind == "minus" else F(1)
    sides = 2 * complex(0, t1 - t0)
    if kind == "minus":
        top = complex(apply(m, seq.pivots[n + 1]).p, 0.5)
    else:
        p = nu_p.image(m)
        top = complex(float(p.x), float(p.y) - 0.5)
    if kind == "plus":
        bottom = complex(-apply(m, seq.pivots[n - 1]).p, 0.5)
    else:
        q = nu_m.image(m)
        bottom = complex(-float(q.x), float(q.y) - 0.5)
    return top + bottom + sides


@settings(max_examples=60, deadline=None)
@given(interior_invariants, interior_invariants)
def test_boundary_blocks_match_annulus_sum(a, b):
    try:
        seq, sigma = build(a, b)
    except DiagonalInput:
        assume(False)
    for n in (seq.boundary_minus, seq.boundary_plus):
        bt = block_torus_param(seq, n, a, b)
        assert complex(bt.tau) == pytest.approx(_annulus_sum(seq, n, a, b), abs=1e-9)


@settings(max_examples=80, deadline=None)
@given(interior_invariants, interior_invariants)
def test_defining_relations_exact(a, b):
    try:
        seq, sigma = build(a, b)
    except DiagonalInput:
        assume(False)
    bp, bm = seq.boundary_plus, seq.boundary_minus
    if bp == bm:
        m = normalize_at(seq.pivots[bp])
        lp, lm = b.image(m), a.image(m)
        w = sigma.W[bp]
        assert w + sigma.v_plus.x + sigma.v_minus.x == lp.x - lm.x
        assert (sigma.v_plus.y, sigma.v_minus.y) == (lp.y, lm.y)
    else:
        m = normalize_at(seq.pivots[bp])
        prev = apply(m, seq.pivots[bp - 1]).p
        lp = b.image(m)
        assert sigma.W[bp] + sigma.v_plus.x == lp.x - prev and sigma.v_plus.y == lp.y
        m = normalize_at(seq.pivots[bm])
        nxt = apply(m, seq.pivots[bm + 1]).p
        lm = a.image(m)
        assert sigma.W[bm] + sigma.v_minus.x == nxt - lm.x and sigma.v_minus.y == lm.y
    for v in (sigma.v_plus, sigma.v_minus):
        assert abs(v.x) <= 1


def test_combinatorial_data_validation():
    with pytest.raises(ValueError):
        CombinatorialData({0: 1, 2: 1})
    with pytest.raises(ValueError):
        CombinatorialData({0: 1}, v_plus=UHPoint(F(3, 2), 1))
    CombinatorialData({0: 1, 1: math.inf})


def test_combinatorial_data_deterministic():
    a, b = EndInvariant.interior(F(1, 3), F(1, 10)), EndInvariant.interior(5, 1)
    assert build(a, b)[1] == build(a, b)[1]


# -- export -------------------------------------------------------------------------------


def _doc(a, b, window=4):
    seq = pivot_sequence(a, b, window)
    return export_model(combinatorial_data(seq, a, b), seq, predict(seq, a, b), a, b)


@pytest.mark.parametrize("a, b", [
    (GOLDEN, GOLDEN_CONJ),
    (EndInvariant.interior(F(1, 3), F(1, 10)), EndInvariant.interior(5, 1)),
    (EndInvariant.interior(0, 2), EndInvariant.rational(S(2, 5))),
    (EndInvariant.interior(0, 2), EndInvariant.interior(F(1, 1000), 2)),
    (EndInvariant.rational(INF), parse_end_invariant("[0;2,3,2,3,5,7]")),
])
def test_export_validates_against_schema(a, b):
    doc = _doc(a, b)
    jsonschema.validate(doc, SCHEMA)
    jsonschema.Draft202012Validator.check_schema(SCHEMA)
    assert parse_model(dumps(doc)) == json.loads(dumps(doc))


def test_export_block_counts():
    empty = _doc(EndInvariant.interior(0, 2), EndInvariant.interior(F(1, 1000), 2))
    assert len(empty["blocks"]) == 1 and empty["blocks"][0]["kind"] == "DoubleBoundary"
    doc = _doc(GOLDEN, GOLDEN_CONJ, window=3)
    assert len(doc["blocks"]) == 6
    assert all(blk["tau"] == [blk["width"], 2.0] for blk in doc["blocks"])


def test_dumps_is_deterministic():
    a, b = EndInvariant.interior(F(1, 3), F(1, 10)), EndInvariant.interior(5, 1)
    assert dumps(_doc(a, b)) == dumps(_doc(a, b))


def test_parse_model_rejects_bad_documents():
    with pytest.raises(ValueError):
        parse_model({"version": 99, "sigma": {}, "blocks": []})
    with pytest.raises(ValueError):
        parse_model({"version": 1, "blocks": []})
