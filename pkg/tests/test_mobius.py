import cmath
import math
import random

import mpmath
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize

from pivotkit.mobius import (
    INF_I, PARABOLIC, ComplexLength, MoebiusC, axis_complex_distance, canonical_distance, commutator,
    complex_length, diagonal, fixed_points, is_inf_i, lambda_distance, lambda_from_omega, omega,
    omega_distance, sinh2_distance,
)

L0 = 4 * math.asinh(0.5)

traces = st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False).filter(
    lambda t: abs(t - 2) > 1e-3 and abs(t + 2) > 1e-3 and not (abs(t.imag) < 1e-9 and abs(t.real) < 2.001)
)
lambdas = st.builds(ComplexLength, st.floats(1e-3, 10), st.floats(-math.pi, math.pi).filter(lambda t: t > -math.pi))


def with_axis(p, q, lam):
    """Loxodromic with fixed points p (repelling-ish) and q and complex length lam."""
    s = cmath.sqrt(q - p)
    g = MoebiusC(q / s, p / s, 1 / s, 1 / s)
    return g @ diagonal(lam) @ g.inverse()


def test_complex_length_frozen():
    lam = complex_length(3)
    assert lam.ell == pytest.approx(L0, rel=1e-15) and lam.theta == 0
    assert complex_length(2) == PARABOLIC and complex_length(-2) == PARABOLIC
    lam = complex_length(2j)
    assert lam.ell == pytest.approx(2 * math.log(1 + math.sqrt(2)), rel=1e-14)
    assert lam.theta == pytest.approx(math.pi, rel=1e-14)


def test_complex_length_rejects_elliptic():
    with pytest.raises(ValueError):
        complex_length(1)
    with pytest.raises(ValueError):
        ComplexLength(0, 0.5)
    with pytest.raises(ValueError):
        ComplexLength(1, -math.pi)


def test_omega_frozen():
    assert omega(ComplexLength(2 * math.pi, 0)) == pytest.approx(1j)
    assert omega(ComplexLength(math.pi, math.pi)) == pytest.approx(1 + 1j)
    assert is_inf_i(omega(PARABOLIC))
    assert lambda_from_omega(INF_I) == PARABOLIC


def test_omega_distance_frozen():
    assert omega_distance(1j, 1j) == 0
    assert omega_distance(1j, 2j) == pytest.approx(math.log(2), abs=1e-15)
    assert omega_distance(1j, INF_I) == math.inf
    assert omega_distance(INF_I, INF_I) == 0


def test_high_precision_length():
    with mpmath.workprec(200):
        lam = complex_length(mpmath.mpf(3), bits=200)
        assert abs(lam.ell - 4 * mpmath.asinh(mpmath.mpf(1) / 2)) < mpmath.mpf(2) ** -190


@given(traces)
def test_length_projective_invariance(t):
    assert complex_length(t) == complex_length(-t)


@given(traces)
def test_length_solves_trace_equation(t):
    lam = complex_length(t)
    val = 2 * cmath.cosh(complex(lam) / 2)
    assert min(abs(val - t), abs(val + t)) <= 1e-9 * max(1, abs(t))


@given(lambdas)
def test_omega_round_trip(lam):
    back = lambda_from_omega(omega(lam))
    diff = complex(back) - complex(lam)
    # complex lengths live modulo 2*pi*i; theta = -pi + tiny may come back as pi - tiny
    diff = complex(diff.real, math.remainder(diff.imag, 2 * math.pi))
    assert abs(diff) <= 1e-12 * abs(complex(lam))


@given(lambdas)
def test_omega_region(lam):
    w = omega(lam)
    assert abs(w - 1) >= 1 - 1e-12 and abs(w + 1) > 1 - 1e-12


@given(lambdas, lambdas)
def test_omega_map_is_isometry(l1, l2):
    d1 = omega_distance(omega(l1), omega(l2))
    d2 = lambda_distance(l1, l2)
    assert d1 == pytest.approx(d2, rel=1e-9, abs=1e-12)


def test_fixed_points_frozen():
    fp = fixed_points(diagonal(ComplexLength(1.0, 0.3)))
    assert len(fp) == 2 and sum(cmath.isinf(p) for p in fp) == 1 and 0 in fp
    assert len(fixed_points(MoebiusC(1, 1, 0, 1))) == 1
    with pytest.raises(ValueError):
        fixed_points(MoebiusC(1, 0, 0, 1))


@given(st.complex_numbers(max_magnitude=5), st.complex_numbers(max_magnitude=5), lambdas)
def test_fixed_points_equivariant(p, q, lam):
    if abs(p - q) < 0.1:
        return
    fp = fixed_points(with_axis(p, q, lam))
    assert len(fp) == 2
    assert max(min(abs(f - p), abs(f - q)) for f in fp) < 1e-7 * (1 + abs(p) + abs(q))


def test_determinant_enforced():
    with pytest.raises(ValueError):
        MoebiusC(1, 1, 1, 1)


def _geodesic_distance_oracle(p, q):
    """Numerically minimize the H^3 distance between the geodesic {0, inf} and the geodesic {p, q}."""
    c, r = (p + q) / 2, abs(p - q) / 2
    u = (q - p) / abs(q - p)

    def cosh_d(v):
        t, s = math.exp(v[0]), v[1]  # point (0, 0, t) and the point at angle s on the other semicircle
        x = c + r * math.cos(s) * u
        h = r * math.sin(s)
        return 1 + (abs(x) ** 2 + (t - h) ** 2) / (2 * t * h)

    best = min(
        (minimize(cosh_d, [math.log(r), s0], method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15})
         for s0 in (0.3, 1.5, 2.8)),
        key=lambda res: res.fun,
    )
    return math.acosh(best.fun)


@pytest.mark.parametrize("p, q", [(2, 3), (-1 + 1j, 2 - 1j), (0.5j, 4 + 4j)])
def test_axis_distance_matches_numeric_oracle(p, q):
    m1 = diagonal(ComplexLength(1.3, 0.4))
    m2 = with_axis(p, q, ComplexLength(0.7, -1.1))
    delta = axis_complex_distance(m1, m2)
    assert delta.real == pytest.approx(_geodesic_distance_oracle(p, q), abs=1e-8)


def test_axis_distance_grows_with_translation():
    m1 = diagonal(ComplexLength(1.0, 0.0))
    vals = [axis_complex_distance(m1, with_axis(k + 1, k + 2, ComplexLength(1.0, 0.0))).real for k in (10, 100, 1000)]
    assert vals[0] < vals[1] < vals[2]
    assert vals[2] - vals[1] == pytest.approx(math.log(10), abs=0.05)


def test_perpendicular_axes():
    delta = axis_complex_distance(diagonal(ComplexLength(1.0, 0.0)), with_axis(1, -1, ComplexLength(0.5, 0.2)))
    assert abs(delta.real) < 1e-8 and abs(delta.imag) == pytest.approx(math.pi / 2, abs=1e-8)


def test_shared_endpoint_is_degenerate():
    with pytest.raises(ValueError):
        axis_complex_distance(diagonal(ComplexLength(1.0, 0.0)), with_axis(0, 5, ComplexLength(1.0, 0.0)))


def test_sinh2_conjugation_invariant():
    rng = random.Random(3)
    worst = 0.0
    for _ in range(1000):
        m1 = with_axis(complex(rng.uniform(-3, 3), rng.uniform(-3, 3)), complex(rng.uniform(-3, 3), 5), ComplexLength(1.0, 0.2))
        m2 = with_axis(complex(rng.uniform(-3, 3), -5), complex(rng.uniform(4, 6), 0), ComplexLength(0.6, -0.4))
        a, b, c = (complex(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(3))
        g = MoebiusC.normalized(a, b, c, (1 + b * c) / a + 0.5)
        base = sinh2_distance(m1, m2)
        conj = sinh2_distance(g @ m1 @ g.inverse(), g @ m2 @ g.inverse())
        worst = max(worst, abs(conj - base) / abs(base))
    assert worst < 1e-9


def test_canonical_distance_representative():
    d = canonical_distance(complex(-1.0, 2.0))
    assert d.real >= 0 and -math.pi / 2 < d.imag <= math.pi / 2
    assert cmath.cosh(2 * d) == pytest.approx(cmath.cosh(complex(-2.0, 4.0)))


def test_commutator_of_modular_generators():
    A = MoebiusC(2, 1, 1, 1)
    B = MoebiusC(2, -1, -1, 1)
    # traces 3, 3 and tr AB = 3 form the modular Markov triple, so the commutator trace is -2
    assert (A @ B).trace == 3
    assert commutator(A, B).trace == pytest.approx(-2)
