import math
import random

import pytest

from pivotkit.farey import INF, Slope
from pivotkit.markov import MarkovTriple, build_matrices
from pivotkit.verify import (
    PaperConstants, constants_suite, fuchsian_samples, fuchsian_suite, identity_suite, maskit_scenario,
    modular_scenario, monodromy_scenario, pair_identities, parse_scenario, pivot_suite, random_markov,
    short_curve_analysis,
)


def test_constants_frozen():
    k = PaperConstants()
    assert k.L0 == pytest.approx(1.9248473002384139, abs=1e-15)
    assert k.h0 == pytest.approx(math.log(5), abs=1e-14)
    assert k.D2 == pytest.approx(4.624106636746282, abs=1e-14)
    assert math.sinh(k.L0 / 2) == pytest.approx(math.cosh(k.L0 / 4), abs=1e-14)
    assert constants_suite().passed


def test_constants_are_configurable():
    k = PaperConstants(eps=0.1, c1=3.0, c2=1.0)
    assert (k.eps, k.c1, k.c2, k.c3) == (0.1, 3.0, 1.0, None)


def test_identity_suite_small():
    rep = identity_suite(n=200, seed=3)
    assert rep.passed, rep.to_json()
    assert rep.cases + rep.skipped == 400


def test_identity_suite_high_precision():
    assert identity_suite(n=20, seed=1, bits=200).passed


def test_pair_identities_on_markov_triple():
    A, B = build_matrices(MarkovTriple(3.0, 3.0, 3.0))
    r = pair_identities(A, B)
    assert r["commutator_trace"] == pytest.approx(-2)
    assert r["sinh2_delta"] * r["sinh2_mu"] * r["sinh2_tau"] == pytest.approx(-1)


def test_random_markov_is_markov():
    rng = random.Random(7)
    for _ in range(50):
        t = random_markov(rng)
        assert abs(t.x ** 2 + t.y ** 2 + t.z ** 2 - t.x * t.y * t.z) <= 1e-9 * max(1, abs(t.x * t.y * t.z))


def test_fuchsian_samples_deterministic_and_real():
    a, b = fuchsian_samples(30, seed=5), fuchsian_samples(30, seed=5)
    assert a == b and len(a) == 30
    assert all(abs(complex(v).imag) < 1e-12 for t in a for v in (t.x, t.y, t.z))


def test_modular_short_curves():
    res = short_curve_analysis(MarkovTriple(3.0, 3.0, 3.0), depth=8)
    assert set(res["short"]) == {Slope(0, 1), Slope(1, 1), INF}
    assert res["min_length"] == pytest.approx(PaperConstants().L0, abs=1e-12)
    assert res["connectivity"] == "connected"


def test_fuchsian_suite_small():
    rep = fuchsian_suite(samples=20, depth=10)
    assert rep.passed, rep.to_json()
    assert rep.cases == 20


@pytest.mark.parametrize("scenario", [modular_scenario, maskit_scenario, monodromy_scenario])
def test_pivot_scenarios(scenario):
    rep = pivot_suite(scenario())
    assert rep.passed, [c for c in rep.checks if not c.passed]
    doc = rep.to_json()
    assert set(doc) == {"suite", "cases", "skipped", "passed", "checks", "derived"}


def test_maskit_pinched_slope_is_parabolic():
    rep = pivot_suite(maskit_scenario())
    check = next(c for c in rep.checks if c.name == "pinched_slope_parabolic")
    assert check.passed


def test_parse_scenario():
    assert parse_scenario("modular").name == "modular"
    assert parse_scenario("maskit=3+0.5i").pinched == INF
    assert parse_scenario("fuchsian=3,4").surrogate
    with pytest.raises(ValueError):
        parse_scenario("nonsense")
