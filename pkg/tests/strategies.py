"""Shared hypothesis strategies."""

from fractions import Fraction

from hypothesis import strategies as st

from pivotkit.farey import INF, Slope
from pivotkit.halfplane import EndInvariant
from pivotkit.surd import QuadSurd

SQUAREFREE = [2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19, 21]

fractions = st.builds(Fraction, st.integers(-200, 200), st.integers(1, 60))
finite_slopes = fractions.map(Slope.from_fraction)
slopes = st.one_of(st.just(INF), finite_slopes)


interior_invariants = st.builds(
    EndInvariant.interior,
    st.builds(Fraction, st.integers(-400, 400), st.integers(1, 40)),
    st.builds(Fraction, st.integers(1, 400), st.integers(1, 80)),
)
rational_invariants = st.builds(
    EndInvariant.rational,
    st.one_of(st.just(INF), st.builds(Fraction, st.integers(-60, 60), st.integers(1, 30)).map(Slope.from_fraction)),
)
surd_invariants = st.builds(
    lambda r, s, d: EndInvariant.irrational(QuadSurd(r, s, d)),
    st.builds(Fraction, st.integers(-20, 20), st.integers(1, 5)),
    st.builds(Fraction, st.integers(1, 9), st.integers(1, 5)).flatmap(lambda v: st.sampled_from([v, -v])),
    st.sampled_from(SQUAREFREE),
)
end_invariants = st.one_of(interior_invariants, rational_invariants, surd_invariants)
