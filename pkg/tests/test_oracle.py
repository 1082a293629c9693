from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pisotfield.field import OrderElement as E
from pisotfield.field import min_poly
from pisotfield.oracle import OracleConfig, brute_force_pisot, independent_min_poly, is_pisot_reference, required_bound
from pisotfield.pisot import enumerate_pisot

Q2_UP_TO_12 = [(1, 1), (2, 1), (2, 2), (3, 2), (4, 3), (5, 3), (5, 4), (6, 4)]


def test_oracle_examples(q2):
    assert [x.coords for x in brute_force_pisot(q2, 12, OracleConfig(coefficient_bound=10))] == Q2_UP_TO_12
    assert brute_force_pisot(q2, 2) == []


def test_insufficient_bound_is_an_error(q2):
    assert required_bound(q2, 12) > 3
    with pytest.raises(ValueError):
        brute_force_pisot(q2, 12, OracleConfig(coefficient_bound=3))
    with pytest.raises(ValueError):
        OracleConfig(coefficient_bound=0)


@pytest.mark.parametrize("name, X", [("q3", 30), ("q6", 30), ("q5", 30), ("cubic-x-1", 8), ("cubic-3x-1", 8), ("rationals", 10)])
def test_oracle_agrees_with_engine(fields, name, X):
    f = fields[name]
    assert [c.element for c in enumerate_pisot(f, X)] == brute_force_pisot(f, X)


@pytest.mark.parametrize(
    "name, coords, poly",
    [("q2", (1, 1), (-1, -2, 1)), ("q2", (0, 1), (-2, 0, 1)), ("cubic-3x-1", (0, 1, 0), (-1, -3, 0, 1)), ("q2", (4, 0), (-4, 1))],
)
def test_independent_min_poly_examples(fields, name, coords, poly):
    assert independent_min_poly(fields[name], E(coords)).coeffs == poly


@settings(max_examples=40, deadline=None)
@given(st.tuples(*[st.integers(-9, 9)] * 3))
def test_independent_min_poly_matches_exact(totally_real_cubic, c):
    f = totally_real_cubic
    assert independent_min_poly(f, E(c)) == min_poly(f, E(c))


@settings(max_examples=40, deadline=None)
@given(st.tuples(*[st.integers(-9, 9)] * 3))
def test_independent_min_poly_complex_field(cubic, c):
    assert independent_min_poly(cubic, E(c)) == min_poly(cubic, E(c))


def test_reference_respects_upper_limit(q2):
    assert is_pisot_reference(q2, E((2, 2)))
    assert not is_pisot_reference(q2, E((2, 2)), X=Fraction(4))
    assert not is_pisot_reference(q2, E((2, 0)))
