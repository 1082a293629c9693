from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from pisotfield.poly import (
    IntPolynomial,
    count_real_roots,
    dickson_transform,
    poly_gcd,
    real_sign_of_root,
    repeated_part,
    resultant,
    squarefree_part,
    unit_circle_roots,
)

P = IntPolynomial


def test_arithmetic_and_printing():
    x = P.x()
    p = x * x - 2
    assert p.coeffs == (-2, 0, 1)
    assert str(p) == "x^2 - 2"
    assert (p * p).degree == 4
    assert p(Fraction(3, 2)) == Fraction(1, 4)
    assert p.derivative().coeffs == (0, 2)
    assert P((0, 0, 0)).is_zero()


def test_non_integer_coefficient_rejected():
    with pytest.raises(ValueError):
        P([Fraction(1, 2), 1])


def test_gcd_and_squarefree():
    x = P.x()
    a = (x - 1) * (x - 1) * (x + 2)
    assert poly_gcd(a, a.derivative()).coeffs == (-1, 1)
    assert squarefree_part(a) == ((x - 1) * (x + 2)).primitive()
    assert repeated_part(a).coeffs == (-1, 1)


def test_sturm_counts():
    p = P((-1, -3, 0, 1))  # three real roots near -1.53, -0.35, 1.88
    assert count_real_roots(p) == 3
    assert count_real_roots(p, 0, None) == 1
    assert count_real_roots(p, -1, 0) == 1
    assert count_real_roots(P((-1, -1, 0, 1))) == 1


def test_real_sign_of_root():
    p = P((-2, 0, 1))
    assert real_sign_of_root(p, 1, 2, Fraction(7, 5)) == 1
    assert real_sign_of_root(p, 1, 2, Fraction(3, 2)) == -1
    with pytest.raises(ValueError):
        real_sign_of_root(p, -2, 2, 0)


def test_discriminant_by_resultant():
    # disc = (-1)^(d(d-1)/2) Res(f, f')
    assert resultant(P((-2, 0, 1)), P((0, 2))) * -1 == 8
    assert resultant(P((-1, -1, 0, 1)), P((-1, 0, 3))) * -1 == -23
    assert resultant(P((-1, -3, 0, 1)), P((-3, 0, 3))) * -1 == 81


def test_scale_and_shift():
    p = P((-2, 0, 1))
    assert p.scale_roots(2).coeffs == (-1, 0, 2)  # roots +-sqrt(2)/2
    assert p.shift(1).coeffs == (-1, 2, 1)  # roots +-sqrt(2) - 1


def test_unit_circle_detection():
    assert unit_circle_roots(P((1, 1, 1)))[0] == 2  # primitive cube roots of unity
    assert unit_circle_roots(P((-1, 0, 0, 1)))[0] == 3
    assert unit_circle_roots(P((1, -4, 1)))[0] == 0  # reciprocal, real roots 2 +- sqrt 3
    assert unit_circle_roots(P((-1, -1, 1)))[0] == 0
    # Salem polynomial of Lehmer: 8 roots on the circle
    lehmer = P((1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1))
    assert unit_circle_roots(lehmer)[0] == 8


def test_dickson_transform_palindrome():
    h = P((1, 3, 1))  # z + 1/z + 3
    assert dickson_transform(h).coeffs == (3, 1)


coeff_lists = st.lists(st.integers(-6, 6), min_size=2, max_size=7).filter(lambda c: c[-1] != 0)


@settings(max_examples=150, deadline=None)
@given(coeff_lists)
def test_real_root_count_matches_numpy(coeffs):
    p = P(coeffs)
    roots = np.roots(coeffs[::-1])
    assume(len(roots) == p.degree)
    sq = squarefree_part(p)
    distinct = np.roots(list(reversed(sq.coeffs)))
    imag = np.abs(distinct.imag)
    assume(np.all((imag < 1e-12) | (imag > 1e-6)))
    assert count_real_roots(p) == int(np.sum(imag < 1e-12))


@settings(max_examples=100, deadline=None)
@given(coeff_lists, coeff_lists)
def test_gcd_divides_both(a, b):
    pa, pb = P(a), P(b)
    g = poly_gcd(pa, pb)
    from pisotfield.poly import pseudo_divmod

    assert pseudo_divmod(pa, g)[1].is_zero()
    assert pseudo_divmod(pb, g)[1].is_zero()
