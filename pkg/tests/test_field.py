import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pisotfield.errors import InvalidFieldSpec
from pisotfield.field import (
    OrderElement,
    build_field,
    compare_modulus_at_place,
    element_mul,
    element_pow,
    embed,
    is_generator,
    load_field,
    min_poly,
    mult_matrix,
    norm,
    parse_coords,
    parse_field_spec,
    sign_at_place,
    trace,
)
from pisotfield.poly import IntPolynomial, resultant

E = OrderElement


def test_parse_defaults_to_power_basis():
    spec = parse_field_spec({"poly": [-2, 0, 1]})
    assert spec.defining_poly.coeffs == (-2, 0, 1)
    assert spec.basis_matrix == ((1, 0), (0, 1))
    spec = parse_field_spec(json.dumps({"name": "c", "defining_polynomial": [-1, -1, 0, 1]}))
    assert spec.degree == 3


@pytest.mark.parametrize(
    "doc, field",
    [
        ({"poly": [-2, 0, 2]}, "defining_polynomial"),
        ({"poly": [1, -2, 1]}, "defining_polynomial"),  # (x-1)^2
        ({"poly": [-2, 0, 1], "integral_basis": [[1, 0], [2, 0]]}, "integral_basis"),
        ({"poly": [-2, 0, 1], "integral_basis": [[1, 0], ["1/x", 0]]}, "integral_basis"),
        ("{not json", "document"),
    ],
)
def test_parse_errors_name_the_field(doc, field):
    with pytest.raises(InvalidFieldSpec) as info:
        parse_field_spec(doc)
    assert info.value.field.startswith(field)


def test_build_rejects_bad_fields():
    with pytest.raises(InvalidFieldSpec):
        build_field(parse_field_spec({"poly": [1, 0, 1]}))  # no real embedding
    with pytest.raises(InvalidFieldSpec):
        build_field(parse_field_spec({"poly": [2, 0, -3, 0, 1]}))  # (x^2-1)(x^2-2)
    with pytest.raises(InvalidFieldSpec):
        # Z[sqrt2/2] is not closed under multiplication
        build_field(parse_field_spec({"poly": [-2, 0, 1], "integral_basis": [[1, 0], [0, "1/2"]]}))


@pytest.mark.parametrize(
    "name, d, sig, disc",
    [("q2", 2, (2, 0), 8), ("cubic-x-1", 3, (1, 1), -23), ("cubic-3x-1", 3, (3, 0), 81), ("q5", 2, (2, 0), 5), ("rationals", 1, (1, 0), 1)],
)
def test_field_invariants(fields, name, d, sig, disc):
    f = fields[name]
    assert (f.degree, f.signature, f.discriminant) == (d, sig, disc)
    s, t = f.signature
    assert s >= 1 and s + 2 * t == d


@pytest.mark.parametrize("name", ["q2", "q3", "cubic-x-1", "cubic-3x-1"])
def test_discriminant_matches_resultant(fields, name):
    f = fields[name]
    p = f.spec.defining_poly
    d = p.degree
    assert (-1) ** (d * (d - 1) // 2) * resultant(p, p.derivative()) == f.discriminant


def test_products(q2, cubic):
    assert element_mul(q2, E((1, 1)), E((1, 1))) == E((3, 2))
    assert element_mul(q2, E((0, 1)), E((0, 1))) == E((2, 0))
    assert element_mul(cubic, E((0, 1, 0)), E((0, 0, 1))) == E((1, 1, 0))
    assert element_pow(q2, E((1, 1)), 3) == E((7, 5))


def test_embeddings(q2, cubic):
    a, b = embed(q2, E((1, 1)), 128)
    assert abs(float(a.center.real) - 2.41421356237) < 1e-10
    assert abs(float(b.center.real) + 0.41421356237) < 1e-10
    assert float(a.radius) < 2.0**-50 and float(b.radius) < 2.0**-50
    one = embed(q2, E((1, 0)))
    assert all(v.contains(1) for v in one)
    r, z = embed(cubic, E((0, 1, 0)))
    assert abs(float(r.center.real) - 1.3247180) < 1e-7
    assert abs(complex(z.center) - complex(-0.6623590, 0.5622795)) < 1e-7


def test_min_poly_examples(q2, cubic, totally_real_cubic):
    assert min_poly(q2, E((1, 1))).coeffs == (-1, -2, 1)
    assert min_poly(q2, E((3, 0))).coeffs == (-3, 1)
    assert min_poly(cubic, E((0, 1, 0))).coeffs == (-1, -1, 0, 1)
    assert is_generator(q2, E((1, 1)))
    assert not is_generator(q2, E((5, 0)))
    assert is_generator(totally_real_cubic, E((0, 1, 0)))


def test_half_integral_basis(fields):
    q5 = fields["q5"]
    golden = E((0, 1))
    assert min_poly(q5, golden).coeffs == (-1, -1, 1)
    assert norm(q5, golden) == -1
    assert trace(q5, golden) == 1


def test_exact_decisions_on_boundaries(q2):
    assert sign_at_place(q2, E((1, 1)), 1, 0) == -1
    assert sign_at_place(q2, E((2, 0)), 1, 2) == 0
    assert compare_modulus_at_place(q2, E((2, 0)), 1, 2) == 0
    # 3 - 2 sqrt2 vs the rational 17/100 (value 0.1716)
    assert sign_at_place(q2, E((3, 2)), 1, Fraction(17, 100)) == 1


def test_parse_coords():
    assert parse_coords("1, -2", 2) == E((1, -2))
    with pytest.raises(InvalidFieldSpec):
        parse_coords("1.5,0", 2)
    with pytest.raises(InvalidFieldSpec):
        parse_coords("1,2,3", 2)


def test_spec_digest_is_stable():
    a = parse_field_spec({"poly": [-2, 0, 1], "name": "a"})
    b = parse_field_spec({"defining_polynomial": [-2, 0, 1], "name": "a"})
    assert a.digest() == b.digest()


coords3 = st.tuples(*[st.integers(-20, 20)] * 3)


@settings(max_examples=60, deadline=None)
@given(coords3, coords3)
def test_embedding_is_multiplicative(cubic, x, y):
    x, y = E(x), E(y)
    lhs = embed(cubic, element_mul(cubic, x, y))
    ex, ey = embed(cubic, x), embed(cubic, y)
    for l, a, b in zip(lhs, ex, ey):
        assert l.overlaps(a * b)


def _matrix_poly_is_zero(p: IntPolynomial, m):
    d = len(m)
    acc = [[0] * d for _ in range(d)]
    for c in reversed(p.coeffs):
        acc = [[sum(acc[i][k] * m[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
        for i in range(d):
            acc[i][i] += c
    return all(v == 0 for row in acc for v in row)


@settings(max_examples=60, deadline=None)
@given(coords3)
def test_min_poly_annihilates_and_divides_degree(totally_real_cubic, x):
    f = totally_real_cubic
    x = E(x)
    p = min_poly(f, x)
    assert p.is_monic()
    assert f.degree % p.degree == 0
    assert _matrix_poly_is_zero(p, mult_matrix(f, x))
    assert is_generator(f, x) == (p.degree == f.degree)


@settings(max_examples=40, deadline=None)
@given(st.tuples(st.integers(-50, 50), st.integers(-50, 50)))
def test_quadratic_norm_formula(q2, x):
    a, b = x
    assert norm(q2, E(x)) == a * a - 2 * b * b


def test_load_field_from_path(tmp_path):
    path = tmp_path / "f.json"
    path.write_text(json.dumps({"name": "q3", "defining_polynomial": [-3, 0, 1]}))
    assert load_field(str(path)).discriminant == 12
