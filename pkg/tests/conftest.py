from fractions import Fraction

import pytest

from pisotfield.cli import resolve_spec
from pisotfield.field import load_field

CORPUS = ["q2", "q3", "q6", "q7", "q11", "q5", "cubic-x-1", "cubic-3x-1"]
QUADRATIC_M = [2, 3, 6, 7, 11]


@pytest.fixture(scope="session")
def fields():
    return {name: load_field(resolve_spec(name)) for name in CORPUS + ["rationals"]}


@pytest.fixture(scope="session")
def q2(fields):
    return fields["q2"]


@pytest.fixture(scope="session")
def cubic(fields):
    return fields["cubic-x-1"]


@pytest.fixture(scope="session")
def totally_real_cubic(fields):
    return fields["cubic-3x-1"]


def q_sqrt_sign(a, b, m, q=Fraction(0)):
    """Exact sign of a + b*sqrt(m) - q."""
    u = Fraction(a) - Fraction(q)
    if b == 0:
        return (u > 0) - (u < 0)
    if u >= 0 and b >= 0:
        return 1 if (u or b) else 0
    if u <= 0 and b <= 0:
        return -1
    # opposite signs: compare u^2 with b^2 m
    lhs, rhs = u * u, Fraction(b) ** 2 * m
    if lhs == rhs:
        return 0
    bigger_u = lhs > rhs
    return (1 if u > 0 else -1) if bigger_u else (1 if b > 0 else -1)
