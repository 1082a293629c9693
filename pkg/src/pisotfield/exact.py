"""Small exact linear algebra over Z and Q (Bareiss determinant, inverses)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def int_det(rows: Sequence[Sequence[int]]) -> int:
    """Fraction-free Bareiss determinant of an integer matrix."""
    m = [list(map(int, r)) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def frac_det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    den = 1
    for r in rows:
        for v in r:
            den = den * Fraction(v).denominator // _gcd(den, Fraction(v).denominator)
    scaled = [[int(Fraction(v) * den) for v in r] for r in rows]
    return Fraction(int_det(scaled), den ** len(rows))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def frac_inverse(rows: Sequence[Sequence[Fraction]]) -> Matrix:
    """Gauss-Jordan inverse; raises ZeroDivisionError when singular."""
    n = len(rows)
    aug = [[Fraction(v) for v in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    return [r[n:] for r in aug]


def vec_mat(v: Sequence, m: Sequence[Sequence]) -> list:
    """Row vector times matrix."""
    cols = len(m[0]) if m else 0
    return [sum((v[i] * m[i][j] for i in range(len(v))), 0) for j in range(cols)]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    return [vec_mat(row, b) for row in a]


class IncrementalBasis:
    """Row-echelon accumulator detecting the first linearly dependent vector.

    ``add(v)`` returns None while the vectors stay independent, otherwise the
    coefficients c with v = sum c_i * v_i over the vectors added so far.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: list[tuple[int, list[Fraction], list[Fraction]]] = []
        self.count = 0

    def add(self, v: Sequence) -> list[Fraction] | None:
        w = [Fraction(x) for x in v]
        combo = [Fraction(0)] * (self.count + 1)
        combo[self.count] = Fraction(1)
        for pivot, row, rcombo in self.rows:
            f = w[pivot]
            if f:
                w = [a - f * b for a, b in zip(w, row)]
                for k, c in enumerate(rcombo):
                    combo[k] -= f * c
        piv = next((i for i, x in enumerate(w) if x != 0), None)
        if piv is None:
            # 0 = combo . (v_0..v_count)  =>  v_count = -sum combo_k v_k
            return [-c for c in combo[:-1]]
        inv = 1 / w[piv]
        w = [x * inv for x in w]
        combo = [c * inv for c in combo]
        self.rows.append((piv, w, combo))
        self.count += 1
        return None
