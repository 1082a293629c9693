"""Exact integer polynomials: arithmetic, gcd, Sturm sequences and transforms.

All routines stay inside Z[x] by working with primitive pseudo-remainders, so
no rational arithmetic is needed except when evaluating at rational points.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


def _strip(coeffs: Sequence[int]) -> tuple[int, ...]:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial with coefficients in ascending order.

    The zero polynomial has an empty coefficient tuple and degree -1.
    """

    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int]):
        cs = []
        for c in coeffs:
            if isinstance(c, Fraction):
                if c.denominator != 1:
                    raise ValueError(f"non-integer coefficient {c}")
                c = c.numerator
            if not isinstance(c, int):
                raise TypeError(f"coefficient {c!r} is not an integer")
            cs.append(int(c))
        object.__setattr__(self, "coeffs", _strip(cs))

    @classmethod
    def x(cls) -> "IntPolynomial":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return self.leading == 1

    def __getitem__(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __len__(self) -> int:
        return len(self.coeffs)

    def __repr__(self) -> str:
        return f"IntPolynomial({list(self.coeffs)})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if k == 0:
                body = str(a)
            else:
                mono = "x" if k == 1 else f"x^{k}"
                body = mono if a == 1 else f"{a}*{mono}"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(-c for c in self.coeffs)

    def __add__(self, other) -> "IntPolynomial":
        other = _lift(other)
        n = max(len(self), len(other))
        return IntPolynomial(self[k] + other[k] for k in range(n))

    __radd__ = __add__

    def __sub__(self, other) -> "IntPolynomial":
        other = _lift(other)
        n = max(len(self), len(other))
        return IntPolynomial(self[k] - other[k] for k in range(n))

    def __rsub__(self, other) -> "IntPolynomial":
        return _lift(other) - self

    def __mul__(self, other) -> "IntPolynomial":
        if isinstance(other, int):
            return IntPolynomial(c * other for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return IntPolynomial(())
        out = [0] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "IntPolynomial":
        out = IntPolynomial((1,))
        for _ in range(k):
            out = out * self
        return out

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(k * c for k, c in enumerate(self.coeffs) if k)

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = gcd(g, c)
        return g

    def primitive(self) -> "IntPolynomial":
        """Divide by the content and make the leading coefficient positive."""
        if not self.coeffs:
            return self
        g = self.content()
        if self.leading < 0:
            g = -g
        return IntPolynomial(c // g for c in self.coeffs)

    def reciprocal(self) -> "IntPolynomial":
        """x^n p(1/x) for n = deg p (roots z map to 1/z)."""
        return IntPolynomial(reversed(self.coeffs))

    def sign_at(self, x) -> int:
        v = self(x)
        return (v > 0) - (v < 0)

    def sign_at_infinity(self, direction: int) -> int:
        if not self.coeffs:
            return 0
        s = (self.leading > 0) - (self.leading < 0)
        if direction < 0 and self.degree % 2:
            s = -s
        return s

    def scale_roots(self, r: Fraction) -> "IntPolynomial":
        """Integer polynomial whose roots are the roots of self divided by r."""
        r = Fraction(r)
        a, b = r.numerator, r.denominator
        n = self.degree
        return IntPolynomial(
            c * a**k * b ** (n - k) for k, c in enumerate(self.coeffs)
        ).primitive()

    def shift(self, q: Fraction) -> "IntPolynomial":
        """Integer polynomial whose roots are the roots of self minus q."""
        q = Fraction(q)
        n = self.degree
        # p(y + q) with rational coefficients, then clear denominators
        out = [Fraction(0)] * (n + 1)
        binom_row = [1]
        for k, c in enumerate(self.coeffs):
            # (y + q)^k = sum_j C(k, j) q^(k-j) y^j
            if k:
                binom_row = [1] + [binom_row[j - 1] + binom_row[j] for j in range(1, k)] + [1]
            for j in range(k + 1):
                out[j] += c * binom_row[j] * q ** (k - j)
        den = 1
        for v in out:
            den = den * v.denominator // gcd(den, v.denominator)
        return IntPolynomial(int(v * den) for v in out).primitive()


def _lift(v) -> IntPolynomial:
    return IntPolynomial((v,)) if isinstance(v, int) else v


ZERO = IntPolynomial(())
ONE = IntPolynomial((1,))


def pseudo_divmod(a: IntPolynomial, b: IntPolynomial) -> tuple[IntPolynomial, IntPolynomial]:
    """Return (q, r) with |lc(b)|^k * a = q*b + r, k = deg a - deg b + 1.

    Using the absolute value of the leading coefficient keeps the sign of the
    remainder, which Sturm sequences rely on.
    """
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if a.degree < b.degree:
        return ZERO, a
    lc = b.leading
    mult = abs(lc)
    k = a.degree - b.degree + 1
    rem = [c * mult**k for c in a.coeffs]
    quot = [0] * k
    db = b.degree
    for i in range(a.degree - db, -1, -1):
        coef = rem[i + db]
        if coef == 0:
            continue
        if coef % lc:
            raise ArithmeticError("pseudo-division scaling failed")
        qi = coef // lc
        quot[i] = qi
        for j, bc in enumerate(b.coeffs):
            rem[i + j] -= qi * bc
    return IntPolynomial(quot), IntPolynomial(rem)


def exact_divide(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """Exact quotient a / b in Z[x]; raises if b does not divide a."""
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a.coeffs)
    db = b.degree
    if a.degree < db:
        if a.is_zero():
            return ZERO
        raise ArithmeticError(f"{b} does not divide {a}")
    quot = [0] * (a.degree - db + 1)
    for i in range(a.degree - db, -1, -1):
        coef = rem[i + db]
        if coef % b.leading:
            raise ArithmeticError(f"{b} does not divide {a}")
        qi = coef // b.leading
        quot[i] = qi
        for j, bc in enumerate(b.coeffs):
            rem[i + j] -= qi * bc
    if any(rem):
        raise ArithmeticError(f"{b} does not divide {a}")
    return IntPolynomial(quot)


def poly_gcd(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """Primitive gcd over Q, normalized to positive leading coefficient."""
    a, b = a.primitive(), b.primitive()
    while not b.is_zero():
        _, r = pseudo_divmod(a, b)
        a, b = b, r.primitive()
    return a.primitive() if not a.is_zero() else a


def squarefree_part(p: IntPolynomial) -> IntPolynomial:
    g = poly_gcd(p, p.derivative())
    if g.degree <= 0:
        return p.primitive()
    return exact_divide(p.primitive(), g)


def is_squarefree(p: IntPolynomial) -> bool:
    return poly_gcd(p, p.derivative()).degree <= 0


def repeated_part(p: IntPolynomial) -> IntPolynomial:
    """gcd(p, p'): each root of multiplicity k appears with multiplicity k - 1."""
    return poly_gcd(p, p.derivative())


def sturm_sequence(p: IntPolynomial) -> list[IntPolynomial]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero() and seq[-1].degree > 0:
        _, r = pseudo_divmod(seq[-2], seq[-1])
        if r.is_zero():
            break
        r = -r
        g = r.content()
        seq.append(IntPolynomial(c // g for c in r.coeffs))
    return [s for s in seq if not s.is_zero()]


def _sign_changes(signs: Iterable[int]) -> int:
    prev = 0
    n = 0
    for s in signs:
        if s == 0:
            continue
        if prev and s != prev:
            n += 1
        prev = s
    return n


def count_real_roots(p: IntPolynomial, lo=None, hi=None) -> int:
    """Number of distinct real roots of p in (lo, hi]; None means infinite.

    Uses Sturm's theorem on the squarefree part, so multiplicities are ignored.
    """
    if p.degree <= 0:
        return 0
    q = squarefree_part(p)
    seq = sturm_sequence(q)

    def variations(x, direction):
        if x is None:
            return _sign_changes(s.sign_at_infinity(direction) for s in seq)
        return _sign_changes(s.sign_at(Fraction(x)) for s in seq)

    return variations(lo, -1) - variations(hi, 1)


def real_sign_of_root(p: IntPolynomial, lo: Fraction, hi: Fraction, q: Fraction) -> int:
    """Sign of (z - q) where z is the unique real root of p in [lo, hi].

    Raises ValueError when [lo, hi] does not isolate exactly one root.
    """
    lo, hi, q = Fraction(lo), Fraction(hi), Fraction(q)
    p = squarefree_part(p)
    total = count_real_roots(p, lo, hi) + (1 if p(lo) == 0 else 0)
    if total != 1:
        raise ValueError(f"interval [{lo}, {hi}] holds {total} roots of {p}")
    if q < lo:
        return 1
    if q > hi:
        return -1
    if p(q) == 0:
        return 0
    below = count_real_roots(p, lo, q) + (1 if p(lo) == 0 else 0)
    return -1 if below else 1


def resultant(a: IntPolynomial, b: IntPolynomial) -> int:
    """Resultant via the Sylvester determinant (exact, fraction-free)."""
    from .exact import int_det

    m, n = a.degree, b.degree
    if m < 0 or n < 0:
        return 0
    size = m + n
    if size == 0:
        return 1
    rows = []
    for i in range(n):
        row = [0] * size
        for k, c in enumerate(reversed(a.coeffs)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [0] * size
        for k, c in enumerate(reversed(b.coeffs)):
            row[i + k] = c
        rows.append(row)
    return int_det(rows)


def dickson_transform(h: IntPolynomial) -> IntPolynomial:
    """For palindromic h of degree 2m, return H with z^-m h(z) = H(z + 1/z)."""
    n = h.degree
    if n % 2:
        raise ValueError("palindromic transform needs even degree")
    m = n // 2
    w = IntPolynomial.x()
    # D_k(w) = z^k + z^-k, D_0 = 2, D_1 = w
    dk_prev, dk = IntPolynomial((2,)), w
    out = IntPolynomial((h[m],))
    for k in range(1, m + 1):
        out = out + dk * h[m + k]
        dk_prev, dk = dk, w * dk - dk_prev
    return out


def unit_circle_roots(p: IntPolynomial) -> tuple[int, IntPolynomial]:
    """Count distinct roots of p on |z| = 1 exactly.

    Returns (count, g) with g = gcd(p, reciprocal(p)), the factor holding every
    root that is either on the circle or paired with its inverse conjugate.
    """
    p = squarefree_part(p)
    g = poly_gcd(p, p.reciprocal())
    if g.degree <= 0:
        return 0, g
    count = 0
    h = g
    for r in (1, -1):
        lin = IntPolynomial((-r, 1))
        while h.degree > 0 and h(r) == 0:
            h = exact_divide(h, lin)
            count += 1
    if h.degree > 0:
        if h.coeffs != tuple(reversed(h.coeffs)):
            h = h.primitive()
            if h.coeffs != tuple(reversed(h.coeffs)):
                raise ArithmeticError(f"gcd factor {h} is not palindromic")
        big = dickson_transform(h)
        # roots of H in (-2, 2) <-> conjugate pairs on the unit circle
        inner = count_real_roots(big, Fraction(-2), Fraction(2))
        if big(2) == 0:
            inner -= 1
        count += 2 * inner
    return count, g
