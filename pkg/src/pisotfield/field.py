"""Orders in real number fields: exact arithmetic and certified embeddings.

A field is given by a monic squarefree integer polynomial f and a Z-basis
omega_1..omega_d of an order, expressed as rational rows over the power
basis 1, x, .., x^(d-1).  Elements are integer coordinate vectors over that
basis; multiplication goes through an exact integer multiplication table.

Embeddings are indexed by *places*: place 0 is the identity (the largest real
root of f), then the remaining real roots in ascending order, then one
representative per complex-conjugate pair (positive imaginary part) sorted by
real then imaginary part.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

import mpmath

from .certified import (
    DEFAULT_PRECISION,
    MAX_PRECISION,
    CertifiedComplex,
    escalate,
    isolate_roots,
    precision_ladder,
)
from .errors import (
    Inconclusive,
    InternalConsistencyError,
    InvalidFieldSpec,
    PrecisionExhausted,
)
from .exact import IncrementalBasis, frac_det, frac_inverse, int_det, vec_mat
from .poly import IntPolynomial, count_real_roots, is_squarefree, real_sign_of_root, unit_circle_roots


# --------------------------------------------------------------------------
# specs
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    name: str
    defining_poly: IntPolynomial
    basis_matrix: tuple[tuple[Fraction, ...], ...]

    @property
    def degree(self) -> int:
        return self.defining_poly.degree

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "defining_polynomial": list(self.defining_poly.coeffs),
            "integral_basis": [[_frac_str(v) for v in row] for row in self.basis_matrix],
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _frac_str(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _parse_rational(v: Any, where: str) -> Fraction:
    try:
        if isinstance(v, bool):
            raise TypeError
        if isinstance(v, int):
            return Fraction(v)
        if isinstance(v, str):
            return Fraction(v.strip())
        if isinstance(v, (list, tuple)) and len(v) == 2:
            return Fraction(int(v[0]), int(v[1]))
    except (TypeError, ValueError, ZeroDivisionError):
        pass
    raise InvalidFieldSpec(where, f"not an exact rational: {v!r}")


def identity_basis(d: int) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d))


def parse_field_spec(doc: str | bytes | Mapping) -> FieldSpec:
    """Parse a field-spec JSON document (text or already-decoded mapping).

    Accepted keys: ``name``, ``defining_polynomial`` (alias ``poly``) with
    ascending integer coefficients, and optional ``integral_basis`` whose rows
    hold ints, ``"p/q"`` strings or ``[p, q]`` pairs.
    """
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise InvalidFieldSpec("document", f"invalid JSON: {exc}") from None
    if not isinstance(doc, Mapping):
        raise InvalidFieldSpec("document", "expected a JSON object")
    raw = doc.get("defining_polynomial", doc.get("poly"))
    if not isinstance(raw, list) or not raw:
        raise InvalidFieldSpec("defining_polynomial", "missing or empty coefficient list")
    if not all(isinstance(c, int) and not isinstance(c, bool) for c in raw):
        raise InvalidFieldSpec("defining_polynomial", "coefficients must be integers")
    f = IntPolynomial(raw)
    if f.degree < 1:
        raise InvalidFieldSpec("defining_polynomial", "degree must be at least 1")
    if len(raw) != f.degree + 1:
        raise InvalidFieldSpec("defining_polynomial", "trailing zero coefficients")
    if not f.is_monic():
        raise InvalidFieldSpec("defining_polynomial", f"{f} is not monic")
    if not is_squarefree(f):
        raise InvalidFieldSpec("defining_polynomial", f"{f} is not squarefree")
    d = f.degree
    basis_raw = doc.get("integral_basis")
    if basis_raw is None:
        basis = identity_basis(d)
    else:
        if not isinstance(basis_raw, list) or len(basis_raw) != d:
            raise InvalidFieldSpec("integral_basis", f"expected {d} rows")
        rows = []
        for i, row in enumerate(basis_raw):
            if not isinstance(row, list) or len(row) != d:
                raise InvalidFieldSpec("integral_basis", f"row {i} must have {d} entries")
            rows.append(tuple(_parse_rational(v, f"integral_basis[{i}]") for v in row))
        basis = tuple(rows)
        if frac_det(basis) == 0:
            raise InvalidFieldSpec("integral_basis", "basis matrix is singular")
    name = doc.get("name") or f"Q[x]/({f})"
    return FieldSpec(str(name), f, basis)


# --------------------------------------------------------------------------
# elements
# --------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class OrderElement:
    """Integer coordinates over the order basis."""

    coords: tuple[int, ...]

    def __init__(self, coords: Iterable[int]):
        object.__setattr__(self, "coords", tuple(int(c) for c in coords))

    def __add__(self, other: "OrderElement") -> "OrderElement":
        return OrderElement(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other: "OrderElement") -> "OrderElement":
        return OrderElement(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self) -> "OrderElement":
        return OrderElement(-a for a in self.coords)

    def scale(self, k: int) -> "OrderElement":
        return OrderElement(k * a for a in self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.coords)) + ")"

    def to_json(self) -> list[int]:
        return list(self.coords)


def parse_coords(text: str, d: int) -> OrderElement:
    """Comma separated integers, e.g. ``"1,2"``; decimals are rejected."""
    parts = [p.strip() for p in text.split(",")]
    try:
        coords = [int(p) for p in parts]
    except ValueError:
        raise InvalidFieldSpec("element", f"coordinates must be integers: {text!r}") from None
    if len(coords) != d:
        raise InvalidFieldSpec("element", f"expected {d} coordinates, got {len(coords)}")
    return OrderElement(coords)


# --------------------------------------------------------------------------
# the field
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NumberField:
    spec: FieldSpec
    degree: int
    signature: tuple[int, int]
    discriminant: int
    mult_table: tuple[tuple[tuple[int, ...], ...], ...]
    one: OrderElement
    root_enclosures: tuple[CertifiedComplex, ...]
    precision: int
    max_precision: int
    _cache: dict = dc_field(default_factory=dict, repr=False)

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def s(self) -> int:
        return self.signature[0]

    @property
    def t(self) -> int:
        return self.signature[1]

    @property
    def places(self) -> int:
        """Number of archimedean places s + t."""
        return self.s + self.t

    def is_real_place(self, j: int) -> bool:
        return j < self.s

    def element(self, coords: Iterable[int]) -> OrderElement:
        x = OrderElement(coords)
        if len(x.coords) != self.degree:
            raise ValueError(f"expected {self.degree} coordinates, got {len(x.coords)}")
        return x

    def zero(self) -> OrderElement:
        return OrderElement([0] * self.degree)

    def rational(self, n: int) -> OrderElement:
        return self.one.scale(n)

    def basis_element(self, i: int) -> OrderElement:
        return OrderElement(int(i == j) for j in range(self.degree))

    def __repr__(self) -> str:
        return f"NumberField({self.name!r}, d={self.degree}, sig={self.signature}, disc={self.discriminant})"

    # cached numerical data ------------------------------------------------------
    def roots(self, prec: int) -> tuple[CertifiedComplex, ...]:
        """Root enclosures in place order at (at least) ``prec`` bits."""
        key = ("roots", prec)
        if key not in self._cache:
            coeffs = self.spec.defining_poly.coeffs
            guesses = None
            for p in precision_ladder(prec, max(prec, self.max_precision)):
                try:
                    balls = isolate_roots(coeffs, p, guesses)
                    break
                except Inconclusive:
                    continue
            else:
                raise PrecisionExhausted(f"root isolation of {self.spec.defining_poly} failed")
            self._cache[key] = tuple(_place_order(balls, self.s))
        return self._cache[key]

    def basis_embeddings(self, prec: int) -> tuple[tuple[CertifiedComplex, ...], ...]:
        """table[j][i] encloses sigma_j(omega_i), places j = 0..s+t-1."""
        key = ("basis", prec)
        if key not in self._cache:
            roots = self.roots(prec)
            table = []
            with mpmath.workprec(prec):
                for r in roots:
                    powers = [CertifiedComplex(1)]
                    for _ in range(1, self.degree):
                        powers.append(powers[-1] * r)
                    row = []
                    for brow in self.spec.basis_matrix:
                        acc = CertifiedComplex(0)
                        for b, pw in zip(brow, powers):
                            if b:
                                acc = acc + pw * CertifiedComplex.exact(b)
                        row.append(_realify(acc) if r.is_real() else acc)
                    table.append(tuple(row))
            self._cache[key] = tuple(table)
        return self._cache[key]

    def basis_floats(self) -> list[list[complex]]:
        """Double-precision sigma_j(omega_i) with an absolute error bound."""
        key = ("floats",)
        if key not in self._cache:
            table = self.basis_embeddings(self.precision)
            vals = [[complex(b.center) for b in row] for row in table]
            errs = [[float(b.radius) + 1e-300 for b in row] for row in table]
            self._cache[key] = (vals, errs)
        return self._cache[key]


def _realify(b: CertifiedComplex) -> CertifiedComplex:
    # the exact value is real, so |v - Re c| <= |v - c| <= r
    if b.center.imag == 0:
        return b
    return CertifiedComplex(b.center.real, b.radius)


def _place_order(balls: Sequence[CertifiedComplex], s: int) -> list[CertifiedComplex]:
    reals = [b for b in balls if b.is_real()]
    cplx = [b for b in balls if not b.is_real()]
    if len(reals) != s:
        raise InternalConsistencyError("real root count changed under precision escalation")
    if not reals:
        return cplx
    return [reals[-1]] + reals[:-1] + cplx


def _poly_mulmod(a: Sequence[Fraction], b: Sequence[Fraction], f: IntPolynomial) -> list[Fraction]:
    d = f.degree
    prod = [Fraction(0)] * (2 * d - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    for k in range(len(prod) - 1, d - 1, -1):
        c = prod[k]
        if c:
            for m in range(d):
                prod[k - d + m] -= c * f[m]
            prod[k] = Fraction(0)
    return prod[:d]


def build_field(spec: FieldSpec, precision: int | None = None, max_precision: int | None = None) -> NumberField:
    """Validate the order basis and compute signature, discriminant and roots."""
    precision = precision or DEFAULT_PRECISION
    max_precision = max_precision or MAX_PRECISION
    if precision < 64:
        raise ValueError("precision must be at least 64 bits")
    if precision > max_precision:
        raise ValueError("precision exceeds max_precision")
    f = spec.defining_poly
    d = f.degree
    _check_irreducible(f)
    basis = spec.basis_matrix
    try:
        binv = frac_inverse(basis)
    except ZeroDivisionError:
        raise InvalidFieldSpec("integral_basis", "basis matrix is singular") from None

    def to_coords(power: Sequence[Fraction]) -> list[Fraction]:
        return vec_mat(list(power), binv)

    one_c = to_coords([Fraction(int(k == 0)) for k in range(d)])
    if any(c.denominator != 1 for c in one_c):
        raise InvalidFieldSpec("integral_basis", "the order must contain 1")
    table = []
    for i in range(d):
        row = []
        for j in range(d):
            c = to_coords(_poly_mulmod(basis[i], basis[j], f))
            if any(v.denominator != 1 for v in c):
                raise InvalidFieldSpec(
                    "integral_basis", f"basis not multiplicatively closed (omega_{i + 1}*omega_{j + 1})"
                )
            row.append(tuple(int(v) for v in c))
        table.append(tuple(row))
    mult_table = tuple(table)
    traces = [sum(mult_table[k][m][m] for m in range(d)) for k in range(d)]
    gram = [[sum(mult_table[i][j][k] * traces[k] for k in range(d)) for j in range(d)] for i in range(d)]
    disc = int_det(gram)
    if disc == 0:
        raise InternalConsistencyError("zero discriminant for a squarefree polynomial")

    s_exact = count_real_roots(f)
    if s_exact == 0:
        raise InvalidFieldSpec("defining_polynomial", f"{f} has no real root (field is not real)")
    for p in precision_ladder(precision, max_precision):
        try:
            balls = isolate_roots(f.coeffs, p)
            break
        except Inconclusive:
            continue
    else:
        raise PrecisionExhausted(f"root isolation of {f} failed up to {max_precision} bits")
    s = sum(1 for b in balls if b.is_real())
    if s != s_exact:
        raise InternalConsistencyError(f"root isolation found {s} real roots, Sturm found {s_exact}")
    t = (d - s) // 2
    if s + 2 * t != d:
        raise InternalConsistencyError("signature does not add up to the degree")
    ordered = tuple(_place_order(balls, s))
    nf = NumberField(
        spec=spec,
        degree=d,
        signature=(s, t),
        discriminant=disc,
        mult_table=mult_table,
        one=OrderElement(int(c) for c in one_c),
        root_enclosures=ordered,
        precision=precision,
        max_precision=max_precision,
    )
    nf._cache[("roots", precision)] = ordered
    return nf


def _check_irreducible(f: IntPolynomial) -> None:
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(f.coeffs)), x, domain="ZZ")
    if not poly.is_irreducible:
        raise InvalidFieldSpec("defining_polynomial", f"{f} is reducible over Q")


def load_field(path_or_doc, precision: int | None = None, max_precision: int | None = None) -> NumberField:
    """Convenience: parse a spec file path / JSON text / mapping and build it."""
    if isinstance(path_or_doc, Mapping):
        spec = parse_field_spec(path_or_doc)
    else:
        text = str(path_or_doc)
        if not text.lstrip().startswith("{"):
            with open(text, encoding="utf-8") as fh:
                text = fh.read()
        spec = parse_field_spec(text)
    return build_field(spec, precision, max_precision)


# --------------------------------------------------------------------------
# exact arithmetic
# --------------------------------------------------------------------------


def _mul_coords(f: NumberField, x: Sequence, y: Sequence) -> list:
    d = f.degree
    out = [0] * d
    mt = f.mult_table
    for i, a in enumerate(x):
        if not a:
            continue
        row = mt[i]
        for j, b in enumerate(y):
            if not b:
                continue
            ab = a * b
            for k, c in enumerate(row[j]):
                if c:
                    out[k] += ab * c
    return out


def element_mul(f: NumberField, x: OrderElement, y: OrderElement) -> OrderElement:
    """Exact product through the multiplication table."""
    if len(x.coords) != f.degree or len(y.coords) != f.degree:
        raise ValueError("coordinate vectors must have length d")
    out = _mul_coords(f, x.coords, y.coords)
    if any(not isinstance(v, int) for v in out):
        raise InternalConsistencyError("non-integer product coordinates")
    return OrderElement(out)


def element_pow(f: NumberField, x: OrderElement, k: int) -> OrderElement:
    out = f.one
    for _ in range(k):
        out = element_mul(f, out, x)
    return out


def mult_matrix(f: NumberField, x: OrderElement) -> list[list[int]]:
    """Row i holds the coordinates of x * omega_i."""
    return [_mul_coords(f, x.coords, f.basis_element(i).coords) for i in range(f.degree)]


def trace(f: NumberField, x: OrderElement) -> int:
    m = mult_matrix(f, x)
    return sum(m[i][i] for i in range(f.degree))


def norm(f: NumberField, x: OrderElement) -> int:
    """Exact field norm as the determinant of the multiplication matrix."""
    return int_det(mult_matrix(f, x))


def min_poly(f: NumberField, x: OrderElement) -> IntPolynomial:
    """Minimal polynomial over Q via the first dependency among 1, x, x^2, ..."""
    basis = IncrementalBasis(f.degree)
    power = list(f.one.coords)
    for k in range(f.degree + 1):
        combo = basis.add(power)
        if combo is not None:
            # x^k = sum combo_i x^i  =>  x^k - sum combo_i x^i = 0
            coeffs = [-c for c in combo] + [Fraction(1)]
            if any(c.denominator != 1 for c in coeffs):
                raise InternalConsistencyError(f"minimal polynomial of {x} is not integral")
            return IntPolynomial(int(c) for c in coeffs)
        power = _mul_coords(f, power, x.coords)
    raise InternalConsistencyError("no dependency found among d+1 powers")


def char_poly(f: NumberField, x: OrderElement) -> IntPolynomial:
    m = min_poly(f, x)
    return m ** (f.degree // m.degree)


def is_generator(f: NumberField, x: OrderElement) -> bool:
    return min_poly(f, x).degree == f.degree


# --------------------------------------------------------------------------
# embeddings and certified decisions
# --------------------------------------------------------------------------


def embed(f: NumberField, x: OrderElement, precision: int | None = None) -> list[CertifiedComplex]:
    """Enclosures of sigma_j(x) for the s + t places, in place order."""
    prec = precision or f.precision
    table = f.basis_embeddings(prec)
    out = []
    with mpmath.workprec(prec):
        for j, row in enumerate(table):
            acc = CertifiedComplex(0)
            for c, b in zip(x.coords, row):
                if c:
                    acc = acc + b * c
            out.append(acc)
    return out


def embed_all(f: NumberField, x: OrderElement, precision: int | None = None) -> list[CertifiedComplex]:
    """All d embeddings: the s+t places followed by the conjugates of the complex ones."""
    vals = embed(f, x, precision)
    return vals + [v.conjugate() for v in vals[f.s:]]


def rational_value(f: NumberField, x: OrderElement) -> Fraction | None:
    """The rational number x if x lies in Z*1, else None."""
    one = f.one.coords
    k = next(i for i, c in enumerate(one) if c)
    r = Fraction(x.coords[k], one[k])
    if all(Fraction(c) == r * o for c, o in zip(x.coords, one)):
        return r
    return None


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def sign_at_place(f: NumberField, x: OrderElement, j: int, q=0, precision: int | None = None) -> int:
    """Sign of sigma_j(x) - q at a real place, decided exactly.

    A certified ball settles almost every case.  When the ball straddles q,
    Sturm sequences of the minimal polynomial on the ball's interval give the
    exact sign; precision is doubled only while that interval fails to
    isolate a single root.
    """
    if not f.is_real_place(j):
        raise ValueError(f"place {j} is complex")
    q = Fraction(q)
    r = rational_value(f, x)
    if r is not None:
        return _sign(r - q)
    p = None
    for prec in precision_ladder(precision or f.precision, f.max_precision):
        b = embed(f, x, prec)[j]
        try:
            return b.compare_real(q)
        except Inconclusive:
            pass
        if p is None:
            p = min_poly(f, x)
        lo, hi = b.real_interval()
        try:
            return real_sign_of_root(p, lo, hi, q)
        except ValueError:
            continue
    raise PrecisionExhausted(f"sign of sigma_{j + 1}({x}) - {q} undecided")


def compare_modulus_at_place(
    f: NumberField, x: OrderElement, j: int, bound, center=(0, 0), precision: int | None = None
) -> int:
    """Sign of |sigma_j(x) - center| - bound, exact for rational data.

    Rational elements are compared exactly.  Real places with a real center
    reduce to two exact sign tests.  For a complex place with center 0 the
    last resort after the precision cap is an exact test for roots of the
    rescaled minimal polynomial on the unit circle; a hit is reported as 0.
    """
    bound = Fraction(bound)
    cx, cy = Fraction(center[0]), Fraction(center[1])
    r = rational_value(f, x)
    if r is not None:
        d2 = (r - cx) ** 2 + cy**2
        return _sign(d2 - bound * bound) if bound >= 0 else 1
    if f.is_real_place(j) and cy == 0:
        upper = sign_at_place(f, x, j, cx + bound, precision)
        lower = sign_at_place(f, x, j, cx - bound, precision)
        if upper > 0 or lower < 0:
            return 1
        if upper == 0 or lower == 0:
            return 0
        return -1

    def attempt(prec):
        return embed(f, x, prec)[j].compare_modulus(bound, (cx, cy))

    try:
        return escalate(attempt, precision or f.precision, f.max_precision, "modulus comparison")
    except PrecisionExhausted:
        if cx != 0 or cy != 0 or bound <= 0:
            raise
        count, _ = unit_circle_roots(min_poly(f, x).scale_roots(bound))
        if count:
            return 0
        raise


def sigma1_value(f: NumberField, x: OrderElement, precision: int | None = None) -> CertifiedComplex:
    return embed(f, x, precision)[0]


def compare_elements(f: NumberField, x: OrderElement, y: OrderElement) -> int:
    """Exact sign of sigma_1(x) - sigma_1(y)."""
    if x == y:
        return 0
    return sign_at_place(f, x - y, 0, 0)
