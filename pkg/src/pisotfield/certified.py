"""Ball arithmetic over mpmath and certified root isolation.

A :class:`CertifiedComplex` is a closed disc (center, radius).  Radii are
propagated with upward rounding and padded by the rounding error of the
center, so every operation returns a disc containing the exact result.
Comparisons against rational numbers are done exactly by converting the
binary center and radius to :class:`fractions.Fraction`.
"""

from __future__ import annotations

import os
from fractions import Fraction
from typing import Iterator, Sequence

import mpmath
from mpmath import mp, mpc, mpf

from .errors import Inconclusive, PrecisionExhausted

DEFAULT_PRECISION = int(os.environ.get("PISOTFIELD_PRECISION", "128"))
MAX_PRECISION = int(os.environ.get("PISOTFIELD_MAX_PRECISION", "4096"))


def precision_ladder(start: int | None = None, cap: int | None = None) -> Iterator[int]:
    """Yield start, 2*start, ... up to cap (inclusive)."""
    p = start or DEFAULT_PRECISION
    cap = cap or MAX_PRECISION
    p = max(p, 64)
    while p <= cap:
        yield p
        p *= 2
    if p // 2 < cap:
        yield cap


def escalate(fn, start: int | None = None, cap: int | None = None, what: str = "comparison"):
    """Call fn(prec) along the precision ladder until it stops raising Inconclusive."""
    last = None
    for prec in precision_ladder(start, cap):
        try:
            return fn(prec)
        except Inconclusive as exc:
            last = exc
    raise PrecisionExhausted(f"{what} undecided at {cap or MAX_PRECISION} bits: {last}")


def mpf_to_fraction(x: mpf) -> Fraction:
    sign, man, exp, _ = x._mpf_
    if not man:
        if x._mpf_ not in (mpf(0)._mpf_,):
            raise ValueError(f"non-finite value {x}")
        return Fraction(0)
    v = int(man)
    if sign:
        v = -v
    return Fraction(v * 2**exp) if exp >= 0 else Fraction(v, 2**-exp)


def _ulp_pad(c: mpc) -> mpf:
    # relative rounding error bound for one complex operation at mp.prec
    return mp.fmul(abs(c), mpf(2) ** (3 - mp.prec), rounding="u")


def _up_add(*xs) -> mpf:
    acc = mpf(0)
    for x in xs:
        acc = mp.fadd(acc, x, rounding="u")
    return acc


def _up_mul(a, b) -> mpf:
    return mp.fmul(a, b, rounding="u")


class CertifiedComplex:
    """Closed disc {z : |z - center| <= radius} known to contain a value."""

    __slots__ = ("center", "radius")

    def __init__(self, center, radius=0):
        # never round an incoming mp value to the ambient precision
        self.center = _as_mpc(center)
        self.radius = radius if isinstance(radius, mpf) else mpf(radius)

    def __repr__(self) -> str:
        return f"CertifiedComplex({mpmath.nstr(self.center, 12)}, r={mpmath.nstr(self.radius, 3)})"

    @classmethod
    def exact(cls, value) -> "CertifiedComplex":
        """Ball for an exact int/Fraction/float/complex value at the current precision."""
        if isinstance(value, Fraction):
            c = mpf(value.numerator) / value.denominator
            err = abs(mpf_to_fraction(c) - value)
            return cls(c, _frac_up(err))
        if isinstance(value, complex):
            return cls(mpc(value.real, value.imag), 0)
        c = mpf(value)
        return cls(c, 0 if mpf_to_fraction(c) == Fraction(value) else _ulp_pad(mpc(c)))

    # arithmetic --------------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        c = self.center + other.center
        return CertifiedComplex(c, _up_add(self.radius, other.radius, _ulp_pad(c)))

    __radd__ = __add__

    def __neg__(self):
        re, im = self.center._mpc_
        c = mp.make_mpc((mpmath.libmp.mpf_neg(re), mpmath.libmp.mpf_neg(im)))
        return CertifiedComplex(c, self.radius)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            c = self.center * other
            return CertifiedComplex(c, _up_add(_up_mul(self.radius, abs(other)), _ulp_pad(c)))
        other = _coerce(other)
        c = self.center * other.center
        r = _up_add(
            _up_mul(_abs_up(self.center), other.radius),
            _up_mul(_abs_up(other.center), self.radius),
            _up_mul(self.radius, other.radius),
            _ulp_pad(c),
        )
        return CertifiedComplex(c, r)

    __rmul__ = __mul__

    def reciprocal(self) -> "CertifiedComplex":
        m = _abs_down(self.center)
        if m <= self.radius:
            raise Inconclusive("division by a ball containing zero")
        c = 1 / self.center
        gap = mp.fsub(m, self.radius, rounding="d")
        r = mp.fdiv(self.radius, mp.fmul(m, gap, rounding="d"), rounding="u")
        return CertifiedComplex(c, _up_add(r, _ulp_pad(c)))

    def __truediv__(self, other):
        return self * _coerce(other).reciprocal()

    def conjugate(self) -> "CertifiedComplex":
        re, im = self.center._mpc_
        c = mp.make_mpc((re, mpmath.libmp.mpf_neg(im)))
        return CertifiedComplex(c, self.radius)

    def real_part(self) -> "CertifiedComplex":
        return CertifiedComplex(self.center.real, self.radius)

    def imag_part(self) -> "CertifiedComplex":
        return CertifiedComplex(self.center.imag, self.radius)

    def abs(self) -> "CertifiedComplex":
        """Real ball enclosing the modulus."""
        m = abs(self.center)
        return CertifiedComplex(m, _up_add(self.radius, _ulp_pad(mpc(m))))

    # exact predicates ----------------------------------------------------------
    def real_interval(self) -> tuple[Fraction, Fraction]:
        """Exact rational bounds on the real part."""
        c = mpf_to_fraction(self.center.real)
        r = mpf_to_fraction(self.radius)
        return c - r, c + r

    def imag_interval(self) -> tuple[Fraction, Fraction]:
        c = mpf_to_fraction(self.center.imag)
        r = mpf_to_fraction(self.radius)
        return c - r, c + r

    def compare_modulus(self, bound, center=(0, 0)) -> int:
        """Sign of |z - center| - bound, or raise Inconclusive.

        ``bound`` and the center coordinates are exact rationals.
        """
        bound = Fraction(bound)
        cx, cy = Fraction(center[0]), Fraction(center[1])
        dx = mpf_to_fraction(self.center.real) - cx
        dy = mpf_to_fraction(self.center.imag) - cy
        r = mpf_to_fraction(self.radius)
        d2 = dx * dx + dy * dy
        if r == 0:
            b2 = bound * bound
            return (d2 > b2) - (d2 < b2)
        # |z-c| > bound certainly when |center-c| > bound + r
        hi = bound + r
        if d2 > hi * hi:
            return 1
        lo = bound - r
        if lo > 0 and d2 < lo * lo:
            return -1
        raise Inconclusive(f"modulus of {self!r} vs {bound}")

    def compare_real(self, q) -> int:
        """Sign of Re(z) - q, or raise Inconclusive."""
        q = Fraction(q)
        lo, hi = self.real_interval()
        if lo > q:
            return 1
        if hi < q:
            return -1
        if lo == hi == q:
            return 0
        raise Inconclusive(f"real part of {self!r} vs {q}")

    def contains(self, value) -> bool:
        """Whether the exact complex value (Fraction or pair) lies in the disc."""
        if isinstance(value, tuple):
            vx, vy = Fraction(value[0]), Fraction(value[1])
        else:
            vx, vy = Fraction(value), Fraction(0)
        dx = mpf_to_fraction(self.center.real) - vx
        dy = mpf_to_fraction(self.center.imag) - vy
        r = mpf_to_fraction(self.radius)
        return dx * dx + dy * dy <= r * r

    def overlaps(self, other: "CertifiedComplex") -> bool:
        dx = mpf_to_fraction(self.center.real) - mpf_to_fraction(other.center.real)
        dy = mpf_to_fraction(self.center.imag) - mpf_to_fraction(other.center.imag)
        r = mpf_to_fraction(self.radius) + mpf_to_fraction(other.radius)
        return dx * dx + dy * dy <= r * r

    def is_real(self) -> bool:
        return self.center.imag == 0

    def to_json(self, digits: int = 20) -> dict:
        out = {"re": mpmath.nstr(self.center.real, digits, min_fixed=-30, max_fixed=40)}
        if self.center.imag != 0:
            out["im"] = mpmath.nstr(self.center.imag, digits, min_fixed=-30, max_fixed=40)
        out["radius"] = mpmath.nstr(self.radius, 3)
        return out


def _as_mpc(x) -> mpc:
    if isinstance(x, mpc):
        return x
    if isinstance(x, mpf):
        return mp.make_mpc((x._mpf_, mpmath.libmp.fzero))
    return mpc(x)


def _frac_up(x: Fraction) -> mpf:
    if x == 0:
        return mpf(0)
    return mp.fdiv(x.numerator, x.denominator, rounding="u")


def _abs_up(c: mpc) -> mpf:
    return mp.fmul(abs(c), 1 + mpf(2) ** (2 - mp.prec), rounding="u")


def _abs_down(c: mpc) -> mpf:
    return mp.fmul(abs(c), 1 - mpf(2) ** (2 - mp.prec), rounding="d")


def _coerce(x) -> CertifiedComplex:
    if isinstance(x, CertifiedComplex):
        return x
    if isinstance(x, (int, Fraction, float, complex)):
        return CertifiedComplex.exact(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to CertifiedComplex")


def ball_poly_eval(coeffs: Sequence[int], z: CertifiedComplex) -> CertifiedComplex:
    """Horner evaluation of an integer polynomial (ascending coefficients)."""
    acc = CertifiedComplex(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def isolate_roots(coeffs: Sequence[int], prec: int, guesses: Sequence[mpc] | None = None) -> list[CertifiedComplex]:
    """Certified discs for all roots of a squarefree integer polynomial.

    Each disc is centered at a numerical root and has radius n*|p(z)|/|p'(z)|,
    which always contains some root; pairwise disjoint discs therefore hold
    exactly one root each.  Centers with a tiny imaginary part are snapped to
    the real axis, which certifies the root real (the disc is symmetric about
    the axis); other discs must avoid the axis.  Returns reals first
    (ascending) then one disc per conjugate pair, imaginary part positive,
    sorted by (real part, imaginary part).

    Raises Inconclusive when the certificate fails at this precision.
    """
    coeffs = [int(c) for c in coeffs]
    n = len(coeffs) - 1
    if n < 1:
        return []
    with mpmath.workprec(prec + 32):
        if guesses is None:
            try:
                approx = mpmath.polyroots(list(reversed(coeffs)), maxsteps=200, extraprec=prec)
            except mpmath.libmp.NoConvergence as exc:
                raise Inconclusive(f"root finder did not converge: {exc}")
        else:
            approx = [mpc(g) for g in guesses]
        # a few Newton steps at full precision sharpen the centers
        dcoeffs = [k * c for k, c in enumerate(coeffs)][1:]
        refined = []
        for z in approx:
            z = mpc(z)
            for _ in range(8):
                pv = mpmath.polyval(list(reversed(coeffs)), z)
                dv = mpmath.polyval(list(reversed(dcoeffs)), z)
                if dv == 0:
                    break
                z = z - pv / dv
            refined.append(z)
    tol = mpf(2) ** (-(prec // 2))
    with mpmath.workprec(prec):
        balls = []
        for z in refined:
            z = mpc(z)
            scale = max(mpf(1), abs(z))
            if abs(z.imag) <= tol * scale:
                z = mpc(z.real, 0)
            elif z.imag < 0:
                z = mpmath.conj(z)
            center = CertifiedComplex(z, 0)
            pv = ball_poly_eval(coeffs, center)
            dv = ball_poly_eval(dcoeffs, center)
            pv_up = _up_add(abs(pv.center), pv.radius)
            dv_lo = mp.fsub(_abs_down(dv.center), dv.radius, rounding="d")
            if dv_lo <= 0:
                raise Inconclusive("derivative not bounded away from zero")
            rad = mp.fdiv(mp.fmul(n, pv_up, rounding="u"), dv_lo, rounding="u")
            if rad == 0:
                rad = mpf(0)
            ball = CertifiedComplex(z, rad)
            if z.imag != 0 and not rad < abs(z.imag) * (1 - mpf(2) ** (4 - prec)):
                raise Inconclusive("complex root disc meets the real axis")
            balls.append(ball)
    reals = sorted((b for b in balls if b.is_real()), key=lambda b: b.center.real)
    cplx = [b for b in balls if not b.is_real()]
    # each pair was folded to the upper half plane, so we see it twice
    uniq: list[CertifiedComplex] = []
    for b in sorted(cplx, key=lambda b: (b.center.real, b.center.imag)):
        if uniq and uniq[-1].overlaps(b):
            if _same_root(uniq[-1], b, prec):
                continue
            raise Inconclusive("overlapping root discs")
        uniq.append(b)
    if len(reals) + 2 * len(uniq) != n:
        raise Inconclusive("root count mismatch after pairing")
    every = reals + uniq + [b.conjugate() for b in uniq]
    for i in range(len(every)):
        for j in range(i + 1, len(every)):
            if every[i].overlaps(every[j]):
                raise Inconclusive("root discs overlap")
    return reals + uniq


def _same_root(a: CertifiedComplex, b: CertifiedComplex, prec: int) -> bool:
    # two numerical copies of one conjugate pair agree to most of the bits
    with mpmath.workprec(prec):
        d = abs(a.center - b.center)
        return d <= mpf(2) ** (-(prec // 4)) * max(1, abs(a.center))
