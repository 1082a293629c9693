"""Pisot certification, enumeration and the constructive existence results."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .certified import CertifiedComplex, Inconclusive, isolate_roots, mpf_to_fraction, precision_ladder
from .errors import BoundaryDegenerate, InternalConsistencyError, NotInEK, PrecisionExhausted
from .field import (
    NumberField,
    OrderElement,
    compare_modulus_at_place,
    element_mul,
    embed,
    min_poly,
    sign_at_place,
)
from .minkowski import (
    BoxRegion,
    MinkowskiLattice,
    RhoVector,
    _as_fraction,
    bound_BK,
    build_lattice,
    compute_rho,
    constant_c,
    enumerate_lattice_points,
    find_alpha,
    round_to_lattice,
)
from .poly import (
    IntPolynomial,
    count_real_roots,
    exact_divide,
    poly_gcd,
    repeated_part,
    squarefree_part,
    unit_circle_roots,
)


# --------------------------------------------------------------------------
# Schur-Cohn
# --------------------------------------------------------------------------


def _schur_transform(p: IntPolynomial) -> IntPolynomial:
    a0, an = p.coeffs[0], p.leading
    n = p.degree
    rev = [p.coeffs[n - k] for k in range(n + 1)]
    return IntPolynomial(a0 * c - an * r for c, r in zip(p.coeffs, rev))


def _count_by_isolation(p: IntPolynomial) -> int:
    """Roots of p (with multiplicity) strictly inside |z| = 1 via certified discs."""
    total = 0
    while p.degree > 0:
        sq = squarefree_part(p)
        total += _isolate_inside(sq)
        p = repeated_part(p)
    return total


def _isolate_inside(p: IntPolynomial) -> int:
    for prec in precision_ladder():
        try:
            balls = isolate_roots(p.coeffs, prec)
            inside = 0
            with mpmath.workprec(prec):
                for b in balls:
                    if b.compare_modulus(1) < 0:
                        inside += 1 if b.is_real() else 2
            return inside
        except Inconclusive:
            continue
    raise PrecisionExhausted(f"could not place the roots of {p} relative to the unit circle")


def _chain(p: IntPolynomial) -> int:
    """Schur-Cohn reduction for p with no roots on the unit circle.

    With T p = a0 p - an p*, Rouche on |z| = 1 gives count(p) = count(Tp)
    when |a0| > |an| and count(p) = deg p - count(Tp) when |a0| < |an|.
    A tie |a0| = |an| falls back to certified root isolation.
    """
    steps: list[tuple[bool, int]] = []
    q = p
    count = 0
    while q.degree > 0:
        a0, an = q.coeffs[0], q.leading
        if abs(a0) == abs(an):
            count = _count_by_isolation(q)
            break
        steps.append((abs(a0) > abs(an), q.degree))
        q = _schur_transform(q)
    for same, n in reversed(steps):
        count = count if same else n - count
    return count


def _count_squarefree(p: IntPolynomial) -> int:
    g = poly_gcd(p, p.reciprocal())
    if g.degree > 0:
        on_circle, _ = unit_circle_roots(g)
        if on_circle:
            raise BoundaryDegenerate(f"{p} has {on_circle} root(s) on the unit circle", g)
        # roots of g pair up as z, 1/z with neither on the circle
        rest = exact_divide(p, g)
        return g.degree // 2 + (_chain(rest) if rest.degree > 0 else 0)
    return _chain(p)


def count_roots_in_unit_disc(p: IntPolynomial) -> int:
    """Exact number of roots of p (with multiplicity) of modulus < 1.

    Raises BoundaryDegenerate, carrying the factor gcd(p, p*), when p has a
    root on the unit circle.
    """
    if p.is_zero():
        raise ValueError("zero polynomial")
    if p.degree <= 0:
        return 0
    sq = squarefree_part(p)
    on_circle, g = unit_circle_roots(sq)
    if on_circle:
        raise BoundaryDegenerate(f"{p} has {on_circle} root(s) on the unit circle", g)
    total = _count_squarefree(sq)
    rep = repeated_part(p)
    if rep.degree > 0:
        total += count_roots_in_unit_disc(rep)
    return total


# --------------------------------------------------------------------------
# certificates
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PisotCertificate:
    element: OrderElement
    minimal_poly: IntPolynomial
    value_enclosure: CertifiedComplex
    conjugate_enclosures: tuple[CertifiedComplex, ...]
    inside_count: int

    @property
    def value(self) -> float:
        return float(self.value_enclosure.center.real)

    def to_json(self, digits: int = 20) -> dict:
        return {
            "coords": self.element.to_json(),
            "minimal_polynomial": list(self.minimal_poly.coeffs),
            "value": self.value_enclosure.to_json(digits),
            "conjugates": [c.to_json(digits) for c in self.conjugate_enclosures],
            "inside_count": self.inside_count,
            "verdict": "pisot",
        }


@dataclass(frozen=True)
class PisotRejection:
    element: OrderElement
    reason: str

    def __bool__(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {"coords": self.element.to_json(), "verdict": "rejected", "reason": self.reason}


NOT_GENERATOR = "not a generator"
NOT_ABOVE_ONE = "not > 1"
CONJUGATE_TOO_LARGE = "conjugate too large"
BOUNDARY = "boundary-degenerate"


def certify_pisot(f: NumberField, x: OrderElement, precision: int | None = None) -> PisotCertificate | PisotRejection:
    p = min_poly(f, x)
    d = f.degree
    if p.degree != d:
        return PisotRejection(x, NOT_GENERATOR)
    if sign_at_place(f, x, 0, 1, precision) <= 0:
        return PisotRejection(x, NOT_ABOVE_ONE)
    if count_real_roots(p, 1, None) != 1 or p(1) == 0:
        return PisotRejection(x, CONJUGATE_TOO_LARGE)
    try:
        inside = count_roots_in_unit_disc(p)
    except BoundaryDegenerate:
        return PisotRejection(x, BOUNDARY)
    if inside != d - 1:
        return PisotRejection(x, CONJUGATE_TOO_LARGE)
    vals = embed(f, x, precision)
    return PisotCertificate(x, p, vals[0], tuple(vals[1:]), inside)


def is_pisot(f: NumberField, x: OrderElement) -> bool:
    return isinstance(certify_pisot(f, x), PisotCertificate)


def _pisot_region(f: NumberField, lo: Fraction, hi: Fraction, eps: Fraction = Fraction(1), lo_closed=False) -> BoxRegion:
    real = [(lo, hi, "closed" if lo_closed else "open-closed")] + [(-eps, eps, "open")] * (f.s - 1)
    discs = [((Fraction(0), Fraction(0)), eps, "open")] * f.t
    return BoxRegion.make(real, discs)


def lattice_for(f: NumberField) -> MinkowskiLattice:
    return build_lattice(f, f.precision)


def enumerate_pisot(f: NumberField, X, workers: int = 1) -> list[PisotCertificate]:
    """Pisot generators of the field in (1, X], ascending."""
    X = _as_fraction(X)
    if X <= 1:
        return []
    cached = f._cache.get("pisot")
    if cached is not None and cached[0] >= X:
        return [c for c in cached[1] if _at_most(f, c, X)]
    L = lattice_for(f)
    pts = enumerate_lattice_points(L, _pisot_region(f, Fraction(1), X), workers=workers)
    out = []
    for x in pts:
        cert = certify_pisot(f, x)
        if not isinstance(cert, PisotCertificate):
            raise InternalConsistencyError(f"enumerated point {x} failed certification: {cert.reason}")
        out.append(cert)
    f._cache["pisot"] = (X, tuple(out))
    return out


def _at_most(f: NumberField, cert: PisotCertificate, X: Fraction) -> bool:
    lo, hi = cert.value_enclosure.real_interval()
    if hi <= X:
        return True
    if lo > X:
        return False
    return sign_at_place(f, cert.element, 0, X) <= 0


def _float_conjugates(f: NumberField, x: OrderElement) -> list[complex]:
    vals, _ = f.basis_floats()
    return [sum(c * v for c, v in zip(x.coords, row)) for row in vals]


def min_pisot(f: NumberField, workers: int = 1) -> PisotCertificate:
    X = Fraction(2)
    while True:
        found = enumerate_pisot(f, X, workers)
        if found:
            return found[0]
        X *= 2


def field_constants(f: NumberField) -> tuple[MinkowskiLattice, RhoVector]:
    key = ("rho", f.precision)
    if key not in f._cache:
        L = lattice_for(f)
        f._cache[key] = (L, compute_rho(L))
    return f._cache[key]


def epsilon_pisot_search(f: NumberField, eps_pisot, interval: tuple | None = None, start=None) -> PisotCertificate:
    """A Pisot generator in [r, r'] whose other conjugates have modulus < eps_pisot.

    The auxiliary epsilon is 0.99 * eps_pisot; the interval must be at least
    2 c(epsilon) long (pass ``start`` alone to use exactly that length).
    """
    eps_p = _as_fraction(eps_pisot)
    if not 0 < eps_p <= 1:
        raise ValueError("eps_pisot must lie in (0, 1]")
    eps = eps_p * Fraction(99, 100)
    L, rho = field_constants(f)
    c = constant_c(L, rho, eps)
    if interval is None:
        if start is None:
            raise ValueError("give an interval or a start point")
        r = _as_fraction(start)
        interval = (r, r + 2 * c)
    r, r2 = (_as_fraction(v) for v in interval)
    if r2 - r < 2 * c:
        raise ValueError(f"interval too short: need length >= {float(2 * c):.6g}")
    if r < 1:
        raise ValueError("interval must lie in [1, oo)")
    pts = enumerate_lattice_points(L, _pisot_region(f, r, r2, eps_p, lo_closed=True))
    for x in pts:
        if sign_at_place(f, x, 0, 1) <= 0:
            continue
        cert = certify_pisot(f, x)
        if isinstance(cert, PisotCertificate):
            return cert
    raise InternalConsistencyError(f"no {eps_p}-Pisot number in [{r}, {r2}] despite the existence guarantee")


# --------------------------------------------------------------------------
# approximating a conjugate vector by a lattice point
# --------------------------------------------------------------------------


def _target(v) -> tuple[Fraction, Fraction]:
    if isinstance(v, tuple):
        return (_as_fraction(v[0]), _as_fraction(v[1]))
    if isinstance(v, complex):
        return (Fraction(v.real), Fraction(v.imag))
    return (_as_fraction(v), Fraction(0))


@dataclass(frozen=True)
class Theorem1Query:
    """Targets x_2..x_{s+t} (rational, as (re, im) pairs), radius epsilon and x_1."""

    x1: Fraction
    targets: tuple[tuple[Fraction, Fraction], ...]
    epsilon: Fraction

    @classmethod
    def make(cls, x1, targets: Sequence, epsilon) -> "Theorem1Query":
        return cls(_as_fraction(x1), tuple(_target(t) for t in targets), _as_fraction(epsilon))

    def validate(self, f: NumberField) -> None:
        if len(self.targets) != f.places - 1:
            raise ValueError(f"expected {f.places - 1} targets, got {len(self.targets)}")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        for j, (re, im) in enumerate(self.targets, start=1):
            if j < f.s and im != 0:
                raise ValueError(f"target {j + 1} sits at a real place and must be real")
            # closed eps-disc inside the open unit disc: |x| + eps < 1
            room = 1 - self.epsilon
            if re * re + im * im >= room * room:
                raise ValueError(f"target {j + 1}: the closed {self.epsilon}-neighbourhood leaves the unit disc")

    def to_json(self) -> dict:
        return {
            "x1": str(self.x1),
            "targets": [[str(re), str(im)] for re, im in self.targets],
            "epsilon": str(self.epsilon),
        }


@dataclass(frozen=True)
class Theorem1Result:
    theta: OrderElement
    c: Fraction
    strategy: str
    alpha: OrderElement | None = None
    beta: OrderElement | None = None

    def __iter__(self):
        return iter((self.theta, self.c))


def verify_theorem1(f: NumberField, q: Theorem1Query, theta: OrderElement, c: Fraction) -> bool:
    if compare_modulus_at_place(f, theta, 0, c, (q.x1, 0)) > 0:
        return False
    for j, tgt in enumerate(q.targets, start=1):
        if compare_modulus_at_place(f, theta, j, q.epsilon, tgt) > 0:
            return False
    return True


def _ball(v: tuple[Fraction, Fraction]) -> CertifiedComplex:
    re, im = v
    b = CertifiedComplex.exact(re)
    if im:
        b = b + CertifiedComplex.exact(im) * CertifiedComplex(1j)
    return b


def theorem1_construct(f: NumberField, q: Theorem1Query, strategy: str = "constructive") -> Theorem1Result:
    """theta with |x_1 - theta| <= c and |x_j - sigma_j(theta)| <= eps, c = c(eps)."""
    q.validate(f)
    L, rho = field_constants(f)
    c = constant_c(L, rho, q.epsilon)
    if strategy == "constructive":
        alpha = find_alpha(L, rho, c, q.epsilon)
        with mpmath.workprec(L.precision):
            av = embed(f, alpha, L.precision)
            goals = [_ball((q.x1, Fraction(0)))] + [_ball(t) for t in q.targets]
            target = [g / a for g, a in zip(goals, av)]
        beta = round_to_lattice(L, target, rho).beta
        theta = element_mul(f, alpha, beta)
        result = Theorem1Result(theta, c, strategy, alpha, beta)
    elif strategy == "direct":
        real = [(q.x1 - c, q.x1 + c, "closed")]
        discs = []
        for j, (re, im) in enumerate(q.targets, start=1):
            if j < f.s:
                real.append((re - q.epsilon, re + q.epsilon, "closed"))
            else:
                discs.append(((re, im), q.epsilon, "closed"))
        pts = enumerate_lattice_points(L, BoxRegion.make(real, discs))
        if not pts:
            raise InternalConsistencyError("direct search found no point in a box that must contain one")
        x1 = q.x1

        def dist(x):
            v = embed(f, x)[0]
            return (abs(mpf_to_fraction(v.center.real) - x1), x.coords)

        theta = min(pts, key=dist)
        result = Theorem1Result(theta, c, strategy)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if not verify_theorem1(f, q, result.theta, c):
        raise InternalConsistencyError(f"{strategy} construction produced {result.theta} outside the bounds")
    return result


# --------------------------------------------------------------------------
# decompositions beta = theta - (theta - beta)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    beta: OrderElement
    theta: PisotCertificate
    theta_minus_beta: PisotCertificate
    rho_max: CertifiedComplex
    method: str = "search"

    def to_json(self, digits: int = 20) -> dict:
        return {
            "beta": self.beta.to_json(),
            "theta": self.theta.to_json(digits),
            "theta_minus_beta": self.theta_minus_beta.to_json(digits),
            "rho_max": self.rho_max.to_json(digits),
            "method": self.method,
        }


def _upper(b: CertifiedComplex) -> Fraction:
    return b.real_interval()[1]


def _rational_near(b: CertifiedComplex) -> tuple[Fraction, Fraction]:
    return (mpf_to_fraction(b.center.real), mpf_to_fraction(b.center.imag))


def _constructive_decomposition(f: NumberField, beta: OrderElement, rho_max: CertifiedComplex, shift: int) -> Decomposition:
    rho_hat = _upper(rho_max)
    eps = (1 - rho_hat / 2) / 2
    L, rho = field_constants(f)
    c = constant_c(L, rho, eps)
    vals = embed(f, beta)
    # rational stand-ins for sigma_j(beta)/2; their error (about 2^-120) is far
    # inside the slack left by the choice of eps
    targets = []
    for v in vals[1:]:
        re, im = _rational_near(v)
        targets.append((re / 2, im / 2))
    room = 1 - eps
    safe_targets = []
    for re, im in targets:
        if re * re + im * im >= room * room:
            shrink = Fraction(1) - Fraction(1, 2**40)
            re, im = re * shrink, im * shrink
        safe_targets.append((re, im))
    b1 = _upper(vals[0])
    x1 = 2 * b1 + 1 + c + 2 * c * shift
    res = theorem1_construct(f, Theorem1Query(x1, tuple(safe_targets), eps), "constructive")
    theta = res.theta
    a = certify_pisot(f, theta)
    b = certify_pisot(f, theta - beta)
    if not (isinstance(a, PisotCertificate) and isinstance(b, PisotCertificate)):
        raise InternalConsistencyError(f"constructive decomposition of {beta} produced a non-Pisot part")
    return Decomposition(beta, a, b, rho_max, "constructive")


def rho_max_of(f: NumberField, beta: OrderElement) -> CertifiedComplex:
    vals = embed(f, beta)[1:]
    if not vals:
        return CertifiedComplex(0)
    best = max(vals, key=lambda v: abs(v.center))
    with mpmath.workprec(f.precision):
        return best.abs()


def default_search_limit(f: NumberField, beta: OrderElement) -> Fraction:
    L, rho = field_constants(f)
    bk = _upper(bound_BK(L, rho))
    b1 = _upper(embed(f, beta)[0])
    return 2 * bk + abs(b1) + 4


def decompose_in_EK(
    f: NumberField,
    beta: OrderElement,
    search_limit=None,
    count: int = 1,
    allow_fallback: bool = True,
) -> list[Decomposition]:
    """``count`` distinct decompositions of beta, ordered by increasing theta.

    Direct search over Pisot numbers theta' up to the search limit (doubled
    once), testing theta' + beta; the constructive route fills any shortfall.
    """
    from .analysis import is_in_EK  # analysis builds on this module

    cert = is_in_EK(f, beta)
    if not cert.inside:
        raise NotInEK(f"{beta} is not in E_K ({cert.verdict})")
    rho_max = cert.rho_max
    if search_limit is not None:
        limit = _as_fraction(search_limit)
    else:
        # a power of two lets consecutive calls share one cached enumeration
        limit = Fraction(2) ** math.ceil(math.log2(default_search_limit(f, beta)))
    found: list[Decomposition] = []
    seen: set[OrderElement] = set()
    for attempt in range(2):
        for low in enumerate_pisot(f, limit):
            theta = low.element + beta
            if theta in seen:
                continue
            # cheap rejection; anything near the unit circle goes to the exact test
            if any(abs(z) > 1 + 1e-9 for z in _float_conjugates(f, theta)[1:]):
                continue
            hi = certify_pisot(f, theta)
            if isinstance(hi, PisotCertificate):
                seen.add(theta)
                found.append(Decomposition(beta, hi, low, rho_max, "search"))
                if len(found) >= count:
                    return found
        limit *= 2
    if not allow_fallback:
        return found
    shift = 0
    while len(found) < count:
        dec = _constructive_decomposition(f, beta, rho_max, shift)
        shift += 1
        if dec.theta.element not in seen:
            seen.add(dec.theta.element)
            found.append(dec)
    return found
