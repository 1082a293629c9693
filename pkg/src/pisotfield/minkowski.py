"""The Minkowski lattice sigma(O) in R^s x C^t and lattice-point search.

Coordinates in R^d use the split map tau: real places as they are, each
complex place as (Re, Im).  Everything that feeds a yes/no answer is decided
with certified balls and, at the boundary, exactly (see ``field``); floats are
only used to prune the search.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

import mpmath
from mpmath import mp, mpf

from .certified import CertifiedComplex, Inconclusive, escalate, mpf_to_fraction, precision_ladder
from .errors import InternalConsistencyError
from .exact import frac_inverse
from .field import (
    NumberField,
    OrderElement,
    compare_modulus_at_place,
    element_mul,
    embed,
    sign_at_place,
)

DEFAULT_INFLATION = 1 + Fraction(1, 2**64)


# --------------------------------------------------------------------------
# lattice data
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MinkowskiLattice:
    field: NumberField
    basis_vectors: tuple[tuple[CertifiedComplex, ...], ...]
    tau_matrix: tuple[tuple[CertifiedComplex, ...], ...]
    tau_inverse: tuple[tuple[CertifiedComplex, ...], ...]
    volume: CertifiedComplex
    precision: int

    @property
    def degree(self) -> int:
        return self.field.degree

    def expected_volume_squared(self) -> Fraction:
        """(sqrt|disc| / 2^t)^2 as an exact rational."""
        return Fraction(abs(self.field.discriminant), 4**self.field.t)


def tau(values: Sequence[CertifiedComplex], s: int) -> list[CertifiedComplex]:
    out = list(values[:s])
    for v in values[s:]:
        out.append(v.real_part())
        out.append(v.imag_part())
    return out


def _ball_det(rows: list[list[CertifiedComplex]]) -> CertifiedComplex:
    m = [list(r) for r in rows]
    n = len(m)
    det = CertifiedComplex(1)
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(m[i][k].center))
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            det = -det
        inv = m[k][k].reciprocal()
        det = det * m[k][k]
        for i in range(k + 1, n):
            factor = m[i][k] * inv
            for j in range(k + 1, n):
                m[i][j] = m[i][j] - factor * m[k][j]
    return det


def build_lattice(f: NumberField, precision: int | None = None) -> MinkowskiLattice:
    """Basis vectors, tau matrix, certified inverse and covolume.

    The inverse comes from the trace-dual basis: coordinates of y are
    r = (Tr(y omega_k))_k G^-1 with G the trace Gram matrix, and Tr(y omega_k)
    is linear in tau(y).  No floating-point inversion is involved.
    """
    prec = precision or f.precision
    key = ("lattice", prec)
    if key not in f._cache:
        # an ill-conditioned tau matrix can make the ball determinant undecidable
        f._cache[key] = escalate(lambda p: _build_lattice_at(f, p), prec, f.max_precision, "covolume")
    return f._cache[key]


def _build_lattice_at(f: NumberField, prec: int) -> MinkowskiLattice:
    d, s = f.degree, f.s
    table = f.basis_embeddings(prec)
    vectors = tuple(tuple(table[j][i] for j in range(f.places)) for i in range(d))
    with mpmath.workprec(prec):
        tmat = [tau(v, s) for v in vectors]
        traces = [sum(f.mult_table[k][m][m] for m in range(d)) for k in range(d)]
        gram = [
            [Fraction(sum(f.mult_table[i][j][k] * traces[k] for k in range(d))) for j in range(d)]
            for i in range(d)
        ]
        ginv = frac_inverse(gram)
        # W[l][k]: coefficient of tau-coordinate l in Tr(y omega_k)
        wmat: list[list[CertifiedComplex]] = []
        for j in range(f.places):
            if j < s:
                wmat.append([table[j][k] for k in range(d)])
            else:
                wmat.append([table[j][k].real_part() * 2 for k in range(d)])
                wmat.append([table[j][k].imag_part() * -2 for k in range(d)])
        ginv_balls = [[CertifiedComplex.exact(v) for v in row] for row in ginv]
        tinv = []
        for l in range(d):
            row = []
            for i in range(d):
                acc = CertifiedComplex(0)
                for k in range(d):
                    if ginv[k][i]:
                        acc = acc + wmat[l][k] * ginv_balls[k][i]
                row.append(acc)
            tinv.append(row)
        det = _ball_det([list(r) for r in tmat])
        vol = det.abs()
        # consistency: tau * tau^-1 must enclose the identity
        for i in range(d):
            for j in range(d):
                acc = CertifiedComplex(0)
                for k in range(d):
                    acc = acc + tmat[i][k] * tinv[k][j]
                if not acc.contains(Fraction(int(i == j))):
                    raise InternalConsistencyError("tau matrix times its inverse misses the identity")
    lo, hi = vol.real_interval()
    target = Fraction(abs(f.discriminant), 4**f.t)
    if not (max(lo, 0) ** 2 <= target <= hi**2):
        raise InternalConsistencyError(f"covolume {vol!r} does not match sqrt|disc|/2^t")
    lat = MinkowskiLattice(
        field=f,
        basis_vectors=vectors,
        tau_matrix=tuple(tuple(r) for r in tmat),
        tau_inverse=tuple(tuple(r) for r in tinv),
        volume=vol,
        precision=prec,
    )
    return lat


# --------------------------------------------------------------------------
# radii and constants
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RhoVector:
    """Per-place radii: |x_j| <= rho_j at real places, |z| <= sqrt(rho_j) at complex ones.

    ``rho`` holds exact rational upper bounds actually used; at complex places
    it is a perfect square ``disc_radius**2`` so the disc radius stays rational.
    ``enclosures`` are the certified values of the closed-form radii.
    """

    rho: tuple[Fraction, ...]
    disc_radius: tuple[Fraction | None, ...]
    enclosures: tuple[CertifiedComplex, ...]

    def floats(self) -> list[float]:
        return [float(r) for r in self.rho]


def _pad_up(x: Fraction, prec: int) -> Fraction:
    # strictly above x by a relative 2^-(prec/2); keeps vertex checks decidable
    return x + abs(x) / 2 ** (prec // 2) + Fraction(1, 2 ** (prec // 2))


def compute_rho(L: MinkowskiLattice) -> RhoVector:
    f = L.field
    prec = L.precision
    rho, discs, encl = [], [], []
    with mpmath.workprec(prec):
        for j in range(f.places):
            col = [L.basis_vectors[i][j] for i in range(L.degree)]
            if j < f.s:
                pos = CertifiedComplex(0)
                neg = CertifiedComplex(0)
                slack = Fraction(0)
                for v in col:
                    lo_v, hi_v = v.real_interval()
                    if lo_v >= 0:
                        pos = pos + v
                    elif hi_v <= 0:
                        neg = neg - v
                    else:
                        # sign unknown: |v| <= 2r, charge it to both sums
                        slack += hi_v - lo_v
                hi = max(pos.real_interval()[1], neg.real_interval()[1]) + slack
                best = pos if pos.center.real >= neg.center.real else neg
                rho.append(_pad_up(hi, prec))
                discs.append(None)
                encl.append(best)
            else:
                total = CertifiedComplex(0)
                for v in col:
                    total = total + v.abs()
                hi = total.real_interval()[1]
                r = _pad_up(hi, prec)
                rho.append(r * r)
                discs.append(r)
                encl.append(total * total)
    out = RhoVector(tuple(rho), tuple(discs), tuple(encl))
    _check_parallelepiped(L, out)
    return out


def _check_parallelepiped(L: MinkowskiLattice, rho: RhoVector) -> None:
    """All 2^d vertices of the fundamental parallelepiped lie in the ball."""
    f = L.field
    d = L.degree
    if d > 16:
        return
    with mpmath.workprec(L.precision):
        for mask in product((0, 1), repeat=d):
            for j in range(f.places):
                acc = CertifiedComplex(0)
                for i, m in enumerate(mask):
                    if m:
                        acc = acc + L.basis_vectors[i][j]
                bound = rho.rho[j] if j < f.s else rho.disc_radius[j]
                try:
                    ok = acc.compare_modulus(bound) < 0
                except Inconclusive:
                    ok = False
                if not ok:
                    raise InternalConsistencyError(f"vertex {mask} escapes the radius at place {j}")


def _pi_ball() -> CertifiedComplex:
    return CertifiedComplex(+mp.pi, mpf(2) ** (3 - mp.prec))


def _sqrt_ball(n: int) -> CertifiedComplex:
    c = mpmath.sqrt(n)
    return CertifiedComplex(c, mp.fmul(c, mpf(2) ** (3 - mp.prec), rounding="u"))


def _formula(L: MinkowskiLattice, rho: RhoVector, epsilon: Fraction | None) -> CertifiedComplex:
    f = L.field
    with mpmath.workprec(L.precision):
        val = _sqrt_ball(abs(f.discriminant)) * (2**f.t)
        for r in rho.rho:
            val = val * CertifiedComplex.exact(r)
        den = CertifiedComplex(1)
        for _ in range(f.t):
            den = den * _pi_ball()
        if epsilon is not None:
            for _ in range(f.degree - 1):
                den = den * CertifiedComplex.exact(epsilon)
        return val / den


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, mpf):
        return mpf_to_fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def constant_c(L: MinkowskiLattice, rho: RhoVector, epsilon, inflation: Fraction = DEFAULT_INFLATION) -> Fraction:
    """Upper bound for 2^t sqrt|disc| prod(rho) / (pi^t eps^(d-1)), times ``inflation``.

    The returned rational is at least the exact value, so the box built from
    it has volume >= 2^d covol and Minkowski's theorem applies verbatim.
    """
    eps = _as_fraction(epsilon)
    if not 0 < eps <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    ball = _formula(L, rho, eps)
    return ball.real_interval()[1] * Fraction(inflation)


def bound_BK(L: MinkowskiLattice, rho: RhoVector) -> CertifiedComplex:
    """The epsilon -> 1 limit of the constant: an upper bound for min P_K and max C_K."""
    return _formula(L, rho, None)


# --------------------------------------------------------------------------
# regions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RealInterval:
    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = True

    def flag(self) -> str:
        return {
            (True, True): "closed",
            (False, False): "open",
            (False, True): "open-closed",
            (True, False): "closed-open",
        }[(self.lo_closed, self.hi_closed)]


@dataclass(frozen=True)
class Disc:
    center: tuple[Fraction, Fraction]
    radius: Fraction
    closed: bool = True


_FLAGS = {
    "closed": (True, True),
    "open": (False, False),
    "open-closed": (False, True),
    "closed-open": (True, False),
}


@dataclass(frozen=True)
class BoxRegion:
    real_intervals: tuple[RealInterval, ...]
    disc_constraints: tuple[Disc, ...]

    @classmethod
    def make(cls, real: Iterable, discs: Iterable = ()) -> "BoxRegion":
        """Build from ``(lo, hi, flag)`` triples and ``(center, radius, flag)`` triples."""
        ivs = []
        for lo, hi, flag in real:
            lc, hc = _FLAGS[flag]
            ivs.append(RealInterval(_as_fraction(lo), _as_fraction(hi), lc, hc))
        ds = []
        for center, radius, flag in discs:
            if isinstance(center, tuple):
                c = (_as_fraction(center[0]), _as_fraction(center[1]))
            else:
                cz = complex(center) if not isinstance(center, Fraction) else center
                c = (_as_fraction(cz.real), _as_fraction(cz.imag)) if isinstance(cz, complex) else (cz, Fraction(0))
            ds.append(Disc(c, _as_fraction(radius), flag == "closed"))
        return cls(tuple(ivs), tuple(ds))

    def is_empty(self) -> bool:
        for iv in self.real_intervals:
            if iv.lo > iv.hi or (iv.lo == iv.hi and not (iv.lo_closed and iv.hi_closed)):
                return True
        for dc in self.disc_constraints:
            if dc.radius < 0 or (dc.radius == 0 and not dc.closed):
                return True
        return False

    def to_json(self) -> dict:
        return {
            "real": [[str(iv.lo), str(iv.hi), iv.flag()] for iv in self.real_intervals],
            "discs": [
                [str(dc.center[0]), str(dc.center[1]), str(dc.radius), "closed" if dc.closed else "open"]
                for dc in self.disc_constraints
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "BoxRegion":
        real = [(lo, hi, flag) for lo, hi, flag in doc.get("real", [])]
        discs = [((Fraction(re), Fraction(im)), r, flag) for re, im, r, flag in doc.get("discs", [])]
        return cls.make(real, discs)


def contains(f: NumberField, region: BoxRegion, x: OrderElement) -> bool:
    """Exact membership of sigma(x) in the region."""
    for j, iv in enumerate(region.real_intervals):
        lo = sign_at_place(f, x, j, iv.lo)
        if lo < 0 or (lo == 0 and not iv.lo_closed):
            return False
        hi = sign_at_place(f, x, j, iv.hi)
        if hi > 0 or (hi == 0 and not iv.hi_closed):
            return False
    for k, dc in enumerate(region.disc_constraints):
        c = compare_modulus_at_place(f, x, f.s + k, dc.radius, dc.center)
        if c > 0 or (c == 0 and not dc.closed):
            return False
    return True


# --------------------------------------------------------------------------
# enumeration
# --------------------------------------------------------------------------


def _coefficient_bounds(L: MinkowskiLattice, region: BoxRegion) -> list[tuple[int, int]]:
    """Certified integer ranges for each coordinate from tau^-1 on the bounding box."""
    box: list[tuple[Fraction, Fraction]] = [(iv.lo, iv.hi) for iv in region.real_intervals]
    for dc in region.disc_constraints:
        box.append((dc.center[0] - dc.radius, dc.center[0] + dc.radius))
        box.append((dc.center[1] - dc.radius, dc.center[1] + dc.radius))
    out = []
    for i in range(L.degree):
        lo_sum = Fraction(0)
        hi_sum = Fraction(0)
        for l, (a, b) in enumerate(box):
            tlo, thi = L.tau_inverse[l][i].real_interval()
            prods = [a * tlo, a * thi, b * tlo, b * thi]
            lo_sum += min(prods)
            hi_sum += max(prods)
        out.append((math.ceil(lo_sum), math.floor(hi_sum)))
    return out


def _float_box(region: BoxRegion) -> tuple[list[float], list[float]]:
    centers, halves = [], []
    for iv in region.real_intervals:
        centers.append(float((iv.lo + iv.hi) / 2))
        halves.append(float((iv.hi - iv.lo) / 2))
    for dc in region.disc_constraints:
        for c in dc.center:
            centers.append(float(c))
            halves.append(float(dc.radius))
    return centers, halves


def _ldl(gram: list[list[mpf]]) -> list[list[float]]:
    """Upper decomposition Q(z) = sum_i q_ii (z_i + sum_{j>i} q_ij z_j)^2."""
    n = len(gram)
    q = [[mpf(v) for v in row] for row in gram]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] = q[k][l] - q[k][i] * q[i][l]
    return [[float(q[i][j]) if j >= i else 0.0 for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class _Plan:
    q: list[list[float]]
    u: list[float]
    radius2: float
    bounds: list[tuple[int, int]]


def _plan(L: MinkowskiLattice, region: BoxRegion) -> _Plan | None:
    d = L.degree
    bounds = _coefficient_bounds(L, region)
    if any(lo > hi for lo, hi in bounds):
        return None
    centers, halves = _float_box(region)
    with mpmath.workprec(max(L.precision, 128)):
        tmat = [[row[l].center.real for l in range(d)] for row in L.tau_matrix]
        tinv = [[row[i].center.real for i in range(d)] for row in L.tau_inverse]
        scale = [max(mpf(h), mpf(2) ** -40 * (1 + abs(mpf(c)))) for h, c in zip(halves, centers)]
        a = [[tmat[i][l] / scale[l] for l in range(d)] for i in range(d)]
        gram = [[mpmath.fsum(a[i][l] * a[k][l] for l in range(d)) for k in range(d)] for i in range(d)]
        u = [float(mpmath.fsum(mpf(centers[l]) * tinv[l][i] for l in range(d))) for i in range(d)]
        q = _ldl(gram)
    radius2 = d * (1 + 1e-6) + 1e-6
    return _Plan(q, u, radius2, bounds)


def _fp_candidates(plan: _Plan, top_values: Sequence[int] | None = None) -> list[tuple[int, ...]]:
    """Fincke-Pohst style enumeration of integer points of the bounding ellipsoid."""
    q, u, R = plan.q, plan.u, plan.radius2
    d = len(u)
    out: list[tuple[int, ...]] = []
    z = [0] * d

    def rec(i: int, remaining: float):
        # center for coordinate i given coordinates i+1..d-1
        shift = 0.0
        for j in range(i + 1, d):
            shift += q[i][j] * (z[j] - u[j])
        c = u[i] - shift
        width = math.sqrt(max(remaining, 0.0) / q[i][i]) + 1e-7 * (1 + abs(c))
        lo = max(math.ceil(c - width), plan.bounds[i][0])
        hi = min(math.floor(c + width), plan.bounds[i][1])
        values = range(lo, hi + 1)
        if i == d - 1 and top_values is not None:
            values = [v for v in top_values if lo <= v <= hi]
        for v in values:
            z[i] = v
            t = v - c
            rem = remaining - q[i][i] * t * t
            if rem < -1e-7 * (1 + remaining):
                continue
            if i == 0:
                out.append(tuple(z))
            else:
                rec(i - 1, rem)

    rec(d - 1, R)
    return out


def _top_range(plan: _Plan) -> list[int]:
    d = len(plan.u)
    c = plan.u[d - 1]
    width = math.sqrt(plan.radius2 / plan.q[d - 1][d - 1]) + 1e-7 * (1 + abs(c))
    lo = max(math.ceil(c - width), plan.bounds[d - 1][0])
    hi = min(math.floor(c + width), plan.bounds[d - 1][1])
    return list(range(lo, hi + 1))


def _float_verdict(f: NumberField, region: BoxRegion, coords: Sequence[int]) -> int | None:
    """1 inside, 0 outside, None when floating point cannot tell."""
    vals, errs = f.basis_floats()
    u53 = 2.0**-52
    d = f.degree
    for j, iv in enumerate(region.real_intervals):
        y = 0.0
        e = 0.0
        for c, v, er in zip(coords, vals[j], errs[j]):
            if c:
                y += c * v.real
                e += abs(c) * (abs(v.real) * (d + 2) * u53 + er)
        e = 2 * e + 4 * u53 * (abs(y) + abs(float(iv.lo)) + abs(float(iv.hi))) + 1e-300
        lo, hi = float(iv.lo), float(iv.hi)
        if y + e < lo or y - e > hi:
            return 0
        if not (y - e > lo and y + e < hi):
            return None
    for k, dc in enumerate(region.disc_constraints):
        j = f.s + k
        z = 0j
        e = 0.0
        for c, v, er in zip(coords, vals[j], errs[j]):
            if c:
                z += c * v
                e += abs(c) * (abs(v) * (d + 4) * u53 + er)
        cx, cy = float(dc.center[0]), float(dc.center[1])
        dist = math.hypot(z.real - cx, z.imag - cy)
        r = float(dc.radius)
        e = 3 * e + 8 * u53 * (dist + abs(cx) + abs(cy) + r + abs(z)) + 1e-300
        if dist - e > r:
            return 0
        if not dist + e < r:
            return None
    return 1


def _accept(f: NumberField, region: BoxRegion, coords: Sequence[int]) -> bool:
    v = _float_verdict(f, region, coords)
    if v is not None:
        return bool(v)
    return contains(f, region, OrderElement(coords))


def _chunk_worker(args):
    L, region, plan, tops = args
    f = L.field
    return [c for c in _fp_candidates(plan, tops) if _accept(f, region, c)]


def sort_key(f: NumberField, x: OrderElement):
    b = embed(f, x)[0]
    return (b.center.real, x.coords)


def enumerate_lattice_points(L: MinkowskiLattice, region: BoxRegion, workers: int = 1) -> list[OrderElement]:
    """All order elements x with sigma(x) in the (bounded) region, sorted by sigma_1.

    With ``workers > 1`` the outermost coordinate range is split across
    processes; the merged result is identical for any worker count.
    """
    f = L.field
    if len(region.real_intervals) != f.s or len(region.disc_constraints) != f.t:
        raise ValueError(f"region must have {f.s} intervals and {f.t} discs")
    if region.is_empty():
        return []
    plan = _plan(L, region)
    if plan is None:
        return []
    if workers <= 1:
        found = _chunk_worker((L, region, plan, None))
    else:
        tops = _top_range(plan)
        chunks = [tops[i::workers] for i in range(workers)]
        chunks = [c for c in chunks if c]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_worker, [(L, region, plan, c) for c in chunks]))
        found = [c for part in parts for c in part]
    elements = sorted({OrderElement(c) for c in found}, key=lambda x: sort_key(f, x))
    return elements


# --------------------------------------------------------------------------
# constructive steps
# --------------------------------------------------------------------------


def box_E(L: MinkowskiLattice, rho: RhoVector, c: Fraction, epsilon) -> BoxRegion:
    """The compact symmetric box of volume >= 2^d covol used to find alpha."""
    f = L.field
    eps = _as_fraction(epsilon)
    real = [(-c / rho.rho[0], c / rho.rho[0], "closed")]
    for j in range(1, f.s):
        real.append((-eps / rho.rho[j], eps / rho.rho[j], "closed"))
    discs = [((Fraction(0), Fraction(0)), eps / rho.disc_radius[f.s + k], "closed") for k in range(f.t)]
    return BoxRegion.make(real, discs)


def find_alpha(L: MinkowskiLattice, rho: RhoVector, c: Fraction, epsilon) -> OrderElement:
    """A nonzero lattice point of the box E (Minkowski guarantees one exists).

    Picks the point with the smallest positive sigma_1.
    """
    f = L.field
    key = ("alpha", L.precision, rho.rho, Fraction(c), _as_fraction(epsilon))
    if key in f._cache:
        return f._cache[key]
    pts = [x for x in enumerate_lattice_points(L, box_E(L, rho, c, epsilon)) if not x.is_zero()]
    positive = [x for x in pts if sign_at_place(f, x, 0, 0) > 0]
    if not positive:
        raise InternalConsistencyError("Minkowski box contains no nonzero lattice point")
    alpha = positive[0]
    f._cache[key] = alpha
    return alpha


@dataclass(frozen=True)
class RoundingResult:
    beta: OrderElement
    residual: tuple[CertifiedComplex, ...]


def _target_balls(target: Sequence) -> list[CertifiedComplex]:
    out = []
    for v in target:
        if isinstance(v, CertifiedComplex):
            out.append(v)
        elif isinstance(v, tuple):
            out.append(CertifiedComplex.exact(_as_fraction(v[0])) + CertifiedComplex.exact(_as_fraction(v[1])) * CertifiedComplex(1j))
        elif isinstance(v, complex):
            out.append(CertifiedComplex.exact(v))
        else:
            out.append(CertifiedComplex.exact(_as_fraction(v)))
    return out


def round_to_lattice(L: MinkowskiLattice, target: Sequence, rho: RhoVector | None = None) -> RoundingResult:
    """Write target = sigma(beta) + b with beta = sum floor(r_i) omega_i.

    The residual b lies in the fundamental parallelepiped, hence in the
    radius box; that containment is re-checked with certified arithmetic.
    """
    f = L.field
    if len(target) != f.places:
        raise ValueError(f"target needs {f.places} components")
    rho = rho or compute_rho(L)
    chosen: list[int] | None = None
    for prec in precision_ladder(L.precision, f.max_precision):
        lat = L if prec == L.precision else build_lattice(f, prec)
        with mpmath.workprec(prec):
            tvec = tau(_target_balls(target), f.s)
            floors = []
            ambiguous = False
            for i in range(f.degree):
                acc = CertifiedComplex(0)
                for l in range(f.degree):
                    acc = acc + tvec[l] * lat.tau_inverse[l][i]
                lo, hi = acc.real_interval()
                fl = math.floor(lo)
                if math.floor(hi) != fl:
                    ambiguous = True
                    fl = math.floor(mpf_to_fraction(acc.center.real))
                floors.append(fl)
        chosen = floors
        if not ambiguous:
            break
    beta = OrderElement(chosen)
    with mpmath.workprec(L.precision):
        tb = _target_balls(target)
        sb = embed(f, beta, L.precision)
        residual = tuple(t - v for t, v in zip(tb, sb))
        for j, b in enumerate(residual):
            bound = rho.rho[j] if j < f.s else rho.disc_radius[j]
            try:
                inside = b.compare_modulus(bound) <= 0
            except Inconclusive:
                inside = True  # touching the boundary of a closed ball is allowed
            if not inside:
                raise InternalConsistencyError(f"rounding residual escapes the radius box at place {j}")
    return RoundingResult(beta, residual)


def lattice_product(L: MinkowskiLattice, a: OrderElement, b: OrderElement) -> OrderElement:
    return element_mul(L.field, a, b)
