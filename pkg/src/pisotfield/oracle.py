"""Brute-force reference implementations.

Nothing here touches the lattice machinery: coefficient ranges come from a
trace-dual norm bound, candidates come from a full hypercube scan, and the
Pisot test uses sympy's exact root isolation.  Agreement with the engine is
therefore evidence rather than a tautology.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
import sympy as sp

from .exact import frac_inverse
from .field import NumberField, OrderElement, mult_matrix
from .poly import IntPolynomial

_X = sp.Symbol("x")


@dataclass(frozen=True)
class OracleConfig:
    coefficient_bound: int | None = None  # None: use the computed requirement
    precision: int = 128

    def __post_init__(self):
        if self.coefficient_bound is not None and self.coefficient_bound < 1:
            raise ValueError("coefficient_bound must be >= 1")


def _roots(f: NumberField, prec: int) -> list:
    coeffs = list(reversed(f.spec.defining_poly.coeffs))
    with mpmath.workprec(prec):
        if f.degree == 1:
            return [mpmath.mpf(-coeffs[1])]
        return mpmath.polyroots(coeffs, maxsteps=200, extraprec=prec)


def _conjugates(f: NumberField, prec: int) -> list[list]:
    """vals[j][i] = j-th conjugate of omega_i over all d complex roots (mpmath).

    Row 0 is the identity embedding (the largest real root).
    """
    with mpmath.workprec(prec):
        roots = _roots(f, prec)
        real = [r for r in roots if abs(mpmath.im(r)) < mpmath.mpf(2) ** (-prec // 2)]
        top = max(real, key=lambda r: mpmath.re(r))
        roots = [top] + [r for r in roots if r is not top]
        out = []
        for r in roots:
            row = []
            for brow in f.spec.basis_matrix:
                row.append(mpmath.fsum(mpmath.mpf(b.numerator) / b.denominator * r**k for k, b in enumerate(brow)))
            out.append(row)
    return out


def required_bound(f: NumberField, X, conj_bound=1) -> int:
    """Bound on |coords| for elements with sigma_1 in [0, X] and other conjugates <= conj_bound.

    With the trace-dual basis omega*_i, a coordinate is r_i = Tr(x omega*_i), so
    |r_i| <= (X + (d-1) * conj_bound) * max_j |sigma_j(omega*_i)|.
    """
    d = f.degree
    traces = [sum(f.mult_table[k][m][m] for m in range(d)) for k in range(d)]
    gram = [[Fraction(sum(f.mult_table[i][j][k] * traces[k] for k in range(d))) for j in range(d)] for i in range(d)]
    ginv = frac_inverse(gram)
    conj = _conjugates(f, 64)
    worst = 0.0
    for i in range(d):
        for row in conj:
            v = abs(complex(sum(complex(row[k]) * float(ginv[k][i]) for k in range(d))))
            worst = max(worst, v)
    total = float(X) + (d - 1) * float(conj_bound)
    return int(math.floor(total * worst * 1.01)) + 1


def _sympy_poly(p: IntPolynomial) -> sp.Poly:
    return sp.Poly(list(reversed(p.coeffs)), _X)


def _has_circle_root(p: sp.Poly) -> bool:
    if p.eval(1) == 0 or p.eval(-1) == 0:
        return True
    g = sp.gcd(p, sp.Poly(list(reversed(p.all_coeffs())), _X))
    if g.degree() <= 0:
        return False
    # z on the circle, z != +-1  <=>  w = z + 1/z is real in (-2, 2)
    w = sp.Symbol("w")
    rp = sp.Poly(sp.resultant(sp.Poly(_X**2 - w * _X + 1, _X), g), w)
    if rp.degree() <= 0:
        return False
    ends = (rp.eval(2) == 0) + (rp.eval(-2) == 0)
    return rp.count_roots(-2, 2) - ends > 0


def _inside_count(p: sp.Poly) -> int:
    """Roots strictly inside the unit circle, from refined exact isolating boxes.

    Assumes no root lies on the circle, so refinement terminates.
    """
    eps = Fraction(1, 2**10)
    while True:
        reals, cplx = p.intervals(all=True, eps=eps)
        inside = 0
        undecided = False
        for (a, b), m in reals:
            a, b = Fraction(str(a)), Fraction(str(b))
            if -1 < a and b < 1:
                inside += m
            elif not (a > 1 or b < -1):
                undecided = True
        for (lo, hi), m in cplx:
            xs = [Fraction(str(sp.re(lo))), Fraction(str(sp.re(hi)))]
            ys = [Fraction(str(sp.im(lo))), Fraction(str(sp.im(hi)))]
            far = max(v * v for v in xs) + max(v * v for v in ys)
            nx = 0 if xs[0] <= 0 <= xs[1] else min(v * v for v in xs)
            ny = 0 if ys[0] <= 0 <= ys[1] else min(v * v for v in ys)
            if far < 1:
                inside += m
            elif nx + ny <= 1:
                undecided = True
        if not undecided:
            return inside
        eps /= 2**8


def independent_min_poly(f: NumberField, x: OrderElement, precision: int = 128) -> IntPolynomial:
    """Minimal polynomial as a rounded product over clustered conjugates.

    The rounded candidate is accepted only after it is checked to annihilate
    the exact multiplication matrix of x.
    """
    d = f.degree
    m = mult_matrix(f, x)
    prec = precision
    while prec <= f.max_precision:
        conj = _conjugates(f, prec)
        with mpmath.workprec(prec):
            vals = [mpmath.fsum(c * b for c, b in zip(x.coords, row)) for row in conj]
            tol = mpmath.mpf(2) ** (-prec // 3) * (1 + max(abs(v) for v in vals))
            for k in (k for k in range(1, d + 1) if d % k == 0):
                reps: list = []
                sizes: list[int] = []
                for v in vals:
                    for idx, r in enumerate(reps):
                        if abs(v - r) < tol:
                            sizes[idx] += 1
                            break
                    else:
                        reps.append(v)
                        sizes.append(1)
                if len(reps) != k or any(sz != d // k for sz in sizes):
                    continue
                poly = [mpmath.mpc(1)]
                for r in reps:
                    poly = [a - r * b for a, b in zip(poly + [0], [0] + poly)]
                # poly is ascending after reversal below
                coeffs = []
                ok = True
                for cval in reversed(poly):
                    re = cval.real
                    n = int(mpmath.nint(re))
                    if abs(re - n) > 0.25 or abs(cval.imag) > 0.25:
                        ok = False
                        break
                    coeffs.append(n)
                if ok:
                    cand = IntPolynomial(coeffs)
                    if _annihilates(cand, m):
                        return cand
        prec *= 2
    raise ArithmeticError(f"independent minimal polynomial of {x} not found")


def _annihilates(p: IntPolynomial, m: list[list[int]]) -> bool:
    d = len(m)
    acc = [[0] * d for _ in range(d)]
    for c in reversed(p.coeffs):
        acc = [[sum(acc[i][k] * m[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
        for i in range(d):
            acc[i][i] += c
    return all(v == 0 for row in acc for v in row)


def is_pisot_reference(f: NumberField, x: OrderElement, X=None) -> bool:
    """Definition check: degree d, one conjugate in (1, X], the rest inside the circle."""
    p = independent_min_poly(f, x)
    if p.degree != f.degree:
        return False
    sp_p = _sympy_poly(p)
    if _has_circle_root(sp_p):
        return False
    if sp_p.count_roots(1, None) != 1 or sp_p.eval(1) == 0:
        return False
    if _inside_count(sp_p) != f.degree - 1:
        return False
    # the root above 1 must be sigma_1(x) itself and must not exceed X
    conj = _conjugates(f, 200)
    ident = 0
    with mpmath.workprec(200):
        v = mpmath.fsum(c * b for c, b in zip(x.coords, conj[ident]))
        if v.real <= 1:
            return False
    if X is not None:
        Xr = sp.Rational(Fraction(X).numerator, Fraction(X).denominator)
        if sp_p.count_roots(1, Xr) != 1:
            return False
    return True


def brute_force_pisot(f: NumberField, X, cfg: OracleConfig | None = None) -> list[OrderElement]:
    """Pisot generators in (1, X] by scanning the whole coefficient hypercube."""
    cfg = cfg or OracleConfig()
    X = Fraction(X)
    if X <= 1:
        return []
    need = required_bound(f, X)
    bound = cfg.coefficient_bound if cfg.coefficient_bound is not None else need
    if bound < need:
        raise ValueError(f"coefficient bound {bound} too small; the region needs {need}")
    d = f.degree
    conj = _conjugates(f, 64)
    mat = np.array([[complex(v) for v in row] for row in conj])  # (d conjugates, d basis)
    ident = 0
    others = [j for j in range(d) if j != ident]
    rng = np.arange(-bound, bound + 1)
    found = []
    tol = 1e-6
    xf = float(X)
    # scan in slabs over the first coordinate to bound memory
    rest = list(itertools.product(rng, repeat=d - 1))
    rest_grid = np.array(rest, dtype=float).reshape(len(rest), d - 1)
    for a in rng:
        coords = np.hstack([np.full((rest_grid.shape[0], 1), float(a)), rest_grid])
        vals = coords @ mat.T
        main = vals[:, ident]
        keep = (main.real > 1 - tol) & (main.real <= xf + tol)
        for j in others:
            keep &= np.abs(vals[:, j]) < 1 + tol
        for row in coords[keep]:
            el = OrderElement(int(round(v)) for v in row)
            if is_pisot_reference(f, el, X):
                found.append((float((row @ mat.T)[ident].real), el))
    found.sort(key=lambda t: (t[0], t[1].coords))
    return [el for _, el in found]
