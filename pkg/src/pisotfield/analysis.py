"""Gap sets, the set E_K, and verifiers for the structural claims about them.

Reports are plain dataclasses with ``to_json`` (schema "v1") and
``csv_rows``; identical inputs give identical output.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product
from typing import Any, Sequence

import mpmath

from .certified import CertifiedComplex, escalate
from .errors import PrecisionExhausted
from .field import (
    NumberField,
    OrderElement,
    compare_modulus_at_place,
    embed,
    norm,
    rational_value,
    sign_at_place,
)
from .minkowski import BoxRegion, _as_fraction, bound_BK, constant_c, enumerate_lattice_points
from .pisot import (
    PisotCertificate,
    Theorem1Query,
    certify_pisot,
    decompose_in_EK,
    enumerate_pisot,
    field_constants,
    theorem1_construct,
)

SCHEMA = "v1"


def _num(b: CertifiedComplex, digits: int = 20) -> dict:
    return b.to_json(digits)


# --------------------------------------------------------------------------
# gaps
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GapReport:
    field: str
    X: Fraction
    pisot_values: tuple[PisotCertificate, ...]
    gaps: tuple[OrderElement, ...]
    distinct: tuple[tuple[OrderElement, int], ...]  # (gap, multiplicity), ascending
    min_gap: OrderElement | None
    max_gap: OrderElement | None
    enclosures: dict = dc_field(default_factory=dict, compare=False)

    @property
    def distinct_gap_count(self) -> int:
        return len(self.distinct)

    def to_json(self) -> dict:
        enc = self.enclosures
        return {
            "schema": SCHEMA,
            "report": "gaps",
            "field": self.field,
            "X": str(self.X),
            "pisot": [c.to_json() for c in self.pisot_values],
            "gaps": [g.to_json() for g in self.gaps],
            "distinct_gaps": [
                {"coords": g.to_json(), "multiplicity": m, "value": _num(enc[g])} for g, m in self.distinct
            ],
            "distinct_gap_count": self.distinct_gap_count,
            "min_gap": None if self.min_gap is None else {"coords": self.min_gap.to_json(), "value": _num(enc[self.min_gap])},
            "max_gap": None if self.max_gap is None else {"coords": self.max_gap.to_json(), "value": _num(enc[self.max_gap])},
        }

    def csv_rows(self) -> list[dict]:
        rows = [
            {"kind": "pisot", "index": i, "coords": _coords(c.element), "value": _dec(c.value_enclosure)}
            for i, c in enumerate(self.pisot_values)
        ]
        rows += [
            {"kind": "gap", "index": i, "coords": _coords(g), "value": _dec(self.enclosures[g])}
            for i, g in enumerate(self.gaps)
        ]
        return rows


def _coords(x: OrderElement) -> str:
    return ",".join(map(str, x.coords))


def _dec(b: CertifiedComplex) -> str:
    return mpmath.nstr(b.center.real, 20)


def _sorted_elements(f: NumberField, xs) -> list[OrderElement]:
    return sorted(set(xs), key=lambda x: (embed(f, x)[0].center.real, x.coords))


def consecutive_gaps(f: NumberField, X, workers: int = 1, pisot: Sequence[PisotCertificate] | None = None) -> GapReport:
    X = _as_fraction(X)
    certs = tuple(pisot if pisot is not None else enumerate_pisot(f, X, workers))
    gaps = tuple(b.element - a.element for a, b in zip(certs, certs[1:]))
    mult: dict[OrderElement, int] = {}
    for g in gaps:
        mult[g] = mult.get(g, 0) + 1
    order = _sorted_elements(f, mult)
    enclosures = {g: embed(f, g)[0] for g in order}
    return GapReport(
        field=f.name,
        X=X,
        pisot_values=certs,
        gaps=gaps,
        distinct=tuple((g, mult[g]) for g in order),
        min_gap=order[0] if order else None,
        max_gap=order[-1] if order else None,
        enclosures=enclosures,
    )


# --------------------------------------------------------------------------
# E_K
# --------------------------------------------------------------------------

IN = "in"
OUT = "out"
OUT_BOUNDARY = "out, boundary"


@dataclass(frozen=True)
class EKCertificate:
    element: OrderElement
    conjugate_moduli: tuple[CertifiedComplex, ...]
    rho_max: CertifiedComplex
    verdict: str
    evidence: str

    @property
    def inside(self) -> bool:
        return self.verdict == IN

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "report": "ek-test",
            "coords": self.element.to_json(),
            "conjugate_moduli": [_num(m) for m in self.conjugate_moduli],
            "rho_max": _num(self.rho_max),
            "verdict": self.verdict,
            "evidence": self.evidence,
        }

    def csv_rows(self) -> list[dict]:
        return [{"coords": _coords(self.element), "rho_max": _dec(self.rho_max), "verdict": self.verdict}]


def is_in_EK(f: NumberField, beta: OrderElement) -> EKCertificate:
    """beta > 0 and every non-identity conjugate of modulus < 2, decided exactly."""
    vals = embed(f, beta)
    with mpmath.workprec(f.precision):
        moduli = tuple(v.abs() for v in vals[1:])
    rho = max(moduli, key=lambda m: m.center.real) if moduli else CertifiedComplex(0)
    if sign_at_place(f, beta, 0, 0) <= 0:
        return EKCertificate(beta, moduli, rho, OUT, "not positive")
    boundary = None
    for j in range(1, f.places):
        c = compare_modulus_at_place(f, beta, j, 2)
        if c > 0:
            return EKCertificate(beta, moduli, rho, OUT, f"|sigma_{j + 1}| > 2")
        if c == 0 and boundary is None:
            boundary = j
    if boundary is not None:
        return EKCertificate(beta, moduli, rho, OUT_BOUNDARY, f"|sigma_{boundary + 1}| = 2 exactly")
    how = "rational" if rational_value(f, beta) is not None else "certified"
    return EKCertificate(beta, moduli, rho, IN, how)


def ek_region(f: NumberField, bound: Fraction) -> BoxRegion:
    real = [(Fraction(0), bound, "open-closed")] + [(-2, 2, "open")] * (f.s - 1)
    discs = [((Fraction(0), Fraction(0)), 2, "open")] * f.t
    return BoxRegion.make(real, discs)


def enumerate_EK(f: NumberField, bound, workers: int = 1) -> list[OrderElement]:
    bound = _as_fraction(bound)
    if bound <= 0:
        return []
    L, _ = field_constants(f)
    return enumerate_lattice_points(L, ek_region(f, bound), workers=workers)


# --------------------------------------------------------------------------
# verification reports
# --------------------------------------------------------------------------


@dataclass
class VerificationReport:
    claim: str
    parameters: dict
    verdict: str = "pass"
    witnesses: list = dc_field(default_factory=list)
    counterexamples: list = dc_field(default_factory=list)
    notes: list = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def fail(self, counterexample: dict) -> None:
        self.verdict = "fail"
        self.counterexamples.append(counterexample)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "report": "verification",
            "claim": self.claim,
            "parameters": self.parameters,
            "verdict": self.verdict,
            "witnesses": self.witnesses,
            "counterexamples": self.counterexamples,
            "notes": self.notes,
        }

    def csv_rows(self) -> list[dict]:
        rows = [{"kind": "witness", **_flat(w)} for w in self.witnesses]
        rows += [{"kind": "counterexample", **_flat(c)} for c in self.counterexamples]
        rows.append({"kind": "verdict", "verdict": self.verdict})
        return rows


def _flat(d: dict) -> dict:
    return {k: (v if isinstance(v, (str, int, float)) or v is None else json.dumps(v)) for k, v in d.items()}


def verify_EK_equals_DK(f: NumberField, bound, search_limit=None, workers: int = 1) -> VerificationReport:
    """Both inclusions on a finite window.

    E_K within (0, bound] is checked element by element with a decomposition;
    D_K within the window is checked on every pairwise difference of the
    Pisot numbers up to ``search_limit``.
    """
    bound = _as_fraction(bound)
    limit = _as_fraction(search_limit) if search_limit is not None else max(bound + 8, Fraction(20))
    rep = VerificationReport("E_K = D_K", {"field": f.name, "bound": str(bound), "search_limit": str(limit)})
    for beta in enumerate_EK(f, bound, workers):
        dec = decompose_in_EK(f, beta, count=1)[0]
        if dec.theta.element - dec.theta_minus_beta.element != beta:
            rep.fail({"beta": beta.to_json(), "problem": "coordinate identity broken"})
            continue
        rep.witnesses.append(
            {
                "beta": beta.to_json(),
                "theta": dec.theta.element.to_json(),
                "theta_minus_beta": dec.theta_minus_beta.element.to_json(),
                "method": dec.method,
            }
        )
    pis = enumerate_pisot(f, limit, workers)
    checked = 0
    for i, a in enumerate(pis):
        for b in pis[i + 1 :]:
            diff = b.element - a.element
            cert = is_in_EK(f, diff)
            checked += 1
            if not cert.inside:
                rep.fail({"pair": [a.element.to_json(), b.element.to_json()], "verdict": cert.verdict})
    rep.notes.append(f"{checked} pairwise Pisot differences tested for membership in E_K")
    return rep


def _real_part_sign(f: NumberField, x: OrderElement, j: int) -> int:
    if f.is_real_place(j):
        return sign_at_place(f, x, j, 0)

    def attempt(prec):
        return embed(f, x, prec)[j].compare_real(0)

    try:
        return escalate(attempt, f.precision, min(f.max_precision, 1024), "real part sign")
    except PrecisionExhausted:
        return 0


def verify_corollary3(f: NumberField, X, workers: int = 1, report: GapReport | None = None) -> VerificationReport:
    X = _as_fraction(X)
    gr = report or consecutive_gaps(f, X, workers)
    k = f.places - 1
    need = 2**k
    rep = VerificationReport(
        "card(C_K) >= 2^(s+t-1)",
        {"field": f.name, "X": str(X), "required": need},
    )
    rep.notes.append(f"distinct gap count {gr.distinct_gap_count}")
    if gr.distinct_gap_count < need:
        rep.fail({"distinct_gap_count": gr.distinct_gap_count, "required": need})
    signs = {g: tuple(_real_part_sign(f, g, j) for j in range(1, f.places)) for g, _ in gr.distinct}
    for pattern in product((-1, 1), repeat=k):
        want = tuple(-e for e in pattern)
        hit = next((g for g, _ in gr.distinct if signs[g] == want), None)
        rep.witnesses.append(
            {
                "pattern": list(pattern),
                "status": "witnessed" if hit is not None else "not yet observed",
                "gap": None if hit is None else hit.to_json(),
            }
        )
    rep.parameters["distinct_gap_count"] = gr.distinct_gap_count
    return rep


def _grid(step: Fraction) -> list[Fraction]:
    n = int(1 / step)
    return [k * step for k in range(-n, n + 1)]


def density_probe(f: NumberField, grid_step, epsilon, strategy: str = "constructive") -> VerificationReport:
    """Hit every admissible grid target within epsilon by a Pisot number."""
    step = _as_fraction(grid_step)
    eps = _as_fraction(epsilon)
    if not 0 < eps < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    rep = VerificationReport("Pisot conjugate vectors are dense", {"field": f.name, "grid_step": str(step), "epsilon": str(eps)})
    L, rho = field_constants(f)
    c = constant_c(L, rho, eps)
    x1 = c + 2
    axes = []
    for j in range(1, f.places):
        g = _grid(step)
        axes.append([(v, Fraction(0)) for v in g] if j < f.s else [(a, b) for a in g for b in g])
    probed = skipped = covered = 0
    for targets in product(*axes):
        room = 1 - eps
        if any(a * a + b * b >= room * room for a, b in targets):
            skipped += 1
            continue
        probed += 1
        q = Theorem1Query(x1, tuple(targets), eps)
        res = theorem1_construct(f, q, strategy)
        cert = certify_pisot(f, res.theta)
        entry = {"targets": [[str(a), str(b)] for a, b in targets], "theta": res.theta.to_json()}
        if isinstance(cert, PisotCertificate):
            covered += 1
            rep.witnesses.append(entry)
        else:
            rep.fail({**entry, "reason": cert.reason})
    rep.parameters.update({"probed": probed, "skipped": skipped, "coverage": (covered / probed) if probed else 1.0})
    if skipped:
        rep.notes.append(f"{skipped} grid targets skipped: their epsilon-neighbourhood leaves the open unit disc")
    return rep


def discreteness_check(f: NumberField, X, workers: int = 1, report: GapReport | None = None) -> VerificationReport:
    X = _as_fraction(X)
    gr = report or consecutive_gaps(f, X, workers)
    d = f.degree
    floor_gap = Fraction(1, 2 ** (d - 1))
    L, rho = field_constants(f)
    bk = bound_BK(L, rho)
    bk_lo = bk.real_interval()[0]
    rep = VerificationReport(
        "uniform discreteness and the B_K bound",
        {"field": f.name, "X": str(X), "min_gap_bound": str(floor_gap), "B_K": _num(bk)},
    )
    for g in gr.gaps:
        n = norm(f, g)
        if abs(n) < 1:
            rep.fail({"gap": g.to_json(), "norm": n})
        if sign_at_place(f, g, 0, floor_gap) < 0:
            rep.fail({"gap": g.to_json(), "problem": f"gap below {floor_gap}"})
    if gr.pisot_values:
        first = gr.pisot_values[0].element
        if sign_at_place(f, first, 0, bk_lo) > 0:
            rep.fail({"min_pisot": first.to_json(), "problem": "exceeds B_K"})
        rep.witnesses.append({"min_pisot": first.to_json(), "value": _dec(gr.pisot_values[0].value_enclosure)})
    if gr.max_gap is not None:
        if sign_at_place(f, gr.max_gap, 0, bk_lo) > 0:
            rep.fail({"max_gap": gr.max_gap.to_json(), "problem": "exceeds B_K"})
        rep.witnesses.append({"max_gap": gr.max_gap.to_json(), "value": _dec(gr.enclosures[gr.max_gap])})
        rep.witnesses.append({"min_gap": gr.min_gap.to_json(), "value": _dec(gr.enclosures[gr.min_gap])})
    rep.notes.append(f"{len(gr.gaps)} consecutive gaps checked")
    return rep


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------


def dumps_json(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def dumps_csv(rows: list[dict]) -> str:
    cols: list[str] = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()
