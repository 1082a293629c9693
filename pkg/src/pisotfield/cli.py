"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 precision
exhausted.  Output is deterministic: the same inputs give byte-identical
reports for any ``--workers`` value.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import mpmath

from . import analysis, oracle
from .certified import DEFAULT_PRECISION, MAX_PRECISION
from .errors import InvalidFieldSpec, NotInEK, PrecisionExhausted
from .field import NumberField, load_field, parse_coords
from .minkowski import bound_BK
from .pisot import (
    PisotCertificate,
    Theorem1Query,
    certify_pisot,
    decompose_in_EK,
    enumerate_pisot,
    epsilon_pisot_search,
    field_constants,
    min_pisot,
    theorem1_construct,
    verify_theorem1,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_PRECISION = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    precision: int = DEFAULT_PRECISION
    max_precision: int = MAX_PRECISION
    workers: int = 1
    output: str | None = None
    format: str = "json"
    cache_dir: str | None = None

    def __post_init__(self):
        if self.precision > self.max_precision:
            raise ValueError("precision exceeds max-precision")
        if self.precision < 64:
            raise ValueError("precision must be at least 64 bits")


class _Report:
    """A JSON document plus its CSV rows."""

    def __init__(self, doc: dict, rows: list[dict] | None = None, ok: bool = True):
        self.doc = doc
        self.rows = rows if rows is not None else [_flat_doc(doc)]
        self.ok = ok


def _flat_doc(doc: dict) -> dict:
    return {k: (v if isinstance(v, (str, int, float)) or v is None else json.dumps(v)) for k, v in doc.items()}


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InvalidFieldSpec("argument", f"not a rational number: {text!r}") from None


def _target(text: str) -> tuple[Fraction, Fraction]:
    parts = text.split(",")
    if len(parts) == 1:
        return (_frac(parts[0]), Fraction(0))
    if len(parts) == 2:
        return (_frac(parts[0]), _frac(parts[1]))
    raise InvalidFieldSpec("targets", f"expected 're' or 're,im', got {text!r}")


def resolve_spec(name: str) -> str:
    """A file path, or the stem of a bundled corpus spec such as ``q2``."""
    p = Path(name)
    if p.exists():
        return str(p)
    stem = p.name[:-5] if p.name.endswith(".json") else p.name
    bundled = resources.files("pisotfield") / "data" / f"{stem}.json"
    if bundled.is_file():
        return str(bundled)
    raise FileNotFoundError(f"field spec not found: {name}")


# --------------------------------------------------------------------------
# cache
# --------------------------------------------------------------------------


def cached_pisot(f: NumberField, X: Fraction, cfg: RunConfig) -> list[PisotCertificate]:
    if not cfg.cache_dir:
        return enumerate_pisot(f, X, cfg.workers)
    key = hashlib.sha256(f"{f.spec.digest()}|{X}|{cfg.precision}".encode()).hexdigest()[:32]
    path = Path(cfg.cache_dir) / f"pisot-{key}.json"
    if path.exists():
        coords = json.loads(path.read_text(encoding="utf-8"))["coords"]
        certs = [certify_pisot(f, f.element(c)) for c in coords]
        if all(isinstance(c, PisotCertificate) for c in certs):
            return certs
    certs = enumerate_pisot(f, X, cfg.workers)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({"X": str(X), "coords": [c.element.to_json() for c in certs]}) + "\n", encoding="utf-8")
    return certs


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _bk_audit(f: NumberField, bk) -> dict | None:
    """For x^2 - m with the power basis, compare B_K against the two closed forms."""
    p = f.spec.defining_poly.coeffs
    identity = all(f.spec.basis_matrix[i][j] == (i == j) for i in range(f.degree) for j in range(f.degree))
    if f.degree != 2 or p[1] != 0 or p[0] >= 0 or not identity:
        return None
    m = -p[0]
    r = math.sqrt(m)
    return {
        "m": m,
        "computed_B_K": mpmath.nstr(bk.center.real, 15),
        "closed_form_4m(1+sqrt m)": f"{4 * m * (1 + r):.12g}",
        "direct_substitution_2m(1+sqrt m)": f"{2 * m * (1 + r):.12g}",
        "note": (
            "the stated quadratic closed form 4m(1+sqrt m) disagrees with substituting rho into the "
            "general formula; only the general-formula value is used anywhere in this package"
        ),
    }


def cmd_field_info(f: NumberField, args, cfg: RunConfig) -> _Report:
    L, rho = field_constants(f)
    bk = bound_BK(L, rho)
    doc = {
        "schema": analysis.SCHEMA,
        "report": "field-info",
        "field": f.name,
        "spec_digest": f.spec.digest(),
        "degree": f.degree,
        "signature": list(f.signature),
        "discriminant": f.discriminant,
        "places": [r.to_json() for r in f.roots(f.precision)],
        "volume": L.volume.to_json(),
        "rho": [mpmath.nstr(mpmath.mpf(r.numerator) / r.denominator, 20) for r in rho.rho],
        "B_K": bk.to_json(),
    }
    audit = _bk_audit(f, bk)
    if audit:
        doc["B_K_audit"] = audit
    return _Report(doc)


def cmd_pisot_enum(f, args, cfg) -> _Report:
    X = _frac(args.max)
    certs = cached_pisot(f, X, cfg)
    doc = {
        "schema": analysis.SCHEMA,
        "report": "pisot-enum",
        "field": f.name,
        "X": str(X),
        "count": len(certs),
        "pisot": [c.to_json() for c in certs],
    }
    rows = [{"index": i, "coords": ",".join(map(str, c.element.coords)), "value": mpmath.nstr(c.value_enclosure.center.real, 20)} for i, c in enumerate(certs)]
    return _Report(doc, rows)


def cmd_pisot_min(f, args, cfg) -> _Report:
    c = min_pisot(f, cfg.workers)
    doc = {"schema": analysis.SCHEMA, "report": "pisot-min", "field": f.name, **c.to_json()}
    return _Report(doc)


def cmd_gaps(f, args, cfg) -> _Report:
    X = _frac(args.max)
    rep = analysis.consecutive_gaps(f, X, pisot=cached_pisot(f, X, cfg))
    return _Report(rep.to_json(), rep.csv_rows())


def cmd_ek_test(f, args, cfg) -> _Report:
    cert = analysis.is_in_EK(f, parse_coords(args.element, f.degree))
    return _Report(cert.to_json(), cert.csv_rows())


def cmd_ek_enum(f, args, cfg) -> _Report:
    B = _frac(args.max)
    els = analysis.enumerate_EK(f, B, cfg.workers)
    doc = {"schema": analysis.SCHEMA, "report": "ek-enum", "field": f.name, "bound": str(B), "elements": [e.to_json() for e in els]}
    return _Report(doc, [{"index": i, "coords": ",".join(map(str, e.coords))} for i, e in enumerate(els)])


def cmd_decompose(f, args, cfg) -> _Report:
    beta = parse_coords(args.element, f.degree)
    limit = _frac(args.search_limit) if args.search_limit else None
    decs = decompose_in_EK(f, beta, limit, count=args.count)
    doc = {
        "schema": analysis.SCHEMA,
        "report": "decompose",
        "field": f.name,
        "beta": beta.to_json(),
        "decompositions": [d.to_json() for d in decs],
    }
    rows = [
        {"index": i, "theta": ",".join(map(str, d.theta.element.coords)), "theta_minus_beta": ",".join(map(str, d.theta_minus_beta.element.coords)), "method": d.method}
        for i, d in enumerate(decs)
    ]
    return _Report(doc, rows)


def cmd_theorem1(f, args, cfg) -> _Report:
    q = Theorem1Query(_frac(args.x1), tuple(_target(t) for t in args.targets or []), _frac(args.eps))
    res = theorem1_construct(f, q, args.strategy)
    cert = certify_pisot(f, res.theta)
    doc = {
        "schema": analysis.SCHEMA,
        "report": "theorem1",
        "field": f.name,
        "query": q.to_json(),
        "strategy": res.strategy,
        "c": mpmath.nstr(mpmath.mpf(res.c.numerator) / res.c.denominator, 20),
        "theta": res.theta.to_json(),
        "alpha": None if res.alpha is None else res.alpha.to_json(),
        "beta": None if res.beta is None else res.beta.to_json(),
        "pisot": isinstance(cert, PisotCertificate),
        "verified": verify_theorem1(f, q, res.theta, res.c),
    }
    return _Report(doc)


def cmd_epsilon_pisot(f, args, cfg) -> _Report:
    cert = epsilon_pisot_search(f, _frac(args.eps), start=_frac(args.start))
    doc = {"schema": analysis.SCHEMA, "report": "epsilon-pisot", "field": f.name, "eps": args.eps, "from": args.start, **cert.to_json()}
    return _Report(doc)


def _verification(rep: analysis.VerificationReport) -> _Report:
    return _Report(rep.to_json(), rep.csv_rows(), rep.passed)


def cmd_verify(f, args, cfg) -> _Report:
    claim = args.claim
    if claim == "eq-ek-dk":
        limit = _frac(args.search_limit) if args.search_limit else None
        return _verification(analysis.verify_EK_equals_DK(f, _frac(args.bound), limit, cfg.workers))
    if claim == "corollary3":
        X = _frac(args.max)
        gr = analysis.consecutive_gaps(f, X, pisot=cached_pisot(f, X, cfg))
        return _verification(analysis.verify_corollary3(f, X, report=gr))
    if claim == "density":
        return _verification(analysis.density_probe(f, _frac(args.step), _frac(args.eps), args.strategy))
    if claim == "discreteness":
        X = _frac(args.max)
        gr = analysis.consecutive_gaps(f, X, pisot=cached_pisot(f, X, cfg))
        return _verification(analysis.discreteness_check(f, X, report=gr))
    raise InvalidFieldSpec("claim", f"unknown claim {claim!r}")


def cmd_oracle_pisot(f, args, cfg) -> _Report:
    X = _frac(args.max)
    conf = oracle.OracleConfig(args.coefficient_bound, cfg.precision)
    els = oracle.brute_force_pisot(f, X, conf)
    doc = {"schema": analysis.SCHEMA, "report": "oracle-pisot", "field": f.name, "X": str(X), "elements": [e.to_json() for e in els]}
    return _Report(doc, [{"index": i, "coords": ",".join(map(str, e.coords))} for i, e in enumerate(els)])


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION, help="starting precision in bits")
    common.add_argument("--max-precision", type=int, default=MAX_PRECISION, help="precision cap in bits")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--output", "-o", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--cache-dir", help="memoize Pisot enumerations here")

    parser = argparse.ArgumentParser(prog="pisotfield", description="Pisot numbers of a real number field")
    sub = parser.add_subparsers(dest="command", required=True)

    def leaf(container, name, fn, **kw):
        p = container.add_parser(name, parents=[common], **kw)
        p.add_argument("spec", help="field-spec JSON file or bundled name (q2, cubic-x-1, ...)")
        p.set_defaults(fn=fn)
        return p

    field = sub.add_parser("field").add_subparsers(dest="sub", required=True)
    leaf(field, "info", cmd_field_info)

    pisot = sub.add_parser("pisot").add_subparsers(dest="sub", required=True)
    leaf(pisot, "enum", cmd_pisot_enum).add_argument("--max", required=True)
    leaf(pisot, "min", cmd_pisot_min)

    leaf(sub, "gaps", cmd_gaps).add_argument("--max", required=True)

    ek = sub.add_parser("ek").add_subparsers(dest="sub", required=True)
    leaf(ek, "test", cmd_ek_test).add_argument("--element", required=True)
    leaf(ek, "enum", cmd_ek_enum).add_argument("--max", required=True)

    p = leaf(sub, "decompose", cmd_decompose)
    p.add_argument("--element", required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--search-limit")

    p = leaf(sub, "theorem1", cmd_theorem1)
    p.add_argument("--x1", required=True)
    p.add_argument("--targets", nargs="*", default=[], help="'re' for real places, 're,im' for complex ones")
    p.add_argument("--eps", required=True)
    p.add_argument("--strategy", choices=("constructive", "direct"), default="constructive")

    p = leaf(sub, "epsilon-pisot", cmd_epsilon_pisot)
    p.add_argument("--eps", required=True)
    p.add_argument("--from", dest="start", required=True)

    verify = sub.add_parser("verify").add_subparsers(dest="claim", required=True)
    p = leaf(verify, "eq-ek-dk", cmd_verify)
    p.add_argument("--bound", default="4")
    p.add_argument("--search-limit")
    leaf(verify, "corollary3", cmd_verify).add_argument("--max", required=True)
    p = leaf(verify, "density", cmd_verify)
    p.add_argument("--step", default="1/2")
    p.add_argument("--eps", default="1/4")
    p.add_argument("--strategy", choices=("constructive", "direct"), default="constructive")
    leaf(verify, "discreteness", cmd_verify).add_argument("--max", required=True)

    orc = sub.add_parser("oracle").add_subparsers(dest="sub", required=True)
    p = leaf(orc, "pisot", cmd_oracle_pisot)
    p.add_argument("--max", required=True)
    p.add_argument("--coefficient-bound", type=int)
    return parser


def _emit(report: _Report, cfg: RunConfig) -> None:
    text = analysis.dumps_json(report.doc) if cfg.format == "json" else analysis.dumps_csv(report.rows)
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        cfg = RunConfig(args.precision, args.max_precision, args.workers, args.output, args.format, args.cache_dir)
        f = load_field(resolve_spec(args.spec), cfg.precision, cfg.max_precision)
        report = args.fn(f, args, cfg)
    except PrecisionExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (InvalidFieldSpec, NotInEK, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(report, cfg)
    return EXIT_OK if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
