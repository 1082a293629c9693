"""End-to-end acceptance criteria; each test prints one CRITERION line."""

import contextlib
import functools
import itertools
import json
import math
import random
from fractions import Fraction

import pytest

from pisotfield.analysis import consecutive_gaps, discreteness_check, enumerate_EK, is_in_EK, verify_corollary3
from pisotfield.cli import main, resolve_spec
from pisotfield.field import is_generator, load_field, norm, sign_at_place
from pisotfield.minkowski import bound_BK, build_lattice, compute_rho, constant_c
from pisotfield.oracle import brute_force_pisot
from pisotfield.pisot import (
    PisotCertificate,
    Theorem1Query,
    certify_pisot,
    decompose_in_EK,
    enumerate_pisot,
    epsilon_pisot_search,
    field_constants,
    theorem1_construct,
    verify_theorem1,
)

from .conftest import CORPUS, QUADRATIC_M


@contextlib.contextmanager
def criterion(n, capsys):
    try:
        yield
    except BaseException:
        with capsys.disabled():
            print(f"\nCRITERION {n}: FAIL")
        raise
    with capsys.disabled():
        print(f"\nCRITERION {n}: PASS")


def window(name):
    return 20 if name.startswith("cubic") else 100


@functools.lru_cache(maxsize=None)
def field(name):
    return load_field(resolve_spec(name))


@functools.lru_cache(maxsize=None)
def oracle_list(name):
    return tuple(brute_force_pisot(field(name), window(name)))


def cli_json(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    assert code == 0
    return json.loads(out)


def test_criterion_1_quadratic_min_and_max_gap(capsys):
    with criterion(1, capsys):
        for m in QUADRATIC_M:
            want = [math.isqrt(m), 1]
            assert cli_json(capsys, "pisot", "min", f"q{m}")["coords"] == want
            assert cli_json(capsys, "gaps", f"q{m}", "--max", "200")["max_gap"]["coords"] == want


def test_criterion_2_oracle_equivalence(capsys):
    with criterion(2, capsys):
        for name in CORPUS:
            want = list(oracle_list(name))
            assert want, name
            for workers in (1, 2, 4):
                fresh = load_field(resolve_spec(name))  # no shared enumeration cache
                got = [c.element for c in enumerate_pisot(fresh, window(name), workers)]
                assert got == want, (name, workers)


def test_criterion_3_volume(capsys):
    with criterion(3, capsys):
        for name in CORPUS:
            f = field(name)
            L = build_lattice(f, 128)
            lo, hi = L.volume.real_interval()
            target = Fraction(abs(f.discriminant), 4**f.t)
            assert lo * lo <= target <= hi * hi, name
            assert float(L.volume.radius) < 1e-20, name


def test_criterion_4_differences_in_EK(capsys):
    with criterion(4, capsys):
        for name in CORPUS:
            f = field(name)
            for a, b in itertools.combinations(oracle_list(name), 2):
                cert = is_in_EK(f, b - a)
                assert cert.inside, (name, a, b, cert.verdict)


def test_criterion_5_decompositions(capsys):
    with criterion(5, capsys):
        for name in CORPUS:
            f = field(name)
            elements = enumerate_EK(f, 6)
            assert elements, name
            for beta in elements:
                (dec,) = decompose_in_EK(f, beta)
                assert dec.theta.element - dec.theta_minus_beta.element == beta
                for part in (dec.theta.element, dec.theta_minus_beta.element):
                    assert isinstance(certify_pisot(f, part, 2 * f.precision), PisotCertificate), (name, beta)
        doc = cli_json(capsys, "decompose", "q2", "--element", "1,0", "--count", "3")
        thetas = {tuple(d["theta"]["coords"]) for d in doc["decompositions"]}
        assert len(thetas) == 3


def test_criterion_6_gap_counts(capsys):
    with criterion(6, capsys):
        for name in CORPUS:
            f = field(name)
            X = window(name)
            pis = enumerate_pisot(f, X)
            assert [c.element for c in pis] == list(oracle_list(name))
            rep = verify_corollary3(f, X, report=consecutive_gaps(f, X, pisot=pis))
            need = 4 if name == "cubic-3x-1" else 2
            assert rep.parameters["distinct_gap_count"] >= need, name
            assert rep.passed
        gr = consecutive_gaps(field("q2"), 100)
        assert {g.coords for g, _ in gr.distinct} == {(1, 0), (0, 1), (1, 1)}


def _c_float(f, rho, eps):
    d, t = f.degree, f.t
    return 2**t * math.sqrt(abs(f.discriminant)) * math.prod(rho.floats()) / (math.pi**t * eps ** (d - 1))


def _random_target(rng, radius, complex_place):
    while True:
        re = Fraction(rng.randint(-1000, 1000), 1000) * radius
        im = Fraction(rng.randint(-1000, 1000), 1000) * radius if complex_place else Fraction(0)
        if re * re + im * im < radius * radius:
            return (re, im)


def test_criterion_7_approximation_bounds(capsys):
    with criterion(7, capsys):
        rng = random.Random(20240601)
        for name in CORPUS:
            f = field(name)
            L, rho = field_constants(f)
            for k in range(100):
                eps = Fraction(1, 4) if k % 2 == 0 else Fraction(1, 2)
                c = constant_c(L, rho, eps)
                assert abs(float(c) / _c_float(f, rho, float(eps)) - 1) < 1e-15
                margin = (1 - eps) * Fraction(9, 10)
                targets = [_random_target(rng, margin, j >= f.s) for j in range(1, f.places)]
                x1 = c + 2 + Fraction(rng.randint(0, 98000), 1000)
                q = Theorem1Query(x1, tuple(targets), eps)
                for strategy in ("direct", "constructive"):
                    res = theorem1_construct(f, q, strategy)
                    assert res.c == c
                    assert verify_theorem1(f, q, res.theta, res.c), (name, k, strategy)


def test_criterion_8_epsilon_pisot_density(capsys):
    with criterion(8, capsys):
        for name in ("q2", "cubic-x-1"):
            f = field(name)
            L, rho = field_constants(f)
            for eps_p in (Fraction(1, 2), Fraction(1)):
                c = constant_c(L, rho, eps_p * Fraction(99, 100))
                for r in (10, 100, 1000):
                    cert = epsilon_pisot_search(f, eps_p, (r, r + 2 * c))
                    x = cert.element
                    assert is_generator(f, x)
                    assert sign_at_place(f, x, 0, r) >= 0 and sign_at_place(f, x, 0, r + 2 * c) <= 0
                    assert all(v.compare_modulus(eps_p) < 0 for v in cert.conjugate_enclosures)


def test_criterion_9_discreteness(capsys):
    with criterion(9, capsys):
        for name in CORPUS:
            f = field(name)
            X = window(name)
            gr = consecutive_gaps(f, X)
            rep = discreteness_check(f, X, report=gr)
            assert rep.passed, (name, rep.counterexamples)
            floor_gap = Fraction(1, 2 ** (f.degree - 1))
            assert all(sign_at_place(f, g, 0, floor_gap) >= 0 for g in gr.gaps)
            assert all(abs(norm(f, g)) >= 1 for g in gr.gaps)
            L, rho = field_constants(f)
            bk_lo = bound_BK(L, rho).real_interval()[0]
            assert sign_at_place(f, gr.pisot_values[0].element, 0, bk_lo) <= 0
            assert sign_at_place(f, gr.max_gap, 0, bk_lo) <= 0


def test_criterion_10_bk_audit(capsys):
    with criterion(10, capsys):
        lines = []
        for m in QUADRATIC_M:
            f = field(f"q{m}")
            L = build_lattice(f)
            bk = float(bound_BK(L, compute_rho(L)).center.real)
            general = 2 * m * (1 + math.sqrt(m))
            assert bk == pytest.approx(general, rel=1e-14)
            assert bk != pytest.approx(4 * m * (1 + math.sqrt(m)), rel=1e-3)
            audit = cli_json(capsys, "field", "info", f"q{m}")["B_K_audit"]
            assert audit["m"] == m and "4m(1+sqrt m)" in audit["note"]
            lines.append(f"m={m}: B_K={bk:.10g} (4m(1+sqrt m)={4 * m * (1 + math.sqrt(m)):.10g})")
        with capsys.disabled():
            print("\n" + "\n".join(lines))
