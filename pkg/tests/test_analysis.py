import itertools
import math
from fractions import Fraction

import pytest

from pisotfield.analysis import (
    IN,
    OUT,
    OUT_BOUNDARY,
    consecutive_gaps,
    density_probe,
    discreteness_check,
    dumps_csv,
    dumps_json,
    ek_region,
    enumerate_EK,
    is_in_EK,
    verify_corollary3,
    verify_EK_equals_DK,
)
from pisotfield.field import OrderElement as E
from pisotfield.field import sign_at_place
from pisotfield.minkowski import contains

from .conftest import CORPUS, QUADRATIC_M, q_sqrt_sign


def coords(xs):
    return [x.coords for x in xs]


def test_gap_report_q2(q2):
    gr = consecutive_gaps(q2, 12)
    assert coords(gr.gaps) == [(1, 0), (0, 1), (1, 0), (1, 1), (1, 0), (0, 1), (1, 0)]
    assert [(g.coords, m) for g, m in gr.distinct] == [((1, 0), 4), ((0, 1), 2), ((1, 1), 1)]
    assert gr.distinct_gap_count == 3
    assert gr.min_gap.coords == (1, 0) and gr.max_gap.coords == (1, 1)
    total = sum((g for g in gr.gaps), E((0, 0)))
    assert total == gr.pisot_values[-1].element - gr.pisot_values[0].element
    doc = gr.to_json()
    assert doc["schema"] == "v1" and doc["distinct_gap_count"] == 3


def test_gap_report_single_element(q2):
    gr = consecutive_gaps(q2, 3)
    assert len(gr.pisot_values) == 1 and gr.gaps == () and gr.max_gap is None


def test_gap_report_is_deterministic(cubic):
    a = dumps_json(consecutive_gaps(cubic, 10).to_json())
    b = dumps_json(consecutive_gaps(cubic, 10, workers=2).to_json())
    assert a == b
    assert dumps_csv(consecutive_gaps(cubic, 10).csv_rows()) == dumps_csv(consecutive_gaps(cubic, 10).csv_rows())


@pytest.mark.parametrize("m", QUADRATIC_M)
def test_quadratic_max_gap(fields, m):
    gr = consecutive_gaps(fields[f"q{m}"], 60)
    assert gr.max_gap.coords == (math.isqrt(m), 1)


@pytest.mark.parametrize(
    "c, verdict",
    [((1, 0), IN), ((2, 0), OUT_BOUNDARY), ((1, 2), IN), ((0, 1), IN), ((-1, 0), OUT), ((1, -2), OUT), ((3, 0), OUT)],
)
def test_is_in_EK_q2(q2, c, verdict):
    cert = is_in_EK(q2, E(c))
    assert cert.verdict == verdict
    assert cert.inside == (verdict == IN)


def test_is_in_EK_rho_max(q2):
    cert = is_in_EK(q2, E((1, 2)))
    assert float(cert.rho_max.center.real) == pytest.approx(2 * math.sqrt(2) - 1, abs=1e-15)
    assert float(cert.rho_max.radius) < 1e-30


def test_enumerate_EK_examples(q2, fields):
    assert coords(enumerate_EK(q2, 4)) == [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2)]
    assert coords(enumerate_EK(fields["rationals"], 5)) == [(1,), (2,), (3,), (4,), (5,)]
    assert enumerate_EK(q2, 0) == []


@pytest.mark.parametrize("m", [2, 3, 7])
def test_enumerate_EK_matches_scan_quadratic(fields, m):
    f = fields[f"q{m}"]
    bound = 10
    want = []
    for a, b in itertools.product(range(-20, 21), repeat=2):
        if q_sqrt_sign(a, b, m) > 0 and q_sqrt_sign(a, b, m, bound) <= 0:
            if q_sqrt_sign(a, -b, m, 2) < 0 and q_sqrt_sign(a, -b, m, -2) > 0:
                want.append((a, b))
    assert sorted(coords(enumerate_EK(f, bound))) == sorted(want)


@pytest.mark.parametrize("name", ["cubic-x-1", "cubic-3x-1", "q5"])
def test_enumerate_EK_matches_scan(fields, name):
    f = fields[name]
    bound = 6
    region = ek_region(f, Fraction(bound))
    r = 8 if f.degree == 3 else 12
    want = [c for c in itertools.product(range(-r, r + 1), repeat=f.degree) if contains(f, region, E(c))]
    got = enumerate_EK(f, bound)
    assert sorted(coords(got)) == sorted(want)
    assert all(is_in_EK(f, x).inside for x in got)


@pytest.mark.parametrize("name", ["q2", "q3", "cubic-x-1"])
def test_verify_EK_equals_DK(fields, name):
    f = fields[name]
    bound = 3 if f.degree == 3 else 4
    rep = verify_EK_equals_DK(f, bound)
    assert rep.passed, rep.counterexamples
    if name == "q2":
        assert len(rep.witnesses) == 5


def test_gap_sign_patterns_q2(q2):
    rep = verify_corollary3(q2, 12)
    assert rep.passed and rep.parameters["distinct_gap_count"] == 3
    by_pattern = {tuple(w["pattern"]): w for w in rep.witnesses}
    assert by_pattern[(1,)]["gap"] == [0, 1]
    assert by_pattern[(-1,)]["gap"] == [1, 0]


def test_gap_patterns_rationals(fields):
    f = fields["rationals"]
    rep = verify_corollary3(f, 10)
    assert rep.passed and rep.parameters["distinct_gap_count"] == 1


def test_gap_count_report_can_fail(cubic):
    rep = verify_corollary3(cubic, 2)
    assert not rep.passed and rep.counterexamples


def test_density_q2(q2):
    rep = density_probe(q2, Fraction(1, 2), Fraction(1, 4))
    assert rep.passed
    assert rep.parameters["probed"] == 3 and rep.parameters["skipped"] == 2
    assert sorted(w["targets"][0][0] for w in rep.witnesses) == ["-1/2", "0", "1/2"]


def test_density_complex_grid(cubic):
    rep = density_probe(cubic, Fraction(1, 2), Fraction(3, 10), strategy="direct")
    assert rep.passed and rep.parameters["probed"] == 5
    assert rep.notes


def test_discreteness(q2, cubic):
    rep = discreteness_check(q2, 100)
    assert rep.passed
    min_gap = next(w for w in rep.witnesses if "min_gap" in w)
    assert min_gap["min_gap"] == [1, 0]
    rep = discreteness_check(cubic, 20)
    assert rep.passed
    g = next(w for w in rep.witnesses if "min_gap" in w)["min_gap"]
    assert sign_at_place(cubic, E(g), 0, Fraction(1, 4)) >= 0


@pytest.mark.parametrize("name", CORPUS)
def test_pairwise_differences_in_EK(fields, name):
    f = fields[name]
    certs = consecutive_gaps(f, 20 if f.degree == 2 else 8).pisot_values
    for a, b in itertools.combinations(certs, 2):
        assert is_in_EK(f, b.element - a.element).inside


def test_csv_round_trip(q2):
    text = dumps_csv(verify_corollary3(q2, 12).csv_rows())
    lines = text.strip().split("\n")
    assert lines[0].startswith("kind,")
    assert lines[-1].startswith("verdict")
