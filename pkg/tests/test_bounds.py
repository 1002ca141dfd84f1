from fractions import Fraction
from math import comb

import pytest

import config
from bitlabel import Label, ceil_log2
from bounds import (
    count_distinct_emitted,
    certify_forced_distinct,
    counting_oracle,
    intersection_bound,
    lemma3_intersection_check,
    lemma4_new_labels,
    measured_sizes,
    yao_bound,
    yao_expected_max,
    yao_family,
)
from errors import BoundViolation, InvalidParams, UnsupportedQuery
from families import FamilySpec, divisor_grid
from forest import QueryKind
from static_schemes import SchemeDescriptor, get_scheme

ADJ = {QueryKind.ADJACENCY}
CONN = {QueryKind.CONNECTIVITY}
SIB = {QueryKind.SIBLING}


@pytest.mark.parametrize("n", [4, 10, 16])
def test_fn_certified_count(n):
    cert = certify_forced_distinct(FamilySpec("Fn", n), ADJ)
    assert cert.certified_count == n + (n - 2) * (n - 1) // 2
    assert cert.theory_value == cert.certified_count
    assert not cert.missing_pairs


def test_fn_ten_carries_literal_sum_note():
    cert = certify_forced_distinct(FamilySpec("Fn", 10), ADJ)
    assert cert.certified_count == 46
    assert cert.implied_bits == 6
    assert "54" in cert.notes[0]


@pytest.mark.slow
def test_fn_sixty_four():
    cert = certify_forced_distinct(FamilySpec("Fn", 64), ADJ)
    assert cert.certified_count == 2017
    assert cert.implied_bits == 11


def test_fnc_with_connectivity():
    cert = certify_forced_distinct(FamilySpec("FnC", 10), CONN)
    assert cert.certified_count == 46
    assert cert.witness_stats["missing"] == 0


def test_single_member_needs_n_labels():
    cert = certify_forced_distinct(FamilySpec("Fn", 8, k=4), ADJ)
    assert cert.certified_count == 8
    assert cert.theory_expr == "n"


@pytest.mark.parametrize("n", [n if n <= 16 else pytest.param(n, marks=pytest.mark.slow) for n in range(3, 33)])
def test_in_certified_count(n):
    cert = certify_forced_distinct(FamilySpec("In", n), ADJ | CONN)
    assert cert.certified_count == comb(n, 3)
    assert cert.theory_value == comb(n, 3)


# 2^(bits + c) >= n^e is the exact integer form of bits >= e*log2(n) - c.

@pytest.mark.parametrize("n", [n if n <= 16 else pytest.param(n, marks=pytest.mark.slow) for n in range(8, 65)])
def test_fn_implied_bits_grow_like_two_log_n(n):
    cert = certify_forced_distinct(FamilySpec("Fn", n), ADJ)
    assert cert.certified_count == n + (n - 2) * (n - 1) // 2
    assert 2 ** (cert.implied_bits + 2) >= n**2


@pytest.mark.parametrize("n", [n if n <= 16 else pytest.param(n, marks=pytest.mark.slow) for n in range(8, 33)])
def test_in_implied_bits_grow_like_three_log_n(n):
    cert = certify_forced_distinct(FamilySpec("In", n), ADJ | CONN)
    assert 2 ** (cert.implied_bits + 3) >= n**3


def test_fn_with_sibling_queries():
    cert = certify_forced_distinct(FamilySpec("Fn", 10), SIB)
    assert cert.certified_count == 46
    assert cert.witness_stats["missing"] == 0


@pytest.mark.parametrize("n", [6, 10])
def test_in_with_sibling_and_connectivity(n):
    cert = certify_forced_distinct(FamilySpec("In", n), SIB | CONN)
    assert cert.certified_count == comb(n, 3)
    assert not cert.missing_pairs


def test_a2_twelve():
    cert = certify_forced_distinct(FamilySpec("A2", 12), ADJ)
    assert cert.certified_count == 2047
    assert cert.implied_bits == 11


def test_a2_size_cap(monkeypatch):
    monkeypatch.setattr(config, "A2_MAX_N", 8)
    with pytest.raises(InvalidParams):
        certify_forced_distinct(FamilySpec("A2", 9), ADJ)


def test_deltak_counts_bounded_subsets():
    cert = certify_forced_distinct(FamilySpec("Deltak", 6, k=2), ADJ)
    assert cert.certified_count == comb(5, 1) + comb(5, 2)


def test_missing_witnesses_are_reported():
    # every node of a single tree has the same connectivity answers
    cert = certify_forced_distinct(FamilySpec("Fn", 6), CONN)
    assert cert.missing_pairs
    assert cert.witness_stats["missing"] == len(cert.missing_pairs)
    assert cert.certified_count < cert.witness_stats["candidates"]
    assert all(x.startswith("member") for pair in cert.missing_pairs for x in pair)


def test_certification_rejects_other_queries():
    with pytest.raises(UnsupportedQuery):
        certify_forced_distinct(FamilySpec("Fn", 6), {QueryKind.ANCESTRY})
    with pytest.raises(UnsupportedQuery):
        certify_forced_distinct(FamilySpec("A2", 6), CONN)


@pytest.mark.parametrize(
    "encoder, kind, queries",
    [("dyn-adj-sib", "Fn", ADJ), ("dyn-conn", "FnC", CONN), ("dyn-triple", "In", ADJ | CONN)],
)
def test_correct_encoders_emit_at_least_the_certified_count(encoder, kind, queries):
    spec = FamilySpec(kind, 10)
    assert count_distinct_emitted(encoder, spec) >= certify_forced_distinct(spec, queries).certified_count


def test_bounded_degree_encoder_on_a2():
    spec = FamilySpec("A2", 8)
    assert count_distinct_emitted("dyn-deg7", spec) >= certify_forced_distinct(spec, ADJ).certified_count


# --- expected maximum ---

def test_yao_family_and_bound():
    assert len(yao_family(16)) == 6
    assert yao_bound(16) == Fraction(29, 6)
    assert yao_bound(8) == Fraction(5, 2)
    with pytest.raises(InvalidParams):
        yao_family(4)


@pytest.mark.parametrize("n", [8, 16, 32, 64])
def test_yao_expected_max_above_bound(n):
    expected = yao_expected_max("dyn-adj-sib", n)
    assert expected == 2 * ceil_log2(n)
    assert expected >= yao_bound(n)


# --- intersections ---

def test_intersection_bound():
    assert intersection_bound(12, (2, 3), (3, 2)) == Fraction(2 * 2 * 12, 6)
    assert intersection_bound(12, (2, 3), (1, 1)) == 2


@pytest.mark.parametrize(
    "kind, scheme, n",
    [
        ("Fab", "wrap:sib-sorted", 12),
        ("Fab", "wrap:sib-sorted", 36),
        ("Gab", "wrap:anc-interval", 36),
        pytest.param("Fab", "wrap:sib-sorted", 144, marks=pytest.mark.slow),
        pytest.param("Gab", "wrap:anc-interval", 144, marks=pytest.mark.slow),
    ],
)
def test_unique_schemes_respect_intersections(kind, scheme, n):
    grid = [(s.a, s.b) for s in divisor_grid(n, kind)]
    report = lemma3_intersection_check(get_scheme(scheme), n, grid, kind)
    assert report.forests == len(grid)
    assert not report.violations


def test_fab_twelve_pair_count():
    grid = [(s.a, s.b) for s in divisor_grid(12, "Fab")]
    assert lemma3_intersection_check(get_scheme("wrap:sib-sorted"), 12, grid).pairs_checked == 89


def positional_scheme():
    # ignores the structure: node i always gets label i
    def encoder(forest, n):
        return {v: Label(ceil_log2(n) + 1, i) for i, v in enumerate(forest.nodes)}

    queries = frozenset({QueryKind.CONNECTIVITY, QueryKind.SIBLING})
    return SchemeDescriptor("positional", queries, True, lambda n: ceil_log2(n) + 1, encoder, None)


def test_structure_blind_labels_violate_intersections():
    grid = [(1, 1), (2, 3)]
    with pytest.raises(BoundViolation) as info:
        lemma3_intersection_check(positional_scheme(), 12, grid)
    assert info.value.violations
    report = lemma3_intersection_check(positional_scheme(), 12, grid, strict=False)
    assert report.violations


def test_intersection_check_needs_the_right_queries():
    with pytest.raises(UnsupportedQuery):
        lemma3_intersection_check(get_scheme("wrap:adj-sib-kannan"), 12, [(1, 1)], "Gab")
    with pytest.raises(InvalidParams):
        lemma3_intersection_check(get_scheme("wrap:sib-sorted-nonunique"), 12, [(1, 1)])


# --- counting oracle ---

def test_warmup_twenty_seven():
    report = counting_oracle("Warmup", 27)
    assert [s.direct for s in report.steps] == [27, 18, 15, 14]
    assert report.total == 74
    cert = report.to_certificate()
    assert cert.certified_count == 74
    assert cert.theory_value == 54
    assert cert.theory_expr == "4*n/2"


def test_warmup_three_to_the_fifth():
    report = counting_oracle("Warmup", 3**5)
    assert [s.direct for s in report.steps] == [243, 162, 135, 126, 123, 122]
    assert all(s.direct > Fraction(243, 2) for s in report.steps)


def test_thm6_twenty_seven():
    report = counting_oracle("Thm6", 27)
    assert [(s.a, s.b) for s in report.steps] == [(1, 27), (3, 9), (9, 3), (27, 1)]
    assert report.total == 74


def test_thm7_closed_form():
    n = 6**4
    report = counting_oracle("Thm7", n, x=6)
    assert len(report.steps) == 15
    assert report.steps[0].direct == n
    assert all(s.closed == Fraction(6 * n, 25) for s in report.steps)
    assert all(s.direct >= s.closed for s in report.steps)
    assert [(s.a, s.b) for s in report.steps[:3]] == [(1, 1), (6, 1), (1, 6)]


def test_thm8_matches_thm7_ordering():
    assert counting_oracle("Thm8", 7**3, x=7).steps == counting_oracle("Thm7", 7**3, x=7).steps


def test_lemma4_new_labels():
    forests = [(1, 1), (3, 1), (1, 3)]
    assert lemma4_new_labels(9, forests, 0) == 9
    assert lemma4_new_labels(9, forests, 2) == 9 - 3 - 3


@pytest.mark.parametrize(
    "theorem, n, x",
    [("Warmup", 10, None), ("Thm6", 81 * 2, None), ("Thm7", 36, None), ("Thm7", 30, 6), ("Thm9", 27, None)],
)
def test_counting_oracle_rejects_bad_parameters(theorem, n, x):
    with pytest.raises(InvalidParams):
        counting_oracle(theorem, n, x)


# --- measured sizes ---

def test_measured_sizes_rows():
    rows = measured_sizes(["adj-sib-kannan", "dyn-triple"], [16, 64], seed=0)
    assert [(r["scheme"], r["n"]) for r in rows] == [
        ("adj-sib-kannan", 16),
        ("dyn-triple", 16),
        ("adj-sib-kannan", 64),
        ("dyn-triple", 64),
    ]
    assert rows[0]["measured_bits"] == rows[0]["size_function"] == 8
    assert rows[3]["measured_bits"] == 18
    assert rows[3]["size_function"] is None
