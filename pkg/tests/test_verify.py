import itertools
from fractions import Fraction

import pytest

from kloosterman.matrixcore import Matrix, mat_prod
from kloosterman.verify import (
    SUITES,
    SuiteReport,
    bound_suite,
    bruhat_suite,
    builds_suite,
    candidate_space_count,
    classical_suite,
    congruence_scan_suite,
    cross_validation_suite,
    groups_suite,
    longword_suite,
    partition_suite,
    run_suite,
    trivial_cell_suite,
    weil_suite,
)
from kloosterman.weyl import long_word_matrix


def _direct_candidate_count(c):
    """Exact count of integral u_L w0 t u_R over the coarse coordinate grid."""
    c1, c2, c3 = c
    ml = (c3, c2, c1, c2, c1, c1)
    mr = (c1, c1, c1, c2, c2, c3)
    t = Matrix([
        [Fraction(c1), 0, 0, 0],
        [0, Fraction(c2, c1), 0, 0],
        [0, 0, Fraction(c3, c2), 0],
        [0, 0, 0, Fraction(1, c3)],
    ])
    w0 = long_word_matrix(4)
    count = 0
    for pl in itertools.product(*[range(v) for v in ml]):
        u_left = Matrix([
            [1, Fraction(pl[0], ml[0]), Fraction(pl[1], ml[1]), Fraction(pl[2], ml[2])],
            [0, 1, Fraction(pl[3], ml[3]), Fraction(pl[4], ml[4])],
            [0, 0, 1, Fraction(pl[5], ml[5])],
            [0, 0, 0, 1],
        ])
        left = mat_prod(u_left, w0, t)
        for pr in itertools.product(*[range(v) for v in mr]):
            u_right = Matrix([
                [1, Fraction(pr[0], mr[0]), Fraction(pr[1], mr[1]), Fraction(pr[2], mr[2])],
                [0, 1, Fraction(pr[3], mr[3]), Fraction(pr[4], mr[4])],
                [0, 0, 1, Fraction(pr[5], mr[5])],
                [0, 0, 0, 1],
            ])
            if mat_prod(left, u_right).is_integral():
                count += 1
    return count


def test_candidate_space_count_against_direct_enumeration():
    for c in [(1, 1, 1), (2, 1, 1), (1, 2, 1), (2, 2, 1), (2, 2, 2), (3, 2, 1)]:
        assert candidate_space_count(c) == _direct_candidate_count(c)


def test_candidate_space_count_frozen():
    assert candidate_space_count((1, 1, 1)) == 1
    assert candidate_space_count((2, 1, 1)) == 1
    assert candidate_space_count((2, 2, 1)) == 3
    assert candidate_space_count((1, 2, 2)) == 3
    assert candidate_space_count((2, 2, 2)) == 9
    assert candidate_space_count((3, 1, 2)) == 2


def test_suite_report_passed_logic():
    assert SuiteReport("x", 10, 0, {}).passed
    assert not SuiteReport("x", 10, 1, {}).passed
    assert not SuiteReport("x", 0, 0, {}).passed
    doc = SuiteReport("x", 3, 0, {"k": 1}).to_json()
    assert doc == {"suite": "x", "checked": 3, "failures": 0, "passed": True,
                   "details": {"k": 1}}


def test_run_suite_dispatch():
    report = run_suite("classical", seed=0, phi_max=10)
    assert report.suite == "classical"
    assert report.passed
    with pytest.raises(KeyError):
        run_suite("nonsense", seed=0)
    assert set(SUITES) == {"classical", "weil", "longword", "bruhat", "builds",
                           "congruences", "trivial", "crossval", "partition",
                           "bound", "groups"}


def test_classical_suite_small():
    report = classical_suite(phi_max=20)
    assert report.passed
    assert report.checked == 23


def test_weil_suite_small():
    report = weil_suite(c_max=40, char_bound=5)
    assert report.passed
    assert report.checked == 40 * 11 * 11
    assert report.details["worst_ratio"] <= 1.0


def test_longword_suite():
    report = longword_suite()
    assert report.passed
    assert report.checked == 13


def test_bruhat_suite_small():
    report = bruhat_suite(seed=1, sl4_count=25, sl5_count=5)
    assert report.passed
    assert report.checked == 30


def test_builds_suite_small():
    report = builds_suite(seed=2, count=20)
    assert report.passed
    assert report.checked == 24


def test_congruence_scan_tiny():
    report = congruence_scan_suite(d_bound=1)
    assert report.passed
    assert report.details["cells"] == 1


def test_trivial_cell_suite():
    report = trivial_cell_suite(seed=3, pairs=5)
    assert report.passed
    assert report.checked == 10


def test_cross_validation_trivial_scope():
    report = cross_validation_suite(d_bound=1)
    assert report.passed
    assert report.details["cells"] == 1
    assert report.details["disagreements"] == 0
    assert report.details["agreements"] == report.checked == 729
    assert report.details["oracle_authoritative"] is True


def test_partition_suite_small():
    report = partition_suite(c_bound=2, seed=0)
    assert report.passed
    assert report.checked == 8


def test_bound_suite_small():
    report = bound_suite(c_bound=2, char_bound=1, seed=0, spot_checks=5)
    assert report.passed
    assert report.details["spot_failures"] == 0


def test_groups_suite_small():
    report = groups_suite(seed=4, words=10)
    assert report.passed
    assert report.details["det_one_signed_permutations"] == 192
