import math
import random
from fractions import Fraction

import pytest

from kloosterman.bruhat import decompose, reduce_unipotent
from kloosterman.errors import (
    BudgetExceeded,
    CellMismatch,
    NegativeCellData,
    NotCoprime,
    NotInBigCell,
    NotUnimodular,
)
from kloosterman.exactnum import PhaseSum, mod_inverse
from kloosterman.matrixcore import det
from kloosterman.sl4fine import (
    CONDITION_NAMES,
    FineCellLabel,
    GammaFactor,
    _fine_sum_oracle_reference,
    build_from_gammas,
    cell_of,
    cells_for_moduli,
    closed_form_applicable,
    coarse_sum,
    congruence_system,
    display_factors,
    fine_cell_distribution,
    fine_cell_representatives,
    fine_sum_closed_form,
    fine_sum_oracle,
    gamma_coordinates,
    lemma57_check,
    lemma_checks,
    longword_bound_holds,
    representative_congruences,
    representative_data,
    representative_matrix,
)
from kloosterman.verify import random_gamma_factor

SINGLE_TWO_CELLS = [
    (2, 1, 1, 1, 1, 1),
    (1, 2, 1, 1, 1, 1),
    (1, 1, 2, 1, 1, 1),
    (1, 1, 1, 2, 1, 1),
    (1, 1, 1, 1, 2, 1),
    (1, 1, 1, 1, 1, 2),
]


def test_cell_label_arithmetic():
    cell = FineCellLabel(1, 2, 3, 4, 5, 6)
    assert cell.as_tuple() == (1, 2, 3, 4, 5, 6)
    assert cell.big_d == (20, 30, 3)
    assert cell.moduli == (120, 180, 18)
    assert cell.level == 720
    assert cell.left_moduli() == (1, 6, 720, 6, 720, 120)
    assert cell.right_moduli() == (4, 20, 120, 10, 180, 18)
    budget = 1
    for v in cell.left_moduli() + cell.right_moduli():
        budget *= v
    assert cell.enumeration_budget() == budget
    assert det(cell.torus()) == 1
    with pytest.raises(NegativeCellData):
        FineCellLabel(0, 1, 1, 1, 1, 1)
    with pytest.raises(NegativeCellData):
        FineCellLabel(1, 1, 1, 1, 1, -2)


def test_gamma_factor():
    g = GammaFactor(x=2, b=1, d=3, y=2)
    assert g.matrix().rows == ((2, 1), (3, 2))
    with pytest.raises(NotUnimodular):
        GammaFactor(x=2, b=2, d=3, y=2)


def test_seeded_builds_round_trip():
    rng = random.Random(101)
    cells = [(1, 1, 1, 1, 1, 1), (2, 1, 1, 1, 1, 1), (1, 2, 1, 3, 1, 2),
             (2, 3, 1, 1, 2, 1), (3, 1, 2, 2, 1, 1), (1, 1, 1, 2, 3, 2)]
    for _ in range(60):
        cell = FineCellLabel(*rng.choice(cells))
        gammas = [random_gamma_factor(v, rng) for v in cell.as_tuple()]
        a = build_from_gammas(cell, gammas)
        assert a.is_integral()
        assert det(a) == 1
        assert cell_of(a) == cell
        assert lemma_checks(a).all_pass
        assert congruence_system(cell, gamma_coordinates(gammas)).satisfied
        u_left, torus, u_right = display_factors(cell, gammas)
        d = decompose(a)
        assert u_left == d.u_L
        assert torus == d.torus_matrix()
        assert u_right == d.u_R


def test_build_rejects_wrong_blocks():
    cell = FineCellLabel(2, 1, 1, 1, 1, 1)
    rng = random.Random(0)
    gammas = [random_gamma_factor(v, rng) for v in cell.as_tuple()]
    with pytest.raises(CellMismatch):
        build_from_gammas(cell, gammas[:5])
    bad = list(gammas)
    bad[0] = random_gamma_factor(3, rng)
    with pytest.raises(CellMismatch):
        build_from_gammas(cell, bad)


def test_cell_of_rejections():
    with pytest.raises(NotInBigCell):
        cell_of(FineCellLabel(1, 1, 1, 1, 1, 1).torus())
    from kloosterman.matrixcore import identity
    with pytest.raises(NotInBigCell):
        cell_of(identity(4))
    with pytest.raises(NotInBigCell):
        cell_of(identity(3))


def test_congruences_match_integrality():
    rng = random.Random(7)
    cells = [FineCellLabel(*t) for t in
             [(2, 1, 1, 1, 1, 1), (1, 2, 1, 1, 1, 1), (1, 1, 2, 1, 1, 1),
              (2, 1, 2, 1, 1, 1), (1, 1, 1, 2, 2, 1), (1, 2, 1, 1, 1, 2),
              (3, 1, 1, 2, 1, 1)]]
    integral_seen = 0
    for _ in range(600):
        cell = rng.choice(cells)
        pl = tuple(rng.randrange(v) for v in cell.left_moduli())
        pr = tuple(rng.randrange(v) for v in cell.right_moduli())
        residuals = representative_congruences(cell, pl, pr)
        assert set(residuals) == set(CONDITION_NAMES)
        a, _, _ = representative_matrix(cell, pl, pr)
        integral = a.is_integral()
        integral_seen += integral
        assert integral == all(v == 0 for v in residuals.values())
    assert integral_seen > 0


def test_fast_oracle_matches_reference():
    for tup in SINGLE_TWO_CELLS:
        cell = FineCellLabel(*tup)
        for m, n in [((0, 0, 1), (1, 0, 1)), ((1, 1, 1), (1, 1, 1))]:
            fast = fine_sum_oracle(cell, m, n)
            slow = _fine_sum_oracle_reference(cell, m, n)
            assert fast.exact == slow.exact


def test_frozen_distribution_masses():
    assert sum(fine_cell_distribution(FineCellLabel(1, 1, 1, 1, 1, 2)).values()) == 4
    assert sum(fine_cell_distribution(FineCellLabel(1, 1, 1, 1, 2, 1)).values()) == 2
    assert sum(fine_cell_distribution(FineCellLabel(1, 1, 2, 1, 1, 1)).values()) == 2
    assert sum(fine_cell_distribution(FineCellLabel(2, 1, 1, 1, 1, 1)).values()) == 1
    assert fine_cell_distribution(FineCellLabel(1, 1, 1, 1, 1, 2)) == {
        (0, 0, 0, 0, 0, 0): 1,
        (0, 0, 0, 0, 0, 1): 1,
        (0, 0, 1, 0, 0, 0): 1,
        (0, 0, 1, 0, 0, 1): 1,
    }


def test_frozen_oracle_values():
    cell = FineCellLabel(1, 1, 1, 1, 1, 2)
    assert fine_sum_oracle(cell, (0, 0, 0), (0, 0, 0)).exact.serialize() == [[0, 1, 4]]
    assert fine_sum_oracle(cell, (0, 0, 1), (0, 0, 0)).exact.serialize() == [[0, 1, 2], [1, 2, 2]]
    assert fine_sum_oracle(cell, (0, 0, 2), (0, 0, 2)).exact.serialize() == [[0, 1, 4]]
    cell2 = FineCellLabel(1, 1, 1, 1, 2, 1)
    assert fine_sum_oracle(cell2, (1, 1, 1), (1, 1, 1)).exact.serialize() == [[0, 1, 2]]


def test_closed_form_disagrees_where_measured():
    cell = FineCellLabel(1, 1, 1, 1, 1, 2)
    closed = fine_sum_closed_form(cell, (0, 0, 0), (0, 0, 0))
    assert closed.exact.serialize() == [[0, 1, 16]]
    oracle = fine_sum_oracle(cell, (0, 0, 0), (0, 0, 0))
    assert oracle.exact.serialize() == [[0, 1, 4]]
    assert closed.exact != oracle.exact


def test_trivial_cell_both_methods():
    cell = FineCellLabel(1, 1, 1, 1, 1, 1)
    rng = random.Random(13)
    for _ in range(20):
        m = tuple(rng.randint(-5, 5) for _ in range(3))
        n = tuple(rng.randint(-5, 5) for _ in range(3))
        assert fine_sum_oracle(cell, m, n).exact == PhaseSum.one()
        assert fine_sum_closed_form(cell, m, n).exact == PhaseSum.one()


def test_closed_form_applicability():
    cell = FineCellLabel(1, 1, 1, 1, 1, 2)
    assert closed_form_applicable(cell, (0, 0, 2), (0, 0, 0))
    assert not closed_form_applicable(cell, (0, 0, 1), (0, 0, 0))
    assert fine_sum_closed_form(cell, (0, 0, 1), (0, 0, 0)).exact == PhaseSum()
    assert closed_form_applicable(FineCellLabel(1, 1, 1, 1, 1, 1), (3, -2, 5), (1, 4, -7))


def test_character_shift_invariance():
    rng = random.Random(37)
    for tup in [(1, 2, 1, 1, 1, 2), (2, 1, 1, 1, 2, 1)]:
        cell = FineCellLabel(*tup)
        d1, d2, d3, d4, d5, f = tup
        m = tuple(rng.randint(-3, 3) for _ in range(3))
        n = tuple(rng.randint(-3, 3) for _ in range(3))
        base = fine_sum_oracle(cell, m, n).exact
        shifted_m = (m[0] + d1, m[1] + d2 * d3, m[2] + d4 * d5 * f)
        shifted_n = (n[0] + d4, n[1] + d2 * d5, n[2] + d1 * d3 * f)
        assert fine_sum_oracle(cell, shifted_m, n).exact == base
        assert fine_sum_oracle(cell, m, shifted_n).exact == base


def test_representatives_are_canonical_and_aggregate():
    for tup in [(1, 1, 1, 1, 1, 2), (2, 1, 1, 1, 1, 1), (1, 2, 1, 1, 1, 1)]:
        cell = FineCellLabel(*tup)
        reps = list(fine_cell_representatives(cell))
        assert len(set(reps)) == len(reps)
        aggregated: dict = {}
        for pl, pr in reps:
            a, u_left, u_right = representative_matrix(cell, pl, pr)
            assert a.is_integral()
            assert cell_of(a) == cell
            assert reduce_unipotent(u_left, "left") == u_left
            assert reduce_unipotent(u_right, "right") == u_right
            key = (pl[0], pl[3], pl[5], pr[0], pr[3], pr[5])
            aggregated[key] = aggregated.get(key, 0) + 1
        assert aggregated == fine_cell_distribution(cell)


def test_budget_guard():
    cell = FineCellLabel(2, 2, 2, 2, 2, 2)
    with pytest.raises(BudgetExceeded) as exc:
        fine_cell_distribution(cell, budget=1000)
    assert exc.value.budget == cell.enumeration_budget()
    assert exc.value.limit == 1000
    with pytest.raises(BudgetExceeded):
        fine_sum_oracle(cell, (1, 1, 1), (1, 1, 1), budget=1000)
    with pytest.raises(BudgetExceeded):
        next(fine_cell_representatives(cell, budget=1000))


def test_lemma57_unit_coordinates():
    rng = random.Random(71)
    for tup in [(2, 1, 1, 1, 1, 1), (1, 2, 1, 3, 1, 1), (2, 1, 3, 1, 1, 2)]:
        cell = FineCellLabel(*tup)
        level = cell.level
        units = [x for x in range(1, level + 1) if math.gcd(x, level) == 1]
        for _ in range(10):
            coords = []
            for _ in range(6):
                x = rng.choice(units)
                y = mod_inverse(x, level) if level > 1 else rng.randint(-4, 4)
                coords.append((x, y if level > 1 else 1))
            residuals = lemma57_check(cell, coords)
            assert set(residuals) == {"u1-unit", "T-unit", "v2-unit", "w3-unit"}
            assert all(v == 0 for v in residuals.values())


def test_lemma57_rejects_non_units():
    cell = FineCellLabel(2, 1, 1, 1, 1, 1)
    good = [(1, 1)] * 6
    bad_x1 = [(2, 1)] + [(1, 1)] * 5
    with pytest.raises(NotCoprime):
        lemma57_check(cell, bad_x1)
    bad_pair = [(1, 1), (1, 1), (1, 2), (1, 1), (1, 1), (1, 1)]
    with pytest.raises(NotCoprime):
        lemma57_check(cell, bad_pair)
    assert all(v == 0 for v in lemma57_check(cell, good).values())


def test_cells_for_moduli_frozen():
    assert [c.as_tuple() for c in cells_for_moduli((1, 1, 1))] == [(1, 1, 1, 1, 1, 1)]
    cells = cells_for_moduli((2, 2, 2))
    assert [c.as_tuple() for c in cells] == [
        (2, 2, 1, 2, 1, 1),
        (1, 1, 2, 2, 1, 1),
        (2, 1, 1, 1, 2, 1),
        (1, 1, 1, 1, 1, 2),
    ]
    for c in cells:
        assert c.moduli == (2, 2, 2)
    assert len(cells_for_moduli((3, 3, 3))) == 4
    assert len(cells_for_moduli((4, 4, 2))) == 7
    with pytest.raises(NegativeCellData):
        cells_for_moduli((0, 1, 1))


def test_coarse_sum_frozen_value():
    res = coarse_sum((2, 2, 2), (1, 1, 1), (1, 1, 1))
    assert res.exact.serialize() == [[0, 1, 3], [1, 2, 6]]
    assert res.numeric.real == pytest.approx(-3.0, abs=1e-12)
    assert res.query == {"kind": "coarse", "c": [2, 2, 2], "m": [1, 1, 1], "n": [1, 1, 1]}
    assert coarse_sum((1, 1, 1), (4, -1, 2), (0, 3, 1)).exact == PhaseSum.one()
    with pytest.raises(CellMismatch):
        coarse_sum((2, 2, 2), (1, 1, 1), (1, 1, 1), method="brute")


def test_longword_bound_report():
    value = coarse_sum((2, 2, 2), (1, 1, 1), (1, 1, 1)).numeric
    report = longword_bound_holds((2, 2, 2), (1, 1, 1), (1, 1, 1), value)
    assert report.holds
    assert report.lhs == pytest.approx(3.0, abs=1e-9)
    assert not longword_bound_holds((1, 1, 1), (1, 1, 1), (1, 1, 1), 1e9).holds


def test_representative_data_numerators_are_integers():
    rng = random.Random(41)
    cell = FineCellLabel(2, 3, 1, 2, 1, 1)
    gammas = [random_gamma_factor(v, rng) for v in cell.as_tuple()]
    pl, pr = representative_data(cell, gamma_coordinates(gammas))
    assert all(isinstance(v, int) for v in pl + pr)
    a, _, _ = representative_matrix(cell, pl, pr)
    assert a == build_from_gammas(cell, gammas)
