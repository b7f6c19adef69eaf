"""SL4 fine Kloosterman cells: labels, parametrization, oracle, closed form.

A fine cell is labeled by the full tuple (d1..d5, f). Canonical double-coset
representatives carry twelve unipotent coordinates k/M with k in [0, M); the
enumeration oracle walks that grid in factored blocks and accumulates exact
phases, while the closed-form evaluator composes classical Kloosterman sums.
The two evaluators are compared by the verification harness; on disagreement
the oracle value is the reference and both values are reported.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .classical import kloosterman
from .errors import (
    BudgetExceeded,
    CellMismatch,
    NegativeCellData,
    NonIntegralArgument,
    NonIntegralRefinement,
    NotCoprime,
    NotInBigCell,
    NotUnimodular,
)
from .exactnum import PhaseSum, divisor_tau, gcd_many, mod_inverse, phase, phase_sum_eval
from .matrixcore import Matrix, diagonal, mat_prod, minor
from .weyl import SimpleRoot, embed, long_word_matrix, sl4_long_word

DEFAULT_BUDGET = 10_000_000

# Congruence names follow the matrix entry whose integrality each one encodes;
# the bottom row and the entry (3,1) are integral for every candidate.
CONDITION_NAMES = ("A11", "A21", "A12", "A22", "A32", "A13", "A23", "A33", "A34", "A24", "A14")


@dataclass(frozen=True)
class FineCellLabel:
    d1: int
    d2: int
    d3: int
    d4: int
    d5: int
    f: int

    def __post_init__(self):
        if any(v < 1 for v in self.as_tuple()):
            raise NegativeCellData(f"cell data must be positive: {self.as_tuple()}")

    def as_tuple(self) -> tuple[int, int, int, int, int, int]:
        return (self.d1, self.d2, self.d3, self.d4, self.d5, self.f)

    @property
    def big_d(self) -> tuple[int, int, int]:
        """(D1, D2, D3) = (d4 d5, d2 d3 d5, d1 d3)."""
        return (self.d4 * self.d5, self.d2 * self.d3 * self.d5, self.d1 * self.d3)

    @property
    def moduli(self) -> tuple[int, int, int]:
        """(c1, c2, c3) = (D1 f, D2 f, D3 f)."""
        D1, D2, D3 = self.big_d
        return (D1 * self.f, D2 * self.f, D3 * self.f)

    @property
    def level(self) -> int:
        """d1 d2 d3 d4 d5 f, the common denominator of all twelve coordinates."""
        return self.d1 * self.d2 * self.d3 * self.d4 * self.d5 * self.f

    def left_moduli(self) -> tuple[int, int, int, int, int, int]:
        """Denominators of u_L coordinates, ordered (12), (13), (14), (23), (24), (34)."""
        d1, d2, d3, d4, d5, f = self.as_tuple()
        return (d1, d1 * d2 * d3, self.level, d2 * d3, d2 * d3 * d4 * d5 * f, d4 * d5 * f)

    def right_moduli(self) -> tuple[int, int, int, int, int, int]:
        """Denominators of u_R coordinates, same entry order as left_moduli."""
        d1, d2, d3, d4, d5, f = self.as_tuple()
        return (d4, d4 * d5, d4 * d5 * f, d2 * d5, d2 * d3 * d5 * f, d1 * d3 * f)

    def enumeration_budget(self) -> int:
        out = 1
        for m in self.left_moduli() + self.right_moduli():
            out *= m
        return out

    def torus(self) -> Matrix:
        d1, d2, d3, d4, d5, f = self.as_tuple()
        return diagonal([
            Fraction(d4 * d5 * f),
            Fraction(d2 * d3, d4),
            Fraction(d1, d2 * d5),
            Fraction(1, d1 * d3 * f),
        ])


@dataclass(frozen=True)
class GammaFactor:
    """2x2 integer block [[x, b], [d, y]] with determinant 1."""

    x: int
    b: int
    d: int
    y: int

    def __post_init__(self):
        if self.x * self.y - self.b * self.d != 1:
            raise NotUnimodular(f"block determinant is {self.x * self.y - self.b * self.d}, not 1")

    def matrix(self) -> Matrix:
        return Matrix([[self.x, self.b], [self.d, self.y]])


@dataclass(frozen=True)
class AuxQuantities:
    u1: int
    u2: int
    v1: int
    v2: int
    S: int
    T: int

    @classmethod
    def from_coordinates(cls, cell: FineCellLabel, coords: Sequence[tuple[int, int]]) -> "AuxQuantities":
        d1, d2, d3, d4, d5, _ = cell.as_tuple()
        (x1, y1), (x2, y2), (x3, y3), (x4, y4), (x5, y5), (x6, y6) = coords
        u1 = d1 * x2 + d2 * x3 * y1
        u2 = d2 * x4 + d4 * x5 * y2
        v1 = d1 * x2 * y3 + d2 * y1
        v2 = d2 * x4 * y5 + d4 * y2
        T = d3 * u2 + d4 * d5 * x6 * y3
        S = d2 * d4 * d5 * x6 * y1 * (x3 * y3 - 1) + d3 * (u1 * u2 - d1 * d4 * x5)
        return cls(u1=u1, u2=u2, v1=v1, v2=v2, S=S, T=T)


@dataclass(frozen=True)
class KloostermanResult:
    exact: PhaseSum
    numeric: complex
    method: str
    query: dict

    @classmethod
    def from_exact(cls, exact: PhaseSum, method: str, query: dict) -> "KloostermanResult":
        return cls(exact=exact, numeric=phase_sum_eval(exact), method=method, query=query)


def gamma_coordinates(gammas: Sequence[GammaFactor]) -> tuple[tuple[int, int], ...]:
    return tuple((g.x, g.y) for g in gammas)


def build_from_gammas(cell: FineCellLabel, gammas: Sequence[GammaFactor]) -> Matrix:
    """Product of the embedded 2x2 blocks along the word alpha beta alpha gamma beta alpha.

    The block at word slot k is gammas[slot k - 1] in the fixed slot order
    (1, 3, 2, 6, 5, 4); gammas[5] carries f in its lower-left corner, the
    others carry d1..d5.
    """
    if len(gammas) != 6:
        raise CellMismatch(f"need six blocks, got {len(gammas)}")
    lower_left = (cell.d1, cell.d2, cell.d3, cell.d4, cell.d5, cell.f)
    for g, want in zip(gammas, lower_left):
        if g.d != want:
            raise CellMismatch(f"block lower-left entry {g.d} does not match cell value {want}")
    word = sl4_long_word()
    slots = (1, 3, 2, 6, 5, 4)
    out = None
    for letter, slot in zip(word, slots):
        block = embed(SimpleRoot(4, letter), gammas[slot - 1].matrix())
        out = block if out is None else mat_prod(out, block)
    return out


def cell_of(a: Matrix) -> FineCellLabel:
    """Recover the fine cell label of a big-cell matrix from gcd ladders."""
    if a.n != 4:
        raise NotInBigCell(f"expected a 4x4 matrix, got {a.n}x{a.n}")
    m234 = minor(a, (2, 3, 4), (1, 2, 3))
    m134 = minor(a, (1, 3, 4), (1, 2, 3))
    m34 = minor(a, (3, 4), (1, 2))
    if a[4, 1] == 0 or m34 == 0 or m234 == 0:
        raise NotInBigCell("a corner minor vanishes")
    f = gcd_many([a[4, 1], a[4, 2], a[4, 3]])
    d5f = gcd_many([a[4, 1], a[4, 2]])
    d3f = gcd_many([m234, m134])
    if d5f % f or m234 % d3f or a[4, 1] % d5f or d3f % f:
        raise NonIntegralRefinement("gcd ladder does not refine integrally")
    d5 = d5f // f
    d4 = a[4, 1] // d5f
    d3 = d3f // f
    d1 = m234 // d3f
    if m34 % (d3 * d5 * f):
        raise NonIntegralRefinement(f"corner minor {m34} is not divisible by {d3 * d5 * f}")
    d2 = m34 // (d3 * d5 * f)
    if min(d1, d2, d3, d4, d5, f) < 1:
        raise NegativeCellData(f"recovered data ({d1},{d2},{d3},{d4},{d5},{f}) is not positive")
    return FineCellLabel(d1, d2, d3, d4, d5, f)


@dataclass(frozen=True)
class LemmaReport:
    gcd_equality: bool
    inverse_mod_f: bool
    units_mod_f: bool
    f: int

    @property
    def all_pass(self) -> bool:
        return self.gcd_equality and self.inverse_mod_f and self.units_mod_f


def lemma_checks(a: Matrix) -> LemmaReport:
    """Bottom-row gcd equality and the corner-inverse congruence mod f."""
    if a.n != 4 or a[4, 1] == 0:
        raise NotInBigCell("need a 4x4 big-cell matrix")
    f = gcd_many([a[4, 1], a[4, 2], a[4, 3]])
    minors = [minor(a, (2, 3, 4), (1, 2, 3)), minor(a, (1, 3, 4), (1, 2, 3)),
              minor(a, (1, 2, 4), (1, 2, 3))]
    m123 = minor(a, (1, 2, 3), (1, 2, 3))
    return LemmaReport(
        gcd_equality=(f == gcd_many(minors)),
        inverse_mod_f=((a[4, 4] * m123 - 1) % f == 0),
        units_mod_f=(math.gcd(a[4, 4], f) == 1 and math.gcd(m123, f) == 1),
        f=f,
    )


def representative_data(cell: FineCellLabel, coords: Sequence[tuple[int, int]]):
    """Numerators of the twelve canonical coordinates, from parametrization data.

    Returns (pl, pr): pl are the u_L numerators in entry order (12), (13),
    (14), (23), (24), (34); pr likewise for u_R.
    """
    d1, d2, d3, d4, d5, _ = cell.as_tuple()
    (x1, y1), (x2, y2), (x3, y3), (x4, y4), (x5, y5), (x6, y6) = coords
    aux = AuxQuantities.from_coordinates(cell, coords)
    pl = (x1, x1 * aux.u1 - d2 * x3, x1 * aux.S - d2 * x3 * aux.T + d2 * d4 * d5 * x6,
          aux.u1, aux.S, aux.T)
    pr = (y4, y5, y6, aux.v2, d4 * d5 * y3 + d3 * y6 * aux.u2,
          d5 * aux.v1 + d1 * d3 * x5 * y6)
    return pl, pr


def representative_congruences(cell: FineCellLabel, pl: Sequence[int], pr: Sequence[int]) -> dict[str, int]:
    """The eleven integrality congruences, evaluated on coordinate numerators."""
    d1, d2, d3, d4, d5, f = cell.as_tuple()
    N = cell.level
    p1, p2, p3, q1, q2, r = pl
    s1, s2, s3, w1, w2, w3 = pr
    residuals = (
        p3 % (d1 * d2 * d3),
        q2 % (d2 * d3),
        (s1 * p3 - d2 * d3 * p2) % (d1 * d2 * d3 * d4),
        (q2 * s1 - d2 * d3 * q1) % (d2 * d3 * d4),
        (r * s1 - d2 * d3) % d4,
        (d1 * d3 * d4 * p1 - d3 * p2 * w1 + p3 * s2) % (d1 * d2 * d3 * d4 * d5),
        (d1 * d3 * d4 - d3 * q1 * w1 + q2 * s2) % (d2 * d3 * d4 * d5),
        (r * s2 - d3 * w1) % (d4 * d5),
        (r * s3 - w2) % (d4 * d5 * f),
        (d4 * w3 - q1 * w2 + q2 * s3) % (d2 * d3 * d4 * d5 * f),
        (d4 * p1 * w3 - p2 * w2 + p3 * s3 - d2 * d4 * d5) % N,
    )
    return dict(zip(CONDITION_NAMES, residuals))


@dataclass(frozen=True)
class CongruenceReport:
    residuals: dict

    @property
    def satisfied(self) -> bool:
        return all(v == 0 for v in self.residuals.values())


def congruence_system(cell: FineCellLabel, coords: Sequence[tuple[int, int]]) -> CongruenceReport:
    """Evaluate the integrality congruences on parametrization coordinates."""
    pl, pr = representative_data(cell, coords)
    return CongruenceReport(residuals=representative_congruences(cell, pl, pr))


def lemma57_check(cell: FineCellLabel, coords: Sequence[tuple[int, int]]) -> dict[str, int]:
    """Residuals of the four derived congruences on unit coordinate data.

    Requires x1, x3, y4 coprime to the cell level and x3 y3 = 1 mod level;
    the stated moduli are kept as printed, including the trivially satisfied
    fourth one.
    """
    d1, d2, d3, d4, d5, f = cell.as_tuple()
    N = cell.level
    (x1, y1), (x2, y2), (x3, y3), (x4, y4), (x5, y5), (x6, y6) = coords
    for name, v in (("x1", x1), ("x3", x3), ("y4", y4)):
        if math.gcd(v, N) != 1:
            raise NotCoprime(f"{name} = {v} shares a factor with the level {N}")
    if (x3 * y3 - 1) % N:
        raise NotCoprime(f"x3 y3 = {x3 * y3} is not 1 mod the level {N}")
    aux = AuxQuantities.from_coordinates(cell, coords)
    x1_bar = mod_inverse(x1 % N, N) if N > 1 else 0
    y4_bar = mod_inverse(y4 % N, N) if N > 1 else 0
    return {
        "u1-unit": (d2 * d3 * aux.u1 - d2 * d2 * d3 * x1_bar * x3) % (d1 * d2 * d3),
        "T-unit": (aux.T - d2 * d3 * y4_bar) % d4,
        "v2-unit": (d3 * aux.v2 - d2 * d3 * y4_bar * y5) % d4,
        "w3-unit": (d2 * d3 * d4 * (d5 * aux.v1 + d1 * d3 * x5 * y6)
                    - d2 * d2 * d3 * d4 * d5 * x1_bar) % (d2 * d3),
    }


def representative_matrix(cell: FineCellLabel, pl: Sequence[int], pr: Sequence[int]):
    """Exact candidate A = u_L w0 t u_R for given coordinate numerators."""
    ml = cell.left_moduli()
    mr = cell.right_moduli()
    u_left = Matrix([
        [1, Fraction(pl[0], ml[0]), Fraction(pl[1], ml[1]), Fraction(pl[2], ml[2])],
        [0, 1, Fraction(pl[3], ml[3]), Fraction(pl[4], ml[4])],
        [0, 0, 1, Fraction(pl[5], ml[5])],
        [0, 0, 0, 1],
    ])
    u_right = Matrix([
        [1, Fraction(pr[0], mr[0]), Fraction(pr[1], mr[1]), Fraction(pr[2], mr[2])],
        [0, 1, Fraction(pr[3], mr[3]), Fraction(pr[4], mr[4])],
        [0, 0, 1, Fraction(pr[5], mr[5])],
        [0, 0, 0, 1],
    ])
    a = mat_prod(u_left, long_word_matrix(4), cell.torus(), u_right)
    return a, u_left, u_right


def display_factors(cell: FineCellLabel, gammas: Sequence[GammaFactor]):
    """(u_L, t, u_R) assembled from the closed coordinate expressions."""
    coords = gamma_coordinates(gammas)
    pl, pr = representative_data(cell, coords)
    _, u_left, u_right = representative_matrix(cell, pl, pr)
    return u_left, cell.torus(), u_right


def _in_cell(cell: FineCellLabel, pl: Sequence[int], pr: Sequence[int]) -> bool:
    """Unit filters equivalent to cell_of recovering this very cell."""
    d1, _, _, d4, d5, _ = cell.as_tuple()
    return (math.gcd(pr[0], d4) == 1
            and gcd_many([d4 * d5, d5 * pr[0], pr[1]]) == 1
            and math.gcd(pl[0], d1) == 1)


def _check_budget(cell: FineCellLabel, budget: int | None) -> None:
    size = cell.enumeration_budget()
    if budget is not None and size > budget:
        raise BudgetExceeded(size, budget)


_DISTRIBUTION_CACHE: dict[tuple[int, ...], dict] = {}


def fine_cell_distribution(cell: FineCellLabel, budget: int | None = DEFAULT_BUDGET) -> dict:
    """Multiplicity of each phase-relevant coordinate tuple (p1, q1, r, s1, w1, w3).

    The remaining six coordinates never enter the character, so candidates are
    counted in blocks: for each assignment of the u_R data and r, the valid
    (q1, q2) pairs and (p1, p2, p3) triples are counted independently and the
    two counts multiply.
    """
    _check_budget(cell, budget)
    key = cell.as_tuple()
    if key in _DISTRIBUTION_CACHE:
        return _DISTRIBUTION_CACHE[key]
    d1, d2, d3, d4, d5, f = key
    N = cell.level
    ml = cell.left_moduli()
    mr = cell.right_moduli()
    dist: dict[tuple[int, int, int, int, int, int], int] = {}
    for s1 in range(mr[0]):
        if math.gcd(s1, d4) != 1:
            continue
        for s2 in range(mr[1]):
            if gcd_many([d4 * d5, d5 * s1, s2]) != 1:
                continue
            for s3 in range(mr[2]):
                for w1 in range(mr[3]):
                    for w2 in range(mr[4]):
                        rs = [r for r in range(ml[5])
                              if (r * s1 - d2 * d3) % d4 == 0
                              and (r * s2 - d3 * w1) % (d4 * d5) == 0
                              and (r * s3 - w2) % (d4 * d5 * f) == 0]
                        if not rs:
                            continue
                        for w3 in range(mr[5]):
                            q_counts: dict[int, int] = {}
                            for q1 in range(ml[3]):
                                count = 0
                                for q2_step in range(ml[5]):
                                    q2 = d2 * d3 * q2_step
                                    if (q2 * s1 - d2 * d3 * q1) % (d2 * d3 * d4):
                                        continue
                                    if (d1 * d3 * d4 - d3 * q1 * w1 + q2 * s2) % (d2 * d3 * d4 * d5):
                                        continue
                                    if (d4 * w3 - q1 * w2 + q2 * s3) % (d2 * d3 * d4 * d5 * f):
                                        continue
                                    count += 1
                                if count:
                                    q_counts[q1] = count
                            if not q_counts:
                                continue
                            p_counts: dict[int, int] = {}
                            for p1 in range(ml[0]):
                                if math.gcd(p1, d1) != 1:
                                    continue
                                count = 0
                                for p2 in range(ml[1]):
                                    for p3_step in range(ml[5]):
                                        p3 = d1 * d2 * d3 * p3_step
                                        if (s1 * p3 - d2 * d3 * p2) % (d1 * d2 * d3 * d4):
                                            continue
                                        if (d1 * d3 * d4 * p1 - d3 * p2 * w1 + p3 * s2) % (d1 * d2 * d3 * d4 * d5):
                                            continue
                                        if (d4 * p1 * w3 - p2 * w2 + p3 * s3 - d2 * d4 * d5) % N:
                                            continue
                                        count += 1
                                if count:
                                    p_counts[p1] = count
                            if not p_counts:
                                continue
                            for r in rs:
                                for q1, qc in q_counts.items():
                                    for p1, pc in p_counts.items():
                                        tup = (p1, q1, r, s1, w1, w3)
                                        dist[tup] = dist.get(tup, 0) + qc * pc
    _DISTRIBUTION_CACHE[key] = dist
    return dist


def fine_cell_representatives(cell: FineCellLabel,
                              budget: int | None = DEFAULT_BUDGET) -> Iterator[tuple]:
    """Yield every canonical representative as a ((p), (s)) numerator pair.

    Same blocked scan as fine_cell_distribution, but keeping the aggregated
    coordinates, so each yielded pair pins down one double coset.
    """
    _check_budget(cell, budget)
    d1, d2, d3, d4, d5, f = cell.as_tuple()
    N = cell.level
    ml = cell.left_moduli()
    mr = cell.right_moduli()
    for s1 in range(mr[0]):
        if math.gcd(s1, d4) != 1:
            continue
        for s2 in range(mr[1]):
            if gcd_many([d4 * d5, d5 * s1, s2]) != 1:
                continue
            for s3 in range(mr[2]):
                for w1 in range(mr[3]):
                    for w2 in range(mr[4]):
                        rs = [r for r in range(ml[5])
                              if (r * s1 - d2 * d3) % d4 == 0
                              and (r * s2 - d3 * w1) % (d4 * d5) == 0
                              and (r * s3 - w2) % (d4 * d5 * f) == 0]
                        if not rs:
                            continue
                        for w3 in range(mr[5]):
                            q_pairs = []
                            for q1 in range(ml[3]):
                                for q2_step in range(ml[5]):
                                    q2 = d2 * d3 * q2_step
                                    if (q2 * s1 - d2 * d3 * q1) % (d2 * d3 * d4):
                                        continue
                                    if (d1 * d3 * d4 - d3 * q1 * w1 + q2 * s2) % (d2 * d3 * d4 * d5):
                                        continue
                                    if (d4 * w3 - q1 * w2 + q2 * s3) % (d2 * d3 * d4 * d5 * f):
                                        continue
                                    q_pairs.append((q1, q2))
                            if not q_pairs:
                                continue
                            p_triples = []
                            for p1 in range(ml[0]):
                                if math.gcd(p1, d1) != 1:
                                    continue
                                for p2 in range(ml[1]):
                                    for p3_step in range(ml[5]):
                                        p3 = d1 * d2 * d3 * p3_step
                                        if (s1 * p3 - d2 * d3 * p2) % (d1 * d2 * d3 * d4):
                                            continue
                                        if (d1 * d3 * d4 * p1 - d3 * p2 * w1 + p3 * s2) % (d1 * d2 * d3 * d4 * d5):
                                            continue
                                        if (d4 * p1 * w3 - p2 * w2 + p3 * s3 - d2 * d4 * d5) % N:
                                            continue
                                        p_triples.append((p1, p2, p3))
                            if not p_triples:
                                continue
                            for r in rs:
                                for q1, q2 in q_pairs:
                                    for p1, p2, p3 in p_triples:
                                        yield ((p1, p2, p3, q1, q2, r),
                                               (s1, s2, s3, w1, w2, w3))


def character_phase(cell: FineCellLabel, m: Sequence[int], n: Sequence[int],
                    key: Sequence[int]) -> Fraction:
    """Phase of one representative from its (p1, q1, r, s1, w1, w3) data."""
    d1, d2, d3, d4, d5, f = cell.as_tuple()
    p1, q1, r, s1, w1, w3 = key
    total = (Fraction(m[0] * p1, d1) + Fraction(m[1] * q1, d2 * d3)
             + Fraction(m[2] * r, d4 * d5 * f)
             + Fraction(n[0] * s1, d4) + Fraction(n[1] * w1, d2 * d5)
             + Fraction(n[2] * w3, d1 * d3 * f))
    return phase(total)


def _query(kind: str, cell_or_c, m, n) -> dict:
    return {"kind": kind, "cell" if kind.startswith("fine") else "c": list(cell_or_c),
            "m": list(m), "n": list(n)}


def fine_sum_oracle(cell: FineCellLabel, m: Sequence[int], n: Sequence[int],
                    budget: int | None = DEFAULT_BUDGET) -> KloostermanResult:
    """Character sum over the cell's double-coset representatives."""
    dist = fine_cell_distribution(cell, budget)
    out = PhaseSum()
    for key, mult in dist.items():
        out.add_term(character_phase(cell, m, n, key), mult)
    return KloostermanResult.from_exact(out, "oracle", _query("fine", cell.as_tuple(), m, n))


def _fine_sum_oracle_reference(cell: FineCellLabel, m: Sequence[int], n: Sequence[int],
                               budget: int | None = DEFAULT_BUDGET) -> KloostermanResult:
    """Unblocked reference: walk the full coordinate grid, keep a candidate only
    when its matrix is integral and cell_of returns the requested cell."""
    _check_budget(cell, budget)
    ml = cell.left_moduli()
    mr = cell.right_moduli()
    out = PhaseSum()
    for pl in itertools.product(*[range(v) for v in ml]):
        for pr in itertools.product(*[range(v) for v in mr]):
            a, _, _ = representative_matrix(cell, pl, pr)
            if not a.is_integral():
                continue
            try:
                recovered = cell_of(a)
            except (NotInBigCell, NonIntegralRefinement, NegativeCellData):
                continue
            if recovered != cell:
                continue
            key = (pl[0], pl[3], pl[5], pr[0], pr[3], pr[5])
            out.add_term(character_phase(cell, m, n, key), 1)
    return KloostermanResult.from_exact(out, "oracle", _query("fine", cell.as_tuple(), m, n))


def closed_form_applicable(cell: FineCellLabel, m: Sequence[int], n: Sequence[int]) -> bool:
    """The four character congruences outside which the closed form is zero."""
    d1, d2, d3, d4, d5, f = cell.as_tuple()
    return not ((m[1] * d1) % (d2 * d3) or m[2] % (d5 * f)
                or (n[1] * d4) % (d2 * d3 * d5) or n[2] % (d1 * d3 * d4 * f))


def fine_sum_closed_form(cell: FineCellLabel, m: Sequence[int], n: Sequence[int]) -> KloostermanResult:
    """Prefactor times a double sum of products of two classical sums."""
    query = _query("fine", cell.as_tuple(), m, n)
    if not closed_form_applicable(cell, m, n):
        return KloostermanResult.from_exact(PhaseSum(), "closed_form", query)
    d1, d2, d3, d4, d5, f = cell.as_tuple()
    prefactor = d1 ** 3 * d2 ** 2 * d3 ** 2 * d4 ** 2 * d5 ** 4 * f ** 4
    total = PhaseSum()
    for x3 in range(d3):
        num_left = m[1] * d1 * f * x3 + n[2] * d2 * d5
        if num_left % (d3 * f):
            raise NonIntegralArgument(
                f"left argument {num_left} is not divisible by {d3 * f} at x3={x3}")
        left = kloosterman(m[0], num_left // (d3 * f), d1)
        for y5 in range(d5):
            num_right = n[1] * d4 * f * y5 + m[2] * d2 * d3
            if num_right % (d5 * f):
                raise NonIntegralArgument(
                    f"right argument {num_right} is not divisible by {d5 * f} at y5={y5}")
            total = total + left * kloosterman(n[0], num_right // (d5 * f), d4)
    return KloostermanResult.from_exact(total * prefactor, "closed_form", query)


def cells_for_moduli(c: Sequence[int]) -> list[FineCellLabel]:
    """All fine cells whose invariants (c1, c2, c3) equal c, over every f."""
    c1, c2, c3 = c
    if min(c1, c2, c3) < 1:
        raise NegativeCellData(f"moduli must be positive: {tuple(c)}")
    out = []
    for f in range(1, gcd_many([c1, c2, c3]) + 1):
        if c1 % f or c2 % f or c3 % f:
            continue
        D1, D2, D3 = c1 // f, c2 // f, c3 // f
        for d5 in range(1, D1 + 1):
            if D1 % d5:
                continue
            d4 = D1 // d5
            for d3 in range(1, D3 + 1):
                if D3 % d3:
                    continue
                d1 = D3 // d3
                if D2 % (d3 * d5):
                    continue
                out.append(FineCellLabel(d1, D2 // (d3 * d5), d3, d4, d5, f))
    return out


def coarse_sum(c: Sequence[int], m: Sequence[int], n: Sequence[int],
               method: str = "oracle", budget: int | None = DEFAULT_BUDGET) -> KloostermanResult:
    """Sum of fine sums over every cell with invariants c."""
    if method not in ("oracle", "closed_form"):
        raise CellMismatch(f"unknown method {method!r}")
    total = PhaseSum()
    for cell in cells_for_moduli(c):
        if method == "oracle":
            total = total + fine_sum_oracle(cell, m, n, budget).exact
        else:
            total = total + fine_sum_closed_form(cell, m, n).exact
    return KloostermanResult.from_exact(total, method, _query("coarse", tuple(c), m, n))


@dataclass(frozen=True)
class LongWordBoundReport:
    holds: bool
    lhs: float
    rhs: float


def longword_bound_holds(c: Sequence[int], m: Sequence[int], n: Sequence[int],
                         value: complex) -> LongWordBoundReport:
    """|value| against c1^3 c2^2 c3^2 (c2+1) (m1,c3)^(1/2) (n1,c1)^(1/2)
    sqrt(c1 c3) tau((c1,c2,c3)) tau(c1) tau(c3)."""
    c1, c2, c3 = c
    lhs = abs(value)
    rhs = (c1 ** 3 * c2 ** 2 * c3 ** 2 * (c2 + 1)
           * math.sqrt(math.gcd(abs(m[0]), c3)) * math.sqrt(math.gcd(abs(n[0]), c1))
           * math.sqrt(c1 * c3)
           * divisor_tau(gcd_many([c1, c2, c3])) * divisor_tau(c1) * divisor_tau(c3))
    return LongWordBoundReport(lhs <= rhs + 1e-9, lhs, rhs)
