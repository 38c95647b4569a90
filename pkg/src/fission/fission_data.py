"""Pairwise invariants of Stokes circles and the numerical-equivalence oracle.

The slope matrix of a pointed type records slope(sigma^k(q_i) - sigma^l(q_j))
over 0 <= k <= ram(q_i), 0 <= l <= ram(q_j) (inclusive ranges; the redundancy
of the last row/column is itself a tested property).  Two pointed types are
numerically equivalent iff they have the same shape and identical matrices,
which for compatible types coincides with equality of labelled fission data
and with labelled fission-tree isomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import NotCompatible
from .factor import (
    ExpFactor,
    IrregularClass,
    PointedIrregularType,
    common_part,
    fission_exponent,
)
from .levels import LevelDatum, levels_of

__all__ = [
    "common_part",
    "fission_exponent",
    "FissionDatum",
    "fission_datum",
    "SlopeMatrix",
    "slope_matrix",
    "numerically_equivalent",
    "numerically_equivalent_reduced",
]


def _diff_slope(q1: ExpFactor, q2: ExpFactor) -> Fraction:
    """slope(q1 - q2), walking merged exponents from the top (0 if equal)."""
    i = j = 0
    t1, t2 = q1.terms, q2.terms
    while i < len(t1) or j < len(t2):
        e1 = t1[i][0] if i < len(t1) else None
        e2 = t2[j][0] if j < len(t2) else None
        if e2 is None or (e1 is not None and e1 > e2):
            return e1
        if e1 is None or e2 > e1:
            return e2
        if t1[i][1] != t2[j][1]:
            return e1
        i += 1
        j += 1
    return Fraction(0)


@dataclass(frozen=True)
class FissionDatum:
    """Per-branch level data with multiplicities plus the symmetric matrix of
    pairwise fission exponents (f_ij = 0 iff i = j for labelled data)."""

    branches: tuple[tuple[int, LevelDatum], ...]
    fission: tuple[tuple[Fraction, ...], ...]

    def expanded(self) -> tuple[tuple[LevelDatum, ...], tuple[tuple[Fraction, ...], ...]]:
        """The multiset formulation: circles repeated by multiplicity, with
        f = 0 between copies of the same circle."""
        data: list[LevelDatum] = []
        owner: list[int] = []
        for idx, (n, L) in enumerate(self.branches):
            for _ in range(n):
                data.append(L)
                owner.append(idx)
        m = len(data)
        mat = tuple(
            tuple(
                Fraction(0) if owner[i] == owner[j] else self.fission[owner[i]][owner[j]]
                for j in range(m)
            )
            for i in range(m)
        )
        return tuple(data), mat

    def unlabelled_equal(self, other: "FissionDatum") -> bool:
        """Equality up to a simultaneous permutation of the branches."""
        if len(self.branches) != len(other.branches):
            return False

        def profile(datum: FissionDatum, i: int):
            n, L = datum.branches[i]
            row = sorted(
                (f, datum.branches[j][0], datum.branches[j][1].sort_key())
                for j, f in enumerate(datum.fission[i])
                if j != i
            )
            return (n, L.sort_key(), tuple(row))

        mine = [profile(self, i) for i in range(len(self.branches))]
        theirs = [profile(other, i) for i in range(len(other.branches))]
        if sorted(mine) != sorted(theirs):
            return False

        m = len(self.branches)
        candidates = [
            [j for j in range(m) if theirs[j] == mine[i]] for i in range(m)
        ]

        def extend(mapping: dict[int, int], i: int) -> bool:
            if i == m:
                return True
            for j in candidates[i]:
                if j in mapping.values():
                    continue
                ok = all(
                    self.fission[i][i2] == other.fission[j][j2]
                    for i2, j2 in mapping.items()
                )
                if ok:
                    mapping[i] = j
                    if extend(mapping, i + 1):
                        return True
                    del mapping[i]
            return False

        return extend({}, 0)

    def to_json(self) -> dict:
        return {
            "branches": [
                {"multiplicity": n, "levels": L.to_json()} for n, L in self.branches
            ],
            "fission": [[str(f) for f in row] for row in self.fission],
        }


def fission_datum(obj: PointedIrregularType | IrregularClass, *, labelled: bool | None = None) -> FissionDatum:
    """Fission datum of a pointed type (labelled; requires compatibility) or
    of an irregular class (orbit order is canonical)."""
    if isinstance(obj, PointedIrregularType):
        if labelled is None:
            labelled = True
        if labelled and not obj.is_compatible():
            raise NotCompatible("fission datum of a labelled type needs a compatible type")
        entries = obj.entries
    else:
        entries = obj.orbits
    factors = [q for _, q in entries]
    branches = tuple((n, levels_of(q)) for n, q in entries)
    m = len(factors)
    mat = [[Fraction(0)] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            f = fission_exponent(factors[i], factors[j])
            mat[i][j] = mat[j][i] = f
    return FissionDatum(branches, tuple(tuple(row) for row in mat))


@dataclass(frozen=True)
class SlopeMatrix:
    """Full table of slope(sigma^k(q_i) - sigma^l(q_j)); symmetric under
    (i,k) <-> (j,l) and invariant under simultaneous Galois shift per block."""

    multiplicities: tuple[int, ...]
    rams: tuple[int, ...]
    entries: tuple  # entries[i][j][k][l]


def _matrix_with_ranges(Q: PointedIrregularType, rams: tuple[int, ...]) -> tuple:
    orbits = []
    for _, q in Q.entries:
        orbits.append(q.orbit)
    table = []
    for i, ri in enumerate(rams):
        row_i = []
        conj_i = [orbits[i][k % len(orbits[i])] for k in range(ri + 1)]
        for j, rj in enumerate(rams):
            conj_j = [orbits[j][l % len(orbits[j])] for l in range(rj + 1)]
            block = tuple(
                tuple(_diff_slope(a, b) for b in conj_j) for a in conj_i
            )
            row_i.append(block)
        table.append(tuple(row_i))
    return tuple(table)


def slope_matrix(Q: PointedIrregularType) -> SlopeMatrix:
    rams = tuple(q.ram for _, q in Q.entries)
    return SlopeMatrix(Q.multiplicities, rams, _matrix_with_ranges(Q, rams))


def numerically_equivalent(Q1: PointedIrregularType, Q2: PointedIrregularType) -> bool:
    """Same shape (m, n_i) and equal slope tables over Q1's index ranges."""
    if len(Q1) != len(Q2) or Q1.multiplicities != Q2.multiplicities:
        return False
    rams = tuple(q.ram for _, q in Q1.entries)
    return _matrix_with_ranges(Q1, rams) == _matrix_with_ranges(Q2, rams)


def numerically_equivalent_reduced(Q1: PointedIrregularType, Q2: PointedIrregularType) -> bool:
    """The 0..ram-1 variant; with equal ranks this implies full equivalence."""
    if len(Q1) != len(Q2) or Q1.multiplicities != Q2.multiplicities:
        return False
    if Q1.rank != Q2.rank:
        return False
    rams = tuple(q.ram for _, q in Q1.entries)

    def reduced(Q):
        out = []
        for i, ri in enumerate(rams):
            conj_i = [Q.factors[i].galois(k) for k in range(ri)]
            row = []
            for j, rj in enumerate(rams):
                conj_j = [Q.factors[j].galois(l) for l in range(rj)]
                row.append(tuple(tuple(_diff_slope(a, b) for b in conj_j) for a in conj_i))
            out.append(tuple(row))
        return tuple(out)

    return reduced(Q1) == reduced(Q2)
