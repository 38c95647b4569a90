"""Realisations of truncated fission trees and configuration-space factorizations.

A realisation assigns a coefficient to every admissible vertex subject to:
nonzero on mandatory vertices, distinct values on authorised siblings, and
distinct N-th powers on mandatory siblings (N the relative ramification of
the parent).  The configuration space B(Q) is the set of realisations of the
truncated tree; it factors over the vertices into X_n / X*_{n,N} pieces whose
fundamental groups are the pure braid groups PB_n and the complex braid
groups P(N,1,n).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .cyclo import CycNum
from .errors import DomainMismatch, NotRealisation
from .factor import ExpFactor, PointedIrregularType
from .tree import AUTHORISED, EMPTY, MANDATORY, FissionTree, build_tree, isomorphic

Realisation = dict  # vertex id -> CycNum, on exactly the admissible vertices


@dataclass(frozen=True)
class ConfigFactor:
    vertex: int
    kind: str  # "point" | "X" | "Xstar"
    n: int = 0
    N: int | None = None

    @property
    def dim(self) -> int:
        return self.n

    @property
    def pi1(self) -> str | None:
        if self.kind == "X" and self.n >= 2:
            return f"PB_{self.n}"
        if self.kind == "Xstar":
            return f"P({self.N},1,{self.n})"
        return None

    @property
    def pi1_rank(self) -> int | None:
        """Free-abelian rank when pi1 of this factor is abelian, else None."""
        if self.kind == "point" or (self.kind == "X" and self.n == 1):
            return 0
        if self.kind == "X" and self.n == 2:
            return 1
        if self.kind == "Xstar" and self.n == 1:
            return 1
        return None

    def label(self) -> str:
        if self.kind == "point":
            return "pt"
        if self.kind == "X":
            return f"X_{self.n}"
        return f"X*_{{{self.n},{self.N}}}"


@dataclass(frozen=True)
class ConfigFactorization:
    factors: tuple[ConfigFactor, ...]
    total_dim: int
    special_dim: int

    @property
    def pi1_factors(self) -> tuple[str, ...]:
        return tuple(f.pi1 for f in self.factors if f.pi1 is not None)

    @property
    def pi1_rank(self) -> int | None:
        """Rank of pi1 when it is free abelian (all factor groups are Z); else None."""
        total = 0
        for f in self.factors:
            r = f.pi1_rank
            if r is None:
                return None
            total += r
        return total

    def nontrivial_factors(self) -> tuple[ConfigFactor, ...]:
        return tuple(f for f in self.factors if f.kind != "point")

    def factor_multiset(self) -> tuple[str, ...]:
        return tuple(sorted(f.label() for f in self.nontrivial_factors()))

    def pi1_label(self) -> str:
        labels = self.pi1_factors
        return " x ".join(labels) if labels else "1"

    def to_json(self) -> dict:
        return {
            "factors": [
                {
                    "vertex": f.vertex,
                    "kind": f.label(),
                    "n": f.n,
                    "N": f.N,
                    "dim": f.dim,
                }
                for f in self.factors
                if f.kind != "point"
            ],
            "total_dim": self.total_dim,
            "special_dim": self.special_dim,
            "pi1": self.pi1_label(),
        }


def factorize(T: FissionTree) -> ConfigFactorization:
    """B(Q) = prod over vertices: X_n for n authorised children, X*_{n,N} for
    n mandatory children (N = relative ramification), a point otherwise."""
    factors = []
    for v in range(len(T.heights)):
        ch = T.children[v]
        auth = [c for c in ch if T.kinds[c] == AUTHORISED]
        mand = [c for c in ch if T.kinds[c] == MANDATORY]
        if auth and mand:
            raise ValueError(f"vertex {v} mixes authorised and mandatory children")
        if mand:
            factors.append(ConfigFactor(v, "Xstar", len(mand), T.relative_ram(v)))
        elif auth:
            factors.append(ConfigFactor(v, "X", len(auth)))
        else:
            factors.append(ConfigFactor(v, "point"))
    total = sum(f.dim for f in factors)
    eta = int(T.root_height)
    return ConfigFactorization(tuple(factors), total, total - (eta - 1))


def _sibling_groups(T: FissionTree):
    for v in range(len(T.heights)):
        admissible = [c for c in T.children[v] if T.kinds[c] != EMPTY]
        if admissible:
            yield v, admissible


def is_realisation(T: FissionTree, c: Realisation) -> bool:
    """The three conditions of the realisation characterisation."""
    expected = set(T.admissible_vertices)
    if set(c) != expected:
        raise DomainMismatch(
            "coefficient map must be defined on exactly the admissible vertices"
        )
    for v in expected:
        if T.kinds[v] == MANDATORY and c[v].is_zero:
            return False
    for v, siblings in _sibling_groups(T):
        N = T.relative_ram(v)
        for a in range(len(siblings)):
            for b in range(a + 1, len(siblings)):
                if c[siblings[a]] ** N == c[siblings[b]] ** N:
                    return False
    return True


def realisation_to_type(
    T: FissionTree, c: Realisation, check: bool = True
) -> PointedIrregularType:
    """q_i = sum over admissible vertices on the branch of c(v) x^{h(v)}."""
    if T.labels is None:
        raise ValueError("realisation_to_type needs a labelled tree")
    if set(c) != set(T.admissible_vertices):
        raise DomainMismatch(
            "coefficient map must be defined on exactly the admissible vertices"
        )
    if check and not is_realisation(T, c):
        raise NotRealisation("coefficient map violates the realisation conditions")
    entries = []
    for leaf in T.leaves:
        terms = [
            (T.heights[v], c[v])
            for v in T.path_up(leaf)
            if T.kinds[v] != EMPTY
        ]
        entries.append((T.mults[leaf], ExpFactor(terms)))
    return PointedIrregularType(entries)


def type_to_realisation(Q: PointedIrregularType) -> tuple[FissionTree, Realisation]:
    """The unique realisation carrying Q's coefficients on its labelled tree."""
    T = build_tree(Q)
    c: Realisation = {}
    for leaf, (_, q) in zip(T.leaves, Q.entries):
        for v in T.path_up(leaf):
            if T.kinds[v] != EMPTY:
                c[v] = q.coeff(T.heights[v])
    return T, c


def sample_realisation(T: FissionTree, seed: int = 0) -> Realisation:
    """A deterministic valid realisation: small positive integers per sibling
    group (distinct positive integers always have distinct N-th powers), with
    a seed-dependent offset."""
    rng = random.Random(seed)
    c: Realisation = {}
    for v, siblings in _sibling_groups(T):
        base = 1 + rng.randrange(3)
        for idx, u in enumerate(sorted(siblings)):
            c[u] = CycNum(base + idx)
    return c


def semantic_realisation_check(T: FissionTree, c: Realisation) -> bool:
    """True iff the type rebuilt from c has a labelled tree isomorphic to T
    (the semantic counterpart of is_realisation; failures surface as duplicate
    orbits, incompatibility or a different tree)."""
    from .errors import FissionError
    from .tree import truncate_tree

    try:
        Q = realisation_to_type(T, c, check=False)
        T2 = build_tree(Q)
        if T2.root_height < T.root_height:
            # realign eta: floor(katz)+1 = root_height for katz = root_height - 1/2
            T2 = truncate_tree(T2, T.root_height - Fraction(1, 2))
    except (FissionError, ValueError):
        return False
    return isomorphic(T, T2, labelled=True)
