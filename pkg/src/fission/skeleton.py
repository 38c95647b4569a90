"""Topological skeleta, global moduli dimensions, and a bounded tree census.

The skeleton of a wild Riemann surface is (genus, forest of fission-tree
isomorphism classes); its moduli dimension is 3g - 3 + sum of the trees'
moduli numbers, with the Deligne-Mumford expectation flag 2g - 2 + sum(1 +
Katz(T)) > 0 reported verbatim.

The census enumerates every valid fission tree with rank <= max_rank and
Katz(T) <= katz_bound exactly once up to isomorphism, by enumerating branch
level data, multiplicities, and nested gluing hierarchies, validating each
assembled tree against the axioms, and deduplicating on canonical forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import BoundsTooLarge
from .levels import LevelDatum, exponent_sets
from .tree import FissionTree, build_tree, from_branch_data, moduli_number, validate
from .weyl import weyl_group


@dataclass(frozen=True)
class Skeleton:
    """Genus plus multiset of fission trees (compared by canonical form)."""

    genus: int
    forest: tuple[FissionTree, ...]

    def __init__(self, genus: int, forest):
        if genus < 0:
            raise ValueError("genus must be >= 0")
        trees = sorted((t.unlabelled() for t in forest), key=lambda t: t.canonical_form)
        object.__setattr__(self, "genus", int(genus))
        object.__setattr__(self, "forest", tuple(trees))

    @property
    def forest_forms(self) -> tuple[str, ...]:
        return tuple(t.canonical_form for t in self.forest)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Skeleton):
            return NotImplemented
        return self.genus == other.genus and self.forest_forms == other.forest_forms

    def __hash__(self) -> int:
        return hash((self.genus, self.forest_forms))

    def to_json(self) -> dict:
        counts: dict[str, int] = {}
        for form in self.forest_forms:
            counts[form] = counts.get(form, 0) + 1
        return {
            "genus": self.genus,
            "forest": [
                {"tree": form, "multiplicity": n} for form, n in sorted(counts.items())
            ],
        }


def skeleton_of(genus: int, classes) -> Skeleton:
    """Trees of the marked-point classes, as a multiset (order irrelevant)."""
    forest = []
    for item in classes:
        if isinstance(item, FissionTree):
            forest.append(item)
        else:
            forest.append(build_tree(item))
    return Skeleton(genus, forest)


def moduli_dimension(S: Skeleton) -> tuple[int, bool]:
    """dim M_{g,F} = 3g - 3 + sum mu(T), with the DM-expectation flag
    2g - 2 + sum (1 + Katz(T)) > 0; negative dimensions are reported raw."""
    dim = 3 * S.genus - 3 + sum(moduli_number(t) for t in S.forest)
    nu = sum((1 + t.katz for t in S.forest), Fraction(0))
    flag = 2 * S.genus - 2 + nu > 0
    return dim, flag


# -- census ----------------------------------------------------------------------


@dataclass(frozen=True)
class CensusRow:
    tree: FissionTree
    canonical: str
    rank: int
    mu: int
    dim: int
    weyl_order: int

    def to_json(self) -> dict:
        return {
            "canonical": self.canonical,
            "rank": self.rank,
            "mu": self.mu,
            "dim": self.dim,
            "weyl_order": self.weyl_order,
        }


def _level_data(max_ram: int, katz_bound: Fraction) -> list[LevelDatum]:
    """All valid level data with Ram(L) <= max_ram and levels <= katz_bound."""
    out: list[LevelDatum] = [LevelDatum()]

    def candidates(run: int, below: Fraction | None):
        hi = katz_bound if below is None else min(katz_bound, below)
        seen = set()
        for den in range(1, max_ram + 1):
            new_run = run * den // gcd(run, den)
            if new_run <= run or new_run > max_ram:
                continue
            num = 1
            while Fraction(num, den) <= hi:
                k = Fraction(num, den)
                if (below is None or k < below) and k.denominator == den and k not in seen:
                    seen.add(k)
                    yield k, new_run
                num += 1

    def extend(levels: list[Fraction], run: int):
        below = levels[-1] if levels else None
        for k, new_run in sorted(candidates(run, below), reverse=True):
            cur = levels + [k]
            out.append(LevelDatum(cur))
            extend(cur, new_run)

    extend([], 1)
    # Deduplicate (different recursion paths cannot collide, but keep it tight).
    seen = set()
    unique = []
    for L in out:
        if L.levels not in seen:
            seen.add(L.levels)
            unique.append(L)
    return unique


def _branch_multisets(level_data: list[LevelDatum], max_rank: int):
    """Multisets of (multiplicity, level datum) circles with total rank
    sum n*Ram(L) <= max_rank.  The same (n, L) may repeat: distinct circles
    can share both invariants (e.g. <x^(1/3)> and <2x^(1/3)>)."""
    items = []  # (sort position, cost, (n, L))
    pos = 0
    for L in sorted(level_data, key=lambda L: (L.ram, L.sort_key())):
        for n in range(1, max_rank // L.ram + 1):
            items.append((pos, n * L.ram, (n, L)))
            pos += 1

    def extend(start: int, budget: int, acc: list):
        if acc:
            yield list(acc)
        for i in range(start, len(items)):
            _, cost, entry = items[i]
            if cost <= budget:
                acc.append(entry)
                yield from extend(i, budget - cost, acc)
                acc.pop()

    yield from extend(0, max_rank, [])


def _set_partitions(items: list[int]):
    """All set partitions of items (including the single-block one)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _set_partitions(rest):
        for b in range(len(sub)):
            yield [blk + [first] if i == b else list(blk) for i, blk in enumerate(sub)]
        yield [[first]] + [list(b) for b in sub]


def _product(lists):
    if not lists:
        yield []
        return
    for head in lists[0]:
        for tail in _product(lists[1:]):
            yield [head] + tail


def _hierarchies(m: int, candidate_heights: list[Fraction], ok_pair):
    """All maps (i<j) -> nca height forming nested cluster hierarchies over
    {0..m-1}, with cross-block pairs filtered by ok_pair(i, j, h)."""

    def build(items: list[int], max_h_index: int):
        if len(items) == 1:
            yield {}
            return
        for hi in range(max_h_index, -1, -1):
            h = candidate_heights[hi]
            for blocks in _set_partitions(items):
                if len(blocks) < 2:
                    continue
                cross = [
                    (i, j)
                    for a in range(len(blocks))
                    for b in range(a + 1, len(blocks))
                    for i in blocks[a]
                    for j in blocks[b]
                ]
                if not all(ok_pair(i, j, h) for i, j in cross):
                    continue
                subs = [list(build(sorted(blk), hi - 1)) for blk in blocks]
                if any(not s for s in subs):
                    continue
                for combo in _product(subs):
                    nca = {(min(i, j), max(i, j)): h for i, j in cross}
                    for sub in combo:
                        nca.update(sub)
                    yield nca

    if m == 1:
        yield {}
        return
    yield from build(list(range(m)), len(candidate_heights) - 1)


def census(
    max_rank: int,
    katz_bound,
    max_results: int = 100_000,
    max_rank_cap: int = 8,
):
    """Every valid fission tree with rank <= max_rank and Katz(T) <= katz_bound,
    exactly once up to isomorphism, in (rank, canonical form) order."""
    katz_bound = Fraction(katz_bound)
    if max_rank < 1 or katz_bound <= 0:
        raise ValueError("need max_rank >= 1 and katz_bound > 0")
    if max_rank > max_rank_cap:
        raise BoundsTooLarge(
            f"max_rank {max_rank} exceeds the cap {max_rank_cap}; raise max_rank_cap "
            "explicitly if you really want this"
        )

    level_data = _level_data(max_rank, katz_bound)
    seen: dict[str, CensusRow] = {}

    for branches in _branch_multisets(level_data, max_rank):
        m = len(branches)
        level_sets = [set(L.levels) for _, L in branches]
        adm_union: set[Fraction] = set()
        for _, L in branches:
            adm_union |= set(exponent_sets(L, katz_bound + 1).admissible)
        candidates = sorted(adm_union)

        def ok_pair(i: int, j: int, h: Fraction) -> bool:
            # Decorations must agree at and above the gluing height.
            hi = {k for k in level_sets[i] if k >= h}
            hj = {k for k in level_sets[j] if k >= h}
            return hi == hj

        if m == 1:
            hierarchy_iter = [dict()]
        else:
            hierarchy_iter = _hierarchies(m, candidates, ok_pair)

        for nca in hierarchy_iter:
            try:
                T = from_branch_data(branches, nca)
            except (ValueError, ArithmeticError):
                continue
            if T.katz > katz_bound:
                continue
            if validate(T):
                continue
            T = T.unlabelled()
            form = T.canonical_form
            if form in seen:
                continue
            if len(seen) >= max_results:
                raise BoundsTooLarge(f"census exceeded {max_results} trees")
            seen[form] = CensusRow(
                tree=T,
                canonical=form,
                rank=T.rank,
                mu=moduli_number(T),
                dim=len(T.admissible_vertices),
                weyl_order=weyl_group(T).order,
            )

    return [seen[f] for f in sorted(seen, key=lambda f: (seen[f].rank, f))]
