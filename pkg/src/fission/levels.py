"""Level data of a single Stokes circle and its admissible exponents.

The levels of a circle <q> are the nonzero slopes among differences of Galois
conjugates of q.  Two independent computations are provided: a structural one
reading the jumps of the running ramification of q's truncations, and a brute
force oracle enumerating slope(q - sigma^i(q)).

A level datum (k_1 > ... > k_m) has running lcm-denominators r_1 < ... < r_m
with r_1 > 1; the admissible exponents A(L) are the heights at which a
coefficient may move in an admissible deformation, the inconsequential ones
Inc(L) = A(L) \\ L may additionally vanish.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import ceil, floor

from .cyclo import lcm
from .errors import MalformedLevelDatum
from .factor import ExpFactor


@dataclass(frozen=True)
class LevelDatum:
    """Strictly decreasing positive rationals with strictly increasing
    running lcm-denominators (the deformation invariant of one circle)."""

    levels: tuple[Fraction, ...] = ()

    def __init__(self, levels=()):
        levels = tuple(Fraction(k) for k in levels)
        run = 1
        prev = None
        for k in levels:
            if k <= 0:
                raise MalformedLevelDatum(f"level {k} is not positive")
            if prev is not None and k >= prev:
                raise MalformedLevelDatum(f"levels not strictly decreasing at {k}")
            new_run = lcm(run, k.denominator)
            if new_run <= run:
                raise MalformedLevelDatum(
                    f"common denominator does not increase at level {k}"
                )
            run = new_run
            prev = k
        object.__setattr__(self, "levels", levels)

    def __iter__(self):
        return iter(self.levels)

    def __len__(self) -> int:
        return len(self.levels)

    @cached_property
    def ramification_indices(self) -> tuple[int, ...]:
        out = []
        run = 1
        for k in self.levels:
            run = lcm(run, k.denominator)
            out.append(run)
        return tuple(out)

    @property
    def ram(self) -> int:
        return self.ramification_indices[-1] if self.levels else 1

    def ram_at(self, k) -> int:
        """lcm of the denominators of the levels >= k (1 if none)."""
        k = Fraction(k)
        run = 1
        for level, r in zip(self.levels, self.ramification_indices):
            if level >= k:
                run = r
            else:
                break
        return run

    def is_admissible(self, k) -> bool:
        k = Fraction(k)
        return k > 0 and (k * self.ram_at(k)).denominator == 1

    def to_json(self) -> list[str]:
        return [str(k) for k in self.levels]

    def sort_key(self):
        return tuple((k.numerator, k.denominator) for k in self.levels)


@dataclass(frozen=True)
class ExponentSets:
    """Admissible and inconsequential exponents of a level datum in (0, bound],
    stored descending (the k_1 > ... > k_m convention)."""

    levels: LevelDatum
    bound: Fraction
    admissible: tuple[Fraction, ...]
    inconsequential: tuple[Fraction, ...]


def levels_of(q: ExpFactor) -> LevelDatum:
    """Structural computation: the exponents where the running lcm-denominator
    of the truncations of q (read from the top) strictly increases."""
    out = []
    run = 1
    for e, _ in q.terms:
        new_run = lcm(run, e.denominator)
        if new_run > run:
            out.append(e)
            run = new_run
    return LevelDatum(out)


def levels_oracle(q: ExpFactor) -> LevelDatum:
    """Brute force: distinct nonzero values of slope(q - sigma^i(q))."""
    slopes = set()
    for i in range(1, q.ram):
        diff = q - q.galois(i)
        if not diff.is_zero:
            slopes.add(diff.slope)
    return LevelDatum(sorted(slopes, reverse=True))


def exponent_sets(L: LevelDatum, bound) -> ExponentSets:
    """A(L) and Inc(L) intersected with (0, bound], per the zone description:
    multiples of 1/r_i in (k_{i+1}, k_i], integers above k_1."""
    bound = Fraction(bound)
    if bound < 0:
        raise ValueError("bound must be >= 0")
    admissible: set[Fraction] = set()
    # Integers everywhere.
    for n in range(1, floor(bound) + 1):
        admissible.add(Fraction(n))
    rams = L.ramification_indices
    ks = L.levels
    for i, (k, r) in enumerate(zip(ks, rams)):
        hi = min(k, bound)
        lo = ks[i + 1] if i + 1 < len(ks) else Fraction(0)
        # multiples of 1/r in (lo, hi]
        a = floor(lo * r) + 1
        b = floor(hi * r)
        for j in range(a, b + 1):
            admissible.add(Fraction(j, r))
    level_set = set(ks)
    inconsequential = sorted((k for k in admissible if k not in level_set), reverse=True)
    adm = sorted(admissible, reverse=True)
    return ExponentSets(L, bound, tuple(adm), tuple(inconsequential))


def non_integral_admissible_count(L: LevelDatum) -> int:
    """|A(L) \\ N| by the closed formula sum_i (r_i k_i - floor(r_{i-1} k_i))."""
    total = 0
    r_prev = 1
    for k, r in zip(L.levels, L.ramification_indices):
        total += int(r * k) - floor(r_prev * k)
        r_prev = r
    return total


def non_integral_admissible(L: LevelDatum) -> tuple[Fraction, ...]:
    """A(L) \\ N by direct enumeration (finite: bounded by the top level)."""
    if not L.levels:
        return ()
    top = L.levels[0]
    sets = exponent_sets(L, top)
    return tuple(k for k in sets.admissible if k.denominator != 1)


def single_circle_config(q: ExpFactor) -> tuple[int, int, int]:
    """(torus rank, affine dim, trace-free affine dim) of B(q):
    B(q) ~ (C*)^m x C^N with m = #levels and N = #{inconsequential <= Katz}."""
    L = levels_of(q)
    katz = q.slope
    sets = exponent_sets(L, katz)
    special = sum(1 for k in non_integral_admissible(L) if k not in set(L.levels))
    return len(L), len(sets.inconsequential), special
