"""Exponential factors (Puiseux principal parts) and irregular types/classes.

An ExpFactor is a finite sum q = sum a_k x^k with rational exponents k > 0 and
nonzero cyclotomic coefficients a_k, stored as a tuple of (exponent,
coefficient) pairs sorted by decreasing exponent.  The Galois action of the
covering circle sends the coefficient of x^e to exp(-2*pi*i*k*e) times itself
under sigma^k; on exponent j/r this is the classical omega^{kj} with
omega = exp(-2*pi*i/r), r = ram(q).

Everything here is immutable and pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd

from .cyclo import CycNum, lcm, unit_root
from .errors import DuplicateOrbit, NonPositiveExponent, RamMismatch

_ZERO = CycNum(0)


def _coerce_coeff(c) -> CycNum:
    return c if isinstance(c, CycNum) else CycNum(c)


@dataclass(frozen=True)
class ExpFactor:
    """A Puiseux principal part; the empty sum is the tame factor 0."""

    terms: tuple[tuple[Fraction, CycNum], ...] = ()

    def __init__(self, terms=()):
        acc: dict[Fraction, CycNum] = {}
        for e, c in terms:
            e = Fraction(e)
            c = _coerce_coeff(c)
            if e in acc:
                acc[e] = acc[e] + c
            else:
                acc[e] = c
        clean = []
        for e in sorted(acc, reverse=True):
            if acc[e].is_zero:
                continue
            if e <= 0:
                raise NonPositiveExponent(f"exponent {e} is not positive")
            clean.append((e, acc[e]))
        object.__setattr__(self, "terms", tuple(clean))

    # -- basic invariants ---------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def exponents(self) -> tuple[Fraction, ...]:
        return tuple(e for e, _ in self.terms)

    @property
    def slope(self) -> Fraction:
        """Maximal exponent; 0 for the tame factor."""
        return self.terms[0][0] if self.terms else Fraction(0)

    @cached_property
    def ram(self) -> int:
        """lcm of the exponent denominators; 1 for the tame factor."""
        return lcm(*(e.denominator for e, _ in self.terms))

    @property
    def irr(self) -> int:
        return int(self.ram * self.slope)

    def coeff(self, e) -> CycNum:
        e = Fraction(e)
        for e2, c in self.terms:
            if e2 == e:
                return c
        return _ZERO

    # -- ring-ish operations --------------------------------------------------

    def __add__(self, other: "ExpFactor") -> "ExpFactor":
        return ExpFactor(self.terms + other.terms)

    def __neg__(self) -> "ExpFactor":
        out = ExpFactor.__new__(ExpFactor)
        object.__setattr__(out, "terms", tuple((e, -c) for e, c in self.terms))
        return out

    def __sub__(self, other: "ExpFactor") -> "ExpFactor":
        return self + (-other)

    def scale(self, c) -> "ExpFactor":
        return ExpFactor((e, _coerce_coeff(c) * v) for e, v in self.terms)

    # -- truncation and Galois action ----------------------------------------

    def truncate(self, k) -> "ExpFactor":
        """Discard all monomials of exponent < k (k >= 0)."""
        k = Fraction(k)
        if k < 0:
            raise ValueError("truncation exponent must be >= 0")
        out = ExpFactor.__new__(ExpFactor)
        object.__setattr__(out, "terms", tuple((e, c) for e, c in self.terms if e >= k))
        return out

    def galois(self, k: int) -> "ExpFactor":
        """sigma^k(q): multiply the coefficient of x^e by exp(-2*pi*i*k*e)."""
        out = []
        for e, c in self.terms:
            d = e.denominator
            shift = (-k * e.numerator) % d
            out.append((e, c if shift == 0 else c * unit_root(d, shift)))
        result = ExpFactor.__new__(ExpFactor)
        object.__setattr__(result, "terms", tuple(out))
        return result

    @cached_property
    def orbit(self) -> tuple["ExpFactor", ...]:
        """All ram(q) Galois conjugates, starting with q itself."""
        return tuple(self.galois(k) for k in range(self.ram))

    def sort_key(self):
        return tuple((e, c.sort_key()) for e, c in self.terms)

    @cached_property
    def canonical_rep(self) -> "ExpFactor":
        """The conjugate with lexicographically least coefficient sequence."""
        return min(self.orbit, key=ExpFactor.sort_key)

    def orbit_key(self):
        return self.canonical_rep.sort_key()

    # -- unramified part ------------------------------------------------------

    def unramified_part(self) -> "ExpFactor":
        out = ExpFactor.__new__(ExpFactor)
        object.__setattr__(out, "terms", tuple((e, c) for e, c in self.terms if e.denominator == 1))
        return out

    def pullback(self, r: int) -> "ExpFactor":
        """Rewrite q in the variable t with t^r = x, as a polynomial in t."""
        if r % self.ram != 0:
            raise RamMismatch(f"ram(q) = {self.ram} does not divide r = {r}")
        out = ExpFactor.__new__(ExpFactor)
        object.__setattr__(out, "terms", tuple((e * r, c) for e, c in self.terms))
        return out

    def __str__(self) -> str:
        from .parsing import render_factor

        return render_factor(self)


def same_orbit(q1: ExpFactor, q2: ExpFactor) -> bool:
    """True iff q2 = sigma^k(q1) for some k."""
    if q1.ram != q2.ram or q1.exponents != q2.exponents:
        return False
    return any(q2 == conj for conj in q1.orbit)


def common_part(q1: ExpFactor, q2: ExpFactor) -> tuple[ExpFactor, ExpFactor]:
    """Truncations at the smallest exponent of q1 where the Galois orbits of
    the truncations agree; (0, 0) if they never do."""
    for k in sorted(q1.exponents):
        t1, t2 = q1.truncate(k), q2.truncate(k)
        if same_orbit(t1, t2):
            return t1, t2
    return ExpFactor(), ExpFactor()


def fission_exponent(q1: ExpFactor, q2: ExpFactor) -> Fraction:
    """max slope of the parts left after removing the common part; zero iff
    the two factors span the same Stokes circle."""
    c1, c2 = common_part(q1, q2)
    return max((q1 - c1).slope, (q2 - c2).slope)


def _compatible_pair(q1: ExpFactor, q2: ExpFactor) -> bool:
    c1, c2 = common_part(q1, q2)
    return c1 == c2


@dataclass(frozen=True)
class PointedIrregularType:
    """Ordered list of (multiplicity, chosen orbit representative)."""

    entries: tuple[tuple[int, ExpFactor], ...]

    def __init__(self, entries):
        entries = tuple((int(n), q) for n, q in entries)
        if not entries:
            raise ValueError("a pointed irregular type needs at least one entry")
        for n, q in entries:
            if n < 1:
                raise ValueError(f"multiplicity {n} must be >= 1")
        keys = [q.orbit_key() for _, q in entries]
        if len(set(keys)) != len(keys):
            raise DuplicateOrbit("two entries lie in the same Galois orbit")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def factors(self) -> tuple[ExpFactor, ...]:
        return tuple(q for _, q in self.entries)

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.entries)

    @property
    def rank(self) -> int:
        return sum(n * q.ram for n, q in self.entries)

    @cached_property
    def ram(self) -> int:
        return lcm(*(q.ram for _, q in self.entries))

    @property
    def katz(self) -> Fraction:
        return max(q.slope for _, q in self.entries)

    def is_compatible(self) -> bool:
        """For every exponent: truncations in the same orbit are equal."""
        qs = self.factors
        return all(
            _compatible_pair(qs[i], qs[j])
            for i in range(len(qs))
            for j in range(i + 1, len(qs))
        )

    def make_compatible(self) -> "PointedIrregularType":
        """Replace each factor by a Galois conjugate so the result is compatible.

        Factors are placed in non-increasing slope order; each one is aligned
        greedily with the already-placed factors (agreement at higher exponents
        survives refinement at lower ones, so the greedy choice never backtracks).
        """
        order = sorted(range(len(self.entries)), key=lambda i: self.entries[i][1].slope, reverse=True)
        placed: dict[int, ExpFactor] = {}
        for i in order:
            q = self.entries[i][1]
            for candidate in q.orbit:
                if all(_compatible_pair(candidate, p) for p in placed.values()):
                    placed[i] = candidate
                    break
            else:  # pragma: no cover - existence is a theorem
                raise NotImplementedError("no compatible conjugate found")
        return PointedIrregularType(
            tuple((n, placed[i]) for i, (n, _) in enumerate(self.entries))
        )

    def classify(self) -> "IrregularClass":
        return IrregularClass(
            tuple((n, q.canonical_rep) for n, q in self.entries)
        )

    def full_list(self, r: int | None = None) -> tuple[ExpFactor, ...]:
        """The Galois-closed full irregular type: every conjugate of every
        factor, repeated by multiplicity, pulled back to t with t^r = x."""
        r = r if r is not None else self.ram
        out = []
        for n, q in self.entries:
            for conj in q.orbit:
                out.extend([conj.pullback(r)] * n)
        return tuple(out)

    def trace(self) -> ExpFactor:
        """Tr(Q) = sum over the full list; equals sum n_i ram(q_i) pi_un(q_i)."""
        total = ExpFactor()
        for n, q in self.entries:
            total = total + q.unramified_part().scale(n * q.ram)
        return total

    def trace_project(self) -> "PointedIrregularType":
        """Subtract Tr(Q)/rank from every factor; only unramified monomials move."""
        shift = self.trace().scale(Fraction(-1, self.rank))
        return PointedIrregularType(tuple((n, q + shift) for n, q in self.entries))

    def __str__(self) -> str:
        from .parsing import render_type

        return render_type(self)


def pullback(Q: PointedIrregularType, r: int) -> tuple[ExpFactor, ...]:
    """Each pointed factor rewritten as a polynomial in t, t^r = x."""
    return tuple(q.pullback(r) for _, q in Q.entries)


@dataclass(frozen=True)
class IrregularClass:
    """Finite multiset of Stokes circles: canonical orbit reps + multiplicities."""

    orbits: tuple[tuple[int, ExpFactor], ...]

    def __init__(self, orbits):
        items = []
        seen = set()
        for n, q in orbits:
            rep = q.canonical_rep
            key = rep.sort_key()
            if key in seen:
                raise DuplicateOrbit("same orbit listed twice in an irregular class")
            seen.add(key)
            items.append((int(n), rep))
        items.sort(key=lambda item: (item[1].sort_key(), item[0]))
        object.__setattr__(self, "orbits", tuple(items))

    def __len__(self) -> int:
        return len(self.orbits)

    @property
    def rank(self) -> int:
        return sum(n * q.ram for n, q in self.orbits)

    @cached_property
    def ram(self) -> int:
        return lcm(*(q.ram for _, q in self.orbits))

    @property
    def katz(self) -> Fraction:
        return max(q.slope for _, q in self.orbits)

    def point(self) -> PointedIrregularType:
        """A compatible pointed irregular type with this class."""
        return PointedIrregularType(self.orbits).make_compatible()

    def __str__(self) -> str:
        from .parsing import render_class

        return render_class(self)


def classify(Q: PointedIrregularType) -> IrregularClass:
    return Q.classify()


def landau_bound(n: int) -> int:
    """Landau's function g(n): the largest lcm of any partition of n.

    A maximal partition can be taken with coprime prime-power parts (1s as
    padding), so this is a 0/1 knapsack over prime powers.
    """
    primes = [p for p in range(2, n + 1) if all(p % q for q in range(2, p)) ]
    best = [1] * (n + 1)
    for p in primes:
        for total in range(n, p - 1, -1):
            pk = p
            while pk <= total:
                cand = best[total - pk] * pk
                if cand > best[total]:
                    best[total] = cand
                pk *= p
    return max(best) if n >= 1 else 1


def _gcd_many(*values: int) -> int:
    out = 0
    for v in values:
        out = gcd(out, v)
    return out
