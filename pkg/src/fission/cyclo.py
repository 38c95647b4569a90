"""Exact arithmetic in cyclotomic fields Q(zeta_N).

A CycNum is stored in canonical form: coordinates over the power basis
{zeta_N^e : 0 <= e < phi(N)} after reduction modulo the N-th cyclotomic
polynomial, with the conductor N shrunk to the smallest N' | N such that the
value lies in Q(zeta_{N'}).  Canonical form makes value equality the same as
structural equality, so CycNum is hashable and totally orderable by a
deterministic key.

The convention is zeta_n = exp(2*pi*i/n), written E(n) in text form (i = E(4)).

Values are immutable and all operations are pure; the memoized tables
(cyclotomic polynomials, subfield solvers, root powers) are only ever filled
with idempotent entries, so concurrent use needs no synchronization.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import reduce
from math import gcd

Rat = Fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _phi(n: int) -> int:
    """Euler's totient."""
    result = n
    p = 2
    m = n
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


_cyclo_cache: dict[int, tuple[int, ...]] = {}


def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients (constant first) of the n-th cyclotomic polynomial.

    Computed by exact division of x^n - 1 by the Phi_d for proper divisors d.
    """
    cached = _cyclo_cache.get(n)
    if cached is not None:
        return cached
    # x^n - 1
    num = [0] * (n + 1)
    num[0] = -1
    num[n] = 1
    for d in _divisors(n):
        if d == n:
            continue
        den = cyclotomic_poly(d)
        # Exact division of num by the monic polynomial den.
        deg_den = len(den) - 1
        quot = [0] * (len(num) - deg_den)
        work = list(num)
        for i in range(len(quot) - 1, -1, -1):
            c = work[i + deg_den]
            if c:
                quot[i] = c
                for j, dc in enumerate(den):
                    work[i + j] -= c * dc
        num = quot
    result = tuple(num)
    _cyclo_cache[n] = result
    return result


def _reduce_mod_cyclo(vec: list[Fraction], n: int) -> tuple[tuple[int, Fraction], ...]:
    """Reduce a coefficient vector in zeta_n powers modulo Phi_n; sparse output."""
    phi_poly = cyclotomic_poly(n)
    deg = len(phi_poly) - 1
    for i in range(len(vec) - 1, deg - 1, -1):
        c = vec[i]
        if c:
            vec[i] = _ZERO
            base = i - deg
            for j in range(deg):
                pc = phi_poly[j]
                if pc:
                    vec[base + j] -= c * pc
    return tuple((e, c) for e, c in enumerate(vec[:deg]) if c)


class _SubfieldSolver:
    """Decides membership of Q(zeta_n) elements in Q(zeta_d) for d | n.

    Precomputes the reduced basis images of zeta_d^e in the zeta_n power basis
    and an exact inverse of a full-rank row subsystem; solving then costs two
    small matrix-vector products plus a verification.
    """

    def __init__(self, n: int, d: int):
        self.n = n
        self.d = d
        phi_n = _phi(n)
        phi_d = _phi(d)
        step = n // d
        cols: list[list[Fraction]] = []
        for e in range(phi_d):
            vec = [_ZERO] * (e * step + 1)
            vec[e * step] = _ONE
            sparse = _reduce_mod_cyclo(vec, n)
            dense = [_ZERO] * phi_n
            for i, c in sparse:
                dense[i] = c
            cols.append(dense)
        self.basis = cols  # cols[e][row]
        # Row-select a square invertible subsystem by Gaussian elimination.
        rows = list(range(phi_n))
        mat = [[cols[e][r] for e in range(phi_d)] for r in rows]
        pivot_rows: list[int] = []
        work = [row[:] for row in mat]
        used = [False] * phi_n
        for col in range(phi_d):
            pr = next(r for r in range(phi_n) if not used[r] and work[r][col])
            used[pr] = True
            pivot_rows.append(pr)
            inv = _ONE / work[pr][col]
            for r in range(phi_n):
                if r != pr and work[r][col]:
                    factor = work[r][col] * inv
                    for c2 in range(col, phi_d):
                        work[r][c2] -= factor * work[pr][c2]
        self.pivot_rows = pivot_rows
        self.inverse = _invert_matrix([[mat[r][c] for c in range(phi_d)] for r in pivot_rows])

    def solve(self, dense: list[Fraction]) -> tuple[tuple[int, Fraction], ...] | None:
        """Coordinates over zeta_d powers, or None if not in the subfield."""
        phi_d = _phi(self.d)
        sub = [dense[r] for r in self.pivot_rows]
        x = [sum(self.inverse[i][j] * sub[j] for j in range(phi_d)) for i in range(phi_d)]
        # Verify against all rows; the subsystem only pins a candidate.
        for r in range(len(dense)):
            if sum(self.basis[e][r] * x[e] for e in range(phi_d)) != dense[r]:
                return None
        return tuple((e, c) for e, c in enumerate(x) if c)


def _invert_matrix(mat: list[list[Fraction]]) -> list[list[Fraction]]:
    k = len(mat)
    aug = [row[:] + [_ONE if i == j else _ZERO for j in range(k)] for i, row in enumerate(mat)]
    for col in range(k):
        pr = next(r for r in range(col, k) if aug[r][col])
        aug[col], aug[pr] = aug[pr], aug[col]
        inv = _ONE / aug[col][col]
        aug[col] = [c * inv for c in aug[col]]
        for r in range(k):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [row[k:] for row in aug]


_solver_cache: dict[tuple[int, int], _SubfieldSolver] = {}


def _solver(n: int, d: int) -> _SubfieldSolver:
    key = (n, d)
    solver = _solver_cache.get(key)
    if solver is None:
        solver = _SubfieldSolver(n, d)
        _solver_cache[key] = solver
    return solver


def _canonicalize(n: int, sparse: tuple[tuple[int, Fraction], ...]) -> tuple[int, tuple[tuple[int, Fraction], ...]]:
    """Shrink the conductor to the minimal divisor field containing the value."""
    if not sparse:
        return 1, ()
    if n == 1:
        return 1, sparse
    if all(e == 0 for e, _ in sparse):
        return 1, sparse
    phi_n = _phi(n)
    dense = [_ZERO] * phi_n
    for e, c in sparse:
        dense[e] = c
    for d in sorted(_divisors(n), key=lambda d: (_phi(d), d)):
        if d == n:
            break
        coords = _solver(n, d).solve(dense)
        if coords is not None:
            return d, coords
    return n, sparse


class CycNum:
    """An element of the maximal abelian extension Q^ab, in canonical form."""

    __slots__ = ("conductor", "coeffs", "_hash")

    conductor: int
    coeffs: tuple[tuple[int, Fraction], ...]

    def __init__(self, value: "CycNum | Fraction | int | None" = None):
        if value is None:
            object.__setattr__(self, "conductor", 1)
            object.__setattr__(self, "coeffs", ())
        elif isinstance(value, CycNum):
            object.__setattr__(self, "conductor", value.conductor)
            object.__setattr__(self, "coeffs", value.coeffs)
        else:
            q = Fraction(value)
            object.__setattr__(self, "conductor", 1)
            object.__setattr__(self, "coeffs", ((0, q),) if q else ())
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("CycNum is immutable")

    @staticmethod
    def _make(n: int, vec: list[Fraction]) -> "CycNum":
        reduced = _reduce_mod_cyclo(list(vec), n)
        cond, coeffs = _canonicalize(n, reduced)
        out = CycNum.__new__(CycNum)
        object.__setattr__(out, "conductor", cond)
        object.__setattr__(out, "coeffs", coeffs)
        object.__setattr__(out, "_hash", None)
        return out

    @staticmethod
    def zeta(n: int) -> "CycNum":
        """The primitive n-th root of unity exp(2*pi*i/n)."""
        if n < 1:
            raise ValueError("n must be >= 1")
        if n == 1:
            return CycNum(1)
        return CycNum._make(n, [_ZERO, _ONE])

    # -- predicates -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_rational(self) -> bool:
        return self.conductor == 1

    def as_rational(self) -> Fraction:
        if self.conductor != 1:
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0][1] if self.coeffs else _ZERO

    # -- arithmetic -------------------------------------------------------

    def _lift_dict(self, m: int) -> dict[int, Fraction]:
        step = m // self.conductor
        return {e * step: c for e, c in self.coeffs}

    def __add__(self, other) -> "CycNum":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        m = self.conductor * other.conductor // gcd(self.conductor, other.conductor)
        acc = self._lift_dict(m)
        for e, c in other._lift_dict(m).items():
            acc[e] = acc.get(e, _ZERO) + c
        vec = [_ZERO] * m
        for e, c in acc.items():
            vec[e % m] += c
        return CycNum._make(m, vec)

    __radd__ = __add__

    def __neg__(self) -> "CycNum":
        out = CycNum.__new__(CycNum)
        object.__setattr__(out, "conductor", self.conductor)
        object.__setattr__(out, "coeffs", tuple((e, -c) for e, c in self.coeffs))
        object.__setattr__(out, "_hash", None)
        return out

    def __sub__(self, other) -> "CycNum":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "CycNum":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "CycNum":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return CycNum(0)
        m = self.conductor * other.conductor // gcd(self.conductor, other.conductor)
        a = self._lift_dict(m)
        b = other._lift_dict(m)
        vec = [_ZERO] * (2 * m)
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                vec[(e1 + e2) % m] += c1 * c2
        return CycNum._make(m, vec)

    __rmul__ = __mul__

    def inverse(self) -> "CycNum":
        """Multiplicative inverse via the extended Euclidean algorithm mod Phi_N."""
        if self.is_zero:
            raise ZeroDivisionError("division by zero cyclotomic number")
        if self.conductor == 1:
            return CycNum(1 / self.coeffs[0][1])
        n = self.conductor
        phi_poly = [Fraction(c) for c in cyclotomic_poly(n)]
        a = [_ZERO] * _phi(n)
        for e, c in self.coeffs:
            a[e] = c
        inv = _poly_modinv(a, phi_poly)
        return CycNum._make(n, inv)

    def __truediv__(self, other) -> "CycNum":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "CycNum":
        return _coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "CycNum":
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = CycNum(1)
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- identity ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.conductor == other.conductor and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.conductor, self.coeffs))
            object.__setattr__(self, "_hash", h)
        return h

    def sort_key(self):
        """Deterministic total-order key on canonical forms."""
        return (self.conductor, tuple((e, c.numerator, c.denominator) for e, c in self.coeffs))

    # -- display ----------------------------------------------------------

    def to_complex(self) -> complex:
        """Floating-point evaluation; display/debug helper only."""
        z = cmath.exp(2j * cmath.pi / self.conductor)
        return sum(float(c) * z**e for e, c in self.coeffs) if self.coeffs else 0j

    def __repr__(self) -> str:
        return f"CycNum({render_scalar(self)!r})"

    def __str__(self) -> str:
        return render_scalar(self)


def _coerce(value) -> CycNum:
    if isinstance(value, CycNum):
        return value
    if isinstance(value, (int, Fraction)):
        return CycNum(value)
    return NotImplemented


def _poly_modinv(a: list[Fraction], modulus: list[Fraction]) -> list[Fraction]:
    """Inverse of a modulo a monic polynomial, by extended gcd over Q."""

    def trim(p):
        while p and not p[-1]:
            p.pop()
        return p

    def divmod_poly(num, den):
        num = num[:]
        q = [_ZERO] * max(1, len(num) - len(den) + 1)
        inv_lead = _ONE / den[-1]
        for i in range(len(num) - len(den), -1, -1):
            c = num[i + len(den) - 1] * inv_lead
            if c:
                q[i] = c
                for j, dc in enumerate(den):
                    num[i + j] -= c * dc
        return q, trim(num)

    r0, r1 = trim(modulus[:]), trim(a[:])
    s0, s1 = [_ZERO], [_ONE]
    while len(r1) > 1:
        q, r = divmod_poly(r0, r1)
        prod = [_ZERO] * (len(q) + len(s1) - 1 if q and s1 else 1)
        for i, qc in enumerate(q):
            if qc:
                for j, sc in enumerate(s1):
                    prod[i + j] += qc * sc
        new_s = [_ZERO] * max(len(s0), len(prod), 1)
        for i, c in enumerate(s0):
            new_s[i] += c
        for i, c in enumerate(prod):
            new_s[i] -= c
        r0, r1 = r1, r
        s0, s1 = s1, trim(new_s)
    if not r1 or not r1[0]:
        raise ZeroDivisionError("element not invertible")
    scale = _ONE / r1[0]
    return [c * scale for c in s1]


_zeta_pow_cache: dict[tuple[int, int], CycNum] = {}


def unit_root(n: int, k: int = 1) -> CycNum:
    """zeta_n^k, memoized."""
    k %= n
    key = (n, k)
    val = _zeta_pow_cache.get(key)
    if val is None:
        val = CycNum.zeta(n) ** k
        _zeta_pow_cache[key] = val
    return val


def lcm(*values: int) -> int:
    return reduce(lambda a, b: a * b // gcd(a, b), values, 1)


def render_scalar(value: CycNum, product_context: bool = False) -> str:
    """Text form per the I/O grammar: rationals, i = E(4), E(n), infix sums/products."""
    if value.is_zero:
        return "0"
    parts = []
    for e, c in value.coeffs:
        if e == 0:
            parts.append(str(c))
            continue
        if value.conductor == 4 and e == 1:
            root = "i"
        elif e == 1:
            root = f"E({value.conductor})"
        else:
            root = f"E({value.conductor})^{e}"
        if c == 1:
            parts.append(root)
        elif c == -1:
            parts.append(f"-{root}")
        else:
            parts.append(f"{c}*{root}")
    text = parts[0]
    for p in parts[1:]:
        text += p if p.startswith("-") else "+" + p
    if product_context and (len(parts) > 1 or text.startswith("-") or "/" in text):
        return f"({text})"
    return text
