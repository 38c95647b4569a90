"""Automorphism and Weyl groups of fission trees; one-circle full group via SNF.

The Weyl group W(T) sits inside Aut(T) x prod_i Z/r_i (r_i the leaf
ramifications), cut out by the congruences d_i = d_j mod r_ij with r_ij the
ramification of the nearest common ancestor of leaves i and j.  Orders are
computed two ways: by the wreath recursion over maximal subtrees, and by
brute-force enumeration of the ambient product filtered by the congruences.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from math import gcd

from .errors import ShapeMismatch
from .factor import PointedIrregularType, _gcd_many
from .levels import levels_of
from .tree import FissionTree, build_tree, tree_fission_datum

Matrix = list[list[int]]


@dataclass(frozen=True)
class GroupDescriptor:
    order: int
    shape: str

    def __str__(self) -> str:
        return f"{self.shape} (order {self.order})"


@dataclass(frozen=True)
class WeylElement:
    """A leaf permutation (0-based, perm[i] = image of leaf i) together with
    per-leaf Galois shifts d_i mod r_i."""

    perm: tuple[int, ...]
    shifts: tuple[int, ...]

    @staticmethod
    def identity(p: int) -> "WeylElement":
        return WeylElement(tuple(range(p)), (0,) * p)

    @property
    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.perm)) and not any(self.shifts)


# -- tree bookkeeping -----------------------------------------------------------


def _leaf_data(T: FissionTree):
    leaves = T.leaves
    rams = [T.ram_index(v) for v in leaves]
    pair_rams = {}
    for i in range(len(leaves)):
        for j in range(i + 1, len(leaves)):
            pair_rams[(i, j)] = T.ram_index(T.nca(leaves[i], leaves[j]))
    return leaves, rams, pair_rams


def _is_automorphism(T: FissionTree, perm: tuple[int, ...]) -> bool:
    """perm preserves the labelled fission datum (leaf data + nca heights)."""
    datum = tree_fission_datum(T)
    branches = datum.branches
    m = len(branches)
    if sorted(perm) != list(range(m)):
        return False
    for i in range(m):
        if branches[perm[i]] != branches[i]:
            return False
    for i in range(m):
        for j in range(i + 1, m):
            a, b = perm[i], perm[j]
            if datum.fission[a][b] != datum.fission[i][j]:
                return False
    return True


def automorphisms(T: FissionTree) -> list[tuple[int, ...]]:
    """All leaf permutations preserving the decorated tree (p! filter; small p)."""
    p = len(T.leaves)
    return [perm for perm in permutations(range(p)) if _is_automorphism(T, perm)]


def _shift_count(T: FissionTree) -> int:
    """Number of shift tuples satisfying all congruences, by backtracking."""
    leaves, rams, pair_rams = _leaf_data(T)
    p = len(leaves)
    count = 0

    def extend(i: int, chosen: list[int]) -> None:
        nonlocal count
        if i == p:
            count += 1
            return
        for d in range(rams[i]):
            if all(
                (d - chosen[j]) % pair_rams[(j, i)] == 0 for j in range(i)
            ):
                extend(i + 1, chosen + [d])

    extend(0, [])
    return count


# -- recursive orders -------------------------------------------------------------


def _highest_branch_vertex(T: FissionTree, start: int) -> int | None:
    """Walk down single-child chains from start; the first vertex with >= 2
    children, or None if the chain ends at a leaf."""
    v = start
    while True:
        ch = T.children[v]
        if len(ch) >= 2:
            return v
        if not ch:
            return None
        v = ch[0]


def _aut_recursive(T: FissionTree, start: int) -> tuple[int, str]:
    b = _highest_branch_vertex(T, start)
    if b is None:
        return 1, "1"
    groups: dict[str, list[int]] = {}
    for c in T.children[b]:
        groups.setdefault(_subtree_key(T, c), []).append(c)
    order = 1
    parts = []
    for key in sorted(groups):
        members = groups[key]
        n = len(members)
        sub_order, sub_shape = _aut_recursive(T, members[0])
        order *= _factorial(n) * sub_order**n
        if sub_shape == "1":
            parts.append(f"Sym_{n}")
        else:
            parts.append(f"Sym_{n} wr ({sub_shape})")
    return order, " x ".join(parts)


def _weyl_recursive(T: FissionTree, start: int) -> tuple[int, str]:
    b = _highest_branch_vertex(T, start)
    if b is None:
        leaf = start
        while T.children[leaf]:
            leaf = T.children[leaf][0]
        r = T.ram_index(leaf)
        return r, f"Z/{r}"
    r = T.ram_index(b)
    groups: dict[str, list[int]] = {}
    for c in T.children[b]:
        groups.setdefault(_subtree_key(T, c), []).append(c)
    order = r
    parts = []
    for key in sorted(groups):
        members = groups[key]
        n = len(members)
        sub_order, sub_shape = _weyl_recursive(T, members[0])
        # delta: W(subtree) ->> Z/r is onto (global rotation), so each shift
        # class has sub_order/r elements.
        order *= _factorial(n) * (sub_order // r) ** n
        parts.append(f"Sym_{n} wr ({sub_shape})")
    return order, " x ".join(parts) + f" | shifts mod {r}"


def _subtree_key(T: FissionTree, v: int) -> str:
    def canon(u: int):
        return (
            str(T.heights[u]),
            T.kinds[u],
            T.mults[u] if T.mults[u] is not None else 0,
            T.ram_index(u),
            tuple(sorted(canon(c) for c in T.children[u])),
        )

    return repr(canon(v))


def _factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


# -- public operations ---------------------------------------------------------------


def aut_group(T: FissionTree) -> GroupDescriptor:
    order, shape = _aut_recursive(T, T.root)
    return GroupDescriptor(order, shape)


def weyl_group(T: FissionTree) -> GroupDescriptor:
    order, shape = _weyl_recursive(T, T.root)
    return GroupDescriptor(order, shape)


def weyl_order_bruteforce(T: FissionTree, cap: int = 10_000_000) -> int:
    """|W(T)| by filtering the ambient semidirect product by the congruences.

    Membership of (pi, d) splits as (pi automorphism) and (d satisfies the
    congruences), so the joint count is the product of the two filters."""
    leaves, rams, _ = _leaf_data(T)
    total = _factorial(len(leaves))
    for r in rams:
        total *= r
    if total > cap:
        raise ValueError(f"brute force would enumerate {total} > cap {cap} elements")
    return len(automorphisms(T)) * _shift_count(T)


def weyl_member(T: FissionTree, w: WeylElement) -> bool:
    leaves, rams, pair_rams = _leaf_data(T)
    p = len(leaves)
    if len(w.perm) != p or len(w.shifts) != p:
        raise ShapeMismatch(f"element has {len(w.perm)} leaves, tree has {p}")
    if not _is_automorphism(T, w.perm):
        return False
    for (i, j), r in pair_rams.items():
        if (w.shifts[i] - w.shifts[j]) % r:
            return False
    return True


def weyl_elements(T: FissionTree, cap: int = 1_000_000) -> list[WeylElement]:
    """Explicit element list for small trees (brute-force validation mode)."""
    leaves, rams, pair_rams = _leaf_data(T)
    p = len(leaves)
    total = _factorial(p)
    for r in rams:
        total *= r
    if total > cap:
        raise ValueError(f"enumerating {total} > cap {cap} elements")
    auts = automorphisms(T)
    out = []
    for shifts in product(*(range(r) for r in rams)):
        if all((shifts[i] - shifts[j]) % r == 0 for (i, j), r in pair_rams.items()):
            for perm in auts:
                out.append(WeylElement(perm, shifts))
    return out


def weyl_act(Q: PointedIrregularType, w: WeylElement) -> PointedIrregularType:
    """g . Q = [(n_{pi(i)}, sigma^{d_{pi(i)}}(q_{pi(i)}))]; always has the same
    fission tree, and is an admissible deformation of Q iff w is in W(T)."""
    p = len(Q.entries)
    if len(w.perm) != p or len(w.shifts) != p:
        raise ShapeMismatch(f"element has {len(w.perm)} entries, type has {p}")
    entries = []
    for i in range(p):
        src = w.perm[i]
        n, q = Q.entries[src]
        entries.append((n, q.galois(w.shifts[src])))
    return PointedIrregularType(entries)


def smith_normal_form(M: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """(U, S, V) with U*M*V = S diagonal, d_k | d_{k+1}, U and V unimodular."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    S = [list(map(int, row)) for row in M]
    U = [[int(i == j) for j in range(rows)] for i in range(rows)]
    V = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(a, b):
        S[a], S[b] = S[b], S[a]
        U[a], U[b] = U[b], U[a]

    def swap_cols(a, b):
        for row in S:
            row[a], row[b] = row[b], row[a]
        for row in V:
            row[a], row[b] = row[b], row[a]

    def add_row(dst, src, k):
        S[dst] = [x + k * y for x, y in zip(S[dst], S[src])]
        U[dst] = [x + k * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        for row in S:
            row[dst] += k * row[src]
        for row in V:
            row[dst] += k * row[src]

    def negate_row(a):
        S[a] = [-x for x in S[a]]
        U[a] = [-x for x in U[a]]

    t = 0
    while t < min(rows, cols):
        # Find a pivot.
        pivot = None
        for i in range(t, rows):
            for j in range(t, cols):
                if S[i][j]:
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        # Clear the row and column, re-pivoting on remainders.
        while True:
            again = False
            for i in range(t + 1, rows):
                if S[i][t]:
                    k = S[i][t] // S[t][t]
                    add_row(i, t, -k)
                    if S[i][t]:
                        swap_rows(t, i)
                        again = True
            for j in range(t + 1, cols):
                if S[t][j]:
                    k = S[t][j] // S[t][t]
                    add_col(j, t, -k)
                    if S[t][j]:
                        swap_cols(t, j)
                        again = True
            if not again:
                break
        if S[t][t] < 0:
            negate_row(t)
        t += 1
    # Enforce the divisibility chain.
    t = min(rows, cols)
    changed = True
    while changed:
        changed = False
        for k in range(t - 1):
            a, b = S[k][k], S[k + 1][k + 1]
            if a and b % a:
                # Standard trick: fold the next diagonal entry into row k.
                add_row(k, k + 1, 1)
                # Re-clear the 2x2 block.
                while True:
                    if S[k + 1][k]:
                        q = S[k + 1][k] // S[k][k]
                        add_row(k + 1, k, -q)
                        if S[k + 1][k]:
                            swap_rows(k, k + 1)
                            continue
                    if S[k][k + 1]:
                        q = S[k][k + 1] // S[k][k]
                        add_col(k + 1, k, -q)
                        if S[k][k + 1]:
                            swap_cols(k, k + 1)
                            continue
                    break
                if S[k][k] < 0:
                    negate_row(k)
                if S[k + 1][k + 1] < 0:
                    negate_row(k + 1)
                changed = True
    return U, S, V


def one_circle_full_group(q) -> tuple[int, tuple[int, ...]]:
    """Free rank and invariant factors of the full local group of one circle:
    generators gamma_1..gamma_m, nu with the single relation
    gcd(n_1,r) gamma_1 + ... + gcd(n_m,r) gamma_m = r nu."""
    L = levels_of(q)
    r = q.ram
    m = len(L)
    if m == 0:
        return 0, ()
    ns = [int(k * r) for k in L.levels]
    if _gcd_many(r, *ns) != 1:
        raise AssertionError("gcd(r, n_1..n_m) must be 1 for a genuine factor")
    relation = [[gcd(n, r) for n in ns] + [-r]]
    _, S, _ = smith_normal_form(relation)
    diag = [S[i][i] for i in range(min(len(S), len(S[0])))]
    invariant = tuple(d for d in diag if d)
    free_rank = (m + 1) - len(invariant)
    return free_rank, invariant
