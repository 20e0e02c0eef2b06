"""Finitely generated abelian groups via integer matrices.

Groups are presented by their invariant-factor list in divisibility order
(d_1 | d_2 | ...), each factor > 1 or 0, where 0 stands for an infinite
cyclic factor.  Two presentations are isomorphic exactly when their
canonical factor lists coincide.

The workhorse is an exact Smith normal form over Z with unimodular
transforms, using a smallest-magnitude pivot rule so the transforms are
reproducible across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

IntMatrix = list[list[int]]


def _identity(n: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(A: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (D, U, V) with U*A*V = D, D diagonal with d_1 | d_2 | ... >= 0.

    U and V are unimodular (determinant +-1).  The pivot rule picks the
    smallest nonzero magnitude (ties broken by position), which fixes the
    output deterministically.
    """
    n = len(A)
    m = len(A[0]) if n else 0
    a = [list(row) for row in A]
    u = _identity(n)
    v = _identity(m)

    def row_sub(i: int, j: int, q: int) -> None:
        # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_sub(i: int, j: int, q: int) -> None:
        # col_i -= q * col_j
        for row in a:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    def row_swap(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def col_swap(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(n, m):
        pivot = None
        for i in range(t, n):
            for j in range(t, m):
                val = abs(a[i][j])
                if val and (pivot is None or val < pivot[0]):
                    pivot = (val, i, j)
        if pivot is None:
            break
        _, pi, pj = pivot
        if pi != t:
            row_swap(t, pi)
        if pj != t:
            col_swap(t, pj)

        while True:
            # clear the pivot column
            dirty = False
            for i in range(t + 1, n):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    row_sub(i, t, q)
                    if a[i][t]:
                        row_swap(i, t)
                        dirty = True
            if dirty:
                continue
            # clear the pivot row
            for j in range(t + 1, m):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    col_sub(j, t, q)
                    if a[t][j]:
                        col_swap(j, t)
                        dirty = True
                        break
            if dirty:
                continue
            # force the pivot to divide the remaining submatrix
            offender = None
            for i in range(t + 1, n):
                for j in range(t + 1, m):
                    if a[i][j] % a[t][t]:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_i = a[offender]
            a[t] = [x + y for x, y in zip(a[t], row_i)]
            u[t] = [x + y for x, y in zip(u[t], u[offender])]
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return a, u, v


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> IntMatrix:
    return [
        [sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))]
        for i in range(len(A))
    ]


def det(A: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix (fraction-free elimination)."""
    n = len(A)
    a = [list(row) for row in A]
    sign = 1
    prev = 1
    for t in range(n - 1):
        if a[t][t] == 0:
            for i in range(t + 1, n):
                if a[i][t]:
                    a[t], a[i] = a[i], a[t]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(t + 1, n):
            for j in range(t + 1, n):
                a[i][j] = (a[i][j] * a[t][t] - a[i][t] * a[t][j]) // prev
        prev = a[t][t]
    return sign * a[-1][-1] if n else 1


def kernel_basis(A: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis of the integer kernel {z : A z = 0}, as a list of vectors."""
    n = len(A)
    m = len(A[0]) if n else 0
    d, _, v = smith_normal_form(A)
    rank = sum(1 for i in range(min(n, m)) if d[i][i])
    return [[v[row][j] for row in range(m)] for j in range(rank, m)]


def solve_integer(A: Sequence[Sequence[int]], b: Sequence[int]) -> list[int] | None:
    """One integer solution x of A x = b, or None when none exists."""
    n = len(A)
    m = len(A[0]) if n else 0
    d, u, v = smith_normal_form(A)
    c = [sum(u[i][j] * b[j] for j in range(n)) for i in range(n)]
    y = [0] * m
    for i in range(n):
        di = d[i][i] if i < min(n, m) else 0
        if di:
            if c[i] % di:
                return None
            y[i] = c[i] // di
        elif c[i]:
            return None
    return [sum(v[i][j] * y[j] for j in range(m)) for i in range(m)]


# ---------------------------------------------------------------------------
# presentations


def _primary_parts(d: int) -> dict[int, int]:
    """Prime -> exponent factorization of d > 1."""
    out: dict[int, int] = {}
    p = 2
    while p * p <= d:
        while d % p == 0:
            out[p] = out.get(p, 0) + 1
            d //= p
        p += 1 if p == 2 else 2
    if d > 1:
        out[d] = out.get(d, 0) + 1
    return out


def _canonical_factors(orders: Sequence[int]) -> tuple[int, ...]:
    """Invariant factors (divisibility order, 1s dropped, 0s last)."""
    rank = 0
    by_prime: dict[int, list[int]] = {}
    for d in orders:
        if d < 0:
            raise ValueError("cyclic orders must be non-negative")
        if d == 0:
            rank += 1
        elif d > 1:
            for p, e in _primary_parts(d).items():
                by_prime.setdefault(p, []).append(e)
    depth = max((len(v) for v in by_prime.values()), default=0)
    chain = [1] * depth
    for p, exps in by_prime.items():
        exps.sort(reverse=True)
        for idx, e in enumerate(exps):
            chain[idx] *= p**e
    chain.reverse()  # ascending divisibility
    return tuple(chain) + (0,) * rank


@dataclass(frozen=True)
class FinAb:
    """A finitely generated abelian group in canonical invariant-factor form."""

    factors: tuple[int, ...]

    @staticmethod
    def from_orders(orders: Sequence[int]) -> FinAb:
        return FinAb(_canonical_factors(orders))

    def __post_init__(self):
        if self.factors != _canonical_factors(self.factors):
            raise ValueError(f"{self.factors} is not in canonical form")

    @property
    def rank(self) -> int:
        return sum(1 for d in self.factors if d == 0)

    def order(self) -> int | None:
        """Group order, or None when infinite."""
        if self.rank:
            return None
        n = 1
        for d in self.factors:
            n *= d
        return n

    def is_trivial(self) -> bool:
        return not self.factors

    def primary_decomposition(self) -> tuple[int, ...]:
        """Sorted multiset of prime-power orders (rank reported via 0s)."""
        parts: list[int] = [0] * self.rank
        for d in self.factors:
            if d > 1:
                parts.extend(p**e for p, e in _primary_parts(d).items())
        return tuple(sorted(parts))

    def direct_sum(self, other: FinAb) -> FinAb:
        return FinAb.from_orders(list(self.factors) + list(other.factors))

    def __str__(self) -> str:
        if not self.factors:
            return "0"
        return " + ".join("Z" if d == 0 else f"Z{d}" for d in self.factors)

    def to_json(self) -> dict:
        return {"factors": list(self.factors)}


TRIVIAL = FinAb(())


def iso_eq(a: FinAb, b: FinAb) -> bool:
    """Isomorphism test: canonical factor lists agree."""
    return a.factors == b.factors


def subgroup_from_elements(
    ambient: FinAb | Sequence[int], elements: Sequence[Sequence[int]]
) -> FinAb:
    """Presentation of the subgroup of ``ambient`` generated by ``elements``.

    ``ambient`` is either a presentation or a plain list of cyclic orders
    fixing the coordinate system; it must be finite.  Each element is a
    coordinate vector modulo those orders.  Computed by Smith normal form
    of the stacked generator/relation matrix; output is canonical.
    """
    mods = tuple(ambient.factors if isinstance(ambient, FinAb) else ambient)
    if any(d <= 0 for d in mods):
        raise ValueError("ambient group must be finite")
    n = len(mods)
    for vec in elements:
        if len(vec) != n:
            raise ValueError(f"coordinate vector of length {n} expected")
    gens = [[vec[i] % mods[i] for i in range(n)] for vec in elements]
    gens = [g for g in gens if any(g)]
    if not gens:
        return TRIVIAL
    m = len(gens)
    # kernel of Z^m -> ambient, e_j -> gens[j]:
    # solutions z of  E z = diag(mods) w  for some integer w
    stacked = [
        [gens[j][i] for j in range(m)] + [mods[i] if c == i else 0 for c in range(n)]
        for i in range(n)
    ]
    relations = [vec[:m] for vec in kernel_basis(stacked)]
    d, _, _ = smith_normal_form(relations)
    diag = [d[i][i] for i in range(min(len(d), m))]
    if len(diag) < m or any(x == 0 for x in diag):
        raise AssertionError("subgroup of a finite group must be finite")
    return FinAb.from_orders(diag)


@dataclass(frozen=True)
class Homomorphism:
    """An integer-matrix homomorphism between presented abelian groups.

    ``matrix[i][j]`` is the i-th target coordinate of the image of the j-th
    source generator.  Validity demands each generator's image be
    annihilated by the generator's order.
    """

    source: FinAb
    target: FinAb
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = len(self.target.factors)
        cols = len(self.source.factors)
        if len(self.matrix) != rows or any(len(r) != cols for r in self.matrix):
            raise ValueError("matrix shape does not match source/target")
        for j, order in enumerate(self.source.factors):
            if order == 0:
                continue
            for i, t in enumerate(self.target.factors):
                img = order * self.matrix[i][j]
                if (t and img % t) or (t == 0 and img):
                    raise ValueError(
                        f"generator {j} of order {order} maps to an element "
                        f"not annihilated by it"
                    )

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        cols = len(self.source.factors)
        if len(vec) != cols:
            raise ValueError("vector length does not match source")
        out = []
        for i, t in enumerate(self.target.factors):
            s = sum(self.matrix[i][j] * vec[j] for j in range(cols))
            out.append(s % t if t else s)
        return tuple(out)
