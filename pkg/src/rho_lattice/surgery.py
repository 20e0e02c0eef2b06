"""Structure-set computations for lens spaces of order N = 2^K * M.

A lens space L^(2d-1) with fundamental group of order N carries, for each
unit k mod N, a distinguished free action; the classification data for the
resulting manifold is assembled here from two invariants:

- a signature-defect class ``rho`` in the rational truncated ring, lying
  in the (+1)- or (-1)-eigenspace according to the parity of d, and
- the reduced 2-local normal coordinates ``t_{4i}`` mod 2^K and
  ``t_{4i-2}`` mod 2, with 1 <= i <= c = floor((d-1)/2).

The coordinates map to eigenspace classes modulo the 4-integral lattice
through an explicit polynomial in f (``rho_bar_formula``); the kernel of
that map is the torsion of the structure set.  The kernel is computed here
twice: by brute-force enumeration of all coordinate tuples (the oracle)
and by the closed form (+) Z_{2^min(K,1)} (+) Z_{2^min(K,2i)}, and the two
presentations are compared exactly.

The odd-order sector contributes no torsion and only the order M^c of its
normal-invariant group is exposed; its internal coordinates are not part
of this model.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd

from . import ring
from .abelian import FinAb, TRIVIAL, subgroup_from_elements
from .elements import Catalog
from .exceptions import ModulusMismatch, PreconditionFailed, WorkCapExceeded
from .ring import Element, eigen_test, in_lattice_4r, restrict, split_two_power

DEFAULT_CANDIDATE_CAP = 2**22
CAP_ENV_VAR = "RHO_LATTICE_CAP"


def candidate_cap() -> int:
    value = os.environ.get(CAP_ENV_VAR)
    return int(value) if value else DEFAULT_CANDIDATE_CAP


@dataclass(frozen=True)
class LensParams:
    """Parameters (N, d, k) of a lens space L^(2d-1) with k coprime to N.

    Derived quantities: N = 2^K * M with M odd, e = floor(d/2),
    c = floor((d-1)/2).  k is normalized to its least positive residue;
    an even k can only occur for odd N.
    """

    N: int
    d: int
    k: int = 1

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if self.d < 3:
            raise ValueError("d must be >= 3")
        if gcd(self.k, self.N) != 1:
            raise ValueError(f"k = {self.k} must be coprime to N = {self.N}")
        object.__setattr__(self, "k", self.k % self.N)

    @property
    def K(self) -> int:
        return split_two_power(self.N)[0]

    @property
    def M(self) -> int:
        return split_two_power(self.N)[1]

    @property
    def e(self) -> int:
        return self.d // 2

    @property
    def c(self) -> int:
        return (self.d - 1) // 2

    @property
    def sign(self) -> int:
        """Eigenspace sign (-1)^d of the rho invariant."""
        return 1 if self.d % 2 == 0 else -1

    @property
    def t4_modulus(self) -> int:
        return 2**self.K

    @property
    def t4m2_modulus(self) -> int:
        return 2 ** min(self.K, 1)

    def modulus(self) -> ring.Modulus:
        return ring.truncated(self.N)

    def to_json(self) -> dict:
        return {"N": self.N, "d": self.d, "k": self.k}


@dataclass(frozen=True)
class NormalCoords:
    """Reduced 2-local normal coordinates: c entries mod 2^K and c mod 2."""

    t4: tuple[int, ...]
    t4m2: tuple[int, ...]

    @staticmethod
    def zero(params: LensParams) -> NormalCoords:
        return NormalCoords((0,) * params.c, (0,) * params.c)

    def check(self, params: LensParams) -> None:
        if len(self.t4) != params.c or len(self.t4m2) != params.c:
            raise ValueError(f"expected {params.c} coordinates of each kind")
        if any(not 0 <= t < params.t4_modulus for t in self.t4):
            raise ValueError(f"t4 entries must lie in [0, {params.t4_modulus})")
        if any(not 0 <= t < params.t4m2_modulus for t in self.t4m2):
            raise ValueError("t4m2 entries out of range")

    def add(self, other: NormalCoords, params: LensParams) -> NormalCoords:
        return NormalCoords(
            tuple((a + b) % params.t4_modulus for a, b in zip(self.t4, other.t4)),
            tuple((a + b) % params.t4m2_modulus for a, b in zip(self.t4m2, other.t4m2)),
        )

    def scale(self, n: int, params: LensParams) -> NormalCoords:
        return NormalCoords(
            tuple((n * a) % params.t4_modulus for a in self.t4),
            tuple((n * a) % params.t4m2_modulus for a in self.t4m2),
        )

    def is_zero(self) -> bool:
        return not any(self.t4) and not any(self.t4m2)

    def to_json(self) -> dict:
        return {"t4": list(self.t4), "t4m2": list(self.t4m2)}


def coords_from_json(obj) -> NormalCoords:
    return NormalCoords(tuple(obj["t4"]), tuple(obj["t4m2"]))


# ---------------------------------------------------------------------------
# group-level bookkeeping


def l_group_reduced_rank(N: int, parity: int) -> int:
    """Rank of the sign-eigenspace lattice of the truncated ring.

    Computed as the dimension of the eigenspace of the involution on the
    rational ring, then cross-checked against the closed clauses
    (N even: N/2 for +, N/2 - 1 for -; N odd: (N-1)/2 for both).
    """
    if parity not in (1, -1):
        raise ValueError("parity must be +1 or -1")
    m = ring.truncated(N)
    rows = []
    for j in range(m.dim):
        col = ring.involution(ring.x_power(m, j)).coeffs
        rows.append(col)
    # involution matrix I (columns stacked as rows here); rank of (I - parity*id)
    dim = m.dim
    mat = [
        [rows[j][i] - (parity if i == j else 0) for j in range(dim)]
        for i in range(dim)
    ]
    rank = _rank_rational(mat)
    computed = dim - rank
    if N % 2 == 1:
        expected = (N - 1) // 2
    else:
        expected = N // 2 if parity == 1 else N // 2 - 1
    assert computed == expected, f"eigenlattice rank {computed} != clause {expected}"
    return computed


def _rank_rational(mat: list[list[Fraction]]) -> int:
    a = [list(row) for row in mat]
    n = len(a)
    m = len(a[0]) if n else 0
    rank = 0
    for col in range(m):
        pivot = next((i for i in range(rank, n) if a[i][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        pv = a[rank][col]
        a[rank] = [v / pv for v in a[rank]]
        for i in range(n):
            if i != rank and a[i][col] != 0:
                f = a[i][col]
                a[i] = [v - f * w for v, w in zip(a[i], a[rank])]
        rank += 1
        if rank == n:
            break
    return rank


def reduced_normal_group(params: LensParams) -> tuple[FinAb, int]:
    """The reduced normal-invariant group: (2-local part, odd-sector order).

    The 2-local part is (+)_c Z_{2^K} (+) (+)_c Z_{2^min(K,1)} in canonical
    form; only the order M^c of the odd summand is known to this model, so
    the second component is that order, not a presentation.
    """
    orders = [params.t4_modulus] * params.c + [params.t4m2_modulus] * params.c
    return FinAb.from_orders(orders), params.M**params.c


def lift_tbar(t4: tuple[int, ...], params: LensParams) -> tuple[int, ...]:
    """Integer lifts: smallest non-negative t with t = t4 mod 2^K, t = 0 mod M^c."""
    two = params.t4_modulus
    odd = params.M**params.c
    if odd == 1:
        return tuple(t % two for t in t4)
    inv = pow(odd, -1, two)
    return tuple(((t % two) * inv % two) * odd for t in t4)


@lru_cache(maxsize=None)
def _formula_basis(N: int, d: int, k: int) -> tuple[Element, ...]:
    """Per-coordinate formula values F_i, so that the class of a coordinate
    tuple t is sum_i lift(t_i) * F_i.

    d = 2e:    F_i = 8 * f'_k * f^(d-2i-2) * (f^2 - 1)   for i = 1..e-1
    d = 2e+1:  the same for i = 1..e-1, and F_e = 8 * f'_k * f
    """
    params = LensParams(N, d, k)
    cat = Catalog.get(N, k)
    f, fpk = cat.f, cat.f_prime_k
    f2m1 = f * f - ring.one(params.modulus())
    basis: list[Element] = []
    e = params.e
    for i in range(1, e):
        basis.append(fpk * f ** (d - 2 * i - 2) * f2m1 * 8)
    if d % 2 == 1:
        basis.append(fpk * f * 8)
    assert len(basis) == params.c
    for el in basis:
        assert eigen_test(el, params.sign), "formula term in wrong eigenspace"
    return tuple(basis)


def rho_bar_formula(params: LensParams, coords: NormalCoords | tuple[int, ...]) -> Element:
    """A representative of the coordinate class in the rational ring.

    Only the t_{4i} coordinates enter; t_{4i-2} are invisible to the map.
    Defined for K >= 1 (for K = 0 the kernel is trivial and the map unused).
    The class modulo the 4-integral lattice does not depend on the choice
    of integer lifts.
    """
    if params.K < 1:
        raise PreconditionFailed("the 2-local formula requires K >= 1")
    t4 = coords.t4 if isinstance(coords, NormalCoords) else tuple(coords)
    if len(t4) != params.c:
        raise ValueError(f"expected {params.c} t4-coordinates")
    basis = _formula_basis(params.N, params.d, params.k)
    value = ring.zero(params.modulus())
    for tbar, base in zip(lift_tbar(t4, params), basis):
        if tbar:
            value = value + base * tbar
    return value


def _formula_or_zero(params: LensParams, coords: NormalCoords) -> Element:
    if params.K < 1:
        return ring.zero(params.modulus())
    return rho_bar_formula(params, coords)


def rho_class_is_zero(params: LensParams, x: Element) -> bool:
    """Whether x lies in the 4-integral (-1)^d-eigenlattice (class zero)."""
    if not eigen_test(x, params.sign):
        raise ValueError("element is not in the (-1)^d eigenspace")
    return all((c / 4).denominator == 1 for c in x.coeffs)


def rho_cp_formula(s4: tuple[int, ...], d: int, N: int) -> Element:
    """The complex-projective-space signature formula, pushed into order N:

        sum_i 8 * s_{4i} * (f^(d-2i) - f^(d-2i-2)),  i = 1..floor(d/2)-1.
    """
    count = d // 2 - 1
    if len(s4) != count:
        raise ValueError(f"expected {count} coordinates s_4..s_{4 * count}")
    m = ring.truncated(N)
    f = Catalog.get(N, 1).f
    value = ring.zero(m)
    for idx, s in enumerate(s4):
        i = idx + 1
        if s:
            value = value + (f ** (d - 2 * i) - f ** (d - 2 * i - 2)) * (8 * s)
    return value


# ---------------------------------------------------------------------------
# kernel of the coordinate-class map


@dataclass(frozen=True)
class KernelResult:
    torsion: FinAb
    members: tuple[tuple[int, ...], ...]  # t4-vectors in the kernel
    method: str  # "brute" or "closed"


def kernel_closed_form(params: LensParams) -> FinAb:
    """(+)_i Z_{2^min(K,1)} (+) (+)_i Z_{2^min(K,2i)} for i = 1..c."""
    K, c = params.K, params.c
    orders = [2 ** min(K, 1)] * c + [2 ** min(K, 2 * i) for i in range(1, c + 1)]
    return FinAb.from_orders(orders)


def kernel_rho_bar(params: LensParams, cap: int | None = None) -> KernelResult:
    """Brute-force kernel of the coordinate-class map.

    Enumerates all 2^(K*c) t4-tuples, keeps those whose formula value is
    4-integral, and presents the subgroup they generate; every t_{4i-2}
    coordinate is adjoined freely since the formula ignores it.  The odd
    sector contributes nothing.  Raises :class:`WorkCapExceeded` when the
    candidate count passes the cap (default 2^22, env ``RHO_LATTICE_CAP``).
    """
    if cap is None:
        cap = candidate_cap()
    K, c = params.K, params.c
    if K == 0:
        return KernelResult(TRIVIAL, ((0,) * c,), "brute")
    total = (2**K) ** c
    if total > cap:
        raise WorkCapExceeded(
            f"{total} candidates exceed the cap {cap}; "
            f"use the closed form or raise {CAP_ENV_VAR}"
        )
    basis = _formula_basis(params.N, params.d, params.k)
    dim = params.modulus().dim
    members = []
    for t4 in product(range(2**K), repeat=c):
        tbars = lift_tbar(t4, params)
        value = [Fraction(0)] * dim
        for tbar, base in zip(tbars, basis):
            if tbar:
                value = [v + tbar * b for v, b in zip(value, base.coeffs)]
        if all((v / 4).denominator == 1 for v in value):
            members.append(t4)
    gens = _generating_subset([2**K] * c, members)
    torsion = subgroup_from_elements([2**K] * c, gens) if c else TRIVIAL
    free_part = FinAb.from_orders([2] * c)
    return KernelResult(torsion.direct_sum(free_part), tuple(members), "brute")


def _generating_subset(
    mods: list[int], members: list[tuple[int, ...]]
) -> list[tuple[int, ...]]:
    """Greedy generating subset of a finite coordinate subgroup.

    ``members`` is assumed closed under addition; scanning in the given
    order keeps the result deterministic.
    """
    span = {tuple([0] * len(mods))}
    gens: list[tuple[int, ...]] = []
    for m in members:
        if m in span:
            continue
        gens.append(m)
        frontier = [m]
        while frontier:
            fresh = []
            for g in frontier:
                for s in list(span):
                    t = tuple((a + b) % mod for a, b, mod in zip(g, s, mods))
                    if t not in span:
                        span.add(t)
                        fresh.append(t)
            frontier = fresh
    return gens


@dataclass(frozen=True)
class StructureSetDescriptor:
    """Free rank plus torsion presentation of the structure-set model."""

    params: LensParams
    free_rank: int
    torsion: FinAb
    method: str
    members: tuple[tuple[int, ...], ...] | None = None

    def to_json(self, include_members: bool = False) -> dict:
        obj = {
            "params": self.params.to_json(),
            "free_rank": self.free_rank,
            "torsion": self.torsion.to_json(),
            "method": self.method,
        }
        if include_members and self.members is not None:
            obj["members"] = [list(m) for m in self.members]
        return obj


def structure_set(
    params: LensParams, method: str = "auto", cap: int | None = None
) -> StructureSetDescriptor:
    """Assemble the structure-set descriptor for the given parameters.

    The free rank comes from the eigenlattice computation (cross-checked
    against the closed rank clauses inside :func:`l_group_reduced_rank`).
    Torsion comes from the brute-force kernel, falling back to the closed
    form when the cap is exceeded and ``method`` is "auto"; the chosen path
    is recorded in the output.
    """
    if method not in ("auto", "brute", "closed"):
        raise ValueError("method must be auto, brute or closed")
    rank = l_group_reduced_rank(params.N, params.sign)
    if method == "closed":
        return StructureSetDescriptor(params, rank, kernel_closed_form(params), "closed")
    try:
        kr = kernel_rho_bar(params, cap)
        return StructureSetDescriptor(params, rank, kr.torsion, "brute", kr.members)
    except WorkCapExceeded:
        if method == "brute":
            raise
        return StructureSetDescriptor(params, rank, kernel_closed_form(params), "closed")


# ---------------------------------------------------------------------------
# structure-set elements as invariant tuples


@dataclass(frozen=True)
class StructureElement:
    """An element modeled by its invariant tuple (rho, normal coordinates).

    Valid tuples satisfy the consistency congruence: the class of ``rho``
    modulo the 4-integral lattice equals the formula class of the
    coordinates.  Torsion elements are exactly those with rho = 0.
    """

    params: LensParams
    rho: Element
    coords: NormalCoords

    def is_torsion(self) -> bool:
        return self.rho.is_zero()

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "rho": self.rho.to_json(),
            "coords": self.coords.to_json(),
        }


def zero_element(params: LensParams) -> StructureElement:
    return StructureElement(
        params, ring.zero(params.modulus()), NormalCoords.zero(params)
    )


def element_validate(x: StructureElement) -> bool:
    """Eigenspace check plus the consistency congruence.

    This is a necessary condition for realizability; for M > 1 the image
    of the odd sector is not decidable in this model, so no claim is made
    beyond the congruence.
    """
    p = x.params
    if x.rho.modulus != p.modulus():
        raise ModulusMismatch("rho lives over the wrong modulus")
    x.coords.check(p)
    if not eigen_test(x.rho, p.sign):
        return False
    gap = x.rho - _formula_or_zero(p, x.coords)
    return in_lattice_4r(gap, p.sign)


def element_add(x: StructureElement, y: StructureElement) -> StructureElement:
    """Componentwise sum; the sum of valid elements is valid."""
    if x.params != y.params:
        raise ValueError("elements live over different parameters")
    return StructureElement(
        x.params, x.rho + y.rho, x.coords.add(y.coords, x.params)
    )


def element_scale(x: StructureElement, n: int) -> StructureElement:
    return StructureElement(
        x.params, x.rho * n, x.coords.scale(n, x.params)
    )


def element_neg(x: StructureElement) -> StructureElement:
    return element_scale(x, -1)


def element_from_json(obj) -> StructureElement:
    params = LensParams(**obj["params"])
    rho = ring.element_from_json(obj["rho"])
    coords = coords_from_json(obj["coords"])
    return StructureElement(params, rho, coords)


# ---------------------------------------------------------------------------
# transfer to subgroups


def transfer_coords(
    coords: NormalCoords, params: LensParams, n_prime: int
) -> NormalCoords:
    """Reduce t_{4i} mod 2^K' and t_{4i-2} mod 2^min(K',1)."""
    target = LensParams(n_prime, params.d, params.k % n_prime)
    return NormalCoords(
        tuple(t % target.t4_modulus for t in coords.t4),
        tuple(t % target.t4m2_modulus for t in coords.t4m2),
    )


def transfer(x: StructureElement, n_prime: int) -> StructureElement:
    """Restriction to the subgroup of order N' | N.

    rho restricts through the quotient of rings; coordinates reduce
    modulo the target moduli.  Commutes with the formula up to class.
    """
    p = x.params
    if n_prime < 2 or p.N % n_prime != 0:
        raise ValueError(f"{n_prime} does not divide N = {p.N}")
    target = LensParams(n_prime, p.d, p.k % n_prime)
    return StructureElement(
        target, restrict(x.rho, n_prime), transfer_coords(x.coords, p, n_prime)
    )
