"""The suspension map on invariant tuples and the torsion basis it induces.

Suspension raises the dimension index d by one, multiplies the rho
invariant by f, and carries the normal coordinates over.  Going from even
d = 2e to odd d+1 = 2e+1 two new coordinates appear: the new t_{4e-2} is
always 0, while the new t_{4e} is generally under-determined.  ``suspend``
therefore returns a result object carrying every consistent completion:

- for inputs whose rho is an exact integer multiple m of the distinguished
  generator rho(tau_N) = 2^max(4-K,2) * (1 + x^2 + ... + x^(N-2)) and whose
  coordinates vanish, the candidate set is pinned to m * {2^(K-2),
  3*2^(K-2)} (m * {1} when K = 1), the two-element indeterminacy that is
  intrinsic to the suspension of tau_N;
- for everything else the candidates are all values satisfying the
  consistency congruence, a coset of the subgroup
  2^max(K-2,0) * Z_{2^K}.

Downstream constructions resolve the ambiguity by always taking the
smallest candidate and logging the choice, which keeps every derived
object reproducible and the dependence auditable.

The distinguished elements sigma, omega, tau, nu and mu defined here
generate the cokernel/kernel of the suspension and the torsion subgroup;
``torsion_basis`` assembles the inductive basis mu_{4i} = (iterated
suspension of nu_i) and mu_{4i-2} = (coordinate unit vectors) and verifies
its order profile and that it generates the full torsion group.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd

from . import ring
from .elements import Catalog
from .exceptions import PreconditionFailed, VerificationFailure
from .surgery import (
    LensParams,
    NormalCoords,
    StructureElement,
    _formula_or_zero,
    element_validate,
    kernel_rho_bar,
    transfer,
    zero_element,
)
from .ring import Element, eval_minus_one, in_lattice_4r


def even_exponent_sum(N: int) -> Element:
    """1 + x^2 + ... + x^(N-2) for even N: the annihilator direction of f."""
    if N % 2:
        raise ValueError("defined for even N")
    return ring.geometric_sum(ring.truncated(N), N // 2, step=2)


def tau_rho(N: int) -> Element:
    """rho of the generator tau: 2^max(4-K,2) * (1 + x^2 + ... + x^(N-2))."""
    K = ring.split_two_power(N)[0]
    return even_exponent_sum(N) * 2 ** max(4 - K, 2)


def _tau_multiplicity(x: StructureElement) -> int | None:
    """m when x = (m * tau_rho, 0) exactly with m an integer, else None."""
    if not x.coords.is_zero():
        return None
    p = x.params
    if p.K < 1 or p.d % 2:
        return None
    t = tau_rho(p.N)
    ratio = x.rho.coeffs[0] / t.coeffs[0]
    if ratio.denominator != 1 or x.rho != t.scale(ratio):
        return None
    return int(ratio)


@dataclass(frozen=True)
class SuspensionResult:
    """All completions of a suspension consistent with the model.

    ``determined`` is set when there is exactly one; ``candidates`` is the
    full list (all sharing rho and every coordinate except the new t_{4e},
    each passing validation).
    """

    source: StructureElement
    candidates: tuple[StructureElement, ...]
    determined: StructureElement | None

    def candidate_t4e(self) -> tuple[int, ...]:
        """The possible values of the new top t4-coordinate (even d only)."""
        return tuple(c.coords.t4[-1] for c in self.candidates)

    def to_json(self) -> dict:
        return {
            "determined": None if self.determined is None else self.determined.to_json(),
            "candidates": [c.to_json() for c in self.candidates],
        }


def suspend(x: StructureElement) -> SuspensionResult:
    """Suspension: d -> d+1, rho -> f * rho, coordinates carried over.

    From odd d the result is determined (no new free coordinate).  From
    even d = 2e the new t_{4e-2} is 0 and the new t_{4e} ranges over the
    candidate set described in the module docstring.
    """
    p = x.params
    target = LensParams(p.N, p.d + 1, p.k)
    f = Catalog.get(p.N, p.k).f
    rho = f * x.rho

    if p.d % 2 == 1:
        out = StructureElement(target, rho, x.coords)
        if not element_validate(out):
            raise VerificationFailure(
                f"suspension from odd d produced an invalid tuple at {p}"
            )
        return SuspensionResult(x, (out,), out)

    mod = target.t4_modulus
    tau_mult = _tau_multiplicity(x)
    if tau_mult is not None:
        K = p.K
        if K == 1:
            values = {tau_mult % 2}
        elif K >= 2:
            base = 2 ** (K - 2)
            values = {(tau_mult * base) % mod, (tau_mult * 3 * base) % mod}
        else:
            values = {0}
    else:
        values = set()
        for v in range(mod):
            coords = NormalCoords(x.coords.t4 + (v,), x.coords.t4m2 + (0,))
            gap = rho - _formula_or_zero(target, coords)
            if in_lattice_4r(gap, target.sign):
                values.add(v)

    candidates = []
    for v in sorted(values):
        coords = NormalCoords(x.coords.t4 + (v,), x.coords.t4m2 + (0,))
        out = StructureElement(target, rho, coords)
        if not element_validate(out):
            raise VerificationFailure(
                f"suspension candidate t4e={v} fails validation at {p}"
            )
        candidates.append(out)
    determined = candidates[0] if len(candidates) == 1 else None
    return SuspensionResult(x, tuple(candidates), determined)


@dataclass(frozen=True)
class ChoiceRecord:
    """One resolved suspension ambiguity (for the reproducibility log)."""

    source_params: dict
    candidate_t4e: tuple[int, ...]
    chosen_t4e: int

    def to_json(self) -> dict:
        return {
            "source_params": self.source_params,
            "candidates": list(self.candidate_t4e),
            "chosen": self.chosen_t4e,
        }


def resolve(result: SuspensionResult) -> tuple[StructureElement, ChoiceRecord | None]:
    """Pick the canonical (smallest new-coordinate) candidate.

    Returns the chosen element plus a log record when a genuine choice was
    made (more than one candidate).
    """
    if not result.candidates:
        raise VerificationFailure("suspension produced no consistent completion")
    if result.determined is not None:
        return result.determined, None
    chosen = result.candidates[0]
    record = ChoiceRecord(
        source_params=result.source.params.to_json(),
        candidate_t4e=result.candidate_t4e(),
        chosen_t4e=chosen.coords.t4[-1],
    )
    return chosen, record


# ---------------------------------------------------------------------------
# distinguished elements


def elem_sigma(params: LensParams) -> StructureElement:
    """rho = 8, coordinates 0; generates the cokernel of suspension into
    odd-to-even target dimension d = 2e+2."""
    if params.K < 1:
        raise PreconditionFailed("sigma requires K >= 1")
    if params.d % 2:
        raise PreconditionFailed("sigma lives at even d = 2e+2")
    return StructureElement(
        params, ring.const(params.modulus(), 8), NormalCoords.zero(params)
    )


def elem_omega(params: LensParams) -> StructureElement:
    """rho = 16 * (1 + x^2 + ... + x^(N-2)), coordinates 0; generates ker(suspend)."""
    if params.K < 1:
        raise PreconditionFailed("omega requires K >= 1")
    if params.d % 2:
        raise PreconditionFailed("omega lives at even d = 2e")
    return StructureElement(
        params, even_exponent_sum(params.N) * 16, NormalCoords.zero(params)
    )


def elem_tau(params: LensParams) -> StructureElement:
    """rho = 2^max(4-K,2) * (1 + x^2 + ... + x^(N-2)), coordinates 0."""
    if params.K < 1:
        raise PreconditionFailed("tau requires K >= 1")
    if params.d % 2:
        raise PreconditionFailed("tau lives at even d = 2e")
    return StructureElement(params, tau_rho(params.N), NormalCoords.zero(params))


def elem_mu4m2(params: LensParams) -> StructureElement:
    """rho = 0 and a single coordinate t_{4e-2} = 1 (the last t4m2 slot)."""
    if params.K < 1:
        raise PreconditionFailed("mu_{4e-2} requires K >= 1")
    if params.d % 2 == 0:
        raise PreconditionFailed("mu_{4e-2} lives at odd d = 2e+1")
    coords = NormalCoords(
        (0,) * params.c, (0,) * (params.c - 1) + (1,)
    )
    return StructureElement(params, ring.zero(params.modulus()), coords)


def _gap_realizable(params: LensParams, gap: Element) -> bool:
    """Whether ``gap`` can be the rho of a coordinate-free element.

    Beyond membership in the 4-integral eigenlattice this demands the
    evaluation at x = -1 be divisible by 8: the coordinate-free sector of
    the real structure set maps into 8Z there (that divisibility is what
    pins the minimal exponent to at least 4 - K).  Vacuous for odd d,
    where the (-1)-eigenspace evaluates to 0 identically.
    """
    if not in_lattice_4r(gap, params.sign):
        return False
    return params.sign == -1 or eval_minus_one(gap) % 8 == 0


def _coords_matching_rho(params: LensParams, rho: Element) -> NormalCoords | None:
    """Lexicographically smallest t4-vector realizing ``rho`` as an element."""
    for t4 in product(range(params.t4_modulus), repeat=params.c):
        coords = NormalCoords(t4, (0,) * params.c)
        if _gap_realizable(params, rho - _formula_or_zero(params, coords)):
            return coords
    return None


def elem_nu(params: LensParams) -> StructureElement:
    """rho = 2^(4 - min(K,2e)) * (1 + x^2 + ... + x^(N-2)) with the smallest
    coordinates satisfying the consistency congruence.

    Defined at even d = 2e with e >= 2 and K >= 1.  Existence of consistent
    coordinates is part of the theory; failure to find them is reported,
    never patched.
    """
    if params.K < 1:
        raise PreconditionFailed("nu requires K >= 1")
    if params.d % 2 or params.e < 2:
        raise PreconditionFailed("nu lives at even d = 2e with e >= 2")
    exponent = 4 - min(params.K, 2 * params.e)
    scale = Fraction(2) ** exponent
    rho = even_exponent_sum(params.N).scale(scale)
    coords = _coords_matching_rho(params, rho)
    if coords is None:
        raise VerificationFailure(
            f"no consistent coordinates for nu at {params}; "
            "the claimed minimal generator is not realizable in the model"
        )
    return StructureElement(params, rho, coords)


def minimal_exponent(params: LensParams) -> int:
    """Smallest l such that 2^l * (1 + x^2 + ... + x^(N-2)) admits consistent
    coordinates in the invariant-tuple model at these parameters.

    Searched downward from l = 4 (consistency of l implies consistency of
    l+1, so the set of consistent l is upward closed).  The expected value
    is 4 - min(K, 2e); comparison against that closed form is left to the
    caller so this stays an independent oracle.
    """
    if params.K < 1 or params.d % 2 or params.e < 2:
        raise PreconditionFailed("defined at even d = 2e, e >= 2, K >= 1")
    base = even_exponent_sum(params.N)

    def consistent(l: int) -> bool:
        rho = base.scale(Fraction(2) ** l)
        return _coords_matching_rho(params, rho) is not None

    floor = -8
    l = 4
    if not consistent(l):
        raise VerificationFailure(
            f"2^4 * (1 + x^2 + ...) is not realizable at {params}"
        )
    while l > floor and consistent(l - 1):
        l -= 1
    if l == floor:
        raise VerificationFailure(f"minimal exponent search ran away at {params}")
    return l


# ---------------------------------------------------------------------------
# image characterizations of the suspension


def image_test_odd_target(y: StructureElement) -> bool:
    """Membership test for the image of suspension into even d = 2e+2:
    the rho invariant evaluated at x = -1 must vanish."""
    p = y.params
    if p.N % 2:
        raise PreconditionFailed("defined for even N")
    if p.d % 2:
        raise PreconditionFailed("target must have even d = 2e+2")
    return eval_minus_one(y.rho) == 0


def image_test_even_target(y: StructureElement) -> bool:
    """Membership test for the image of suspension into odd d = 2e+1:
    the top t_{4e-2} coordinate must vanish.  Requires e >= 2."""
    p = y.params
    if p.d % 2 == 0:
        raise PreconditionFailed("target must have odd d = 2e+1")
    if p.e < 2:
        raise PreconditionFailed("the coordinate test requires e >= 2")
    return y.coords.t4m2[-1] == 0


# ---------------------------------------------------------------------------
# the inductive torsion basis


@dataclass(frozen=True)
class TorsionBasis:
    """Basis mu_{4i}, mu_{4i-2} (i = 1..c) of the torsion subgroup.

    ``table`` maps every torsion coordinate pair to its unique expansion
    (r_{4i} mod 2^min(K,2i); r_{4i-2} mod 2); ``orders`` are the cyclic
    orders of the mu_{4i}.
    """

    params: LensParams
    mu4: tuple[StructureElement, ...]
    mu4m2: tuple[StructureElement, ...]
    orders: tuple[int, ...]
    choice_log: tuple[ChoiceRecord, ...]
    table: dict = field(repr=False, hash=False, compare=False, default_factory=dict)

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "mu4": [m.to_json() for m in self.mu4],
            "mu4m2": [m.to_json() for m in self.mu4m2],
            "orders": list(self.orders),
            "choice_log": [c.to_json() for c in self.choice_log],
        }


def _coords_key(coords: NormalCoords) -> tuple:
    return (coords.t4, coords.t4m2)


def _element_order(x: StructureElement) -> int:
    """Order of a torsion tuple: lcm of its coordinate orders."""
    p = x.params
    order = 1
    for t in x.coords.t4:
        o = p.t4_modulus // gcd(t, p.t4_modulus)
        order = order * o // gcd(order, o)
    for t in x.coords.t4m2:
        if t:
            order = order * 2 // gcd(order, 2)
    return order


def _span_size(params: LensParams, vectors: list[NormalCoords]) -> int:
    """Size of the subgroup of the coordinate group generated by ``vectors``."""
    zero_key = ((0,) * params.c, (0,) * params.c)
    span = {zero_key}
    for v in vectors:
        if _coords_key(v) in span:
            continue
        frontier = [v]
        while frontier:
            fresh = []
            for g in frontier:
                for t4, t4m2 in list(span):
                    s = g.add(NormalCoords(t4, t4m2), params)
                    key = _coords_key(s)
                    if key not in span:
                        span.add(key)
                        fresh.append(s)
            frontier = fresh
    return len(span)


def _mu4_choice(
    params: LensParams,
    members: tuple[tuple[int, ...], ...],
    higher: list[StructureElement],
) -> StructureElement:
    """The ad-hoc generator of the lowest torsion block.

    The lexicographically smallest kernel member of order exactly
    2^min(K,2) that is independent of the already-built higher blocks
    (adjoining it multiplies the span by its full order).  Any two such
    choices differ by an automorphism of the block.
    """
    target_order = 2 ** min(params.K, 2)
    base_vectors = [x.coords for x in higher]
    base_size = _span_size(params, base_vectors)
    for t4 in members:
        coords = NormalCoords(t4, (0,) * params.c)
        x = StructureElement(params, ring.zero(params.modulus()), coords)
        if _element_order(x) != target_order:
            continue
        if _span_size(params, base_vectors + [coords]) == base_size * target_order:
            return x
    raise VerificationFailure(
        f"no independent generator of order {target_order} for the lowest "
        f"torsion block at {params}"
    )


def torsion_basis(params: LensParams) -> TorsionBasis:
    """Build and verify the inductive torsion basis at these parameters.

    mu_{4i-2} are the coordinate unit vectors.  mu_{4i} for i >= 2 arise by
    suspending nu_i from dimension index 2i up to d, resolving every
    ambiguous new coordinate canonically (smallest candidate, logged);
    mu_4 is the ad-hoc first-block generator.  Verifies the order profile
    2^min(K,2i) / 2 and that the basis generates the whole torsion group;
    any mismatch raises :class:`VerificationFailure`.
    """
    if params.K < 1:
        raise PreconditionFailed("the torsion basis requires K >= 1")
    c, K = params.c, params.K
    log: list[ChoiceRecord] = []
    kernel = kernel_rho_bar(params)

    mu4: list[StructureElement] = []
    for i in range(2, c + 1):
        x = elem_nu(LensParams(params.N, 2 * i, params.k))
        while x.params.d < params.d:
            x, record = resolve(suspend(x))
            if record is not None:
                log.append(record)
        if not x.is_torsion():
            raise VerificationFailure(f"tower for mu_{4 * i} failed to become torsion")
        mu4.append(x)
    mu4.insert(0, _mu4_choice(params, kernel.members, mu4))

    mu4m2: list[StructureElement] = []
    for i in range(1, c + 1):
        coords = NormalCoords(
            (0,) * c, tuple(1 if j == i - 1 else 0 for j in range(c))
        )
        mu4m2.append(StructureElement(params, ring.zero(params.modulus()), coords))

    expected_orders = tuple(2 ** min(K, 2 * i) for i in range(1, c + 1))
    orders = tuple(_element_order(x) for x in mu4)
    if orders != expected_orders:
        raise VerificationFailure(
            f"mu4 order profile {orders} differs from expected {expected_orders}"
        )
    if any(_element_order(x) != 2 for x in mu4m2):
        raise VerificationFailure("every mu_{4i-2} must have order 2")

    # expansion table; doubles as the generation check
    table: dict[tuple, tuple[int, ...]] = {}
    ranges = [range(o) for o in expected_orders] + [range(2)] * c
    for coeffs in product(*ranges):
        acc = zero_element(params)
        for r, b in zip(coeffs[:c], mu4):
            if r:
                acc = _add_torsion(acc, b, r)
        for r, b in zip(coeffs[c:], mu4m2):
            if r:
                acc = _add_torsion(acc, b, r)
        key = _coords_key(acc.coords)
        if key in table:
            raise VerificationFailure(
                f"basis expansion is not unique at {params}: {key} hit twice"
            )
        table[key] = coeffs
    torsion_size = kernel.torsion.order()
    if len(table) != torsion_size:
        raise VerificationFailure(
            f"basis spans {len(table)} of {torsion_size} torsion elements at {params}"
        )
    return TorsionBasis(
        params, tuple(mu4), tuple(mu4m2), expected_orders, tuple(log), table
    )


def _add_torsion(
    acc: StructureElement, b: StructureElement, times: int
) -> StructureElement:
    p = acc.params
    coords = acc.coords.add(b.coords.scale(times, p), p)
    return StructureElement(p, acc.rho, coords)


def torsion_coordinates(x: StructureElement, basis: TorsionBasis) -> tuple[int, ...]:
    """Expansion coefficients of a torsion element over the basis.

    Returns (r_{4,1}, ..., r_{4,c}, r_{2,1}, ..., r_{2,c}); round trips with
    the basis by construction.  A miss means the verified basis does not
    span, which is reported as an internal inconsistency.
    """
    if x.params != basis.params:
        raise ValueError("element and basis parameters differ")
    if not x.is_torsion():
        raise PreconditionFailed("torsion coordinates are defined for rho = 0")
    if not element_validate(x):
        raise PreconditionFailed("element fails validation")
    key = _coords_key(x.coords)
    if key not in basis.table:
        raise VerificationFailure(
            "torsion element outside the span of a verified basis"
        )
    return basis.table[key]


# ---------------------------------------------------------------------------
# desuspension obstruction numbers


def browder_livesay_composite(y: StructureElement, i: int) -> Fraction:
    """The block-i desuspension obstruction number:

        eval(rho at x = -1) / (M * 2^(3 + max(0, K - 2i))).

    Pure arithmetic on the invariant tuple; N must be even.
    """
    p = y.params
    if p.N % 2:
        raise PreconditionFailed("defined for even N")
    if i < 1:
        raise ValueError("block index must be >= 1")
    divisor = p.M * 2 ** (3 + max(0, p.K - 2 * i))
    return eval_minus_one(y.rho) / divisor


def browder_livesay_cascade(
    y: StructureElement, basis: TorsionBasis, i: int
) -> int:
    """Read the block-i torsion invariant after checking the obstruction
    cascade: every higher block (index 2j > 4i in the 2j-grading) must
    vanish first."""
    coeffs = torsion_coordinates(y, basis)
    c = y.params.c
    r4, r4m2 = coeffs[:c], coeffs[c:]
    for j in range(i, c):  # r_{4(j+1)} with j+1 > i
        if r4[j]:
            raise PreconditionFailed(f"block 4*{j + 1} does not vanish")
    for j in range(i, c):  # r_{4(j+1)-2} with 4(j+1)-2 > 4i
        if r4m2[j]:
            raise PreconditionFailed(f"block 4*{j + 1}-2 does not vanish")
    return r4[i - 1]
