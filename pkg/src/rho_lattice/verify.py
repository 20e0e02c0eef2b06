"""The re-derivation harness behind ``rho-lattice verify``.

Every named statement the library relies on is re-proved here over a
parameter sweep, at desk scale, with exact arithmetic.  A check either
passes or fails with a witness; failures are report content, never
crashes.  Reports are deterministic for a fixed seed and sweep: the
checks are generated in a fixed order, any randomness is drawn from a
seed derived from the statement id, and results are sorted before
emission.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Callable, Iterable

from . import ring
from .abelian import FinAb, iso_eq
from .elements import (
    Catalog,
    divide_by_f,
    f_element,
    f_k_element,
    f_prime_k_element,
    g_element,
)
from .exceptions import NotInvertible
from .ring import (
    Element,
    eval_minus_one,
    eigen_project,
    eigen_test,
    in_lattice_4r,
    involution,
    reduce_poly,
    truncated,
)
from .surgery import (
    LensParams,
    NormalCoords,
    StructureElement,
    element_add,
    element_scale,
    element_validate,
    kernel_closed_form,
    kernel_rho_bar,
    l_group_reduced_rank,
    lift_tbar,
    reduced_normal_group,
    rho_bar_formula,
    structure_set,
    transfer,
    zero_element,
    _formula_basis,
)
from .suspension import (
    elem_mu4m2,
    elem_nu,
    elem_omega,
    elem_sigma,
    elem_tau,
    even_exponent_sum,
    image_test_even_target,
    image_test_odd_target,
    minimal_exponent,
    resolve,
    suspend,
    torsion_basis,
    torsion_coordinates,
    browder_livesay_composite,
)

DEFAULT_SWEEP_N = (2, 3, 4, 5, 6, 8, 9, 12, 16, 24)
DEFAULT_SWEEP_D = (3, 4, 5, 6, 7, 8)
SUITES = ("ring", "lemmas", "kernel", "suspension", "torsion")


@dataclass
class Check:
    statement: str
    params: dict
    run: Callable[[], str | None]  # witness string on failure, None on pass
    suite: str = ""
    seed: int = 0


def _rng(seed: int, statement: str, params: dict) -> random.Random:
    key = f"{seed}:{statement}:{json.dumps(params, sort_keys=True)}"
    return random.Random(key)


def _coprime_ks(N: int, limit: int = 2) -> list[int]:
    ks = [1]
    for k in range(2, N):
        if len(ks) >= limit:
            break
        if gcd(k, N) == 1:
            ks.append(k)
    return ks


def _random_element(rng: random.Random, m: ring.Modulus, integral: bool = False) -> Element:
    if integral:
        coeffs = [rng.randint(-9, 9) for _ in range(m.dim)]
    else:
        coeffs = [
            Fraction(rng.randint(-9, 9), rng.randint(1, 6)) for _ in range(m.dim)
        ]
    return ring.from_coeffs(m, coeffs)


# ---------------------------------------------------------------------------
# ring suite


def _check_ring_axioms(N: int, kind_desc: str, m: ring.Modulus, seed: int) -> str | None:
    rng = _rng(seed, "ring-axioms", {"N": N, "kind": kind_desc})
    one = ring.one(m)
    for trial in range(200):
        a = _random_element(rng, m)
        b = _random_element(rng, m)
        c = _random_element(rng, m)
        if (a * b) * c != a * (b * c):
            return f"associativity fails at trial {trial}"
        if a * (b + c) != a * b + a * c:
            return f"distributivity fails at trial {trial}"
        if a * b != b * a:
            return f"commutativity fails at trial {trial}"
        if a * one != a:
            return f"unit law fails at trial {trial}"
    return None


def _check_reduce_hom(N: int, m: ring.Modulus, seed: int) -> str | None:
    rng = _rng(seed, "reduce-hom", {"N": N, "kind": m.kind})
    for trial in range(100):
        deg = rng.randint(0, 3 * N)
        p = {e: rng.randint(-6, 6) for e in rng.sample(range(-N, 3 * N), k=min(deg + 1, 8))}
        q = {e: rng.randint(-6, 6) for e in rng.sample(range(-N, 3 * N), k=4)}
        rp, rq = reduce_poly(p, m), reduce_poly(q, m)
        s = {e: p.get(e, 0) + q.get(e, 0) for e in set(p) | set(q)}
        if reduce_poly(s, m) != rp + rq:
            return f"additivity fails at trial {trial}"
        prod: dict[int, int] = {}
        for e1, c1 in p.items():
            for e2, c2 in q.items():
                prod[e1 + e2] = prod.get(e1 + e2, 0) + c1 * c2
        if reduce_poly(prod, m) != rp * rq:
            return f"multiplicativity fails at trial {trial}"
        if reduce_poly({e: c for e, c in enumerate(rp.coeffs)}, m) != rp:
            return f"idempotence fails at trial {trial}"
    return None


def _check_inverse_roundtrip(N: int, m: ring.Modulus, seed: int) -> str | None:
    rng = _rng(seed, "inverse-roundtrip", {"N": N, "kind": m.kind})
    one = ring.one(m)
    done = 0
    for trial in range(60):
        if done >= 20:
            break
        a = _random_element(rng, m)
        try:
            inv = ring.inverse(a)
        except NotInvertible as exc:
            if exc.witness is not None and not (a * exc.witness).is_zero():
                return f"bogus zero-divisor witness at trial {trial}"
            continue
        if a * inv != one:
            return f"inverse round trip fails at trial {trial}"
        done += 1
    return None


def _check_involution(N: int, seed: int) -> str | None:
    m = truncated(N)
    rng = _rng(seed, "involution", {"N": N})
    for trial in range(50):
        a = _random_element(rng, m)
        b = _random_element(rng, m)
        if involution(involution(a)) != a:
            return f"involution order > 2 at trial {trial}"
        if involution(a * b) != involution(a) * involution(b):
            return f"involution not multiplicative at trial {trial}"
        if eigen_project(a, 1) + eigen_project(a, -1) != a:
            return f"eigenprojections do not sum to identity at trial {trial}"
        if not eigen_test(eigen_project(a, 1), 1):
            return f"plus-projection not an eigenvector at trial {trial}"
    return None


def _check_crt(N: int, seed: int) -> str | None:
    m = truncated(N)
    rng = _rng(seed, "crt-roundtrip", {"N": N})
    for trial in range(200):
        a = _random_element(rng, m)
        b = _random_element(rng, m)
        sa, sb = ring.crt_split(a), ring.crt_split(b)
        if ring.crt_combine(sa, N) != a:
            return f"split/combine round trip fails at trial {trial}"
        sab = ring.crt_split(a * b)
        if any(pa * pb != pab for pa, pb, pab in zip(sa, sb, sab)):
            return f"split not multiplicative at trial {trial}"
        ssum = ring.crt_split(a + b)
        if any(pa + pb != ps for pa, pb, ps in zip(sa, sb, ssum)):
            return f"split not additive at trial {trial}"
    return None


def _check_eval_minus_one(N: int, seed: int) -> str | None:
    m = truncated(N)
    rng = _rng(seed, "eval-minus-one", {"N": N})
    for trial in range(100):
        p = {e: rng.randint(-9, 9) for e in rng.sample(range(0, 3 * N), k=6)}
        val = sum(c * (-1) ** e for e, c in p.items())
        if eval_minus_one(reduce_poly(p, m)) != val:
            return f"evaluation not representative-independent at trial {trial}"
    return None


def _check_restrict(N: int, seed: int) -> str | None:
    m = truncated(N)
    rng = _rng(seed, "restrict", {"N": N})
    divisors = [np for np in range(2, N) if N % np == 0]
    for trial in range(40):
        a = _random_element(rng, m)
        b = _random_element(rng, m)
        for np in divisors:
            ra = ring.restrict(a, np)
            if ring.restrict(a * b, np) != ra * ring.restrict(b, np):
                return f"restriction not multiplicative N'->{np} at trial {trial}"
            if ring.restrict(involution(a), np) != involution(ra):
                return f"restriction does not commute with involution at {np}"
            for npp in (x for x in range(2, np) if np % x == 0):
                if ring.restrict(ra, npp) != ring.restrict(a, npp):
                    return f"restriction not transitive {N}->{np}->{npp}"
    return None


def _check_lattice_soundness(N: int, seed: int) -> str | None:
    m = truncated(N)
    rng = _rng(seed, "lattice-soundness", {"N": N})
    for trial in range(60):
        sign = rng.choice([1, -1])
        x = eigen_project(_random_element(rng, m, integral=True), sign)
        two_x = x + x  # eigen-projection may introduce halves; 2x is integral
        if not two_x.is_integral():
            return f"eigen lattice bookkeeping broke at trial {trial}"
        if not in_lattice_4r(two_x * 4, sign):
            return f"4*integral eigen element rejected at trial {trial}"
    # negative cases: a coefficient equal to 2 mod 4 must be rejected
    if not in_lattice_4r(ring.const(m, 2), 1):
        pass
    else:
        return "2 accepted in the 4-lattice"
    if N >= 3:
        plus = reduce_poly({1: 2, N - 1: 2}, m)
        if in_lattice_4r(plus, 1):
            return "2*(x + x^-1) accepted in the (+)-4-lattice"
        minus = reduce_poly({1: 2, N - 1: -2}, m)
        if in_lattice_4r(minus, -1):
            return "2*(x - x^-1) accepted in the (-)-4-lattice"
        # wrong eigenspace is rejected no matter the divisibility
        if in_lattice_4r(reduce_poly({1: 4, N - 1: -4}, m), 1):
            return "(-)-eigen element accepted in the (+)-lattice"
    return None


def suite_ring(sweep_n: Iterable[int], seed: int) -> list[Check]:
    checks: list[Check] = []
    for N in sweep_n:
        kinds = [truncated(N), ring.group_ring(N)]
        K, M = ring.split_two_power(N)
        if K >= 1:
            kinds.extend(ring.crt_factors(N))
        for m in kinds:
            label = m.kind if m.kind != ring.BINOMIAL_PLUS else f"{m.kind}({m.param})"
            checks.append(
                Check(
                    "ring-axioms",
                    {"N": N, "kind": label},
                    (lambda N=N, m=m, label=label: _check_ring_axioms(N, label, m, seed)),
                )
            )
        checks.append(
            Check(
                "reduce-hom",
                {"N": N, "kind": "truncated"},
                (lambda N=N: _check_reduce_hom(N, truncated(N), seed)),
            )
        )
        checks.append(
            Check(
                "inverse-roundtrip",
                {"N": N, "kind": "truncated"},
                (lambda N=N: _check_inverse_roundtrip(N, truncated(N), seed)),
            )
        )
        checks.append(
            Check("involution", {"N": N}, (lambda N=N: _check_involution(N, seed)))
        )
        if K >= 1:
            checks.append(Check("crt-roundtrip", {"N": N}, (lambda N=N: _check_crt(N, seed))))
            checks.append(
                Check(
                    "eval-minus-one", {"N": N}, (lambda N=N: _check_eval_minus_one(N, seed))
                )
            )
        checks.append(Check("restrict", {"N": N}, (lambda N=N: _check_restrict(N, seed))))
        checks.append(
            Check(
                "lattice-soundness",
                {"N": N},
                (lambda N=N: _check_lattice_soundness(N, seed)),
            )
        )
    return checks


# ---------------------------------------------------------------------------
# lemma suite


def _check_fk_triple(N: int) -> str | None:
    f = f_element(N)
    for k in range(1, N):
        if gcd(k, N) != 1 or (k % 2 == 0 and N % 2 == 0):
            continue
        fk = f_k_element(N, k)
        fpk = f_prime_k_element(N, k)
        if not eigen_test(fk, -1):
            return f"f_{k} not in the (-1)-eigenspace"
        if not fpk.is_integral():
            return f"f'_{k} not integral"
        if fk != f * fpk:
            return f"f_{k} != f * f'_{k}"
    return None


def _check_g_quasi_inverse(N: int) -> str | None:
    m = truncated(N)
    g = g_element(N)
    gf = g * f_element(N)
    if not (g.is_zero() or eigen_test(g, -1)):
        return "g not in the (-1)-eigenspace"
    for r in range(1, (N + 1) // 2):
        v = ring.x_power(m, r) - ring.x_power(m, N - r)
        if gf * v != v:
            return f"g*f does not fix x^{r} - x^-{r}"
    if N % 2 == 1 and gf != ring.one(m):
        return "g is not the exact inverse of f for odd N"
    return None


def _check_lem_2_3(N: int) -> str | None:
    for k in _coprime_ks(N, limit=N):
        fk = f_k_element(N, k)
        for t in range(1, 4 * N + 1):
            member = all((c * 8 * t / 4).denominator == 1 for c in fk.coeffs)
            if member and (4 * t) % N != 0:
                return f"8*{t}*f_{k} lands in the 4-lattice but {N} does not divide {4 * t}"
    return None


def _check_lem_2_3_converse(N: int) -> str | None:
    # reported, not asserted by the statement: N | 4t should imply membership
    for k in _coprime_ks(N, limit=N):
        fk = f_k_element(N, k)
        for t in range(1, 4 * N + 1):
            if (4 * t) % N == 0:
                if not all((c * 8 * t / 4).denominator == 1 for c in fk.coeffs):
                    return f"converse fails: {N} | {4 * t} but 8*{t}*f_{k} not in lattice"
    return None


def _check_decomposition_lem(N: int, seed: int) -> str | None:
    K, M = ring.split_two_power(N)
    rng = _rng(seed, "decomposition-lem", {"N": N})
    m = truncated(N)
    g_two = {e: 1 for e in range(2**K)}  # 1 + x + ... + x^(2^K - 1)
    g_odd = {e * 2**K: 1 for e in range(M)}  # 1 + x^(2^K) + ... + x^(2^K(M-1))

    def rand_poly(scale: int) -> dict[int, int]:
        return {e: scale * rng.randint(-5, 5) for e in range(rng.randint(1, N))}

    def mul_raw(p: dict[int, int], q: dict[int, int]) -> dict[int, int]:
        out: dict[int, int] = {}
        for e1, c1 in p.items():
            for e2, c2 in q.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return out

    def add_raw(*ps) -> dict[int, int]:
        out: dict[int, int] = {}
        for p in ps:
            for e, c in p.items():
                out[e] = out.get(e, 0) + c
        return out

    def neg_raw(p):
        return {e: -c for e, c in p.items()}

    for trial in range(100):
        b = rand_poly(4)
        s = rand_poly(4)
        r = rand_poly(4)
        a = add_raw(b, mul_raw(s, g_two))
        cpoly = add_raw(a, neg_raw(mul_raw(r, g_odd)))
        if any(v % 4 for v in cpoly.values()):
            return f"instance generator broke at trial {trial}"
        witness = add_raw(
            {e: M * c for e, c in cpoly.items()},
            mul_raw(add_raw(b, neg_raw(cpoly)), g_odd),
        )
        if any(v % 4 for v in witness.values()):
            return f"witness not 4-integral at trial {trial}"
        lhs = reduce_poly({e: M * c for e, c in a.items()}, m)
        rhs = reduce_poly(witness, m)
        if lhs != rhs:
            return f"M*a != witness mod the full ideal at trial {trial}"
    return None


def _check_m_factor_lem(N: int, k: int, seed: int) -> str | None:
    rng = _rng(seed, "m-factor-lem", {"N": N, "k": k})
    m_odd = ring.odd_truncated(N)
    K, M = ring.split_two_power(N)
    raw_f = f_element(N)
    raw_fpk = f_prime_k_element(N, k)
    f = reduce_poly({e: c for e, c in enumerate(raw_f.coeffs)}, m_odd)
    fpk = reduce_poly({e: c for e, c in enumerate(raw_fpk.coeffs)}, m_odd)
    one = ring.one(m_odd)
    f2 = f * f

    def ok(el: Element) -> bool:
        return all((c / 4).denominator == 1 for c in el.coeffs)

    for trial in range(100):
        deg = rng.randint(0, 3)
        q = [rng.randint(-6, 6) for _ in range(deg + 1)]
        while len(q) > 1 and q[-1] == 0:
            q.pop()
        deg = len(q) - 1
        qf2 = ring.zero(m_odd)
        for j, coef in enumerate(q):
            if coef:
                qf2 = qf2 + f2**j * coef
        first = fpk * (f2 - one) * qf2 * (8 * M ** (2 + 2 * deg))
        second = fpk * f * qf2 * (8 * M ** (1 + 2 * deg))
        if not ok(first):
            return f"even display not 4-integral for q={q}"
        if not ok(second):
            return f"odd display not 4-integral for q={q}"
    return None


def _check_divide_by_f(N: int, seed: int) -> str | None:
    rng = _rng(seed, "divide-by-f", {"N": N})
    m = truncated(N)
    f = f_element(N)
    for trial in range(100):
        raw: dict[int, int] = {}
        for k in range(1, N // 2):
            c = 4 * rng.randint(-5, 5)
            raw[k] = c
            raw[N - k] = c
        raw[N // 2] = 8 * rng.randint(-3, 3)
        ev = sum(raw.get(j, 0) * (-1) ** j for j in range(N))
        raw[0] = -ev
        u = reduce_poly(raw, m)
        if eval_minus_one(u) != 0 or not in_lattice_4r(u, 1):
            return f"generator produced an invalid u at trial {trial}"
        a = divide_by_f(u)
        if f * a != u:
            return f"f * a != u at trial {trial}"
        if not in_lattice_4r(a, -1):
            return f"quotient not in the 4-integral (-1)-lattice at trial {trial}"
    return None


def _check_fk_restriction(N: int) -> str | None:
    for k in _coprime_ks(N):
        if not ring.restrict(f_k_element(N, k), 2).is_zero():
            return f"f_{k} does not restrict to 0 at N'=2"
    return None


def suite_lemmas(sweep_n: Iterable[int], seed: int) -> list[Check]:
    checks: list[Check] = []
    for N in range(2, 49):
        checks.append(Check("lemma-f_k", {"N": N}, (lambda N=N: _check_fk_triple(N))))
        checks.append(
            Check("lemma-f-inverse", {"N": N}, (lambda N=N: _check_g_quasi_inverse(N)))
        )
    for N in range(2, 25):
        checks.append(Check("lemma-8tfk", {"N": N}, (lambda N=N: _check_lem_2_3(N))))
        checks.append(
            Check(
                "lemma-8tfk-converse",
                {"N": N},
                (lambda N=N: _check_lem_2_3_converse(N)),
            )
        )
    for N in (6, 12, 24):
        checks.append(
            Check(
                "lemma-decomposition",
                {"N": N},
                (lambda N=N: _check_decomposition_lem(N, seed)),
            )
        )
        for k in _coprime_ks(N):
            checks.append(
                Check(
                    "lemma-m-factor",
                    {"N": N, "k": k},
                    (lambda N=N, k=k: _check_m_factor_lem(N, k, seed)),
                )
            )
    for N in range(2, 25, 2):
        checks.append(
            Check("divide-by-f", {"N": N}, (lambda N=N: _check_divide_by_f(N, seed)))
        )
    for N in (4, 6, 8, 12):
        checks.append(
            Check("f_k-restriction", {"N": N}, (lambda N=N: _check_fk_restriction(N)))
        )
    return checks


# ---------------------------------------------------------------------------
# kernel suite


def _check_kernel_vs_closed(N: int, d: int, k: int) -> str | None:
    p = LensParams(N, d, k)
    kr = kernel_rho_bar(p)
    cf = kernel_closed_form(p)
    if not iso_eq(kr.torsion, cf):
        return f"brute {kr.torsion.factors} vs closed {cf.factors}"
    return None


def _check_rank_clause(N: int, d: int) -> str | None:
    p = LensParams(N, d)
    # l_group_reduced_rank asserts lattice-vs-clause agreement internally
    rank = l_group_reduced_rank(N, p.sign)
    ss = structure_set(p, method="closed")
    if ss.free_rank != rank:
        return f"descriptor rank {ss.free_rank} != lattice rank {rank}"
    return None


def _check_rank_lattice(N: int) -> str | None:
    # raises internally when the eigenlattice rank disagrees with the clause
    l_group_reduced_rank(N, 1)
    l_group_reduced_rank(N, -1)
    return None


def _check_formula_additivity(N: int, d: int, k: int, seed: int) -> str | None:
    p = LensParams(N, d, k)
    if p.K < 1:
        return None
    rng = _rng(seed, "formula-additive", p.to_json())
    for trial in range(20):
        t = tuple(rng.randrange(p.t4_modulus) for _ in range(p.c))
        s = tuple(rng.randrange(p.t4_modulus) for _ in range(p.c))
        ts = tuple((a + b) % p.t4_modulus for a, b in zip(t, s))
        gap = rho_bar_formula(p, ts) - rho_bar_formula(p, t) - rho_bar_formula(p, s)
        if not in_lattice_4r(gap, p.sign):
            return f"additivity fails at t={t}, s={s}"
    return None


def _check_formula_twist(N: int, d: int, k: int, seed: int) -> str | None:
    p = LensParams(N, d, k)
    if p.K < 1:
        return None
    p1 = LensParams(N, d, 1)
    fpk = f_prime_k_element(N, p.k)
    rng = _rng(seed, "formula-twist", p.to_json())
    for trial in range(20):
        t = tuple(rng.randrange(p.t4_modulus) for _ in range(p.c))
        if rho_bar_formula(p, t) != fpk * rho_bar_formula(p1, t):
            return f"twist fails at t={t}"
    return None


def _check_lift_independence(N: int, d: int, k: int) -> str | None:
    p = LensParams(N, d, k)
    if p.K < 1:
        return None
    shift = p.t4_modulus * p.M**p.c
    for i, base in enumerate(_formula_basis(N, d, k)):
        if not in_lattice_4r(base * shift, p.sign):
            return f"changing the lift by {shift} moves the class in slot {i}"
    return None


def _check_formula_naturality(N: int, n_prime: int, d: int) -> str | None:
    p = LensParams(N, d)
    q = LensParams(n_prime, d)
    if p.K < 1 or q.K < 1:
        return None
    for t in range(p.t4_modulus):
        t4 = (t,) + (0,) * (p.c - 1)
        down = ring.restrict(rho_bar_formula(p, t4), n_prime)
        tq = tuple(x % q.t4_modulus for x in t4)
        gap = down - rho_bar_formula(q, tq)
        if not in_lattice_4r(gap, q.sign):
            return f"naturality fails at t4={t}"
    return None


def _check_normal_group(N: int, d: int) -> str | None:
    p = LensParams(N, d)
    two_local, odd_order = reduced_normal_group(p)
    expect = FinAb.from_orders([p.t4_modulus] * p.c + [p.t4m2_modulus] * p.c)
    if two_local != expect:
        return f"two-local part {two_local.factors} != {expect.factors}"
    if odd_order != p.M**p.c:
        return f"odd order {odd_order} != M^c"
    return None


def suite_kernel(sweep_n, sweep_d, seed: int) -> list[Check]:
    checks: list[Check] = []
    for N in sweep_n:
        for d in sweep_d:
            for k in _coprime_ks(N):
                checks.append(
                    Check(
                        "thm-main-kernel",
                        {"N": N, "d": d, "k": k},
                        (lambda N=N, d=d, k=k: _check_kernel_vs_closed(N, d, k)),
                    )
                )
            checks.append(
                Check(
                    "thm-main-rank",
                    {"N": N, "d": d},
                    (lambda N=N, d=d: _check_rank_clause(N, d)),
                )
            )
            checks.append(
                Check(
                    "eq-normal-group",
                    {"N": N, "d": d},
                    (lambda N=N, d=d: _check_normal_group(N, d)),
                )
            )
        for d in (4, 5):
            for k in _coprime_ks(N):
                checks.append(
                    Check(
                        "formula-additive",
                        {"N": N, "d": d, "k": k},
                        (lambda N=N, d=d, k=k: _check_formula_additivity(N, d, k, seed)),
                    )
                )
                checks.append(
                    Check(
                        "formula-twist",
                        {"N": N, "d": d, "k": k},
                        (lambda N=N, d=d, k=k: _check_formula_twist(N, d, k, seed)),
                    )
                )
                checks.append(
                    Check(
                        "formula-lift-free",
                        {"N": N, "d": d, "k": k},
                        (lambda N=N, d=d, k=k: _check_lift_independence(N, d, k)),
                    )
                )
    for N, n_prime in ((8, 4), (8, 2), (16, 8), (24, 12), (12, 6), (4, 2)):
        if N in sweep_n:
            for d in (4, 5, 6):
                checks.append(
                    Check(
                        "formula-naturality",
                        {"N": N, "N'": n_prime, "d": d},
                        (lambda N=N, n_prime=n_prime, d=d: _check_formula_naturality(N, n_prime, d)),
                    )
                )
    # the eigenlattice-vs-clause agreement is asserted for every N up to 48,
    # unless the sweep was trimmed, in which case it is trimmed the same way
    rank_cap = 48 if tuple(sweep_n) == DEFAULT_SWEEP_N else max(sweep_n, default=2)
    for N in range(2, rank_cap + 1):
        checks.append(
            Check(
                "rank-lattice-clause",
                {"N": N},
                (lambda N=N: _check_rank_lattice(N)),
            )
        )
    return checks


# ---------------------------------------------------------------------------
# suspension suite


def _torsion_elements(p: LensParams) -> list[StructureElement]:
    kr = kernel_rho_bar(p)
    out = []
    for t4 in kr.members:
        for t4m2 in product(range(p.t4m2_modulus), repeat=p.c):
            out.append(
                StructureElement(p, ring.zero(p.modulus()), NormalCoords(t4, tuple(t4m2)))
            )
    return out


def _lattice_basis_elements(p: LensParams) -> list[StructureElement]:
    """Coordinate-free elements spanning the 4-integral eigenlattice."""
    m = p.modulus()
    out = []
    if p.sign == -1:
        for r in range(1, (p.N + 1) // 2):
            rho = (ring.x_power(m, r) - ring.x_power(m, p.N - r)) * 4
            out.append(StructureElement(p, rho, NormalCoords.zero(p)))
    else:
        for r in range(1, p.N // 2 + 1):
            rho = reduce_poly({r: 4, -r: 4, 0: 8 * (-1) ** (r + 1)}, m)
            out.append(StructureElement(p, rho, NormalCoords.zero(p)))
    return out


def _check_thm1(N: int, e: int) -> str | None:
    src = LensParams(N, 2 * e + 1)
    sample = _torsion_elements(src) + _lattice_basis_elements(src)
    images = []
    for x in sample:
        res = suspend(x)
        if res.determined is None:
            return f"odd-source suspension not determined at {x.coords}"
        images.append(res.determined)
    # (a) injectivity on the sample
    seen = {}
    for x, y in zip(sample, images):
        key = (y.rho.coeffs, y.coords.t4, y.coords.t4m2)
        if key in seen and seen[key] != (x.rho.coeffs, x.coords.t4, x.coords.t4m2):
            return f"two distinct elements suspend to the same tuple {key}"
        seen[key] = (x.rho.coeffs, x.coords.t4, x.coords.t4m2)
    # (b) image characterization: suspensions evaluate to 0, sigma to 8
    for y in images:
        if not image_test_odd_target(y):
            return "a suspension does not evaluate to 0 at x = -1"
    sigma = elem_sigma(LensParams(N, 2 * e + 2))
    if image_test_odd_target(sigma):
        return "sigma wrongly passes the image test"
    if eval_minus_one(sigma.rho) != 8:
        return "sigma does not evaluate to 8"
    # (c) surjectivity onto eval-0 tuples: torsion sector and lattice generators
    tgt = LensParams(N, 2 * e + 2)
    for y in _torsion_elements(tgt):
        x = StructureElement(src, ring.zero(src.modulus()), y.coords)
        if not element_validate(x):
            return f"torsion tuple {y.coords} has no valid source"
        res = suspend(x)
        if res.determined is None or res.determined.coords != y.coords:
            return f"suspension misses the torsion tuple {y.coords}"
        if not res.determined.rho.is_zero():
            return "suspension of a torsion source is not torsion"
    for y in _lattice_basis_elements(tgt):
        if eval_minus_one(y.rho) != 0:
            continue
        a = divide_by_f(y.rho)
        x = StructureElement(src, a, NormalCoords.zero(src))
        if not element_validate(x):
            return "divide-by-f source fails validation"
        res = suspend(x)
        if res.determined is None or res.determined.rho != y.rho:
            return "suspension misses an eval-0 lattice generator"
    return None


def _check_thm2_omega(N: int, e: int) -> str | None:
    p = LensParams(N, 2 * e)
    omega = elem_omega(p)
    res = suspend(omega)
    if res.determined is None:
        return f"suspension of omega is ambiguous: {res.candidate_t4e()}"
    out = res.determined
    if not (out.rho.is_zero() and out.coords.is_zero()):
        return "suspension of omega is not the zero tuple"
    # the tau-line meets the kernel exactly in the omega-multiples
    tau = elem_tau(p)
    step = 2 ** min(p.K, 2)
    for mult in range(0, 4 * step):
        res = suspend(element_scale(tau, mult))
        kills = all(c.rho.is_zero() and c.coords.is_zero() for c in res.candidates)
        if kills != (mult % step == 0):
            return f"{mult}*tau kernel membership disagrees with the omega line"
    return None


def _check_tau_properties(N: int, e: int) -> str | None:
    p = LensParams(N, 2 * e)
    tau = elem_tau(p)
    if not element_validate(tau):
        return "tau fails validation"
    res = suspend(tau)
    cands = res.candidate_t4e()
    K = p.K
    if K == 1:
        if cands != (1,):
            return f"candidate set {cands} != (1,) for K = 1"
    else:
        expected = tuple(sorted({2 ** (K - 2), 3 * 2 ** (K - 2)}))
        if not set(cands) <= set(expected):
            return f"candidate set {cands} not within {expected}"
    for y in res.candidates:
        if not y.rho.is_zero():
            return "suspension of tau has nonzero rho"
        if any(y.coords.t4[:-1]) or any(y.coords.t4m2):
            return "suspension of tau has extra nonzero coordinates"
        if p.M > 1:
            killed = transfer(y, p.M)
            if not (killed.rho.is_zero() and killed.coords.is_zero()):
                return "transfer to the odd part does not kill the tuple"
    return None


def _check_thm2_image(N: int, e: int) -> str | None:
    src = LensParams(N, 2 * e)
    tgt = LensParams(N, 2 * e + 1)
    mu = elem_mu4m2(tgt)
    if image_test_even_target(mu):
        return "mu_{4e-2} wrongly passes the image test"
    # every suspension output passes
    nu = elem_nu(src)
    sources: list[StructureElement] = []
    for t in _torsion_elements(src):
        sources.append(t)
        for a in range(1, 2 ** min(src.K, 2 * e)):
            sources.append(element_add(element_scale(nu, a), t))
    tau = elem_tau(src)
    for mult in range(1, 2 ** min(src.K, 2) + 1):
        sources.append(element_scale(tau, mult))
    reachable = set()
    for x in sources:
        res = suspend(x)
        for y in res.candidates:
            if not image_test_even_target(y):
                return "a suspension violates the image characterization"
            if y.rho.is_zero():
                reachable.add((y.coords.t4, y.coords.t4m2))
    for y in _torsion_elements(tgt):
        key = (y.coords.t4, y.coords.t4m2)
        if y.coords.t4m2[-1] == 0 and key not in reachable:
            return f"torsion tuple {key} passes the test but is not reached"
        if y.coords.t4m2[-1] == 1 and key in reachable:
            return f"torsion tuple {key} fails the test but is reached"
    return None


def _check_carrier_match(N: int, e: int) -> str | None:
    a, _ = reduced_normal_group(LensParams(N, 2 * e + 1))
    b, _ = reduced_normal_group(LensParams(N, 2 * e + 2))
    if a != b:
        return f"coordinate carriers differ: {a.factors} vs {b.factors}"
    return None


def suite_suspension(seed: int) -> list[Check]:
    checks: list[Check] = []
    for N in (2, 4, 6, 8):
        for e in (1, 2):
            checks.append(
                Check("thm-susp-odd", {"N": N, "e": e}, (lambda N=N, e=e: _check_thm1(N, e)))
            )
            checks.append(
                Check(
                    "carrier-match",
                    {"N": N, "e": e},
                    (lambda N=N, e=e: _check_carrier_match(N, e)),
                )
            )
            if e >= 2:
                checks.append(
                    Check(
                        "lemma-tau",
                        {"N": N, "e": e},
                        (lambda N=N, e=e: _check_tau_properties(N, e)),
                    )
                )
                checks.append(
                    Check(
                        "thm-susp-even-kernel",
                        {"N": N, "e": e},
                        (lambda N=N, e=e: _check_thm2_omega(N, e)),
                    )
                )
                checks.append(
                    Check(
                        "thm-susp-even-image",
                        {"N": N, "e": e},
                        (lambda N=N, e=e: _check_thm2_image(N, e)),
                    )
                )
    checks.append(
        Check(
            "lemma-tau",
            {"N": 24, "e": 2},
            (lambda: _check_tau_properties(24, 2)),
        )
    )
    return checks


# ---------------------------------------------------------------------------
# torsion suite


def _check_minimal_exponent(N: int, e: int) -> str | None:
    p = LensParams(N, 2 * e)
    got = minimal_exponent(p)
    expected = 4 - min(p.K, 2 * e)
    if got != expected:
        return f"minimal exponent {got} != {expected}"
    return None


def _check_basis_roundtrip(N: int, d: int) -> str | None:
    p = LensParams(N, d)
    basis = torsion_basis(p)  # construction verifies orders and generation
    for x in _torsion_elements(p):
        coeffs = torsion_coordinates(x, basis)
        acc = zero_element(p)
        for r, b in zip(coeffs[: p.c], basis.mu4):
            acc = element_add(acc, element_scale(b, r))
        for r, b in zip(coeffs[p.c :], basis.mu4m2):
            acc = element_add(acc, element_scale(b, r))
        if acc.coords != x.coords or not acc.rho.is_zero():
            return f"round trip fails at {x.coords}"
    return None


def _check_torsion_split(N: int, e: int) -> str | None:
    src = LensParams(N, 2 * e)
    tgt = LensParams(N, 2 * e + 1)
    src_size = kernel_rho_bar(src).torsion.order()
    tgt_size = kernel_rho_bar(tgt).torsion.order()
    expected = src_size * 2 ** min(src.K, 2 * e) * 2
    if tgt_size != expected:
        return f"|target torsion| {tgt_size} != {expected}"
    nu = elem_nu(src)
    y, _ = resolve(suspend(nu))
    if not y.rho.is_zero():
        return "suspension of nu is not torsion"
    order = 1
    acc = y
    while not (acc.coords.is_zero() and acc.rho.is_zero()):
        acc = element_add(acc, y)
        order += 1
        if order > 4 * tgt_size:
            return "order search ran away"
    if order != 2 ** min(src.K, 2 * e):
        return f"|suspension of nu| = {order} != 2^min(K,2e)"
    return None


def _check_browder_livesay(N: int) -> str | None:
    p_even = LensParams(N, 4)
    sigma = elem_sigma(p_even)
    K = p_even.K
    for i in range(1, 4):
        expected = Fraction(8, p_even.M * 2 ** (3 + max(0, K - 2 * i)))
        if browder_livesay_composite(sigma, i) != expected:
            return f"sigma obstruction at block {i} is wrong"
        if K <= 2 * i and p_even.M == 1 and expected != 1:
            return "normalization is off: sigma should read 1"
    if browder_livesay_composite(zero_element(p_even), 1) != 0:
        return "zero element has nonzero obstruction"
    return None


def suite_torsion(seed: int) -> list[Check]:
    checks: list[Check] = []
    for N in (2, 4, 8, 16):
        for e in (2, 3):
            checks.append(
                Check(
                    "prop-minimal-exponent",
                    {"N": N, "e": e},
                    (lambda N=N, e=e: _check_minimal_exponent(N, e)),
                )
            )
    for N in (2, 4, 6, 8):
        for d in range(3, 8):
            checks.append(
                Check(
                    "cor-basis-roundtrip",
                    {"N": N, "d": d},
                    (lambda N=N, d=d: _check_basis_roundtrip(N, d)),
                )
            )
    for N in (2, 4, 6, 8):
        for e in (2, 3):
            checks.append(
                Check(
                    "prop-torsion-split",
                    {"N": N, "e": e},
                    (lambda N=N, e=e: _check_torsion_split(N, e)),
                )
            )
    for N in (2, 4, 8, 16):
        checks.append(
            Check(
                "rem-browder-livesay",
                {"N": N},
                (lambda N=N: _check_browder_livesay(N)),
            )
        )
    return checks


# ---------------------------------------------------------------------------
# harness


def build_checks(
    suites: Iterable[str],
    max_n: int | None = None,
    max_d: int | None = None,
    seed: int = 0,
) -> list[Check]:
    sweep_n = tuple(n for n in DEFAULT_SWEEP_N if max_n is None or n <= max_n)
    sweep_d = tuple(d for d in DEFAULT_SWEEP_D if max_d is None or d <= max_d)
    out: list[Check] = []
    for name in suites:
        if name == "ring":
            batch = suite_ring(sweep_n, seed)
        elif name == "lemmas":
            batch = suite_lemmas(sweep_n, seed)
        elif name == "kernel":
            batch = suite_kernel(sweep_n, sweep_d, seed)
        elif name == "suspension":
            batch = suite_suspension(seed)
        elif name == "torsion":
            batch = suite_torsion(seed)
        else:
            raise ValueError(f"unknown suite {name!r}")
        for check in batch:
            check.suite = name
            check.seed = seed
        out.extend(batch)
    return out


def _run_one(check: Check) -> dict:
    try:
        witness = check.run()
    except Exception as exc:  # failures are report content, not crashes
        witness = f"exception: {type(exc).__name__}: {exc}"
    entry = {
        "statement": check.statement,
        "params": check.params,
        "status": "pass" if witness is None else "fail",
    }
    if witness is not None:
        entry["witness"] = witness
        cmd = f"rho-lattice verify --suite {check.suite} --seed {check.seed}"
        if "N" in check.params:
            cmd += f" --max-N {check.params['N']}"
        if "d" in check.params:
            cmd += f" --max-d {check.params['d']}"
        entry["reproduce"] = cmd
    return entry


def run_suites(
    suites: Iterable[str],
    max_n: int | None = None,
    max_d: int | None = None,
    seed: int = 0,
    workers: int = 1,
) -> dict:
    """Run the requested suites; returns the deterministic report object."""
    suites = tuple(suites)
    checks = build_checks(suites, max_n, max_d, seed)
    if workers > 1 and len(checks) > 1:
        results = _run_parallel(suites, max_n, max_d, seed, len(checks), workers)
    else:
        results = [_run_one(c) for c in checks]
    results.sort(key=lambda r: (r["statement"], json.dumps(r["params"], sort_keys=True)))
    failed = sum(1 for r in results if r["status"] == "fail")
    by_statement: dict[str, int] = {}
    for r in results:
        by_statement[r["statement"]] = by_statement.get(r["statement"], 0) + 1
    return {
        "schema": "rho-lattice/1",
        "suite": "+".join(suites),
        "seed": seed,
        "checks": results,
        "summary": {
            "total": len(results),
            "passed": len(results) - failed,
            "failed": failed,
            "by_statement": dict(sorted(by_statement.items())),
        },
    }


def _run_chunk(args: tuple) -> list[dict]:
    """Rebuild the check list in the worker and run an index range of it."""
    suites, max_n, max_d, seed, lo, hi = args
    checks = build_checks(suites, max_n, max_d, seed)
    return [_run_one(c) for c in checks[lo:hi]]


def _run_parallel(
    suites: tuple[str, ...],
    max_n: int | None,
    max_d: int | None,
    seed: int,
    n_checks: int,
    workers: int,
) -> list[dict]:
    import concurrent.futures as cf

    chunk = max(1, -(-n_checks // (workers * 4)))
    tasks = [
        (suites, max_n, max_d, seed, lo, min(lo + chunk, n_checks))
        for lo in range(0, n_checks, chunk)
    ]
    try:
        with cf.ProcessPoolExecutor(max_workers=workers) as pool:
            out: list[dict] = []
            for part in pool.map(_run_chunk, tasks):
                out.extend(part)
            return out
    except Exception:
        checks = build_checks(suites, max_n, max_d, seed)
        return [_run_one(c) for c in checks]
