"""The distinguished units of the rational truncated ring.

Everything here lives in Q[x]/<1 + x + ... + x^(N-1)> for the cyclic group
of order N.  The basic element is

    f = (1 + x) / (1 - x),

an element of the (-1)-eigenspace of the conjugation involution, and its
twisted companions for every exponent k coprime to N:

    f_k = (1 + x^k) / (1 - x^k) = f * f'_k,

where the cofactor f'_k is always integral.  f is a zero divisor whenever
N is even, but it acts invertibly on the (-1)-eigenspace: the quasi-inverse
g constructed here satisfies g * f * v = v for every v with
involution(v) = -v.

The constructive ``divide_by_f`` solves u = f * a for a in the
4-integral (-1)-eigenlattice whenever u is 4-integral, (+1)-eigen and
vanishes at x = -1, which is exactly the obstruction for such a quotient
to exist.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from . import ring
from .abelian import solve_integer
from .exceptions import PreconditionFailed
from .ring import Element, Modulus, split_two_power


def f_element(N: int) -> Element:
    """f = (1+x)/(1-x) in the rational truncated ring of order N."""
    return f_k_element(N, 1)


def f_k_element(N: int, k: int) -> Element:
    """f_k = (1+x^k)/(1-x^k); requires gcd(k, N) = 1.

    Lies in the (-1)-eigenspace of the involution.
    """
    if gcd(k, N) != 1:
        raise ValueError(f"k = {k} must be coprime to N = {N}")
    m = ring.truncated(N)
    num = ring.reduce_poly({0: 1, k: 1}, m)
    den = ring.reduce_poly({0: 1, k: -1}, m)
    return num * ring.inverse(den)


def f_prime_k_element(N: int, k: int) -> Element:
    """The integral cofactor f'_k with f_k = f * f'_k.

    Built from the closed quotient form, which depends on the parity of k:
    for odd k the numerator is the alternating sum 1 - x + ... + x^(k-1),
    for even k (possible only when N is odd) it is the alternating tail
    x^k - x^(k+1) + ... + x^(N-1); in both cases the denominator is
    1 + x + ... + x^(k-1).
    """
    if gcd(k, N) != 1:
        raise ValueError(f"k = {k} must be coprime to N = {N}")
    if k % 2 == 0 and N % 2 == 0:
        raise ValueError("even k requires odd N")
    m = ring.truncated(N)
    if k == 1:
        return ring.one(m)
    if k % 2 == 1:
        num = ring.alternating_sum(m, k)
    else:
        num = ring.reduce_poly({j: (-1) ** (j - k) for j in range(k, N)}, m)
    den = ring.geometric_sum(m, k)
    return num * ring.inverse(den)


def alternating_unit(N: int, l: int, m: Modulus | None = None) -> Element:
    """A_l = 1 - x + x^2 - ... - x^(2^l - 1), reduced into ``m``.

    Defaults to the truncated ring of order N.  Satisfies
    (1 + x) * A_l = 1 - x^(2^l).
    """
    target = m if m is not None else ring.truncated(N)
    return ring.alternating_sum(target, 2**l)


def h_l_element(N: int, l: int) -> Element:
    """(1+x)^(-1) = A_l / 2 in the CRT factor Q[x]/<1 + x^(2^l)>, l >= 1."""
    if l < 1:
        raise ValueError("h_l is defined for l >= 1 (1+x vanishes in the l = 0 factor)")
    m = ring.binomial_plus(N, l)
    return alternating_unit(N, l, m).scale(Fraction(1, 2))


def h_element(N: int) -> Element:
    """(1+x)^(-1) in the odd CRT factor Q[x]/<1 + y + ... + y^(M-1)>, y = x^(2^K).

    Closed form -(A_K / M) * (1 + 2y + 3y^2 + ... + M y^(M-1)), the product
    of A_K = (1 - y)/(1 + x) with the standard geometric-derivative inverse
    of 1 - y.
    """
    K, M = split_two_power(N)
    m = ring.odd_truncated(N)
    a_k = alternating_unit(N, K, m)
    step = 2**K
    series = ring.reduce_poly({j * step: j + 1 for j in range(M)}, m)
    return (a_k * series).scale(Fraction(-1, M))


def g_element(N: int) -> Element:
    """The quasi-inverse of f: g*f*v = v for all v in the (-1)-eigenspace.

    For odd N (K = 0) f is invertible and g is its literal inverse, the
    unique choice.  For even N, g is assembled by Chinese remaindering:
    component 0 in the l = 0 factor (where 1 + x vanishes, so every
    (-1)-eigen element projects to 0 there), and the inverse of the
    f-component everywhere else, which is (1-x) times the (1+x)-inverse
    h_l resp. h of that factor.  g itself lies in the (-1)-eigenspace, but
    is not unique with that property when K >= 1.
    """
    K, M = split_two_power(N)
    if K == 0:
        return ring.inverse(f_element(N))
    parts = [ring.zero(ring.binomial_plus(N, 0))]
    for l in range(1, K):
        m_l = ring.binomial_plus(N, l)
        parts.append(ring.reduce_poly({0: 1, 1: -1}, m_l) * h_l_element(N, l))
    if M > 1:
        m_odd = ring.odd_truncated(N)
        parts.append(ring.reduce_poly({0: 1, 1: -1}, m_odd) * h_element(N))
    return ring.crt_combine(parts, N)


@dataclass(frozen=True)
class Catalog:
    """All named elements for a fixed (N, k), built once and cached.

    ``h_ls`` are the (1+x)-inverses in the binomial CRT factors l = 1..K-1,
    ``h`` the one in the odd factor (None when M = 1 or K = 0), and
    ``a_ls`` the alternating units A_1..A_K in the truncated ring.
    """

    N: int
    k: int
    f: Element
    f_k: Element
    f_prime_k: Element
    g: Element
    h_ls: tuple[Element, ...]
    h: Element | None
    a_ls: tuple[Element, ...]

    @staticmethod
    def get(N: int, k: int) -> Catalog:
        return _catalog(N, k)


@lru_cache(maxsize=None)
def _catalog(N: int, k: int) -> Catalog:
    K, M = split_two_power(N)
    return Catalog(
        N=N,
        k=k,
        f=f_element(N),
        f_k=f_k_element(N, k),
        f_prime_k=f_prime_k_element(N, k),
        g=g_element(N),
        h_ls=tuple(h_l_element(N, l) for l in range(1, K)),
        h=h_element(N) if (K >= 1 and M > 1) else None,
        a_ls=tuple(alternating_unit(N, l) for l in range(1, K + 1)),
    )


# ---------------------------------------------------------------------------
# constructive division by f on the 4-integral lattice


def _pair_basis_vector(m: Modulus, k: int) -> Element:
    """B_k = 4*(x^k + x^(-k)) + 8*(-1)^(k+1); spans the +eigen, eval-0 lattice."""
    return ring.reduce_poly({k: 4, -k: 4, 0: 8 * (-1) ** (k + 1)}, m)


def _quotient_for_pair(m: Modulus, k: int) -> Element:
    """a_k with f * a_k = B_k:  a_k = (1-x) * v_k for the alternating v_k."""
    raw: dict[int, int] = {}
    for i in range(k):
        e = k - 1 - i
        raw[e] = raw.get(e, 0) + 4 * (-1) ** i
    for i in range(k):
        e = -k + i
        raw[e] = raw.get(e, 0) + 4 * (-1) ** i
    v = ring.reduce_poly(raw, m)
    return ring.reduce_poly({0: 1, 1: -1}, m) * v


def divide_by_f(u: Element) -> Element:
    """Solve u = f * a with a in the 4-integral (-1)-eigenlattice.

    Preconditions: the ring order N is even, u is 4-integral and
    (+1)-eigen, and u vanishes at x = -1.  The quotient is assembled
    constructively: u is written as an integer combination of the pair
    vectors B_k = 4*(x^k + x^(-k)) + 8*(-1)^(k+1), each of which has the
    explicit quotient (1-x) * v_k.
    """
    m = u.modulus
    N = m.N
    if m.kind != ring.TRUNCATED or N % 2:
        raise PreconditionFailed("divide_by_f needs a truncated ring of even order")
    if not ring.in_lattice_4r(u, 1):
        raise PreconditionFailed("u must be 4-integral and (+1)-eigen")
    if ring.eval_minus_one(u) != 0:
        raise PreconditionFailed("u must vanish at x = -1")
    if u.is_zero():
        return ring.zero(m)
    ks = list(range(1, N // 2 + 1))
    basis = [_pair_basis_vector(m, k) for k in ks]
    rows = [[int(b.coeffs[i]) for b in basis] for i in range(m.dim)]
    rhs = [int(c) for c in u.coeffs]
    sol = solve_integer(rows, rhs)
    if sol is None:
        raise PreconditionFailed("u is not an integer combination of the pair vectors")
    a = ring.zero(m)
    for c, k in zip(sol, ks):
        if c:
            a = a + _quotient_for_pair(m, k).scale(c)
    f = f_element(N)
    assert f * a == u, "constructive division by f failed to verify"
    assert ring.in_lattice_4r(a, -1), "quotient left the 4-integral (-1)-lattice"
    return a
