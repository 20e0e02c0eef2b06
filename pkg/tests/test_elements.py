"""The distinguished units f, f_k, f'_k, g and division by f."""

import random
from fractions import Fraction
from math import gcd

import pytest

from rho_lattice import ring
from rho_lattice.elements import (
    Catalog,
    alternating_unit,
    divide_by_f,
    f_element,
    f_k_element,
    f_prime_k_element,
    g_element,
    h_element,
    h_l_element,
)
from rho_lattice.exceptions import PreconditionFailed
from rho_lattice.ring import (
    eigen_test,
    eval_minus_one,
    in_lattice_4r,
    one,
    reduce_poly,
    restrict,
    truncated,
    x_power,
    zero,
)


class TestFk:
    def test_canonical_forms(self):
        assert f_k_element(2, 1).is_zero()
        assert f_element(4).coeffs == (Fraction(1, 2), Fraction(1), Fraction(1, 2))
        assert f_k_element(4, 3) == -f_k_element(4, 1)

    def test_f_prime_examples(self):
        assert f_prime_k_element(4, 1) == one(truncated(4))
        assert f_prime_k_element(4, 3) == reduce_poly({0: 1, 2: 2}, truncated(4))
        fp52 = f_prime_k_element(5, 2)
        assert fp52.is_integral()
        assert f_k_element(5, 2) == f_element(5) * fp52

    def test_non_coprime_rejected(self):
        with pytest.raises(ValueError):
            f_k_element(6, 3)
        with pytest.raises(ValueError):
            f_prime_k_element(6, 2)

    @pytest.mark.parametrize("N", list(range(2, 25)))
    def test_triple_identity(self, N):
        f = f_element(N)
        for k in range(1, N):
            if gcd(k, N) != 1 or (k % 2 == 0 and N % 2 == 0):
                continue
            fk = f_k_element(N, k)
            fpk = f_prime_k_element(N, k)
            assert eigen_test(fk, -1)
            assert fpk.is_integral()
            assert fk == f * fpk

    def test_restriction_to_two_kills_fk(self):
        for N in (4, 6, 8, 12):
            for k in (1, 3, 5, 7):
                if gcd(k, N) == 1:
                    assert restrict(f_k_element(N, k), 2).is_zero()


class TestG:
    @pytest.mark.parametrize("N", list(range(2, 25)))
    def test_quasi_inverse_on_antisymmetric_basis(self, N):
        m = truncated(N)
        gf = g_element(N) * f_element(N)
        for r in range(1, (N + 1) // 2):
            v = x_power(m, r) - x_power(m, N - r)
            assert gf * v == v

    def test_exact_inverse_for_odd_order(self):
        for N in (3, 5, 9, 15):
            assert g_element(N) * f_element(N) == one(truncated(N))

    def test_minus_eigen(self):
        for N in (4, 6, 8, 12):
            g = g_element(N)
            assert g.is_zero() or eigen_test(g, -1)

    def test_crt_component_inverses(self):
        # the h components invert 1 + x in their factors
        for N in (8, 12, 24):
            K, _ = ring.split_two_power(N)
            for l in range(1, K):
                m = ring.binomial_plus(N, l)
                assert reduce_poly({0: 1, 1: 1}, m) * h_l_element(N, l) == ring.one(m)
        for N in (6, 12, 24):
            m = ring.odd_truncated(N)
            assert reduce_poly({0: 1, 1: 1}, m) * h_element(N) == ring.one(m)

    def test_alternating_unit_identity(self):
        for N, l in ((8, 1), (8, 2), (16, 3)):
            m = truncated(N)
            lhs = reduce_poly({0: 1, 1: 1}, m) * alternating_unit(N, l, m)
            assert lhs == reduce_poly({0: 1, 2**l: -1}, m)

    def test_catalog_caches(self):
        assert Catalog.get(8, 3) is Catalog.get(8, 3)
        cat = Catalog.get(8, 3)
        assert cat.f_k == cat.f * cat.f_prime_k


def random_valid_u(rng, N):
    """A random element of the 4-integral (+)-lattice vanishing at x = -1."""
    raw = {}
    for k in range(1, N // 2):
        c = 4 * rng.randint(-5, 5)
        raw[k] = c
        raw[N - k] = c
    raw[N // 2] = 8 * rng.randint(-3, 3)
    ev = sum(raw.get(j, 0) * (-1) ** j for j in range(N))
    raw[0] = -ev
    return reduce_poly(raw, truncated(N))


class TestDivideByF:
    def test_zero(self):
        assert divide_by_f(zero(truncated(4))).is_zero()

    def test_spec_pairs(self):
        u4 = reduce_poly({1: 4, 3: 4, 0: 8}, truncated(4))
        a4 = divide_by_f(u4)
        assert f_element(4) * a4 == u4 and in_lattice_4r(a4, -1)
        u6 = reduce_poly({2: 4, 4: 4, 0: -8}, truncated(6))
        a6 = divide_by_f(u6)
        assert f_element(6) * a6 == u6 and in_lattice_4r(a6, -1)

    def test_preconditions(self):
        m = truncated(4)
        with pytest.raises(PreconditionFailed):
            divide_by_f(reduce_poly({0: 2}, m))  # not 4-integral
        with pytest.raises(PreconditionFailed):
            divide_by_f(reduce_poly({0: 4}, m))  # eval is 4, not 0
        with pytest.raises(PreconditionFailed):
            divide_by_f(zero(truncated(5)))  # odd order

    @pytest.mark.parametrize("N", list(range(2, 25, 2)))
    def test_random_roundtrip(self, N):
        rng = random.Random(1000 + N)
        f = f_element(N)
        for _ in range(30):
            u = random_valid_u(rng, N)
            assert eval_minus_one(u) == 0 and in_lattice_4r(u, 1)
            a = divide_by_f(u)
            assert f * a == u
            assert in_lattice_4r(a, -1)

    def test_agrees_with_quasi_inverse(self):
        # g * u solves the same division problem, so the two must coincide
        rng = random.Random(7)
        for N in (4, 6, 8, 12):
            g = g_element(N)
            for _ in range(10):
                u = random_valid_u(rng, N)
                assert divide_by_f(u) == g * u
