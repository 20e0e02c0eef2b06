"""Quotient-ring arithmetic: canonical forms, units, involution, CRT."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rho_lattice import ring
from rho_lattice.exceptions import (
    ModulusMismatch,
    NotInvertible,
    OddOrderEvaluation,
    UnsupportedModulus,
)
from rho_lattice.ring import (
    crt_combine,
    crt_factors,
    crt_split,
    eigen_project,
    eigen_test,
    element_from_json,
    eval_minus_one,
    from_coeffs,
    geometric_sum,
    group_ring,
    in_lattice_4r,
    inverse,
    involution,
    one,
    reduce_poly,
    restrict,
    truncated,
    x_power,
    zero,
)

MODULI = st.sampled_from(
    [truncated(n) for n in (2, 3, 4, 5, 6, 8, 9, 12)]
    + [group_ring(n) for n in (2, 4, 6, 9)]
    + [ring.binomial_plus(8, l) for l in (0, 1, 2)]
    + [ring.odd_truncated(6), ring.odd_truncated(12)]
)


def elements(modulus):
    scalar = st.fractions(
        min_value=-9, max_value=9, max_denominator=6
    )
    return st.lists(scalar, min_size=modulus.dim, max_size=modulus.dim).map(
        lambda cs: from_coeffs(modulus, cs)
    )


@st.composite
def triples(draw):
    m = draw(MODULI)
    return (draw(elements(m)), draw(elements(m)), draw(elements(m)))


class TestReduce:
    def test_x4_is_one_in_truncated_4(self):
        m = truncated(4)
        assert reduce_poly({4: 1}, m) == one(m)

    def test_ideal_generator_reduces_to_zero(self):
        m = truncated(4)
        assert reduce_poly({0: 1, 1: 1, 2: 1, 3: 1}, m).is_zero()

    def test_negative_exponent(self):
        m = truncated(4)
        assert reduce_poly({-1: 1}, m) == reduce_poly({0: -1, 1: -1, 2: -1}, m)
        # x * x^-1 == 1 by direct expansion
        assert x_power(m, 1) * reduce_poly({-1: 1}, m) == one(m)

    def test_idempotent(self):
        m = truncated(6)
        a = reduce_poly({7: Fraction(3, 2), 2: -1}, m)
        assert reduce_poly({e: c for e, c in enumerate(a.coeffs)}, m) == a

    @settings(max_examples=60, deadline=None, derandomize=True)
    @given(st.data())
    def test_reduce_is_ring_homomorphism(self, data):
        m = data.draw(MODULI)
        exps = st.integers(min_value=-2 * m.N, max_value=3 * m.N)
        poly = st.dictionaries(exps, st.integers(-9, 9), max_size=6)
        p = data.draw(poly)
        q = data.draw(poly)
        s = {e: p.get(e, 0) + q.get(e, 0) for e in set(p) | set(q)}
        prod: dict[int, int] = {}
        for e1, c1 in p.items():
            for e2, c2 in q.items():
                prod[e1 + e2] = prod.get(e1 + e2, 0) + c1 * c2
        assert reduce_poly(s, m) == reduce_poly(p, m) + reduce_poly(q, m)
        assert reduce_poly(prod, m) == reduce_poly(p, m) * reduce_poly(q, m)


class TestRingAxioms:
    @settings(max_examples=200, deadline=None, derandomize=True)
    @given(triples())
    def test_associative_distributive_commutative(self, abc):
        a, b, c = abc
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)

    def test_modulus_mismatch(self):
        with pytest.raises(ModulusMismatch):
            one(truncated(4)) + one(truncated(6))

    def test_zero_annihilates(self):
        m = truncated(5)
        a = reduce_poly({1: Fraction(2, 3)}, m)
        assert (zero(m) * a).is_zero()


class TestInverse:
    def test_one_minus_x_closed_form(self):
        m = truncated(4)
        inv = inverse(reduce_poly({0: 1, 1: -1}, m))
        assert inv.coeffs == (Fraction(3, 4), Fraction(1, 2), Fraction(1, 4))

    def test_geometric_closed_form(self):
        m = truncated(4)
        a = geometric_sum(m, 3)
        assert a * inverse(a) == one(m)
        # r = 3 since 3*3 = 1 mod 4
        assert inverse(a) == reduce_poly({0: 1, 3: 1, 6: 1}, m)

    def test_one_plus_x_odd_order(self):
        for n in (3, 5, 7, 9):
            m = truncated(n)
            inv = inverse(reduce_poly({0: 1, 1: 1}, m))
            assert inv == geometric_sum(m, (n + 1) // 2, step=2)

    def test_zero_divisor_witness(self):
        m = truncated(4)
        a = reduce_poly({0: 1, 1: 1}, m)
        with pytest.raises(NotInvertible) as err:
            inverse(a)
        w = err.value.witness
        assert w is not None and not w.is_zero()
        assert (a * w).is_zero()

    @settings(max_examples=50, deadline=None, derandomize=True)
    @given(st.data())
    def test_random_unit_roundtrip(self, data):
        m = data.draw(MODULI)
        a = data.draw(elements(m))
        try:
            inv = inverse(a)
        except NotInvertible:
            return
        assert a * inv == one(m)


class TestInvolution:
    def test_chi_maps_to_top_power(self):
        m = truncated(6)
        assert involution(x_power(m)) == reduce_poly({5: 1}, m)

    def test_fixed_and_antisymmetric(self):
        m = truncated(6)
        assert involution(one(m)) == one(m)
        v = x_power(m, 1) - x_power(m, 5)
        assert involution(v) == -v

    def test_projection_example(self):
        m = truncated(4)
        assert eigen_project(x_power(m), 1).coeffs == (
            Fraction(-1, 2),
            Fraction(0),
            Fraction(-1, 2),
        )

    def test_constants_are_plus_eigen(self):
        m = truncated(8)
        assert eigen_project(reduce_poly({0: Fraction(5, 7)}, m), -1).is_zero()

    def test_unsupported_modulus(self):
        with pytest.raises(UnsupportedModulus):
            involution(one(ring.binomial_plus(8, 1)))

    @settings(max_examples=80, deadline=None, derandomize=True)
    @given(st.data())
    def test_automorphism_of_order_two(self, data):
        n = data.draw(st.sampled_from([2, 3, 4, 6, 8, 9, 12]))
        m = truncated(n)
        a = data.draw(elements(m))
        b = data.draw(elements(m))
        assert involution(involution(a)) == a
        assert involution(a * b) == involution(a) * involution(b)
        assert eigen_project(a, 1) + eigen_project(a, -1) == a
        assert eigen_test(eigen_project(a, 1), 1)
        assert eigen_test(eigen_project(a, -1), -1) or eigen_project(a, -1).is_zero()


class TestEvalMinusOne:
    def test_plus_one_factor_dies(self):
        for n in (2, 4, 6, 8):
            m = truncated(n)
            f_like = reduce_poly({0: 1, 1: 1}, m) * reduce_poly({2: 3}, m)
            assert eval_minus_one(f_like) == 0

    def test_constant(self):
        assert eval_minus_one(reduce_poly({0: 8}, truncated(6))) == 8

    def test_even_sum_example(self):
        m = truncated(6)
        assert eval_minus_one(geometric_sum(m, 3, step=2) * 16) == 48

    def test_odd_order_rejected(self):
        with pytest.raises(OddOrderEvaluation):
            eval_minus_one(one(truncated(5)))

    @settings(max_examples=60, deadline=None, derandomize=True)
    @given(st.data())
    def test_representative_independent(self, data):
        n = data.draw(st.sampled_from([2, 4, 6, 8, 12]))
        p = data.draw(
            st.dictionaries(st.integers(0, 3 * n), st.integers(-9, 9), max_size=6)
        )
        direct = sum(c * (-1) ** e for e, c in p.items())
        assert eval_minus_one(reduce_poly(p, truncated(n))) == direct


class TestRestrict:
    def test_f_restricts_to_zero_at_two(self):
        m = truncated(4)
        f = reduce_poly({0: 1, 1: 1}, m) * inverse(reduce_poly({0: 1, 1: -1}, m))
        assert restrict(f, 2).is_zero()

    def test_identity(self):
        assert restrict(one(truncated(12)), 4) == one(truncated(4))

    def test_even_sum_dies_at_odd_part(self):
        for n, m_odd in ((6, 3), (12, 3), (24, 3)):
            s = geometric_sum(truncated(n), n // 2, step=2) * 16
            assert restrict(s, m_odd).is_zero()

    def test_transitive_and_homomorphic(self):
        m = truncated(24)
        a = reduce_poly({5: Fraction(1, 3), 2: 1}, m)
        b = reduce_poly({1: 2, 7: -1}, m)
        assert restrict(restrict(a, 12), 6) == restrict(a, 6)
        assert restrict(a * b, 6) == restrict(a, 6) * restrict(b, 6)
        assert restrict(involution(a), 6) == involution(restrict(a, 6))

    def test_non_divisor_rejected(self):
        with pytest.raises(ValueError):
            restrict(one(truncated(6)), 4)


class TestCrt:
    def test_dimensions_add_up(self):
        for n in (4, 6, 8, 12, 16, 24):
            assert sum(f.dim for f in crt_factors(n)) == n - 1

    def test_odd_order_identity_factor(self):
        m = truncated(9)
        a = reduce_poly({2: Fraction(1, 3)}, m)
        parts = crt_split(a)
        assert parts == [a]
        assert crt_combine(parts, 9) == a

    def test_minus_eigen_kills_level_zero(self):
        for n in (4, 6, 8, 12):
            m = truncated(n)
            for r in range(1, (n + 1) // 2):
                v = x_power(m, r) - x_power(m, n - r)
                assert crt_split(v)[0].is_zero()

    @settings(max_examples=100, deadline=None, derandomize=True)
    @given(st.data())
    def test_roundtrip_isomorphism(self, data):
        n = data.draw(st.sampled_from([4, 6, 8, 12, 16, 24]))
        m = truncated(n)
        a = data.draw(elements(m))
        b = data.draw(elements(m))
        sa, sb = crt_split(a), crt_split(b)
        assert crt_combine(sa, n) == a
        for pa, pb, pab in zip(sa, sb, crt_split(a * b)):
            assert pa * pb == pab


class TestLattice:
    def test_examples(self):
        m = truncated(6)
        assert in_lattice_4r(reduce_poly({0: 8}, m), 1)
        v = (x_power(m, 1) - x_power(m, 5)) * 2
        assert not in_lattice_4r(v, -1)
        m2 = truncated(2)
        for t in range(-6, 7):
            assert in_lattice_4r(reduce_poly({0: -8 * t}, m2), 1)

    def test_eigen_requirement(self):
        m = truncated(6)
        v = (x_power(m, 1) - x_power(m, 5)) * 4
        assert in_lattice_4r(v, -1)
        assert not in_lattice_4r(v, 1)


class TestSerialization:
    @settings(max_examples=50, deadline=None, derandomize=True)
    @given(st.data())
    def test_json_roundtrip(self, data):
        m = data.draw(MODULI)
        a = data.draw(elements(m))
        assert element_from_json(a.to_json()) == a

    def test_schema_shape(self):
        a = reduce_poly({1: Fraction(-3, 7)}, truncated(5))
        obj = a.to_json()
        assert obj["N"] == 5 and obj["kind"] == "truncated"
        assert obj["coeffs"][1] == ["-3", "7"]
