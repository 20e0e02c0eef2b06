"""Normal coordinates, the coordinate-class formulas and kernels."""

import random
from math import gcd

import pytest

from rho_lattice import ring
from rho_lattice.abelian import iso_eq
from rho_lattice.elements import f_element, f_prime_k_element
from rho_lattice.exceptions import PreconditionFailed, WorkCapExceeded
from rho_lattice.surgery import (
    LensParams,
    NormalCoords,
    StructureElement,
    element_add,
    element_from_json,
    element_neg,
    element_scale,
    element_validate,
    kernel_closed_form,
    kernel_rho_bar,
    l_group_reduced_rank,
    lift_tbar,
    reduced_normal_group,
    rho_bar_formula,
    rho_class_is_zero,
    rho_cp_formula,
    structure_set,
    transfer,
    zero_element,
)
from rho_lattice.ring import in_lattice_4r, reduce_poly, restrict, truncated


class TestParams:
    def test_derived_quantities(self):
        p = LensParams(24, 7, 5)
        assert (p.K, p.M, p.e, p.c) == (3, 3, 3, 3)
        assert p.sign == -1
        assert LensParams(4, 4).sign == 1

    def test_normalization_and_validation(self):
        assert LensParams(4, 5, 7).k == 3
        with pytest.raises(ValueError):
            LensParams(4, 5, 2)
        with pytest.raises(ValueError):
            LensParams(4, 2)
        with pytest.raises(ValueError):
            LensParams(1, 4)


class TestRank:
    def test_examples(self):
        assert l_group_reduced_rank(6, -1) == 2
        assert l_group_reduced_rank(5, -1) == 2
        assert l_group_reduced_rank(2, -1) == 0

    @pytest.mark.parametrize("N", list(range(2, 25)))
    def test_lattice_vs_clause(self, N):
        # l_group_reduced_rank asserts internally that the lattice rank
        # matches the closed clause; exercise both signs
        plus = l_group_reduced_rank(N, 1)
        minus = l_group_reduced_rank(N, -1)
        assert plus + minus == N - 1


class TestNormalGroup:
    def test_examples(self):
        g, odd = reduced_normal_group(LensParams(4, 5))
        assert g.factors == (2, 2, 4, 4) and odd == 1
        g, odd = reduced_normal_group(LensParams(2, 3))
        assert g.factors == (2, 2) and odd == 1
        g, odd = reduced_normal_group(LensParams(6, 4))
        assert g.factors == (2, 2) and odd == 3

    def test_odd_order_group(self):
        g, odd = reduced_normal_group(LensParams(9, 6))
        assert g.is_trivial() and odd == 81


class TestLift:
    def test_examples(self):
        assert lift_tbar((1,), LensParams(4, 4)) == (1,)
        assert lift_tbar((1,), LensParams(6, 4)) == (3,)
        assert lift_tbar((0,), LensParams(6, 4)) == (0,)

    def test_congruences(self):
        p = LensParams(24, 7)
        odd = p.M**p.c
        for t in range(p.t4_modulus):
            (tbar,) = lift_tbar((t,) + (0,) * (p.c - 1), p)[:1]
            assert tbar % p.t4_modulus == t
            assert tbar % odd == 0
            assert 0 <= tbar < p.t4_modulus * odd


class TestFormula:
    def test_zero(self):
        assert rho_bar_formula(LensParams(8, 5), (0, 0)).is_zero()

    def test_n4_d4(self):
        v = rho_bar_formula(LensParams(4, 4), (1,))
        assert v == reduce_poly({2: 4, 0: -12}, truncated(4))

    def test_n2_only_constant_survives(self):
        assert rho_bar_formula(LensParams(2, 4), (1,)) == reduce_poly(
            {0: -8}, truncated(2)
        )

    def test_k_zero_rejected(self):
        with pytest.raises(PreconditionFailed):
            rho_bar_formula(LensParams(3, 4), ())

    def test_ignores_t4m2(self):
        p = LensParams(8, 5)
        a = rho_bar_formula(p, NormalCoords((3, 1), (0, 0)))
        b = rho_bar_formula(p, NormalCoords((3, 1), (1, 1)))
        assert a == b

    @pytest.mark.parametrize(
        "N,d,k", [(4, 4, 3), (8, 5, 3), (6, 4, 5), (12, 6, 5), (16, 5, 3)]
    )
    def test_additive_and_twisted(self, N, d, k):
        p = LensParams(N, d, k)
        p1 = LensParams(N, d, 1)
        fpk = f_prime_k_element(N, p.k)
        rng = random.Random(f"{N}:{d}:{k}")
        for _ in range(10):
            t = tuple(rng.randrange(p.t4_modulus) for _ in range(p.c))
            s = tuple(rng.randrange(p.t4_modulus) for _ in range(p.c))
            ts = tuple((a + b) % p.t4_modulus for a, b in zip(t, s))
            gap = rho_bar_formula(p, ts) - rho_bar_formula(p, t) - rho_bar_formula(p, s)
            assert in_lattice_4r(gap, p.sign)
            assert rho_bar_formula(p, t) == fpk * rho_bar_formula(p1, t)


class TestClassZero:
    def test_examples(self):
        p = LensParams(4, 4)
        assert rho_class_is_zero(p, reduce_poly({2: 4, 0: -12}, truncated(4)))
        assert rho_class_is_zero(p, ring.zero(truncated(4)))
        p5 = LensParams(4, 5)
        assert rho_class_is_zero(p5, f_element(4) * 8)
        assert not rho_class_is_zero(p5, f_element(4) * 2)

    def test_eigenspace_violation(self):
        with pytest.raises(ValueError):
            rho_class_is_zero(LensParams(4, 4), f_element(4) * 8)


class TestKernel:
    def test_examples(self):
        assert kernel_rho_bar(LensParams(2, 4)).torsion.factors == (2, 2)
        kr = kernel_rho_bar(LensParams(8, 4))
        assert kr.torsion.factors == (2, 4)
        assert kr.members == ((0,), (2,), (4,), (6,))
        assert kernel_rho_bar(LensParams(4, 5)).torsion.factors == (2, 2, 4, 4)

    def test_closed_form_examples(self):
        assert kernel_closed_form(LensParams(4, 5)).factors == (2, 2, 4, 4)
        assert kernel_closed_form(LensParams(3, 5)).is_trivial()
        assert kernel_closed_form(LensParams(16, 7)).factors == (2, 2, 2, 4, 16, 16)

    def test_cap(self):
        with pytest.raises(WorkCapExceeded):
            kernel_rho_bar(LensParams(16, 8), cap=10)

    def test_cap_env_override(self, monkeypatch):
        monkeypatch.setenv("RHO_LATTICE_CAP", "10")
        with pytest.raises(WorkCapExceeded):
            kernel_rho_bar(LensParams(16, 8))
        monkeypatch.setenv("RHO_LATTICE_CAP", "100000")
        kernel_rho_bar(LensParams(16, 8))

    @pytest.mark.parametrize("N", (2, 3, 4, 5, 6, 8, 9, 12))
    @pytest.mark.parametrize("d", (3, 4, 5, 6))
    def test_brute_matches_closed_form(self, N, d):
        ks = [1]
        for k in range(2, N):
            if gcd(k, N) == 1:
                ks.append(k)
                break
        for k in ks:
            p = LensParams(N, d, k)
            assert iso_eq(kernel_rho_bar(p).torsion, kernel_closed_form(p))


class TestStructureSet:
    def test_examples(self):
        ss = structure_set(LensParams(3, 3))
        assert ss.free_rank == 1 and ss.torsion.is_trivial()
        ss = structure_set(LensParams(6, 3))
        assert ss.free_rank == 2 and ss.torsion.factors == (2, 2)
        ss = structure_set(LensParams(2, 3))
        assert ss.free_rank == 0 and ss.torsion.factors == (2, 2)

    def test_method_fallback(self):
        big = LensParams(16, 8)
        ss = structure_set(big, method="auto", cap=10)
        assert ss.method == "closed"
        with pytest.raises(WorkCapExceeded):
            structure_set(big, method="brute", cap=10)

    def test_descriptor_json(self):
        ss = structure_set(LensParams(6, 3))
        obj = ss.to_json(include_members=True)
        assert obj["free_rank"] == 2
        assert obj["torsion"] == {"factors": [2, 2]}
        assert obj["method"] == "brute"
        assert obj["members"] == [[0], [1]]


class TestCpFormula:
    def test_examples(self):
        assert rho_cp_formula((), 3, 4).is_zero()
        f = f_element(4)
        one4 = ring.one(truncated(4))
        assert rho_cp_formula((1,), 4, 4) == (f * f - one4) * 8
        assert rho_cp_formula((1, 0), 6, 4) == (f**4 - f**2) * 8
        # single-term instantiation matches the lens-space formula at k=1
        assert rho_cp_formula((1,), 4, 4) == rho_bar_formula(LensParams(4, 4), (1,))

    def test_length_checked(self):
        with pytest.raises(ValueError):
            rho_cp_formula((1,), 3, 4)


class TestElements:
    def test_validate_examples(self):
        p = LensParams(6, 4)
        good = StructureElement(p, ring.const(truncated(6), 8), NormalCoords.zero(p))
        assert element_validate(good)
        p4 = LensParams(4, 4)
        bad = StructureElement(p4, f_element(4) * 2, NormalCoords.zero(p4))
        assert not element_validate(bad)

    def test_sum_of_valid_is_valid(self):
        p = LensParams(8, 5)
        kr = kernel_rho_bar(p)
        xs = [
            StructureElement(p, ring.zero(truncated(8)), NormalCoords(t4, (0, 0)))
            for t4 in kr.members[:4]
        ]
        for x in xs:
            assert element_validate(x)
            for y in xs:
                assert element_validate(element_add(x, y))

    def test_add_neg_cancels(self):
        p = LensParams(6, 4)
        x = StructureElement(p, ring.const(truncated(6), 8), NormalCoords((1,), (1,)))
        z = element_add(x, element_neg(x))
        assert z.rho.is_zero() and z.coords.is_zero()

    def test_scale(self):
        p = LensParams(8, 5)
        x = StructureElement(p, ring.zero(truncated(8)), NormalCoords((3, 1), (1, 0)))
        y = element_scale(x, 3)
        assert y.coords.t4 == (1, 3) and y.coords.t4m2 == (1, 0)

    def test_json_roundtrip(self):
        p = LensParams(8, 5, 3)
        x = StructureElement(p, f_element(8) * 0, NormalCoords((2, 1), (1, 0)))
        assert element_from_json(x.to_json()) == x


class TestTransfer:
    def test_coordinate_reduction(self):
        p = LensParams(8, 4)
        el = StructureElement(p, ring.zero(truncated(8)), NormalCoords((3,), (1,)))
        assert transfer(el, 4).coords.t4 == (3,)
        assert transfer(el, 2).coords.t4 == (1,)
        assert transfer(el, 2).coords.t4m2 == (1,)

    def test_odd_target_drops_two_local(self):
        p = LensParams(12, 4)
        el = StructureElement(p, ring.zero(truncated(12)), NormalCoords((3,), (1,)))
        down = transfer(el, 3)
        assert down.coords.t4 == (0,) and down.coords.t4m2 == (0,)

    def test_formula_naturality(self):
        for (N, n_prime, d) in ((8, 4, 4), (8, 4, 5), (16, 8, 4), (24, 12, 5)):
            p, q = LensParams(N, d), LensParams(n_prime, d)
            for t in range(p.t4_modulus):
                t4 = (t,) + (0,) * (p.c - 1)
                down = restrict(rho_bar_formula(p, t4), n_prime)
                tq = tuple(x % q.t4_modulus for x in t4)
                assert in_lattice_4r(down - rho_bar_formula(q, tq), q.sign)

    def test_divisibility_checked(self):
        p = LensParams(8, 4)
        with pytest.raises(ValueError):
            transfer(zero_element(p), 3)
