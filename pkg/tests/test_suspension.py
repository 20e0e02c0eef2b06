"""Suspension, distinguished elements, torsion basis and invariants."""

from itertools import product

import pytest

from rho_lattice import ring
from rho_lattice.exceptions import PreconditionFailed
from rho_lattice.ring import eval_minus_one
from rho_lattice.surgery import (
    LensParams,
    NormalCoords,
    StructureElement,
    element_add,
    element_scale,
    element_validate,
    kernel_rho_bar,
    transfer,
    zero_element,
)
from rho_lattice.suspension import (
    browder_livesay_cascade,
    browder_livesay_composite,
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
)


def torsion_elements(p):
    kr = kernel_rho_bar(p)
    for t4 in kr.members:
        for t4m2 in product(range(p.t4m2_modulus), repeat=p.c):
            yield StructureElement(
                p, ring.zero(p.modulus()), NormalCoords(t4, tuple(t4m2))
            )


class TestNamedElements:
    def test_sigma(self):
        s = elem_sigma(LensParams(4, 4))
        assert element_validate(s)
        assert eval_minus_one(s.rho) == 8

    def test_omega_suspends_to_zero(self):
        w = elem_omega(LensParams(6, 4))
        assert element_validate(w)
        res = suspend(w)
        assert res.determined is not None
        assert res.determined.rho.is_zero() and res.determined.coords.is_zero()

    def test_omega_is_omega_multiple_of_tau(self):
        for N in (2, 4, 8, 16, 6, 12):
            p = LensParams(N, 4)
            assert elem_omega(p).rho == elem_tau(p).rho * 2 ** min(p.K, 2)

    def test_mu4m2(self):
        y = elem_mu4m2(LensParams(8, 5))
        assert element_validate(y)
        assert y.coords.t4m2 == (0, 1) and y.rho.is_zero()

    def test_nu_example(self):
        nu = elem_nu(LensParams(8, 4))
        assert nu.rho == even_exponent_sum(8) * 2
        assert element_validate(nu)

    def test_parity_preconditions(self):
        with pytest.raises(PreconditionFailed):
            elem_sigma(LensParams(4, 5))
        with pytest.raises(PreconditionFailed):
            elem_tau(LensParams(4, 5))
        with pytest.raises(PreconditionFailed):
            elem_mu4m2(LensParams(4, 4))
        with pytest.raises(PreconditionFailed):
            elem_nu(LensParams(4, 5))
        with pytest.raises(PreconditionFailed):
            elem_sigma(LensParams(3, 4))


class TestSuspend:
    def test_zero_element_odd_source(self):
        res = suspend(zero_element(LensParams(8, 5)))
        assert res.determined is not None
        assert res.determined.rho.is_zero() and res.determined.coords.is_zero()

    def test_zero_element_even_source(self):
        res = suspend(zero_element(LensParams(8, 4)))
        assert res.determined is not None
        assert res.determined.coords.is_zero()

    def test_tau_candidate_sets(self):
        assert suspend(elem_tau(LensParams(8, 4))).candidate_t4e() == (2, 6)
        assert suspend(elem_tau(LensParams(2, 4))).candidate_t4e() == (1,)
        assert suspend(elem_tau(LensParams(16, 4))).candidate_t4e() == (4, 12)
        assert suspend(elem_tau(LensParams(6, 4))).candidate_t4e() == (1,)

    def test_tau_suspension_properties(self):
        for N in (2, 4, 6, 8, 24):
            res = suspend(elem_tau(LensParams(N, 4)))
            for y in res.candidates:
                assert y.rho.is_zero()
                assert not any(y.coords.t4[:-1]) and not any(y.coords.t4m2)
                assert element_validate(y)

    def test_transfer_to_odd_part_kills_tau_suspension(self):
        for N in (6, 12, 24):
            p = LensParams(N, 4)
            y, _ = resolve(suspend(elem_tau(p)))
            down = transfer(y, p.M)
            assert down.rho.is_zero() and down.coords.is_zero()

    def test_rho_multiplied_by_f(self):
        p = LensParams(8, 5)
        x = StructureElement(
            p, (ring.x_power(p.modulus(), 1) - ring.x_power(p.modulus(), 7)) * 4,
            NormalCoords.zero(p),
        )
        assert element_validate(x)
        res = suspend(x)
        from rho_lattice.elements import f_element

        assert res.determined is not None
        assert res.determined.rho == f_element(8) * x.rho

    def test_coords_carried(self):
        p = LensParams(8, 5)
        for x in torsion_elements(p):
            res = suspend(x)
            assert res.determined is not None
            assert res.determined.coords == x.coords

    def test_choice_log_records_ambiguity(self):
        res = suspend(elem_tau(LensParams(8, 4)))
        chosen, record = resolve(res)
        assert record is not None
        assert record.candidate_t4e == (2, 6) and record.chosen_t4e == 2
        det = suspend(zero_element(LensParams(8, 5)))
        _, no_record = resolve(det)
        assert no_record is None


class TestImageTests:
    def test_odd_target(self):
        assert not image_test_odd_target(elem_sigma(LensParams(4, 4)))
        assert image_test_odd_target(zero_element(LensParams(4, 4)))
        src = LensParams(4, 3)
        for x in torsion_elements(src):
            res = suspend(x)
            assert res.determined is not None
            assert image_test_odd_target(res.determined)

    def test_even_target(self):
        assert not image_test_even_target(elem_mu4m2(LensParams(8, 5)))
        assert image_test_even_target(zero_element(LensParams(8, 5)))
        for x in torsion_elements(LensParams(8, 4)):
            for y in suspend(x).candidates:
                assert image_test_even_target(y)

    def test_preconditions(self):
        with pytest.raises(PreconditionFailed):
            image_test_odd_target(zero_element(LensParams(5, 4)))
        with pytest.raises(PreconditionFailed):
            image_test_even_target(zero_element(LensParams(8, 3)))


class TestMinimalExponent:
    @pytest.mark.parametrize(
        "N,e", [(2, 2), (2, 3), (4, 2), (4, 3), (8, 2), (8, 3), (16, 2), (16, 3)]
    )
    def test_matches_closed_form(self, N, e):
        p = LensParams(N, 2 * e)
        assert minimal_exponent(p) == 4 - min(p.K, 2 * e)

    def test_preconditions(self):
        with pytest.raises(PreconditionFailed):
            minimal_exponent(LensParams(8, 5))
        with pytest.raises(PreconditionFailed):
            minimal_exponent(LensParams(3, 4))


class TestTorsionBasis:
    def test_order_profiles(self):
        assert torsion_basis(LensParams(8, 7)).orders == (4, 8, 8)
        assert torsion_basis(LensParams(4, 5)).orders == (4, 4)
        assert torsion_basis(LensParams(2, 5)).orders == (2, 2)
        assert torsion_basis(LensParams(8, 6)).orders == (4, 8)

    def test_unit_vector_expansion(self):
        p = LensParams(8, 5)
        tb = torsion_basis(p)
        for i, b in enumerate(tb.mu4):
            coeffs = torsion_coordinates(b, tb)
            expect = tuple(1 if j == i else 0 for j in range(p.c)) + (0,) * p.c
            assert coeffs == expect
        for i, b in enumerate(tb.mu4m2):
            coeffs = torsion_coordinates(b, tb)
            expect = (0,) * p.c + tuple(1 if j == i else 0 for j in range(p.c))
            assert coeffs == expect

    def test_expansion_example(self):
        tb = torsion_basis(LensParams(8, 7))
        x = element_add(element_scale(tb.mu4[1], 2), tb.mu4m2[0])
        assert torsion_coordinates(x, tb) == (0, 2, 0, 1, 0, 0)

    @pytest.mark.parametrize("N", (2, 4, 6, 8))
    @pytest.mark.parametrize("d", (3, 4, 5, 6, 7))
    def test_roundtrip_everywhere(self, N, d):
        p = LensParams(N, d)
        tb = torsion_basis(p)
        for x in torsion_elements(p):
            coeffs = torsion_coordinates(x, tb)
            acc = zero_element(p)
            for r, b in zip(coeffs[: p.c], tb.mu4):
                acc = element_add(acc, element_scale(b, r))
            for r, b in zip(coeffs[p.c :], tb.mu4m2):
                acc = element_add(acc, element_scale(b, r))
            assert acc.coords == x.coords

    def test_torsion_required(self):
        p = LensParams(4, 4)
        tb = torsion_basis(p)
        with pytest.raises(PreconditionFailed):
            torsion_coordinates(elem_sigma(p), tb)


class TestBrowderLivesay:
    def test_sigma_reads_one(self):
        s = elem_sigma(LensParams(4, 4))
        assert browder_livesay_composite(s, 2) == 1
        s8 = elem_sigma(LensParams(8, 4))
        assert browder_livesay_composite(s8, 2) == 1  # K=3 <= 2i=4

    def test_zero_reads_zero(self):
        assert browder_livesay_composite(zero_element(LensParams(4, 4)), 1) == 0

    def test_nu_normalization(self):
        nu = elem_nu(LensParams(8, 4))
        # eval(2 * (1 + x^2 + x^4 + x^6)) = 8; divisor 2^(3 + max(0, 3-4)) = 8
        assert browder_livesay_composite(nu, 2) == 1

    def test_odd_n_rejected(self):
        with pytest.raises(PreconditionFailed):
            browder_livesay_composite(zero_element(LensParams(5, 4)), 1)

    def test_cascade(self):
        p = LensParams(8, 5)
        tb = torsion_basis(p)
        x = element_scale(tb.mu4[0], 2)
        assert browder_livesay_cascade(x, tb, 1) == 2
        top = tb.mu4[1]
        with pytest.raises(PreconditionFailed):
            browder_livesay_cascade(top, tb, 1)
