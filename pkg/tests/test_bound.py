import math

import pytest

from ksblowup.bound import (bound_curve, corollary_bound, g_of_phi, lower_bound_integral,
                            single_term_integral)
from ksblowup.constants import BoundConstants
from ksblowup.errors import DivergentIntegralError, InvalidToleranceError, OutOfDomainError
from ksblowup.exponents import derive_exponents


def _cfg(f_r=2.0, f_1=3.0, eta=1.5, r=1.0):
    base = derive_exponents(4, 4, 3, 1, 2)
    return base.__class__(**{**base.__dict__, "f_r": f_r, "f_1": f_1, "eta": eta, "r": r})


def _bc(A=0.0, B=0.0, C=0.0, D=0.0):
    return BoundConstants(A=A, B=B, C=C, D=D)


class TestG:
    def test_single_term(self):
        assert g_of_phi(3.0, _bc(A=1), _cfg(f_r=2)) == pytest.approx(9.0)

    def test_constant_only(self):
        assert g_of_phi(0.0, _bc(D=5), _cfg()) == 5.0

    def test_worked_sum_of_coefficients(self, worked_bc, worked_cfg):
        assert g_of_phi(1.0, worked_bc, worked_cfg) == pytest.approx(67_111_712, rel=1e-12)


class TestQuadrature:
    def test_inverse_square(self):
        assert abs(lower_bound_integral(1.0, _bc(A=1), _cfg(f_r=2)).t_lower - 1.0) <= 1e-8

    def test_inverse_cube(self):
        assert abs(lower_bound_integral(1.0, _bc(A=1), _cfg(f_r=3)).t_lower - 0.5) <= 1e-8

    def test_arctan(self):
        t = lower_bound_integral(0.0, _bc(A=1, D=1), _cfg(f_r=2)).t_lower
        assert abs(t - math.pi / 2) <= 1e-8

    @pytest.mark.parametrize("phi0,coef,expo", [(0.3, 2.0, 1.5), (4.0, 2560.0, 3.0),
                                                (1e-3, 1e-2, 2.2), (50.0, 7.0, 1.05)])
    def test_single_term_closed_form(self, phi0, coef, expo):
        t = lower_bound_integral(phi0, _bc(A=coef), _cfg(f_r=expo)).t_lower
        assert t == pytest.approx(single_term_integral(phi0, coef, expo), rel=1e-8)

    def test_worked_value(self, worked_bc, worked_cfg):
        t = lower_bound_integral(4.0, worked_bc, worked_cfg).t_lower
        assert t == pytest.approx(4.6564338e-10, rel=1e-6)

    def test_divergent(self):
        with pytest.raises(DivergentIntegralError):
            lower_bound_integral(1.0, _bc(C=1), _cfg(eta=1.0, f_r=0.9, f_1=0.9))
        with pytest.raises(DivergentIntegralError):
            lower_bound_integral(0.0, _bc(A=1), _cfg())

    def test_invalid_tolerance(self):
        with pytest.raises(InvalidToleranceError):
            lower_bound_integral(1.0, _bc(A=1), _cfg(), tol=0.0)

    def test_curve_decreasing_in_phi0(self, worked_bc, worked_cfg):
        curve = bound_curve([0.1, 0.5, 1.0, 4.0, 10.0], worked_bc, worked_cfg)
        assert all(b < a for a, b in zip(curve, curve[1:]))


class TestCorollary:
    def test_hand_value(self):
        rep = corollary_bound(0.5, _bc(A=1, B=1, C=1), _cfg(f_r=3, f_1=3))
        assert rep.t_lower == pytest.approx(0.25 / (0.25 + 0.25 + math.sqrt(0.5)), rel=1e-12)

    def test_constant_only(self):
        rep = corollary_bound(0.4, _bc(D=1), _cfg(f_r=3))
        assert rep.t_lower == pytest.approx(0.4 / 2)

    def test_below_quadrature(self, worked_bc, worked_cfg):
        for phi0 in (0.01, 0.2, 0.9):
            cor = corollary_bound(phi0, worked_bc, worked_cfg).t_lower
            assert cor <= lower_bound_integral(phi0, worked_bc, worked_cfg).t_lower

    @pytest.mark.parametrize("phi0", [0.0, 1.0, 2.0])
    def test_out_of_domain(self, phi0):
        with pytest.raises(OutOfDomainError):
            corollary_bound(phi0, _bc(A=1), _cfg())
