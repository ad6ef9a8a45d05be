"""Tests for q-expansions, eta quotients and the hauptmodul."""
from fractions import Fraction

import pytest

from banana.exceptions import DomainError
from banana.qseries import (
    CHAIN_POINTS,
    CM_TABLE,
    G12_SPEC,
    T_SPEC,
    VARPI1_SPEC,
    BQF,
    EtaQuotientSpec,
    QExpansion,
    WeberKind,
    as_tau,
    cm_point,
    divisor_power_table,
    e4_halfshift_combination,
    eisenstein_eval,
    eisenstein_qexp,
    eta,
    eta_cm_evaluations,
    eta_quotient_eval,
    eta_quotient_qexp,
    f15_constructions,
    fricke_eta_defect,
    hauptmodul_t,
    hecke_multiplicativity_defects,
    invert_t,
    newform_qexp,
    theta_bqf_qexp,
    varpi2_chain,
    varpi2_closed_forms,
    varpi2_weber,
    varpi,
    varpi_fricke_defect,
    weber,
)


class TestQExpansion:
    def test_coefficient_lookup(self):
        f = QExpansion(1, [1, 0, -3])
        assert f.coefficient(1) == 1
        assert f.coefficient(3) == -3
        assert f.coefficient(0) == 0
        assert f.end == 4
        with pytest.raises(DomainError):
            f.coefficient(4)

    def test_power_and_inverse(self):
        f = QExpansion(0, [1, -1, 0, 0, 0])
        inverse = f ** -1
        assert inverse.coeffs == (1, 1, 1, 1, 1)
        assert (f * inverse).coeffs == (1, 0, 0, 0, 0)

    def test_half_shift_flips_odd_exponents(self):
        f = QExpansion(0, [1, 2, 3, 4])
        assert f.half_shift().coeffs == (1, -2, 3, -4)

    def test_theta_of_sum_of_two_squares(self):
        # r_2(n) for n = 0..5
        assert theta_bqf_qexp(BQF(1, 0, 1), 6).coeffs == (1, 4, 4, 0, 4, 8)

    def test_indefinite_form_rejected(self):
        with pytest.raises(DomainError):
            BQF(1, 3, 1)


class TestEtaQuotients:
    def test_g12_leading_coefficients(self):
        g = eta_quotient_qexp(G12_SPEC, 12)
        assert g.leading == 1
        assert [g.coefficient(n) for n in range(1, 10)] == [1, 0, -3, 0, 0, 0, 2, 0, 9]

    def test_spec_properties(self):
        assert T_SPEC.weight == 0
        assert T_SPEC.leading_exponent == -1
        assert VARPI1_SPEC.weight == 1
        assert VARPI1_SPEC.leading_exponent == 1

    def test_spec_validation(self):
        with pytest.raises(DomainError):
            EtaQuotientSpec(((2, 1), (1, 1)))
        with pytest.raises(DomainError):
            EtaQuotientSpec(((1, 0),))

    def test_eval_times_inverse_is_one(self, ctx):
        tau = ctx.mpc(Fraction(1, 5), Fraction(3, 4))
        product = eta_quotient_eval(VARPI1_SPEC, tau, ctx) * eta_quotient_eval(VARPI1_SPEC.inverse(), tau, ctx)
        assert product.matches(1, 27)

    def test_eval_agrees_with_expansion(self, ctx):
        tau = ctx.mpc(Fraction(1, 7), 1)
        series = eta_quotient_qexp(G12_SPEC, 80).evaluate(tau, ctx)
        assert eta_quotient_eval(G12_SPEC, tau, ctx).matches(series, 27)

    def test_eta_at_i(self, ctx):
        mp = ctx.mp
        expected = mp.gamma(mp.mpf(1) / 4) / (2 * mp.pi ** (mp.mpf(3) / 4))
        assert eta(1j, ctx).matches(expected, 28)

    def test_upper_half_plane_required(self, ctx):
        with pytest.raises(DomainError):
            as_tau(ctx.mpc(0, -1), ctx)


class TestEisenstein:
    def test_e4_coefficients(self):
        assert eisenstein_qexp(4, 5).coeffs == (1, 240, 2160, 6720, 17520)

    def test_divisor_table(self):
        assert divisor_power_table(3, 10)[6] == 252

    def test_odd_weight_rejected(self):
        with pytest.raises(DomainError):
            eisenstein_qexp(3, 5)

    def test_e4_halfshift_identity(self):
        assert e4_halfshift_combination(200).is_zero()

    def test_e4_modular_at_i(self, ctx):
        # E4(-1/τ) = τ^4 E4(τ) at τ = 1.1i
        tau = ctx.mpc(0, Fraction(11, 10))
        assert eisenstein_eval(4, -1 / tau, ctx).matches(eisenstein_eval(4, tau, ctx) * ctx.ball(tau ** 4), 26)


class TestNewforms:
    def test_f15_constructions_agree(self):
        theta, cubes = f15_constructions(300)
        assert theta.first_mismatch(cubes) is None

    def test_f15_start(self):
        f = newform_qexp('f15', 10)
        assert f.coefficient(1) == 1
        assert f.coefficient(2) == 1

    def test_e14_is_multiplicative(self):
        e = newform_qexp('e14', 200)
        assert hecke_multiplicativity_defects(e) == []
        assert e.coefficient(1) == 1

    def test_unknown_newform(self):
        with pytest.raises(DomainError):
            newform_qexp('h99', 10)


class TestHauptmodul:
    @pytest.mark.parametrize('t', sorted(CM_TABLE))
    def test_t_at_cm_points(self, ctx, t):
        assert hauptmodul_t(cm_point(t), ctx).matches(t, 20)

    def test_invert_t_recovers_cm_point(self, ctx):
        seed = ctx.mpc(Fraction(1, 100), Fraction(29, 100))
        tau = invert_t(-2, seed, ctx)
        assert hauptmodul_t(tau, ctx).matches(-2, 20)
        assert abs(tau - CM_TABLE[-2].tau(ctx)) < ctx.mp.mpf(10) ** -20

    def test_unknown_cm_point(self):
        with pytest.raises(DomainError):
            cm_point(5)

    def test_varpi_weber_form(self, ctx):
        tau = CHAIN_POINTS['tau4']
        assert varpi2_weber(tau, ctx).matches(varpi(2, tau, ctx), 25)

    def test_varpi_index(self, ctx):
        with pytest.raises(DomainError):
            varpi(3, 1j, ctx)


class TestFricke:
    def test_eta_fricke(self, ctx):
        tau = ctx.mpc(Fraction(1, 10), Fraction(2, 5))
        assert abs(fricke_eta_defect(2, 6, tau, ctx).mid) < ctx.mp.mpf(10) ** -25
        with pytest.raises(DomainError):
            fricke_eta_defect(4, 6, tau, ctx)

    def test_varpi_fricke(self, ctx):
        defect = varpi_fricke_defect(cm_point(1), ctx)
        assert abs(defect.mid) < ctx.mp.mpf(10) ** -25


class TestCMEvaluations:
    def test_eta_and_weber_closed_forms(self, ctx):
        for key, (lhs, rhs) in eta_cm_evaluations(ctx).items():
            assert lhs.matches(rhs, 20), key

    def test_f0_value(self, ctx):
        tau = ctx.mpc(0, ctx.mp.sqrt(3) / 3)
        assert weber(WeberKind.F0, tau, ctx).matches(ctx.mp.cbrt(2), 25)

    def test_varpi2_closed_forms(self, ctx):
        for key, (lhs, rhs) in varpi2_closed_forms(ctx).items():
            assert lhs.matches(rhs, 20), key

    def test_varpi2_chain(self, ctx):
        chain = varpi2_chain(ctx)
        for key in ('tau1', 'tau2', 'tau3'):
            assert chain[key].matches(chain['tau4'], 20), key
