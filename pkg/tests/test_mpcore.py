"""Tests for precision contexts, balls and special functions."""
from fractions import Fraction

import pytest

from banana.exceptions import DomainError, PrecisionError
from banana.mpcore import (
    ApproxComplex,
    ApproxReal,
    PrecisionContext,
    bessel_j0,
    complex_cot,
    complex_tan,
    cot_plus_i,
    digits_matched,
    gamma_rational,
    hurwitz_zeta_int,
    incomplete_gamma_int,
    make_context,
    zeta_int,
)


class TestPrecisionContext:
    def test_default_guard_digits(self):
        assert make_context(30).guard_digits == 10
        assert make_context(200).guard_digits == 20
        assert make_context(200).working_digits == 220

    def test_rejects_low_precision(self):
        with pytest.raises(PrecisionError):
            make_context(5)
        with pytest.raises(PrecisionError):
            PrecisionContext(30, guard_digits=3)

    def test_contexts_do_not_share_precision(self):
        low, high = make_context(20), make_context(80)
        assert low.mp.dps == 30
        assert high.mp.dps == 90

    def test_convert_fraction_exactly(self, ctx):
        third = ctx.convert(Fraction(1, 3))
        assert abs(third * 3 - 1) < ctx.eps

    def test_memo_computes_once(self, ctx):
        calls = []
        ctx.memo(('k',), lambda: calls.append(1) or 5)
        assert ctx.memo(('k',), lambda: calls.append(1) or 6) == 5
        assert len(calls) == 1


class TestBalls:
    def test_arithmetic_tracks_radius(self, ctx):
        x = ctx.ball(1) / 3
        assert isinstance(x, ApproxReal)
        assert (x * 3).matches(1, 28)
        assert x.rad > 0

    def test_complex_ball_parts(self, ctx):
        z = ctx.ball(ctx.mp.mpc(2, -5))
        assert isinstance(z, ApproxComplex)
        assert z.real.mid == 2
        assert z.imag.mid == -5
        assert not z.is_real()
        assert z.conjugate().imag.mid == 5

    def test_division_by_zero_ball(self, ctx):
        with pytest.raises(DomainError):
            ctx.ball(1) / ctx.ball(0, 1e-5)

    def test_sqrt_and_log(self, ctx):
        two = ctx.ball(2)
        assert (two.sqrt() ** 2).matches(2, 28)
        assert two.log().exp().matches(2, 28)
        with pytest.raises(DomainError):
            ctx.ball(0, ctx.eps).log()

    def test_non_integer_power_rejected(self, ctx):
        with pytest.raises(DomainError):
            ctx.ball(2) ** 0.5


class TestDigitsMatched:
    def test_identical_values_cap_at_requested(self, ctx):
        assert digits_matched(ctx.ball(ctx.mp.pi), ctx.mp.pi, ctx) == 30

    def test_relative_scale(self, ctx):
        mp = ctx.mp
        lhs = mp.mpf(10) ** 5
        rhs = lhs + mp.mpf(10) ** -7
        assert digits_matched(lhs, rhs, ctx) in (11, 12)

    def test_small_values_use_absolute_difference(self, ctx):
        assert digits_matched(ctx.mp.mpf('1e-25'), 0, ctx) in (24, 25)


class TestSpecialFunctions:
    def test_zeta_even_values(self, ctx):
        mp = ctx.mp
        assert zeta_int(2, ctx).matches(mp.pi ** 2 / 6, 28)
        assert zeta_int(4, ctx).matches(mp.pi ** 4 / 90, 28)

    def test_zeta_rejects_pole(self, ctx):
        with pytest.raises(DomainError):
            zeta_int(1, ctx)

    def test_hurwitz_half(self, ctx):
        # ζ(2, 1/2) = 3ζ(2)
        assert hurwitz_zeta_int(2, Fraction(1, 2), ctx).matches(ctx.mp.pi ** 2 / 2, 28)

    def test_gamma_rational(self, ctx):
        mp = ctx.mp
        assert gamma_rational(1, 2, ctx).matches(mp.sqrt(mp.pi), 28)
        assert gamma_rational(1, 3, ctx).matches(mp.gamma(mp.mpf(1) / 3), 28)
        assert gamma_rational(8, 15, ctx).matches(mp.gamma(mp.mpf(8) / 15), 28)
        with pytest.raises(DomainError):
            gamma_rational(-1, 2, ctx)

    def test_incomplete_gamma(self, ctx):
        mp = ctx.mp
        assert incomplete_gamma_int(1, 2, ctx).matches(mp.exp(-2), 28)
        assert incomplete_gamma_int(3, 5, ctx).matches(mp.gammainc(3, 5), 28)
        with pytest.raises(DomainError):
            incomplete_gamma_int(0, 1, ctx)

    def test_bessel_j0(self, ctx):
        assert bessel_j0(0, ctx).matches(1, 28)
        with pytest.raises(DomainError):
            bessel_j0(-1, ctx)

    def test_cot_and_tan(self, ctx):
        mp = ctx.mp
        z = mp.mpc('0.3', '0.2')
        assert complex_cot(z, ctx).matches(mp.cot(z), 27)
        assert complex_tan(z, ctx).matches(mp.tan(z), 27)
        assert complex_cot(-z, ctx).matches(mp.cot(-z), 27)

    def test_cot_plus_i_is_small_high_in_the_plane(self, ctx):
        mp = ctx.mp
        value = cot_plus_i(mp.mpc(1, 50), ctx)
        assert 0 < abs(value.mid) < mp.mpf(10) ** -40

    def test_cot_pole_rejected(self, ctx):
        with pytest.raises(DomainError):
            complex_cot(ctx.mp.pi, ctx)
