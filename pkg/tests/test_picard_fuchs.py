"""Tests for the Picard-Fuchs operators and exact helpers."""
from fractions import Fraction

import pytest
import sympy as sp

from banana.exceptions import DomainError, OperatorOrderError
from banana.picard_fuchs import (
    DiffOperator,
    fornberg_weights,
    moment_coefficient,
    monicize,
    pf_L2,
    pf_L2a,
    pf_L3,
    pf_L3_annihilates_moments,
    r,
    r_of_t,
    r_relation_defect,
    symmetric_square,
    t,
)


class TestOperators:
    def test_orders(self):
        assert pf_L3().order == 3
        assert pf_L2().order == 2
        assert pf_L2a().order == 2
        assert pf_L2a().var == r

    def test_leading_coefficient(self):
        assert pf_L2().coefficients_at(1)[-1] == 45

    def test_third_order_is_symmetric_square(self):
        assert monicize(pf_L3()) == symmetric_square(pf_L2())

    def test_symmetric_square_needs_order_two(self):
        with pytest.raises(OperatorOrderError):
            symmetric_square(pf_L3())

    def test_zero_operator_rejected(self):
        with pytest.raises(OperatorOrderError):
            DiffOperator([0, 0])

    def test_trailing_zeros_dropped(self):
        assert DiffOperator([1, t, 0]).order == 1

    def test_apply(self):
        op = DiffOperator([0, t])
        assert op.apply(t ** 3) == 3 * t ** 3

    def test_numeric_coefficients(self, ctx):
        values = pf_L2().numeric_coefficients(ctx.mp.mpf(1), ctx)
        assert values[-1] == 45
        assert abs(values[0] + ctx.mp.mpf(7) / 4) < ctx.eps


class TestHauptmodulRelation:
    def test_r_at_singular_points(self):
        assert r_of_t(4) == sp.Rational(1, 3)
        assert r_of_t(16) == sp.Rational(-1, 3)

    def test_relation_is_exact(self):
        assert r_relation_defect() == 0


class TestMoments:
    def test_first_moments(self):
        assert [moment_coefficient(k) for k in range(4)] == [1, 4, 28, 256]

    def test_negative_index(self):
        with pytest.raises(DomainError):
            moment_coefficient(-1)

    def test_annihilated(self):
        assert pf_L3_annihilates_moments(30) == []


class TestFornberg:
    def test_central_second_difference(self):
        assert fornberg_weights([-1, 0, 1], 2) == [1, -2, 1]

    def test_central_first_difference(self):
        assert fornberg_weights([-1, 0, 1], 1) == [Fraction(-1, 2), 0, Fraction(1, 2)]

    def test_weights_sum_to_zero(self):
        assert sum(fornberg_weights(list(range(-4, 5)), 3)) == 0

    def test_stencil_too_small(self):
        with pytest.raises(DomainError):
            fornberg_weights([0, 1], 2)
