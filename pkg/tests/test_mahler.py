"""Tests for the Mahler measures of the banana and sunset families."""
import numpy as np
import pytest

from banana.exceptions import DomainError, QuadratureError
from banana.mahler import (
    MAHLER_CM_POINTS,
    SUNSET_RATIOS,
    _jensen_quadratic,
    linear5_pair,
    mahler_closed,
    mahler_cm,
    mahler_direct,
    mahler_linear5,
    mahler_sunset_closed,
)
from banana.quadrature import QuadratureGrid


class TestJensen:
    def test_roots_outside(self):
        value = _jensen_quadratic(np.array([1 + 0j]), np.array([0j]), np.array([-4 + 0j]))
        assert value[0] == pytest.approx(np.log(4))

    def test_roots_inside(self):
        value = _jensen_quadratic(np.array([1 + 0j]), np.array([0j]), np.array([-0.25 + 0j]))
        assert value[0] == pytest.approx(0.0, abs=1e-15)


class TestCMMeasures:
    @pytest.mark.parametrize('t', MAHLER_CM_POINTS)
    def test_closed_forms(self, ctx, t):
        assert mahler_cm(t, ctx).matches(mahler_closed(t, ctx), 20)

    def test_m16_is_four_m4(self, ctx):
        assert mahler_cm(16, ctx).matches(mahler_cm(4, ctx) * 4, 20)

    def test_bertin_relation(self, ctx):
        expected = (mahler_cm(-32, ctx) - mahler_cm(-2, ctx) * 2) * 2
        assert mahler_cm(4, ctx).matches(expected, 20)

    def test_unknown_point(self, ctx):
        with pytest.raises(DomainError):
            mahler_cm(7, ctx)
        with pytest.raises(DomainError):
            mahler_closed(7, ctx)

    def test_sunset_ratios(self, ctx):
        base = mahler_sunset_closed(8, ctx)
        for t, ratio in SUNSET_RATIOS.items():
            assert mahler_sunset_closed(t, ctx).matches(base * ratio, 25), t
        with pytest.raises(DomainError):
            mahler_sunset_closed(3, ctx)


class TestDirect:
    def test_unknown_family(self, ctx):
        with pytest.raises(DomainError):
            mahler_direct('P4', 16, ctx)

    def test_grid_dimension_checked(self, ctx):
        with pytest.raises(QuadratureError):
            mahler_direct('S2', 8, ctx, grid=QuadratureGrid(2, 64, 'torus'))

    @pytest.mark.slow
    def test_banana_family(self, ctx):
        assert mahler_direct('P3', 16, ctx).matches(mahler_cm(16, ctx), 4)

    @pytest.mark.slow
    @pytest.mark.parametrize('t', sorted(SUNSET_RATIOS))
    def test_sunset_family(self, ctx, t):
        assert mahler_direct('S2', t, ctx).matches(mahler_sunset_closed(t, ctx), 4)

    @pytest.mark.slow
    def test_linear_form(self, ctx):
        measure, conjectured = linear5_pair(ctx)
        assert measure.matches(conjectured, 6)
        assert mahler_linear5(ctx, tail_halved=True).matches(measure, 8)
