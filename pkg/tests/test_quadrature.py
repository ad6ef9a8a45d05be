"""Tests for the double-precision integrals and the torus period."""
import math

import numpy as np
import pytest

from banana.exceptions import DomainError, QuadratureError
from banana.feynman import I_closed, period_u_series
from banana.mpcore import zeta_int
from banana.quadrature import (
    TORUS_PERIOD_GRID,
    QuadratureGrid,
    I_direct,
    J_sunset,
    _banana_sum,
    _sunset_sum,
    mirrored_slab_sum,
    period_u_torus,
    slab_sum,
    torus_L3_residual,
)


class TestGrid:
    def test_validation(self):
        with pytest.raises(QuadratureError):
            QuadratureGrid(4, 100)
        with pytest.raises(QuadratureError):
            QuadratureGrid(2, 4)
        with pytest.raises(QuadratureError):
            QuadratureGrid(2, 100, 'spiral')
        with pytest.raises(QuadratureError):
            QuadratureGrid(2, 100, 'exp', -1.0)

    def test_exp_weights_cover_interval(self):
        _, w = QuadratureGrid(1, 101, 'exp', 10.0).axis()
        assert w.sum() == pytest.approx(20.0)

    def test_torus_weights_average_to_one(self):
        theta, w = QuadratureGrid(1, 64, 'torus').axis()
        assert w.sum() == pytest.approx(1.0)
        assert 0 < theta[0] < theta[-1] < 2 * math.pi

    def test_coarsened_keeps_endpoints(self):
        grid = QuadratureGrid(3, 201, 'exp', 25.0).coarsened()
        assert grid.nodes == 101
        assert grid.step == pytest.approx(0.5)

    def test_slab_sum_parallel_matches_serial(self):
        slab = lambda i: 1.0 / (i + 1) ** 2
        assert slab_sum(slab, 500, workers=4) == slab_sum(slab, 500)

    @pytest.mark.parametrize('count', [7, 8])
    def test_mirrored_slab_sum(self, count):
        values = [min(i, count - 1 - i) + 0.25 for i in range(count)]
        assert mirrored_slab_sum(lambda i: values[i], count) == pytest.approx(sum(values))
        assert mirrored_slab_sum(lambda i: values[i], count, workers=3) == pytest.approx(sum(values))


class TestSymmetricSums:
    """Half-grid sums against the full tensor sum on small grids."""

    def test_banana_sum(self):
        grid = QuadratureGrid(3, 21, 'exp', 6.0)
        u, w = grid.axis()
        x = np.exp(u)
        X1, X2, X3 = np.meshgrid(x, x, x, indexing='ij')
        W = w[:, None, None] * w[None, :, None] * w[None, None, :]
        A = (1 + X1 + X2 + X3) * (1 + 1 / X1 + 1 / X2 + 1 / X3)
        full = float(np.sum(W / (A + 2.0)))
        assert _banana_sum(-2.0, grid, 1) == pytest.approx(full, rel=1e-12)

    def test_sunset_sum(self):
        grid = QuadratureGrid(2, 40, 'exp', 6.0)
        u, w = grid.axis()
        x = np.exp(u)
        X1, X2 = np.meshgrid(x, x, indexing='ij')
        A = (1 + X1 + X2) * (1 + 1 / X1 + 1 / X2)
        full = float(np.sum(w[:, None] * w[None, :] / (A - 1.0)))
        assert _sunset_sum(1.0, grid, 2) == pytest.approx(full, rel=1e-12)


class TestDomains:
    def test_banana_threshold(self, ctx):
        with pytest.raises(DomainError):
            I_direct(16, ctx)

    def test_sunset_threshold(self, ctx):
        with pytest.raises(DomainError):
            J_sunset(9, ctx)

    def test_wrong_grid_dimension(self, ctx):
        with pytest.raises(QuadratureError):
            I_direct(0, ctx, grid=QuadratureGrid(2, 101))

    def test_torus_poles(self, ctx):
        with pytest.raises(DomainError):
            period_u_torus(8, TORUS_PERIOD_GRID, ctx)


class TestTorusPeriod:
    def test_matches_moment_series(self, ctx):
        torus = period_u_torus(-32, TORUS_PERIOD_GRID, ctx).real
        assert torus.matches(period_u_series(-32, ctx), 20)

    def test_annihilated_by_operator(self, ctx):
        assert abs(torus_L3_residual(20, ctx).mid) < ctx.mp.mpf(10) ** -10


@pytest.mark.slow
class TestDirectIntegrals:
    def test_I0_is_seven_zeta3(self, ctx):
        assert I_direct(0, ctx).matches(zeta_int(3, ctx) * 7, 6)

    def test_I1(self, ctx):
        assert I_direct(1, ctx).matches(I_closed(1, ctx), 5)

    def test_sunset_doubling(self, ctx):
        assert J_sunset(8, ctx).matches(J_sunset(2, ctx) * 2, 4)
