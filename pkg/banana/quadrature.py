"""Direct quadrature of the banana and sunset integrals, and the holomorphic
period on the unit torus.

The integrals over (0,∞)^d use x = e^u and a truncated trapezoid rule in
double precision (numpy); both integrands are analytic in a strip around
the real u-axis, so the rule converges geometrically in the step. The torus
period is computed in mpmath after integrating one angle in closed form.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from .exceptions import DomainError, QuadratureError
from .mpcore import ApproxComplex, ApproxReal, PrecisionContext
from .picard_fuchs import pf_L3

logger = logging.getLogger('banana')

TRANSFORMS = ('exp', 'torus')
MIN_NODES = 8

# |difference| / |value| between a grid and its coarsening above which
# the result is rejected.
REFINEMENT_TOLERANCE = 1e-3

BANANA_THRESHOLD = 16
SUNSET_THRESHOLD = 9
TORUS_PERIOD_GRID = 64


@dataclass(frozen=True)
class QuadratureGrid:
    """Tensor grid: trapezoid on [-half_width, half_width] ('exp') or midpoints on [0, 2π) ('torus')."""

    dimension: int
    nodes: int
    transform: str = 'exp'
    half_width: float = 25.0

    def __post_init__(self):
        if self.dimension not in (1, 2, 3):
            raise QuadratureError("Grid dimension must be 1, 2 or 3", {'dimension': self.dimension})
        if self.nodes < MIN_NODES:
            raise QuadratureError(f"Grid needs at least {MIN_NODES} nodes per axis", {'nodes': self.nodes})
        if self.transform not in TRANSFORMS:
            raise QuadratureError("Unknown grid transform",
                                  {'transform': self.transform, 'known': TRANSFORMS})
        if self.transform == 'exp' and self.half_width <= 0:
            raise QuadratureError("half_width must be positive", {'half_width': self.half_width})

    @property
    def step(self) -> float:
        if self.transform == 'exp':
            return 2 * self.half_width / (self.nodes - 1)
        return 2 * math.pi / self.nodes

    def axis(self) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes and weights along one axis; torus weights average to 1."""
        if self.transform == 'exp':
            u = np.linspace(-self.half_width, self.half_width, self.nodes)
            w = np.full(self.nodes, self.step)
            w[0] = w[-1] = self.step / 2
            return u, w
        theta = 2 * np.pi * (np.arange(self.nodes) + 0.5) / self.nodes
        return theta, np.full(self.nodes, 1.0 / self.nodes)

    def coarsened(self) -> 'QuadratureGrid':
        """Every other node (odd exp grids keep both endpoints)."""
        nodes = (self.nodes + 1) // 2 if self.transform == 'exp' else self.nodes // 2
        return QuadratureGrid(self.dimension, max(nodes, MIN_NODES), self.transform, self.half_width)


BANANA_GRID = QuadratureGrid(3, 201, 'exp', 25.0)
SUNSET_GRID = QuadratureGrid(2, 601, 'exp', 30.0)


def slab_sum(slab: Callable[[int], float], count: int, workers: int = 1) -> float:
    """Σ_i slab(i) in index order; slabs may run on a thread pool (numpy releases the GIL)."""
    if workers <= 1:
        parts = [slab(i) for i in range(count)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(slab, range(count)))
    return math.fsum(parts)


def mirrored_slab_sum(slab: Callable[[int], float], count: int, workers: int = 1) -> float:
    """slab_sum for slab(i) == slab(count - 1 - i): only the first half is evaluated."""
    half = count // 2
    total = 2 * slab_sum(slab, half, workers)
    if count % 2:
        total += slab(half)
    return total


def _banana_sum(t: float, grid: QuadratureGrid, workers: int) -> float:
    """Trapezoid sum over the cube; the integrand is even under u -> -u."""
    u, w = grid.axis()
    e, ei = np.exp(u), np.exp(-u)
    e2 = e[:, None] + e[None, :]
    ei2 = ei[:, None] + ei[None, :]
    w2 = w[:, None] * w[None, :]

    def slab(i):
        A = (1 + e[i] + e2) * (1 + ei[i] + ei2)
        return float(w[i] * np.sum(w2 / (A - t)))

    return mirrored_slab_sum(slab, len(u), workers)


def _sunset_sum(t: float, grid: QuadratureGrid, workers: int) -> float:
    u, w = grid.axis()
    e, ei = np.exp(u), np.exp(-u)

    def slab(i):
        A = (1 + e[i] + e) * (1 + ei[i] + ei)
        return float(w[i] * np.sum(w / (A - t)))

    return mirrored_slab_sum(slab, len(u), workers)


def _truncation_bound(t: float, threshold: int, dimension: int, L: float) -> float:
    """Mass of the integrand outside the cube [-L, L]^d.

    Uses A >= e^(max|u|), A - t >= A (1 - t/threshold) and the shell area
    d 2^d r^(d-1) of the sup-norm sphere.
    """
    scale = threshold / (threshold - max(t, 0.0))
    if dimension == 3:
        shell = 24 * (L * L + 2 * L + 2)
    else:
        shell = 8 * (L + 1)
    return scale * shell * math.exp(-L)


def _refined(name: str, t: float, grid: QuadratureGrid, threshold: int,
             kernel: Callable[[float, QuadratureGrid, int], float],
             ctx: PrecisionContext, workers: int) -> ApproxReal:
    if t >= threshold:
        raise DomainError(f"{name} integrand is singular for t >= {threshold}", {'t': t})
    if grid.transform != 'exp':
        raise QuadratureError(f"{name} needs an exp grid", {'transform': grid.transform})
    fine = kernel(t, grid, workers)
    coarse = kernel(t, grid.coarsened(), workers)
    difference = abs(fine - coarse)
    if difference > REFINEMENT_TOLERANCE * abs(fine):
        raise QuadratureError(
            f"{name} grid refinement disagrees",
            {'t': t, 'fine': fine, 'coarse': coarse, 'nodes': grid.nodes}
        )
    radius = difference + _truncation_bound(t, threshold, grid.dimension, grid.half_width) \
        + 1e-13 * abs(fine)
    logger.debug(f"{name}({t}) = {fine!r} on {grid.nodes}^{grid.dimension} nodes, radius {radius:.2e}")
    return ctx.ball(fine, radius)


def I_direct(t, ctx: PrecisionContext, grid: QuadratureGrid = BANANA_GRID, workers: int = 1) -> ApproxReal:
    """∫_(0,∞)^3 1/((1+x1+x2+x3)(1+1/x1+1/x2+1/x3) - t) dx1dx2dx3/(x1x2x3)."""
    if grid.dimension != 3:
        raise QuadratureError("I_direct needs a 3-dimensional grid", {'dimension': grid.dimension})
    return _refined('I_direct', float(t), grid, BANANA_THRESHOLD, _banana_sum, ctx, workers)


def J_sunset(t, ctx: PrecisionContext, grid: QuadratureGrid = SUNSET_GRID, workers: int = 1) -> ApproxReal:
    """∫_(0,∞)^2 1/((1+x1+x2)(1+1/x1+1/x2) - t) dx1dx2/(x1x2)."""
    if grid.dimension != 2:
        raise QuadratureError("J_sunset needs a 2-dimensional grid", {'dimension': grid.dimension})
    return _refined('J_sunset', float(t), grid, SUNSET_THRESHOLD, _sunset_sum, ctx, workers)


# ---------------------------------------------------------------------------
# holomorphic period on the torus
# ---------------------------------------------------------------------------

def _check_torus_t(t, ctx: PrecisionContext):
    if 0 <= t <= BANANA_THRESHOLD:
        raise DomainError("The torus integrand has poles for 0 <= t <= 16",
                          {'t': ctx.mp.nstr(t, 10)})


def _torus_sums(t, gridn: int, ctx: PrecisionContext) -> List:
    """Means of d^j/dt^j (1/(|1+x1+x2+x3|² - t)), j = 0..3, over the midpoint grid.

    The x3 angle is done exactly: mean over θ of 1/(a + b cos θ) is
    sgn(a)/√(a² - b²) with a = |w|² + 1 - t, b = 2|w|, w = 1 + x1 + x2.
    """
    mp = ctx.mp
    n = gridn
    angles = [2 * mp.pi * (j + mp.mpf(1) / 2) / n for j in range(n)]
    cosines = [mp.cos(a) for a in angles]
    sums = [mp.mpf(0)] * 4
    for j1 in range(n):
        for j2 in range(n):
            # |1 + e^(iθ1) + e^(iθ2)|²
            w2 = 3 + 2 * (cosines[j1] + cosines[j2] + cosines[(j1 - j2) % n])
            x = t - (w2 + 1)
            Q = x * x - 4 * w2
            sign = 1 if x < 0 else -1
            root = mp.sqrt(Q)
            inv = 1 / root
            inv3 = inv / Q
            inv5 = inv3 / Q
            inv7 = inv5 / Q
            sums[0] += sign * inv
            sums[1] += -sign * x * inv3
            sums[2] += sign * (-inv3 + 3 * x * x * inv5)
            sums[3] += sign * (9 * x * inv5 - 15 * x ** 3 * inv7)
    return [s / (n * n) for s in sums]


def period_u_torus(t, gridn: int, ctx: PrecisionContext, derivative: int = 0) -> ApproxComplex:
    """(d/dt)^j of u(t) = mean over the 3-torus of 1/((1+x1+x2+x3)(1+1/x1+1/x2+1/x3) - t).

    The radius is the change against the half-size grid.
    """
    if derivative not in (0, 1, 2, 3):
        raise DomainError("derivative must be 0..3", {'derivative': derivative})
    if gridn < MIN_NODES:
        raise QuadratureError(f"Grid needs at least {MIN_NODES} nodes per axis", {'gridn': gridn})
    mp = ctx.mp
    t = ctx.convert(t)
    _check_torus_t(t, ctx)
    key = ('period_u_torus', t, gridn)
    fine = ctx.memo(key, lambda: _torus_sums(t, gridn, ctx))
    coarse = ctx.memo(('period_u_torus', t, gridn // 2), lambda: _torus_sums(t, gridn // 2, ctx))
    value = fine[derivative]
    radius = abs(value - coarse[derivative]) + ctx.eps * gridn * gridn * max(1, abs(value))
    return ctx.ball(mp.mpc(value), radius)


def torus_L3_residual(t, ctx: PrecisionContext, gridn: int = TORUS_PERIOD_GRID) -> ApproxReal:
    """pf_L3 applied to the torus period at t; the exact derivatives come from the same grid."""
    mp = ctx.mp
    t = ctx.convert(t)
    coefficients = pf_L3().numeric_coefficients(t, ctx)
    derivatives = [period_u_torus(t, gridn, ctx, j) for j in range(4)]
    total = mp.mpf(0)
    radius = mp.mpf(0)
    scale = mp.mpf(0)
    for c, d in zip(coefficients, derivatives):
        total += c * mp.re(d.mid)
        radius += abs(c) * d.rad
        scale = max(scale, abs(c * d.mid))
    logger.debug(f"torus L3 residual at t={mp.nstr(t, 8)}: {mp.nstr(total, 5)} (scale {mp.nstr(scale, 5)})")
    return ApproxReal(ctx, total / scale, radius / scale)
