"""Mahler measures of the banana family P_t, the sunset family S_t and the
linear form 1 + x1 + x2 + x3 + x4.

m(t(τ)) is obtained by integrating σ(q) dlog q termwise; the direct
quadratures apply Jensen's formula in the last variable and average the
result over a midpoint grid on the remaining torus.
"""
import logging
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

from .eichler import PSI_BOUND, psi
from .exceptions import ConvergenceError, DomainError, QuadratureError
from .lfun import dirichlet_L, modular_L
from .mpcore import MAX_SERIES_TERMS, ApproxReal, PrecisionContext, make_context
from .qseries import as_tau, cm_point, nome
from .quadrature import QuadratureGrid, slab_sum

logger = logging.getLogger('banana')

MAHLER_CM_POINTS = (16, 4, -2, -32, 1)

MAHLER_FORMULAS: Dict[int, str] = {
    16: "m(16) = (48√3/π³) L(g,3)",
    4: "m(4) = (12√3/π³) L(g,3)",
    -32: "m(-32) = (48√3/π³) L(g,3) + (4/π) L(χ-4,2)",
    -2: "m(-2) = (21√3/π³) L(g,3) + (2/π) L(χ-4,2)",
    1: "m(1) = (6√3/(5π)) L(χ-3,2)",
}

# m(S_t) as a multiple of m(S_8) = (21/π²) L(e,2)
SUNSET_RATIOS = {8: Fraction(1), 2: Fraction(1, 6), -7: Fraction(5, 3)}

FAMILIES = ('P3', 'S2')
DIRECT_GRIDS = {
    'P3': QuadratureGrid(2, 1200, 'torus'),
    'S2': QuadratureGrid(1, 4000, 'torus'),
}
LINEAR5_GRID = QuadratureGrid(3, 200, 'torus')

LINEAR5_DIGITS = 30
LINEAR5_SPLIT_PERIODS = 32


def mahler_q(tau, ctx: PrecisionContext) -> ApproxReal:
    """m(t(τ)) = Re(-2πiτ + (1/24) Σ_d (ψ(d)/d) x(1+x)/(1-x)³), x = q^d.

    The d-sum is Σ_n s_n q^n/n with s_n = Σ_{d|n} ψ(d)(n/d)³ regrouped by d.
    """
    mp = ctx.mp
    tau = as_tau(tau, ctx)
    q = nome(tau, ctx)
    aq = abs(q)
    if aq >= 1:
        raise DomainError("mahler_q needs |q| < 1", {'tau': mp.nstr(tau, 15)})

    def compute():
        total = mp.mpc(0)
        x = mp.mpc(1)
        for d in range(1, MAX_SERIES_TERMS):
            x *= q
            total += mp.mpf(psi(d)) / d * x * (1 + x) / (1 - x) ** 3
            tail = 2 * PSI_BOUND * aq ** (d + 1) / ((d + 1) * (1 - aq) ** 4)
            if tail < ctx.eps:
                logger.debug(f"mahler_q converged after {d} terms")
                value = mp.re(-2j * mp.pi * tau + total / 24)
                return ctx.ball(value, tail + ctx.eps * d * max(1, abs(value)))
        raise ConvergenceError("Mahler q-series did not converge", {'tau': mp.nstr(tau, 15)})

    return ctx.memo(('mahler_q', tau), compute)


def mahler_cm(t: int, ctx: PrecisionContext) -> ApproxReal:
    """mahler_q at the tabulated CM point with t(τ) = t."""
    if t not in MAHLER_CM_POINTS:
        raise DomainError("No Mahler formula for this t", {'t': t, 'known': MAHLER_CM_POINTS})
    return mahler_q(cm_point(t), ctx)


def mahler_closed(t: int, ctx: PrecisionContext) -> ApproxReal:
    """Right-hand sides of MAHLER_FORMULAS."""
    mp = ctx.mp
    r3 = ctx.ball(mp.sqrt(3))
    pi = ctx.ball(mp.pi)
    if t == 1:
        return r3 * 6 / (pi * 5) * dirichlet_L(-3, 2, ctx)
    if t not in MAHLER_FORMULAS:
        raise DomainError("No Mahler formula for this t", {'t': t, 'known': sorted(MAHLER_FORMULAS)})
    lg = modular_L('g12', 3, ctx) * r3 / pi ** 3
    l4 = dirichlet_L(-4, 2, ctx) / pi
    if t == 16:
        return lg * 48
    if t == 4:
        return lg * 12
    if t == -32:
        return lg * 48 + l4 * 4
    return lg * 21 + l4 * 2


def mahler_sunset_closed(t: int, ctx: PrecisionContext) -> ApproxReal:
    """m(S_t) for t in {8, 2, -7} from (21/π²) L(e,2)."""
    if t not in SUNSET_RATIOS:
        raise DomainError("No sunset Mahler formula for this t", {'t': t, 'known': sorted(SUNSET_RATIOS)})
    base = modular_L('e14', 2, ctx) * 21 / ctx.ball(ctx.mp.pi ** 2)
    return base * SUNSET_RATIOS[t]


# ---------------------------------------------------------------------------
# direct quadrature
# ---------------------------------------------------------------------------

def _jensen_quadratic(A, B, C):
    """∫ log|A z² + B z + C| over |z| = 1 for arrays of complex coefficients.

    log|A| + Σ log⁺|root| written as max(log|A|, log|q|) + max(0, log|C| - log|q|)
    with q = -(B + s√(B² - 4AC))/2 the larger-modulus choice, so A may vanish.
    """
    root = np.sqrt(B * B - 4 * A * C)
    plus = B + root
    minus = B - root
    big = np.where(np.abs(plus) >= np.abs(minus), plus, minus)
    log_q = np.log(np.abs(big) / 2)
    with np.errstate(divide='ignore'):
        log_a = np.log(np.abs(A))
        log_c = np.log(np.abs(C))
    return np.maximum(log_a, log_q) + np.maximum(0.0, log_c - log_q)


def _banana_measure(t: float, grid: QuadratureGrid, workers: int) -> float:
    theta, w = grid.axis()
    x = np.exp(1j * theta)

    def slab(i):
        x1 = x[i]
        a = 1 + x1 + x
        b = x1 * x
        c = x1 + x
        lead = b + c
        values = _jensen_quadratic(lead, a * lead + b - t * b, a * b)
        return float(w[i] * np.sum(w * values))

    return slab_sum(slab, len(theta), workers)


def _sunset_measure(t: float, grid: QuadratureGrid, workers: int) -> float:
    theta, w = grid.axis()
    x = np.exp(1j * theta)
    values = _jensen_quadratic(1 + x, (1 + x) ** 2 + x - t * x, x * (1 + x))
    return float(np.sum(w * values))


def mahler_direct(family: str, t, ctx: PrecisionContext, grid: Optional[QuadratureGrid] = None,
                  workers: int = 1) -> ApproxReal:
    """m(P_t) (family 'P3') or m(S_t) (family 'S2') by torus quadrature in double precision."""
    if family not in FAMILIES:
        raise DomainError("Unknown Mahler family", {'family': family, 'known': FAMILIES})
    grid = grid or DIRECT_GRIDS[family]
    expected = 2 if family == 'P3' else 1
    if grid.dimension != expected or grid.transform != 'torus':
        raise QuadratureError(f"{family} needs a {expected}-dimensional torus grid",
                              {'dimension': grid.dimension, 'transform': grid.transform})
    kernel = _banana_measure if family == 'P3' else _sunset_measure
    t = float(t)
    fine = kernel(t, grid, workers)
    coarse = kernel(t, grid.coarsened(), workers)
    logger.debug(f"m({family}, t={t}) = {fine!r}, coarse {coarse!r}")
    return ctx.ball(fine, abs(fine - coarse) + 1e-13)


def mahler_linear5_direct(ctx: PrecisionContext, grid: QuadratureGrid = LINEAR5_GRID,
                          workers: int = 1) -> ApproxReal:
    """m(1+x1+x2+x3+x4) as the torus mean of log⁺|1+x1+x2+x3|."""
    if grid.dimension != 3 or grid.transform != 'torus':
        raise QuadratureError("linear form needs a 3-dimensional torus grid",
                              {'dimension': grid.dimension, 'transform': grid.transform})

    def kernel(g: QuadratureGrid) -> float:
        theta, w = g.axis()
        x = np.exp(1j * theta)
        inner = 1 + x[:, None] + x[None, :]
        w2 = w[:, None] * w[None, :]

        def slab(i):
            values = np.log(np.maximum(1.0, np.abs(inner + x[i])))
            return float(w[i] * np.sum(w2 * values))

        return slab_sum(slab, len(theta), workers)

    fine = kernel(grid)
    coarse = kernel(grid.coarsened())
    return ctx.ball(fine, abs(fine - coarse) + 1e-13)


# ---------------------------------------------------------------------------
# m(1 + x1 + x2 + x3 + x4) through Bessel functions
# ---------------------------------------------------------------------------

def _linear5_bessel(split_periods: int):
    """log 2 + ∫_0^∞ (e^(-u) - J0(u)^5) du/u at LINEAR5_DIGITS digits."""
    local = make_context(LINEAR5_DIGITS)
    mp = local.mp
    U0 = 2 * mp.pi * split_periods
    f = lambda u: (mp.exp(-u) - mp.besselj(0, u) ** 5) / u
    breakpoints = [k * mp.pi for k in range(2 * split_periods + 1)]
    head = mp.quad(f, breakpoints)
    oscillating = mp.quadosc(lambda u: mp.besselj(0, u) ** 5 / u, [U0, mp.inf], period=2 * mp.pi)
    return mp.log(2) + head + mp.e1(U0) - oscillating


def mahler_linear5(ctx: PrecisionContext, tail_halved: bool = False) -> ApproxReal:
    """m(1+x1+x2+x3+x4); with tail_halved the oscillatory tail starts at half the split."""
    periods = LINEAR5_SPLIT_PERIODS // 2 if tail_halved else LINEAR5_SPLIT_PERIODS

    def compute():
        try:
            value = _linear5_bessel(periods)
        except (ZeroDivisionError, ValueError) as e:
            raise ConvergenceError(f"Bessel integral failed: {e}", {'split_periods': periods})
        digits = min(ctx.decimal_digits, LINEAR5_DIGITS - 5)
        return ctx.ball(ctx.convert(value), ctx.mp.mpf(10) ** (-digits))

    return ctx.memo(('mahler_linear5', periods), compute)


def linear5_conjectured(ctx: PrecisionContext) -> ApproxReal:
    """6 (√15/(2π))^5 L(f,4)."""
    mp = ctx.mp
    return modular_L('f15', 4, ctx) * ctx.ball(6 * (mp.sqrt(15) / (2 * mp.pi)) ** 5)


def linear5_pair(ctx: PrecisionContext) -> Tuple[ApproxReal, ApproxReal]:
    return mahler_linear5(ctx), linear5_conjectured(ctx)
