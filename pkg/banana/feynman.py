"""The banana integral I(t) through its modular parametrization.

I(t(τ)) = ϖ1(τ) (16ζ(3) + Σ_n ψ(n) n⁻³ qⁿ/(1 - qⁿ) - 4(2πiτ)³) is the
high-precision path. The closed forms at the CM points, the lattice-sum
intermediates, the σ-integral representation, the brute-force double sum
and the finite-difference check of L³I = -24 are all evaluated against it.
"""
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Dict

import numpy as np

from .eichler import (
    F3,
    PSI_BOUND,
    PSI_TABLE,
    psi,
    psi_lattice_sum,
    sigma_weight_coefficients,
)
from .exceptions import ConvergenceError, DomainError
from .lfun import modular_L, rwz_closed
from .mpcore import (
    MAX_SERIES_TERMS,
    ApproxComplex,
    ApproxReal,
    PrecisionContext,
    zeta_int,
)
from .picard_fuchs import fornberg_weights, moment_coefficient, pf_L3
from .qseries import (
    CHAIN_POINTS,
    CM_TABLE,
    as_tau,
    cm,
    cm_point,
    continue_t,
    invert_t,
    lambert_series,
    nome,
    varpi,
)

logger = logging.getLogger('banana')

CM_T_VALUES = (-32, -2, 1, 4, 16)
LATTICE_T_VALUES = (16, 4, -2, -32)
STENCIL_OFFSETS = tuple(range(-4, 5))
CONTINUATION_STEPS = 8

# Coefficient of τ² in front of the σ-integral.
SIGMA_INTEGRAL_TAU2 = -336


def _zeta3(ctx):
    return zeta_int(3, ctx)


def I_modular(tau, ctx: PrecisionContext) -> ApproxComplex:
    """I(t(τ)) = ϖ1(τ)(16ζ(3) + Σ ψ(n) n⁻³ qⁿ/(1-qⁿ) - 4(2πiτ)³)."""
    mp = ctx.mp
    tau = as_tau(tau, ctx)

    def compute():
        series = lambert_series(tau, ctx, psi, -3, PSI_BOUND)
        cube = ctx.ball((2j * mp.pi * tau) ** 3)
        return varpi(1, tau, ctx) * (_zeta3(ctx) * 16 + series - cube * 4)

    return ctx.memo(('I_modular', tau), compute)


def I_cm(t: int, ctx: PrecisionContext) -> ApproxReal:
    """I_modular at the tabulated CM point; the imaginary part must vanish within the radius."""
    if t not in CM_T_VALUES:
        raise DomainError("No CM point recorded for this t", {'t': t, 'known': CM_T_VALUES})
    value = I_modular(cm_point(t), ctx)
    if not value.is_real():
        raise ConvergenceError(
            "I_modular is not real at the CM point",
            {'t': t, 'imag': ctx.mp.nstr(ctx.mp.im(value.mid), 5), 'radius': ctx.mp.nstr(value.rad, 5)}
        )
    return value.real


def _w4(ctx: PrecisionContext) -> ApproxReal:
    return varpi(2, CHAIN_POINTS['tau4'], ctx).real


def _f3_sqrt3_combination(ctx: PrecisionContext) -> ApproxReal:
    """3F3(√-3/3) - F3(√-3)."""
    return (F3(cm(0, Fraction(1, 3), -3), ctx) * 3 - F3(cm(0, 1, -3), ctx)).real


# ϖ2(τ4) (a √3π³ + b ζ(3) + b X), X = 3F3(√-3/3) - F3(√-3)
CLOSED_COEFFS = {
    16: (Fraction(32, 135), -2),
    4: (Fraction(16, 135), -1),
    -2: (Fraction(23, 540), Fraction(7, 4)),
    -32: (Fraction(7, 540), 2),
}


def I_closed(t: int, ctx: PrecisionContext) -> ApproxReal:
    """Closed forms: I(1) = (12π/√15) L(f,2); the other four are ϖ2(τ4)-multiples."""
    mp = ctx.mp
    if t == 1:
        return rwz_closed('f15', ctx) * ctx.ball(12 * mp.pi / mp.sqrt(15))
    if t not in CLOSED_COEFFS:
        raise DomainError("No closed form recorded for this t", {'t': t, 'known': CM_T_VALUES})
    a, b = CLOSED_COEFFS[t]
    inner = (ctx.ball(mp.sqrt(3) * mp.pi ** 3) * a
             + (_zeta3(ctx) + _f3_sqrt3_combination(ctx)) * b)
    return _w4(ctx) * inner


def I_lattice(t: int, ctx: PrecisionContext) -> ApproxReal:
    """ϖ2(τ4)-expressions through ψ-weighted lattice sums over n² + bmn + am²."""
    mp = ctx.mp
    r3 = mp.sqrt(3)
    pi3 = mp.pi ** 3
    if t == 16:
        inner = ctx.ball(2 * r3 * pi3 / 9) - psi_lattice_sum(3, 3, ctx) * ctx.ball(r3 / (64 * mp.pi))
    elif t == 4:
        inner = ctx.ball(2 * r3 * pi3 / 9) - psi_lattice_sum(12, 6, ctx) * ctx.ball(r3 / (4 * mp.pi))
    elif t == -2:
        inner = ctx.ball(r3 * pi3 / 18) + psi_lattice_sum(12, 0, ctx) * ctx.ball(r3 / (8 * mp.pi))
    elif t == -32:
        inner = ctx.ball(r3 * pi3 / 18) + psi_lattice_sum(3, 0, ctx) * ctx.ball(r3 / (128 * mp.pi))
    else:
        raise DomainError("No lattice expression for this t", {'t': t, 'known': LATTICE_T_VALUES})
    return _w4(ctx) * inner


def I1_reduced(ctx: PrecisionContext) -> ApproxReal:
    """I(1) = -((2πi)³/(8√-15)) ϖ2((3+√-15)/6) = (π³/√15) ϖ2((3+√-15)/6)."""
    mp = ctx.mp
    w = varpi(2, cm(Fraction(1, 2), Fraction(1, 6), -15), ctx).real
    return w * ctx.ball(mp.pi ** 3 / mp.sqrt(15))


def I_eichler(tau, ctx: PrecisionContext) -> ApproxComplex:
    """ϖ1(τ)(-336ζ(3)τ² + ½∫(log(q̂/q))² σ(q̂) dlog q̂) by termwise integration of σ.

    The constant term -24 of σ gives -4L³ (L = 2πiτ); qⁿ gives qⁿ/n³; moving
    the lower limit to 1 adds 16ζ(3) - 84ζ(3)L²/π² from the Dirichlet series
    of σ at 3, 2, 1.
    """
    mp = ctx.mp
    tau = as_tau(tau, ctx)
    q = nome(tau, ctx)
    aq = abs(q)
    # |s_n| <= 170 * 48 * ζ(3) n³
    bound = 9810
    N = int(mp.ceil(mp.log(ctx.eps * (1 - aq) / bound) / mp.log(aq))) + 2
    if N > MAX_SERIES_TERMS:
        raise ConvergenceError("σ-integral series needs too many terms", {'terms': N})
    s = sigma_weight_coefficients(N + 1)
    series = mp.mpc(0)
    qn = mp.mpc(1)
    for n in range(1, N + 1):
        qn *= q
        series += s[n] * qn / mp.mpf(n) ** 3
    tail = bound * aq ** (N + 1) / (1 - aq)
    L = 2j * mp.pi * tau
    z3 = _zeta3(ctx).mid
    integral = -4 * L ** 3 + series + 16 * z3 - 84 * z3 * L ** 2 / mp.pi ** 2
    inner = ctx.ball(SIGMA_INTEGRAL_TAU2 * z3 * tau ** 2 + integral, tail + ctx.eps * N * abs(integral))
    return varpi(1, tau, ctx) * inner


def _naive_D(tau: complex, m_max: int, n_max: int) -> complex:
    m = np.arange(-m_max, m_max + 1, dtype=np.float64)
    m2 = m * m
    total = 0j
    for n in range(1, n_max + 1):
        inner = np.sum(1.0 / (m2 - (n * tau) ** 2))
        total += PSI_TABLE[n % 6] / (n * n) * inner
    return total


def I_modular_naive(tau, ctx: PrecisionContext, m_max: int = 2000, n_max: int = 20000) -> ApproxComplex:
    """ϖ1((τ/2πi) D(τ) - 4(2πiτ)³) with D(τ) = Σ_{m∈ℤ, n>=1} (ψ(n)/n²)/(m² - n²τ²) truncated.

    The box error is O(1/M²) (the 1/M part cancels since Σ ψ(n)/n² = 0), so
    D(M) and D(2M) are Richardson-combined.
    """
    mp = ctx.mp
    tau = as_tau(tau, ctx)
    z = complex(tau)
    coarse = _naive_D(z, m_max, n_max)
    fine = _naive_D(z, 2 * m_max, n_max)
    D = (4 * fine - coarse) / 3
    logger.debug(f"naive D: M={m_max} {coarse!r}, 2M {fine!r}, extrapolated {D!r}")
    inner = ctx.ball(tau / (2j * mp.pi) * mp.mpc(D) - 4 * (2j * mp.pi * tau) ** 3,
                     abs(tau / (2 * mp.pi)) * abs(D - fine))
    return varpi(1, tau, ctx) * inner


# ---------------------------------------------------------------------------
# differential equations
# ---------------------------------------------------------------------------

def _seed(t0, ctx: PrecisionContext):
    """A τ with t(τ) = t0 on the branch through the CM table; -2 and 2 are supported."""
    if t0 in CM_TABLE:
        return invert_t(t0, CM_TABLE[t0], ctx)
    if t0 == 2:
        return continue_t(1, CM_TABLE[1], 2, CONTINUATION_STEPS, ctx)
    raise DomainError("No seed for the τ-branch at this t", {'t': t0, 'known': [2] + sorted(CM_TABLE)})


def apply_L3_numeric(t0, ctx: PrecisionContext, step=None) -> ApproxReal:
    """pf_L3 applied to I at t0 by 9-point central differences; expected value -24.

    Samples are I_modular(τ(t0 + jh)), h = 10^(-digits/6) unless step is given.
    """
    mp = ctx.mp
    h = ctx.convert(step) if step is not None else mp.mpf(10) ** (-(ctx.decimal_digits // 6))
    tau0 = ctx.memo(('seed', t0), lambda: _seed(t0, ctx))
    samples = []
    for j in STENCIL_OFFSETS:
        tau = tau0 if j == 0 else invert_t(ctx.convert(t0) + j * h, tau0, ctx)
        samples.append(mp.re(I_modular(tau, ctx).mid))
    derivatives = [samples[STENCIL_OFFSETS.index(0)]]
    for order in (1, 2, 3):
        weights = fornberg_weights(STENCIL_OFFSETS, order)
        derivatives.append(mp.fsum(ctx.convert(w) * f for w, f in zip(weights, samples)) / h ** order)
    coefficients = pf_L3().numeric_coefficients(ctx.convert(t0), ctx)
    value = mp.fsum(c * d for c, d in zip(coefficients, derivatives))
    # stencil truncation ~ h^6, rounding ~ eps/h^3 in the third derivative
    radius = (h ** 6 + ctx.eps * 10 ** 5 / h ** 3) * max(abs(c) for c in coefficients)
    logger.debug(f"L3 I at t={t0}: {mp.nstr(value, 15)} with h={mp.nstr(h, 3)}")
    return ApproxReal(ctx, value, radius)


@lru_cache(maxsize=None)
def _moment(k: int) -> int:
    return int(moment_coefficient(k))


def period_u_series(t, ctx: PrecisionContext, derivative: int = 0) -> ApproxReal:
    """(d/dt)^j of u(t) = -Σ c_k t^(-k-1) for |t| > 16."""
    if derivative not in (0, 1, 2, 3):
        raise DomainError("derivative must be 0..3", {'derivative': derivative})
    mp = ctx.mp
    t = ctx.convert(t)
    if abs(t) <= 16:
        raise DomainError("The moment series needs |t| > 16", {'t': mp.nstr(t, 10)})
    rho = 16 / abs(t)
    j = derivative
    total = mp.mpf(0)
    for k in range(MAX_SERIES_TERMS):
        falling = 1
        for i in range(j):
            falling *= -k - 1 - i
        total -= _moment(k) * falling * t ** (-k - 1 - j)
        # c_m <= 16^m and |falling| <= (m+3)^j
        growth = rho * (mp.mpf(k + 5) / (k + 4)) ** j
        if growth < 1:
            tail = 16 ** (k + 1) * mp.mpf(k + 4) ** j * abs(t) ** (-k - 2 - j) / (1 - growth)
            if tail < ctx.eps * max(1, abs(total)):
                return ctx.ball(total, tail + ctx.eps * k * max(1, abs(total)))
    raise ConvergenceError("Moment series did not converge", {'t': mp.nstr(t, 10)})


def series_L3_residual(t, ctx: PrecisionContext) -> ApproxReal:
    """pf_L3 applied to the moment series, scaled by its largest term."""
    mp = ctx.mp
    t = ctx.convert(t)
    coefficients = pf_L3().numeric_coefficients(t, ctx)
    derivatives = [period_u_series(t, ctx, j) for j in range(4)]
    total = mp.fsum(c * d.mid for c, d in zip(coefficients, derivatives))
    radius = mp.fsum(abs(c) * d.rad for c, d in zip(coefficients, derivatives))
    scale = max(abs(c * d.mid) for c, d in zip(coefficients, derivatives))
    return ApproxReal(ctx, total / scale, radius / scale)


# ---------------------------------------------------------------------------
# beyond the threshold
# ---------------------------------------------------------------------------

def re_I64(ctx: PrecisionContext) -> ApproxReal:
    """Re I_modular((-3+√-15)/6), where t = 64."""
    return I_modular(CM_TABLE[64], ctx).real


def re_I64_closed(ctx: PrecisionContext) -> ApproxReal:
    """(L(f,2)/(8π²))(43√15π³/15 - 45ζ(3) - 45(3F3(√-15/3) - F3(√-15)))."""
    mp = ctx.mp
    combination = (F3(cm(0, Fraction(1, 3), -15), ctx) * 3 - F3(cm(0, 1, -15), ctx)).real
    inner = ctx.ball(43 * mp.sqrt(15) * mp.pi ** 3 / 15) - (_zeta3(ctx) + combination) * 45
    return modular_L('f15', 2, ctx) / ctx.ball(8 * mp.pi ** 2) * inner


def re_I64_defect(ctx: PrecisionContext) -> ApproxReal:
    return re_I64(ctx) - re_I64_closed(ctx)


def cm_values(ctx: PrecisionContext) -> Dict[int, ApproxReal]:
    return {t: I_cm(t, ctx) for t in CM_T_VALUES}
