"""Grosswald's function F_s, its transformation laws, cotangent Dirichlet
series, and the lattice sums built from the period-6 weight ψ.

Every n-sum over ℤ of a reciprocal quadratic is collapsed to cotangents;
what remains in m is either exponentially convergent or an explicit
ζ(3)/ζ(4) combination.
"""
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
from sympy import divisors

from .exceptions import ConvergenceError, DomainError, QuadratureError
from .mpcore import (
    MAX_SERIES_TERMS,
    ApproxComplex,
    ApproxReal,
    PrecisionContext,
    bernoulli,
    cot_plus_i,
    tan_minus_i,
    zeta_int,
)
from .qseries import (
    QExpansion,
    as_tau,
    divisor_power_table,
    eisenstein_qexp,
    lambert_series,
    nome,
)

logger = logging.getLogger('banana')

# ψ(n) depends on n mod 6.
PSI_TABLE = (-5760, -48, 720, 384, 720, -48)
PSI_BOUND = 5760


def psi(n: int) -> int:
    return PSI_TABLE[n % 6]


def sigma_power(t: int, n: int):
    """σ_t(n) = Σ_{d|n} d^t, exact for any integer t."""
    if n < 1:
        raise DomainError("sigma_power requires n >= 1", {'n': n})
    total = sum(Fraction(d) ** t for d in divisors(n))
    return int(total) if total.denominator == 1 else total


def _check_odd(s: int):
    if s < 3 or s % 2 == 0:
        raise DomainError("s must be odd and >= 3", {'s': s})


def grosswald_F(s: int, tau, ctx: PrecisionContext) -> ApproxComplex:
    """F_s(τ) = Σ σ_{-s}(n) q^n = Σ n^{-s} q^n/(1 - q^n)."""
    _check_odd(s)
    tau = as_tau(tau, ctx)
    return ctx.memo(('F', s, tau), lambda: lambert_series(tau, ctx, lambda n: 1, -s, 1))


def F3(tau, ctx: PrecisionContext) -> ApproxComplex:
    return grosswald_F(3, tau, ctx)


def eichler_prefactor(s: int, ctx: PrecisionContext):
    """(2πi)^s B_{s+1} / (2 (s+1) (s-1)!)."""
    mp = ctx.mp
    b = ctx.convert(bernoulli(s + 1))
    return (2j * mp.pi) ** s * b / (2 * (s + 1) * mp.factorial(s - 1))


def grosswald_F_integral(tau, ctx: PrecisionContext, s: int = 3) -> ApproxComplex:
    """F_s as the Eichler integral of E_{s+1}, integrated along z = τ + iy."""
    _check_odd(s)
    mp = ctx.mp
    tau = as_tau(tau, ctx)
    k = s + 1
    factor = ctx.convert(Fraction(-2 * k) / bernoulli(k))

    def integrand(y):
        if y == 0:
            return mp.mpc(0)
        series = lambert_series(tau + 1j * y, ctx, lambda n: 1, s, 1).mid
        return factor * series * (1j * y) ** (s - 1) * 1j

    try:
        value, error = mp.quad(integrand, [0, 1, mp.inf], error=True)
    except (ZeroDivisionError, ValueError) as e:
        raise QuadratureError(f"Eichler integral failed: {e}", {'tau': mp.nstr(tau, 15)})
    result = eichler_prefactor(s, ctx) * value
    return ctx.ball(mp.mpc(result), abs(eichler_prefactor(s, ctx)) * error + ctx.eps * abs(result))


# Σ_j B_2j B_{4-2j} / ((2j)! (4-2j)!) τ^{2j}
INVERSION_COEFFS = (Fraction(-1, 720), Fraction(1, 144), Fraction(-1, 720))


def inversion_defect(tau, ctx: PrecisionContext) -> ApproxComplex:
    """F3(τ) - τ²F3(-1/τ) - ζ(3)(τ²-1)/2 - ((2πi)³/(2τ)) Σ_j c_j τ^{2j}."""
    mp = ctx.mp
    tau = as_tau(tau, ctx)
    tau2 = tau * tau
    z3 = zeta_int(3, ctx)
    poly = sum(ctx.convert(c) * tau2 ** j for j, c in enumerate(INVERSION_COEFFS))
    correction = ctx.ball((2j * mp.pi) ** 3 / (2 * tau) * poly)
    return (F3(tau, ctx) - F3(-1 / tau, ctx) * ctx.ball(tau2)
            - z3 * ctx.ball((tau2 - 1) / 2) - correction)


def halfshift_defect(tau, ctx: PrecisionContext) -> ApproxComplex:
    """F3(τ+1/2) + F3(τ) - (9/4)F3(2τ) + (1/4)F3(4τ)."""
    tau = as_tau(tau, ctx)
    return (F3(tau + ctx.mp.mpf(1) / 2, ctx) + F3(tau, ctx)
            - F3(2 * tau, ctx) * Fraction(9, 4) + F3(4 * tau, ctx) * Fraction(1, 4))


def _pi3(ctx: PrecisionContext) -> ApproxReal:
    return ctx.ball(ctx.mp.pi ** 3)


def _point(ctx: PrecisionContext, re, im_over_sqrt: Fraction, d: int):
    """re + im_over_sqrt * sqrt(-d) i."""
    mp = ctx.mp
    return mp.mpc(ctx.convert(Fraction(re)), ctx.convert(im_over_sqrt) * mp.sqrt(d))


def f3_closed_forms(ctx: PrecisionContext) -> Dict[str, Tuple[ApproxComplex, ApproxComplex]]:
    """The four F3 evaluations at √-3 and √-15 points as (lhs, rhs) pairs."""
    mp = ctx.mp
    z3 = zeta_int(3, ctx)
    pi3 = _pi3(ctx)
    r3 = ctx.ball(mp.sqrt(3))
    r15 = ctx.ball(mp.sqrt(15))
    F = lambda re, im, d: F3(_point(ctx, re, im, d), ctx)
    half = Fraction(1, 2)

    a = F(half, half, 3)
    b = F(half, Fraction(1, 6), 3)
    c = ((F(0, Fraction(1, 6), 3) * 3 - F(0, half, 3)) * 8
         - (F(0, Fraction(1, 3), 3) * 3 - F(0, 1, 3)) * 9)
    d = (F(half, Fraction(1, 6), 15) * 24 - F(half, half, 15) * 8
         - F(0, Fraction(1, 3), 15) * 3 + F(0, 1, 15))
    return {
        'sqrt3_half_shift': (a, r3 * pi3 / 90 - z3 / 2),
        'sqrt3_sixth_half_shift': (b, r3 * pi3 * 7 / 810 - z3 / 2),
        'sqrt3_combination': (c, r3 * pi3 * 7 / 135 + z3),
        'sqrt15_combination': (d, pi3 / r15 - z3 * 7),
    }


def f3c_chain_sqrtm3(ctx: PrecisionContext) -> List[Tuple[str, ApproxComplex]]:
    """Defects of the two intermediate relations whose difference gives the √-3 combination."""
    z3 = zeta_int(3, ctx)
    pi3 = _pi3(ctx)
    r3 = ctx.ball(ctx.mp.sqrt(3))
    F = lambda re, im: F3(_point(ctx, re, im, 3), ctx)
    half = Fraction(1, 2)
    first = F(half, half) * 4 - (F(0, 1) * 9 - F(0, half) * 4 + F(0, Fraction(1, 6)) * 12
                                 - r3 * pi3 * Fraction(41, 216) + z3 * Fraction(13, 2))
    second = F(half, Fraction(1, 6)) * 12 - (F(0, Fraction(1, 3)) * 27 - F(0, Fraction(1, 6)) * 12
                                             + F(0, half) * 4 - r3 * pi3 * Fraction(17, 216)
                                             + z3 * Fraction(7, 2))
    return [('quarter_relation', first), ('twelfth_relation', second)]


def f3_chain_sqrtm15(ctx: PrecisionContext) -> List[Tuple[str, ApproxComplex]]:
    """Residuals of the five transformation relations at √-15 points and the assembled identity."""
    mp = ctx.mp
    z3 = zeta_int(3, ctx)
    pi3 = _pi3(ctx)
    r15 = mp.sqrt(15)
    h = 1j * r15
    ball = ctx.ball
    F = lambda tau: F3(tau, ctx)
    eighth = mp.mpf(1) / 8

    q1 = h / 4 + mp.mpf(1) / 4
    e1 = F(h / 6 + mp.mpf(1) / 2) * 24 - (
        F(q1) * ball(4 * h - 4) + pi3 * ball(mp.mpc(37 * r15, -81) / 270)
        + z3 * ball(2 * h - 14))
    e1b = F(h / 3) * (-3) - (
        F(h / 8 + 5 * eighth) * ball(2 - 2 * h) - pi3 * ball(mp.mpc(97 * r15, -621) / 4320)
        - z3 * ball((2 * h - 5) / 2))
    e1c = F(h / 8 + 5 * eighth) - (
        -F(h / 8 + eighth) + F(q1) * Fraction(9, 4) - F(h / 2 + mp.mpf(1) / 2) * Fraction(1, 4))
    e1d = F(h / 8 + eighth) - (
        F(h / 2 + mp.mpf(1) / 2) * ball((h - 7) / 32) + pi3 * ball(mp.mpc(392 * r15, -72) / 61440)
        + z3 * ball((h - 39) / 64))
    e2 = F(h) - (F(h / 2 + mp.mpf(1) / 2) * 9 - F(q1) * 4 - F(h / 4 - mp.mpf(1) / 4) * 4)
    lhs, rhs = f3_closed_forms(ctx)['sqrt15_combination']
    return [
        ('sixth_half_shift', e1),
        ('third', e1b),
        ('eighth_five', e1c),
        ('eighth_one', e1d),
        ('full', e2),
        ('assembled', lhs - rhs),
    ]


def xi_cotangent(s: int, tau, ctx: PrecisionContext) -> ApproxComplex:
    """ξ_s(τ) = Σ cot(πnτ)/n^s = -iζ(s) + Σ (cot(πnτ) + i)/n^s."""
    _check_odd(s)
    mp = ctx.mp
    tau = as_tau(tau, ctx)
    aq = abs(nome(tau, ctx))
    total = mp.mpc(0)
    radius = mp.mpf(0)
    for n in range(1, MAX_SERIES_TERMS):
        term = cot_plus_i(mp.pi * n * tau, ctx)
        total += term.mid / mp.mpf(n) ** s
        radius += term.rad / mp.mpf(n) ** s
        tail = 2 * aq ** (n + 1) / ((1 - aq) ** 2 * mp.mpf(n + 1) ** s)
        if tail < ctx.eps:
            return ctx.ball(total - 1j * zeta_int(s, ctx).mid, radius + tail + ctx.eps)
    raise ConvergenceError("cotangent series did not converge", {'tau': mp.nstr(tau, 15)})


def tan_dirichlet_odd(s: int, tau, ctx: PrecisionContext) -> ApproxComplex:
    """Σ_{n odd} tan(πnτ)/n^s = i(1 - 2^-s)ζ(s) + Σ_{n odd} (tan(πnτ) - i)/n^s."""
    _check_odd(s)
    mp = ctx.mp
    tau = as_tau(tau, ctx)
    aq = abs(nome(tau, ctx))
    total = mp.mpc(0)
    radius = mp.mpf(0)
    for n in range(1, MAX_SERIES_TERMS, 2):
        term = tan_minus_i(mp.pi * n * tau, ctx)
        total += term.mid / mp.mpf(n) ** s
        radius += term.rad / mp.mpf(n) ** s
        tail = 2 * aq ** (n + 2) / ((1 - aq) ** 2 * mp.mpf(n + 2) ** s)
        if tail < ctx.eps:
            odd_zeta = (1 - mp.mpf(2) ** (-s)) * zeta_int(s, ctx).mid
            return ctx.ball(total + 1j * odd_zeta, radius + tail + ctx.eps)
    raise ConvergenceError("tangent series did not converge", {'tau': mp.nstr(tau, 15)})


def xi_sqrt15_combination(ctx: PrecisionContext) -> Tuple[ApproxComplex, ApproxComplex]:
    """24ξ3(h/6+1/2) - 8ξ3(h/2+1/2) - 3ξ3(h/3) + ξ3(h), h = √-15, against -2π³i/√15."""
    mp = ctx.mp
    h = 1j * mp.sqrt(15)
    half = mp.mpf(1) / 2
    xi = lambda tau: xi_cotangent(3, tau, ctx)
    lhs = xi(h / 6 + half) * 24 - xi(h / 2 + half) * 8 - xi(h / 3) * 3 + xi(h)
    rhs = ctx.ball(mp.mpc(0, -2 * mp.pi ** 3 / mp.sqrt(15)))
    return lhs, rhs


def tan_sqrt15_combination(ctx: PrecisionContext) -> Tuple[ApproxComplex, ApproxComplex]:
    """3Σ_odd tan(πn h/6)/n³ - Σ_odd tan(πn h/2)/n³ against π³i/(4√15)."""
    mp = ctx.mp
    h = 1j * mp.sqrt(15)
    lhs = tan_dirichlet_odd(3, h / 6, ctx) * 3 - tan_dirichlet_odd(3, h / 2, ctx)
    rhs = ctx.ball(mp.mpc(0, mp.pi ** 3 / (4 * mp.sqrt(15))))
    return lhs, rhs


def psi_dirichlet_factor(s: int) -> Fraction:
    """Σ ψ(n) n^-s = factor(s) ζ(s)."""
    return -48 * (1 - Fraction(16, 2 ** s) - Fraction(9, 3 ** s) + Fraction(144, 6 ** s))


def psi_dirichlet_sum(s: int, ctx: PrecisionContext) -> ApproxReal:
    if s < 2:
        raise DomainError("psi_dirichlet_sum requires s >= 2", {'s': s})
    factor = psi_dirichlet_factor(s)
    if factor == 0:
        return ctx.ball(0, 0)
    return zeta_int(s, ctx) * factor


def psi_dirichlet_direct(s: int, terms: int, ctx: PrecisionContext) -> ApproxReal:
    """Σ_{n<=N} ψ(n)/n^s plus the exact period-6 Hurwitz tail."""
    mp = ctx.mp
    head = mp.fsum(psi(n) * mp.mpf(n) ** (-s) for n in range(1, terms + 1))
    tail = mp.fsum(psi(terms + r) * mp.zeta(s, mp.mpf(terms + r) / 6) for r in range(1, 7))
    return ctx.ball(head + tail / mp.mpf(6) ** s)


# ---------------------------------------------------------------------------
# lattice sums
# ---------------------------------------------------------------------------

def _sum_exponential(term: Callable[[int], object], bound: Callable[[int], object], ratio,
                     ctx: PrecisionContext, what: str):
    """Σ_{m>=1} term(m) given |term(m)| <= bound(m) and bound(m+1) <= ratio·bound(m).

    Stops once bound(m+1) is below the working epsilon and returns
    (value, Σ_{k>m} bound(k)). The size of individual terms is never a stopping
    criterion: odd and even m may decay at different rates.
    """
    mp = ctx.mp
    if not 0 < ratio < 1:
        raise ConvergenceError(f"{what} has no geometric decay", {'ratio': float(ratio)})
    total = mp.mpf(0)
    for m in range(1, MAX_SERIES_TERMS):
        total += term(m)
        tail = bound(m + 1)
        if tail < ctx.eps * max(1, abs(total)):
            return total, tail / (1 - ratio)
    raise ConvergenceError(f"{what} did not converge")


def _cot_decay(P: int, delta: int, c: int, ctx: PrecisionContext):
    """e^(-π√Δ/(cP)): per-step decay of cot(π(r - x_m)/P) ± i along x_m = m(-b + i√Δ)/(2c)."""
    mp = ctx.mp
    return mp.exp(-mp.pi * mp.sqrt(delta) / (c * P))


def _cot_split_bound(weights: Sequence[int], decay, m: int):
    """Bound on |_cot_split(x_m)|, from |cot z + i| <= 2w/(1 - w) with w = e^(-2 Im z)."""
    w = decay ** m
    return 2 * sum(abs(v) for v in weights) * w / (1 - w)


def _cot_split(x, P: int, weights: Sequence[int], ctx: PrecisionContext):
    """Σ_r w(r) (cot(π(r-x)/P) ∓ i) for Im x > 0 (upper sign) or Im x < 0."""
    mp = ctx.mp
    total = mp.mpc(0)
    for r, w in enumerate(weights):
        if w == 0:
            continue
        z = mp.pi * (r - x) / P
        if mp.im(z) < 0:
            total -= w * cot_plus_i(-z, ctx).mid
        else:
            total += w * cot_plus_i(z, ctx).mid
    return total


def quadratic_inner_sum(weights: Sequence[int], a: int, b: int, c: int, m: int,
                        ctx: PrecisionContext) -> Tuple[object, object]:
    """Σ_{n∈ℤ} w(n)/(c n² + b m n + a m²) for periodic w, split as (A, E) with value A/m + E.

    A = 2πW/(P√Δ) with W = Σ_r w(r), Δ = 4ac - b²; E decays like e^(-πm√Δ/(cP)).
    """
    mp = ctx.mp
    P = len(weights)
    delta = 4 * a * c - b * b
    if delta <= 0:
        raise DomainError("Form is not positive definite", {'a': a, 'b': b, 'c': c})
    root = mp.sqrt(delta)
    x_plus = m * mp.mpc(-b, root) / (2 * c)
    x_minus = mp.conj(x_plus)
    leading = 2 * mp.pi * sum(weights) / (P * root)
    split = _cot_split(x_plus, P, weights, ctx) - _cot_split(x_minus, P, weights, ctx)
    correction = mp.re(mp.pi / P * split / (1j * m * root))
    return leading, correction


def _form_sum(weights: Sequence[int], a: int, b: int, c: int, ctx: PrecisionContext):
    """Σ_{m>=1} (1/m²) Σ_{n∈ℤ} w(n)/(c n² + b m n + a m²)."""
    mp = ctx.mp
    P = len(weights)
    delta = 4 * a * c - b * b
    leading, _ = quadratic_inner_sum(weights, a, b, c, 1, ctx)
    decay = _cot_decay(P, delta, c, ctx)
    scale = 2 * mp.pi / (P * mp.sqrt(delta))

    def bound(m):
        return scale * _cot_split_bound(weights, decay, m) / m ** 3

    corrections, remainder = _sum_exponential(
        lambda m: quadratic_inner_sum(weights, a, b, c, m, ctx)[1] / m ** 2, bound, decay, ctx,
        f"lattice sum ({a},{b},{c})")
    value = leading * zeta_int(3, ctx).mid + corrections
    return ctx.ball(value, remainder + ctx.eps * abs(value) * 10)


def sieve_defect(form: Tuple[int, int, int], ctx: PrecisionContext) -> ApproxReal:
    """-(1/48)Σψ(n)/f(m,n) - Σ(1/f(m,n) - 16/f(m,2n) - 9/f(m,3n) + 144/f(m,6n)), f = m²(am²+bmn+cn²)."""
    a, b, c = form
    lhs = _form_sum(PSI_TABLE, a, b, c, ctx) * Fraction(-1, 48)
    rhs = (_form_sum((1,), a, b, c, ctx) - _form_sum((1,), a, 2 * b, 4 * c, ctx) * 16
           - _form_sum((1,), a, 3 * b, 9 * c, ctx) * 9 + _form_sum((1,), a, 6 * b, 36 * c, ctx) * 144)
    return lhs - rhs


# (form, multiplier of π/√15, τ0 as (re, im/√15))
POISSON_FORMS = {
    1: ((24, 6, 1), 1, (0, Fraction(1))),
    2: ((6, 3, 1), 2, (Fraction(1, 2), Fraction(1, 2))),
    3: ((8, 6, 3), 1, (0, Fraction(1, 3))),
    4: ((2, 3, 3), 2, (Fraction(1, 2), Fraction(1, 6))),
}


def poisson_pair(pair_id: int, ctx: PrecisionContext) -> Tuple[ApproxReal, ApproxReal]:
    """Σ_{m>=1,n∈ℤ} 1/(m²(am²+bmn+cn²)) against (kπ/√15)(2F3(τ0) + ζ(3))."""
    if pair_id not in POISSON_FORMS:
        raise DomainError("Unknown Poisson identity", {'id': pair_id, 'known': sorted(POISSON_FORMS)})
    (a, b, c), k, (re, im) = POISSON_FORMS[pair_id]
    mp = ctx.mp
    lhs = _form_sum((1,), a, b, c, ctx)
    tau0 = _point(ctx, re, im, 15)
    factor = ctx.ball(k * mp.pi / mp.sqrt(15))
    rhs = (F3(tau0, ctx) * 2 + zeta_int(3, ctx)) * factor
    return lhs, rhs.real


def _psi_lattice_asymptotics(a: int, b: int, ctx: PrecisionContext):
    """Coefficients A, B with inner(m) = A/m³ + B/m⁴ + (exponentially small)."""
    mp = ctx.mp
    root = mp.sqrt(4 * a - b * b)
    A = -672 * mp.pi * (b * b - 2 * a) / (a * a * root)
    B = mp.mpf(-PSI_TABLE[0]) * (b * b - a) / a ** 3
    return A, B


def psi_lattice_sum(a: int, b: int, ctx: PrecisionContext) -> ApproxReal:
    """Σ_{m>=1, n≠0} ψ(n)/(n²(n² + bmn + am²)) in closed form.

    Partial fractions in n leave Σ_± β± Σ_{n≠0} ψ(n)/(n - x±) with
    β± = 1/(x±²(x± - x∓)); the 1/n² and 1/n parts vanish because
    Σ_{n>=1} ψ(n)/n² = 0 and ψ is even.
    """
    if 4 * a - b * b <= 0:
        raise DomainError("n² + bmn + am² must be positive definite", {'a': a, 'b': b})
    mp = ctx.mp
    root = mp.sqrt(4 * a - b * b)
    rho = mp.mpc(-b, root) / 2

    def correction(m):
        x_plus = m * rho
        x_minus = mp.conj(x_plus)
        beta_plus = 1 / (x_plus ** 2 * (x_plus - x_minus))
        beta_minus = 1 / (x_minus ** 2 * (x_minus - x_plus))
        value = (beta_plus * _cot_split(x_plus, 6, PSI_TABLE, ctx)
                 + beta_minus * _cot_split(x_minus, 6, PSI_TABLE, ctx))
        return mp.re(mp.pi / 6 * value)

    decay = _cot_decay(6, 4 * a - b * b, 1, ctx)

    def bound(m):
        # |β±| = 1/(a m³ √(4a - b²))
        return mp.pi / 3 * _cot_split_bound(PSI_TABLE, decay, m) / (a * m ** 3 * root)

    A, B = _psi_lattice_asymptotics(a, b, ctx)
    corrections, remainder = _sum_exponential(correction, bound, decay, ctx, f"psi lattice sum ({a},{b})")
    value = A * zeta_int(3, ctx).mid + B * zeta_int(4, ctx).mid + corrections
    return ctx.ball(value, remainder + 10 * ctx.eps * max(1, abs(value)))


LATTICE_MODES = ('direct', 'chain')
DIRECT_M_TERMS = 40
DIRECT_N_TERMS = 200000


def _lattice_S_direct(ctx: PrecisionContext) -> ApproxReal:
    """Brute-force n-sums in double precision, m <= M, then the A/m³ + B/m⁴ tail."""
    mp = ctx.mp
    n = np.arange(1, DIRECT_N_TERMS + 1, dtype=np.float64)
    weights = np.array(PSI_TABLE, dtype=np.float64)[np.arange(1, DIRECT_N_TERMS + 1) % 6]
    head = mp.mpf(0)
    for m in range(1, DIRECT_M_TERMS + 1):
        n2 = n * n
        terms = weights / n2 * (1.0 / (24 * m * m - 6 * m * n + n2) + 1.0 / (24 * m * m + 6 * m * n + n2))
        # Σ_{n>N} ψ(n)/n⁴ ≈ mean(ψ)/(3N³) for each of the two terms
        tail = 2 * (-672.0) / (3.0 * DIRECT_N_TERMS ** 3)
        head += mp.mpf(float(np.sum(terms))) + tail
    A, B = _psi_lattice_asymptotics(24, 6, ctx)
    M = DIRECT_M_TERMS + 1
    value = head + A * mp.zeta(3, M) + B * mp.zeta(4, M)
    return ctx.ball(value, mp.mpf(10) ** -13 * abs(value))


def _lattice_T_direct(ctx: PrecisionContext) -> ApproxReal:
    """-(1/96) Σ_m (1/m²) Σ_n ψ(n)/(n² + 6mn + 24m²) with explicit m <= M and a ζ(3, M+1) tail."""
    mp = ctx.mp
    leading = None
    head = mp.mpf(0)
    for m in range(1, DIRECT_M_TERMS + 1):
        leading, correction = quadratic_inner_sum(PSI_TABLE, 24, 6, 1, m, ctx)
        head += (leading / m + correction) / m ** 2
    value = (head + leading * mp.zeta(3, DIRECT_M_TERMS + 1)) / -96
    return ctx.ball(value, 10 * ctx.eps * abs(value))


def lattice_T(mode: str, ctx: PrecisionContext) -> ApproxReal:
    """T = -(1/96) Σ_{m>=1,n∈ℤ} ψ(n)/(m²(24m² + 6mn + n²))."""
    if mode == 'direct':
        return _lattice_T_direct(ctx)
    if mode == 'chain':
        # sieve to four forms, then Poisson summation into F3 values
        total = None
        for pair_id, coeff in ((1, 1), (2, -4), (3, -3), (4, 12)):
            _, rhs = poisson_pair(pair_id, ctx)
            total = rhs * coeff if total is None else total + rhs * coeff
        return total * Fraction(1, 2)
    raise DomainError("Unknown lattice mode", {'mode': mode, 'known': LATTICE_MODES})


def lattice_S(mode: str, ctx: PrecisionContext) -> ApproxReal:
    """S = Σ_{m,n>=1} ψ(n)/n² (1/(24m²-6mn+n²) + 1/(24m²+6mn+n²))."""
    if mode == 'direct':
        return _lattice_S_direct(ctx)
    if mode == 'chain':
        return lattice_T('chain', ctx) + zeta_int(4, ctx) * 5
    raise DomainError("Unknown lattice mode", {'mode': mode, 'known': LATTICE_MODES})


# ---------------------------------------------------------------------------
# σ(q) = (1/5)(-E4(τ) + 16E4(2τ) + 9E4(3τ) - 144E4(6τ))
# ---------------------------------------------------------------------------

SIGMA_COMBINATION = ((1, -1), (2, 16), (3, 9), (6, -144))


def sigma_weight_qexp(N: int) -> QExpansion:
    """Exact σ(q) through q^(N-1); constant term -24."""
    if N < 1:
        raise DomainError("Expansion order must be >= 1", {'N': N})
    e4 = eisenstein_qexp(4, N)
    total = None
    for m, c in SIGMA_COMBINATION:
        term = e4.dilate(m).truncate(N) * c
        total = term if total is None else total + term
    return total * Fraction(1, 5)


@lru_cache(maxsize=8)
def sigma_weight_coefficients(N: int) -> Tuple[int, ...]:
    """s_n = 48(-σ3(n) + 16σ3(n/2) + 9σ3(n/3) - 144σ3(n/6)) for 0 <= n < N (entry 0 unused)."""
    sigma3 = divisor_power_table(3, N)
    table = [0] * N
    for n in range(1, N):
        table[n] = 48 * sum(c * sigma3[n // m] for m, c in SIGMA_COMBINATION if n % m == 0)
    return tuple(table)


def sigma_psi_convolution_defect(N: int) -> List[int]:
    """Indices n < N where s_n != Σ_{d|n} ψ(d)(n/d)³."""
    expansion = sigma_weight_qexp(N)
    bad = []
    for n in range(1, N):
        convolution = sum(psi(d) * (n // d) ** 3 for d in divisors(n))
        if expansion.coefficient(n) != convolution:
            bad.append(n)
    return bad
