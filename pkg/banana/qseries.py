"""q-series engine: eta quotients, Weber functions, Eisenstein and theta series,
the cusp forms f (level 15), g (level 12) and e (level 14), and the
hauptmodul t(τ) with its periods ϖ1, ϖ2.

Exact expansions are QExpansion values (int/Fraction coefficients); numeric
evaluations are ApproxComplex balls with the truncation tail in the radius.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple, Union

from .exceptions import CoefficientMismatchError, ConvergenceError, DomainError
from .mpcore import (
    MAX_SERIES_TERMS,
    ApproxComplex,
    ApproxReal,
    PrecisionContext,
    bernoulli,
    gamma_product_15,
    gamma_third,
)

logger = logging.getLogger('banana')

NEWTON_MAX_ITERATIONS = 100
NEWTON_MAX_STEP = 0.1


# ---------------------------------------------------------------------------
# exact expansions
# ---------------------------------------------------------------------------

def _exact(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c.numerator)
    return c


@dataclass(frozen=True)
class QExpansion:
    """Σ_j coeffs[j] q^(leading + j), known exactly for j < order."""

    leading: Fraction
    coeffs: Tuple

    def __post_init__(self):
        object.__setattr__(self, 'leading', Fraction(self.leading))
        object.__setattr__(self, 'coeffs', tuple(_exact(Fraction(c)) for c in self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @property
    def end(self) -> Fraction:
        """First exponent whose coefficient is unknown."""
        return self.leading + self.order

    def coefficient(self, n) -> Union[int, Fraction]:
        """Coefficient of q^n for an absolute exponent n."""
        offset = Fraction(n) - self.leading
        if offset.denominator != 1 or offset < 0:
            return 0
        if offset >= self.order:
            raise DomainError("Coefficient beyond truncation order",
                              {'exponent': n, 'end': self.end})
        return self.coeffs[int(offset)]

    def truncate(self, order: int) -> 'QExpansion':
        if order > self.order:
            raise DomainError("Cannot extend a truncated expansion", {'order': order})
        return QExpansion(self.leading, self.coeffs[:order])

    def _aligned(self, other: 'QExpansion'):
        shift = self.leading - other.leading
        if shift.denominator != 1:
            raise DomainError("Leading exponents differ by a non-integer",
                              {'left': self.leading, 'right': other.leading})
        lead = min(self.leading, other.leading)
        length = int(min(self.end, other.end) - lead)
        return lead, max(length, 0)

    def __add__(self, other: 'QExpansion') -> 'QExpansion':
        lead, length = self._aligned(other)
        coeffs = [self.coefficient(lead + j) + other.coefficient(lead + j) for j in range(length)]
        return QExpansion(lead, coeffs)

    def __neg__(self) -> 'QExpansion':
        return QExpansion(self.leading, [-c for c in self.coeffs])

    def __sub__(self, other: 'QExpansion') -> 'QExpansion':
        return self + (-other)

    def scale(self, c) -> 'QExpansion':
        return QExpansion(self.leading, [c * a for a in self.coeffs])

    def __mul__(self, other) -> 'QExpansion':
        if not isinstance(other, QExpansion):
            return self.scale(other)
        order = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        coeffs = [sum(a[i] * b[n - i] for i in range(n + 1)) for n in range(order)]
        return QExpansion(self.leading + other.leading, coeffs)

    __rmul__ = __mul__

    def normalized(self) -> 'QExpansion':
        """Drop leading zero coefficients."""
        for j, c in enumerate(self.coeffs):
            if c != 0:
                return QExpansion(self.leading + j, self.coeffs[j:])
        return self

    def __pow__(self, e: int) -> 'QExpansion':
        """Integer power via the Miller recurrence (any sign of e)."""
        f = self.normalized()
        if not f.coeffs or f.coeffs[0] == 0:
            raise DomainError("Power of an expansion with no nonzero coefficient")
        if e == 0:
            return QExpansion(0, [1] + [0] * (f.order - 1))
        if e == 1:
            return f
        a = list(f.coeffs)
        unit = a[0] in (1, -1) and all(isinstance(c, int) for c in a)
        if not unit:
            a = [Fraction(c) for c in a]
        g = [a[0] ** e if e > 0 or not unit else a[0] ** (-e)]
        for n in range(1, f.order):
            acc = sum(((e + 1) * k - n) * a[k] * g[n - k] for k in range(1, n + 1))
            # integral when the constant term is a unit
            g.append(acc // (n * a[0]) if unit else acc / (n * a[0]))
        return QExpansion(f.leading * e, g)

    def dilate(self, m: int) -> 'QExpansion':
        """Substitute q -> q^m."""
        coeffs = [0] * (self.order * m)
        for j, c in enumerate(self.coeffs):
            coeffs[j * m] = c
        return QExpansion(self.leading * m, coeffs)

    def half_shift(self) -> 'QExpansion':
        """Expansion of f(τ + 1/2), i.e. q -> -q; integral exponents only."""
        if self.leading.denominator != 1:
            raise DomainError("half_shift needs an integral leading exponent",
                              {'leading': self.leading})
        start = int(self.leading)
        return QExpansion(self.leading, [c if (start + j) % 2 == 0 else -c
                                         for j, c in enumerate(self.coeffs)])

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def first_mismatch(self, other: 'QExpansion') -> Optional[Fraction]:
        """Smallest exponent where the two expansions disagree, or None."""
        lead, length = self._aligned(other)
        for j in range(length):
            if self.coefficient(lead + j) != other.coefficient(lead + j):
                return lead + j
        return None

    def evaluate(self, tau, ctx: PrecisionContext) -> ApproxComplex:
        """Evaluate the truncated sum at τ; the radius covers rounding only."""
        mp = ctx.mp
        tau = as_tau(tau, ctx)
        q = nome(tau, ctx)
        value = mp.mpc(0)
        power = mp.exp(2j * mp.pi * tau * ctx.convert(self.leading))
        for c in self.coeffs:
            if c != 0:
                value += ctx.convert(c) * power
            power *= q
        return ctx.ball(value, ctx.eps * self.order * (1 + abs(value)))


@dataclass(frozen=True)
class BQF:
    """Positive definite binary quadratic form a m^2 + b m n + c n^2."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a <= 0 or self.discriminant >= 0:
            raise DomainError("Form is not positive definite",
                              {'a': self.a, 'b': self.b, 'c': self.c})

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, m: int, n: int) -> int:
        return self.a * m * m + self.b * m * n + self.c * n * n


def lattice_points(form: BQF, bound: int):
    """Yield (m, n, value) for every lattice point with form(m, n) < bound."""
    d = -form.discriminant
    n_max = math.isqrt(4 * form.a * bound // d) + 1
    m_max = math.isqrt(4 * form.c * bound // d) + 1
    for n in range(-n_max, n_max + 1):
        for m in range(-m_max, m_max + 1):
            value = form(m, n)
            if value < bound:
                yield m, n, value


def theta_bqf_qexp(form: BQF, N: int) -> QExpansion:
    """Σ_{m,n} q^(a m^2 + b m n + c n^2) through q^(N-1)."""
    counts = [0] * N
    for _, _, value in lattice_points(form, N):
        counts[value] += 1
    return QExpansion(0, counts)


@lru_cache(maxsize=32)
def _euler_product(N: int) -> QExpansion:
    """∏_{n>=1}(1 - q^n) through q^(N-1) from the pentagonal number series."""
    coeffs = [0] * N
    coeffs[0] = 1
    k = 1
    while k * (3 * k - 1) // 2 < N:
        sign = -1 if k % 2 else 1
        for e in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            if e < N:
                coeffs[e] += sign
        k += 1
    return QExpansion(0, coeffs)


@dataclass(frozen=True)
class EtaQuotientSpec:
    """sign * ∏ η(m τ)^e over (m, e) factors with distinct sorted multipliers."""

    factors: Tuple[Tuple[int, int], ...]
    sign: int = 1

    def __post_init__(self):
        multipliers = [m for m, _ in self.factors]
        if any(m <= 0 for m in multipliers) or any(e == 0 for _, e in self.factors):
            raise DomainError("Eta quotient needs positive multipliers and nonzero exponents",
                              {'factors': self.factors})
        if multipliers != sorted(set(multipliers)):
            raise DomainError("Eta quotient multipliers must be distinct and sorted",
                              {'factors': self.factors})

    @classmethod
    def of(cls, *factors: Tuple[int, int], sign: int = 1) -> 'EtaQuotientSpec':
        return cls(tuple(sorted(factors)), sign)

    @property
    def leading_exponent(self) -> Fraction:
        return Fraction(sum(m * e for m, e in self.factors), 24)

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(e for _, e in self.factors), 2)

    def inverse(self) -> 'EtaQuotientSpec':
        return EtaQuotientSpec(tuple((m, -e) for m, e in self.factors), self.sign)


T_SPEC = EtaQuotientSpec.of((1, 6), (2, -6), (3, 6), (6, -6), sign=-1)
VARPI1_SPEC = EtaQuotientSpec.of((1, -2), (2, 4), (3, -2), (6, 4))
VARPI2_SPEC = EtaQuotientSpec.of((1, 4), (2, -2), (3, 4), (6, -2))
F15_ETA_SPEC = EtaQuotientSpec.of((1, 1), (3, 1), (5, 1), (15, 1))
F15_CUBE_A = EtaQuotientSpec.of((3, 3), (5, 3))
F15_CUBE_B = EtaQuotientSpec.of((1, 3), (15, 3))
G12_SPEC = EtaQuotientSpec.of((2, 3), (6, 3))
E14_SPEC = EtaQuotientSpec.of((1, 1), (2, 1), (7, 1), (14, 1))
F15_THETA_FORM = BQF(1, 1, 4)


def eta_quotient_qexp(spec: EtaQuotientSpec, N: int) -> QExpansion:
    """Exact expansion with N known coefficients after the leading exponent."""
    if N < 1:
        raise DomainError("Expansion order must be >= 1", {'N': N})
    result = QExpansion(spec.leading_exponent, [spec.sign] + [0] * (N - 1))
    for m, e in spec.factors:
        base = _euler_product(N // m + 1).dilate(m).truncate(N)
        result = result * QExpansion(0, (base ** e).coeffs).truncate(N)
    return result


# ---------------------------------------------------------------------------
# numeric evaluation
# ---------------------------------------------------------------------------

def as_tau(tau, ctx: PrecisionContext):
    """Normalize τ (CMPoint, ball, complex, mpc) to an mpc in the upper half plane."""
    if isinstance(tau, CMPoint):
        value = tau.tau(ctx)
    else:
        value = ctx.mp.mpc(ctx.convert(tau))
    if ctx.mp.im(value) <= 0:
        raise DomainError("τ must lie in the upper half plane", {'tau': ctx.mp.nstr(value, 15)})
    return value


def nome(tau, ctx: PrecisionContext):
    return ctx.mp.exp(2j * ctx.mp.pi * tau)


def eta(tau, ctx: PrecisionContext) -> ApproxComplex:
    """η(τ) = e^(πiτ/12) Σ_k (-1)^k q^(k(3k-1)/2), tail 2|q|^e/(1-|q|)."""
    tau = as_tau(tau, ctx)
    return ctx.memo(('eta', tau), lambda: _eta(tau, ctx))


def _eta(tau, ctx: PrecisionContext) -> ApproxComplex:
    mp = ctx.mp
    q = nome(tau, ctx)
    aq = abs(q)
    log_aq = mp.log(aq)
    log_eps = mp.log(ctx.eps)
    total = mp.mpc(1)
    k = 1
    while True:
        e = k * (3 * k - 1) // 2
        if e * log_aq < log_eps:
            tail = 2 * aq ** e / (1 - aq)
            break
        sign = -1 if k % 2 else 1
        total += sign * (q ** e + q ** (e + k))
        k += 1
        if k > MAX_SERIES_TERMS:
            raise ConvergenceError("eta series did not converge",
                                   {'tau': mp.nstr(tau, 15), 'terms': k})
    prefactor = mp.exp(1j * mp.pi * tau / 12)
    value = prefactor * total
    return ctx.ball(value, abs(prefactor) * (tail + ctx.eps * 2 * k * (1 + abs(total))))


def eta_quotient_eval(spec: EtaQuotientSpec, tau, ctx: PrecisionContext) -> ApproxComplex:
    tau = as_tau(tau, ctx)
    value = ctx.ball(ctx.mp.mpc(spec.sign), 0)
    for m, e in spec.factors:
        value = value * eta(m * tau, ctx) ** e
    return value


def lambert_series(tau, ctx: PrecisionContext, weight: Callable[[int], object],
                   power: int, weight_bound) -> ApproxComplex:
    """Σ_{n>=1} w(n) n^power q^n / (1 - q^n) with |w(n)| <= weight_bound.

    The remainder after N terms is bounded by
    B (N+1)^power |q|^(N+1) / ((1-|q|)(1-ρ)), ρ = |q| max(1, ((N+2)/(N+1))^power).
    """
    mp = ctx.mp
    tau = as_tau(tau, ctx)
    q = nome(tau, ctx)
    aq = abs(q)
    bound = ctx.convert(weight_bound)
    total = mp.mpc(0)
    qn = mp.mpc(1)
    for n in range(1, MAX_SERIES_TERMS):
        qn *= q
        w = weight(n)
        if w != 0:
            total += ctx.convert(w) * mp.mpf(n) ** power * qn / (1 - qn)
        rho = aq * max(1, (mp.mpf(n + 2) / (n + 1)) ** power)
        if rho < 1:
            tail = bound * mp.mpf(n + 1) ** power * abs(qn) * aq / ((1 - aq) * (1 - rho))
            if tail < ctx.eps * max(1, abs(total)):
                logger.debug(f"lambert series converged after {n} terms")
                return ctx.ball(total, tail + ctx.eps * n * max(1, abs(total)))
    raise ConvergenceError("Lambert series did not converge", {'tau': mp.nstr(tau, 15)})


class WeberKind:
    F0 = 'f0'
    F1 = 'f1'
    F2 = 'f2'


def weber(kind: str, tau, ctx: PrecisionContext) -> ApproxComplex:
    """Weber's functions: f0 = e^(-πi/24) η((τ+1)/2)/η(τ), f1 = η(τ/2)/η(τ), f2 = √2 η(2τ)/η(τ)."""
    mp = ctx.mp
    tau = as_tau(tau, ctx)
    if kind == WeberKind.F0:
        return ctx.ball(mp.expjpi(mp.mpf(-1) / 24)) * eta((tau + 1) / 2, ctx) / eta(tau, ctx)
    if kind == WeberKind.F1:
        return eta(tau / 2, ctx) / eta(tau, ctx)
    if kind == WeberKind.F2:
        return ctx.ball(mp.sqrt(2)) * eta(2 * tau, ctx) / eta(tau, ctx)
    raise DomainError("Unknown Weber function", {'kind': kind})


def eisenstein_qexp(k: int, N: int) -> QExpansion:
    """E_k = 1 - (2k/B_k) Σ σ_(k-1)(n) q^n through q^(N-1)."""
    if k < 2 or k % 2:
        raise DomainError("Eisenstein series need even k >= 2", {'k': k})
    factor = Fraction(-2 * k) / bernoulli(k)
    sigma = divisor_power_table(k - 1, N)
    return QExpansion(0, [1] + [factor * sigma[n] for n in range(1, N)])


@lru_cache(maxsize=16)
def divisor_power_table(t: int, N: int) -> Tuple[int, ...]:
    """σ_t(n) for 0 <= n < N by sieving (t >= 0; entry 0 unused)."""
    table = [0] * N
    for d in range(1, N):
        dt = d ** t
        for multiple in range(d, N, d):
            table[multiple] += dt
    return tuple(table)


def eisenstein_eval(k: int, tau, ctx: PrecisionContext) -> ApproxComplex:
    if k < 2 or k % 2:
        raise DomainError("Eisenstein series need even k >= 2", {'k': k})
    factor = ctx.convert(Fraction(-2 * k) / bernoulli(k))
    series = lambert_series(tau, ctx, lambda n: 1, k - 1, 1)
    return series * factor + 1


# ---------------------------------------------------------------------------
# CM points and the hauptmodul
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CMPoint:
    """τ = a + b√d with rational a, b and negative d."""

    a: Fraction
    b: Fraction
    d: int

    def tau(self, ctx: PrecisionContext):
        mp = ctx.mp
        return mp.mpc(ctx.convert(Fraction(self.a)),
                      ctx.convert(Fraction(self.b)) * mp.sqrt(-self.d))

    def __str__(self):
        return f"{self.a} + {self.b}*sqrt({self.d})"


def cm(a, b, d: int) -> CMPoint:
    return CMPoint(Fraction(a), Fraction(b), d)


CM_TABLE: Dict[int, CMPoint] = {
    -32: cm(0, Fraction(1, 3), -3),
    -2: cm(0, Fraction(1, 6), -3),
    1: cm(Fraction(-1, 8), Fraction(1, 24), -15),
    4: cm(Fraction(-1, 4), Fraction(1, 12), -3),
    16: cm(Fraction(1, 2), Fraction(1, 6), -3),
    64: cm(Fraction(-1, 2), Fraction(1, 6), -15),
}

# Points named in the level-12 chain of ϖ2 relations.
CHAIN_POINTS: Dict[str, CMPoint] = {
    'tau1': CM_TABLE[-32],
    'tau2': CM_TABLE[4],
    'tau3': CM_TABLE[-2],
    'tau4': CM_TABLE[16],
}


def cm_point(t: int) -> CMPoint:
    if t not in CM_TABLE:
        raise DomainError("No CM point recorded for this t", {'t': t, 'known': sorted(CM_TABLE)})
    return CM_TABLE[t]


def hauptmodul_t(tau, ctx: PrecisionContext) -> ApproxComplex:
    """t(τ) = -(η(τ)η(3τ)/(η(2τ)η(6τ)))^6."""
    return eta_quotient_eval(T_SPEC, tau, ctx)


def dlog_t(tau, ctx: PrecisionContext) -> ApproxComplex:
    """d log t / dτ = (πi/2)(E2(τ) + 3E2(3τ) - 2E2(2τ) - 6E2(6τ))."""
    tau = as_tau(tau, ctx)
    combo = (eisenstein_eval(2, tau, ctx) + eisenstein_eval(2, 3 * tau, ctx) * 3
             - eisenstein_eval(2, 2 * tau, ctx) * 2 - eisenstein_eval(2, 6 * tau, ctx) * 6)
    return combo * ctx.ball(ctx.mp.mpc(0, ctx.mp.pi / 2))


def invert_t(target, seed, ctx: PrecisionContext):
    """Newton iteration on τ for t(τ) = target, starting at seed.

    Steps are damped to |Δτ| <= 0.1 and kept in the upper half plane.
    """
    mp = ctx.mp
    target = ctx.convert(target)
    tau = as_tau(seed, ctx)
    limit = mp.mpf(10) ** (-(ctx.working_digits - 5))
    residual = None
    for iteration in range(NEWTON_MAX_ITERATIONS):
        t = hauptmodul_t(tau, ctx).mid
        residual = t - target
        if residual == 0:
            return tau
        step = residual / (t * dlog_t(tau, ctx).mid)
        if abs(step) <= limit * abs(tau):
            logger.debug(f"invert_t({mp.nstr(target, 8)}) converged in {iteration} steps")
            return tau - step
        if abs(step) > NEWTON_MAX_STEP:
            step *= NEWTON_MAX_STEP / abs(step)
        while mp.im(tau - step) <= 0:
            step /= 2
        tau = tau - step
    raise ConvergenceError(
        "Newton iteration for t(τ) did not converge",
        {'target': mp.nstr(target, 15), 'tau': mp.nstr(tau, 15),
         'residual': mp.nstr(abs(residual), 5), 'iterations': NEWTON_MAX_ITERATIONS}
    )


def continue_t(t_from, tau_from, t_to, steps: int, ctx: PrecisionContext):
    """Follow the branch of τ(t) from (t_from, tau_from) to t_to along a straight t-path."""
    if steps < 1:
        raise DomainError("continue_t needs at least one step", {'steps': steps})
    t_from = ctx.convert(t_from)
    t_to = ctx.convert(t_to)
    tau = as_tau(tau_from, ctx)
    for j in range(1, steps + 1):
        tau = invert_t(t_from + (t_to - t_from) * j / steps, tau, ctx)
    return tau


def varpi(which: int, tau, ctx: PrecisionContext) -> ApproxComplex:
    """ϖ1 = (η(2τ)η(6τ))^4/(η(τ)η(3τ))^2, ϖ2 = (η(τ)η(3τ))^4/(η(2τ)η(6τ))^2."""
    if which == 1:
        return eta_quotient_eval(VARPI1_SPEC, tau, ctx)
    if which == 2:
        return eta_quotient_eval(VARPI2_SPEC, tau, ctx)
    raise DomainError("varpi index must be 1 or 2", {'which': which})


def varpi2_weber(tau, ctx: PrecisionContext) -> ApproxComplex:
    """ϖ2 through Weber's f2: 4(η(τ)η(3τ)/(f2(τ)f2(3τ)))^2."""
    tau = as_tau(tau, ctx)
    ratio = eta(tau, ctx) * eta(3 * tau, ctx) / (weber(WeberKind.F2, tau, ctx)
                                                 * weber(WeberKind.F2, 3 * tau, ctx))
    return ratio ** 2 * 4


def fricke(tau, N: int, ctx: PrecisionContext):
    """w_N τ = -1/(N τ)."""
    tau = as_tau(tau, ctx)
    return -1 / (N * tau)


def fricke_eta_defect(m: int, N: int, tau, ctx: PrecisionContext) -> ApproxComplex:
    """η(m w_N τ) - √(-(iN/m)τ) η((N/m)τ) for m | N."""
    mp = ctx.mp
    tau = as_tau(tau, ctx)
    if N % m:
        raise DomainError("m must divide N", {'m': m, 'N': N})
    lhs = eta(m * fricke(tau, N, ctx), ctx)
    factor = ctx.ball(mp.sqrt(-1j * (mp.mpf(N) / m) * tau))
    return lhs - factor * eta((N // m) * tau, ctx)


def varpi_fricke_defect(tau, ctx: PrecisionContext) -> ApproxComplex:
    """ϖ1(w6 τ) + (3/4)τ^2 ϖ2(τ)."""
    tau = as_tau(tau, ctx)
    lhs = varpi(1, fricke(tau, 6, ctx), ctx)
    return lhs + varpi(2, tau, ctx) * ctx.ball(3 * tau ** 2 / 4)


# ---------------------------------------------------------------------------
# newforms
# ---------------------------------------------------------------------------

NEWFORM_IDS = ('f15', 'g12', 'e14')
HECKE_CHECK_BOUND = 30


def hecke_multiplicativity_defects(expansion: QExpansion, bound: int = HECKE_CHECK_BOUND) -> List[Tuple[int, int]]:
    """Coprime pairs (m, n) with m, n <= bound and mn in range where a_mn != a_m a_n."""
    defects = []
    for m in range(2, bound + 1):
        for n in range(m + 1, bound + 1):
            if math.gcd(m, n) != 1 or m * n >= expansion.end:
                continue
            if expansion.coefficient(m * n) != expansion.coefficient(m) * expansion.coefficient(n):
                defects.append((m, n))
    return defects


def f15_constructions(N: int) -> Tuple[QExpansion, QExpansion]:
    """The theta-product and the sum-of-cubes expansions of f, both with N coefficients."""
    theta = eta_quotient_qexp(F15_ETA_SPEC, N) * theta_bqf_qexp(F15_THETA_FORM, N)
    cubes = eta_quotient_qexp(F15_CUBE_A, N) + eta_quotient_qexp(F15_CUBE_B, N)
    return theta, cubes.truncate(N)


@lru_cache(maxsize=16)
def newform_qexp(form_id: str, N: int) -> QExpansion:
    """Exact q-expansion a_1 q + ... + a_N q^N of f15, g12 or e14."""
    if form_id == 'f15':
        theta, cubes = f15_constructions(N)
        mismatch = theta.first_mismatch(cubes)
        if mismatch is not None:
            raise CoefficientMismatchError(
                "The two constructions of the level 15 form disagree",
                {'exponent': mismatch, 'N': N}
            )
        return theta
    if form_id == 'g12':
        return eta_quotient_qexp(G12_SPEC, N)
    if form_id == 'e14':
        expansion = eta_quotient_qexp(E14_SPEC, N)
        defects = hecke_multiplicativity_defects(expansion)
        if defects:
            raise CoefficientMismatchError("Level 14 candidate is not multiplicative",
                                           {'pairs': defects[:5]})
        return expansion
    raise DomainError("Unknown newform", {'form': form_id, 'known': NEWFORM_IDS})


def e4_halfshift_combination(N: int) -> QExpansion:
    """E4(τ+1/2) + E4(τ) - 18 E4(2τ) + 16 E4(4τ) through q^(N-1); identically zero."""
    e4 = eisenstein_qexp(4, N)
    return (e4.half_shift() + e4 - e4.dilate(2).truncate(N) * 18
            + e4.dilate(4).truncate(N) * 16)


# ---------------------------------------------------------------------------
# evaluations at CM points
# ---------------------------------------------------------------------------

def eta_cm_evaluations(ctx: PrecisionContext) -> Dict[str, Tuple[ApproxReal, ApproxReal]]:
    """|η|, |f2| and f0 at the √-15 and √-3 points, paired with their gamma closed forms."""
    mp = ctx.mp
    half = Fraction(1, 2)
    p15a = cm(Fraction(3, 2), half, -15)
    p15b = cm(half, Fraction(1, 6), -15)
    p3a = cm(Fraction(3, 2), half, -3)
    p3b = cm(half, Fraction(1, 6), -3)

    G = gamma_product_15(ctx)
    pi3 = ctx.ball(mp.pi ** 3)
    golden_twelfth = ctx.ball(mp.exp(mp.log((1 + mp.sqrt(5)) / 2) / 12))
    g3 = gamma_third(ctx)
    g3_power = g3 * g3.sqrt()
    two_pi = ctx.ball(2 * mp.pi)
    cube_root_two = ctx.ball(mp.cbrt(2))

    return {
        'eta15a': (abs(eta(p15a, ctx)), (G / (pi3 * 120)).sqrt().sqrt() / golden_twelfth),
        'eta15b': (abs(eta(p15b, ctx)), (G / (pi3 * 40)).sqrt().sqrt() * golden_twelfth),
        'f2a': (abs(weber(WeberKind.F2, p15a, ctx)) * abs(weber(WeberKind.F2, p15b, ctx)),
                ctx.ball(1, 0)),
        'eta3a': (abs(eta(p3a, ctx)), g3_power * ctx.ball(mp.mpf(3) ** (mp.mpf(1) / 8)) / two_pi),
        'eta3b': (abs(eta(p3b, ctx)), g3_power * ctx.ball(mp.mpf(3) ** (mp.mpf(3) / 8)) / two_pi),
        'f2b': (abs(weber(WeberKind.F2, p3a, ctx)), ctx.ball(mp.mpf(2) ** (mp.mpf(1) / 6))),
        'f2b_sixth': (abs(weber(WeberKind.F2, p3b, ctx)), ctx.ball(mp.mpf(2) ** (mp.mpf(1) / 6))),
        'f0a': (weber(WeberKind.F0, cm(0, Fraction(1, 3), -3), ctx).real, cube_root_two),
        'f0a_inverse': (weber(WeberKind.F0, cm(0, 1, -3), ctx).real, cube_root_two),
    }


def varpi2_closed_forms(ctx: PrecisionContext) -> Dict[str, Tuple[ApproxComplex, ApproxReal]]:
    """ϖ2((3+√-15)/6) = G/(10√3π³) and ϖ2(τ4) = 24 Γ(1/3)^6/(2^(17/3)π^4)."""
    mp = ctx.mp
    G = gamma_product_15(ctx)
    g3 = gamma_third(ctx)
    return {
        'sqrt15': (varpi(2, cm(Fraction(1, 2), Fraction(1, 6), -15), ctx),
                   G / ctx.ball(10 * mp.sqrt(3) * mp.pi ** 3)),
        'tau4': (varpi(2, CHAIN_POINTS['tau4'], ctx),
                 g3 ** 6 * 24 / ctx.ball(mp.mpf(2) ** (mp.mpf(17) / 3) * mp.pi ** 4)),
    }


def varpi2_chain(ctx: PrecisionContext) -> Dict[str, ApproxComplex]:
    """((1-√-3)/2)ϖ2(τ2), ϖ2(τ4), 4ϖ2(τ3) and 2ϖ2(τ1); all four coincide."""
    mp = ctx.mp
    w = lambda name: varpi(2, CHAIN_POINTS[name], ctx)
    return {
        'tau2': w('tau2') * ctx.ball(mp.mpc(1, -mp.sqrt(3)) / 2),
        'tau4': w('tau4'),
        'tau3': w('tau3') * 4,
        'tau1': w('tau1') * 2,
    }
