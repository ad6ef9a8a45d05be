"""Dirichlet and modular L-values, the gamma-product closed forms for the
level 15 and level 12 forms, point counts on y^2 = x^3 + 1 and the local
check of the symmetric-square factorization.
"""
import logging
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from sympy import factorint, isprime, primerange
from sympy.functions.combinatorial.numbers import kronecker_symbol as _kronecker

from .exceptions import DomainError, SignUndeterminedError
from .mpcore import (
    ApproxReal,
    PrecisionContext,
    gamma_product_15,
    gamma_rational,
    gamma_third,
    hurwitz_zeta_int,
    incomplete_gamma_int,
)
from .qseries import BQF, QExpansion, lattice_points, newform_qexp

logger = logging.getLogger('banana')

# Split points of the approximate functional equation used to pin ε.
SIGN_SPLIT_POINTS = (1, 2)
SIGN_PROBE_OFFSET = Fraction(1, 3)


def kronecker_symbol(d: int, n: int) -> int:
    return int(_kronecker(d, n))


def is_fundamental_discriminant(d: int) -> bool:
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return all(e == 1 for e in factorint(abs(d)).values())
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and all(e == 1 for e in factorint(abs(m)).values())
    return False


def bernoulli_one(d: int) -> Fraction:
    """Generalized Bernoulli number B_{1,χ_d} = (1/|d|) Σ_{a=1}^{|d|} χ_d(a) a."""
    k = abs(d)
    return Fraction(sum(kronecker_symbol(d, a) * a for a in range(1, k + 1)), k)


def dirichlet_L(d: int, s: int, ctx: PrecisionContext) -> ApproxReal:
    """L(s, χ_d) for a fundamental discriminant d and integer s >= 1."""
    if not is_fundamental_discriminant(d):
        raise DomainError("d must be a fundamental discriminant", {'d': d})
    if s < 1:
        raise DomainError("dirichlet_L requires s >= 1", {'s': s})
    mp = ctx.mp
    k = abs(d)
    if s == 1:
        if d > 0:
            raise DomainError("s = 1 is only provided for odd characters", {'d': d})
        # L(1, χ) = -π B_{1,χ} / √|d| for odd χ
        value = -mp.pi * ctx.convert(bernoulli_one(d)) / mp.sqrt(k)
        return ctx.ball(value)

    def compute():
        total = None
        for r in range(1, k + 1):
            chi = kronecker_symbol(d, r)
            if chi == 0:
                continue
            term = hurwitz_zeta_int(s, Fraction(r, k), ctx) * chi
            total = term if total is None else total + term
        return total / ctx.convert(k) ** s

    return ctx.memo(('dirichlet_L', d, s), compute)


def catalan_series(ctx: PrecisionContext) -> ApproxReal:
    """Σ (-1)^n/(2n+1)^2 by mpmath's alternating-series acceleration."""
    mp = ctx.mp
    value = mp.nsum(lambda n: (-1) ** int(n) / (2 * n + 1) ** 2, [0, mp.inf])
    return ctx.ball(value, 100 * ctx.eps)


@dataclass(frozen=True)
class NewformData:
    id: str
    level: int
    weight: int

    def coefficients(self, N: int) -> QExpansion:
        return newform_qexp(self.id, N)


NEWFORMS: Dict[str, NewformData] = {
    'f15': NewformData('f15', 15, 3),
    'g12': NewformData('g12', 12, 3),
    'e14': NewformData('e14', 14, 2),
}


def newform_data(form_id: str) -> NewformData:
    if form_id not in NEWFORMS:
        raise DomainError("Unknown newform", {'form': form_id, 'known': sorted(NEWFORMS)})
    return NEWFORMS[form_id]


def afe_terms(form: NewformData, digits: int, split=1) -> int:
    """Smallest M with e^(-2πM c/√N) M^k < 10^(-digits-5), c = min(split, 1/split)."""
    rate = 2 * math.pi * min(split, 1 / split) / math.sqrt(form.level)
    target = (digits + 5) * math.log(10)
    M = 1
    while rate * M - form.weight * math.log(M) < target:
        M += 1
    return M


def _upper_gamma(a, x, ctx: PrecisionContext):
    if isinstance(a, int) and a >= 1:
        return incomplete_gamma_int(a, x, ctx).mid
    return ctx.mp.gammainc(ctx.convert(a), ctx.convert(x))


def _afe_halves(form: NewformData, s, split, ctx: PrecisionContext):
    """(P, Q) with Λ(s) = P + εQ for the approximate functional equation split at y = split."""
    mp = ctx.mp
    N, k = form.level, form.weight
    M = afe_terms(form, ctx.working_digits, split)
    coeffs = form.coefficients(M)
    scale = mp.sqrt(N) / (2 * mp.pi)
    A = ctx.convert(split)
    P = mp.mpf(0)
    Q = mp.mpf(0)
    for n in range(1, M + 1):
        a_n = coeffs.coefficient(n)
        if a_n == 0:
            continue
        x = 2 * mp.pi * n / mp.sqrt(N)
        base = scale / n
        P += a_n * base ** ctx.convert(s) * _upper_gamma(s, x * A, ctx)
        Q += a_n * base ** ctx.convert(k - s) * _upper_gamma(k - s, x / A, ctx)
    logger.debug(f"AFE for {form.id} at s={s}, split={split}: {M} terms")
    return P, Q


_sign_lock = threading.Lock()
_fricke_signs: Dict[str, int] = {}


def fricke_sign(form_id: str, ctx: PrecisionContext) -> int:
    """The sign ε in Λ(s) = εΛ(k-s), fixed by requiring split-point independence."""
    with _sign_lock:
        if form_id in _fricke_signs:
            return _fricke_signs[form_id]
    form = newform_data(form_id)
    mp = ctx.mp
    s0 = Fraction(form.weight, 2) + SIGN_PROBE_OFFSET
    (P1, Q1), (P2, Q2) = (_afe_halves(form, s0, A, ctx) for A in SIGN_SPLIT_POINTS)
    if Q1 == Q2:
        raise SignUndeterminedError("Split points do not separate the two signs", {'form': form_id})
    solved = (P2 - P1) / (Q1 - Q2)
    sign = 1 if solved > 0 else -1
    mismatch = abs((P1 + sign * Q1) - (P2 + sign * Q2)) / max(1, abs(P1 + sign * Q1))
    if abs(solved - sign) > mp.mpf(10) ** (-(ctx.decimal_digits // 2)) or \
            mismatch > mp.mpf(10) ** (-(ctx.decimal_digits // 2)):
        raise SignUndeterminedError(
            "Neither sign makes the functional equation split-independent",
            {'form': form_id, 'solved': mp.nstr(solved, 10)}
        )
    logger.info(f"Fricke sign of {form_id} determined: {sign:+d}")
    with _sign_lock:
        _fricke_signs[form_id] = sign
    return sign


def modular_L(form_id: str, s: int, ctx: PrecisionContext, split=1) -> ApproxReal:
    """L(form, s) from the two-sum approximate functional equation."""
    form = newform_data(form_id)
    if not isinstance(s, int) or s < 1:
        raise DomainError("modular_L requires an integer s >= 1", {'s': s})
    mp = ctx.mp

    def compute():
        sign = fricke_sign(form_id, ctx)
        P, Q = _afe_halves(form, s, split, ctx)
        completed = P + sign * Q
        value = completed / ((mp.sqrt(form.level) / (2 * mp.pi)) ** s * mp.factorial(s - 1))
        return ctx.ball(value, 10 * ctx.eps * max(1, abs(value)) * afe_terms(form, ctx.working_digits, split))

    return ctx.memo(('modular_L', form_id, s, Fraction(split)), compute)


def rwz_closed(form_id: str, ctx: PrecisionContext) -> ApproxReal:
    """L(f15, 2) = Γ(1/15)Γ(2/15)Γ(4/15)Γ(8/15)/(120√3π); L(g12, 2) = Γ(1/3)^6/(2^(17/3)π^2)."""
    mp = ctx.mp
    if form_id == 'f15':
        return gamma_product_15(ctx) / ctx.ball(120 * mp.sqrt(3) * mp.pi)
    if form_id == 'g12':
        return gamma_third(ctx) ** 6 / ctx.ball(mp.mpf(2) ** (mp.mpf(17) / 3) * mp.pi ** 2)
    raise DomainError("No closed form recorded", {'form': form_id, 'known': ['f15', 'g12']})


@lru_cache(maxsize=256)
def ec_ap(p: int) -> int:
    """a_p = p + 1 - #E(F_p) for E: y^2 = x^3 + 1, by counting square roots."""
    if p in (2, 3) or not isprime(p):
        raise DomainError("ec_ap requires a prime of good reduction", {'p': p})
    roots = [0] * p
    for y in range(p):
        roots[y * y % p] += 1
    affine = sum(roots[(x * x * x + 1) % p] for x in range(p))
    return p + 1 - (affine + 1)


GROSSEN_KINDS = ('psi', 'Psi')
GROSSEN_FORM = BQF(1, 0, 3)


def grossen_qexp(kind: str, N: int) -> QExpansion:
    """Lattice sums over m^2 + 3n^2: ψ = ½Σ m χ_{-3}(m) q^(m²+3n²), Ψ = ½Σ (m²-3n²) q^(m²+3n²)."""
    if kind not in GROSSEN_KINDS:
        raise DomainError("Unknown Grössencharacter series", {'kind': kind, 'known': GROSSEN_KINDS})
    if N < 1:
        raise DomainError("Expansion order must be >= 1", {'N': N})
    coeffs = [0] * N
    for m, n, value in lattice_points(GROSSEN_FORM, N):
        if kind == 'psi':
            coeffs[value] += m * kronecker_symbol(-3, m)
        else:
            coeffs[value] += m * m - 3 * n * n
    return QExpansion(0, [Fraction(c, 2) for c in coeffs])


def psi_grossen_ap(p: int) -> int:
    return int(grossen_qexp('psi', p + 1).coefficient(p))


def sym2_local_defect(pmax: int) -> List[Tuple[int, int]]:
    """(p, (a_p^2 - p) - (χ_{-3}(p) p + b_p)) for good primes 5 <= p <= pmax."""
    if pmax < 5:
        raise DomainError("sym2_local_defect requires pmax >= 5", {'pmax': pmax})
    g = newform_qexp('g12', pmax)
    defects = []
    for p in primerange(5, pmax + 1):
        a = ec_ap(p)
        defects.append((p, (a * a - p) - (kronecker_symbol(-3, p) * p + g.coefficient(p))))
    return defects


def sym2_L_value(s: int, ctx: PrecisionContext) -> ApproxReal:
    """L(χ_{-3}, s-1) L(g, s)."""
    if s < 2:
        raise DomainError("sym2_L_value requires s >= 2", {'s': s})
    return dirichlet_L(-3, s - 1, ctx) * modular_L('g12', s, ctx)


def clear_sign_cache(form_id: Optional[str] = None):
    with _sign_lock:
        if form_id is None:
            _fricke_signs.clear()
        else:
            _fricke_signs.pop(form_id, None)
