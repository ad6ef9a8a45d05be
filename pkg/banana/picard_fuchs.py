"""Linear differential operators with rational-function coefficients.

Coefficients are sympy expressions in a single symbol, kept canonical with
``cancel``; all identities here are exact.
"""
import logging
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import sympy as sp

from .exceptions import DomainError, OperatorOrderError

logger = logging.getLogger('banana')

t = sp.Symbol('t')
r = sp.Symbol('r')


class DiffOperator:
    """Σ_j c_j(x) (d/dx)^j with c_r != 0."""

    def __init__(self, coeffs: Sequence, var: sp.Symbol = t):
        coeffs = [sp.cancel(sp.sympify(c)) for c in coeffs]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs or coeffs[-1] == 0:
            raise OperatorOrderError("Operator has no nonzero coefficient")
        self.coeffs: Tuple = tuple(coeffs)
        self.var = var

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1]

    def __eq__(self, other):
        if not isinstance(other, DiffOperator) or self.var != other.var or self.order != other.order:
            return False
        return all(sp.cancel(a - b) == 0 for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.var, self.order))

    def __repr__(self):
        terms = ', '.join(str(c) for c in self.coeffs)
        return f"DiffOperator(order={self.order}, [{terms}])"

    def apply(self, f):
        """Apply to a sympy expression in the operator variable."""
        return sp.cancel(sum(c * sp.diff(f, self.var, j) for j, c in enumerate(self.coeffs)))

    def coefficients_at(self, x0) -> List:
        """Coefficient values at x0 (exact for rational x0)."""
        return [c.subs(self.var, x0) for c in self.coeffs]

    def numeric_coefficients(self, x0, ctx) -> List:
        """Coefficients evaluated at an mpmath number in the given context."""
        result = []
        for c in self.coeffs:
            num, den = sp.fraction(sp.together(c))
            num_poly = sp.Poly(num, self.var)
            den_poly = sp.Poly(den, self.var)
            result.append(_poly_eval(num_poly, x0, ctx) / _poly_eval(den_poly, x0, ctx))
        return result

    def polynomial_coefficients(self) -> List[sp.Poly]:
        """Coefficients multiplied by the lcm of their denominators."""
        common = sp.lcm([sp.fraction(sp.together(c))[1] for c in self.coeffs])
        return [sp.Poly(sp.cancel(c * common), self.var) for c in self.coeffs]


def _poly_eval(poly: sp.Poly, x0, ctx):
    value = ctx.mp.mpf(0)
    for c in poly.all_coeffs():
        value = value * x0 + ctx.convert(Fraction(int(sp.numer(c)), int(sp.denom(c))))
    return value


def monicize(op: DiffOperator) -> DiffOperator:
    """Divide every coefficient by the leading one."""
    lead = op.leading
    return DiffOperator([c / lead for c in op.coeffs], op.var)


def symmetric_square(op2: DiffOperator) -> DiffOperator:
    """Monic operator annihilating products of solutions of D² + pD + q."""
    if op2.order != 2:
        raise OperatorOrderError("symmetric_square expects an order 2 operator", {'order': op2.order})
    monic = monicize(op2)
    q, p = monic.coeffs[0], monic.coeffs[1]
    x = op2.var
    return DiffOperator([
        4 * p * q + 2 * sp.diff(q, x),
        sp.diff(p, x) + 2 * p ** 2 + 4 * q,
        3 * p,
        1,
    ], x)


def pf_L3() -> DiffOperator:
    return DiffOperator([
        t - 4,
        7 * t ** 2 - 68 * t + 64,
        6 * t * (t ** 2 - 15 * t + 32),
        t ** 2 * (t - 4) * (t - 16),
    ])


def pf_L2() -> DiffOperator:
    return DiffOperator([
        (t - 8) / sp.Integer(4),
        2 * (t ** 2 - 15 * t + 32),
        t * (t - 4) * (t - 16),
    ])


def pf_L2a() -> DiffOperator:
    """Picard-Fuchs operator of xy - r(x+y+1)(xy+y+x) = 0 in the parameter r."""
    return DiffOperator([
        9 * r - 3,
        27 * r ** 2 - 20 * r + 1,
        r * (r - 1) * (9 * r - 1),
    ], r)


def r_of_t(t_value):
    """r(t) = (10 - t + sqrt(t² - 20t + 64))/18, exact for rational t."""
    t_value = sp.nsimplify(t_value)
    return sp.nsimplify((10 - t_value + sp.sqrt(t_value ** 2 - 20 * t_value + 64)) / 18)


def r_relation_defect():
    """(t - 4) r + (1 - 3r)² with r = r(t), reduced modulo s² = t² - 20t + 64."""
    s = sp.Symbol('s')
    r_t = (10 - t + s) / 18
    expr = sp.expand((t - 4) * r_t + (1 - 3 * r_t) ** 2)
    return sp.expand(sp.rem(expr, s ** 2 - (t ** 2 - 20 * t + 64), s))


def laurent_apply(op: DiffOperator, coeffs: Sequence[int], shift: int = 1) -> Dict[int, Fraction]:
    """Apply op to Σ_k coeffs[k] x^(-k-shift); returns exponent -> coefficient.

    Only exponents fully determined by the given coefficients are returned.
    """
    polys = op.polynomial_coefficients()
    contributions: Dict[int, Fraction] = {}
    top = None
    for j, poly in enumerate(polys):
        for (i,), c in poly.terms():
            c = Fraction(int(sp.numer(c)), int(sp.denom(c)))
            top = i - j - shift if top is None else max(top, i - j - shift)
            for k, a in enumerate(coeffs):
                e = -k - shift
                falling = 1
                for m in range(j):
                    falling *= e - m
                exponent = e - j + i
                contributions[exponent] = contributions.get(exponent, 0) + c * falling * a
    floor = top - len(coeffs) + 1
    return {e: v for e, v in contributions.items() if e >= floor}


def moment_coefficient(k: int) -> int:
    """c_k = Σ_j C(k,j)² C(2j,j) C(2k-2j,k-j)."""
    if k < 0:
        raise DomainError("Moment index must be nonnegative", {'k': k})
    return sum(sp.binomial(k, j) ** 2 * sp.binomial(2 * j, j) * sp.binomial(2 * k - 2 * j, k - j)
               for j in range(k + 1))


def pf_L3_annihilates_moments(N: int) -> List[int]:
    """Exponents where L³ applied to Σ c_k t^(-k-1) leaves a nonzero coefficient."""
    if N < 1:
        raise DomainError("N must be >= 1", {'N': N})
    coeffs = [int(moment_coefficient(k)) for k in range(N)]
    result = laurent_apply(pf_L3(), coeffs)
    return sorted(e for e, v in result.items() if v != 0)


def fornberg_weights(offsets: Sequence[int], order: int) -> List[Fraction]:
    """Exact finite-difference weights for the order-th derivative at 0 on integer offsets."""
    n = len(offsets)
    if order >= n:
        raise DomainError("Stencil too small for the derivative order", {'points': n, 'order': order})
    x = [Fraction(o) for o in offsets]
    # c[m][j]: weight of node j for the m-th derivative
    c = [[Fraction(0)] * n for _ in range(order + 1)]
    c[0][0] = Fraction(1)
    c1 = Fraction(1)
    for i in range(1, n):
        c2 = Fraction(1)
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for m in range(min(i, order), 0, -1):
                    c[m][i] = c1 * (m * c[m - 1][i - 1] - x[i - 1] * c[m][i - 1]) / c2
                c[0][i] = -c1 * x[i - 1] * c[0][i - 1] / c2
            for m in range(min(i, order), 0, -1):
                c[m][j] = (x[i] * c[m][j] - m * c[m - 1][j]) / c3
            c[0][j] = x[i] * c[0][j] / c3
        c1 = c2
    return c[order]
