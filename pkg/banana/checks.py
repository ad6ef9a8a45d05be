"""Registry of identity checks.

Each check evaluates a left and a right side in a fresh PrecisionContext and
passes when they agree to at least its threshold of decimal digits. Exact
checks compare Python objects; record checks only report a value.
"""
import logging
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

from . import eichler, feynman, lfun, mahler, picard_fuchs, qseries, quadrature
from .exceptions import UnknownCheckError
from .mpcore import PrecisionContext, digits_matched, make_context, zeta_int

logger = logging.getLogger('banana')

# Closed-form and modular checks must match to requested digits minus this.
CLOSED_FORM_SLACK = 10

KINDS = ('numeric', 'exact', 'record')
STATUSES = ('pass', 'fail', 'skipped')


@dataclass(frozen=True)
class Check:
    check_id: str
    anchor: str
    evaluate: Callable[[PrecisionContext], Tuple[Any, Any]]
    kind: str = 'numeric'
    cap: Optional[int] = None
    fixed: Optional[int] = None
    halved: bool = False
    slow: bool = False

    def threshold(self, digits: int) -> int:
        if self.kind == 'exact':
            return digits
        if self.kind == 'record':
            return 0
        if self.fixed is not None:
            return self.fixed
        value = digits // 2 - 5 if self.halved else digits - CLOSED_FORM_SLACK
        return min(value, self.cap) if self.cap is not None else value

    @property
    def threshold_label(self) -> str:
        if self.kind == 'exact':
            return 'exact'
        if self.kind == 'record':
            return 'record'
        if self.fixed is not None:
            return str(self.fixed)
        rule = 'digits/2-5' if self.halved else f'digits-{CLOSED_FORM_SLACK}'
        return f"min({rule},{self.cap})" if self.cap is not None else rule


@dataclass
class CheckResult:
    check_id: str
    anchor: str
    lhs: str
    rhs: str
    abs_difference: str
    digits_matched: int
    threshold: int
    runtime_ms: int
    status: str
    error: Optional[str] = None

    def to_dict(self) -> Dict:
        return asdict(self)

    @property
    def passed(self) -> bool:
        return self.status == 'pass'


REGISTRY: Dict[str, Check] = {}


def register(check_id: str, anchor: str, kind: str = 'numeric', **options):
    """Decorator adding an evaluate(ctx) -> (lhs, rhs) function to the registry."""
    if kind not in KINDS:
        raise ValueError(f"unknown check kind {kind}")

    def decorator(evaluate):
        if check_id in REGISTRY:
            raise ValueError(f"duplicate check id {check_id}")
        REGISTRY[check_id] = Check(check_id, anchor, evaluate, kind, **options)
        return evaluate

    return decorator


def list_checks() -> List[Tuple[str, str, str]]:
    return [(c.check_id, c.anchor, c.threshold_label) for c in REGISTRY.values()]


def get_check(check_id: str) -> Check:
    if check_id not in REGISTRY:
        raise UnknownCheckError("Unknown check id", {'check_id': check_id})
    return REGISTRY[check_id]


def _format(value, ctx: PrecisionContext) -> str:
    if value is None:
        return 'n/a'
    if hasattr(value, 'mid'):
        value = value.mid
    if isinstance(value, (ctx.mp.mpf, ctx.mp.mpc)):
        return ctx.mp.nstr(value, ctx.decimal_digits)
    return str(value)


def run_check(check: Check, digits: int) -> CheckResult:
    """Evaluate one check in its own context; any exception marks it failed."""
    start = time.monotonic()
    threshold = check.threshold(digits)
    ctx = None
    try:
        ctx = make_context(digits)
        lhs, rhs = check.evaluate(ctx)
        if check.kind == 'exact':
            matched = digits if lhs == rhs else 0
            difference = '0' if lhs == rhs else 'nonzero'
        elif check.kind == 'record':
            matched = 0
            difference = 'n/a'
        else:
            matched = digits_matched(lhs, rhs, ctx)
            difference = ctx.mp.nstr(abs(ctx.convert(lhs) - ctx.convert(rhs)), 5)
        status = 'pass' if matched >= threshold else 'fail'
        result = CheckResult(check.check_id, check.anchor, _format(lhs, ctx), _format(rhs, ctx),
                             difference, matched, threshold, _elapsed_ms(start), status)
    except Exception as e:
        logger.error(f"Check {check.check_id} raised: {e}", exc_info=True)
        result = CheckResult(check.check_id, check.anchor, 'n/a', 'n/a', 'n/a', 0, threshold,
                             _elapsed_ms(start), 'fail', error=str(e))
    logger.info(f"{check.check_id}: {result.status} ({result.digits_matched}/{threshold} digits, "
                f"{result.runtime_ms} ms)")
    return result


def skipped_result(check: Check, digits: int, reason: str) -> CheckResult:
    return CheckResult(check.check_id, check.anchor, 'n/a', 'n/a', 'n/a', 0,
                       check.threshold(digits), 0, 'skipped', error=reason)


def _elapsed_ms(start: float) -> int:
    return int((time.monotonic() - start) * 1000)


def _max_abs(values, ctx: PrecisionContext):
    return max(abs(ctx.convert(v)) for v in values)


# ---------------------------------------------------------------------------
# I(1) and the level 12 identities
# ---------------------------------------------------------------------------

@register('thm1.1', r"I(1)=\frac{12\pi}{\sqrt{15}}L(f,2)")
def _thm11(ctx):
    mp = ctx.mp
    return feynman.I_cm(1, ctx), lfun.modular_L('f15', 2, ctx) * ctx.ball(12 * mp.pi / mp.sqrt(15))


@register('thm1.1.closed', r"I(1)=\frac{12\pi}{\sqrt{15}}\frac{\Gamma(1/15)\Gamma(2/15)\Gamma(4/15)\Gamma(8/15)}{120\sqrt{3}\pi}")
def _thm11_closed(ctx):
    return feynman.I_cm(1, ctx), feynman.I_closed(1, ctx)


@register('thm1.1.reduced', r"I(1)=-\frac{(2\pi i)^3}{8\sqrt{-15}}\varpi_2(\frac{3+\sqrt{-15}}{6})")
def _thm11_reduced(ctx):
    return feynman.I1_reduced(ctx), feynman.I_cm(1, ctx)


@register('thm1.2.sum', r"I(-32)+I(16)=\frac{36\pi}{\sqrt{12}}L(g,2)")
def _thm12_sum(ctx):
    mp = ctx.mp
    lhs = feynman.I_cm(-32, ctx) + feynman.I_cm(16, ctx)
    return lhs, lfun.modular_L('g12', 2, ctx) * ctx.ball(36 * mp.pi / mp.sqrt(12))


@register('thm1.2.double', r"I(16)=2I(4)")
def _thm12_double(ctx):
    return feynman.I_cm(16, ctx), feynman.I_cm(4, ctx) * 2


@register('thm1.2.difference', r"I(16)=8(I(-2)-I(-32))")
def _thm12_difference(ctx):
    return feynman.I_cm(16, ctx), (feynman.I_cm(-2, ctx) - feynman.I_cm(-32, ctx)) * 8


@register('thm1.2.varpi', r"I(-32)+I(16)=\frac{\sqrt{3}\pi^3}{4}\varpi_2(\tau_4)")
def _thm12_varpi(ctx):
    mp = ctx.mp
    w4 = qseries.varpi(2, qseries.CHAIN_POINTS['tau4'], ctx).real
    return feynman.I_cm(-32, ctx) + feynman.I_cm(16, ctx), w4 * ctx.ball(mp.sqrt(3) * mp.pi ** 3 / 4)


@register('thm1.2.sym2', r"I(-32)+I(16)=54L(\mathrm{Sym}^2E,2)=54L(\chi_{-3},1)L(g,2)")
def _thm12_sym2(ctx):
    return feynman.I_cm(-32, ctx) + feynman.I_cm(16, ctx), lfun.sym2_L_value(2, ctx) * 54


def _closed_check(t: int, label: str):
    @register(f'thm1.2.closed_{label}', f"I({t}) = closed form in ϖ2(τ4), ζ(3), F3(√-3/3), F3(√-3)")
    def evaluate(ctx):
        return feynman.I_cm(t, ctx), feynman.I_closed(t, ctx)

    @register(f'thm1.2.lattice_{label}', f"I({t}) = ϖ2(τ4)-expression through ψ-weighted lattice sums")
    def evaluate_lattice(ctx):
        return feynman.I_lattice(t, ctx), feynman.I_closed(t, ctx)


for _t, _label in ((16, '16'), (4, '4'), (-2, 'm2'), (-32, 'm32')):
    _closed_check(_t, _label)


@register('thm1.2.varpi2_chain', r"\frac{1-\sqrt{-3}}{2}\varpi_2(\tau_2)=\varpi_2(\tau_4)=4\varpi_2(\tau_3)=2\varpi_2(\tau_1)")
def _varpi2_chain(ctx):
    chain = qseries.varpi2_chain(ctx)
    reference = chain['tau4']
    worst = max((chain[k] for k in ('tau2', 'tau3', 'tau1')),
                key=lambda v: abs(ctx.convert(v) - ctx.convert(reference)))
    return worst, reference


# ---------------------------------------------------------------------------
# eta, Weber and ϖ2 at CM points
# ---------------------------------------------------------------------------

LEMMA_ANCHORS = {
    'eta15a': r"|\eta(\frac{3+\sqrt{-15}}{2})|^4=\frac{\Gamma(1/15)\Gamma(2/15)\Gamma(4/15)\Gamma(8/15)}{120\pi^3}\phi^{-1/3}",
    'eta15b': r"|\eta(\frac{3+\sqrt{-15}}{6})|^4=\frac{\Gamma(1/15)\Gamma(2/15)\Gamma(4/15)\Gamma(8/15)}{40\pi^3}\phi^{1/3}",
    'f2a': r"|f_2(\frac{3+\sqrt{-15}}{2})f_2(\frac{3+\sqrt{-15}}{6})|=1",
    'eta3a': r"|\eta(\frac{3+\sqrt{-3}}{2})|=3^{1/8}\frac{\Gamma(1/3)^{3/2}}{2\pi}",
    'eta3b': r"|\eta(\frac{3+\sqrt{-3}}{6})|=3^{3/8}\frac{\Gamma(1/3)^{3/2}}{2\pi}",
    'f2b': r"|f_2(\frac{3+\sqrt{-3}}{2})|=2^{1/6}",
    'f2b_sixth': r"|f_2(\frac{3+\sqrt{-3}}{6})|=2^{1/6}",
    'f0a': r"f_0(\frac{\sqrt{-3}}{3})=2^{1/3}",
    'f0a_inverse': r"f_0(\sqrt{-3})=2^{1/3}",
}


def _lemma_check(key: str):
    @register(f'lemma2.1.e_{key}', LEMMA_ANCHORS[key])
    def evaluate(ctx):
        return qseries.eta_cm_evaluations(ctx)[key]


for _key in LEMMA_ANCHORS:
    _lemma_check(_key)


@register('lemma2.1.varpi2_sqrt15', r"\varpi_2(\frac{3+\sqrt{-15}}{6})=\frac{\Gamma(1/15)\Gamma(2/15)\Gamma(4/15)\Gamma(8/15)}{10\sqrt{3}\pi^3}")
def _varpi2_sqrt15(ctx):
    return qseries.varpi2_closed_forms(ctx)['sqrt15']


@register('lemma2.1.varpi2_tau4', r"\varpi_2(\tau_4)=\frac{24\Gamma(1/3)^6}{2^{17/3}\pi^4}")
def _varpi2_tau4(ctx):
    return qseries.varpi2_closed_forms(ctx)['tau4']


@register('qseries.fricke_varpi', r"\varpi_1(-1/(6\tau))=-\frac{3}{4}\tau^2\varpi_2(\tau)")
def _fricke_varpi(ctx):
    tau = qseries.cm_point(1)
    return qseries.varpi_fricke_defect(tau, ctx), 0


@register('qseries.fricke_eta', r"\eta(-2/(6\tau))=\sqrt{-3i\tau}\,\eta(3\tau)")
def _fricke_eta(ctx):
    tau = ctx.mpc(Fraction(1, 10), Fraction(2, 5))
    return qseries.fricke_eta_defect(2, 6, tau, ctx), 0


def _hauptmodul_check(t: int):
    label = f"m{-t}" if t < 0 else str(t)

    @register(f'qseries.t_at_cm_{label}', f"t(τ) = {t} at τ = {qseries.cm_point(t)}")
    def evaluate(ctx):
        return qseries.hauptmodul_t(qseries.cm_point(t), ctx), t


for _t in sorted(qseries.CM_TABLE):
    _hauptmodul_check(_t)


# ---------------------------------------------------------------------------
# exact q-expansion identities
# ---------------------------------------------------------------------------

@register('eisenstein.e4_halfshift', r"E_4(z+\frac12)+E_4(z)-18E_4(2z)+16E_4(4z)=0", kind='exact')
def _e4_halfshift(ctx):
    combination = qseries.e4_halfshift_combination(200)
    return [j for j, c in enumerate(combination.coeffs) if c != 0], []


@register('qseries.f15_dual', r"\eta(\tau)\eta(3\tau)\eta(5\tau)\eta(15\tau)\theta_{1,1,4}=\eta(3\tau)^3\eta(5\tau)^3+\eta(\tau)^3\eta(15\tau)^3", kind='exact')
def _f15_dual(ctx):
    theta, cubes = qseries.f15_constructions(500)
    return theta.first_mismatch(cubes), None


@register('qseries.grossen_Psi', r"\Psi(q)=\frac12\sum(m^2-3n^2)q^{m^2+3n^2}=g(q)", kind='exact')
def _grossen_Psi(ctx):
    Psi = lfun.grossen_qexp('Psi', 500)
    g = qseries.newform_qexp('g12', 499)
    return [n for n in range(1, 500) if Psi.coefficient(n) != g.coefficient(n)], []


@register('qseries.grossen_psi_start', r"\psi(q)=q-4q^7+2q^{13}+O(q^{19})", kind='exact')
def _grossen_psi_start(ctx):
    psi = lfun.grossen_qexp('psi', 19)
    return {n: psi.coefficient(n) for n in range(19) if psi.coefficient(n) != 0}, {1: 1, 7: -4, 13: 2}


@register('qseries.hecke_e14', r"e(q)=\eta(\tau)\eta(2\tau)\eta(7\tau)\eta(14\tau)\ \text{is a Hecke eigenform}", kind='exact')
def _hecke_e14(ctx):
    return qseries.hecke_multiplicativity_defects(qseries.newform_qexp('e14', 400)), []


# ---------------------------------------------------------------------------
# F3 and the cotangent series
# ---------------------------------------------------------------------------

PROP31_POINTS = (
    (Fraction(1, 7), Fraction(1)), (Fraction(-1, 3), Fraction(9, 10)), (Fraction(2, 5), Fraction(6, 5)),
    (Fraction(-1, 5), Fraction(1)), (Fraction(1, 4), Fraction(4, 5)), (Fraction(3, 8), Fraction(1)),
    (Fraction(-2, 7), Fraction(11, 10)), (Fraction(0), Fraction(7, 8)), (Fraction(1, 9), Fraction(13, 10)),
    (Fraction(-3, 10), Fraction(3, 4)),
)
EICHLER_POINTS = PROP31_POINTS[:5]


@register('prop3.1.inversion', r"F_3(\tau)-\tau^2F_3(-1/\tau)=\frac{\zeta(3)}{2}(\tau^2-1)+\frac{(2\pi i)^3}{2\tau}\sum_j\frac{B_{2j}B_{4-2j}}{(2j)!(4-2j)!}\tau^{2j}")
def _inversion(ctx):
    defects = [eichler.inversion_defect(ctx.mpc(x, y), ctx) for x, y in PROP31_POINTS]
    return _max_abs(defects, ctx), 0


@register('prop3.1.halfshift', r"F_3(\tau+\frac12)+F_3(\tau)=\frac94F_3(2\tau)-\frac14F_3(4\tau)")
def _halfshift(ctx):
    defects = [eichler.halfshift_defect(ctx.mpc(x, y), ctx) for x, y in PROP31_POINTS]
    return _max_abs(defects, ctx), 0


@register('prop3.1.eichler_integral', r"F_s(\tau)=\frac{(2\pi i)^sB_{s+1}}{2(s+1)(s-1)!}\int_\tau^{i\infty}E_{s+1}(z)(z-\tau)^{s-1}dz", cap=60)
def _eichler_integral(ctx):
    worst = None
    for x, y in EICHLER_POINTS:
        tau = ctx.mpc(x, y)
        pair = (eichler.F3(tau, ctx), eichler.grosswald_F_integral(tau, ctx))
        gap = abs(ctx.convert(pair[0]) - ctx.convert(pair[1]))
        if worst is None or gap > worst[0]:
            worst = (gap, pair)
    return worst[1]


F3_ANCHORS = {
    'sqrt3_half_shift': ('e_F3a', r"F_3(\frac{1+\sqrt{-3}}{2})=\frac{\sqrt3\pi^3}{90}-\frac{\zeta(3)}{2}"),
    'sqrt3_sixth_half_shift': ('e_F3b', r"F_3(\frac12+\frac{\sqrt{-3}}{6})=\frac{7\sqrt3\pi^3}{810}-\frac{\zeta(3)}{2}"),
    'sqrt3_combination': ('e_F3c', r"8(3F_3(\frac{\sqrt{-3}}{6})-F_3(\frac{\sqrt{-3}}{2}))-9(3F_3(\frac{\sqrt{-3}}{3})-F_3(\sqrt{-3}))=\frac{7\sqrt3\pi^3}{135}+\zeta(3)"),
    'sqrt15_combination': ('e_F3d', r"24F_3(\frac12+\frac{\sqrt{-15}}{6})-8F_3(\frac{1+\sqrt{-15}}{2})-3F_3(\frac{\sqrt{-15}}{3})+F_3(\sqrt{-15})=\frac{\pi^3}{\sqrt{15}}-7\zeta(3)"),
}


def _f3_check(key: str):
    label, anchor = F3_ANCHORS[key]

    @register(f'lemma3.2.{label}', anchor)
    def evaluate(ctx):
        return eichler.f3_closed_forms(ctx)[key]


for _key in F3_ANCHORS:
    _f3_check(_key)


@register('lemma3.2.relations_sqrt15', "five F3 transformation relations at √-15 points and their sum")
def _relations_sqrt15(ctx):
    return _max_abs([d for _, d in eichler.f3_chain_sqrtm15(ctx)], ctx), 0


@register('lemma3.2.relations_sqrt3', "4F3((1+√-3)/2) and 12F3(1/2+√-3/6) in terms of F3 on the imaginary axis")
def _relations_sqrt3(ctx):
    return _max_abs([d for _, d in eichler.f3c_chain_sqrtm3(ctx)], ctx), 0


@register('remark.xi_sqrt15', r"24\xi_3(\frac{h}{6}+\frac12)-8\xi_3(\frac{h}{2}+\frac12)-3\xi_3(\frac{h}{3})+\xi_3(h)=-\frac{2\pi^3i}{\sqrt{15}},\ h=\sqrt{-15}")
def _xi_sqrt15(ctx):
    return eichler.xi_sqrt15_combination(ctx)


@register('remark.tan_sqrt15', r"3\sum_{n\ odd}\frac{\tan(\pi n\sqrt{-15}/6)}{n^3}-\sum_{n\ odd}\frac{\tan(\pi n\sqrt{-15}/2)}{n^3}=\frac{\pi^3i}{4\sqrt{15}}")
def _tan_sqrt15(ctx):
    return eichler.tan_sqrt15_combination(ctx)


@register('remark.xi_displayed', r"3\xi_3(\frac{\sqrt{-15}}{6})-\xi_3(\frac{\sqrt{-15}}{2})-24\xi_3(\frac{\sqrt{-15}}{12})+8\xi_3(\frac{\sqrt{-15}}{4})", kind='record')
def _xi_displayed(ctx):
    mp = ctx.mp
    h = 1j * mp.sqrt(15)
    xi = lambda tau: eichler.xi_cotangent(3, tau, ctx)
    value = xi(h / 6) * 3 - xi(h / 2) - xi(h / 12) * 24 + xi(h / 4) * 8
    return value, ctx.ball(2j * mp.pi ** 3 / mp.sqrt(15))


# ---------------------------------------------------------------------------
# lattice sums
# ---------------------------------------------------------------------------

@register('lattice.psi_dirichlet', r"\sum_{n\ge1}\psi(n)n^{-3}=32\zeta(3)")
def _psi_dirichlet(ctx):
    return eichler.psi_dirichlet_direct(3, 600, ctx), zeta_int(3, ctx) * 32


@register('lattice.S_chain', "S via T + 5ζ(4) and the Poisson chain = S by partial fractions in n")
def _S_chain(ctx):
    return eichler.lattice_S('chain', ctx), eichler.psi_lattice_sum(24, 6, ctx)


@register('lattice.S_closed', r"\sum_{m,n\ge1}\frac{\psi(n)}{n^2}(\frac{1}{24m^2-6mn+n^2}+\frac{1}{24m^2+6mn+n^2})=11\zeta(4)")
def _S_closed(ctx):
    return eichler.psi_lattice_sum(24, 6, ctx), zeta_int(4, ctx) * 11


@register('lattice.T_chain', r"-\frac{1}{96}\sum_{m\ge1,n}\frac{\psi(n)}{m^2(24m^2+6mn+n^2)}=6\zeta(4)")
def _T_chain(ctx):
    return eichler.lattice_T('chain', ctx), zeta_int(4, ctx) * 6


@register('lattice.S_direct', "S = 11ζ(4) by brute-force summation", cap=12)
def _S_direct(ctx):
    return eichler.lattice_S('direct', ctx), zeta_int(4, ctx) * 11


@register('lattice.T_direct', "T = 6ζ(4) by cotangent collapse in n and explicit m")
def _T_direct(ctx):
    return eichler.lattice_T('direct', ctx), zeta_int(4, ctx) * 6


@register('lattice.sieve', r"-\frac{1}{48}\psi\ \text{sieves}\ \frac{1}{n^2}\to\frac{1}{n^2}-\frac{16}{(2n)^2}-\frac{9}{(3n)^2}+\frac{144}{(6n)^2}")
def _sieve(ctx):
    return eichler.sieve_defect((24, 6, 1), ctx), 0


@register('lattice.sieve_3_3_1', "ψ sieve on m²(3m²+3mn+n²): defect 0")
def _sieve_3_3_1(ctx):
    return eichler.sieve_defect((3, 3, 1), ctx), 0


@register('lattice.sieve_12_0_1', "ψ sieve on m²(12m²+n²): defect 0")
def _sieve_12_0_1(ctx):
    return eichler.sieve_defect((12, 0, 1), ctx), 0


def _poisson_check(pair_id: int):
    (a, b, c), k, _ = eichler.POISSON_FORMS[pair_id]

    @register(f'lattice.poisson_{pair_id}',
              f"Σ 1/(m²({a}m²+{b}mn+{c}n²)) = ({k}π/√15)(2F3(τ0)+ζ(3))")
    def evaluate(ctx):
        return eichler.poisson_pair(pair_id, ctx)


for _pair in sorted(eichler.POISSON_FORMS):
    _poisson_check(_pair)


@register('feynman.sigma_convolution', r"\sigma(q)=-24+\sum_n q^n\sum_{d|n}\psi(d)(n/d)^3", kind='exact')
def _sigma_convolution(ctx):
    return eichler.sigma_psi_convolution_defect(300), []


# ---------------------------------------------------------------------------
# L-values
# ---------------------------------------------------------------------------

@register('rwz.f15', r"L(f,2)=\frac{\Gamma(1/15)\Gamma(2/15)\Gamma(4/15)\Gamma(8/15)}{120\sqrt3\pi}")
def _rwz_f15(ctx):
    return lfun.modular_L('f15', 2, ctx), lfun.rwz_closed('f15', ctx)


@register('rwz.g12', r"L(g,2)=\frac{\Gamma(1/3)^6}{2^{17/3}\pi^2}")
def _rwz_g12(ctx):
    return lfun.modular_L('g12', 2, ctx), lfun.rwz_closed('g12', ctx)


@register('lfun.catalan', r"L(\chi_{-4},2)=\sum_{n\ge0}\frac{(-1)^n}{(2n+1)^2}")
def _catalan(ctx):
    return lfun.dirichlet_L(-4, 2, ctx), lfun.catalan_series(ctx)


@register('lfun.afe_split', "L(f,4) is independent of the functional-equation split point")
def _afe_split(ctx):
    return lfun.modular_L('f15', 4, ctx), lfun.modular_L('f15', 4, ctx, split=Fraction(3, 2))


@register('sym2.local', r"L(\mathrm{Sym}^2E,s)=L(\chi_{-3},s-1)L(g,s)\ \text{locally at}\ p\le1000", kind='exact')
def _sym2_local(ctx):
    return [p for p, d in lfun.sym2_local_defect(1000) if d != 0], []


@register('sym2.ap_psi', r"a_p(y^2=x^3+1)=[q^p]\psi(q)\ \text{for good}\ p", kind='exact')
def _sym2_ap_psi(ctx):
    from sympy import primerange
    return [p for p in primerange(5, 300) if lfun.psi_grossen_ap(p) != lfun.ec_ap(p)], []


# ---------------------------------------------------------------------------
# differential equations
# ---------------------------------------------------------------------------

@register('sym2.operator', "is the symmetric square of", kind='exact')
def _sym2_operator(ctx):
    lhs = picard_fuchs.monicize(picard_fuchs.pf_L3())
    rhs = picard_fuchs.symmetric_square(picard_fuchs.pf_L2())
    return lhs == rhs, True


@register('pf.moments', r"\mathcal{L}^3_t\sum_k c_kt^{-k-1}=0,\ c_k=\sum_j\binom{k}{j}^2\binom{2j}{j}\binom{2k-2j}{k-j}", kind='exact')
def _pf_moments(ctx):
    return picard_fuchs.pf_L3_annihilates_moments(60), []


@register('pf.r_relation', r"t-4=-\frac{(1-3r)^2}{r}", kind='exact')
def _pf_r_relation(ctx):
    return picard_fuchs.r_relation_defect(), 0


@register('pf.L3_inhomogeneous_m2', r"\mathcal{L}_t^3I(t)=-24\ \text{at}\ t=-2", halved=True, cap=20)
def _L3_m2(ctx):
    return feynman.apply_L3_numeric(-2, ctx), -24


@register('pf.L3_inhomogeneous_2', r"\mathcal{L}_t^3I(t)=-24\ \text{at}\ t=2", halved=True, cap=20)
def _L3_2(ctx):
    return feynman.apply_L3_numeric(2, ctx), -24


@register('pf.L3_series', r"\mathcal{L}_t^3u(t)=0\ \text{(moment series, t=-32)}")
def _L3_series(ctx):
    return feynman.series_L3_residual(-32, ctx), 0


@register('pf.L3_torus', r"\mathcal{L}_t^3u(t)=0\ \text{(torus quadrature, t=20)}", cap=15)
def _L3_torus(ctx):
    return quadrature.torus_L3_residual(20, ctx), 0


@register('pf.torus_vs_series', "u(-32): torus quadrature = moment series", cap=20)
def _torus_vs_series(ctx):
    return quadrature.period_u_torus(-32, quadrature.TORUS_PERIOD_GRID, ctx).real, feynman.period_u_series(-32, ctx)


# ---------------------------------------------------------------------------
# further representations of I
# ---------------------------------------------------------------------------

@register('feynman.sigma_integral', r"I(t(\tau))=\varpi_1(\tau)(-336\zeta(3)\tau^2+\frac12\int_1^q\log^2(\hat q/q)\sigma(\hat q)d\log\hat q)")
def _sigma_integral(ctx):
    tau = qseries.cm_point(1)
    return feynman.I_eichler(tau, ctx), feynman.I_modular(tau, ctx)


@register('feynman.naive_sum', r"D(\tau)=\sum_{m\in\mathbb{Z},n\ge1}\frac{\psi(n)/n^2}{m^2-n^2\tau^2}\ \text{by brute force}", fixed=4, slow=True)
def _naive_sum(ctx):
    tau = qseries.cm_point(1)
    return feynman.I_modular_naive(tau, ctx), feynman.I_modular(tau, ctx)


@register('feynman.re_I64', r"\mathrm{Re}\,I(64)=\frac{L(f,2)}{8\pi^2}(\frac{43\sqrt{15}\pi^3}{15}-45\zeta(3)-45(3F_3(\frac{\sqrt{-15}}{3})-F_3(\sqrt{-15})))", cap=50)
def _re_I64(ctx):
    return feynman.re_I64(ctx), feynman.re_I64_closed(ctx)


@register('feynman.re_I64_positive', r"\mathrm{Re}\,I(64)>0", kind='exact')
def _re_I64_positive(ctx):
    return feynman.re_I64(ctx).mid > 0, True


# ---------------------------------------------------------------------------
# Mahler measures
# ---------------------------------------------------------------------------

MAHLER_LABELS = {16: '16', 4: '4', -32: 'm32', -2: 'm2', 1: '1'}


def _mahler_check(t: int):
    @register(f'mahler.m{MAHLER_LABELS[t]}', mahler.MAHLER_FORMULAS[t])
    def evaluate(ctx):
        return mahler.mahler_cm(t, ctx), mahler.mahler_closed(t, ctx)


for _t in mahler.MAHLER_CM_POINTS:
    _mahler_check(_t)


@register('mahler.m16_4m4', "m(16) = 4 m(4)")
def _m16_4m4(ctx):
    return mahler.mahler_cm(16, ctx), mahler.mahler_cm(4, ctx) * 4


@register('mahler.bertin', "m(4) = 2(m(-32) - 2m(-2))")
def _bertin(ctx):
    return mahler.mahler_cm(4, ctx), (mahler.mahler_cm(-32, ctx) - mahler.mahler_cm(-2, ctx) * 2) * 2


def _mahler_direct_check(t: int):
    @register(f'mahler.direct_P{MAHLER_LABELS[t]}', f"m(P_{t}) by torus quadrature = mahler_q", fixed=4, slow=True)
    def evaluate(ctx):
        return mahler.mahler_direct('P3', t, ctx), mahler.mahler_cm(t, ctx)


for _t in (16, -2):
    _mahler_direct_check(_t)


def _sunset_check(t: int):
    label = f"m{-t}" if t < 0 else str(t)
    ratio = mahler.SUNSET_RATIOS[t]

    @register(f'mahler.sunset_{label}', f"m(S_{t}) = {ratio} (21/π²) L(e,2)", fixed=4, slow=True)
    def evaluate(ctx):
        return mahler.mahler_direct('S2', t, ctx), mahler.mahler_sunset_closed(t, ctx)


for _t in sorted(mahler.SUNSET_RATIOS):
    _sunset_check(_t)


@register('mahler.linear5', r"m(1+x_1+x_2+x_3+x_4)=6(\frac{\sqrt{15}}{2\pi})^5L(f,4)", fixed=6, slow=True)
def _linear5(ctx):
    return mahler.linear5_pair(ctx)


@register('mahler.linear5_tail', "Bessel integral unchanged when the oscillatory tail starts at half the split", fixed=8, slow=True)
def _linear5_tail(ctx):
    return mahler.mahler_linear5(ctx, tail_halved=True), mahler.mahler_linear5(ctx)


@register('mahler.linear5_direct', "m(1+x1+x2+x3+x4): Bessel integral = torus quadrature", fixed=3, slow=True)
def _linear5_direct(ctx):
    return mahler.mahler_linear5_direct(ctx), mahler.mahler_linear5(ctx)


# ---------------------------------------------------------------------------
# direct quadrature
# ---------------------------------------------------------------------------

@register('quad.I0', r"I(0)=7\zeta(3)", fixed=6, slow=True)
def _quad_I0(ctx):
    return quadrature.I_direct(0, ctx), zeta_int(3, ctx) * 7


@register('quad.I1', r"I(1)\ \text{by quadrature}=\frac{12\pi}{\sqrt{15}}L(f,2)", fixed=5, slow=True)
def _quad_I1(ctx):
    return quadrature.I_direct(1, ctx), feynman.I_closed(1, ctx)


@register('quad.I_m2', r"I(-2)\ \text{by quadrature = closed form}", fixed=5, slow=True)
def _quad_Im2(ctx):
    return quadrature.I_direct(-2, ctx), feynman.I_closed(-2, ctx)


@register('quad.J_8_2', r"J(8)=2J(2)", fixed=4, slow=True)
def _quad_J(ctx):
    return quadrature.J_sunset(8, ctx), quadrature.J_sunset(2, ctx) * 2


@register('quad.J_m7_ratio', r"J(-7)/J(2)", kind='record', slow=True)
def _quad_J_ratio(ctx):
    return quadrature.J_sunset(-7, ctx) / quadrature.J_sunset(2, ctx), None
