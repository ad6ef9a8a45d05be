"""Tests for the check registry and single-check evaluation."""
import pytest

from banana.checks import (
    CLOSED_FORM_SLACK,
    REGISTRY,
    Check,
    get_check,
    list_checks,
    register,
    run_check,
    skipped_result,
)
from banana.exceptions import DomainError, UnknownCheckError


@pytest.fixture
def scratch_ids():
    """Check ids registered by a test; removed afterwards."""
    ids = []
    yield ids
    for check_id in ids:
        REGISTRY.pop(check_id, None)


class TestRegistry:
    def test_mandated_ids_present(self):
        for check_id in ('thm1.1', 'lemma2.1.e_f0a', 'sym2.operator'):
            assert check_id in REGISTRY

    def test_lattice_checks_present(self):
        for check_id in ('lattice.sieve_3_3_1', 'lattice.sieve_12_0_1', 'lattice.S_closed'):
            assert check_id in REGISTRY

    def test_registry_size(self):
        assert len(REGISTRY) >= 30

    def test_operator_anchor(self):
        assert get_check('sym2.operator').anchor == "is the symmetric square of"

    def test_anchors_non_empty(self):
        assert all(anchor for _, anchor, _ in list_checks())

    def test_unknown_id(self):
        with pytest.raises(UnknownCheckError):
            get_check('thm9.9')

    def test_duplicate_id_rejected(self):
        with pytest.raises(ValueError):
            register('thm1.1', 'again')(lambda ctx: (1, 1))

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            register('scratch.kind', 'x', kind='fuzzy')

    def test_slow_checks_flagged(self):
        assert get_check('quad.I0').slow
        assert not get_check('thm1.1').slow


class TestThresholds:
    def test_closed_form(self):
        assert get_check('thm1.1').threshold(100) == 100 - CLOSED_FORM_SLACK

    def test_exact(self):
        check = get_check('sym2.operator')
        assert check.threshold(100) == 100
        assert check.threshold_label == 'exact'

    def test_halved_and_capped(self):
        check = get_check('pf.L3_inhomogeneous_m2')
        assert check.threshold(30) == 10
        assert check.threshold(100) == 20
        assert check.threshold_label == 'min(digits/2-5,20)'

    def test_fixed(self):
        assert get_check('quad.I0').threshold(500) == 6

    def test_record(self):
        assert get_check('quad.J_m7_ratio').threshold(100) == 0


class TestRunCheck:
    def test_numeric_pass(self):
        result = run_check(get_check('lfun.catalan'), 30)
        assert result.status == 'pass'
        assert result.digits_matched >= 20
        assert result.error is None

    def test_exact_pass(self):
        result = run_check(get_check('pf.r_relation'), 30)
        assert result.passed
        assert result.digits_matched == 30
        assert result.abs_difference == '0'

    def test_mismatch_fails(self, scratch_ids):
        scratch_ids.append('scratch.mismatch')
        register('scratch.mismatch', 'one is two')(lambda ctx: (ctx.ball(1), ctx.ball(2)))
        result = run_check(get_check('scratch.mismatch'), 30)
        assert result.status == 'fail'
        assert result.digits_matched == 0

    def test_exception_becomes_failure(self, scratch_ids):
        def evaluate(ctx):
            raise DomainError("outside the domain", {'t': 99})

        scratch_ids.append('scratch.raises')
        register('scratch.raises', 'raises')(evaluate)
        result = run_check(get_check('scratch.raises'), 30)
        assert result.status == 'fail'
        assert 'outside the domain' in result.error
        assert result.lhs == 'n/a'

    def test_result_dict(self):
        data = run_check(get_check('pf.r_relation'), 30).to_dict()
        assert set(data) == {'check_id', 'anchor', 'lhs', 'rhs', 'abs_difference', 'digits_matched',
                             'threshold', 'runtime_ms', 'status', 'error'}

    def test_skipped(self):
        result = skipped_result(get_check('quad.I0'), 100, 'slow check skipped')
        assert result.status == 'skipped'
        assert result.threshold == 6

    def test_check_is_frozen(self):
        check = get_check('thm1.1')
        assert isinstance(check, Check)
        with pytest.raises(Exception):
            check.cap = 3
