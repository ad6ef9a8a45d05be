"""Tests for the check runner, reports and the command line."""
import json
import logging

import pytest

import banana.__main__ as cli
from banana.checks import REGISTRY, get_check, register
from banana.exceptions import PrecisionError, UnknownCheckError
from banana.runner import (
    EXIT_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    REPORT_FORMAT_VERSION,
    CheckRunner,
    resolve_checks,
    setup_logging,
    write_report,
)

FAST_IDS = ['lfun.catalan', 'pf.r_relation', 'eisenstein.e4_halfshift', 'sym2.operator']


@pytest.fixture
def runner(tmp_path):
    return CheckRunner(tmp_path / 'cache')


@pytest.fixture
def failing_check():
    register('scratch.fails', 'two is three')(lambda ctx: (ctx.ball(2), ctx.ball(3)))
    yield get_check('scratch.fails')
    REGISTRY.pop('scratch.fails', None)


class TestResolve:
    def test_all(self):
        assert len(resolve_checks()) == len(REGISTRY)

    def test_order_preserved(self):
        assert [c.check_id for c in resolve_checks(FAST_IDS[::-1])] == FAST_IDS[::-1]

    def test_unknown(self):
        with pytest.raises(UnknownCheckError):
            resolve_checks(['nope'])


class TestCheckRunner:
    def test_all_pass(self, runner):
        report = runner.run(resolve_checks(FAST_IDS), digits=30, jobs=2)
        assert report.exit_code == EXIT_OK
        assert report.summary['passed'] == len(FAST_IDS)

    def test_failure_sets_exit_code(self, runner, failing_check):
        report = runner.run([get_check('pf.r_relation'), failing_check], digits=30, jobs=2)
        assert report.exit_code == EXIT_FAILED
        assert report.summary['failed'] == 1

    def test_order_independent_of_jobs(self, runner):
        checks = resolve_checks(FAST_IDS)
        serial = runner.run(checks, digits=30, jobs=1)
        parallel = runner.run(checks, digits=30, jobs=4)
        assert [r.check_id for r in serial.results] == FAST_IDS
        assert [r.check_id for r in parallel.results] == FAST_IDS
        assert [r.status for r in serial.results] == [r.status for r in parallel.results]

    def test_skip_slow(self, runner):
        report = runner.run(resolve_checks(['quad.I0', 'pf.r_relation']), digits=30, jobs=1, skip_slow=True)
        assert [r.status for r in report.results] == ['skipped', 'pass']
        assert report.exit_code == EXIT_OK

    def test_low_precision_rejected(self, runner):
        with pytest.raises(PrecisionError):
            runner.run(resolve_checks(FAST_IDS), digits=5)

    def test_history_recorded(self, runner, failing_check):
        report = runner.run([failing_check], digits=30, jobs=1)
        run = runner.history.get_run(report.run_id)
        assert run['failed'] == 1
        assert run['exit_code'] == EXIT_FAILED
        assert [r['check_id'] for r in runner.history.results_for(report.run_id)] == ['scratch.fails']

    def test_without_history(self, tmp_path):
        report = CheckRunner(tmp_path / 'c', record_history=False).run(
            resolve_checks(['pf.r_relation']), digits=30, jobs=1)
        assert report.run_id is None


class TestReports:
    def test_json(self, runner, tmp_path):
        report = runner.run(resolve_checks(['pf.r_relation']), digits=30, jobs=1)
        out = tmp_path / 'reports' / 'report.json'
        write_report(report, str(out), 'json')
        data = json.loads(out.read_text())
        assert data['format_version'] == REPORT_FORMAT_VERSION
        assert data['summary']['exit_code'] == EXIT_OK
        assert data['results'][0]['check_id'] == 'pf.r_relation'

    def test_text(self, runner, failing_check, capsys):
        report = runner.run([failing_check], digits=30, jobs=1)
        write_report(report, '-', 'text')
        text = capsys.readouterr().out
        assert text.startswith('[scratch.fails] FAIL 0/20 digits')
        assert '  anchor: two is three' in text
        assert 'SUMMARY total=1 passed=0 failed=1' in text

    def test_unknown_format(self, runner):
        report = runner.run(resolve_checks(['pf.r_relation']), digits=30, jobs=1)
        with pytest.raises(ValueError):
            report.render('xml')


class TestLogging:
    def test_single_handler(self, tmp_path):
        path = setup_logging(tmp_path)
        setup_logging(tmp_path)
        logger = logging.getLogger('banana')
        handlers = [h for h in logger.handlers if isinstance(h, logging.FileHandler)
                    and h.baseFilename == str(path.resolve())]
        assert len(handlers) == 1
        for h in handlers:
            logger.removeHandler(h)
            h.close()


class TestCommandLine:
    @pytest.fixture(autouse=True)
    def cache_dir(self, tmp_path, monkeypatch):
        monkeypatch.setattr(cli, 'CACHE_DIR', tmp_path / 'cache')
        yield tmp_path / 'cache'
        logger = logging.getLogger('banana')
        for h in list(logger.handlers):
            if isinstance(h, logging.FileHandler):
                logger.removeHandler(h)
                h.close()

    def test_no_arguments(self, capsys):
        assert cli.main([]) == EXIT_USAGE

    def test_unknown_command(self, capsys):
        assert cli.main(['frobnicate']) == EXIT_USAGE

    def test_list(self, capsys):
        assert cli.main(['list']) == EXIT_OK
        assert 'sym2.operator' in capsys.readouterr().out

    def test_unknown_check_id(self, capsys):
        assert cli.main(['run', '--check', 'bogus.id', '--digits', '30']) == EXIT_USAGE

    def test_run_needs_selection(self, capsys):
        assert cli.main(['run', '--digits', '30']) == EXIT_USAGE
        assert cli.main(['run', '--all', '--check', 'thm1.1']) == EXIT_USAGE

    def test_bad_integer(self, capsys):
        assert cli.main(['run', '--check', 'pf.r_relation', '--digits', 'many']) == EXIT_USAGE

    def test_run_to_file(self, tmp_path, capsys):
        out = tmp_path / 'r.json'
        code = cli.main(['run', '--check', 'pf.r_relation', 'sym2.operator',
                         '--digits', '30', '--jobs', '2', '--out', str(out)])
        assert code == EXIT_OK
        data = json.loads(out.read_text())
        assert [r['check_id'] for r in data['results']] == ['pf.r_relation', 'sym2.operator']

    def test_eval_dirichlet(self, capsys):
        assert cli.main(['eval', 'dirichlet-L', '--d', '-4', '--s', '2', '--digits', '20']) == EXIT_OK
        assert capsys.readouterr().out.startswith('0.91596559417721901505')

    def test_eval_needs_tau(self, capsys):
        assert cli.main(['eval', 'eta', '--digits', '20']) == EXIT_USAGE

    def test_eval_domain_error(self, capsys):
        assert cli.main(['eval', 'eta', '--tau', '0,-1', '--digits', '20']) == EXIT_USAGE

    def test_cache_stat_and_history(self, capsys):
        assert cli.main(['cache', 'stat']) == EXIT_OK
        assert cli.main(['history']) == EXIT_OK
        assert cli.main(['history', 'x']) == EXIT_USAGE

    def test_parse_tau(self):
        assert cli.parse_tau('-1/8, 0.5') == (cli.Fraction(-1, 8), cli.Fraction(1, 2))
        with pytest.raises(cli.UsageError):
            cli.parse_tau('1')
