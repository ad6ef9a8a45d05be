"""Check execution harness and report rendering."""
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Dict, Iterable, List, Optional

import psutil

from .cache import CACHE_DIR, ConstantCache, set_active_cache
from .checks import REGISTRY, Check, CheckResult, get_check, run_check, skipped_result
from .database import HISTORY_FILENAME, RunHistory
from .exceptions import PrecisionError
from .mpcore import MIN_DIGITS

logger = logging.getLogger('banana')


def _default_jobs() -> int:
    value = os.environ.get('BANANA_JOBS')
    if value:
        return max(1, int(value))
    return psutil.cpu_count(logical=False) or 1


DEFAULT_JOBS = _default_jobs()
DEFAULT_DIGITS = int(os.environ.get('BANANA_DIGITS', '100'))

REPORT_FORMAT_VERSION = 1
REPORT_FORMATS = ('json', 'text')

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def setup_logging(cache_dir: Path = CACHE_DIR, verbose: bool = False) -> Path:
    """Attach the run log file handler; returns its path."""
    log_dir = Path(cache_dir) / 'logs'
    log_dir.mkdir(parents=True, exist_ok=True)
    log_path = log_dir / 'run.log'

    if not any(isinstance(h, logging.FileHandler) and Path(h.baseFilename) == log_path.resolve()
               for h in logger.handlers):
        handler = logging.FileHandler(log_path)
        handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(levelname)s - %(name)s - %(message)s'
        ))
        logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    return log_path


def resolve_checks(ids: Optional[Iterable[str]] = None) -> List[Check]:
    """Checks for the given ids in the order given; all registered checks for None."""
    if ids is None:
        return list(REGISTRY.values())
    return [get_check(check_id) for check_id in ids]


@dataclass
class RunReport:
    digits: int
    jobs: int
    results: List[CheckResult]
    started_at: str = field(default_factory=lambda: datetime.now().isoformat())
    duration_ms: int = 0
    run_id: Optional[int] = None

    @property
    def summary(self) -> Dict:
        counts = {status: 0 for status in ('pass', 'fail', 'skipped')}
        for result in self.results:
            counts[result.status] += 1
        return {
            'total': len(self.results),
            'passed': counts['pass'],
            'failed': counts['fail'],
            'skipped': counts['skipped'],
            'duration_ms': self.duration_ms,
        }

    @property
    def exit_code(self) -> int:
        return EXIT_FAILED if any(r.status == 'fail' for r in self.results) else EXIT_OK

    def to_dict(self) -> Dict:
        return {
            'format_version': REPORT_FORMAT_VERSION,
            'digits': self.digits,
            'jobs': self.jobs,
            'started_at': self.started_at,
            'run_id': self.run_id,
            'results': [r.to_dict() for r in self.results],
            'summary': {**self.summary, 'exit_code': self.exit_code},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    def to_text(self) -> str:
        lines = []
        for r in self.results:
            lines.append(f"[{r.check_id}] {r.status.upper()} {r.digits_matched}/{r.threshold} digits"
                         f" ({r.runtime_ms} ms)")
            lines.append(f"  anchor: {r.anchor}")
            lines.append(f"  lhs: {r.lhs}")
            lines.append(f"  rhs: {r.rhs}")
            lines.append(f"  abs_difference: {r.abs_difference}")
            if r.error:
                lines.append(f"  error: {r.error}")
        s = self.summary
        lines.append(f"SUMMARY total={s['total']} passed={s['passed']} failed={s['failed']} "
                     f"skipped={s['skipped']} digits={self.digits} jobs={self.jobs} "
                     f"exit_code={self.exit_code} duration_ms={s['duration_ms']}")
        return '\n'.join(lines) + '\n'

    def render(self, fmt: str) -> str:
        if fmt not in REPORT_FORMATS:
            raise ValueError(f"unknown report format {fmt}")
        return self.to_json() if fmt == 'json' else self.to_text()


class CheckRunner:
    """Runs checks on a thread pool with the constant cache and run history enabled."""

    def __init__(self, cache_dir: Path = CACHE_DIR, record_history: bool = True):
        self.cache_dir = Path(cache_dir)
        self.cache = ConstantCache(self.cache_dir)
        self.history = RunHistory(self.cache_dir / HISTORY_FILENAME) if record_history else None

    def run(self, checks: List[Check], digits: int = DEFAULT_DIGITS, jobs: int = DEFAULT_JOBS,
            skip_slow: bool = False) -> RunReport:
        if not isinstance(digits, int) or digits < MIN_DIGITS:
            raise PrecisionError(f"digits must be an integer >= {MIN_DIGITS}", {'digits': digits})
        jobs = max(1, jobs)
        logger.info(f"Starting {len(checks)} checks at {digits} digits with {jobs} workers")
        start_time = time.time()
        run_id = self.history.start_run(digits, jobs, [c.check_id for c in checks]) if self.history else None

        metrics = {
            'checks_started': len(checks),
            'checks_passed': 0,
            'checks_failed': 0,
            'checks_skipped': 0,
        }
        results: Dict[str, CheckResult] = {}
        previous = set_active_cache(self.cache)
        try:
            pending = []
            for check in checks:
                if skip_slow and check.slow:
                    results[check.check_id] = skipped_result(check, digits, 'slow check skipped')
                else:
                    pending.append(check)

            with ThreadPoolExecutor(max_workers=jobs) as executor:
                futures = {executor.submit(run_check, check, digits): check for check in pending}

                for future in as_completed(futures):
                    check = futures[future]
                    try:
                        results[check.check_id] = future.result()
                    except Exception as e:
                        logger.error(f"Check {check.check_id} crashed the worker: {e}", exc_info=True)
                        results[check.check_id] = CheckResult(
                            check.check_id, check.anchor, 'n/a', 'n/a', 'n/a', 0,
                            check.threshold(digits), 0, 'fail', error=str(e))
        finally:
            set_active_cache(previous)

        ordered = [results[c.check_id] for c in checks]
        for result in ordered:
            key = {'pass': 'checks_passed', 'fail': 'checks_failed', 'skipped': 'checks_skipped'}[result.status]
            metrics[key] += 1
            if self.history:
                self.history.record_result(run_id, result.to_dict())

        duration = time.time() - start_time
        report = RunReport(digits, jobs, ordered, duration_ms=int(duration * 1000), run_id=run_id)
        if self.history:
            self.history.finish_run(run_id, report.summary, report.exit_code)
        logger.info(f"Check run complete: {metrics} in {duration:.1f}s")
        return report


def write_report(report: RunReport, out: Optional[str], fmt: str) -> str:
    """Write the rendered report to out ('-' or None for stdout); returns the text."""
    text = report.render(fmt)
    if out and out != '-':
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        logger.info(f"Report written to {path}")
    else:
        print(text, end='')
    return text
