"""CLI entry point for banana checks."""
import json
import sys
from fractions import Fraction
from typing import Dict, List, Optional

from .cache import CACHE_DIR, ConstantCache, set_active_cache
from .checks import list_checks
from .database import HISTORY_FILENAME, RunHistory
from .eichler import F3
from .exceptions import BananaException, UnknownCheckError
from .feynman import I_modular
from .lfun import dirichlet_L, modular_L
from .mahler import mahler_q
from .mpcore import make_context
from .qseries import NEWFORM_IDS, WeberKind, eta, hauptmodul_t, varpi, weber
from .runner import (
    DEFAULT_DIGITS,
    DEFAULT_JOBS,
    EXIT_OK,
    EXIT_USAGE,
    REPORT_FORMATS,
    CheckRunner,
    resolve_checks,
    setup_logging,
    write_report,
)

# Flags taking a value; --check takes every value up to the next flag.
VALUE_FLAGS = {'--digits', '--jobs', '--out', '--format', '--tau', '--form', '--s', '--d'}
SWITCHES = {'--all', '--verbose', '--skip-slow'}

TAU_FUNCTIONS = {
    'eta': lambda tau, ctx: eta(tau, ctx),
    'weber-f0': lambda tau, ctx: weber(WeberKind.F0, tau, ctx),
    'weber-f1': lambda tau, ctx: weber(WeberKind.F1, tau, ctx),
    'weber-f2': lambda tau, ctx: weber(WeberKind.F2, tau, ctx),
    't': lambda tau, ctx: hauptmodul_t(tau, ctx),
    'varpi1': lambda tau, ctx: varpi(1, tau, ctx),
    'varpi2': lambda tau, ctx: varpi(2, tau, ctx),
    'F3': lambda tau, ctx: F3(tau, ctx),
    'I': lambda tau, ctx: I_modular(tau, ctx),
    'mahler': lambda tau, ctx: mahler_q(tau, ctx),
}
EVAL_FUNCTIONS = sorted(TAU_FUNCTIONS) + ['L', 'dirichlet-L']


class UsageError(Exception):
    pass


def parse_options(args: List[str]) -> Dict:
    """Split argv into {'checks': [...], '<flag>': value, '<switch>': True, 'positional': [...]}."""
    options: Dict = {'checks': [], 'positional': []}
    i = 0
    while i < len(args):
        arg = args[i]
        if arg == '--check':
            i += 1
            start = i
            while i < len(args) and not args[i].startswith('--'):
                options['checks'].append(args[i])
                i += 1
            if i == start:
                raise UsageError("--check needs at least one check id")
            continue
        if arg in SWITCHES:
            options[arg] = True
        elif arg in VALUE_FLAGS:
            if i + 1 >= len(args):
                raise UsageError(f"{arg} needs a value")
            options[arg] = args[i + 1]
            i += 1
        elif arg.startswith('--'):
            raise UsageError(f"Unknown option {arg}")
        else:
            options['positional'].append(arg)
        i += 1
    return options


def _int_option(options: Dict, flag: str, default: Optional[int] = None) -> int:
    if flag not in options:
        if default is None:
            raise UsageError(f"{flag} is required")
        return default
    try:
        return int(options[flag])
    except ValueError:
        raise UsageError(f"{flag} must be an integer")


def parse_tau(text: str):
    """'<re>,<im>' with decimal or rational parts, e.g. '-1/8,0.16137'."""
    parts = text.split(',')
    if len(parts) != 2:
        raise UsageError("--tau expects <re>,<im>")
    try:
        return tuple(Fraction(p.strip()) for p in parts)
    except ValueError:
        raise UsageError(f"Cannot parse --tau {text}")


def show_checks():
    rows = list_checks()
    width = max(len(check_id) for check_id, _, _ in rows)
    for check_id, anchor, threshold in rows:
        print(f"{check_id:<{width}}  [{threshold}]  {anchor}")
    print(f"\n{len(rows)} checks registered")


def run_checks(options: Dict) -> int:
    if options.get('--all') and options['checks']:
        raise UsageError("Use either --all or --check, not both")
    if not options.get('--all') and not options['checks']:
        raise UsageError("run needs --all or --check <id>...")
    digits = _int_option(options, '--digits', DEFAULT_DIGITS)
    jobs = _int_option(options, '--jobs', DEFAULT_JOBS)
    fmt = options.get('--format', 'json' if options.get('--out', '-') != '-' else 'text')
    if fmt not in REPORT_FORMATS:
        raise UsageError(f"--format must be one of {', '.join(REPORT_FORMATS)}")
    if digits < 10 or jobs < 1:
        raise UsageError("--digits must be >= 10 and --jobs >= 1")

    try:
        checks = resolve_checks(None if options.get('--all') else options['checks'])
    except UnknownCheckError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE

    log_path = setup_logging(CACHE_DIR, verbose=options.get('--verbose', False))
    runner = CheckRunner(CACHE_DIR)
    report = runner.run(checks, digits=digits, jobs=jobs, skip_slow=options.get('--skip-slow', False))
    write_report(report, options.get('--out'), fmt)
    if options.get('--out', '-') != '-':
        s = report.summary
        print(f"{s['passed']} passed, {s['failed']} failed, {s['skipped']} skipped "
              f"({s['duration_ms'] / 1000:.1f}s); log: {log_path}")
    return report.exit_code


def evaluate(options: Dict) -> int:
    if not options['positional']:
        raise UsageError(f"eval needs a function: {', '.join(EVAL_FUNCTIONS)}")
    name = options['positional'][0]
    digits = _int_option(options, '--digits', DEFAULT_DIGITS)
    ctx = make_context(digits)
    set_active_cache(ConstantCache(CACHE_DIR))

    if name in TAU_FUNCTIONS:
        if '--tau' not in options:
            raise UsageError(f"eval {name} needs --tau <re>,<im>")
        re, im = parse_tau(options['--tau'])
        value = TAU_FUNCTIONS[name](ctx.mpc(re, im), ctx)
    elif name == 'L':
        form = options.get('--form')
        if form not in NEWFORM_IDS:
            raise UsageError(f"--form must be one of {', '.join(NEWFORM_IDS)}")
        value = modular_L(form, _int_option(options, '--s'), ctx)
    elif name == 'dirichlet-L':
        value = dirichlet_L(_int_option(options, '--d'), _int_option(options, '--s'), ctx)
    else:
        raise UsageError(f"Unknown function {name}; choose from {', '.join(EVAL_FUNCTIONS)}")

    print(value.to_string())
    print(f"  radius: {ctx.mp.nstr(value.rad, 5)}")
    return EXIT_OK


def manage_cache(options: Dict) -> int:
    action = options['positional'][0] if options['positional'] else None
    cache = ConstantCache(CACHE_DIR)
    if action == 'clear':
        removed = cache.clear()
        print(f"Removed {removed} cached constants from {cache.cache_dir}")
    elif action == 'stat':
        print(json.dumps(cache.stat(), indent=2))
    else:
        raise UsageError("cache expects clear or stat")
    return EXIT_OK


def show_history(options: Dict) -> int:
    try:
        limit = int(options['positional'][0]) if options['positional'] else 10
    except ValueError:
        raise UsageError("history expects a number of runs")
    history = RunHistory(CACHE_DIR / HISTORY_FILENAME)
    runs = history.recent_runs(limit)
    if not runs:
        print("No runs recorded")
        return EXIT_OK
    print(f"{'id':>5}  {'started':<26} {'digits':>6} {'jobs':>4}  passed/failed/skipped  exit")
    for run in runs:
        exit_code = run['exit_code'] if run['exit_code'] is not None else '-'
        print(f"{run['id']:>5}  {run['started_at']:<26} {run['digits']:>6} {run['jobs']:>4}  "
              f"{run['passed']}/{run['failed']}/{run['skipped']:<16} {exit_code}")
    return EXIT_OK


def print_help():
    """Print usage help."""
    print("""
banana - verification of banana-integral and L-value identities

Usage:
    python -m banana <command> [options]

Commands:
    list                     List registered checks with their thresholds
    run --check <id>...      Run the named checks
    run --all                Run every registered check
        --digits D           Working precision in decimal digits (default: $BANANA_DIGITS or 100)
        --jobs J             Worker threads (default: $BANANA_JOBS or physical cores)
        --out PATH           Write the report to PATH ('-' for stdout)
        --format json|text   Report format (default: json for files, text for stdout)
        --skip-slow          Report slow quadrature checks as skipped
        --verbose            Debug-level run log
    eval <function> --tau <re>,<im> [--digits D]
                             eta, weber-f0, weber-f1, weber-f2, t, varpi1, varpi2, F3, I, mahler
    eval L --form f15|g12|e14 --s k [--digits D]
    eval dirichlet-L --d D --s k [--digits D]
    cache clear|stat         Manage the constant cache ($BANANA_CACHE_DIR, default .cache)
    history [N]              Show the N most recent runs
    help                     Show this help

Exit codes:
    0 all checks passed, 1 a check failed, 2 usage error

Examples:
    python -m banana run --check thm1.1 --digits 50
    python -m banana run --all --digits 100 --jobs 4 --out report.json
    python -m banana eval I --tau -1/8,0.16137430609197570 --digits 30
""")


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    args = sys.argv[1:] if argv is None else argv
    if not args:
        print_help()
        return EXIT_USAGE

    command = args[0].lower()
    try:
        options = parse_options(args[1:])
        if command == 'list':
            show_checks()
            return EXIT_OK
        elif command == 'run':
            return run_checks(options)
        elif command == 'eval':
            return evaluate(options)
        elif command == 'cache':
            return manage_cache(options)
        elif command == 'history':
            return show_history(options)
        elif command in ('help', '--help', '-h'):
            print_help()
            return EXIT_OK
        else:
            print(f"Unknown command: {command}")
            print_help()
            return EXIT_USAGE
    except UsageError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BananaException as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
