#!/usr/bin/env python3
"""MVP Test Checks - the headline identities at 30 digits."""
import sys
from pathlib import Path

# Add banana to path
sys.path.insert(0, str(Path(__file__).parent))

from banana.checks import get_check, run_check

HEADLINE_IDS = [
    'thm1.1',
    'thm1.2.sum',
    'thm1.2.double',
    'thm1.2.difference',
    'lemma2.1.e_f0a',
    'sym2.operator',
    'rwz.f15',
    'rwz.g12',
]


def test_headline_checks_pass():
    """Every headline check passes at 30 digits."""
    for check_id in HEADLINE_IDS:
        result = run_check(get_check(check_id), 30)
        assert result.status == 'pass', f"{check_id}: {result.digits_matched}/{result.threshold} {result.error}"


def test_results_carry_values():
    """Numeric results report both sides and their difference."""
    result = run_check(get_check('thm1.1'), 30)
    assert float(result.lhs) > 0, f"Unexpected I(1): {result.lhs}"
    assert result.lhs[:20] == result.rhs[:20], f"{result.lhs} != {result.rhs}"
    assert result.abs_difference != 'n/a'


def main():
    tests = [
        ("Headline checks pass", test_headline_checks_pass),
        ("Results carry values", test_results_carry_values),
    ]

    print("=" * 60)
    print("Checks MVP - Running Tests")
    print("=" * 60)

    passed = 0
    failed = 0

    for name, test_func in tests:
        print(f"\nRunning: {name}...", end=" ")
        try:
            test_func()
            print("PASS")
            passed += 1
        except Exception as e:
            print(f"FAIL - {e}")
            failed += 1

    print("\n" + "=" * 60)
    print(f"Results: {passed} passed, {failed} failed")
    print("=" * 60)

    return 0 if failed == 0 else 1


if __name__ == '__main__':
    sys.exit(main())
