#!/usr/bin/env python3
"""
Colored test runner for the camcurate suites.

Usage:
    python3 tests/run_tests.py                    # every test_*.py
    python3 tests/run_tests.py geometry metrics   # only test_geometry.py and test_metrics.py
    python3 tests/run_tests.py --quick            # skip the end-to-end suites
"""
import argparse
import os
import sys
import time
import unittest

# Add parent directory to path so camcurate and tests.helpers import
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

# Suites that build corpora and run the whole pipeline
SLOW_MODULES = ("test_pipeline", "test_cli")

SLOWEST_SHOWN = 5


class Color:
    GREEN = '\033[92m'
    RED = '\033[91m'
    YELLOW = '\033[93m'
    BLUE = '\033[94m'
    MAGENTA = '\033[95m'
    CYAN = '\033[96m'
    BOLD = '\033[1m'
    RESET = '\033[0m'


STATUS_STYLE = {
    'PASS': (Color.GREEN, '✓'),
    'FAIL': (Color.RED, '✗'),
    'ERROR': (Color.RED, '⚠'),
    'SKIP': (Color.YELLOW, '⊘'),
}


class TimedTestResult(unittest.TextTestResult):
    """Records status and wall time per test"""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.records = []
        self._started = 0.0

    def startTest(self, test):
        super().startTest(test)
        self._started = time.perf_counter()

    def _record(self, status, test):
        elapsed = time.perf_counter() - self._started
        parts = test.id().rsplit('.', 2)
        if len(parts) < 3:
            parts = ['unknown', ''] + parts[-1:]
        module, cls, name = parts
        self.records.append((status, module.split('.')[-1], cls, name, elapsed))

    def addSuccess(self, test):
        super().addSuccess(test)
        self._record('PASS', test)

    def addError(self, test, err):
        super().addError(test, err)
        self._record('ERROR', test)

    def addFailure(self, test, err):
        super().addFailure(test, err)
        self._record('FAIL', test)

    def addSkip(self, test, reason):
        super().addSkip(test, reason)
        self._record('SKIP', test)


class SummaryTestRunner(unittest.TextTestRunner):
    """Runs quietly, then prints results grouped by module"""

    resultclass = TimedTestResult

    def run(self, test):
        result = super().run(test)
        self.print_results(result)
        return result

    def print_results(self, result):
        print("\n" + "=" * 80)
        print(f"{Color.BOLD}{Color.CYAN}TEST RESULTS SUMMARY{Color.RESET}")
        print("=" * 80 + "\n")

        by_module = {}
        for record in result.records:
            by_module.setdefault(record[1], []).append(record)

        for module in sorted(by_module):
            records = by_module[module]
            module_time = sum(r[4] for r in records)
            print(f"{Color.BOLD}{Color.MAGENTA}📦 {module}{Color.RESET}  ({len(records)} tests, {module_time:.2f}s)")
            print("-" * 80)
            for status, _, cls, name, _ in records:
                color, icon = STATUS_STYLE[status]
                print(f"  {color}{icon} {status:5}{Color.RESET} {cls}.{name}")
            print()

        slowest = sorted(result.records, key=lambda r: r[4], reverse=True)[:SLOWEST_SHOWN]
        if slowest:
            print(f"{Color.BOLD}Slowest tests:{Color.RESET}")
            for _, module, cls, name, elapsed in slowest:
                print(f"  {elapsed:7.2f}s  {module}.{cls}.{name}")
            print()

        print("=" * 80)
        total = result.testsRun
        passed = sum(1 for r in result.records if r[0] == 'PASS')
        failed = len(result.failures)
        errors = len(result.errors)
        skipped = len(result.skipped)

        print(f"{Color.BOLD}SUMMARY:{Color.RESET}")
        print(f"  Total:   {total} tests")
        print(f"  {Color.GREEN}Passed:  {passed}{Color.RESET}")
        if failed:
            print(f"  {Color.RED}Failed:  {failed}{Color.RESET}")
        if errors:
            print(f"  {Color.RED}Errors:  {errors}{Color.RESET}")
        if skipped:
            print(f"  {Color.YELLOW}Skipped: {skipped}{Color.RESET}")

        if total > 0:
            rate = passed / total * 100
            if rate == 100:
                color, emoji = Color.GREEN, "🎉"
            elif rate >= 80:
                color, emoji = Color.YELLOW, "⚠️"
            else:
                color, emoji = Color.RED, "❌"
            print(f"\n  {emoji} {color}Success Rate: {rate:.1f}%{Color.RESET}")
        print("=" * 80 + "\n")

        if failed or errors:
            print(f"\n{Color.BOLD}{Color.RED}DETAILED FAILURES:{Color.RESET}\n")
            for test, text in result.failures + result.errors:
                print(f"{Color.RED}{'=' * 80}{Color.RESET}")
                print(f"{Color.BOLD}{test.id()}{Color.RESET}")
                print(f"{Color.RED}{'-' * 80}{Color.RESET}")
                print(text)


def select_modules(names, quick):
    """test_*.py module names to load, in sorted order."""
    start_dir = os.path.dirname(os.path.abspath(__file__))
    available = sorted(f[:-3] for f in os.listdir(start_dir) if f.startswith('test_') and f.endswith('.py'))
    if names:
        wanted = {n if n.startswith('test_') else f'test_{n}' for n in names}
        unknown = wanted - set(available)
        if unknown:
            raise SystemExit(f"Unknown test module(s): {', '.join(sorted(unknown))}")
        available = [m for m in available if m in wanted]
    if quick:
        available = [m for m in available if m not in SLOW_MODULES]
    return available


def main():
    parser = argparse.ArgumentParser(description="Run the camcurate test suites")
    parser.add_argument("modules", nargs="*", help="Module names, e.g. geometry or test_geometry")
    parser.add_argument("--quick", action="store_true", help=f"Skip {', '.join(SLOW_MODULES)}")
    args = parser.parse_args()

    print(f"\n{Color.BOLD}{Color.BLUE}")
    print("╔════════════════════════════════════════════════════════════════════════════════╗")
    print("║                          camcurate Test Suite                                  ║")
    print("╚════════════════════════════════════════════════════════════════════════════════╝")
    print(f"{Color.RESET}")

    modules = select_modules(args.modules, args.quick)
    suite = unittest.TestLoader().loadTestsFromNames([f"tests.{m}" for m in modules])

    started = time.perf_counter()
    result = SummaryTestRunner(verbosity=0).run(suite)
    print(f"Ran {len(modules)} module(s) in {time.perf_counter() - started:.1f}s")

    sys.exit(0 if result.wasSuccessful() else 1)


if __name__ == '__main__':
    main()
