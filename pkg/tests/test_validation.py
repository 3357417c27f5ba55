"""
Tests for the validation runner: suite selection, ordering, failure
capture and the report file.
"""

import sys
from pathlib import Path

import pytest

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from eplab.core.errors import NonConvergenceError
from eplab.core.schemas import Suite, ValidationReport
from eplab.cli import validation
from eplab.cli.validation import SUITES, all_passed, run_suite, write_report


def _report(case_id, passed=True, monitored=False, suite="abel"):
    return ValidationReport(
        suite=suite, check="c", case_id=case_id, max_residual=0.0 if passed else 1.0,
        tolerance=0.5, passed=passed, monitored=monitored,
    )


class TestSuites:
    """Case tables"""

    def test_every_suite_has_cases(self):
        for suite, cases in SUITES.items():
            ids = [case_id for case_id, _ in cases()]
            assert ids, suite
            assert len(ids) == len(set(ids)), suite

    def test_chiellini_matrix_size(self):
        ids = [case_id for case_id, _ in validation.residual_cases()]
        assert sum(1 for i in ids if i.startswith("chiellini-")) == 11

    def test_all_covers_every_suite(self):
        assert set(validation.SUITE_ORDER) == set(SUITES)


class TestRunner:
    """run_suite ordering and failure capture"""

    def test_abel_suite_passes(self):
        reports = run_suite(Suite.ABEL, workers=1)
        assert [r.case_id for r in reports] == sorted(r.case_id for r in reports)
        assert all(r.suite == "abel" for r in reports)
        assert all_passed(reports), [r.line() for r in reports if not r.passed]

    def test_thread_pool_matches_serial(self):
        serial = run_suite(Suite.FACTORIZATION, workers=1)
        pooled = run_suite(Suite.FACTORIZATION, workers=4)
        assert [r.line() for r in serial] == [r.line() for r in pooled]

    def test_exceptions_become_failures(self, monkeypatch):
        def broken():
            raise NonConvergenceError("no luck")

        monkeypatch.setitem(SUITES, Suite.ABEL, lambda: [("b-case", broken), ("a-case", lambda: _report("x"))])
        reports = run_suite(Suite.ABEL, workers=1)
        assert [r.case_id for r in reports] == ["a-case", "b-case"]
        assert reports[1].status == "FAIL"
        assert "NonConvergenceError" in reports[1].notes
        assert not all_passed(reports)


class TestBuiltInMatrix:
    """Every built-in case passes with the default configuration"""

    @pytest.mark.parametrize("suite", validation.SUITE_ORDER, ids=lambda s: s.value)
    def test_suite_passes(self, suite):
        reports = run_suite(suite, workers=1)
        assert reports
        assert all_passed(reports), [r.line() for r in reports if not (r.passed or r.monitored)]

    def test_all_passes(self):
        reports = run_suite(Suite.ALL, workers=1)
        assert len(reports) == sum(len(SUITES[s]()) for s in validation.SUITE_ORDER)
        assert all_passed(reports), [r.line() for r in reports if not (r.passed or r.monitored)]


class TestReporting:
    """Status aggregation and the report file"""

    def test_monitor_never_fails(self):
        assert all_passed([_report("a"), _report("b", passed=False, monitored=True)])

    def test_failure(self):
        assert not all_passed([_report("a"), _report("b", passed=False)])

    def test_report_file(self, tmp_path):
        path = write_report([_report("a"), _report("b", passed=False)], tmp_path / "sub" / "report.txt")
        assert path.read_text() == (
            "abel a 0.000000e+00 5.0e-01 PASS\n"
            "abel b 1.000000e+00 5.0e-01 FAIL\n"
        )
