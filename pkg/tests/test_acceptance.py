"""Acceptance criteria, one test each, backed by ``cantortx.paper_check``.

Every criterion is exact: no numeric tolerance applies.  Each test prints a
single ``[PASS]`` or ``[FAIL]`` line, repeated in the terminal summary.
"""

import pytest

from cantortx.paper_check import CHECKS, run_check

REPORT: list[str] = []


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(number):
    result = run_check(number)
    failed = [label for label, ok in result.items if not ok]
    lines = [result.line()] + [f"    FAILED: {label}" for label in failed]
    REPORT.extend(lines)
    print("\n".join(lines))
    assert not result.error, result.error
    assert result.items, "check produced no sub-results"
    assert not failed, failed
