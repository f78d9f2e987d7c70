"""Acceptance suite: every criterion at its stated tolerance, one report line each.

The lines are printed as the checks run and repeated in the terminal summary,
so they are visible without ``-s``.
"""

import pytest

from geomkit import verify

RESULTS = {}


@pytest.mark.parametrize("number", sorted(verify.CHECKS), ids=lambda n: f"{n:02d}-{verify.CHECKS[n][0].replace(' ', '_')}")
def test_acceptance(number):
    result = verify.run_check(number, verify.DEFAULT_SEED)
    RESULTS[number] = result
    print(result.line())
    assert result.passed, result.line()
