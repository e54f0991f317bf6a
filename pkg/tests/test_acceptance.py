"""Acceptance criteria at full scale; one PASS/FAIL line per criterion.

The lines are printed as each block finishes and repeated in the pytest
terminal summary.  Run alone with ``pytest tests/test_acceptance.py -s``.
"""

import os

import pytest

from conftest import ACCEPTANCE_LINES
from twderham.selfcheck import CRITERIA, run_checks

SEED = int(os.environ.get("TWDERHAM_SEED", "0") or 0)


@pytest.mark.parametrize("criterion", CRITERIA, ids=[c.key for c in CRITERIA])
def test_criterion(criterion):
    (res,) = run_checks(only=[criterion.key], seed=SEED, scale="full")
    line = res.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert res.passed, line
