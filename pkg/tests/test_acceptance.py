"""Acceptance criteria, one test each, with their stated budgets.

Each test writes its ``[PASS]``/``[FAIL]`` line straight to the terminal.
"""

import time

import numpy as np
import pytest

from localmath.checks import CHECKS, check_gamma_algebra

# wall-clock budgets in seconds, where a criterion states one
BUDGET = {1: 1.0, 2: 5.0, 8: 30.0, 10: 60.0}


@pytest.mark.parametrize("check", CHECKS, ids=[c.__name__.removeprefix("check_") for c in CHECKS])
def test_criterion(check, capsys):
    t0 = time.perf_counter()
    res = check(np.random.default_rng(0))
    res.seconds = time.perf_counter() - t0
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.line()
    limit = BUDGET.get(res.number)
    if limit is not None:
        assert res.seconds < limit, f"took {res.seconds:.2f}s, budget {limit}s"


def test_gamma_matrices(capsys):
    res = check_gamma_algebra()
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed
