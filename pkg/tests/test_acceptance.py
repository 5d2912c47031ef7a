"""Acceptance criteria at full stated scale, one test per criterion.

Each test prints its PASS/FAIL line; `razorlab verify` runs the same
checks from the command line.
"""

import pytest

from razorlab.acceptance import ALL_CHECKS


@pytest.fixture(scope="module")
def results():
    return {}


def _run(results, name):
    if name not in results:
        results[name] = ALL_CHECKS[name]()
    res = results[name]
    print()
    print(res.line())
    return res


@pytest.mark.parametrize("name", list(ALL_CHECKS))
def test_criterion(results, name):
    res = _run(results, name)
    assert res.passed, res.summary
