"""Acceptance criteria 1-9, one test each, each printing a PASS/FAIL line."""

import pytest

from jacstrata.acceptance import CHECKS


@pytest.mark.parametrize("check", CHECKS, ids=[f"criterion_{i}_{fn.__name__[6:]}" for i, fn in enumerate(CHECKS, 1)])
def test_criterion(check, capsys):
    res = check()
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.detail
