"""The twelve acceptance criteria, one test each, with a PASS/FAIL line per criterion."""

import pytest

from expander_net.acceptance import CHECKS


@pytest.mark.slow
@pytest.mark.parametrize("check", CHECKS, ids=[c.name for c in CHECKS])
def test_criterion(check, capsys):
    result = check.run(1.0)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()
