"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import pytest

from dicycles.acceptance import CRITERIA, run_one

RESULTS = []


@pytest.mark.parametrize("number", [n for n, _, _ in CRITERIA],
                         ids=[f"{n:02d}-{name.replace(' ', '-')}" for n, name, _ in CRITERIA])
def test_criterion(number):
    result = run_one(number)
    RESULTS.append(result)
    print(result.line())
    assert result.ok, result.detail
