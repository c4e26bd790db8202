"""Runs every acceptance criterion once and prints one PASS/FAIL line for each."""

import pytest

from yflift import cli


@pytest.fixture(scope="module")
def results(worked):
    return {r["id"]: r for r in cli.acceptance(worked)}


@pytest.mark.parametrize("num", range(1, 11))
def test_criterion(results, num, capsys):
    r = results[num]
    status = "PASS" if r["passed"] else "FAIL"
    with capsys.disabled():
        print(f"\n{status} criterion {num}: {r['name']}")
    assert r["passed"], r["details"]
