"""One pass/fail line per acceptance criterion (also runnable as a script)."""

import sys

import pytest

from stablab.suite import CHECKS, run_check


@pytest.mark.parametrize("name", list(CHECKS))
def test_criterion(name, acceptance_lines):
    res = run_check(name, seed=0)
    line = res.line()
    acceptance_lines.append(line)
    print(line)
    assert res.passed, res.detail


if __name__ == "__main__":
    results = [run_check(n) for n in CHECKS]
    for r in results:
        print(r.line())
    sys.exit(0 if all(r.passed for r in results) else 1)
