"""The eleven acceptance criteria, one test each.

Every test prints its one-line verdict; ``conftest.py`` repeats the lines in
the terminal summary so a plain ``pytest -v`` run records them.
"""

import pytest

from stringseries.acceptance import CRITERIA

RESULTS = []


@pytest.mark.parametrize("check", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 12)])
def test_criterion(check):
    result = check()
    RESULTS.append(result)
    print(result.line())
    assert result.passed, result.line()


if __name__ == "__main__":
    import sys

    from stringseries.acceptance import run_all

    results = run_all()
    for r in results:
        print(r.line())
    sys.exit(0 if all(r.passed for r in results) else 1)
