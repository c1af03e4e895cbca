"""Acceptance criteria 1-11 at their stated sizes and tolerances.

Each test prints one ``[PASS]``/``[FAIL]`` line with the measured values.
Run directly (``python tests/test_acceptance.py``) for the summary alone.
"""

import sys

import pytest

from jacobi_ensembles.verify import CRITERIA


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    result = CRITERIA[number]()
    with capsys.disabled():
        print("\n" + result.line())
        for d in result.details:
            print("     " + d)
    assert result.passed, result.line()


def main():
    failed = 0
    for number in sorted(CRITERIA):
        result = CRITERIA[number]()
        print(result.line(), flush=True)
        failed += not result.passed
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
