"""The eleven cross-validation criteria at their fixed tolerances.

Every check prints one ``[PASS]``/``[FAIL]`` line (run with ``-s`` to see them).
"""
import pytest

from nonad_lz.acceptance import CRITERIA


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    rows = CRITERIA[k]()
    assert rows
    for r in rows:
        print(r.line())
    failed = [r.line() for r in rows if not r.passed]
    assert not failed, "\n".join(failed)
