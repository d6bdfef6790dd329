"""Acceptance suite: one pass/fail line per criterion, gated checks asserted.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-check values.
"""
import pytest

from dirac_scatter import acceptance


@pytest.mark.acceptance
@pytest.mark.parametrize("criterion", acceptance.CRITERIA, ids=lambda f: f.__name__)
def test_criterion(criterion, acceptance_log):
    res = criterion()
    acceptance_log.append(res)
    print()
    print(res.summary())
    for c in res.checks:
        print(c.line())
    failed = res.failed()
    assert not failed, "; ".join(f"{c.name} = {c.value:.3e} > {c.tol:.1e}" for c in failed)
