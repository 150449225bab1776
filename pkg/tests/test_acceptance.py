"""Acceptance criteria, one test per criterion at its stated tolerance.

Each criterion's result line ([PASS]/[FAIL], plus [INFO] diagnostics) is
printed in the pytest terminal summary.  Run this file directly to print the
lines without pytest.
"""

import functools

import pytest

from cwlab.reproduce import SUITES

RESULT_LINES = []


@functools.lru_cache(maxsize=None)
def _suite(name):
    return tuple(SUITES[name]())


def _check(name, cid):
    crits = [c for c in _suite(name) if c.cid == cid]
    assert crits, f"suite {name} produced no criterion {cid}"
    for c in crits:
        line = c.line()
        RESULT_LINES.append(line)
        print(line)
    failed = [c for c in crits if not (c.passed or c.supplementary)]
    if failed:
        pytest.fail("; ".join(c.line() for c in failed), pytrace=False)


CASES = [
    ("oracle", "1"),
    ("prop21", "2"),
    ("thm1", "3"),
    ("thm3", "4"),
    ("claim-crit-curve", "5"),
    ("cor1", "6a"),
    ("cor1", "6b"),
    ("cor1", "6c"),
    ("cor2", "7"),
    ("thm2", "8"),
    ("inequalities", "9"),
    ("conjecture", "10"),
]


@pytest.mark.acceptance
@pytest.mark.parametrize("suite,cid", CASES, ids=[f"criterion_{cid}_{suite}" for suite, cid in CASES])
def test_criterion(suite, cid):
    _check(suite, cid)


if __name__ == "__main__":
    for suite, cid in CASES:
        try:
            _check(suite, cid)
        except pytest.fail.Exception:
            pass
