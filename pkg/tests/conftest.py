"""Shared fixtures, the deterministic case-draw helper, and the acceptance
summary hook that prints one pass/fail line per criterion after the run."""

import itertools
import warnings

import numpy as np
import pytest

try:
    from hypothesis import settings
    settings.register_profile("pkg", deadline=None)
    settings.load_profile("pkg")
except ImportError:
    pass

from heunx import (PreconditionError, ValidationError, q_candidates_N0,
                   q_candidates_N1, q_candidates_N2)

ACCEPTANCE_DESCRIPTIONS = {
    1: "N=0 anchor: q=4, c_1=0.5, c_2=0.3 from both routes within 1e-13, < 0.1 s",
    2: "100 random accepted reductions: stream agreement 1e-11 up to n=50, < 5 s",
    3: "degree claim: (N+2)-th difference vanishes; A_top = 2+N-delta within 1e-7",
    4: "ODE residual / oracle cross-check < 1e-7 at interior z; q-sensitivity > 1e-4",
    5: "general solver reproduces N=1,2 closed forms; N=3 self-certified, < 60 s",
    6: "rational degeneration: truncation index found, finite-sum residual < 1e-10",
    7: "kernel sanity: binomial identity, derivative vs FD, Pochhammer composition",
}

_STATUS_ORDER = {"PASS": 0, "FAIL (expected)": 1, "FAIL": 2}
_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(num): test backing a numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when != "call":
        return
    num = mark.args[0]
    if rep.passed:
        status = "PASS"
    elif rep.skipped and hasattr(rep, "wasxfail"):
        status = "FAIL (expected)"
    else:
        status = "FAIL"
    prev = _RESULTS.get(num)
    if prev is None or _STATUS_ORDER[status] > _STATUS_ORDER[prev]:
        _RESULTS[num] = status


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_DESCRIPTIONS):
        if num in _RESULTS:
            terminalreporter.write_line(
                f"criterion {num}: {_RESULTS[num]} - {ACCEPTANCE_DESCRIPTIONS[num]}")


def draw_accepted_cases(total, seed=2024, orders=(0, 1, 2)):
    """Deterministic stream of accepted reduction cases with parameters drawn
    uniformly from [-3, 3], skipping draws the validator rejects. The mild
    |a| and |a-1| floors keep the recursion-direction switch well posed."""
    rng = np.random.default_rng(seed)
    cycle = itertools.cycle(orders)
    builders = {0: q_candidates_N0, 1: q_candidates_N1, 2: q_candidates_N2}
    cases = []
    while len(cases) < total:
        n_case = next(cycle)
        a, al, be, ga = rng.uniform(-3.0, 3.0, size=4)
        if abs(a) < 0.05 or abs(a - 1.0) < 0.05:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            try:
                got = builders[n_case](a, al, be, ga)
            except (ValidationError, PreconditionError):
                continue
        cases.extend(got)
    return cases[:total]


@pytest.fixture(scope="session")
def anchor_case():
    """The hand-checkable order-0 case (a=2, alpha=3, beta=2, gamma=1)."""
    return q_candidates_N0(2.0, 3.0, 2.0, 1.0)[0]


@pytest.fixture(scope="session")
def random_cases():
    """100 accepted reductions shared by the acceptance criteria 2-4."""
    return draw_accepted_cases(100)
