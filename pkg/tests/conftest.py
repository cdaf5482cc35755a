from fractions import Fraction

import pytest
from hypothesis import strategies as st

from sunrise.core import IntervalSet, StepWeight, normalize

F = Fraction


def iset(*pairs) -> IntervalSet:
    return normalize(pairs)


def leb(a, b) -> StepWeight:
    return StepWeight((F(a), F(b)), (F(1),))


rationals = st.fractions(min_value=-20, max_value=20, max_denominator=16)
levels = st.integers(1, 19).map(lambda k: F(k, 20))


@st.composite
def interval_sets(draw, max_parts=6):
    k = draw(st.integers(1, max_parts))
    pts = draw(st.lists(rationals, min_size=2 * k, max_size=2 * k, unique=True))
    pts.sort()
    return normalize((pts[2 * i], pts[2 * i + 1]) for i in range(k))


@st.composite
def step_weights(draw, max_cells=6, positive=False):
    n = draw(st.integers(1, max_cells))
    bps = sorted(draw(st.lists(rationals, min_size=n + 1, max_size=n + 1, unique=True)))
    lo = 1 if positive else 0
    vals = draw(st.lists(st.integers(lo, 9).map(F), min_size=n, max_size=n))
    if not any(vals):
        vals[0] = F(1)
    return StepWeight(tuple(bps), tuple(vals))


@pytest.fixture
def unit():
    return iset((0, 1))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
