import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cpdilation.algebra import Algebra
from cpdilation.bimodule import Bimodule
from cpdilation.dilation import GeneratingModule

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

seeds = st.integers(0, 2**32 - 1)


@st.composite
def algebras(draw, max_blocks=3, max_size=3):
    return Algebra(tuple(draw(st.lists(st.integers(1, max_size), min_size=1, max_size=max_blocks))))


@st.composite
def bimodules(draw, left=None, right=None, max_mult=2):
    left = left or draw(algebras())
    right = right or draw(algebras())
    mult = draw(
        st.lists(
            st.lists(st.integers(0, max_mult), min_size=len(right), max_size=len(right)),
            min_size=len(left),
            max_size=len(left),
        )
    )
    return Bimodule(left, right, tuple(map(tuple, mult)))


@st.composite
def modules(draw, end=None, max_size=3):
    """Generating module, optionally with a prescribed ``End``."""
    if end is None:
        end = draw(algebras())
    base = draw(st.lists(st.integers(1, max_size), min_size=len(end), max_size=len(end)))
    return GeneratingModule(Algebra(tuple(base)), end.blocks)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", [])
    if results:
        terminalreporter.section("acceptance criteria")
        for r in sorted(results, key=lambda r: r.number):
            terminalreporter.write_line(r.line())
