import sys
import numpy as np
import pytest
from hypothesis import strategies as st

from relmod.algebra import AlgebraShape

SHAPES = [
    AlgebraShape((2,), (1.0,)),
    AlgebraShape((3,), (1.0,)),
    AlgebraShape((2, 2), (0.7, 1.6)),
    AlgebraShape((1, 3), (2.0, 0.4)),
]

shapes = st.sampled_from(SHAPES)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=SHAPES, ids=lambda s: "x".join(map(str, s.block_dims)))
def shape(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
