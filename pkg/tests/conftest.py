import numpy as np
import pytest
from hypothesis import strategies as st

from coherent_charging.quantum_core import DensityMatrix

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
open_unit = st.floats(min_value=1e-3, max_value=1 - 1e-3, allow_nan=False)


def spec_order(diag):
    """Two-TLS diagonal listed as (ee, eg, ge, gg) -> package order (gg, ge, eg, ee)."""
    return np.asarray(diag)[::-1]


def random_density(rng, dim, rank=None):
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
