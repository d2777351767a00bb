import math

import numpy as np
import pytest
from hypothesis import given, settings

from coherent_charging.closed_form import n_tls
from coherent_charging.quantum_core import (
    DensityMatrix,
    energy_mean_variance,
    matrices_equal,
    relative_entropy_of_coherence,
    total_hamiltonian,
)
from coherent_charging.states import (
    TlsParams,
    dephased_tls_state,
    initial_state,
    product_state,
    pure_tls_state,
    spontaneous_emission_tls_state,
)

from conftest import open_unit, unit

GRID = np.round(np.arange(0, 101) / 100, 2)


def test_pure_endpoints():
    assert matrices_equal(pure_tls_state(0).matrix, np.diag([1.0, 0.0]))
    assert matrices_equal(pure_tls_state(1).matrix, np.diag([0.0, 1.0]))
    assert pure_tls_state(0.1).matrix[0, 1] == pytest.approx(0.3, abs=1e-15)


def test_dephased():
    assert matrices_equal(dephased_tls_state(0.37, 1.0).matrix, pure_tls_state(0.37).matrix, 1e-14)
    assert relative_entropy_of_coherence(dephased_tls_state(0.37, 0.0)) == 0.0
    assert dephased_tls_state(0.1, 0.5).matrix[0, 1] == pytest.approx(0.15, abs=1e-15)


def test_spontaneous():
    assert matrices_equal(spontaneous_emission_tls_state(0.37, 0.0).matrix, pure_tls_state(0.37).matrix, 1e-14)
    assert matrices_equal(spontaneous_emission_tls_state(0.37, 1.0).matrix, np.diag([1.0, 0.0]))
    m = spontaneous_emission_tls_state(0.1, 0.1).matrix
    assert m[0, 0].real == pytest.approx(0.91)
    assert m[1, 1].real == pytest.approx(0.09)
    assert m[0, 1].real == pytest.approx(math.sqrt(0.9) * 0.3, abs=1e-15)
    assert m[0, 1].real == pytest.approx(0.284605, abs=1e-6)


@pytest.mark.parametrize("bad", [-0.1, 1.1])
def test_out_of_range(bad):
    with pytest.raises(ValueError):
        pure_tls_state(bad)
    with pytest.raises(ValueError):
        dephased_tls_state(0.5, bad)
    with pytest.raises(ValueError):
        spontaneous_emission_tls_state(bad, 0.5)
    with pytest.raises(ValueError):
        TlsParams(0.5, eta=bad)


def test_grid_scan_valid():
    # construction itself validates Hermiticity, trace and PSD
    for p in GRID:
        for x in GRID[::5]:
            dephased_tls_state(p, x)
            spontaneous_emission_tls_state(p, x)


def test_product_state():
    g = pure_tls_state(0)
    assert matrices_equal(product_state(g, 2).matrix, np.diag([1.0, 0, 0, 0]))
    assert product_state(pure_tls_state(0.1), 2).matrix[0, 0].real == pytest.approx(0.81)
    with pytest.raises(ValueError):
        product_state(product_state(g, 2), 2)
    with pytest.raises(ValueError):
        initial_state("thermal", 0.1, 2)


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_product_coherence_matches_binomial_form(N):
    for p in (0.01, 0.1, 0.3, 0.5, 0.77):
        c = relative_entropy_of_coherence(product_state(pure_tls_state(p), N))
        assert c == pytest.approx(n_tls(p, 1.0, N).c0_n, abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(unit, unit, unit)
def test_reduction_chain(p, eps, eta):
    pure = pure_tls_state(p).matrix
    assert matrices_equal(dephased_tls_state(p, 1.0).matrix, pure, 1e-14)
    assert matrices_equal(spontaneous_emission_tls_state(p, 0.0).matrix, pure, 1e-14)
    assert isinstance(TlsParams(p, eps, eta).state(), DensityMatrix)


@settings(max_examples=30, deadline=None)
@given(unit, unit)
def test_coherence_additive(p, eps):
    single = dephased_tls_state(p, eps)
    for N in (2, 3):
        assert relative_entropy_of_coherence(product_state(single, N)) == pytest.approx(
            N * relative_entropy_of_coherence(single), abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(open_unit)
def test_initial_energy(p):
    for N in (2, 3, 4):
        mean, _ = energy_mean_variance(product_state(pure_tls_state(p), N), total_hamiltonian(N))
        assert mean == pytest.approx(N / 2 * (2 * p - 1), abs=1e-10)
