import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coherent_charging.closed_form import (
    LN2,
    dephased_approx,
    dephased_bound_quartic,
    global_limit_cf,
    n_tls,
    optimal_povm_uniform,
    pairwise_limit_cf,
    povm_a_polynomial,
    povm_relation_b,
    pure2,
    pure2_cf_approx,
    spontaneous_forms,
)
from coherent_charging.errors import DomainError
from coherent_charging.measurement import ground_projector
from coherent_charging.protocols import charge_once
from coherent_charging.quantum_core import shannon_entropy, total_hamiltonian
from coherent_charging.states import product_state, pure_tls_state

P_GRID = np.round(np.arange(1, 100) / 100, 2)


def test_pure2_at_0_1():
    r = pure2(0.1)
    assert r.p_s == pytest.approx(0.19, abs=1e-15)
    assert r.ef == pytest.approx(1 / 19, abs=1e-15)
    assert r.e0 == pytest.approx(-0.8, abs=1e-15)
    assert r.delta_e == pytest.approx(0.852632, abs=1e-6)
    assert r.delta_e == pytest.approx(r.ef - r.e0, abs=1e-15)
    assert r.var0 == pytest.approx(0.18, abs=1e-15)
    # populations (1/19, 9/19, 9/19) at energies (1, 0, 0)
    assert r.varf == pytest.approx(18 / 361, abs=1e-15)
    assert r.c0 == pytest.approx(0.6501659467828965, abs=1e-12)


def test_pure2_limits():
    r = pure2(1.0)
    assert (r.p_s, r.ef, r.e0, r.delta_e, r.var0, r.varf, r.c0) == (1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0)
    assert pure2(0.5).c0 == pytest.approx(2 * math.log(2), abs=1e-14)
    with pytest.raises(DomainError):
        pure2(0.0)


def test_cf_approx():
    assert pure2_cf_approx(0.0) == pytest.approx(LN2)
    assert pure2_cf_approx(0.650166) == pytest.approx(0.873411, abs=1e-6)
    assert abs(pure2_cf_approx(0.650166) - 0.862858) < 0.011
    # self-consistent point c = ln2 (2c/5 + 1)
    c = LN2 / (1 - 2 * LN2 / 5)
    assert c == pytest.approx(0.959, abs=1e-3)
    assert pure2_cf_approx(c) == pytest.approx(c, abs=1e-12)


def test_cf_approx_error_low_branch():
    # the fitted map tracks the exact curve on p <= 1/2 (C_0 increasing in p)
    worst = 0.0
    for p in np.linspace(1e-4, 0.5, 2001):
        exact = shannon_entropy([p / (2 - p), (1 - p) / (2 - p), (1 - p) / (2 - p)])
        worst = max(worst, abs(exact - pure2_cf_approx(pure2(p).c0)))
    assert worst <= 0.03


def test_cf_approx_fails_near_full_excitation():
    exact = shannon_entropy([0.99 / 1.01, 0.01 / 1.01, 0.01 / 1.01])
    assert abs(exact - pure2_cf_approx(pure2(0.99).c0)) > 0.3


def test_dephased_approx():
    assert dephased_approx(0.4, 0.0) == pytest.approx(((LN2 / 2 - 1) * 0.4, 0.0), abs=1e-15)
    _, bound = dephased_approx(0.1, 0.5)
    assert bound == pytest.approx(0.0459013042255459, abs=1e-12)
    quartic = dephased_bound_quartic(0.5)
    assert quartic == pytest.approx(0.04541598191868367, abs=1e-12)
    assert abs(quartic - bound) / bound < 0.02
    with pytest.raises(DomainError):
        dephased_approx(0.1, 1.0)


def test_spontaneous_forms():
    ps, e0, _, _ = spontaneous_forms(0.3, 0.0)
    assert (ps, e0) == pytest.approx((0.3 * 1.7, -0.4), abs=1e-15)
    ps, e0, _, bound = spontaneous_forms(0.1, 0.1)
    assert ps == pytest.approx(0.1719, abs=1e-12)
    assert e0 == pytest.approx(-0.82, abs=1e-12)
    assert bound == pytest.approx(1.060788438069005, abs=1e-12)
    with pytest.raises(DomainError):
        spontaneous_forms(0.0, 0.1)


def test_n_tls_values():
    r = n_tls(0.1, 1.0, 4)
    assert r.p_s_n == pytest.approx(0.3439, abs=1e-14)
    assert r.delta_e_n == pytest.approx(0.7631288165164292, abs=1e-12)
    assert r.delta_e_n == pytest.approx(r.ef_n - r.e0_n, abs=1e-14)
    assert n_tls(1e-6, 1.0, 3).cf_n == pytest.approx(math.log(3), abs=1e-4)
    with pytest.raises(DomainError):
        n_tls(0.0, 1.0, 3)


@pytest.mark.parametrize("p", [0.01, 0.1, 0.37, 0.9, 1.0])
def test_n_tls_reduces_to_pure2(p):
    a, b = n_tls(p, 2.0, 2), pure2(p, 2.0)
    assert a.p_s_n == pytest.approx(b.p_s, abs=1e-14)
    assert a.e0_n == pytest.approx(b.e0, abs=1e-14)
    assert a.ef_n == pytest.approx(b.ef, abs=1e-14)
    assert a.delta_e_n == pytest.approx(b.delta_e, abs=1e-14)
    assert a.c0_n == pytest.approx(b.c0, abs=1e-14)


def test_limits():
    assert global_limit_cf(4) == math.log(4)
    assert pairwise_limit_cf(4) == pytest.approx(math.log(3))
    with pytest.raises(ValueError):
        pairwise_limit_cf(3)


def test_povm_helpers():
    a, b = optimal_povm_uniform(0.2)
    assert (a, b) == pytest.approx((0.9375, 0.75))
    assert povm_relation_b(a) == pytest.approx(b)
    assert povm_relation_b(1.0) == 1.0
    assert povm_a_polynomial(0.2) == pytest.approx(0.9272)
    with pytest.raises(DomainError):
        optimal_povm_uniform(0.6)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_engine_matches_n_tls(N):
    H = total_hamiltonian(N)
    m = ground_projector(N)
    for p in P_GRID:
        out = charge_once(product_state(pure_tls_state(p), N), m, H)
        r = n_tls(p, 1.0, N)
        assert out.p_success == pytest.approx(r.p_s_n, abs=1e-10)
        assert out.e_initial == pytest.approx(r.e0_n, abs=1e-10)
        assert out.e_final == pytest.approx(r.ef_n, abs=1e-10)
        assert out.delta_e == pytest.approx(r.delta_e_n, abs=1e-10)
        assert out.c_initial == pytest.approx(r.c0_n, abs=1e-10)
        assert out.c_final == pytest.approx(r.cf_n, abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-6, 1 - 1e-6), st.integers(1, 30))
def test_n_tls_invariants(p, N):
    r = n_tls(p, 1.0, N)
    assert r.delta_e_n <= 1.0
    assert r.c0_n >= 0
    assert r.cf_n <= N * LN2 + 1e-9
    assert r.p_s_n == pytest.approx(1 - (1 - p) ** N, rel=1e-9, abs=1e-15)
