"""Coherence-maximising POVM search and coherence crossing points."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .closed_form import povm_relation_b
from .errors import DomainError
from .measurement import apply_binary_measurement, povm_m0
from .protocols import charge_once
from .quantum_core import coherence_many, relative_entropy_of_coherence, total_hamiltonian
from .states import product_state, pure_tls_state

GRID_STEP = 0.005
PARAM_TOL = 1e-6
TIE_TOL = 1e-12
INV_PHI = (math.sqrt(5) - 1) / 2


class NoCrossingError(DomainError):
    """The coherence difference does not change sign over the bracket."""


@dataclass(frozen=True)
class PovmOptimum:
    p: float
    a_opt: float
    b_opt: float
    c_f_opt: float
    e_f_opt: float
    p_s_opt: float
    restricted: bool

    @property
    def relation_residual(self) -> float:
        return abs(self.b_opt - povm_relation_b(self.a_opt))


def golden_section_max(f: Callable[[float], float], lo: float, hi: float,
                       tol: float = PARAM_TOL) -> tuple[float, float]:
    """Maximise a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = f(d)
    x = 0.5 * (lo + hi)
    return x, f(x)


def _pure_pair(p: float):
    if not 0.0 < p < 1.0:
        raise DomainError(f"POVM optimisation needs 0 < p < 1, got {p}")
    return product_state(pure_tls_state(p), 2)


def povm_coherence(p: float, a: float, b: float) -> float:
    """Coherence of the success branch of ``povm_m0(a, b)`` on the pure pair, via the engine."""
    branch = apply_binary_measurement(_pure_pair(p), povm_m0(a, b))[1]
    if branch.state is None:
        return -math.inf
    return relative_entropy_of_coherence(branch.state)


def _grid_coherence(rho: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # success-branch Kraus diagonal sqrt(1 - M0) over the whole (a, b) mesh at once
    aa, bb = np.meshgrid(a, b, indexing="ij")
    k = np.stack([np.sqrt(1 - aa), np.sqrt(1 - bb), np.sqrt(1 - bb), np.ones_like(aa)], axis=-1)
    unnorm = k[..., :, None] * rho * k[..., None, :]
    prob = np.trace(unnorm, axis1=-2, axis2=-1).real
    ok = prob > 1e-12
    safe = np.where(ok, prob, 1.0)[..., None, None]
    vals = coherence_many(unnorm / safe)
    return np.where(ok, vals, -np.inf)


def optimize_povm(p: float, restricted: bool = False, step: float = GRID_STEP,
                  tol: float = PARAM_TOL) -> PovmOptimum:
    """Maximise the success-branch coherence over ``M0 = diag(a, b, b, 0)``.

    Stage one scans ``[0, 1]^2`` (``a = 1`` when ``restricted``) on a grid;
    stage two refines by golden-section search.  In the unrestricted case the
    refinement nests a search over all of ``b`` inside a search over ``a`` in
    the grid cell around the best point: near ``a = 1`` the maximising ``b``
    moves far from its grid value as ``a`` changes by less than one step.
    """
    rho = _pure_pair(p)
    n = int(round(1 / step))
    axis = np.linspace(0.0, 1.0, n + 1)
    a_axis = np.array([1.0]) if restricted else axis
    vals = _grid_coherence(rho.matrix, a_axis, axis)
    best = vals.max()
    i, j = np.argwhere(vals >= best - TIE_TOL)[0]  # row-major: smallest (a, b) among ties
    a0, b0, c0 = float(a_axis[i]), float(axis[j]), float(vals[i, j])

    def objective(a, b):
        return povm_coherence(p, min(max(a, 0.0), 1.0), min(max(b, 0.0), 1.0))

    if restricted:
        b1, c1 = golden_section_max(lambda b: objective(1.0, b),
                                    max(0.0, b0 - step), min(1.0, b0 + step), tol)
        a1 = 1.0
    else:
        def profile(a):
            return golden_section_max(lambda b: objective(a, b), 0.0, 1.0, tol)[1]

        a1, _ = golden_section_max(profile, max(0.0, a0 - step), min(1.0, a0 + step), tol)
        b1, c1 = golden_section_max(lambda b: objective(a1, b), 0.0, 1.0, tol)
    if c1 > c0:
        a0, b0 = a1, b1

    out = charge_once(rho, povm_m0(a0, b0), total_hamiltonian(2))
    return PovmOptimum(p, a0, b0, out.c_final, out.e_final, out.p_success, restricted)


def verify_optimal_relation(p_grid, restricted: bool = False) -> float:
    """Largest ``|b_opt - (1 - sqrt(1 - a_opt))|`` over the grid."""
    dev = 0.0
    for p in p_grid:
        if not 0.0 < p <= 0.4:
            raise ValueError(f"grid points must lie in (0, 0.4], got {p}")
        dev = max(dev, optimize_povm(p, restricted).relation_residual)
    return dev


def find_coherence_crossing(evaluator: Callable[[float], tuple[float, float]],
                            bracket: tuple[float, float], tol: float = 1e-6,
                            max_iter: int = 60) -> float:
    """Bisection for ``cf(p) = c0(p)``, with ``evaluator(p) -> (c0, cf)``."""
    lo, hi = bracket
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")

    def g(p):
        c0, cf = evaluator(p)
        return cf - c0

    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if (g_lo > 0) == (g_hi > 0):
        raise NoCrossingError(f"no sign change of cf - c0 on [{lo}, {hi}]")
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if g_mid == 0.0:
            return mid
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def family_evaluator(family: str = "pure", N: int = 2, protocol: str = "projector_global",
                     **params) -> Callable[[float], tuple[float, float]]:
    """``p -> (c0, cf)`` for a state family and projector protocol, through the engine."""
    from .protocols import build_measurement
    from .states import initial_state

    m = build_measurement(protocol, N)
    H = total_hamiltonian(N)

    def evaluate(p):
        out = charge_once(initial_state(family, p, N, **params), m, H)
        if not out.succeeded:
            raise DomainError(f"no success branch at p = {p}")
        return out.c_initial, out.c_final

    return evaluate
