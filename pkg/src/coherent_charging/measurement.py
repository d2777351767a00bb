"""Binary measurements diagonal in the energy basis and the Lüders update."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .quantum_core import DensityMatrix, as_matrix, popcount

PROB_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class MeasurementPair:
    """``{M0, M1 = 1 - M0}`` with ``M0`` diagonal, entries in ``[0, 1]``.

    Outcome 0 discards, outcome 1 is the charging (success) branch.
    """

    m0_diag: np.ndarray

    def __post_init__(self):
        d = np.array(self.m0_diag, dtype=float)
        if d.ndim != 1 or d.size < 1:
            raise ValueError("m0_diag must be a non-empty vector")
        if np.any(d < 0) or np.any(d > 1):
            raise ValueError("measurement element entries must lie in [0, 1]")
        d.setflags(write=False)
        object.__setattr__(self, "m0_diag", d)

    def __eq__(self, other):
        if not isinstance(other, MeasurementPair):
            return NotImplemented
        return np.array_equal(self.m0_diag, other.m0_diag)

    __hash__ = None

    @property
    def dim(self) -> int:
        return self.m0_diag.size

    @property
    def m1_diag(self) -> np.ndarray:
        return 1.0 - self.m0_diag

    @property
    def m0(self) -> np.ndarray:
        return as_matrix(np.diag(self.m0_diag))

    @property
    def m1(self) -> np.ndarray:
        return as_matrix(np.diag(self.m1_diag))

    @property
    def kind(self) -> str:
        return "projector" if np.all((self.m0_diag == 0) | (self.m0_diag == 1)) else "povm"


@dataclass(frozen=True)
class BranchResult:
    probability: float
    state: Optional[DensityMatrix]


def _check_n(N: int, minimum: int) -> None:
    if N < minimum:
        raise ValueError(f"N must be >= {minimum}, got {N}")


def ground_projector(N: int) -> MeasurementPair:
    """``M0`` projects onto the all-ground state (basis index 0)."""
    _check_n(N, 1)
    d = np.zeros(2**N)
    d[0] = 1.0
    return MeasurementPair(d)


def povm_m0(a: float, b: float) -> MeasurementPair:
    """Two-TLS element ``M0 = a|gg><gg| + b(|ge><ge| + |eg><eg|)``."""
    for name, x in (("a", a), ("b", b)):
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {x}")
    return MeasurementPair(np.array([a, b, b, 0.0]))


def no_adjacent_ground(b: int, N: int) -> bool:
    """True when basis index ``b`` has no neighbouring pair ``g_i g_{i+1}``."""
    bits = [(b >> (N - 1 - j)) & 1 for j in range(N)]
    return not any(bits[j] == 0 and bits[j + 1] == 0 for j in range(N - 1))


def pairwise_sequential_projector(N: int, order=None) -> MeasurementPair:
    """``M1 = prod_i (1 - |g_i g_{i+1}><g_i g_{i+1}|)`` over neighbouring pairs.

    ``order`` permutes the factor sequence; the factors are diagonal so the
    result does not depend on it.
    """
    _check_n(N, 2)
    pairs = list(range(N - 1)) if order is None else list(order)
    if sorted(pairs) != list(range(N - 1)):
        raise ValueError("order must be a permutation of the N-1 neighbour pairs")
    m1 = np.ones(2**N)
    idx = np.arange(2**N)
    for i in pairs:
        gi = ((idx >> (N - 1 - i)) & 1) == 0
        gj = ((idx >> (N - 2 - i)) & 1) == 0
        m1 = m1 * np.where(gi & gj, 0.0, 1.0)
    return MeasurementPair(1.0 - m1)


def excitation_counts(N: int) -> np.ndarray:
    return np.array([popcount(b) for b in range(2**N)])


def apply_binary_measurement(rho: DensityMatrix, m: MeasurementPair) -> tuple[BranchResult, BranchResult]:
    """Outcome probabilities ``Tr(M_k rho)`` and states ``K rho K / p`` with ``K = sqrt(M_k)``."""
    if rho.dim != m.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, measurement {m.dim}")
    branches = []
    for diag in (m.m0_diag, m.m1_diag):
        k = np.sqrt(diag)
        unnorm = k[:, None] * rho.matrix * k[None, :]
        prob = min(float(np.trace(unnorm).real), 1.0)
        if prob > PROB_EPS:
            branches.append(BranchResult(prob, DensityMatrix(unnorm / prob)))
        else:
            branches.append(BranchResult(max(prob, 0.0), None))
    total = branches[0].probability + branches[1].probability
    if total < PROB_EPS:
        raise ValueError("both branches have zero probability; the state is corrupt")
    return branches[0], branches[1]
