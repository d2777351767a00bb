"""Initial single-TLS states and their tensor powers.

Single-TLS matrices are in the basis ``(|g>, |e>)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quantum_core import DensityMatrix, kron_all


def _check_unit(name: str, x: float) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x}")
    return x


@dataclass(frozen=True)
class TlsParams:
    """Excitation probability, dephasing factor and emission probability of one TLS."""

    p: float
    epsilon: float = 1.0
    eta: float = 0.0

    def __post_init__(self):
        for name in ("p", "epsilon", "eta"):
            _check_unit(name, getattr(self, name))

    def state(self) -> DensityMatrix:
        """Dephasing and emission combined; each reduces to its own family when the other is trivial."""
        p, eps, eta = self.p, self.epsilon, self.eta
        off = eps * math.sqrt(1 - eta) * math.sqrt(p * (1 - p))
        return DensityMatrix(np.array([[(1 - p) + eta * p, off], [off, (1 - eta) * p]]))


def pure_tls_state(p: float) -> DensityMatrix:
    """``|psi> = sqrt(p)|e> + sqrt(1-p)|g>``."""
    p = _check_unit("p", p)
    return DensityMatrix.from_ket([math.sqrt(1 - p), math.sqrt(p)])


def dephased_tls_state(p: float, epsilon: float) -> DensityMatrix:
    """Populations ``(1-p, p)`` with the coherence scaled by ``epsilon``.

    ``epsilon = 1`` is accepted and gives the pure state.
    """
    return TlsParams(p, epsilon=epsilon).state()


def spontaneous_emission_tls_state(p: float, eta: float) -> DensityMatrix:
    """Pure state after decay ``|e> -> |g>`` with probability ``eta``."""
    return TlsParams(p, eta=eta).state()


def product_state(single: DensityMatrix, N: int) -> DensityMatrix:
    """``N``-fold tensor power of a single-TLS state."""
    if single.dim != 2:
        raise ValueError(f"expected a single-TLS (dim 2) state, got dim {single.dim}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return DensityMatrix(kron_all([single.matrix] * N))


def initial_state(family: str, p: float, N: int, epsilon: float | None = None,
                  eta: float | None = None) -> DensityMatrix:
    """Product state for one of the named families: ``pure``, ``dephased``, ``spontaneous``."""
    if family == "pure":
        single = pure_tls_state(p)
    elif family == "dephased":
        single = dephased_tls_state(p, 1.0 if epsilon is None else epsilon)
    elif family == "spontaneous":
        single = spontaneous_emission_tls_state(p, 0.0 if eta is None else eta)
    else:
        raise ValueError(f"unknown state family {family!r}")
    return product_state(single, N)
