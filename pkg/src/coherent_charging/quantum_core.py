"""Dense linear algebra on small Hilbert spaces and the energy/coherence functionals.

Basis convention: for ``N`` two-level systems the basis index is
``b = sum_j b_j * 2**(N-1-j)`` with ``b_j = 0`` for ``|g_j>`` and ``1`` for
``|e_j>``; subsystem 1 is the most significant bit.  For ``N = 2`` the order
is therefore ``(gg, ge, eg, ee)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import InvalidStateError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIG_CLIP = 1e-10
MAX_DIM = 2**16


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a read-only square complex array."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    m.setflags(write=False)
    return m


def matrices_equal(a, b, atol: float = 1e-12) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= atol))


def kron(a, b) -> np.ndarray:
    """Kronecker product ``(A ⊗ B)[i*dB + k, j*dB + l] = A[i, j] * B[k, l]``."""
    return as_matrix(np.kron(as_matrix(a), as_matrix(b)))


def kron_all(factors) -> np.ndarray:
    return reduce(kron, factors)


def hermitian_eigh(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix, ascending eigenvalues."""
    return np.linalg.eigh(as_matrix(m))


def popcount(b: int) -> int:
    return bin(b).count("1")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Trace-one Hermitian positive semidefinite operator.

    Construction validates the matrix; instances are immutable.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape[0] > MAX_DIM:
            raise ValueError(f"dimension {m.shape[0]} exceeds {MAX_DIM}")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise InvalidStateError("matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace {np.trace(m).real:.15g} != 1")
        if np.linalg.eigvalsh(m)[0] < -EIG_CLIP:
            raise InvalidStateError("matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", m)

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return np.array_equal(self.matrix, other.matrix)

    __hash__ = None

    @classmethod
    def from_ket(cls, psi) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=np.complex128)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_tls(self) -> int:
        n = self.dim.bit_length() - 1
        if 2**n != self.dim:
            raise ValueError(f"dimension {self.dim} is not a power of two")
        return n

    def populations(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    def is_diagonal(self, atol: float = 1e-12) -> bool:
        off = self.matrix - np.diag(self.matrix.diagonal())
        return bool(np.all(np.abs(off) <= atol))


@dataclass(frozen=True)
class Hamiltonian:
    """Non-interacting TLS Hamiltonian, diagonal in the tensor basis."""

    matrix: np.ndarray
    gap: float
    count: int

    @property
    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal().real


def total_hamiltonian(N: int, E: float = 1.0) -> Hamiltonian:
    """Sum of ``N`` single-TLS terms ``(E/2)(|e><e| - |g><g|)``.

    The entry at basis index ``b`` is ``(E/2) * (2 * popcount(b) - N)``.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if not E > 0:
        raise ValueError(f"energy gap must be positive, got {E}")
    if 2**N > MAX_DIM:
        raise ValueError(f"N = {N} exceeds the supported dimension")
    single = as_matrix(np.diag([-E / 2, E / 2]))
    eye = np.eye(2)
    h = np.zeros((2**N, 2**N), dtype=np.complex128)
    for j in range(N):
        h = h + kron_all([single if k == j else eye for k in range(N)])
    return Hamiltonian(as_matrix(h), float(E), N)


def energy_mean_variance(rho: DensityMatrix, H: Hamiltonian) -> tuple[float, float]:
    """Mean ``Tr(rho H)`` and variance ``Tr(rho H^2) - mean^2``."""
    if rho.dim != H.matrix.shape[0]:
        raise ValueError(f"dimension mismatch: state {rho.dim}, Hamiltonian {H.matrix.shape[0]}")
    h = H.matrix
    mean = np.trace(rho.matrix @ h).real
    second = np.trace(rho.matrix @ h @ h).real
    return float(mean), float(second - mean * mean)


def _entropy_from_eigenvalues(w: np.ndarray) -> np.ndarray:
    # w: (..., d) real eigenvalues
    if np.any(w < -EIG_CLIP):
        raise InvalidStateError(f"eigenvalue {w.min():.3g} below -{EIG_CLIP}")
    w = np.where(w < 0, 0.0, w)
    w = np.where((w > 1) & (w <= 1 + EIG_CLIP), 1.0, w)
    safe = np.where(w > 0, w, 1.0)
    return -np.sum(w * np.log(safe), axis=-1)


def shannon_entropy(probs) -> float:
    """Shannon entropy in nats with ``0 ln 0 = 0``."""
    return float(_entropy_from_eigenvalues(np.asarray(probs, dtype=float)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """``S = -Tr(rho ln rho)`` in nats."""
    return float(_entropy_from_eigenvalues(np.linalg.eigvalsh(rho.matrix)))


def dephase_to_diagonal(rho: DensityMatrix) -> DensityMatrix:
    """Drop every off-diagonal element in the energy basis."""
    return DensityMatrix(np.diag(rho.matrix.diagonal()))


def relative_entropy_of_coherence(rho: DensityMatrix) -> float:
    """``C(rho) = S(rho_diag) - S(rho)``."""
    if rho.is_diagonal(atol=0.0):
        return 0.0
    return shannon_entropy(rho.populations()) - von_neumann_entropy(rho)


def coherence_many(stack: np.ndarray) -> np.ndarray:
    """Relative entropy of coherence for a stack of density matrices ``(..., d, d)``.

    No validation beyond the eigenvalue clip; callers pass states they built.
    """
    stack = np.asarray(stack)
    diag = np.diagonal(stack, axis1=-2, axis2=-1).real
    return _entropy_from_eigenvalues(diag) - _entropy_from_eigenvalues(np.linalg.eigvalsh(stack))
