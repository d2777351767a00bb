"""Measurement-based coherent charging of quantum batteries made of two-level systems."""

__version__ = "0.1.0"

from .errors import DomainError, InvalidStateError
from .quantum_core import (
    DensityMatrix,
    Hamiltonian,
    dephase_to_diagonal,
    energy_mean_variance,
    kron,
    relative_entropy_of_coherence,
    total_hamiltonian,
    von_neumann_entropy,
)
from .states import (
    TlsParams,
    dephased_tls_state,
    product_state,
    pure_tls_state,
    spontaneous_emission_tls_state,
)
from .measurement import (
    BranchResult,
    MeasurementPair,
    apply_binary_measurement,
    ground_projector,
    pairwise_sequential_projector,
    povm_m0,
)
from .protocols import ChargeOutcome, RusStats, SweepSpec, charge_once, rus_failure_probability, simulate_rus, sweep
from .optimize import PovmOptimum, find_coherence_crossing, optimize_povm, verify_optimal_relation
