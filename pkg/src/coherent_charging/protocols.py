"""Single-shot charging, repeat-until-success statistics and parameter sweeps."""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .measurement import (
    MeasurementPair,
    apply_binary_measurement,
    ground_projector,
    pairwise_sequential_projector,
    povm_m0,
)
from .quantum_core import (
    DensityMatrix,
    Hamiltonian,
    energy_mean_variance,
    relative_entropy_of_coherence,
    total_hamiltonian,
)
from .states import initial_state

RUS_BLOCK = 1 << 16


@dataclass(frozen=True)
class ChargeOutcome:
    """Everything measured in one evaluation of a charging protocol.

    Final-state fields are ``None`` when the success branch has zero probability.
    """

    p_success: float
    e_initial: float
    var_initial: float
    c_initial: float
    e_final: Optional[float] = None
    var_final: Optional[float] = None
    c_final: Optional[float] = None
    success_state: Optional[DensityMatrix] = field(default=None, repr=False)
    failure_state: Optional[DensityMatrix] = field(default=None, repr=False)

    @property
    def succeeded(self) -> bool:
        return self.success_state is not None

    @property
    def delta_e(self) -> Optional[float]:
        return None if self.e_final is None else self.e_final - self.e_initial

    @property
    def delta_c(self) -> Optional[float]:
        return None if self.c_final is None else self.c_final - self.c_initial


def charge_once(initial: DensityMatrix, m: MeasurementPair, H: Hamiltonian) -> ChargeOutcome:
    """Measure ``initial`` with ``m`` and report the success (outcome 1) branch."""
    if not (initial.dim == m.dim == H.matrix.shape[0]):
        raise ValueError("state, measurement and Hamiltonian dimensions disagree")
    fail, success = apply_binary_measurement(initial, m)
    e0, v0 = energy_mean_variance(initial, H)
    c0 = relative_entropy_of_coherence(initial)
    if success.state is None:
        return ChargeOutcome(success.probability, e0, v0, c0, failure_state=fail.state)
    ef, vf = energy_mean_variance(success.state, H)
    cf = relative_entropy_of_coherence(success.state)
    return ChargeOutcome(success.probability, e0, v0, c0, ef, vf, cf, success.state, fail.state)


def rus_failure_probability(p_success: float, R: int) -> float:
    """Probability that ``R`` independent rounds all fail."""
    if R < 1:
        raise ValueError(f"R must be >= 1, got {R}")
    if not 0.0 <= p_success <= 1.0:
        raise ValueError(f"p_success must lie in [0, 1], got {p_success}")
    return (1.0 - p_success) ** R


@dataclass(frozen=True)
class RusStats:
    rounds: int
    analytic_failure: float
    empirical_failure: float
    trials: int
    seed: int

    @property
    def sigma(self) -> float:
        q = self.analytic_failure
        return float(np.sqrt(q * (1 - q) / self.trials))

    @property
    def within_3_sigma(self) -> bool:
        return abs(self.empirical_failure - self.analytic_failure) <= 3 * self.sigma + 1e-15


def _first_success_block(seed: int, block: int, n: int, rounds: int, p_success: float) -> np.ndarray:
    # Philox keyed by (seed, block index): the stream for a trial depends only on the seed
    # and the trial number, never on how blocks are distributed over threads.
    gen = np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), block]))
    u = gen.random((n, rounds))
    hit = u < p_success
    first = np.where(hit.any(axis=1), hit.argmax(axis=1) + 1, rounds + 1)
    return np.bincount(first, minlength=rounds + 2)


def simulate_rus_rounds(initial: DensityMatrix, m: MeasurementPair, R: int, trials: int,
                        seed: int, threads: int = 1) -> list[RusStats]:
    """Monte Carlo of repeat-until-success; one ``RusStats`` per round count ``1..R``.

    Each trial restarts from ``initial`` after a failure, so every round
    succeeds independently with the success-branch probability.
    """
    if R < 1 or trials < 1:
        raise ValueError("R and trials must be >= 1")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    p_s = apply_binary_measurement(initial, m)[1].probability
    starts = list(range(0, trials, RUS_BLOCK))
    jobs = [(seed, i, min(RUS_BLOCK, trials - s), R, p_s) for i, s in enumerate(starts)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda j: _first_success_block(*j), jobs))
    else:
        parts = [_first_success_block(*j) for j in jobs]
    counts = np.sum(parts, axis=0)
    # counts[r] = trials whose first success happened in round r; index R+1 = never
    failed_after = trials - np.cumsum(counts[1:R + 1])
    return [
        RusStats(r, rus_failure_probability(p_s, r), float(failed_after[r - 1]) / trials, trials, seed)
        for r in range(1, R + 1)
    ]


def simulate_rus(initial: DensityMatrix, m: MeasurementPair, R: int, trials: int,
                 seed: int, threads: int = 1) -> RusStats:
    return simulate_rus_rounds(initial, m, R, trials, seed, threads)[-1]


FAMILIES = ("pure", "dephased", "spontaneous")
PROTOCOLS = ("projector_global", "projector_pairwise", "povm")


def frange(start: float, stop: float, step: float) -> list[float]:
    """Inclusive grid ``start, start+step, ..., stop``, values rounded to 12 decimals."""
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(np.floor((stop - start) / step + 1e-9))
    if n < 0:
        raise ValueError(f"empty range {start}:{stop}:{step}")
    return [round(start + i * step, 12) for i in range(n + 1)]


@dataclass(frozen=True)
class SweepSpec:
    """Declarative parameter sweep.  Grids are explicit value lists."""

    family: str = "pure"
    protocol: str = "projector_global"
    N: Sequence[int] = (2,)
    E: float = 1.0
    p_grid: Sequence[float] = tuple(frange(0.01, 0.99, 0.01))
    epsilon_grid: Sequence[float] = (1.0,)
    eta_grid: Sequence[float] = (0.0,)
    a_grid: Sequence[float] = (1.0,)
    b_grid: Sequence[float] = (0.0,)

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"protocol must be one of {PROTOCOLS}")
        for name in ("N", "p_grid", "epsilon_grid", "eta_grid", "a_grid", "b_grid"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"{name} is empty")
        if any(int(n) < 2 for n in self.N):
            raise ValueError("N must be >= 2")
        if self.protocol == "povm" and any(int(n) != 2 for n in self.N):
            raise ValueError("the POVM protocol is defined for N = 2 only")
        if not self.E > 0:
            raise ValueError("E must be positive")
        for name in ("p_grid", "epsilon_grid", "eta_grid", "a_grid", "b_grid"):
            if any(not 0.0 <= x <= 1.0 for x in getattr(self, name)):
                raise ValueError(f"{name} values must lie in [0, 1]")
        if any(p == 0.0 for p in self.p_grid):
            raise DomainError("p = 0 has no success branch")

    def axes(self) -> dict[str, list]:
        """Active grid axes in key order ``(p, epsilon, eta, N, a, b)``; inactive ones are ``[None]``."""
        return {
            "p": list(self.p_grid),
            "epsilon": list(self.epsilon_grid) if self.family == "dephased" else [None],
            "eta": list(self.eta_grid) if self.family == "spontaneous" else [None],
            "N": [int(n) for n in self.N],
            "a": list(self.a_grid) if self.protocol == "povm" else [None],
            "b": list(self.b_grid) if self.protocol == "povm" else [None],
        }


def build_measurement(protocol: str, N: int, a: float | None = None, b: float | None = None) -> MeasurementPair:
    if protocol == "projector_global":
        return ground_projector(N)
    if protocol == "projector_pairwise":
        return pairwise_sequential_projector(N)
    if protocol == "povm":
        return povm_m0(a, b)
    raise ValueError(f"unknown protocol {protocol!r}")


def _evaluate(spec: SweepSpec, key: tuple) -> ChargeOutcome:
    p, eps, eta, N, a, b = key
    rho = initial_state(spec.family, p, N, epsilon=eps, eta=eta)
    out = charge_once(rho, build_measurement(spec.protocol, N, a, b), total_hamiltonian(N, spec.E))
    if not out.succeeded:
        raise DomainError(f"success branch has zero probability at {key}")
    return out


def sweep(spec: SweepSpec, threads: int = 1) -> list[tuple[tuple, ChargeOutcome]]:
    """Evaluate ``charge_once`` on every grid point.

    Keys are ``(p, epsilon, eta, N, a, b)`` with ``None`` for inactive axes;
    order is lexicographic over the axes (``p`` slowest), independent of ``threads``.
    """
    spec.validate()
    axes = spec.axes()
    keys = list(itertools.product(*axes.values()))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(lambda k: _evaluate(spec, k), keys))
    else:
        outcomes = [_evaluate(spec, k) for k in keys]
    return list(zip(keys, outcomes))
