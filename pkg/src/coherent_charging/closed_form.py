"""Analytic expressions for the charging protocols.

The exact formulas here are independent of the matrix engine and are used to
cross-check it.  The fitted approximations (``pure2_cf_approx``,
``dephased_approx``, ``spontaneous_forms``' coherence terms) are only for
reproducing the approximate curves and bounds, never for validation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

LN2 = math.log(2.0)


def _xlogx(x: float) -> float:
    return 0.0 if x == 0.0 else x * math.log(x)


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p == 0.0:
        raise DomainError("success branch is undefined at p = 0")


@dataclass(frozen=True)
class Pure2Record:
    p_s: float
    e0: float
    ef: float
    delta_e: float
    var0: float
    varf: float
    c0: float


@dataclass(frozen=True)
class NTlsRecord:
    p_s_n: float
    e0_n: float
    ef_n: float
    delta_e_n: float
    c0_n: float
    cf_n: float


def pure2(p: float, E: float = 1.0) -> Pure2Record:
    """Two TLS in pure states, ground-state rejection."""
    _check_p(p)
    p_s = p * (2 - p)
    e0 = (2 * p - 1) * E
    ef = p * E / (2 - p)
    var0 = 2 * p * (1 - p) * E**2
    varf = var0 / (2 - p) ** 2
    delta_e = 2 * (1 - p) ** 2 * E / (2 - p)
    c0 = -2 * (_xlogx(p) + _xlogx(1 - p))
    return Pure2Record(p_s, e0, ef, delta_e, var0, varf, c0)


def pure2_cf_approx(c0: float) -> float:
    """Fitted linear map from initial to final coherence, ``ln2 (2 c0 / 5 + 1)``."""
    if c0 < 0:
        raise ValueError("c0 must be non-negative")
    return LN2 * (2 * c0 / 5 + 1)


def _dephasing_offset(epsilon: float) -> float:
    e2 = epsilon**2
    return e2 * math.atanh(e2) + 0.5 * math.log(1 - e2 * e2)


def dephased_approx(c0: float, epsilon: float) -> tuple[float, float]:
    """Approximate coherence gain and crossing value for dephased pairs.

    Returns ``(delta_c, c0_bound)``.  Only defined for ``epsilon < 1``.
    """
    if c0 < 0:
        raise ValueError("c0 must be non-negative")
    if not 0.0 <= epsilon < 1.0:
        raise DomainError(f"approximation requires 0 <= epsilon < 1, got {epsilon}")
    offset = _dephasing_offset(epsilon)
    slope = (5 - epsilon) / 10 * LN2
    return (slope - 1) * c0 + offset, offset / (1 - slope)


def dephased_bound_quartic(epsilon: float) -> float:
    """Small-epsilon shortcut ``eps^4 / (2 (1 - ln2 (5 - eps)/10))`` for the crossing value."""
    if not 0.0 <= epsilon < 1.0:
        raise DomainError(f"approximation requires 0 <= epsilon < 1, got {epsilon}")
    return epsilon**4 / (2 * (1 - LN2 * (5 - epsilon) / 10))


def spontaneous_forms(p: float, eta: float, E: float = 1.0,
                      c0bar: float = 0.0) -> tuple[float, float, float, float]:
    """Success probability, initial energy and the approximate coherence gain/bound after emission.

    Returns ``(p_s, e0, delta_c, c0_bound)``.  The coherence terms are fits,
    stated as reliable for ``eta <= 1/3``.
    """
    if not 0.0 <= eta < 1.0:
        raise ValueError(f"eta must lie in [0, 1), got {eta}")
    _check_p(p)
    q = p * (1 - eta)
    if q == 0.0:
        raise DomainError("no excited population survives")
    p_s = q * (2 - q)
    e0 = E * (2 * q - 1)
    slope = 2 * LN2 / 5 * (1 + 2.5 * eta)
    return p_s, e0, (slope - 1) * c0bar + LN2, LN2 / (1 - slope)


def _log_weight(k: int, N: int, p: float) -> float:
    # ln[p^k (1-p)^(N-k)]; caller guarantees the weight is non-zero
    lp = math.log(p) if k else 0.0
    lq = math.log1p(-p) if N - k else 0.0
    return k * lp + (N - k) * lq


def n_tls(p: float, E: float = 1.0, N: int = 2) -> NTlsRecord:
    """``N`` pure TLS, global ground-state rejection."""
    _check_p(p)
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    p_s = -math.expm1(N * math.log1p(-p)) if p < 1 else 1.0
    e0 = N * E / 2 * (2 * p - 1)
    ef = N * E / 2 * (2 * p / p_s - 1)
    delta_e = E * N * p * (1 - p) ** N / p_s
    c0 = 0.0
    cf = 0.0
    ln_ps = math.log(p_s)
    for k in range(N + 1):
        if (p == 1.0 and k < N):
            continue
        binom = math.comb(N, k)
        lw = _log_weight(k, N, p)
        w = math.exp(lw)
        c0 -= binom * w * lw
        if k >= 1:
            cf -= binom * (w / p_s) * (lw - ln_ps)
    return NTlsRecord(p_s, e0, ef, delta_e, c0, cf)


def global_limit_cf(N: int) -> float:
    """Final coherence of the global protocol as ``p -> 0+``: ``ln N``."""
    return math.log(N)


def pairwise_limit_cf(N: int) -> float:
    """Final coherence of the pairwise protocol as ``p -> 0+`` for even ``N``: ``ln(N/2 + 1)``."""
    if N % 2:
        raise ValueError("limit is only stated for even N")
    return math.log(N / 2 + 1)


def optimal_povm_uniform(p: float) -> tuple[float, float]:
    """POVM parameters ``(a, b)`` that leave the pure pair with uniform populations.

    Exists for ``0 < p <= 1/2`` and attains the coherence ceiling ``ln 4``.
    """
    _check_p(p)
    if p > 0.5:
        raise DomainError("uniform populations are unreachable for p > 1/2")
    r = p / (1 - p)
    return 1 - r * r, 1 - r


def povm_relation_b(a: float) -> float:
    """Coherence-maximising ``b`` for a given ``a``: ``1 - sqrt(1 - a)``."""
    return 1 - math.sqrt(max(0.0, 1 - a))


def povm_a_polynomial(p: float) -> float:
    """Fitted optimal ``a`` for ``0 <= p <= 2/5``: ``1 - 3/2 p^2 - 8 p^4``."""
    return 1 - 1.5 * p**2 - 8 * p**4
