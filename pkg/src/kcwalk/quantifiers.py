"""Non-classicality (K) and coherence (C) quantifiers for the walk.

K compares the final statistics with and without a projective position-coin
measurement at step M. C measures the coherences generated up to step M that
turn into populations by step N, evaluated either on density matrices or from
one-time distributions alone. For unitary steps the three numbers coincide.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from kcwalk.hilbert import (
    Bounds,
    Coin,
    Mode,
    index_mode,
    l1_distance,
    total_dephasing,
    trace_norm_diagonal,
)
from kcwalk.walk import (
    CONDITION_TOL,
    WalkConfig,
    fresh_distributions,
    initial_density,
    one_time_distribution,
    project_onto_mode,
    propagate_density,
)

IDENTITY_TOL = 1e-10
TABLE1_ANGLES = (0, 7, 11, 23, 34, 47)
TABLE1_N = 20
TABLE1_M = 10


class IdentityViolation(ArithmeticError):
    """K and C disagree beyond tolerance; for unitary steps this is a bug."""

    def __init__(self, message, K, C_superop, C_prob):
        super().__init__(message)
        self.K = K
        self.C_superop = C_superop
        self.C_prob = C_prob


@dataclass(frozen=True)
class QuantifierReport:
    theta_deg: float
    x0: int
    p: float
    N: int
    M: int
    K: float
    C_superop: float
    C_prob: float

    @property
    def initial(self) -> str:
        return WalkConfig(self.theta_deg, self.N, self.M, self.x0, self.p).initial_label


def _occupied(probs: np.ndarray, bounds: Bounds) -> list[tuple[int, Mode, float]]:
    return [(i, index_mode(i, bounds), float(w)) for i, w in enumerate(probs) if w > CONDITION_TOL]


def conditional_sum(cfg: WalkConfig, M: int | None = None) -> np.ndarray:
    """sum_{y,c'} P(x,c,N | y,c',M) P(y,c',M) via project-renormalize-evolve."""
    M = cfg.M if M is None else M
    b = cfg.bounds
    rho_m = propagate_density(initial_density(cfg).matrix, b, cfg.theta_deg, M)
    total = np.zeros(b.dim)
    for i, _mode, _w in _occupied(np.diag(rho_m).real, b):
        projected, prob = project_onto_mode(rho_m, i)
        rho_n = propagate_density(projected, b, cfg.theta_deg, cfg.N - M)
        total += prob * np.diag(rho_n).real
    return total


def kolmogorov_K(cfg: WalkConfig) -> float:
    p_final = one_time_distribution(cfg, cfg.N).flat()
    return l1_distance(conditional_sum(cfg), p_final)


def _dephased_difference(rho0: np.ndarray, bounds: Bounds, theta_deg: float, M: int, N: int) -> np.ndarray:
    measured = total_dephasing(propagate_density(rho0, bounds, theta_deg, M))
    measured = total_dephasing(propagate_density(measured, bounds, theta_deg, N - M))
    unmeasured = total_dephasing(propagate_density(rho0, bounds, theta_deg, N))
    return measured - unmeasured


def coherence_C_superop(cfg: WalkConfig) -> float:
    """Trace norm of (D U^{N-M} D U^M - D U^N) rho0 with D the total dephasing."""
    diff = _dephased_difference(initial_density(cfg).matrix, cfg.bounds, cfg.theta_deg, cfg.M, cfg.N)
    return trace_norm_diagonal(diff)


def fresh_start_sum(cfg: WalkConfig, M: int | None = None) -> np.ndarray:
    """sum_{y,c'} P_{y,c'}(x,c,N-M) P(y,c',M) from one-time distributions only."""
    M = cfg.M if M is None else M
    b = cfg.bounds
    p_mid = one_time_distribution(cfg, M).flat()
    occupied = _occupied(p_mid, b)
    fresh = fresh_distributions(cfg.theta_deg, [m for _, m, _ in occupied], cfg.N - M, b)
    weights = np.array([w for _, _, w in occupied])
    return weights @ fresh


def coherence_C_prob(cfg: WalkConfig) -> float:
    p_final = one_time_distribution(cfg, cfg.N).flat()
    return l1_distance(fresh_start_sum(cfg), p_final)


def verify_identity(cfg: WalkConfig, tol: float = IDENTITY_TOL) -> QuantifierReport:
    K = kolmogorov_K(cfg)
    c_sup = coherence_C_superop(cfg)
    c_prob = coherence_C_prob(cfg)
    if abs(K - c_prob) > tol or abs(c_sup - c_prob) > tol:
        raise IdentityViolation(
            f"K={K!r}, C_superop={c_sup!r}, C_prob={c_prob!r} disagree beyond {tol:g} for {cfg}",
            K, c_sup, c_prob,
        )
    return QuantifierReport(cfg.theta_deg, cfg.x0, cfg.p, cfg.N, cfg.M, K, c_sup, c_prob)


def parity_allowed_modes(x0: int, steps: int) -> list[Mode]:
    return [Mode(x0 + k, c) for k in range(-steps, steps + 1, 2) for c in (Coin.H, Coin.V)]


def randomizing_K(cfg: WalkConfig) -> float:
    """K for a measurement that leaves a flat distribution over the 2(M+1)
    parity-allowed modes at step M (weight 1/[2(M+1)] each)."""
    if cfg.N != 2 * cfg.M:
        raise ValueError(f"randomizing_K requires N = 2M, got N={cfg.N}, M={cfg.M}")
    modes = parity_allowed_modes(cfg.x0, cfg.M)
    flat = fresh_distributions(cfg.theta_deg, modes, cfg.N - cfg.M, cfg.bounds).mean(axis=0)
    return l1_distance(flat, one_time_distribution(cfg, cfg.N).flat())


class DifferenceTables(NamedTuple):
    """Final distribution (a), combined two-stage distribution (b), signed b - a (c).

    Each table is a ``(n_sites, 2)`` array indexed by position then coin.
    """

    bounds: Bounds
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def l1(self) -> float:
        return float(np.sum(np.abs(self.c)))


def visualize_difference(cfg: WalkConfig) -> DifferenceTables:
    """Tables behind the three difference panels, with the measurement at N/2."""
    if cfg.N % 2:
        raise ValueError(f"visualize_difference needs an even N (M = N/2), got N={cfg.N}")
    half = cfg.N // 2
    b = cfg.bounds
    shape = (b.n_sites, 2)
    a = one_time_distribution(cfg, cfg.N).probs
    combined = fresh_start_sum(cfg, half).reshape(shape)
    return DifferenceTables(b, a, combined, (combined - a).reshape(shape))


def table1_rows():
    """(theta, coin, theory K, randomizing K) for the 6 x 2 reference grid."""
    rows = []
    for theta in TABLE1_ANGLES:
        for coin in (Coin.V, Coin.H):
            cfg = WalkConfig.pure(theta, coin, TABLE1_N, TABLE1_M)
            rows.append((theta, coin.name, kolmogorov_K(cfg), randomizing_K(cfg)))
    return rows
