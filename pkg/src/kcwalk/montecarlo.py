"""Lossy and imperfectly measured walks, and Monte-Carlo error bars for K and C.

Loss enters as per-step amplitude factors sqrt(eta_H), sqrt(eta_V) on the two
shift branches. An imperfect out-coupling at step M keeps amplitude 1 on the
selected mode and a coherent residual sqrt(eps) on every other mode.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from kcwalk.hilbert import Bounds, Coin, ProbabilityDistribution, l1_distance, mode_index
from kcwalk.walk import CONDITION_TOL, WalkConfig, initial_density, propagate_amplitudes, propagate_density

SURVIVAL_TOL = 1e-12
DISTRIBUTIONS = ("normal", "uniform")


@dataclass(frozen=True)
class LossModel:
    eta_h: float = 1.0
    eta_v: float = 1.0
    residual_transmission: float = 0.0

    def __post_init__(self):
        for name in ("eta_h", "eta_v"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name}={v!r} outside (0, 1]")
        if not 0.0 <= self.residual_transmission <= 1.0:
            raise ValueError(f"residual_transmission={self.residual_transmission!r} outside [0, 1]")

    @property
    def amplitudes(self) -> tuple[float, float]:
        return math.sqrt(self.eta_h), math.sqrt(self.eta_v)


@dataclass(frozen=True)
class PerturbationSpec:
    """Parameter uncertainties for the Monte-Carlo error estimate.

    ``theta_jitter`` is in degrees; the other two are in units of full
    transmission. With ``distribution="normal"`` each jitter is a standard
    deviation; with ``"uniform"`` it is the half-width of the range. Draws
    falling outside the physical range are reflected back into it.
    """

    theta_jitter: float = 0.5
    coupling_jitter: float = 0.02
    extinction_jitter: float = 0.02
    samples: int = 1000
    seed: int = 0
    distribution: str = "normal"

    def __post_init__(self):
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"distribution must be one of {DISTRIBUTIONS}, got {self.distribution!r}")
        for name in ("theta_jitter", "coupling_jitter", "extinction_jitter"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if int(self.samples) != self.samples or self.samples < 1:
            raise ValueError(f"samples must be a positive integer, got {self.samples!r}")


@dataclass(frozen=True)
class SampleRecord:
    index: int
    theta_deg: float
    eta_h: float
    eta_v: float
    residual_transmission: float
    K: float
    C: float


@dataclass(frozen=True)
class ErrorBars:
    mean_K: float
    std_K: float
    mean_C: float
    std_C: float
    records: tuple = field(default=(), repr=False)


def _normalized(p: np.ndarray) -> np.ndarray:
    total = float(p.sum())
    if total < SURVIVAL_TOL:
        raise ValueError(f"surviving intensity {total:.3e} too small to renormalize")
    return p / total


def _evolve(rho: np.ndarray, cfg: WalkConfig, loss: LossModel, steps: int) -> np.ndarray:
    amp_h, amp_v = loss.amplitudes
    return propagate_density(rho, cfg.bounds, cfg.theta_deg, steps, amp_h, amp_v)


def _lossy_probs(cfg: WalkConfig, loss: LossModel, steps: int) -> np.ndarray:
    rho = _evolve(initial_density(cfg).matrix, cfg, loss, steps)
    return _normalized(np.diag(rho).real)


def lossy_one_time_distribution(cfg: WalkConfig, loss: LossModel, steps: int) -> ProbabilityDistribution:
    return ProbabilityDistribution(cfg.bounds, _lossy_probs(cfg, loss, steps))


def _residual_projection(rho: np.ndarray, index: int, eps: float) -> np.ndarray:
    keep = np.full(rho.shape[0], math.sqrt(eps))
    keep[index] = 1.0
    out = keep[:, None] * rho * keep[None, :]
    return out / np.trace(out).real


def _imperfect_conditional(rho_m: np.ndarray, cfg: WalkConfig, loss: LossModel, index: int) -> np.ndarray:
    projected = _residual_projection(rho_m, index, loss.residual_transmission)
    return _normalized(np.diag(_evolve(projected, cfg, loss, cfg.N - cfg.M)).real)


def _state_at_M(cfg: WalkConfig, loss: LossModel) -> np.ndarray:
    rho = _evolve(initial_density(cfg).matrix, cfg, loss, cfg.M)
    tr = np.trace(rho).real
    if tr < SURVIVAL_TOL:
        raise ValueError(f"surviving intensity {tr:.3e} at step M too small to renormalize")
    return rho / tr


def imperfect_conditional_distribution(cfg: WalkConfig, loss: LossModel, y: int, c_prime) -> ProbabilityDistribution:
    """Final distribution after an out-coupling at M that leaves residual
    amplitude sqrt(eps) in the modes it should have removed."""
    c_prime = Coin.parse(c_prime)
    rho_m = _state_at_M(cfg, loss)
    index = mode_index((y, c_prime), cfg.bounds)
    if rho_m[index, index].real <= CONDITION_TOL:
        raise ValueError(
            f"conditioning event (y={y}, c'={c_prime.name}, M={cfg.M}) has probability "
            f"{rho_m[index, index].real:.3e}"
        )
    return ProbabilityDistribution(cfg.bounds, _imperfect_conditional(rho_m, cfg, loss, index))


def imperfect_K(cfg: WalkConfig, loss: LossModel) -> float:
    """K assembled from imperfect conditionals and lossy one-time statistics."""
    rho_m = _state_at_M(cfg, loss)
    p_mid = np.diag(rho_m).real
    combined = np.zeros(cfg.bounds.dim)
    for i in np.flatnonzero(p_mid > CONDITION_TOL):
        combined += p_mid[i] * _imperfect_conditional(rho_m, cfg, loss, int(i))
    return l1_distance(combined, _lossy_probs(cfg, loss, cfg.N))


def lossy_C(cfg: WalkConfig, loss: LossModel) -> float:
    """C from normalized lossy one-time distributions only (no intermediate measurement)."""
    b: Bounds = cfg.bounds
    amp_h, amp_v = loss.amplitudes
    p_mid = _lossy_probs(cfg, loss, cfg.M)
    occupied = np.flatnonzero(p_mid > CONDITION_TOL)
    starts = np.zeros((occupied.size, b.dim), dtype=complex)
    starts[np.arange(occupied.size), occupied] = 1.0
    fresh = np.abs(propagate_amplitudes(starts, b, cfg.theta_deg, cfg.N - cfg.M, amp_h, amp_v)) ** 2
    fresh /= fresh.sum(axis=1, keepdims=True)
    return l1_distance(p_mid[occupied] @ fresh, _lossy_probs(cfg, loss, cfg.N))


def _reflect(value: float, lo: float, hi: float) -> float:
    width = hi - lo
    if width <= 0:
        return lo
    u = (value - lo) % (2 * width)
    return lo + (u if u <= width else 2 * width - u)


def _jittered(rng: np.random.Generator, kind: str, centre: float, jitter: float,
              lo: float = -math.inf, hi: float = math.inf) -> float:
    if kind == "normal":
        value = centre + jitter * float(rng.standard_normal())
    else:
        value = centre + jitter * float(rng.uniform(-1.0, 1.0))
    if lo <= value <= hi:
        return value
    return _reflect(value, lo, hi)


def draw_sample(cfg: WalkConfig, loss: LossModel, spec: PerturbationSpec, index: int):
    """Perturbed (config, loss) for sample ``index``; depends only on (seed, index)."""
    rng = np.random.default_rng([spec.seed, index])
    kind = spec.distribution
    theta = _jittered(rng, kind, cfg.theta_deg, spec.theta_jitter)
    eta_h = _jittered(rng, kind, loss.eta_h, spec.coupling_jitter, SURVIVAL_TOL, 1.0)
    eta_v = _jittered(rng, kind, loss.eta_v, spec.coupling_jitter, SURVIVAL_TOL, 1.0)
    eps = _jittered(rng, kind, loss.residual_transmission, spec.extinction_jitter, 0.0, 1.0)
    return WalkConfig(theta, cfg.N, cfg.M, cfg.x0, cfg.p), LossModel(eta_h, eta_v, eps)


def run_sample(cfg: WalkConfig, loss: LossModel, spec: PerturbationSpec, index: int) -> SampleRecord:
    s_cfg, s_loss = draw_sample(cfg, loss, spec, index)
    return SampleRecord(
        index, s_cfg.theta_deg, s_loss.eta_h, s_loss.eta_v, s_loss.residual_transmission,
        imperfect_K(s_cfg, s_loss), lossy_C(s_cfg, s_loss),
    )


def sample_quantifiers(cfg: WalkConfig, spec: PerturbationSpec, loss: LossModel | None = None) -> ErrorBars:
    loss = LossModel() if loss is None else loss
    records = tuple(run_sample(cfg, loss, spec, i) for i in range(spec.samples))
    K = np.array([r.K for r in records])
    C = np.array([r.C for r in records])
    return ErrorBars(float(K.mean()), float(K.std()), float(C.mean()), float(C.std()), records)


__all__ = [
    "ErrorBars",
    "LossModel",
    "PerturbationSpec",
    "SampleRecord",
    "draw_sample",
    "imperfect_K",
    "imperfect_conditional_distribution",
    "lossy_C",
    "lossy_one_time_distribution",
    "run_sample",
    "sample_quantifiers",
]
