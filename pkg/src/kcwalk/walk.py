"""Coin, shift and step operators of the discrete-time walk on a line, and the
one-time / conditional position-coin distributions they generate."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from kcwalk import _backend
from kcwalk._backend import LatticeBoundaryError
from kcwalk.hilbert import (
    Bounds,
    Coin,
    DensityMatrix,
    Mode,
    ProbabilityDistribution,
    PureState,
    mix,
    mode_index,
)

CONDITION_TOL = 1e-12

State = Union[PureState, DensityMatrix]


@dataclass(frozen=True)
class WalkConfig:
    """Walk parameters.

    ``p`` is the probability of starting in ``H`` at ``x0``; the lattice is
    ``[x0 - N, x0 + N]``, which N steps can never leave.
    """

    theta_deg: float
    N: int
    M: int
    x0: int = 0
    p: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N!r}")
        if int(self.M) != self.M or not 0 < self.M < self.N:
            raise ValueError(f"M must satisfy 0 < M < N (N={self.N}), got {self.M!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"initial H-probability p={self.p!r} outside [0, 1]")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "x0", int(self.x0))
        object.__setattr__(self, "theta_deg", float(self.theta_deg))
        object.__setattr__(self, "p", float(self.p))

    @classmethod
    def pure(cls, theta_deg, coin, N, M, x0=0) -> "WalkConfig":
        return cls(theta_deg, N, M, x0, 1.0 if Coin.parse(coin) is Coin.H else 0.0)

    @property
    def theta(self) -> float:
        return math.radians(self.theta_deg)

    @property
    def bounds(self) -> Bounds:
        return Bounds.centered(self.x0, self.N)

    @property
    def initial_label(self) -> str:
        if self.p == 1.0:
            return "H"
        if self.p == 0.0:
            return "V"
        return f"p={self.p:g}"


def coin_operator(theta_deg: float) -> np.ndarray:
    t = math.radians(theta_deg)
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, s], [s, -c]], dtype=complex)


def shift_operator(bounds: Bounds) -> np.ndarray:
    """Conditional shift: ``|x,H> -> |x+1,H>``, ``|x,V> -> |x-1,V>``.

    Columns of ``|hi,H>`` and ``|lo,V>`` are zero; :func:`evolve` refuses to
    push amplitude into them.
    """
    S = np.zeros((bounds.dim, bounds.dim), dtype=complex)
    for x in bounds.positions():
        if x + 1 <= bounds.hi:
            S[mode_index((x + 1, Coin.H), bounds), mode_index((x, Coin.H), bounds)] = 1.0
        if x - 1 >= bounds.lo:
            S[mode_index((x - 1, Coin.V), bounds), mode_index((x, Coin.V), bounds)] = 1.0
    return S


def step_unitary(cfg: WalkConfig) -> np.ndarray:
    b = cfg.bounds
    return shift_operator(b) @ np.kron(np.eye(b.n_sites), coin_operator(cfg.theta_deg))


def closed_step_unitary(theta_deg: float, bounds: Bounds) -> np.ndarray:
    """Step unitary with reflecting edges (``|hi,H> -> |hi,V>``, ``|lo,V> -> |lo,H>``).

    Identical to :func:`step_unitary` on any state that stays off the
    boundary, and exactly unitary on the whole lattice.
    """
    S = shift_operator(bounds)
    S[mode_index((bounds.hi, Coin.V), bounds), mode_index((bounds.hi, Coin.H), bounds)] = 1.0
    S[mode_index((bounds.lo, Coin.H), bounds), mode_index((bounds.lo, Coin.V), bounds)] = 1.0
    return S @ np.kron(np.eye(bounds.n_sites), coin_operator(theta_deg))


def propagate_amplitudes(amps, bounds: Bounds, theta_deg: float, steps: int,
                         amp_h: float = 1.0, amp_v: float = 1.0) -> np.ndarray:
    """Propagate a batch of flat amplitude vectors, shape ``(batch, dim)``."""
    amps = np.asarray(amps, dtype=complex)
    batch = amps.reshape(-1, bounds.n_sites, 2)
    t = math.radians(theta_deg)
    out = _backend.propagate(batch, int(steps), math.cos(t), math.sin(t), float(amp_h), float(amp_v))
    return out.reshape(amps.shape)


def propagate_density(rho: np.ndarray, bounds: Bounds, theta_deg: float, steps: int,
                      amp_h: float = 1.0, amp_v: float = 1.0) -> np.ndarray:
    """``A^steps rho (A^steps)^dagger`` for the (possibly lossy) step operator ``A``."""
    left = propagate_amplitudes(np.asarray(rho).T, bounds, theta_deg, steps, amp_h, amp_v).T
    return propagate_amplitudes(left.conj(), bounds, theta_deg, steps, amp_h, amp_v).conj()


def _check_steps(cfg: WalkConfig, steps: int) -> int:
    if int(steps) != steps or steps < 0:
        raise ValueError(f"steps must be a nonnegative integer, got {steps!r}")
    if steps > cfg.N:
        raise ValueError(f"steps={steps} exceeds N={cfg.N} of the configured lattice")
    return int(steps)


def evolve(state: State, cfg: WalkConfig, steps: int) -> State:
    steps = _check_steps(cfg, steps)
    if state.bounds != cfg.bounds:
        raise ValueError(f"state lattice {state.bounds} does not match config lattice {cfg.bounds}")
    if isinstance(state, PureState):
        amps = propagate_amplitudes(state.amplitudes[None, :], cfg.bounds, cfg.theta_deg, steps)[0]
        return PureState(cfg.bounds, amps, lossy=state.lossy)
    rho = propagate_density(state.matrix, cfg.bounds, cfg.theta_deg, steps)
    return DensityMatrix(cfg.bounds, rho, lossy=state.lossy)


def initial_density(cfg: WalkConfig) -> DensityMatrix:
    b = cfg.bounds
    return mix(DensityMatrix.basis(Mode(cfg.x0, Coin.H), b), DensityMatrix.basis(Mode(cfg.x0, Coin.V), b), cfg.p)


def one_time_distribution(cfg: WalkConfig, steps: int) -> ProbabilityDistribution:
    """Diagonal of the initial density matrix evolved ``steps`` steps."""
    return evolve(initial_density(cfg), cfg, steps).probabilities()


def one_time_distribution_from_pure_runs(cfg: WalkConfig, steps: int) -> ProbabilityDistribution:
    """Same as :func:`one_time_distribution`, mixing the intensities of two pure-coin runs."""
    steps = _check_steps(cfg, steps)
    b = cfg.bounds
    starts = np.zeros((2, b.dim), dtype=complex)
    starts[0, mode_index((cfg.x0, Coin.H), b)] = 1.0
    starts[1, mode_index((cfg.x0, Coin.V), b)] = 1.0
    out = np.abs(propagate_amplitudes(starts, b, cfg.theta_deg, steps)) ** 2
    return ProbabilityDistribution(b, cfg.p * out[0] + (1.0 - cfg.p) * out[1])


def fresh_distributions(theta_deg: float, starts: Iterable[Mode], steps: int, bounds: Bounds) -> np.ndarray:
    """Distributions of walks started in each basis mode, shape ``(len(starts), dim)``."""
    starts = list(starts)
    amps = np.zeros((len(starts), bounds.dim), dtype=complex)
    for i, m in enumerate(starts):
        amps[i, mode_index(m, bounds)] = 1.0
    return np.abs(propagate_amplitudes(amps, bounds, theta_deg, steps)) ** 2


def fresh_distribution(cfg: WalkConfig, start: Mode, steps: int) -> ProbabilityDistribution:
    steps = _check_steps(cfg, steps)
    return ProbabilityDistribution(cfg.bounds, fresh_distributions(cfg.theta_deg, [start], steps, cfg.bounds)[0])


def project_onto_mode(rho: np.ndarray, index: int) -> tuple[np.ndarray, float]:
    """Projective measurement outcome ``index``: returns (renormalized state, probability)."""
    prob = float(rho[index, index].real)
    out = np.zeros_like(rho)
    if prob > 0:
        out[index, index] = rho[index, index] / prob
    return out, prob


def conditional_distribution(cfg: WalkConfig, y: int, c_prime) -> ProbabilityDistribution:
    """P(x, c, N | y, c', M): evolve to M, project on ``|y,c'>``, renormalize, evolve to N."""
    c_prime = Coin.parse(c_prime)
    b = cfg.bounds
    rho_m = propagate_density(initial_density(cfg).matrix, b, cfg.theta_deg, cfg.M)
    projected, prob = project_onto_mode(rho_m, mode_index((y, c_prime), b))
    if prob <= CONDITION_TOL:
        raise ValueError(
            f"conditioning event (y={y}, c'={c_prime.name}, M={cfg.M}) has probability {prob:.3e}"
        )
    rho_n = propagate_density(projected, b, cfg.theta_deg, cfg.N - cfg.M)
    return DensityMatrix(b, rho_n).probabilities()


__all__ = [
    "LatticeBoundaryError",
    "WalkConfig",
    "closed_step_unitary",
    "coin_operator",
    "conditional_distribution",
    "evolve",
    "fresh_distribution",
    "fresh_distributions",
    "initial_density",
    "one_time_distribution",
    "one_time_distribution_from_pure_runs",
    "project_onto_mode",
    "propagate_amplitudes",
    "propagate_density",
    "shift_operator",
    "step_unitary",
]
