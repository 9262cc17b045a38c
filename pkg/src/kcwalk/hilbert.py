"""State containers and basis bookkeeping for the position (x) coin space.

Basis ordering is position-major, coin-minor with ``H`` before ``V``, so a
flat amplitude vector of length ``2 * n_sites`` reshapes to ``(n_sites, 2)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
NORM_TOL = 1e-12
CLAMP_TOL = 1e-12
DIAGONAL_TOL = 1e-12


class Coin(enum.IntEnum):
    H = 0
    V = 1

    @classmethod
    def parse(cls, value) -> "Coin":
        if isinstance(value, Coin):
            return value
        if isinstance(value, str):
            try:
                return cls[value.strip().upper()]
            except KeyError:
                raise ValueError(f"coin must be 'H' or 'V', got {value!r}") from None
        return cls(int(value))


class Mode(NamedTuple):
    position: int
    coin: Coin


class Bounds(NamedTuple):
    """Closed lattice interval ``[lo, hi]``."""

    lo: int
    hi: int

    @classmethod
    def centered(cls, x0: int, radius: int) -> "Bounds":
        return cls(x0 - radius, x0 + radius)

    @property
    def n_sites(self) -> int:
        return self.hi - self.lo + 1

    @property
    def dim(self) -> int:
        return 2 * self.n_sites

    def positions(self) -> range:
        return range(self.lo, self.hi + 1)

    def modes(self) -> Iterator[Mode]:
        for x in self.positions():
            yield Mode(x, Coin.H)
            yield Mode(x, Coin.V)

    def contains(self, position: int) -> bool:
        return self.lo <= position <= self.hi


def mode_index(mode: Mode, bounds: Bounds) -> int:
    position, coin = mode
    if not bounds.contains(position):
        raise IndexError(f"position {position} outside lattice bounds [{bounds.lo}, {bounds.hi}]")
    return 2 * (position - bounds.lo) + int(Coin.parse(coin))


def index_mode(index: int, bounds: Bounds) -> Mode:
    if not 0 <= index < bounds.dim:
        raise IndexError(f"index {index} outside [0, {bounds.dim})")
    site, coin = divmod(index, 2)
    return Mode(bounds.lo + site, Coin(coin))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


def check_density_matrix(rho: np.ndarray, normalized: bool = True) -> None:
    """Raise ``ValueError`` unless ``rho`` is Hermitian, PSD and (optionally) unit trace."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T), initial=0.0)
    if herm > HERMITIAN_TOL:
        raise ValueError(f"density matrix not Hermitian (max deviation {herm:.3e})")
    tr = np.trace(rho).real
    if normalized and abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix trace {tr!r} differs from 1")
    if rho.shape[0]:
        lam = np.linalg.eigvalsh((rho + rho.conj().T) / 2).min()
        if lam < -PSD_TOL:
            raise ValueError(f"density matrix not positive semidefinite (min eigenvalue {lam:.3e})")


@dataclass(frozen=True)
class PureState:
    bounds: Bounds
    amplitudes: np.ndarray
    lossy: bool = False

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.bounds.dim:
            raise ValueError(f"expected {self.bounds.dim} amplitudes, got {amps.size}")
        if not self.lossy:
            norm = np.vdot(amps, amps).real
            if abs(norm - 1.0) > NORM_TOL:
                raise ValueError(f"state norm {norm!r} differs from 1")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def basis(cls, mode: Mode, bounds: Bounds) -> "PureState":
        amps = np.zeros(bounds.dim, dtype=complex)
        amps[mode_index(mode, bounds)] = 1.0
        return cls(bounds, amps)

    def amplitude(self, mode: Mode) -> complex:
        return complex(self.amplitudes[mode_index(mode, self.bounds)])

    def to_density(self) -> "DensityMatrix":
        a = self.amplitudes
        return DensityMatrix(self.bounds, np.outer(a, a.conj()), lossy=self.lossy)

    def probabilities(self) -> "ProbabilityDistribution":
        return ProbabilityDistribution(self.bounds, np.abs(self.amplitudes) ** 2)


@dataclass(frozen=True)
class DensityMatrix:
    bounds: Bounds
    matrix: np.ndarray
    lossy: bool = False

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.shape != (self.bounds.dim, self.bounds.dim):
            raise ValueError(f"expected {self.bounds.dim}x{self.bounds.dim} matrix, got {rho.shape}")
        check_density_matrix(rho, normalized=not self.lossy)
        object.__setattr__(self, "matrix", _frozen(rho))

    @classmethod
    def basis(cls, mode: Mode, bounds: Bounds) -> "DensityMatrix":
        return PureState.basis(mode, bounds).to_density()

    def probabilities(self) -> "ProbabilityDistribution":
        return ProbabilityDistribution(self.bounds, np.diag(self.matrix).real)

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


@dataclass(frozen=True)
class ProbabilityDistribution:
    """Probabilities over modes, stored as a ``(n_sites, 2)`` array."""

    bounds: Bounds
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).reshape(self.bounds.n_sites, 2)
        if np.any(p < -CLAMP_TOL) or np.any(p > 1 + CLAMP_TOL):
            bad = p[(p < -CLAMP_TOL) | (p > 1 + CLAMP_TOL)][0]
            raise ValueError(f"probability {bad!r} outside [0, 1]")
        p = np.clip(p, 0.0, 1.0)
        p[p < CLAMP_TOL] = 0.0
        object.__setattr__(self, "probs", _frozen(p))

    def __getitem__(self, mode) -> float:
        position, coin = mode
        if not self.bounds.contains(position):
            return 0.0
        return float(self.probs[position - self.bounds.lo, int(Coin.parse(coin))])

    def total(self) -> float:
        return float(self.probs.sum())

    def flat(self) -> np.ndarray:
        return self.probs.reshape(-1)

    def items(self, include_zero: bool = False) -> Iterator[tuple[Mode, float]]:
        for i, mode in enumerate(self.bounds.modes()):
            value = float(self.probs.flat[i])
            if include_zero or value > 0.0:
                yield mode, value

    def support(self) -> list[Mode]:
        return [m for m, _ in self.items()]

    def as_dict(self) -> dict[Mode, float]:
        return dict(self.items())

    def shifted(self, k: int) -> "ProbabilityDistribution":
        return ProbabilityDistribution(Bounds(self.bounds.lo + k, self.bounds.hi + k), self.probs)


def _matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)


def total_dephasing(rho):
    """Zero every off-diagonal entry. Accepts a DensityMatrix or a raw square array."""
    m = _matrix(rho)
    out = np.diag(np.diag(m))
    if isinstance(rho, DensityMatrix):
        return DensityMatrix(rho.bounds, out, lossy=rho.lossy)
    return out


def trace_norm_diagonal(a) -> float:
    """Trace norm of a matrix that is diagonal (as produced by ``total_dephasing``)."""
    m = _matrix(a)
    off = m - np.diag(np.diag(m))
    worst = np.max(np.abs(off), initial=0.0)
    if worst > DIAGONAL_TOL:
        raise ValueError(
            f"trace_norm_diagonal called on a non-diagonal matrix (off-diagonal magnitude {worst:.3e})"
        )
    return float(np.sum(np.abs(np.diag(m))))


def mix(rho_a: DensityMatrix, rho_b: DensityMatrix, p: float) -> DensityMatrix:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing weight p={p!r} outside [0, 1]")
    if rho_a.bounds != rho_b.bounds:
        raise ValueError("cannot mix density matrices on different lattices")
    return DensityMatrix(rho_a.bounds, p * rho_a.matrix + (1.0 - p) * rho_b.matrix)


def l1_distance(p: np.ndarray, q: np.ndarray) -> float:
    return float(np.sum(np.abs(np.asarray(p) - np.asarray(q))))
