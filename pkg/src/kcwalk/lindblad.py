"""Finite-dimensional Lindblad dynamics, regression-theorem two-time
probabilities, and the generalized K and C quantifiers.

Superoperators act on row-major vectorized matrices:
``vec(A rho B) = kron(A, B.T) @ vec(rho)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from kcwalk.hilbert import (
    HERMITIAN_TOL,
    check_density_matrix,
    l1_distance,
    total_dephasing,
    trace_norm_diagonal,
)


@dataclass(frozen=True)
class LindbladGenerator:
    """``d rho/dt = -i[H, rho] + sum_j c_j (L_j rho L_j^+ - {L_j^+ L_j, rho}/2)``."""

    hamiltonian: np.ndarray
    jump_ops: Sequence[np.ndarray] = field(default_factory=tuple)
    rates: Sequence[float] = field(default_factory=tuple)

    def __post_init__(self):
        H = np.asarray(self.hamiltonian, dtype=complex)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ValueError(f"hamiltonian must be square, got shape {H.shape}")
        if np.max(np.abs(H - H.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise ValueError("hamiltonian is not Hermitian")
        jumps = tuple(np.asarray(L, dtype=complex) for L in self.jump_ops)
        rates = tuple(float(c) for c in self.rates)
        if len(jumps) != len(rates):
            raise ValueError(f"{len(jumps)} jump operators but {len(rates)} rates")
        for j, (L, c) in enumerate(zip(jumps, rates)):
            if L.shape != H.shape:
                raise ValueError(f"jump operator {j} has shape {L.shape}, expected {H.shape}")
            if c < 0:
                raise ValueError(f"rate {j} is negative ({c}); not of Lindblad form")
        object.__setattr__(self, "hamiltonian", H)
        object.__setattr__(self, "jump_ops", jumps)
        object.__setattr__(self, "rates", rates)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]


@dataclass(frozen=True)
class ObservableBasis:
    labels: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise ValueError("observable is degenerate: outcome labels are not distinct")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def range(cls, d: int) -> "ObservableBasis":
        return cls(tuple(range(d)))

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown outcome label {label!r}") from None

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True)
class DiagonalInitialState:
    populations: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.populations, dtype=float).reshape(-1)
        if np.any(p < 0):
            raise ValueError("initial populations must be nonnegative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"initial populations sum to {p.sum()!r}, not 1")
        object.__setattr__(self, "populations", p)

    def matrix(self) -> np.ndarray:
        return np.diag(self.populations).astype(complex)


def _initial_matrix(rho0) -> np.ndarray:
    if isinstance(rho0, DiagonalInitialState):
        return rho0.matrix()
    return np.asarray(rho0, dtype=complex)


def lindblad_apply(gen: LindbladGenerator, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != gen.hamiltonian.shape:
        raise ValueError(f"state shape {rho.shape} does not match generator dimension {gen.dim}")
    H = gen.hamiltonian
    out = -1j * (H @ rho - rho @ H)
    for L, c in zip(gen.jump_ops, gen.rates):
        LdL = L.conj().T @ L
        out += c * (L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL))
    return out


def superoperator(gen: LindbladGenerator) -> np.ndarray:
    d = gen.dim
    eye = np.eye(d)
    H = gen.hamiltonian
    S = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    for L, c in zip(gen.jump_ops, gen.rates):
        LdL = L.conj().T @ L
        S += c * (np.kron(L, L.conj()) - 0.5 * np.kron(LdL, eye) - 0.5 * np.kron(eye, LdL.T))
    return S


def propagator(gen: LindbladGenerator, t: float) -> np.ndarray:
    """Dense ``exp(L t)`` on row-major vectorized density matrices."""
    if t < 0:
        raise ValueError(f"Lindblad propagation backwards in time (t={t}) is undefined")
    if t == 0:
        return np.eye(gen.dim ** 2, dtype=complex)
    return scipy.linalg.expm(superoperator(gen) * t)


def _apply(prop: np.ndarray, rho: np.ndarray) -> np.ndarray:
    d = rho.shape[0]
    return (prop @ rho.reshape(-1)).reshape(d, d)


def lindblad_propagate(gen: LindbladGenerator, rho0, t: float) -> np.ndarray:
    rho0 = _initial_matrix(rho0)
    if t < 0:
        raise ValueError(f"Lindblad propagation backwards in time (t={t}) is undefined")
    if t == 0:
        return rho0.copy()
    rho = _apply(propagator(gen, t), rho0)
    return (rho + rho.conj().T) / 2


def _check_times(s: float, t: float) -> None:
    if s < 0 or s > t:
        raise ValueError(f"need 0 <= s <= t, got s={s}, t={t}")


def _check_basis(gen: LindbladGenerator, basis: ObservableBasis) -> None:
    if len(basis) != gen.dim:
        raise ValueError(f"basis has {len(basis)} outcomes, generator dimension is {gen.dim}")


def one_time_probabilities(gen: LindbladGenerator, rho0, t: float) -> np.ndarray:
    return np.diag(lindblad_propagate(gen, rho0, t)).real.copy()


def joint_probabilities(gen: LindbladGenerator, rho0, s: float, t: float) -> np.ndarray:
    """``J[x, y] = tr{P_x e^{L(t-s)} P_y e^{Ls} rho0}`` for all outcome pairs."""
    _check_times(s, t)
    rho_s = lindblad_propagate(gen, rho0, s)
    later = propagator(gen, t - s)
    d = gen.dim
    J = np.empty((d, d))
    for y in range(d):
        projected = np.zeros((d, d), dtype=complex)
        projected[y, y] = rho_s[y, y]
        J[:, y] = np.diag(_apply(later, projected)).real
    return J


def regression_joint(gen, basis: ObservableBasis, rho0, x, t: float, y, s: float) -> float:
    """Probability of outcome ``y`` at ``s`` and ``x`` at ``t`` by the regression theorem."""
    _check_basis(gen, basis)
    _check_times(s, t)
    return float(joint_probabilities(gen, rho0, s, t)[basis.index(x), basis.index(y)])


def generalized_C(gen, basis: ObservableBasis, rho0, s: float, t: float) -> float:
    _check_basis(gen, basis)
    _check_times(s, t)
    rho0 = _initial_matrix(rho0)
    measured = total_dephasing(lindblad_propagate(gen, rho0, s))
    measured = total_dephasing(lindblad_propagate(gen, measured, t - s))
    unmeasured = total_dephasing(lindblad_propagate(gen, rho0, t))
    return trace_norm_diagonal(measured - unmeasured)


def generalized_C_prob(gen, basis: ObservableBasis, rho0, s: float, t: float) -> float:
    """Probability form: sum_x |sum_y P_y(x, t-s) P(y, s) - P(x, t)|."""
    _check_basis(gen, basis)
    _check_times(s, t)
    p_s = one_time_probabilities(gen, rho0, s)
    later = propagator(gen, t - s)
    d = gen.dim
    combined = np.zeros(d)
    for y in range(d):
        start = np.zeros((d, d), dtype=complex)
        start[y, y] = 1.0
        combined += p_s[y] * np.diag(_apply(later, start)).real
    return l1_distance(combined, one_time_probabilities(gen, rho0, t))


def generalized_K(gen, basis: ObservableBasis, rho0, s: float, t: float) -> float:
    _check_basis(gen, basis)
    _check_times(s, t)
    J = joint_probabilities(gen, rho0, s, t)
    return l1_distance(J.sum(axis=1), one_time_probabilities(gen, rho0, t))


def unitary_generator(U: np.ndarray) -> LindbladGenerator:
    """Hamiltonian generator with ``exp(-i H) = U`` (principal branch)."""
    T, Z = scipy.linalg.schur(np.asarray(U, dtype=complex), output="complex")
    phases = np.angle(np.diag(T))
    H = (Z * -phases) @ Z.conj().T
    return LindbladGenerator((H + H.conj().T) / 2)


def walk_generator(theta_deg: float, bounds) -> LindbladGenerator:
    """Generator whose unit-time propagator is one walk step on ``bounds``."""
    from kcwalk.walk import closed_step_unitary

    return unitary_generator(closed_step_unitary(theta_deg, bounds))


def amplitude_damping(rate: float) -> LindbladGenerator:
    lower = np.array([[0, 1], [0, 0]], dtype=complex)
    return LindbladGenerator(np.zeros((2, 2)), [lower], [rate])


def pure_dephasing(energies: Sequence[float], rates: Sequence[float]) -> LindbladGenerator:
    """Diagonal Hamiltonian plus one projector jump per level."""
    d = len(energies)
    projectors = []
    for k in range(d):
        P = np.zeros((d, d), dtype=complex)
        P[k, k] = 1.0
        projectors.append(P)
    return LindbladGenerator(np.diag(np.asarray(energies, dtype=complex)), projectors, list(rates))


def random_generator(d: int, n_jumps: int, rng: np.random.Generator) -> LindbladGenerator:
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    H = (A + A.conj().T) / 2
    jumps = [(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(d) for _ in range(n_jumps)]
    rates = list(rng.uniform(0.0, 1.0, size=n_jumps))
    return LindbladGenerator(H, jumps, rates)


def random_diagonal_state(d: int, rng: np.random.Generator) -> DiagonalInitialState:
    p = rng.dirichlet(np.ones(d))
    return DiagonalInitialState(p)


def check_state(rho: np.ndarray) -> None:
    check_density_matrix(rho, normalized=True)
