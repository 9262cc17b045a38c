"""Second-quantized walk statistics for one photon, n photons in one input
mode, and coherent light.

Photons entering the same input mode evolve through the linear substitution
``a_in^+ -> sum_i A_i a_i^+``, so n-photon states are built by expanding that
product of creation operators on the vacuum. No many-body Hamiltonian is used.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from kcwalk.hilbert import Bounds, Coin, Mode, mode_index
from kcwalk.walk import propagate_amplitudes

MAX_MULTIPHOTON_STEPS = 8


@dataclass(frozen=True)
class AmplitudeProfile:
    """Single-photon amplitudes over the 2(N+1) parity-allowed modes after N steps."""

    modes: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.shape != (len(self.modes),):
            raise ValueError("one amplitude per mode required")
        norm = float(np.vdot(a, a).real)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"amplitude profile norm {norm!r} differs from 1")
        a.flags.writeable = False
        object.__setattr__(self, "amplitudes", a)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def output_modes(N: int, x0: int = 0) -> tuple:
    return tuple(Mode(x, c) for x in range(x0 - N, x0 + N + 1, 2) for c in (Coin.H, Coin.V))


def single_photon_amplitudes(theta_deg: float, N: int, start: Mode = Mode(0, Coin.H)) -> AmplitudeProfile:
    if N < 0:
        raise ValueError(f"N must be nonnegative, got {N}")
    start = Mode(int(start[0]), Coin.parse(start[1]))
    bounds = Bounds.centered(start.position, N + 1)
    amps = np.zeros(bounds.dim, dtype=complex)
    amps[mode_index(start, bounds)] = 1.0
    evolved = propagate_amplitudes(amps[None, :], bounds, theta_deg, N)[0]
    modes = output_modes(N, start.position)
    return AmplitudeProfile(modes, np.array([evolved[mode_index(m, bounds)] for m in modes]))


def apply_creation_sum(state: dict, coeffs: np.ndarray) -> dict:
    """Apply ``sum_i coeffs[i] a_i^+`` to a Fock state ``{occupations: amplitude}``."""
    out = defaultdict(complex)
    for occ, amp in state.items():
        for i, c in enumerate(coeffs):
            if c == 0:
                continue
            n_i = occ[i]
            new = occ[:i] + (n_i + 1,) + occ[i + 1:]
            out[new] += amp * c * math.sqrt(n_i + 1)
    return dict(out)


def evolved_fock_state(profile: AmplitudeProfile, n_photons: int) -> dict:
    """``(sum_i A_i a_i^+)^n |0> / sqrt(n!)``: n photons that entered the same mode."""
    state = {(0,) * len(profile.modes): 1.0 + 0j}
    for _ in range(n_photons):
        state = apply_creation_sum(state, profile.amplitudes)
    scale = 1.0 / math.sqrt(math.factorial(n_photons))
    return {occ: amp * scale for occ, amp in state.items()}


def fock_norm(state: dict) -> float:
    return float(sum(abs(a) ** 2 for a in state.values()))


def detection_probability(state: dict, n_photons: int) -> np.ndarray:
    """Per-photon detection probability at each mode: sum over Fock components of
    |amplitude|^2 n_m / n. For two photons this collects the |1_m, 1_j> and
    |2_m> contributions."""
    n_modes = len(next(iter(state)))
    out = np.zeros(n_modes)
    for occ, amp in state.items():
        w = abs(amp) ** 2
        for m, n_m in enumerate(occ):
            if n_m:
                out[m] += w * n_m / n_photons
    return out


def multiphoton_distribution(theta_deg: float, N: int, n_photons: int,
                             start: Mode = Mode(0, Coin.H)) -> np.ndarray:
    if N > MAX_MULTIPHOTON_STEPS:
        raise ValueError(
            f"N={N} exceeds the multiphoton limit of {MAX_MULTIPHOTON_STEPS} steps"
        )
    profile = single_photon_amplitudes(theta_deg, N, start)
    return detection_probability(evolved_fock_state(profile, n_photons), n_photons)


def two_photon_distribution(theta_deg: float, N: int, start: Mode = Mode(0, Coin.H)) -> np.ndarray:
    return multiphoton_distribution(theta_deg, N, 2, start)


def coherent_state_distribution(alpha: complex, theta_deg: float, N: int,
                                start: Mode = Mode(0, Coin.H)) -> np.ndarray:
    """One-photon detection weight ``exp(-|alpha|^2) |alpha|^2 |A_m|^2`` per mode."""
    profile = single_photon_amplitudes(theta_deg, N, start)
    a2 = abs(alpha) ** 2
    return math.exp(-a2) * a2 * profile.probabilities()
