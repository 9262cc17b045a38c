"""Quantum-walk simulator for multi-time non-classicality (K) and coherence (C)."""

__version__ = "0.1.0"

from kcwalk._backend import BACKEND  # noqa: E402
from kcwalk.quantifiers import (  # noqa: E402
    coherence_C_prob,
    coherence_C_superop,
    kolmogorov_K,
    randomizing_K,
    verify_identity,
    visualize_difference,
)
from kcwalk.walk import WalkConfig  # noqa: E402

__all__ = [
    "BACKEND",
    "WalkConfig",
    "coherence_C_prob",
    "coherence_C_superop",
    "kolmogorov_K",
    "randomizing_K",
    "verify_identity",
    "visualize_difference",
]
