import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from kcwalk.hilbert import Bounds, mode_index
from kcwalk.lindblad import (
    DiagonalInitialState,
    LindbladGenerator,
    ObservableBasis,
    amplitude_damping,
    check_state,
    generalized_C,
    generalized_C_prob,
    generalized_K,
    joint_probabilities,
    lindblad_apply,
    lindblad_propagate,
    one_time_probabilities,
    propagator,
    pure_dephasing,
    random_diagonal_state,
    random_generator,
    regression_joint,
    superoperator,
    unitary_generator,
    walk_generator,
)
from kcwalk.quantifiers import kolmogorov_K
from kcwalk.walk import WalkConfig, closed_step_unitary, step_unitary

SX = np.array([[0, 1], [1, 0]], dtype=complex)
GROUND = np.diag([1.0, 0.0]).astype(complex)


def test_lindblad_apply_commutator_example():
    gen = LindbladGenerator(SX)
    # -i [sx, |0><0|] = -i (|1><0| - |0><1|)
    np.testing.assert_allclose(lindblad_apply(gen, GROUND), [[0, 1j], [-1j, 0]])


def test_lindblad_apply_damping_example():
    gen = amplitude_damping(2.0)
    excited = np.diag([0.0, 1.0])
    np.testing.assert_allclose(lindblad_apply(gen, excited), np.diag([2.0, -2.0]))


def test_superoperator_matches_direct_formula(rng):
    gen = random_generator(3, 2, rng)
    rho = random_diagonal_state(3, rng).matrix() + 0.1j * (np.eye(3, k=1) - np.eye(3, k=-1))
    np.testing.assert_allclose((superoperator(gen) @ rho.reshape(-1)).reshape(3, 3), lindblad_apply(gen, rho), atol=1e-13)


def test_propagation_matches_ode_integration(rng):
    gen = random_generator(3, 2, rng)
    rho0 = random_diagonal_state(3, rng).matrix()
    rhs = lambda _t, y: lindblad_apply(gen, y.reshape(3, 3)).reshape(-1)  # noqa: E731
    sol = solve_ivp(rhs, (0, 1.3), rho0.reshape(-1), rtol=1e-11, atol=1e-13)
    np.testing.assert_allclose(lindblad_propagate(gen, rho0, 1.3), sol.y[:, -1].reshape(3, 3), atol=1e-8)


def test_zero_time_returns_initial_state(rng):
    gen = random_generator(3, 1, rng)
    rho0 = random_diagonal_state(3, rng).matrix()
    np.testing.assert_array_equal(lindblad_propagate(gen, rho0, 0.0), rho0)
    np.testing.assert_array_equal(propagator(gen, 0.0), np.eye(9))


def test_negative_time_rejected():
    with pytest.raises(ValueError, match="backwards"):
        lindblad_propagate(amplitude_damping(1.0), GROUND, -0.1)


def test_unitary_case_reproduces_schrodinger_evolution():
    gen = LindbladGenerator(SX)
    rho = lindblad_propagate(gen, GROUND, 0.7)
    U = np.cos(0.7) * np.eye(2) - 1j * np.sin(0.7) * SX
    np.testing.assert_allclose(rho, U @ GROUND @ U.conj().T, atol=1e-13)


@given(st.floats(0.01, 5.0), st.floats(0.0, 4.0))
@settings(max_examples=25, deadline=None)
def test_amplitude_damping_population(rate, t):
    p = one_time_probabilities(amplitude_damping(rate), DiagonalInitialState([0.0, 1.0]), t)
    assert p[1] == pytest.approx(math.exp(-rate * t), abs=1e-9)
    assert p[0] == pytest.approx(1 - math.exp(-rate * t), abs=1e-9)


def test_rabi_closed_form():
    # P(0 at t | 0 at 0) = cos^2 t; measuring at s = pi/8 gives P0 = cos^4 + sin^4 = 3/4 versus 1/2.
    gen = LindbladGenerator(SX)
    basis = ObservableBasis.range(2)
    s, t = math.pi / 8, math.pi / 4
    assert generalized_K(gen, basis, GROUND, s, t) == pytest.approx(0.5, abs=1e-12)
    assert generalized_C(gen, basis, GROUND, s, t) == pytest.approx(0.5, abs=1e-12)
    assert generalized_C_prob(gen, basis, GROUND, s, t) == pytest.approx(0.5, abs=1e-12)


def test_rabi_via_superoperator_eigendecomposition():
    S = superoperator(LindbladGenerator(SX))
    w, P = np.linalg.eig(S)
    expS = lambda t: P @ np.diag(np.exp(w * t)) @ np.linalg.inv(P)  # noqa: E731
    rho_t = (expS(math.pi / 4) @ GROUND.reshape(-1)).reshape(2, 2)
    np.testing.assert_allclose(lindblad_propagate(LindbladGenerator(SX), GROUND, math.pi / 4), rho_t, atol=1e-12)


@given(st.integers(2, 4), st.integers(0, 3), st.floats(0.0, 1.5), st.floats(0.0, 1.5), st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_semigroup_trace_and_positivity(d, jumps, t1, t2, seed):
    rng = np.random.default_rng(seed)
    gen = random_generator(d, jumps, rng)
    rho0 = random_diagonal_state(d, rng)
    a = lindblad_propagate(gen, lindblad_propagate(gen, rho0, t1), t2)
    b = lindblad_propagate(gen, rho0, t1 + t2)
    np.testing.assert_allclose(a, b, atol=1e-10)
    check_state(b)


@given(st.integers(2, 4), st.integers(0, 3), st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_generalized_K_equals_C(d, jumps, frac, t, seed):
    rng = np.random.default_rng(seed)
    gen = random_generator(d, jumps, rng)
    rho0 = random_diagonal_state(d, rng)
    basis = ObservableBasis.range(d)
    s = frac * t
    K = generalized_K(gen, basis, rho0, s, t)
    assert K == pytest.approx(generalized_C(gen, basis, rho0, s, t), abs=1e-10)
    assert K == pytest.approx(generalized_C_prob(gen, basis, rho0, s, t), abs=1e-10)


def test_pure_dephasing_is_classical():
    gen = pure_dephasing([0.0, 1.3, -0.4], [0.2, 0.5, 1.0])
    rho0 = DiagonalInitialState([0.5, 0.3, 0.2])
    basis = ObservableBasis.range(3)
    assert generalized_K(gen, basis, rho0, 0.4, 1.1) == pytest.approx(0, abs=1e-14)
    assert generalized_C(gen, basis, rho0, 0.4, 1.1) == pytest.approx(0, abs=1e-14)


def test_amplitude_damping_is_classical():
    basis = ObservableBasis.range(2)
    rho0 = DiagonalInitialState([0.3, 0.7])
    assert generalized_K(amplitude_damping(0.8), basis, rho0, 0.5, 2.0) == pytest.approx(0, abs=1e-12)


def test_equal_times_give_zero(rng):
    gen = random_generator(3, 2, rng)
    rho0 = random_diagonal_state(3, rng)
    assert generalized_K(gen, ObservableBasis.range(3), rho0, 0.6, 0.6) == pytest.approx(0, abs=1e-12)


def test_time_ordering_enforced():
    with pytest.raises(ValueError, match="s <= t"):
        generalized_K(LindbladGenerator(SX), ObservableBasis.range(2), GROUND, 1.0, 0.5)


def test_degenerate_observable_rejected():
    with pytest.raises(ValueError, match="degenerate"):
        ObservableBasis(("a", "b", "a"))


def test_basis_size_must_match():
    with pytest.raises(ValueError, match="outcomes"):
        generalized_K(LindbladGenerator(SX), ObservableBasis.range(3), GROUND, 0.1, 0.5)


def test_generator_validation():
    with pytest.raises(ValueError, match="Hermitian"):
        LindbladGenerator(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError, match="negative"):
        LindbladGenerator(np.zeros((2, 2)), [np.eye(2)], [-0.1])
    with pytest.raises(ValueError, match="rates"):
        LindbladGenerator(np.zeros((2, 2)), [np.eye(2)], [])
    with pytest.raises(ValueError, match="sum to"):
        DiagonalInitialState([0.5, 0.6])


def test_regression_joint_normalization(rng):
    gen = random_generator(3, 2, rng)
    rho0 = random_diagonal_state(3, rng)
    basis = ObservableBasis(("a", "b", "c"))
    total = sum(regression_joint(gen, basis, rho0, x, 1.0, y, 0.3) for x in basis.labels for y in basis.labels)
    assert total == pytest.approx(1.0, abs=1e-12)
    J = joint_probabilities(gen, rho0, 0.3, 1.0)
    np.testing.assert_allclose(J.sum(axis=0), one_time_probabilities(gen, rho0, 0.3), atol=1e-12)
    assert np.all(J >= -1e-14)


def test_unitary_generator_reproduces_unitary(rng):
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    U, _ = np.linalg.qr(A)
    gen = unitary_generator(U)
    rho = np.diag([0.1, 0.2, 0.3, 0.4]).astype(complex)
    np.testing.assert_allclose(lindblad_propagate(gen, rho, 1.0), U @ rho @ U.conj().T, atol=1e-12)


def test_walk_embedding_small():
    cfg = WalkConfig.pure(23, "V", 3, 1)
    gen = walk_generator(23, cfg.bounds)
    U = closed_step_unitary(23, cfg.bounds)
    rho0 = np.zeros((cfg.bounds.dim,) * 2, dtype=complex)
    i = mode_index((0, "V"), cfg.bounds)
    rho0[i, i] = 1
    np.testing.assert_allclose(lindblad_propagate(gen, rho0, 1.0), U @ rho0 @ U.conj().T, atol=1e-12)
    basis = ObservableBasis(tuple(cfg.bounds.modes()))
    assert generalized_K(gen, basis, rho0, 1, 3) == pytest.approx(kolmogorov_K(cfg), abs=1e-9)


def test_closed_unitary_matches_open_step_away_from_edges():
    b = Bounds(-4, 4)
    U = closed_step_unitary(17, b)
    V = step_unitary(WalkConfig(17, 4, 1))
    inner = slice(2, b.dim - 2)
    np.testing.assert_allclose(U[:, inner], V[:, inner], atol=1e-15)


@given(st.integers(2, 5), st.integers(0, 2), st.integers(0, 10**6))
@settings(max_examples=20, deadline=None)
def test_generator_is_trace_free(d, jumps, seed):
    rng = np.random.default_rng(seed)
    gen = random_generator(d, jumps, rng)
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    assert abs(np.trace(lindblad_apply(gen, A @ A.conj().T))) < 1e-12


def test_commuting_state_is_stationary():
    gen = LindbladGenerator(np.diag([1.0, -2.0]))
    np.testing.assert_array_equal(lindblad_apply(gen, np.diag([0.4, 0.6])), 0)


def test_equal_times_joint_is_diagonal(rng):
    gen = random_generator(3, 2, rng)
    rho0 = random_diagonal_state(3, rng)
    J = joint_probabilities(gen, rho0, 0.8, 0.8)
    np.testing.assert_allclose(J, np.diag(one_time_probabilities(gen, rho0, 0.8)), atol=1e-14)
