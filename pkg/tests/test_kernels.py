import math

import numpy as np
import pytest

from kcwalk import _backend
from kcwalk._walk_py import LatticeBoundaryError
from kcwalk.walk import step_unitary, WalkConfig


def _random_batch(rng, batch, n_sites, margin):
    psi = np.zeros((batch, n_sites, 2), dtype=complex)
    psi[:, margin:n_sites - margin, :] = rng.normal(size=(batch, n_sites - 2 * margin, 2)) + 1j * rng.normal(
        size=(batch, n_sites - 2 * margin, 2))
    return psi


@pytest.mark.parametrize("theta", [0.0, 13.0, 45.0, 90.0, 133.7])
def test_kernel_matches_dense_step_matrix(kernel, rng, theta):
    cfg = WalkConfig(theta, 8, 4)
    U = step_unitary(cfg)
    psi = _random_batch(rng, 3, cfg.bounds.n_sites, 4)
    t = math.radians(theta)
    out = kernel(psi, 3, math.cos(t), math.sin(t))
    expected = psi.reshape(3, -1).T
    for _ in range(3):
        expected = U @ expected
    np.testing.assert_allclose(out.reshape(3, -1), expected.T, atol=1e-13)


def test_kernel_applies_branch_amplitudes(kernel):
    psi = np.zeros((1, 5, 2), dtype=complex)
    psi[0, 2, 0] = 1.0
    t = math.radians(45)
    out = kernel(psi, 1, math.cos(t), math.sin(t), 0.5, 0.25)
    assert out[0, 3, 0] == pytest.approx(0.5 * math.sqrt(0.5))
    assert out[0, 1, 1] == pytest.approx(0.25 * math.sqrt(0.5))


def test_kernel_refuses_to_leave_lattice(kernel):
    psi = np.zeros((1, 3, 2), dtype=complex)
    psi[0, 2, 0] = 1.0
    with pytest.raises(LatticeBoundaryError):
        kernel(psi, 1, 1.0, 0.0)


def test_kernel_does_not_modify_input(kernel, rng):
    psi = _random_batch(rng, 2, 9, 3)
    before = psi.copy()
    kernel(psi, 2, 0.6, 0.8)
    np.testing.assert_array_equal(psi, before)


def test_backends_agree(rng):
    from kcwalk import _walk_py

    psi = _random_batch(rng, 4, 41, 15)
    a = _walk_py.propagate(psi, 10, 0.3, math.sqrt(1 - 0.09), 0.99, 0.97)
    b = _backend.propagate(psi, 10, 0.3, math.sqrt(1 - 0.09), 0.99, 0.97)
    np.testing.assert_allclose(a, b, atol=1e-14)


def test_zero_steps_is_identity(kernel, rng):
    psi = _random_batch(rng, 2, 7, 0)
    np.testing.assert_array_equal(kernel(psi, 0, 0.1, 0.2), psi)


def test_backend_selection_honours_pure_python_override(monkeypatch):
    import importlib

    monkeypatch.setenv("KCWALK_PURE_PYTHON", "1")
    try:
        forced = importlib.reload(_backend)
        assert forced.BACKEND == "python"
    finally:
        monkeypatch.delenv("KCWALK_PURE_PYTHON")
        importlib.reload(_backend)
