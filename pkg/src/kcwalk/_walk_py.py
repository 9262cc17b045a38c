"""Pure-numpy walk propagation kernel (fallback for the compiled ``_walk_core``)."""
import numpy as np


class LatticeBoundaryError(ValueError):
    pass


def propagate(psi, steps, cos_t, sin_t, amp_h=1.0, amp_v=1.0):
    """Apply ``steps`` coin-then-shift steps to a batch of states.

    ``psi`` has shape ``(batch, n_sites, 2)``. ``amp_h``/``amp_v`` are per-step
    amplitude factors on the right- and left-moving branches (1.0 = lossless).
    Returns a new array; the input is not modified.
    """
    psi = np.array(psi, dtype=np.complex128, copy=True)
    if psi.ndim != 3 or psi.shape[2] != 2:
        raise ValueError(f"expected shape (batch, n_sites, 2), got {psi.shape}")
    for _ in range(int(steps)):
        h = cos_t * psi[:, :, 0] + sin_t * psi[:, :, 1]
        v = sin_t * psi[:, :, 0] - cos_t * psi[:, :, 1]
        if np.any(h[:, -1] != 0) or np.any(v[:, 0] != 0):
            raise LatticeBoundaryError("walker would be shifted past the lattice boundary")
        psi = np.zeros_like(psi)
        psi[:, 1:, 0] = amp_h * h[:, :-1]
        psi[:, :-1, 1] = amp_v * v[:, 1:]
    return psi
