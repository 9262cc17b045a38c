# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled walk propagation kernel. Same contract as ``kcwalk._walk_py.propagate``."""
import numpy as np

from kcwalk._walk_py import LatticeBoundaryError


def propagate(psi, Py_ssize_t steps, double cos_t, double sin_t,
              double amp_h=1.0, double amp_v=1.0):
    cdef double complex[:, :, ::1] cur = np.array(psi, dtype=np.complex128, order="C", copy=True)
    if cur.shape[2] != 2:
        raise ValueError(f"expected shape (batch, n_sites, 2), got {np.shape(psi)}")
    cdef Py_ssize_t nb = cur.shape[0], ns = cur.shape[1]
    cdef double complex[:, :, ::1] nxt = np.zeros_like(cur)
    cdef double complex[:, :, ::1] tmp
    cdef double complex h, v, a, b
    cdef Py_ssize_t k, i, x
    cdef bint escaped = 0
    for k in range(steps):
        with nogil:
            for i in range(nb):
                nxt[i, 0, 0] = 0
                nxt[i, ns - 1, 1] = 0
                for x in range(ns):
                    a = cur[i, x, 0]
                    b = cur[i, x, 1]
                    h = cos_t * a + sin_t * b
                    v = sin_t * a - cos_t * b
                    if x + 1 < ns:
                        nxt[i, x + 1, 0] = amp_h * h
                    elif h != 0:
                        escaped = 1
                    if x > 0:
                        nxt[i, x - 1, 1] = amp_v * v
                    elif v != 0:
                        escaped = 1
        if escaped:
            raise LatticeBoundaryError("walker would be shifted past the lattice boundary")
        tmp = cur
        cur = nxt
        nxt = tmp
    return np.asarray(cur)
