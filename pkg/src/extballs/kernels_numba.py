"""Numba @njit implementations of the grid kernels.

Same API and conventions as kernels_numpy (see its module docstring).  The
decorator degrades to a no-op wrapper when numba is unavailable so this
module stays importable; backend.py never selects it in that situation.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        def wrapper(func):
            return func
        if args and callable(args[0]):
            return args[0]
        return wrapper


@njit(cache=True)
def stable_acosh(delta):
    d = np.ravel(np.asarray(delta)).astype(np.float64)
    out = np.empty(d.shape[0], dtype=np.float64)
    for k in range(d.shape[0]):
        x = d[k]
        if x < 0.0:
            x = 0.0
        if x <= 1e-4:
            out[k] = np.sqrt(2.0 * x) * (1.0 - x / 12.0 + 3.0 * x * x / 160.0)
        else:
            out[k] = np.log1p(x + np.sqrt(x * (2.0 + x)))
    return out.reshape(np.asarray(delta).shape)


@njit(cache=True)
def classify_cells(r, t, periodic_u):
    n_u, n_v = r.shape
    ncu = n_u if periodic_u else n_u - 1
    out = np.zeros((ncu, n_v - 1), dtype=np.int8)
    for i in range(ncu):
        i1 = (i + 1) % n_u
        for j in range(n_v - 1):
            n_in = 0
            if r[i, j] < t:
                n_in += 1
            if r[i1, j] < t:
                n_in += 1
            if r[i1, j + 1] < t:
                n_in += 1
            if r[i, j + 1] < t:
                n_in += 1
            if n_in == 4:
                out[i, j] = 1
            elif n_in > 0:
                out[i, j] = 2
    return out


@njit(cache=True)
def segment_edges(r, t, periodic_u):
    n_u, n_v = r.shape
    ncu = n_u if periodic_u else n_u - 1
    nue = n_v * ncu

    # Local edge codes 0..3 = bottom, right, top, left.
    max_segs = 2 * ncu * (n_v - 1)
    seg_a = np.empty(max_segs, dtype=np.int64)
    seg_b = np.empty(max_segs, dtype=np.int64)
    m = 0
    for i in range(ncu):
        i1 = (i + 1) % n_u
        for j in range(n_v - 1):
            r0 = r[i, j]
            r1 = r[i1, j]
            r2 = r[i1, j + 1]
            r3 = r[i, j + 1]
            case = 0
            if r0 < t:
                case += 1
            if r1 < t:
                case += 2
            if r2 < t:
                case += 4
            if r3 < t:
                case += 8
            if case == 0 or case == 15:
                continue

            bottom = j * ncu + i
            top = (j + 1) * ncu + i
            left = nue + j * n_u + i
            right = nue + j * n_u + i1

            if case == 1 or case == 14:
                seg_a[m] = left
                seg_b[m] = bottom
                m += 1
            elif case == 2 or case == 13:
                seg_a[m] = bottom
                seg_b[m] = right
                m += 1
            elif case == 4 or case == 11:
                seg_a[m] = right
                seg_b[m] = top
                m += 1
            elif case == 8 or case == 7:
                seg_a[m] = top
                seg_b[m] = left
                m += 1
            elif case == 3 or case == 12:
                seg_a[m] = left
                seg_b[m] = right
                m += 1
            elif case == 6 or case == 9:
                seg_a[m] = bottom
                seg_b[m] = top
                m += 1
            else:
                center_in = (r0 + r1 + r2 + r3) < 4.0 * t
                if (case == 5) == center_in:
                    seg_a[m] = bottom
                    seg_b[m] = right
                    m += 1
                    seg_a[m] = top
                    seg_b[m] = left
                    m += 1
                else:
                    seg_a[m] = left
                    seg_b[m] = bottom
                    m += 1
                    seg_a[m] = right
                    seg_b[m] = top
                    m += 1
    return seg_a[:m], seg_b[:m]
