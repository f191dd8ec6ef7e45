"""Schur-complement assembly for the interior-point solver.

For a PSD block with coefficient matrices ``G_i`` (real symmetric, stored as
sparse triplets per column) and a symmetric scaling matrix ``T`` the solver
needs ``M_ij = tr(G_i T G_j T)``.  This is the dominant per-iteration cost.
Two implementations are provided: a numba kernel that loops over pairs of
nonzeros, and a numpy path that vectorises over padded nonzero slots and
treats dense columns with explicit matrix products.
"""

from __future__ import annotations

import numpy as np

from .. import _accel
from .._accel import njit


@njit(cache=True)
def _schur_block_numba(active, indptr, rows, cols, vals, t, m):  # pragma: no cover - compiled
    na = active.shape[0]
    dim = t.shape[0]
    for ia in range(na):
        i = active[ia]
        a0 = indptr[i]
        a1 = indptr[i + 1]
        # heavy column: form C = T G_i T once, then tr(G_i T G_j T) = sum_b v_b C[q_b, p_b]
        heavy = a1 - a0 > dim
        if heavy:
            g = np.zeros((dim, dim))
            for a in range(a0, a1):
                g[rows[a], cols[a]] += vals[a]
            c = np.dot(np.dot(t, g), t)
        for ja in range(ia, na):
            j = active[ja]
            b0 = indptr[j]
            b1 = indptr[j + 1]
            acc = 0.0
            if heavy:
                for b in range(b0, b1):
                    acc += vals[b] * c[cols[b], rows[b]]
            else:
                for a in range(a0, a1):
                    p = rows[a]
                    q = cols[a]
                    va = vals[a]
                    for b in range(b0, b1):
                        acc += va * vals[b] * t[q, rows[b]] * t[cols[b], p]
            m[i, j] += acc
            if ja != ia:
                m[j, i] += acc


class BlockPattern:
    """Column-compressed sparsity pattern of one PSD block's coefficients.

    ``indptr``, ``rows``, ``cols`` and ``vals`` describe, for every variable
    ``i``, the nonzeros ``G_i[rows, cols] = vals`` (CSC layout over the
    variables).  Slot arrays for the numpy path are built lazily.
    """

    LIGHT = 8

    def __init__(self, dim: int, indptr, rows, cols, vals):
        self.dim = int(dim)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.rows = np.ascontiguousarray(rows, dtype=np.int64)
        self.cols = np.ascontiguousarray(cols, dtype=np.int64)
        self.vals = np.ascontiguousarray(vals, dtype=np.float64)
        counts = np.diff(self.indptr)
        self.active = np.ascontiguousarray(np.nonzero(counts)[0], dtype=np.int64)
        self._slots = None

    @property
    def nnz(self) -> int:
        return int(self.vals.size)

    def _slot_arrays(self):
        if self._slots is None:
            counts = np.diff(self.indptr)
            light = self.active[counts[self.active] <= self.LIGHT]
            heavy = self.active[counts[self.active] > self.LIGHT]
            k = int(counts[light].max()) if light.size else 0
            r = np.zeros((light.size, k), dtype=np.int64)
            c = np.zeros((light.size, k), dtype=np.int64)
            v = np.zeros((light.size, k))
            for s, i in enumerate(light):
                a0, a1 = self.indptr[i], self.indptr[i + 1]
                n = a1 - a0
                r[s, :n] = self.rows[a0:a1]
                c[s, :n] = self.cols[a0:a1]
                v[s, :n] = self.vals[a0:a1]
            self._slots = (light, heavy, r, c, v)
        return self._slots


def _schur_block_numpy(pattern: BlockPattern, t: np.ndarray, m: np.ndarray) -> None:
    light, heavy, r, c, v = pattern._slot_arrays()
    k = r.shape[1]
    if light.size:
        sub = np.zeros((light.size, light.size))
        for a in range(k):
            tq = t[c[:, a]]          # rows T[q_a(i), :]
            tp = t[r[:, a]]          # rows T[p_a(i), :]
            va = v[:, a]
            for b in range(k):
                sub += (va[:, None] * v[None, :, b]) * tq[:, r[:, b]] * tp[:, c[:, b]]
        m[np.ix_(light, light)] += sub
    if heavy.size:
        # dense path: X_j = T G_j T, then M_ij = <G_i, X_j> for every active i
        n = pattern.dim
        owners = np.repeat(np.arange(pattern.indptr.size - 1), np.diff(pattern.indptr))
        for j in heavy:
            a0, a1 = pattern.indptr[j], pattern.indptr[j + 1]
            g = np.zeros((n, n))
            np.add.at(g, (pattern.rows[a0:a1], pattern.cols[a0:a1]), pattern.vals[a0:a1])
            x = t @ g @ t
            contrib = pattern.vals * x[pattern.rows, pattern.cols]
            col = np.bincount(owners, weights=contrib, minlength=m.shape[0])
            # light-heavy pairs are written symmetrically; heavy-heavy once per column
            m[light, j] += col[light]
            m[j, light] += col[light]
            m[heavy, j] += col[heavy]


def schur_block_numba(pattern: BlockPattern, t: np.ndarray, m: np.ndarray) -> None:
    _schur_block_numba(pattern.active, pattern.indptr, pattern.rows, pattern.cols, pattern.vals,
                       np.ascontiguousarray(t), m)


def schur_block_numpy(pattern: BlockPattern, t: np.ndarray, m: np.ndarray) -> None:
    _schur_block_numpy(pattern, np.ascontiguousarray(t), m)


def schur_block(pattern: BlockPattern, t: np.ndarray, m: np.ndarray) -> None:
    """Accumulate ``tr(G_i T G_j T)`` into ``m`` using the active backend."""
    if _accel.backend() == "numba":
        schur_block_numba(pattern, t, m)
    else:
        schur_block_numpy(pattern, t, m)
