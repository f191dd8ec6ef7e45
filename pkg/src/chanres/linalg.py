"""Small dense linear-algebra helpers on Hermitian matrices."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NotHermitian

HERMITIAN_TOL = 1e-10
EIG_CLIP = 1e-9


def as_matrix(a, dtype=complex) -> np.ndarray:
    m = np.asarray(a, dtype=dtype)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def check_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL, what: str = "matrix") -> np.ndarray:
    """Return the Hermitian part of ``a`` after checking ``a`` is Hermitian to ``tol``."""
    a = as_matrix(a)
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if a.size and np.max(np.abs(a - a.conj().T)) > tol * scale:
        raise NotHermitian(f"{what} is not Hermitian")
    return hermitian_part(a)


def eigh_clipped(a: np.ndarray, clip: float = EIG_CLIP):
    """Eigen-decomposition with eigenvalues in ``[-clip, 0]`` set to zero."""
    w, v = np.linalg.eigh(hermitian_part(a))
    w = np.where((w < 0) & (w >= -clip), 0.0, w)
    return w, v


def min_eig(a: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(hermitian_part(a))[0])


def trace_norm(a: np.ndarray) -> float:
    """Schatten-1 norm of a Hermitian matrix."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(hermitian_part(a)))))


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(hermitian_part(a))
    w = np.sqrt(np.clip(w, 0.0, None))
    return (v * w) @ v.conj().T


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def partial_trace(x: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace of ``x`` on the tensor factors *not* listed in ``keep``."""
    dims = [int(d) for d in dims]
    n = len(dims)
    total = int(np.prod(dims))
    if x.shape != (total, total):
        raise DimensionMismatch(f"matrix of shape {x.shape} does not match dims {dims}")
    keep = sorted(int(k) for k in keep)
    t = x.reshape(dims + dims)
    traced = [k for k in range(n) if k not in keep]
    # trace out from the highest axis down so remaining axis numbers stay valid
    cur = n
    for k in sorted(traced, reverse=True):
        t = np.trace(t, axis1=k, axis2=k + cur)
        cur -= 1
    dk = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(dk, dk)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix from the induced (Hilbert-Schmidt for full rank) measure."""
    k = d if rank is None else int(rank)
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    return hermitian_part(rho / np.trace(rho).real)
