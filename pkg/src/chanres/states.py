"""Entropic quantities, max-relative entropy and majorization on states.

All logarithms are base 2 except inside :func:`free_energy`, which is an
energy and therefore uses the natural-log entropy (``F = Tr(rho H) - S/beta``
with ``S`` in nats, so that ``F(rho) - F(tau) = D(rho||tau) / beta``).
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidInput, NotADensityMatrix, NotADistribution
from .linalg import EIG_CLIP, as_matrix, check_hermitian, eigh_clipped, hermitian_part

SUPPORT_TOL = 1e-9
DENSITY_TOL = 1e-9


def ensure_density(rho, tol: float = DENSITY_TOL, what: str = "state") -> np.ndarray:
    """Validate ``rho`` as a density matrix and return its Hermitian part."""
    rho = check_hermitian(rho, what=what)
    if rho.shape[0] == 0:
        raise NotADensityMatrix(f"{what} is empty")
    w = np.linalg.eigvalsh(rho)
    if w[0] < -tol:
        raise NotADensityMatrix(f"{what} has negative eigenvalue {w[0]:.3e}")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise NotADensityMatrix(f"{what} has trace {np.trace(rho).real:.12g}")
    return rho


def _xlogx(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(np.sum(p * np.log2(p)))


def von_neumann_entropy(rho) -> float:
    """S(rho) in bits."""
    w, _ = eigh_clipped(as_matrix(rho))
    return -_xlogx(np.clip(w, 0.0, None))


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    return -_xlogx(np.clip(p, 0.0, None))


def _support(sigma: np.ndarray, tol: float = SUPPORT_TOL):
    w, v = eigh_clipped(sigma)
    mask = w >= tol
    return w[mask], v[:, mask]


def supported_in(rho: np.ndarray, sigma: np.ndarray, tol: float = SUPPORT_TOL) -> bool:
    """Whether supp(rho) is contained in the >= tol eigenspace of sigma."""
    _, vs = _support(sigma, tol)
    leak = np.trace(rho).real - np.trace(vs.conj().T @ rho @ vs).real
    return leak <= tol * max(1.0, np.trace(rho).real)


def relative_entropy(rho, sigma) -> float:
    """Umegaki relative entropy D(rho||sigma) in bits; ``math.inf`` on support violation."""
    rho = hermitian_part(as_matrix(rho))
    sigma = hermitian_part(as_matrix(sigma))
    if rho.shape != sigma.shape:
        raise DimensionMismatch("relative_entropy operands differ in dimension")
    if not supported_in(rho, sigma):
        return math.inf
    q, vs = _support(sigma)
    diag = np.real(np.einsum("ik,ij,jk->k", vs.conj(), rho, vs))
    p, _ = eigh_clipped(rho)
    return _xlogx(np.clip(p, 0.0, None)) - float(np.sum(diag * np.log2(q)))


def state_dmax(rho, sigma) -> float:
    """Max-relative entropy log2 min{lam : rho <= lam sigma}; ``math.inf`` on support violation."""
    rho = hermitian_part(as_matrix(rho))
    sigma = hermitian_part(as_matrix(sigma))
    if rho.shape != sigma.shape:
        raise DimensionMismatch("state_dmax operands differ in dimension")
    if not supported_in(rho, sigma):
        return math.inf
    q, vs = _support(sigma)
    isq = 1.0 / np.sqrt(q)
    m = (vs.conj().T @ rho @ vs) * np.outer(isq, isq)
    lam = float(np.linalg.eigvalsh(hermitian_part(m))[-1])
    if lam <= 0:
        return -math.inf
    return math.log2(lam)


def dephase(rho, basis: Optional[np.ndarray] = None) -> np.ndarray:
    """Completely dephase ``rho`` in the given orthonormal basis (columns of ``basis``)."""
    rho = as_matrix(rho)
    if basis is None:
        return np.diag(np.diag(rho))
    b = as_matrix(basis)
    r = b.conj().T @ rho @ b
    return b @ np.diag(np.diag(r)) @ b.conj().T


def coherence_rel_ent(rho, basis: Optional[np.ndarray] = None) -> float:
    """Relative entropy of coherence C_r(rho) = S(Delta(rho)) - S(rho) in bits."""
    rho = as_matrix(rho)
    if basis is not None:
        b = as_matrix(basis)
        rho = b.conj().T @ rho @ b
    pdiag = np.clip(np.real(np.diag(rho)), 0.0, None)
    return max(0.0, shannon_entropy(pdiag) - von_neumann_entropy(rho))


def gibbs_state(hamiltonian, beta: float) -> np.ndarray:
    """Thermal state exp(-beta H)/Z."""
    h = check_hermitian(hamiltonian, what="hamiltonian")
    w, v = np.linalg.eigh(h)
    x = np.exp(-beta * (w - w.min()))
    x /= x.sum()
    return hermitian_part((v * x) @ v.conj().T)


def free_energy(rho, hamiltonian, beta: float) -> float:
    """Non-equilibrium free energy Tr(rho H) - S(rho)/beta (entropy in nats)."""
    rho = as_matrix(rho)
    h = as_matrix(hamiltonian)
    if rho.shape != h.shape:
        raise DimensionMismatch("state and hamiltonian differ in dimension")
    if beta <= 0:
        raise ValueError("beta must be positive")
    energy = float(np.real(np.trace(rho @ h)))
    return energy - von_neumann_entropy(rho) * math.log(2.0) / beta


def _as_distribution(p, name: str) -> np.ndarray:
    arr = np.asarray(p, dtype=float).ravel()
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise NotADistribution(f"{name} is empty or not finite")
    if np.any(arr < -1e-9) or abs(arr.sum() - 1.0) > 1e-9:
        raise NotADistribution(f"{name} is not a probability vector")
    return np.clip(arr, 0.0, None)


def majorizes(p: Sequence[float], q: Sequence[float], tol: float = 1e-9) -> bool:
    """True iff p majorizes q (sorted prefix sums of p dominate those of q)."""
    a = _as_distribution(p, "p")
    b = _as_distribution(q, "q")
    n = max(a.size, b.size)
    a = np.pad(a, (0, n - a.size))
    b = np.pad(b, (0, n - b.size))
    ca = np.cumsum(np.sort(a)[::-1])
    cb = np.cumsum(np.sort(b)[::-1])
    return bool(np.all(ca >= cb - tol))


def io_unitary_necessary_condition(u, v) -> bool:
    """Row-wise majorization test between the squared moduli of two unitaries.

    For every row index i the vector (|u_i1|^2, ..., |u_ik|^2) must majorize
    (|v_i1|^2, ..., |v_ik|^2).  This is a necessary condition only.
    """
    u = as_matrix(u)
    v = as_matrix(v)
    if u.shape != v.shape:
        raise DimensionMismatch("unitaries differ in dimension")
    eye = np.eye(u.shape[0])
    for m, name in ((u, "u"), (v, "v")):
        if np.max(np.abs(m.conj().T @ m - eye)) > 1e-9:
            raise InvalidInput(f"{name} is not unitary")
    pu = np.abs(u) ** 2
    pv = np.abs(v) ** 2
    return all(majorizes(pu[i] / pu[i].sum(), pv[i] / pv[i].sum()) for i in range(u.shape[0]))


__all__ = [
    "EIG_CLIP",
    "coherence_rel_ent",
    "dephase",
    "ensure_density",
    "free_energy",
    "gibbs_state",
    "io_unitary_necessary_condition",
    "majorizes",
    "relative_entropy",
    "shannon_entropy",
    "state_dmax",
    "supported_in",
    "von_neumann_entropy",
]
