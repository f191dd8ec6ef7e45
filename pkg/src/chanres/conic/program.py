"""Problem and result types for the conic backend.

A :class:`ConicProgram` is written in "LMI form": scalar real variables ``x``,
an objective ``c.x``, Hermitian-matrix-valued affine blocks
``F_0 + sum_i x_i F_i >= 0`` and real equalities ``A x = b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, List, Optional

import numpy as np
import scipy.sparse as sp

from ..errors import DimensionMismatch, InvalidInput, NotHermitian

STATUSES = ("Optimal", "Infeasible", "Unbounded", "MaxIterations", "NumericalTrouble")


@dataclass
class HermitianAffine:
    """``const + sum_i x_i F_i`` with ``vec(F_i)`` stored as column ``i`` of ``coef``.

    Vectorisation is row-major: entry ``(r, c)`` sits at flat index ``r*dim + c``.
    """

    dim: int
    const: np.ndarray
    coef: sp.csc_matrix

    def __post_init__(self):
        self.const = np.asarray(self.const, dtype=complex)
        self.coef = sp.csc_matrix(self.coef, dtype=complex)
        if self.const.shape != (self.dim, self.dim) or self.coef.shape[0] != self.dim * self.dim:
            raise DimensionMismatch("affine block data do not match the declared dimension")

    @property
    def is_real(self) -> bool:
        return not (np.any(self.const.imag) or (self.coef.nnz and np.any(self.coef.data.imag)))

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        n = self.coef.shape[1]
        v = self.coef @ np.asarray(x, dtype=float)[:n]
        return self.const + v.reshape(self.dim, self.dim)

    def check_hermitian(self, tol: float = 1e-10) -> None:
        d = self.dim
        if np.max(np.abs(self.const - self.const.conj().T), initial=0.0) > tol:
            raise NotHermitian("block constant is not Hermitian")
        flat = np.arange(d * d)
        transposed = (flat % d) * d + flat // d
        diff = self.coef - self.coef[transposed, :].conj()
        if diff.nnz and np.max(np.abs(diff.data)) > tol:
            raise NotHermitian("block coefficient matrices are not Hermitian")


@dataclass
class ConicProgram:
    """minimize ``objective . x + offset`` subject to PSD blocks and ``eq_matrix x = eq_rhs``."""

    objective: np.ndarray
    blocks: List[HermitianAffine]
    eq_matrix: Optional[np.ndarray] = None
    eq_rhs: Optional[np.ndarray] = None
    offset: float = 0.0
    names: dict = field(default_factory=dict)

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).ravel()
        n = self.objective.size
        if self.eq_matrix is None:
            self.eq_matrix = np.zeros((0, n))
            self.eq_rhs = np.zeros(0)
        self.eq_matrix = np.atleast_2d(np.asarray(self.eq_matrix, dtype=float))
        if self.eq_matrix.shape[0] == 0:
            self.eq_matrix = self.eq_matrix.reshape(0, n)
        self.eq_rhs = np.asarray(self.eq_rhs, dtype=float).ravel()

    @property
    def n_vars(self) -> int:
        return self.objective.size

    @property
    def psd_blocks(self) -> List[int]:
        return [b.dim for b in self.blocks]

    def validate(self) -> None:
        n = self.n_vars
        if n < 1:
            raise InvalidInput("a conic program needs at least one variable")
        if self.eq_matrix.shape != (self.eq_rhs.size, n):
            raise DimensionMismatch("equality constraint data have inconsistent shapes")
        for b in self.blocks:
            if b.dim < 1:
                raise InvalidInput("block dimensions must be >= 1")
            if b.coef.shape[1] > n:
                raise DimensionMismatch("block refers to more variables than the objective has")
            b.check_hermitian()

    def objective_value(self, x: np.ndarray) -> float:
        return float(self.objective @ x + self.offset)

    def feasibility_report(self, x: np.ndarray) -> dict:
        """Independent re-check of a candidate point: minimum block eigenvalue and equality residual."""
        mins = [float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
                for m in (b.evaluate(x) for b in self.blocks)]
        eq = self.eq_matrix @ x - self.eq_rhs if self.eq_rhs.size else np.zeros(0)
        return {
            "min_eigenvalue": min(mins) if mins else 0.0,
            "equality_residual": float(np.max(np.abs(eq))) if eq.size else 0.0,
            "objective": self.objective_value(x),
        }


@dataclass
class SolveResult:
    status: str
    objective_value: float
    variable_values: np.ndarray
    duality_gap: float
    max_residual: float
    iterations: int = 0
    dual_objective: float = float("nan")
    block_duals: List[np.ndarray] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == "Optimal"

    def provenance(self) -> dict:
        return {
            "status": self.status,
            "iterations": self.iterations,
            "duality_gap": float(self.duality_gap),
            "max_residual": float(self.max_residual),
        }


def embed_complex(h) -> np.ndarray:
    """Real symmetric embedding ``[[Re, -Im], [Im, Re]]`` of a Hermitian matrix."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch("embed_complex expects a square matrix")
    if np.max(np.abs(h - h.conj().T), initial=0.0) > 1e-10 * max(1.0, np.max(np.abs(h), initial=0.0)):
        raise NotHermitian("embed_complex expects a Hermitian matrix")
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def dump_program(program: ConicProgram, stream: IO[str]) -> None:
    """Write a sparse triplet listing of ``program`` (debug aid, not a stable format).

    Lines: ``obj i c_i``; ``blk k dim``; ``F k i r c re im`` (``i = 0`` is the
    constant, variable ``j`` is ``i = j + 1``); ``eq row j a b``.
    """
    n = program.n_vars
    stream.write(f"vars {n}\n")
    for i, ci in enumerate(program.objective):
        if ci != 0:
            stream.write(f"obj {i} {ci:.17g}\n")
    if program.offset:
        stream.write(f"offset {program.offset:.17g}\n")
    for k, b in enumerate(program.blocks):
        stream.write(f"blk {k} {b.dim}\n")
        rr, cc = np.nonzero(b.const)
        for r, c in zip(rr, cc):
            z = b.const[r, c]
            stream.write(f"F {k} 0 {r} {c} {z.real:.17g} {z.imag:.17g}\n")
        coo = b.coef.tocoo()
        order = np.lexsort((coo.row, coo.col))
        for f, j, z in zip(coo.row[order], coo.col[order], coo.data[order]):
            stream.write(f"F {k} {j + 1} {f // b.dim} {f % b.dim} {z.real:.17g} {z.imag:.17g}\n")
    for r in range(program.eq_rhs.size):
        for j in np.nonzero(program.eq_matrix[r])[0]:
            stream.write(f"eq {r} {j} {program.eq_matrix[r, j]:.17g} {program.eq_rhs[r]:.17g}\n")
