"""A small modeling layer on top of :class:`ConicProgram`.

Matrix-valued affine expressions are kept as a constant plus a sparse
coefficient matrix whose column ``i`` is ``vec(F_i)`` (row-major).  Linear maps
on matrices (partial traces, congruences, Kronecker products with constants)
act on the coefficient matrix from the left, so building a constraint never
needs to enumerate variables explicitly.

Examples
--------
>>> m = Model()
>>> t = m.scalar()
>>> m.add_psd(t * np.eye(2) - np.diag([1.0, 3.0]))
>>> m.minimize(t)
>>> round(m.solve().objective_value, 6)
3.0
"""

from __future__ import annotations

from dataclasses import replace
from typing import List, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from ..errors import DimensionMismatch, InfeasibleProgram, NotHermitian, SolverFailure
from .program import ConicProgram, HermitianAffine, SolveResult
from .solver import SolverOptions, solve

def ptrace_operator(dims: Sequence[int], keep: Sequence[int]) -> sp.csr_matrix:
    """Sparse matrix of the partial trace keeping factors ``keep`` (row-major vec)."""
    dims = [int(d) for d in dims]
    keep = sorted(int(k) for k in keep)
    total = int(np.prod(dims))
    dk = int(np.prod([dims[k] for k in keep])) if keep else 1
    idx = np.indices(dims).reshape(len(dims), -1).T  # multi-index per flat position
    kept_flat = np.zeros(total, dtype=np.int64)
    other_flat = np.zeros(total, dtype=np.int64)
    for ax in range(len(dims)):
        if ax in keep:
            kept_flat = kept_flat * dims[ax] + idx[:, ax]
        else:
            other_flat = other_flat * dims[ax] + idx[:, ax]
    # entry (r, c) contributes to (kept(r), kept(c)) iff other(r) == other(c)
    r = np.arange(total)
    rows, cols = [], []
    for o in np.unique(other_flat):
        sel = r[other_flat == o]
        rr, cc = np.meshgrid(sel, sel, indexing="ij")
        rows.append((kept_flat[rr] * dk + kept_flat[cc]).ravel())
        cols.append((rr * total + cc).ravel())
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    return sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(dk * dk, total * total))


class Expr:
    """Affine matrix expression ``const + sum_i x_i F_i`` over the model's real variables."""

    __array_ufunc__ = None  # let ``ndarray * expr`` dispatch to __rmul__

    def __init__(self, dim: int, const, coef):
        self.dim = int(dim)
        self.const = np.asarray(const, dtype=complex).reshape(self.dim, self.dim)
        self.coef = sp.csr_matrix(coef, dtype=complex)

    # -- helpers
    @property
    def width(self) -> int:
        return self.coef.shape[1]

    def _padded(self, width: int) -> sp.csr_matrix:
        if self.width == width:
            return self.coef
        c = self.coef.tocoo()
        return sp.csr_matrix((c.data, (c.row, c.col)), shape=(self.dim ** 2, width))

    @staticmethod
    def constant(m) -> "Expr":
        m = np.atleast_2d(np.asarray(m, dtype=complex))
        return Expr(m.shape[0], m, sp.csr_matrix((m.size, 0)))

    def _coerce(self, other) -> "Expr":
        if isinstance(other, Expr):
            return other
        if np.isscalar(other):
            return Expr.constant(other * np.eye(self.dim))
        return Expr.constant(other)

    def _apply(self, op: sp.spmatrix, new_dim: int) -> "Expr":
        const = (op @ self.const.ravel()).reshape(new_dim, new_dim)
        return Expr(new_dim, const, op @ self.coef)

    # -- arithmetic
    def __add__(self, other):
        o = self._coerce(other)
        if o.dim != self.dim:
            raise DimensionMismatch(f"cannot add {self.dim}x{self.dim} and {o.dim}x{o.dim} expressions")
        w = max(self.width, o.width)
        return Expr(self.dim, self.const + o.const, self._padded(w) + o._padded(w))

    __radd__ = __add__

    def __neg__(self):
        return Expr(self.dim, -self.const, -self.coef)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, k):
        if np.isscalar(k):
            return Expr(self.dim, self.const * k, self.coef * k)
        if self.dim == 1:
            # scalar expression times a constant matrix
            return self.kron_const_left(k)
        raise TypeError("Expr only supports scalar multiplication; use matmul_const_*")

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1.0 / k)

    # -- structured linear maps
    def linear_map(self, op, new_dim: int) -> "Expr":
        """Apply a linear map given as a sparse ``(new_dim**2, dim**2)`` matrix on row-major vecs."""
        op = sp.csr_matrix(op)
        if op.shape != (new_dim * new_dim, self.dim * self.dim):
            raise DimensionMismatch("linear map shape does not match the expression")
        return self._apply(op, new_dim)

    def offdiag(self) -> "Expr":
        """The expression with its diagonal zeroed."""
        keep = np.ones(self.dim * self.dim)
        keep[:: self.dim + 1] = 0.0
        return self._apply(sp.diags(keep), self.dim)

    def ptrace(self, dims: Sequence[int], keep: Sequence[int]) -> "Expr":
        if int(np.prod(dims)) != self.dim:
            raise DimensionMismatch("partial-trace dims do not match the expression")
        op = ptrace_operator(dims, keep)
        dk = int(np.prod([dims[k] for k in keep])) if len(keep) else 1
        return self._apply(op, dk)

    def congruence(self, b) -> "Expr":
        """``B X B^dagger``."""
        b = np.asarray(b, dtype=complex)
        if b.shape[1] != self.dim:
            raise DimensionMismatch("congruence matrix has the wrong number of columns")
        return self._apply(sp.csr_matrix(np.kron(b, b.conj())), b.shape[0])

    def kron_const_left(self, c) -> "Expr":
        """``C (x) X``."""
        c = np.atleast_2d(np.asarray(c, dtype=complex))
        return self._kron(c, left=True)

    def kron_const_right(self, c) -> "Expr":
        """``X (x) C``."""
        c = np.atleast_2d(np.asarray(c, dtype=complex))
        return self._kron(c, left=False)

    def _kron(self, c, left: bool) -> "Expr":
        d, k = self.dim, c.shape[0]
        nd = d * k
        const = np.kron(c, self.const) if left else np.kron(self.const, c)
        coo = self.coef.tocoo()
        r, q = np.divmod(coo.row, d)
        cr, cc = np.nonzero(c)
        cv = c[cr, cc]
        if left:
            rows = (cr[None, :] * d + r[:, None]) * nd + (cc[None, :] * d + q[:, None])
        else:
            rows = (r[:, None] * k + cr[None, :]) * nd + (q[:, None] * k + cc[None, :])
        vals = coo.data[:, None] * cv[None, :]
        cols = np.broadcast_to(coo.col[:, None], rows.shape)
        coef = sp.csr_matrix((vals.ravel(), (rows.ravel(), cols.ravel())), shape=(nd * nd, self.width))
        return Expr(nd, const, coef)

    def matmul_const_right(self, c) -> "Expr":
        """``X C`` (not Hermitian in general; use inside traces/equalities)."""
        c = np.asarray(c, dtype=complex)
        return self._apply(sp.csr_matrix(np.kron(np.eye(self.dim), c.T)), self.dim)

    def matmul_const_left(self, c) -> "Expr":
        c = np.asarray(c, dtype=complex)
        return self._apply(sp.csr_matrix(np.kron(c, np.eye(self.dim))), self.dim)

    def trace(self) -> "Expr":
        return self.trace_with(np.eye(self.dim))

    def trace_with(self, c) -> "Expr":
        """Scalar expression ``tr(C X)``."""
        c = np.asarray(c, dtype=complex)
        row = sp.csr_matrix(c.T.reshape(1, -1))
        return self._apply(row, 1)

    def entry(self, i: int, j: int) -> "Expr":
        row = sp.csr_matrix(([1.0], ([0], [i * self.dim + j])), shape=(1, self.dim ** 2))
        return self._apply(row, 1)

    def value(self, x: np.ndarray) -> np.ndarray:
        v = self._padded(max(self.width, 0)) @ np.asarray(x, dtype=float)[: self.width]
        out = self.const + v.reshape(self.dim, self.dim)
        return out

    def scalar_value(self, x) -> float:
        return float(self.value(x)[0, 0].real)


class Model:
    """Builder for conic programs with Hermitian-matrix variables."""

    def __init__(self):
        self.n = 0
        self.blocks: List[Expr] = []
        self.eq_rows: List[np.ndarray] = []
        self.eq_rhs: List[float] = []
        self._objective: Optional[Expr] = None
        self.result: Optional[SolveResult] = None

    def _new(self, k: int) -> int:
        start = self.n
        self.n += k
        return start

    def scalar(self) -> Expr:
        i = self._new(1)
        return Expr(1, np.zeros((1, 1)), sp.csr_matrix(([1.0], ([0], [i])), shape=(1, self.n)))

    def hermitian(self, d: int, real: bool = False) -> Expr:
        """New ``d x d`` Hermitian (or real symmetric if ``real``) matrix variable."""
        d = int(d)
        iu, ju = np.triu_indices(d, 1)
        rows, cols, vals = [], [], []
        base = self._new(d)
        for a in range(d):
            rows.append(a * d + a), cols.append(base + a), vals.append(1.0)
        off = self._new(iu.size)
        k = np.arange(iu.size)
        rows += list(iu * d + ju) + list(ju * d + iu)
        cols += list(off + k) * 2
        vals += [1.0] * (2 * iu.size)
        if not real:
            offi = self._new(iu.size)
            rows += list(iu * d + ju) + list(ju * d + iu)
            cols += list(offi + k) * 2
            vals += [1j] * iu.size + [-1j] * iu.size
        coef = sp.csr_matrix((vals, (rows, cols)), shape=(d * d, self.n))
        return Expr(d, np.zeros((d, d)), coef)

    @staticmethod
    def _hermitian_check(e: Expr, what: str):
        tol = 1e-9 * max(1.0, float(np.max(np.abs(e.const), initial=0.0)))
        if np.max(np.abs(e.const - e.const.conj().T), initial=0.0) > tol:
            raise NotHermitian(f"{what}: constant part is not Hermitian")

    def add_psd(self, e: Expr) -> None:
        """Constrain ``e >= 0`` (1x1 expressions become scalar inequalities)."""
        self._hermitian_check(e, "add_psd")
        self.blocks.append(e)

    def add_ineq(self, e: Expr) -> None:
        """Scalar constraint ``e >= 0``."""
        if e.dim != 1:
            raise DimensionMismatch("add_ineq expects a scalar expression")
        self.blocks.append(e)

    def add_eq(self, e: Expr, rhs=0.0) -> None:
        """Hermitian matrix equality ``e == rhs`` (real and imaginary upper-triangle parts)."""
        r = e - rhs
        d = r.dim
        iu, ju = np.triu_indices(d)
        flat = iu * d + ju
        coef = r._padded(self.n).tocsr()[flat]
        const = r.const.ravel()[flat]
        re = coef.real.toarray()
        self.eq_rows.extend(re)
        self.eq_rhs.extend(-const.real)
        off = iu != ju
        if np.any(off):
            im = coef[np.nonzero(off)[0]].imag.toarray()
            self.eq_rows.extend(im)
            self.eq_rhs.extend(-const.imag[off])

    def add_linear_eq(self, e: Expr, rhs: float = 0.0) -> None:
        """Real scalar equality ``Re e == rhs``."""
        if e.dim != 1:
            raise DimensionMismatch("add_linear_eq expects a scalar expression")
        self.eq_rows.append(e._padded(self.n).toarray().real.ravel())
        self.eq_rhs.append(float(rhs - e.const[0, 0].real))

    def minimize(self, e: Expr) -> None:
        if e.dim != 1:
            raise DimensionMismatch("objective must be a scalar expression")
        self._objective = e
        self._sense = 1.0

    def maximize(self, e: Expr) -> None:
        self.minimize(-e)
        self._sense = -1.0

    def compile(self) -> ConicProgram:
        n = max(self.n, 1)
        obj = self._objective if self._objective is not None else Expr.constant(0.0)
        c = obj._padded(n).toarray().real.ravel()
        blocks = [HermitianAffine(b.dim, b.const, b._padded(n).tocsc()) for b in self.blocks]
        if self.eq_rows:
            a = np.array([np.pad(r, (0, n - r.size)) for r in self.eq_rows])
            rhs = np.array(self.eq_rhs, dtype=float)
        else:
            a, rhs = np.zeros((0, n)), np.zeros(0)
        return ConicProgram(c, blocks, a, rhs, offset=float(obj.const[0, 0].real))

    def solve(self, options: Optional[SolverOptions] = None, require_optimal: bool = True) -> SolveResult:
        """Compile and solve; raises :class:`SolverFailure` unless optimal (when required)."""
        prog = self.compile()
        res = solve(prog, options or SolverOptions.from_env())
        if getattr(self, "_sense", 1.0) < 0:  # report in the sense the user asked for
            res = replace(res, objective_value=-res.objective_value, dual_objective=-res.dual_objective)
        self.result = res
        if require_optimal and res.status != "Optimal":
            cls = InfeasibleProgram if res.status == "Infeasible" else SolverFailure
            raise cls(f"conic solve ended with status {res.status}", res)
        return res

    def value(self, e: Expr) -> np.ndarray:
        if self.result is None:
            raise RuntimeError("model has not been solved")
        return e.value(self.result.variable_values)
