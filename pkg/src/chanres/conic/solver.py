"""Primal-dual interior-point method for small dense semidefinite programs.

The program is lowered to the real standard form

    minimize    c.x
    subject to  G x + s = h,   A x = b,   s in K,

where ``K`` is a product of a nonnegative orthant (all 1x1 blocks) and real
symmetric PSD cones (``G_i = -F_i``, ``h = F_0``).  Complex Hermitian blocks are
replaced by their real embedding first.  The method follows the homogeneous
self-dual embedding with Nesterov-Todd scaling and a Mehrotra
predictor-corrector, so infeasibility and unboundedness are detected from
certificates rather than from iteration failure.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from ._kernels import BlockPattern, schur_block
from .program import ConicProgram, HermitianAffine, SolveResult

TOL_ENV = "CHANRES_SOLVER_TOL"



@dataclass
class SolverOptions:
    """Stopping rules.  ``gap_tol`` is relative, ``feas_tol`` is normalised by the data norms."""

    gap_tol: float = 1e-8
    feas_tol: float = 1e-8
    max_iters: int = 200
    step_fraction: float = 0.99
    verbose: bool = False

    @classmethod
    def from_env(cls, **overrides) -> "SolverOptions":
        opts = cls(**overrides)
        raw = os.environ.get(TOL_ENV)
        if raw:
            tol = float(raw)
            if not (tol > 0):
                raise ValueError(f"{TOL_ENV} must be a positive number")
            opts.gap_tol = opts.feas_tol = tol
        return opts


# ---------------------------------------------------------------------------
# lowering
# ---------------------------------------------------------------------------


def _lower_block(block: HermitianAffine, n: int):
    """Real symmetric data ``(dim, F0, F)`` of one block, embedding if complex."""
    d = block.dim
    coef = block.coef.tocoo()
    if coef.shape[1] < n:
        coef = sp.coo_matrix((coef.data, (coef.row, coef.col)), shape=(d * d, n))
    if block.is_real:
        f = sp.csc_matrix((coef.data.real, (coef.row, coef.col)), shape=(d * d, n))
        return d, block.const.real.copy(), f
    dd = 2 * d
    r, c = np.divmod(coef.row, d)
    re, im = coef.data.real, coef.data.imag
    rows = np.concatenate([r * dd + c, (r + d) * dd + c + d, r * dd + c + d, (r + d) * dd + c])
    vals = np.concatenate([re, re, -im, im])
    cols = np.tile(coef.col, 4)
    keep = vals != 0
    f = sp.csc_matrix((vals[keep], (rows[keep], cols[keep])), shape=(dd * dd, n))
    f.sum_duplicates()
    h = block.const
    f0 = np.block([[h.real, -h.imag], [h.imag, h.real]])
    return dd, f0, f


class _Cone:
    """Layout of the flat slack/dual vectors: ``l`` orthant entries, then flattened blocks."""

    def __init__(self, l: int, dims: List[int]):
        self.l = l
        self.dims = list(dims)
        self.offsets = []
        off = l
        for d in self.dims:
            self.offsets.append(off)
            off += d * d
        self.size = off
        self.degree = l + sum(self.dims)

    def blocks(self, v):
        return [v[o:o + d * d].reshape(d, d) for o, d in zip(self.offsets, self.dims)]

    def unit(self) -> np.ndarray:
        e = np.zeros(self.size)
        e[: self.l] = 1.0
        for blk in self.blocks(e):
            np.fill_diagonal(blk, 1.0)
        return e

    def min_eig(self, v) -> float:
        vals = [np.min(v[: self.l])] if self.l else []
        vals += [np.linalg.eigvalsh(b)[0] for b in self.blocks(v)]
        return float(min(vals)) if vals else 0.0


class _Scaling:
    """Nesterov-Todd scaling of a strictly interior pair ``(s, z)``."""

    def __init__(self, cone: _Cone):
        self.cone = cone
        self.d = np.ones(cone.l)
        self.lam_l = np.ones(cone.l)
        self.R = [np.eye(k) for k in cone.dims]
        self.Rti = [np.eye(k) for k in cone.dims]
        self.lam = [np.ones(k) for k in cone.dims]
        self._products()

    def _products(self):
        self.T = [r @ r.T for r in self.R]
        self.Tinv = [r @ r.T for r in self.Rti]

    @staticmethod
    def _nt(s, z):
        ls = np.linalg.cholesky(s)
        lz = np.linalg.cholesky(z)
        u, lam, vt = np.linalg.svd(lz.T @ ls)
        isq = 1.0 / np.sqrt(lam)
        return ls @ vt.T * isq, lz @ u * isq, lam

    @classmethod
    def from_pair(cls, cone: _Cone, s, z) -> "_Scaling":
        w = cls(cone)
        l = cone.l
        w.d = np.sqrt(s[:l] / z[:l])
        w.lam_l = np.sqrt(s[:l] * z[:l])
        for k, (sb, zb) in enumerate(zip(cone.blocks(s), cone.blocks(z))):
            w.R[k], w.Rti[k], w.lam[k] = cls._nt(sb, zb)
        w._products()
        return w

    def update(self, ds_t, dz_t, alpha):
        """Move to ``(lam + alpha ds~, lam + alpha dz~)`` in scaled space and re-scale."""
        c = self.cone
        l = c.l
        sl = self.lam_l + alpha * ds_t[:l]
        zl = self.lam_l + alpha * dz_t[:l]
        s_new = self.d * sl
        z_new = zl / self.d
        self.d = np.sqrt(s_new / z_new)
        self.lam_l = np.sqrt(s_new * z_new)
        for k, (a, b) in enumerate(zip(c.blocks(ds_t), c.blocks(dz_t))):
            lam = self.lam[k]
            sb = np.diag(lam) + alpha * a
            zb = np.diag(lam) + alpha * b
            r, rti, lam_new = self._nt(0.5 * (sb + sb.T), 0.5 * (zb + zb.T))
            self.R[k] = self.R[k] @ r
            self.Rti[k] = self.Rti[k] @ rti
            self.lam[k] = lam_new
        self._products()

    # scaled-space helpers; lambda is diagonal in every block
    def lam_vec(self) -> np.ndarray:
        v = np.zeros(self.cone.size)
        v[: self.cone.l] = self.lam_l
        for blk, lam in zip(self.cone.blocks(v), self.lam):
            np.fill_diagonal(blk, lam)
        return v

    def s(self):
        v = np.zeros(self.cone.size)
        v[: self.cone.l] = self.d * self.lam_l
        for blk, r, lam in zip(self.cone.blocks(v), self.R, self.lam):
            blk[:] = (r * lam) @ r.T
        return v

    def z(self):
        v = np.zeros(self.cone.size)
        v[: self.cone.l] = self.lam_l / self.d
        for blk, r, lam in zip(self.cone.blocks(v), self.Rti, self.lam):
            blk[:] = (r * lam) @ r.T
        return v

    def _map(self, x, lp, mats):
        out = np.empty_like(x)
        out[: self.cone.l] = lp(x[: self.cone.l])
        for o, blk, f in zip(self.cone.offsets, self.cone.blocks(x), mats):
            k = blk.shape[0]
            out[o:o + k * k] = f(blk).ravel()
        return out

    def w(self, x):  # Rti^T X Rti = R^{-1} X R^{-T}
        return self._map(x, lambda v: v / self.d, [lambda b, r=r: r.T @ b @ r for r in self.Rti])

    def wt(self, x):  # Rti X Rti^T, so that w_inv_t(wt(x)) = x
        return self._map(x, lambda v: v / self.d, [lambda b, r=r: r @ b @ r.T for r in self.Rti])

    def w_inv(self, x):  # R X R^T
        return self._map(x, lambda v: self.d * v, [lambda b, r=r: r @ b @ r.T for r in self.R])

    def w_inv_t(self, x):  # R^T X R
        return self._map(x, lambda v: self.d * v, [lambda b, r=r: r.T @ b @ r for r in self.R])

    def q(self, x):  # W^{-1} W^{-T}
        return self._map(x, lambda v: self.d ** 2 * v, [lambda b, t=t: t @ b @ t for t in self.T])

    def q_inv(self, x):
        return self._map(x, lambda v: v / self.d ** 2, [lambda b, t=t: t @ b @ t for t in self.Tinv])

    def lam_div(self, x):
        """Solve ``lam o u = x`` for ``u`` (Jordan product)."""
        out = np.empty_like(x)
        l = self.cone.l
        out[:l] = x[:l] / self.lam_l
        for o, blk, lam in zip(self.cone.offsets, self.cone.blocks(x), self.lam):
            k = lam.size
            out[o:o + k * k] = (2.0 * blk / (lam[:, None] + lam[None, :])).ravel()
        return out

    def max_step(self, dv) -> float:
        """Largest alpha with ``lam + alpha dv`` in the cone (``inf`` if unbounded)."""
        best = math.inf
        l = self.cone.l
        if l:
            neg = dv[:l] < 0
            if np.any(neg):
                best = min(best, float(np.min(-self.lam_l[neg] / dv[:l][neg])))
        for blk, lam in zip(self.cone.blocks(dv), self.lam):
            isq = 1.0 / np.sqrt(lam)
            e = np.linalg.eigvalsh((blk * isq[:, None]) * isq[None, :])[0]
            if e < 0:
                best = min(best, -1.0 / e)
        return best


def _jordan(cone: _Cone, u, v):
    out = np.empty_like(u)
    l = cone.l
    out[:l] = u[:l] * v[:l]
    for o, a, b in zip(cone.offsets, cone.blocks(u), cone.blocks(v)):
        k = a.shape[0]
        p = a @ b
        out[o:o + k * k] = (0.5 * (p + p.T)).ravel()
    return out


# ---------------------------------------------------------------------------
# KKT system
# ---------------------------------------------------------------------------


class _KKT:
    """Solves ``[0 A' G'; A 0 0; G 0 -Q] (ux, uy, uz) = (px, py, pz)`` for the current scaling."""

    def __init__(self, data: "_Standard", scaling: _Scaling):
        self.data = data
        self.w = scaling
        a = data.a
        n = data.n
        m = np.zeros((n, n))
        if data.cone.l:
            gl = data.g_lp
            m += (gl.T.multiply(1.0 / scaling.d ** 2)) @ gl
        for pat, tinv in zip(data.patterns, scaling.Tinv):
            schur_block(pat, tinv, m)
        m = 0.5 * (m + m.T)
        self.h_fac = self._chol(m + a.T @ a)
        if a.shape[0]:
            hia = sla.cho_solve(self.h_fac, a.T)
            self.s_fac = self._chol(a @ hia)
        else:
            self.s_fac = None

    @staticmethod
    def _chol(h):
        scale = max(1.0, float(np.max(np.abs(np.diag(h))))) if h.size else 1.0
        reg = 0.0
        for _ in range(6):
            try:
                return sla.cho_factor(h + reg * np.eye(h.shape[0]), lower=True, check_finite=False)
            except np.linalg.LinAlgError:
                reg = scale * (1e-14 if reg == 0.0 else reg / scale * 100.0)
        raise np.linalg.LinAlgError("KKT matrix is not positive definite")

    def _solve_once(self, px, py, pz):
        d = self.data
        rhs1 = px + d.gt(self.w.q_inv(pz))
        t = rhs1 + d.a.T @ py
        if self.s_fac is not None:
            uy = sla.cho_solve(self.s_fac, d.a @ sla.cho_solve(self.h_fac, t) - py)
            ux = sla.cho_solve(self.h_fac, t - d.a.T @ uy)
        else:
            uy = np.zeros(0)
            ux = sla.cho_solve(self.h_fac, t)
        # scaled dual direction first: forming q_inv and rescaling would square
        # the conditioning of the scaling matrices
        uz_t = self.w.w(d.g(ux) - pz)
        return ux, uy, self.w.wt(uz_t), uz_t

    def _residual(self, px, py, pz, ux, uy, uz):
        d = self.data
        rx = px - (d.a.T @ uy + d.gt(uz))
        ry = py - d.a @ ux
        rz = pz - (d.g(ux) - self.w.q(uz))
        return rx, ry, rz, max(np.linalg.norm(rx), np.linalg.norm(ry), np.linalg.norm(rz))

    def solve(self, px, py, pz, refine: int = 3):
        """Solve with iterative refinement, stopping once the residual stops shrinking."""
        ux, uy, uz, uz_t = self._solve_once(px, py, pz)
        scale = max(1.0, np.linalg.norm(px), np.linalg.norm(py), np.linalg.norm(pz))
        rx, ry, rz, err = self._residual(px, py, pz, ux, uy, uz)
        for _ in range(refine):
            if err <= 1e-14 * scale:
                break
            ex, ey, ez, ez_t = self._solve_once(rx, ry, rz)
            cand = (ux + ex, uy + ey, uz + ez, uz_t + ez_t)
            nrx, nry, nrz, nerr = self._residual(px, py, pz, *cand[:3])
            if nerr >= err:
                break
            (ux, uy, uz, uz_t), (rx, ry, rz, err) = cand, (nrx, nry, nrz, nerr)
        self.last_error = err / scale
        return ux, uy, uz, uz_t


# ---------------------------------------------------------------------------
# standard form + presolve
# ---------------------------------------------------------------------------


class _Standard:
    def __init__(self, c, a, b, g_lp, h_lp, g_blocks, h_blocks):
        self.c = c
        self.a = a
        self.b = b
        self.n = c.size
        self.g_lp = sp.csr_matrix(g_lp)
        dims = [hb.shape[0] for hb in h_blocks]
        self.cone = _Cone(g_lp.shape[0], dims)
        self.g_blocks = [sp.csc_matrix(gb) for gb in g_blocks]
        self.g_all = sp.vstack([self.g_lp] + self.g_blocks, format="csr") if (dims or g_lp.shape[0]) \
            else sp.csr_matrix((0, self.n))
        self.g_all_t = self.g_all.T.tocsr()
        self.h = np.concatenate([h_lp] + [hb.ravel() for hb in h_blocks])
        self.patterns = []
        for d, gb in zip(dims, self.g_blocks):
            gb.sort_indices()
            rows, cols = np.divmod(gb.indices, d)
            self.patterns.append(BlockPattern(d, gb.indptr, rows, cols, gb.data))

    def g(self, x):
        return self.g_all @ x

    def gt(self, z):
        return self.g_all_t @ z


def _presolve(c, a, b, g_all, tol=1e-12):
    """Drop unconstrained variables and redundant equalities.

    Returns ``(keep_cols, keep_rows, status)`` where status is ``None`` or a
    terminal status string.
    """
    n = c.size
    gnz = np.asarray(abs(g_all).sum(axis=0)).ravel() if g_all.shape[0] else np.zeros(n)
    anz = np.abs(a).sum(axis=0) if a.size else np.zeros(n)
    free = (gnz == 0) & (anz == 0)
    keep_cols = np.nonzero(~free)[0]
    if a.shape[0] == 0:
        return keep_cols, np.zeros(0, dtype=int), None
    ak = a[:, keep_cols]
    _, r, piv = sla.qr(ak.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r)) if r.size else np.zeros(0)
    rank = int(np.sum(diag > tol * max(1.0, diag[0] if diag.size else 0.0)))
    rows = np.sort(piv[:rank])
    # consistency of dropped equalities
    if rank < a.shape[0]:
        sol, *_ = np.linalg.lstsq(ak[rows], b[rows], rcond=None)
        resid = ak @ sol - b
        if np.max(np.abs(resid)) > 1e-9 * max(1.0, np.max(np.abs(b))):
            return keep_cols, rows, "Infeasible"
    return keep_cols, rows, None


# ---------------------------------------------------------------------------
# main entry point
# ---------------------------------------------------------------------------


def solve(program: ConicProgram, options: Optional[SolverOptions] = None) -> SolveResult:
    """Solve ``program``; never raises on infeasibility, the status says what happened."""
    opts = options or SolverOptions()
    program.validate()
    n = program.n_vars
    lowered = [_lower_block(b, n) for b in program.blocks]
    lp_rows, lp_h = [], []
    g_blocks, h_blocks = [], []
    for d, f0, f in lowered:
        if d == 1:
            lp_rows.append(-f)
            lp_h.append(f0.ravel())
        else:
            g_blocks.append(-f)
            h_blocks.append(f0)
    g_lp = sp.vstack(lp_rows, format="csr") if lp_rows else sp.csr_matrix((0, n))
    h_lp = np.concatenate(lp_h) if lp_h else np.zeros(0)
    c = program.objective.copy()
    a = program.eq_matrix
    b = program.eq_rhs
    g_all = sp.vstack([g_lp] + g_blocks, format="csc") if (lp_rows or g_blocks) else sp.csc_matrix((0, n))

    keep, rows, status = _presolve(c, a, b, g_all)
    x_full = np.zeros(n)
    if status is not None:
        return SolveResult(status, math.nan, x_full, math.inf, math.inf, 0)
    # a variable that appears nowhere but in the objective makes a feasible program unbounded
    loose = np.ones(n, dtype=bool)
    loose[keep] = False
    unbounded_if_feasible = bool(np.any(np.abs(c[loose]) > 0))
    if keep.size == 0:
        res = _trivial(program, x_full, a, b, lowered)
        if res.status == "Optimal" and unbounded_if_feasible:
            res = SolveResult("Unbounded", math.nan, x_full, math.inf, math.inf, 0)
        return res

    data = _Standard(
        c[keep], a[np.ix_(rows, keep)] if rows.size else np.zeros((0, keep.size)), b[rows],
        g_lp[:, keep], h_lp, [gb[:, keep] for gb in g_blocks], h_blocks,
    )
    res = _hsd(data, opts)
    x_full[keep] = res.variable_values
    res.variable_values = x_full
    if res.status == "Optimal" and unbounded_if_feasible:
        return SolveResult("Unbounded", math.nan, x_full, math.inf, math.inf, res.iterations)
    if res.status == "Optimal" or not math.isnan(res.objective_value):
        res.objective_value = program.objective_value(x_full)
    return res


def _trivial(program, x, a, b, lowered) -> SolveResult:
    """No free variables left: feasibility is a direct check on the constants."""
    ok = all(np.linalg.eigvalsh(f0)[0] >= -1e-9 for _, f0, _ in lowered)
    ok = ok and (b.size == 0 or np.max(np.abs(b)) <= 1e-9)
    if ok:
        return SolveResult("Optimal", program.objective_value(x), x, 0.0, 0.0, 0)
    return SolveResult("Infeasible", math.nan, x, math.inf, math.inf, 0)


def _hsd(data: _Standard, opts: SolverOptions) -> SolveResult:
    cone = data.cone
    c, a, b, h = data.c, data.a, data.b, data.h
    e = cone.unit()
    nrm_c = max(1.0, float(np.linalg.norm(c)))
    nrm_b = max(1.0, float(np.linalg.norm(b))) if b.size else 1.0
    nrm_h = max(1.0, float(np.linalg.norm(h)))

    # ---- initial point (identity scaling)
    w = _Scaling(cone)
    try:
        kkt = _KKT(data, w)
    except np.linalg.LinAlgError:
        return SolveResult("NumericalTrouble", math.nan, np.zeros(data.n), math.inf, math.inf, 0)
    x, _, zz, _ = kkt.solve(np.zeros(data.n), b, h)
    s = -zz
    _, y, z, _ = kkt.solve(-c, np.zeros(b.size), np.zeros(cone.size))
    for v in (s, z):
        mn = cone.min_eig(v)
        if mn <= 0:
            v += (1.0 + (-mn if mn < 0 else 0.0)) * e
    tau = kappa = 1.0
    w = _Scaling.from_pair(cone, s, z)

    best = None
    status = "MaxIterations"
    it = 0
    for it in range(opts.max_iters + 1):
        s, z = w.s(), w.z()
        rx = a.T @ y + data.gt(z) + c * tau
        ry = a @ x - b * tau
        rz = data.g(x) + s - h * tau
        cx, by_, hz = float(c @ x), float(b @ y), float(h @ z)
        rt = kappa + cx + by_ + hz
        gap = float(s @ z)
        mu = (gap + tau * kappa) / (cone.degree + 1)

        pcost = cx / tau
        dcost = -(by_ + hz) / tau
        pres = max(np.linalg.norm(ry) / nrm_b, np.linalg.norm(rz) / nrm_h) / tau
        dres = np.linalg.norm(rx) / nrm_c / tau
        rel_gap = gap / tau ** 2 / max(1.0, abs(pcost))
        if opts.verbose:
            print(f"{it:3d} pcost={pcost:+.8e} dcost={dcost:+.8e} gap={rel_gap:.2e} "
                  f"pres={pres:.2e} dres={dres:.2e} tau={tau:.2e} kappa={kappa:.2e}")
        cand = (max(pres, dres, rel_gap), x / tau, gap / tau ** 2, max(pres, dres), rel_gap, pcost, dcost)
        if best is None or cand[0] < best[0]:
            best = cand
        if pres <= opts.feas_tol and dres <= opts.feas_tol and rel_gap <= opts.gap_tol:
            status = "Optimal"
            break
        # infeasibility certificates
        if by_ + hz < 0:
            pinf = np.linalg.norm(a.T @ y + data.gt(z)) / nrm_c / (-(by_ + hz))
            if pinf <= opts.feas_tol:
                status = "Infeasible"
                break
        if cx < 0:
            dinf = max(np.linalg.norm(a @ x) / nrm_b, np.linalg.norm(data.g(x) + s) / nrm_h) / (-cx)
            if dinf <= opts.feas_tol:
                status = "Unbounded"
                break
        if it == opts.max_iters:
            break

        # ---- Newton system
        try:
            kkt = _KKT(data, w)
            u2 = kkt.solve(-c, b, h)
        except np.linalg.LinAlgError:
            status = "NumericalTrouble"
            break
        lam = w.lam_vec()

        def direction(eta, rs, rk):
            bx = -eta * rx
            by = -eta * ry
            lds = w.lam_div(rs)
            bz = -eta * rz - w.w_inv(lds)
            bt = -eta * rt - rk / tau
            u1 = kkt.solve(bx, by, bz)
            num = bt - (c @ u1[0] + b @ u1[1] + h @ u1[2])
            den = c @ u2[0] + b @ u2[1] + h @ u2[2] - kappa / tau
            dtau = num / den
            dx = u1[0] + dtau * u2[0]
            dy = u1[1] + dtau * u2[1]
            dkap = (rk - kappa * dtau) / tau
            dz_t = u1[3] + dtau * u2[3]
            # slack direction from the primal equation keeps rz exactly on its linear path
            ds = -eta * rz - data.g(dx) + h * dtau
            ds_t = w.w(ds)
            return dx, dy, dtau, dkap, ds_t, dz_t

        def step_len(dtau, dkap, ds_t, dz_t):
            amax = min(w.max_step(ds_t), w.max_step(dz_t))
            if dtau < 0:
                amax = min(amax, -tau / dtau)
            if dkap < 0:
                amax = min(amax, -kappa / dkap)
            return amax

        try:
            aff = direction(1.0, -_jordan(cone, lam, lam), -tau * kappa)
            alpha_a = min(1.0, step_len(*aff[2:]))
            sigma = (1.0 - alpha_a) ** 3
            rs = -_jordan(cone, lam, lam) - _jordan(cone, aff[4], aff[5]) + sigma * mu * e
            rk = -tau * kappa - aff[2] * aff[3] + sigma * mu
            dx, dy, dtau, dkap, ds_t, dz_t = direction(1.0 - sigma, rs, rk)
            alpha = min(1.0, opts.step_fraction * step_len(dtau, dkap, ds_t, dz_t))
        except np.linalg.LinAlgError:
            status = "NumericalTrouble"
            break
        if not np.isfinite(alpha) or alpha < 1e-12:
            status = "NumericalTrouble"
            break
        x = x + alpha * dx
        y = y + alpha * dy
        tau = tau + alpha * dtau
        kappa = kappa + alpha * dkap
        try:
            w.update(ds_t, dz_t, alpha)
        except np.linalg.LinAlgError:
            status = "NumericalTrouble"
            break

    if status in ("NumericalTrouble", "MaxIterations") and best is not None and best[0] <= 1e-7:
        status = "Optimal"
        _, xs, _, mres, rgap, pcost, dcost = best
        return SolveResult(status, pcost, xs, rgap, mres, it, dcost)
    if status == "Optimal":
        return SolveResult(status, pcost, x / tau, rel_gap, max(pres, dres), it, dcost,
                           [zb / tau for zb in cone.blocks(z)])
    if status in ("Infeasible", "Unbounded"):
        return SolveResult(status, math.nan, x / tau, math.inf, math.inf, it)
    return SolveResult(status, math.nan, best[1] if best else x / tau, math.inf,
                       best[3] if best else math.inf, it)
