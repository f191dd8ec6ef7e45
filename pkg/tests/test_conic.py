import io

import numpy as np
import pytest

from chanres import _accel
from chanres.conic import Model, SolverOptions, dump_program
from chanres.conic._kernels import BlockPattern, schur_block_numba, schur_block_numpy
from chanres.errors import InfeasibleProgram, SolverFailure
from chanres.linalg import random_unitary


def _herm(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (a + a.conj().T) / 2


def _lambda_max(a):
    m = Model()
    t = m.scalar()
    m.add_psd(t * np.eye(a.shape[0]) - a)
    m.minimize(t)
    res = m.solve()
    return res


def test_largest_eigenvalue_matches_eigensolver(rng):
    for d in (2, 3, 5):
        a = _herm(rng, d)
        res = _lambda_max(a)
        assert res.status == "Optimal"
        assert abs(res.objective_value - np.linalg.eigvalsh(a)[-1]) < 1e-7


def test_positive_part_trace(rng):
    a = _herm(rng, 4)
    m = Model()
    y = m.hermitian(4)
    m.add_psd(y)
    m.add_psd(y - a)
    m.minimize(y.trace())
    res = m.solve()
    w = np.linalg.eigvalsh(a)
    assert abs(res.objective_value - w[w > 0].sum()) < 1e-7
    assert res.duality_gap <= 1e-7 and res.max_residual <= 1e-7


def test_equality_constraints_and_partial_trace(rng):
    # max <A, X> over density matrices on C^2 (x) C^2 with Tr_1 X = I/2
    a = _herm(rng, 4)
    m = Model()
    x = m.hermitian(4)
    m.add_psd(x)
    m.add_eq(x.ptrace([2, 2], [1]), np.eye(2) / 2)
    m.maximize(x.trace_with(a))
    res = m.solve()
    xv = m.value(x)
    assert np.allclose(np.trace(xv.reshape(2, 2, 2, 2), axis1=0, axis2=2), np.eye(2) / 2, atol=1e-7)
    assert np.linalg.eigvalsh(xv).min() > -1e-7
    assert abs(np.trace(xv @ a).real - res.objective_value) < 1e-6


def test_infeasible_program_raises():
    m = Model()
    x = m.hermitian(2)
    m.add_psd(x)
    m.add_linear_eq(x.trace(), -1.0)
    m.minimize(x.trace())
    with pytest.raises(InfeasibleProgram):
        m.solve()
    assert m.solve(require_optimal=False).status == "Infeasible"


def test_unbounded_program_reported():
    m = Model()
    x = m.hermitian(2)
    m.add_psd(x)
    m.maximize(x.trace())
    res = m.solve(require_optimal=False)
    assert res.status == "Unbounded"
    with pytest.raises(SolverFailure):
        m.solve()


def test_solver_tolerance_env_override(monkeypatch):
    monkeypatch.setenv("CHANRES_SOLVER_TOL", "1e-5")
    opts = SolverOptions.from_env()
    assert opts.gap_tol == 1e-5 and opts.feas_tol == 1e-5
    monkeypatch.setenv("CHANRES_SOLVER_TOL", "-1")
    with pytest.raises(ValueError):
        SolverOptions.from_env()


def test_dump_program_is_text(rng):
    m = Model()
    t = m.scalar()
    m.add_psd(t * np.eye(2) - _herm(rng, 2))
    m.minimize(t)
    buf = io.StringIO()
    dump_program(m.compile(), buf)
    assert buf.getvalue()


def _random_pattern(rng, dim, nvars):
    indptr, rows, cols, vals = [0], [], [], []
    for i in range(nvars):
        k = 12 if i % 5 == 0 else rng.integers(0, 4)  # mix of heavy, light and empty columns
        for _ in range(k):
            p, q = rng.integers(0, dim, size=2)
            v = rng.standard_normal()
            rows += [p, q]
            cols += [q, p]
            vals += [v, v]
        indptr.append(len(vals))
    return BlockPattern(dim, indptr, rows, cols, vals)


@pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")
def test_schur_kernel_backends_agree(rng):
    pat = _random_pattern(rng, 7, 30)
    a = rng.standard_normal((7, 7))
    t = a @ a.T + np.eye(7)
    m1 = np.zeros((30, 30))
    m2 = np.zeros((30, 30))
    schur_block_numba(pat, t, m1)
    schur_block_numpy(pat, t, m2)
    # compare the lower triangle (the solver symmetrises afterwards)
    assert np.allclose(np.tril(m1 + m1.T), np.tril(m2 + m2.T), atol=1e-10)


@pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")
def test_full_solve_backend_equivalence(rng):
    u = random_unitary(3, rng)
    a = u @ np.diag([0.3, -1.0, 2.0]) @ u.conj().T
    prev = _accel.set_backend("numpy")
    try:
        v_numpy = _lambda_max(a).objective_value
        _accel.set_backend("numba")
        v_numba = _lambda_max(a).objective_value
    finally:
        _accel.set_backend(prev)
    assert abs(v_numpy - v_numba) < 1e-9
    assert abs(v_numba - 2.0) < 1e-7


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        _accel.set_backend("cuda")
