"""Resource measures of channels.

* max-relative entropy between channels (exact, from the Choi matrices) and
  its diamond-ball smoothing (SDP);
* robustness / log-robustness with respect to a free cone, optionally smoothed
  (one joint SDP);
* the channel max-information ``I_max``;
* heuristic lower bounds on the channel relative entropy and on increasing /
  generating powers (multi-start gradient ascent, never certified);
* the MIO one-shot cost bracket and the cq-channel asymptotic cost;
* an empirical monotonicity suite for the log-robustness.

Values are in bits.  ``math.inf`` marks support violations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from .channel import (
    Channel,
    Cq,
    adjoint_apply,
    apply,
    channel_from_choi,
    compose,
    cq_states,
    identity,
    mix,
    random_channel,
    tensor,
)
from .conic import Model, SolveResult, SolverOptions
from .errors import (
    DimensionMismatch,
    InfeasibleProgram,
    InvalidInput,
    SolverFailure,
    UnsupportedMonotone,
)
from .freesets import FreeSetSpec, compile as compile_cone, is_free, sample_free
from .linalg import hermitian_part, psd_sqrt
from .norms import _is_real, spec_is_real
from .states import (
    coherence_rel_ent,
    free_energy,
    relative_entropy,
    state_dmax,
)

LN2 = math.log(2.0)
CEIL_TOL = 1e-9


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not (0.0 <= eps <= 1.0):
        raise InvalidInput("epsilon must lie in [0, 1]")
    return eps


def _same(n: Channel, m: Channel) -> None:
    if (n.dim_in, n.dim_out) != (m.dim_in, m.dim_out):
        raise DimensionMismatch("channels differ in dimensions")


# ---------------------------------------------------------------------------
# D_max between channels
# ---------------------------------------------------------------------------


def channel_dmax(n: Channel, m: Channel, method: str = "eig",
                 options: Optional[SolverOptions] = None) -> float:
    """``log2 min{lam : lam J_m - J_n >= 0}``; ``math.inf`` on a support violation.

    ``method="eig"`` (default) evaluates the max-relative entropy of the
    normalised Choi states by an eigensolve; ``method="sdp"`` solves the
    defining program instead (used as a cross-check).
    """
    _same(n, m)
    if method == "eig":
        return state_dmax(n.choi_state, m.choi_state)
    if method != "sdp":
        raise InvalidInput(f"unknown method {method!r}")
    jn, jm = np.asarray(n.choi), np.asarray(m.choi)
    mod = Model()
    lam = mod.scalar()
    mod.add_psd(lam * jm - jn)
    mod.minimize(lam)
    res = mod.solve(options, require_optimal=False)
    if res.status == "Infeasible":
        return math.inf
    if res.status != "Optimal":
        raise InfeasibleProgram(f"D_max SDP ended with status {res.status}", res) \
            if res.status == "Infeasible" else _failure(res)
    return math.log2(res.objective_value)


def _failure(res: SolveResult):
    from .errors import SolverFailure

    return SolverFailure(f"conic solve ended with status {res.status}", res)


def _diamond_ball(model: Model, jn_prime, jn, din: int, dout: int, eps: float, real: bool) -> None:
    """Constrain ``1/2 ||N' - N||_diamond <= eps`` (both TP)."""
    z = model.hermitian(din * dout, real=real)
    model.add_psd(z)
    model.add_psd(z - (jn_prime - jn))
    model.add_psd(eps * np.eye(din) - z.ptrace([din, dout], [0]))


@dataclass
class SmoothDmaxResult:
    value: float
    epsilon: float
    state_lower_bound: float
    smoothed: Optional[Channel]
    status: str = "Optimal"
    state_bound_status: str = "Optimal"

    def __float__(self) -> float:
        return float(self.value)


def _state_smooth_dmax(rho: np.ndarray, sigma: np.ndarray, eps: float, options=None) -> float:
    """``min log2 lam`` over states within trace distance ``eps`` of ``rho`` with ``rho' <= lam sigma``."""
    d = rho.shape[0]
    real = _is_real(rho, sigma)
    m = Model()
    r = m.hermitian(d, real=real)
    z = m.hermitian(d, real=real)
    lam = m.scalar()
    m.add_psd(r)
    m.add_linear_eq(r.trace(), 1.0)
    m.add_psd(z)
    m.add_psd(z - (r - rho))
    m.add_ineq(eps - z.trace())
    m.add_psd(lam * sigma - r)
    m.minimize(lam)
    res = m.solve(options, require_optimal=False)
    if res.status == "Infeasible":
        return math.inf
    if res.status != "Optimal":
        raise _failure(res)
    return math.log2(max(res.objective_value, 1e-300))


def channel_dmax_smooth(n: Channel, m: Channel, eps: float,
                        options: Optional[SolverOptions] = None) -> SmoothDmaxResult:
    """``D_max^eps(n || m)`` over the half-diamond ball, with diagnostics.

    ``state_lower_bound`` is the trace-distance-smoothed max-relative entropy
    of the outputs on the maximally entangled input, a lower bound on the
    channel quantity.  At ``eps = 0`` the ball degenerates to a point (the
    program then has no strictly feasible point), so the exact value is
    returned directly.
    """
    _same(n, m)
    eps = _check_eps(eps)
    din, dout = n.dim_in, n.dim_out
    # the state bound is only a diagnostic: if its program cannot be solved to
    # tolerance (it can be degenerate at the optimum) report NaN and its status
    # rather than failing the channel quantity
    try:
        lb, lb_status = _state_smooth_dmax(n.choi_state, m.choi_state, eps, options), "Optimal"
    except SolverFailure as exc:
        lb, lb_status = math.nan, exc.result.status
    if eps == 0.0:
        return SmoothDmaxResult(channel_dmax(n, m), eps, lb, n, state_bound_status=lb_status)
    jn, jm = np.asarray(n.choi), np.asarray(m.choi)
    real = _is_real(jn, jm)
    mod = Model()
    npr = mod.hermitian(din * dout, real=real)
    lam = mod.scalar()
    mod.add_psd(npr)
    mod.add_eq(npr.ptrace([din, dout], [0]), np.eye(din))
    _diamond_ball(mod, npr, jn, din, dout, eps, real)
    mod.add_psd(lam * jm - npr)
    mod.minimize(lam)
    res = mod.solve(options, require_optimal=False)
    if res.status == "Infeasible":
        return SmoothDmaxResult(math.inf, eps, lb, None, res.status, lb_status)
    if res.status != "Optimal":
        raise _failure(res)
    value = math.log2(max(res.objective_value, 1e-300))
    smoothed = channel_from_choi(mod.value(npr), din, dout, label="smoothed")
    return SmoothDmaxResult(value, eps, lb, smoothed, res.status, lb_status)


# ---------------------------------------------------------------------------
# robustness
# ---------------------------------------------------------------------------


@dataclass
class RobustnessResult:
    robustness: float
    log_robustness: float
    optimal_free: Optional[Channel]
    optimal_smoothed: Optional[Channel] = None
    epsilon: float = 0.0
    status: str = "Optimal"
    solve: Optional[SolveResult] = field(default=None, repr=False)

    @property
    def lam(self) -> float:
        return 1.0 + self.robustness


def robustness(n: Channel, spec: FreeSetSpec, eps: float = 0.0,
               options: Optional[SolverOptions] = None) -> RobustnessResult:
    """(Smooth) robustness and log-robustness of ``n`` with respect to ``spec``.

    Solves ``min lam`` over ``Y = lam J_M`` in the free cone with
    ``Tr_out Y = lam I`` and ``Y >= J_n`` (``J_n'`` for the smoothed version,
    with ``n'`` a channel within half-diamond distance ``eps``).
    """
    if (n.dim_in, n.dim_out) != (spec.dim_in, spec.dim_out):
        raise DimensionMismatch("channel and free set differ in dimensions")
    eps = _check_eps(eps)
    din, dout = n.dim_in, n.dim_out
    d = din * dout
    jn = np.asarray(n.choi)
    real = _is_real(jn) and spec_is_real(spec)
    mod = Model()
    y = mod.hermitian(d, real=real)
    lam = mod.scalar()
    compile_cone(spec, include_tp=True).apply(mod, y, scale=lam)
    target = jn
    npr = None
    if eps > 0:
        npr = mod.hermitian(d, real=real)
        mod.add_psd(npr)
        mod.add_eq(npr.ptrace([din, dout], [0]), np.eye(din))
        _diamond_ball(mod, npr, jn, din, dout, eps, real)
        target = npr
    mod.add_psd(y - target)
    mod.minimize(lam)
    res = mod.solve(options, require_optimal=False)
    if res.status == "Infeasible":
        raise InfeasibleProgram("no free channel dominates the channel (empty free cone?)", res)
    if res.status != "Optimal":
        raise _failure(res)
    lam_v = max(1.0, res.objective_value)
    free = channel_from_choi(mod.value(y) / lam_v, din, dout, label=f"optimal-{spec.kind}")
    smoothed = channel_from_choi(mod.value(npr), din, dout, label="smoothed") if npr is not None else None
    return RobustnessResult(lam_v - 1.0, math.log2(lam_v), free, smoothed, eps, res.status, res)


def log_robustness(n: Channel, spec: FreeSetSpec, eps: float = 0.0,
                   options: Optional[SolverOptions] = None) -> float:
    return robustness(n, spec, eps, options).log_robustness


def i_max(n: Channel, options: Optional[SolverOptions] = None) -> float:
    """Channel max-information ``min_sigma D_max(J/d_in || I/d_in (x) sigma)``.

    Solved as ``min tr S`` subject to ``I (x) S >= J`` (``S = lam sigma``),
    a formulation independent of the robustness program.
    """
    din, dout = n.dim_in, n.dim_out
    j = np.asarray(n.choi)
    mod = Model()
    s = mod.hermitian(dout, real=_is_real(j))
    mod.add_psd(s.kron_const_left(np.eye(din)) - j)
    mod.minimize(s.trace())
    res = mod.solve(options)
    return math.log2(res.objective_value)


def i_max_cross_check(n: Channel, options: Optional[SolverOptions] = None, tol: float = 1e-6):
    """``(i_max, LR_constant, agree)``: ``I_max`` against the Constant-cone log-robustness."""
    a = i_max(n, options)
    b = robustness(n, FreeSetSpec.constant(n.dim_in, n.dim_out), 0.0, options).log_robustness
    return a, b, abs(a - b) <= tol


# ---------------------------------------------------------------------------
# heuristic optimisation over states
# ---------------------------------------------------------------------------


def _log2_psd(rho: np.ndarray, floor: float = 1e-14) -> np.ndarray:
    w, v = np.linalg.eigh(hermitian_part(rho))
    return (v * np.log2(np.clip(w, floor, None))) @ v.conj().T


def _log_frechet_adjoint(sigma: np.ndarray, x: np.ndarray, floor: float = 1e-14) -> np.ndarray:
    """Adjoint of the Frechet derivative of ``log2`` at ``sigma`` applied to ``x``."""
    w, v = np.linalg.eigh(hermitian_part(sigma))
    w = np.clip(w, floor, None)
    lw = np.log2(w)
    dw = w[:, None] - w[None, :]
    same = np.abs(dw) <= 1e-12 * np.maximum(w[:, None], w[None, :])
    gam = np.where(same, 1.0 / (LN2 * np.maximum(w[:, None], w[None, :])),
                   (lw[:, None] - lw[None, :]) / np.where(same, 1.0, dw))
    return v @ (gam * (v.conj().T @ x @ v)) @ v.conj().T


def _ascend(value: Callable, grad: Callable, starts: Sequence[np.ndarray], max_iter: int,
            gtol: float, diagonal: bool = False):
    """Multi-start Armijo gradient ascent over ``K`` with ``rho(K) = K K^dagger / ||K||^2``.

    ``grad(rho)`` returns the Hermitian gradient ``G`` with ``df = tr(G drho)``.
    Returns ``(best_value, best_rho, best_index, values)``; ties resolve to the
    lowest start index.
    """
    best = (-math.inf, None, -1)
    values = []
    for idx, k in enumerate(starts):
        k = np.array(k, dtype=complex)
        if diagonal:
            k = np.diag(np.real(np.diag(k)))
        k /= np.linalg.norm(k)
        rho = k @ k.conj().T
        f = value(rho)
        step = 1.0
        for _ in range(max_iter):
            g = hermitian_part(grad(rho))
            g = g - np.real(np.trace(g @ rho)) * np.eye(g.shape[0])
            dk = 2.0 * g @ k
            if diagonal:
                dk = np.diag(np.real(np.diag(dk)))
            gn2 = float(np.real(np.vdot(dk, dk)))
            if math.sqrt(gn2) < gtol:
                break
            step = min(step * 2.0, 1e3)
            improved = False
            for _ls in range(50):
                kn = k + step * dk
                kn /= np.linalg.norm(kn)
                rn = kn @ kn.conj().T
                fn = value(rn)
                if fn >= f + 1e-4 * step * gn2:
                    improved = True
                    break
                step *= 0.5
            if not improved:
                break
            gain = fn - f
            k, rho, f = kn, rn, fn
            if gain < 1e-13 * max(1.0, abs(f)):
                break
        values.append(f)
        if f > best[0]:
            best = (f, hermitian_part(rho), idx)
    return best[0], best[1], best[2], values


def _random_starts(d: int, count: int, rng: np.random.Generator) -> List[np.ndarray]:
    return [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(count)]


@dataclass
class RelEntResult:
    value: float
    maximizing_input: Optional[np.ndarray]
    dmax_upper: float
    certified: bool = False

    def __float__(self) -> float:
        return float(self.value)

    @property
    def consistent(self) -> bool:
        """The lower bound does not exceed the max-relative entropy (``+1e-6``)."""
        return self.value <= self.dmax_upper + 1e-6


def _rel_ent_objective(n: Channel, m: Channel):
    """``f(K) = D((K(x)I) J_n (K(x)I)^dag || (K(x)I) J_m (K(x)I)^dag)`` and its gradient in ``K^*``."""
    din, dout = n.dim_in, n.dim_out
    jn, jm = np.asarray(n.choi), np.asarray(m.choi)
    eye_out = np.eye(dout)

    def outputs(k):
        kk = np.kron(k, eye_out)
        return kk @ jn @ kk.conj().T, kk @ jm @ kk.conj().T

    def f(k):
        a, b = outputs(k)
        return relative_entropy(a, b)

    def grad_k(k):
        a, b = outputs(k)
        ga = _log2_psd(a) - _log2_psd(b) + np.eye(a.shape[0]) / LN2  # d tr(A log A) = tr(dA (log A + 1/ln2))
        gb = -_log_frechet_adjoint(b, a)
        out = np.zeros(k.shape, dtype=complex)
        kk = np.kron(k, eye_out)
        for g, j in ((ga, jn), (gb, jm)):
            # d tr(G (K(x)I) J (K(x)I)^dag) / dK^* = Tr_out[G (K(x)I) J]
            x = (g @ kk @ j).reshape(din, dout, din, dout)
            out += 2.0 * np.trace(x, axis1=1, axis2=3)
        return out

    return f, grad_k


def channel_rel_ent(n: Channel, m: Channel, starts: int = 20, seed=0, max_iter: int = 300,
                    gtol: float = 1e-9) -> RelEntResult:
    """Heuristic lower bound on ``sup_psi D((n (x) id)psi || (m (x) id)psi)``.

    Pure inputs on ``A (x) A'`` with ``dim A' = d_in`` are parametrised as
    ``(K (x) I)|Omega>`` with ``||K||_F = 1``; the reported value is a valid
    lower bound (the maximally entangled input is always one of the starts).
    """
    _same(n, m)
    upper = channel_dmax(n, m)
    if math.isinf(upper):
        return RelEntResult(math.inf, np.eye(n.dim_in) / math.sqrt(n.dim_in), upper)
    din = n.dim_in
    f, grad_k = _rel_ent_objective(n, m)

    rng = np.random.default_rng(seed)
    ks = [np.eye(din) / math.sqrt(din)] + _random_starts(din, max(0, starts - 1), rng)
    best = (-math.inf, None)
    for k0 in ks:
        k = np.asarray(k0, dtype=complex) / np.linalg.norm(k0)
        val = f(k)
        step = 1.0
        for _ in range(max_iter):
            g = grad_k(k)
            g = g - np.real(np.vdot(k, g)) * k  # tangent to the unit sphere
            gn2 = float(np.real(np.vdot(g, g)))
            if math.sqrt(gn2) < gtol:
                break
            step = min(step * 2.0, 1e3)
            ok = False
            for _ls in range(50):
                kn = k + step * g
                kn /= np.linalg.norm(kn)
                vn = f(kn)
                if vn >= val + 1e-4 * step * gn2:
                    ok = True
                    break
                step *= 0.5
            if not ok:
                break
            gain = vn - val
            k, val = kn, vn
            if gain < 1e-13 * max(1.0, abs(val)):
                break
        if val > best[0]:
            best = (val, k)
    return RelEntResult(best[0], best[1], upper)


# ---------------------------------------------------------------------------
# state monotones and powers
# ---------------------------------------------------------------------------


class StateMonotone:
    """A resource monotone on states with an (optional) analytic gradient.

    Subclasses provide ``value(rho)``; ``gradient(rho)`` defaults to central
    finite differences along a Hermitian basis.  ``with_ancilla(d)`` returns
    the monotone acting on ``system (x) ancilla``; ``free_family(d)`` is either
    ``"diagonal"`` (optimise over diagonal states) or a list of free states.
    """

    name = "custom"

    def value(self, rho: np.ndarray) -> float:  # pragma: no cover - abstract
        raise NotImplementedError

    def gradient(self, rho: np.ndarray, h: float = 1e-6) -> np.ndarray:
        d = rho.shape[0]
        g = np.zeros((d, d), dtype=complex)
        for a in range(d):
            for b in range(a, d):
                for phase in ((1.0,) if a == b else (1.0, 1j)):
                    e = np.zeros((d, d), dtype=complex)
                    e[a, b] = phase
                    e[b, a] += np.conj(phase)
                    e = e if a != b else e / 2.0
                    dv = (self.value(rho + h * e) - self.value(rho - h * e)) / (2 * h)
                    # tr(G e) = dv for the Hermitian direction e
                    if a == b:
                        g[a, a] += dv
                    elif phase == 1.0:
                        g[a, b] += dv / 2.0
                        g[b, a] += dv / 2.0
                    else:
                        g[a, b] += 1j * dv / 2.0
                        g[b, a] -= 1j * dv / 2.0
        return g

    def with_ancilla(self, d_anc: int) -> "StateMonotone":
        return self

    def free_family(self, d: int):
        return "diagonal"


class CoherenceMonotone(StateMonotone):
    """Relative entropy of coherence in the computational basis."""

    name = "coherence"

    def value(self, rho):
        return coherence_rel_ent(rho)

    def gradient(self, rho, h: float = 0.0):
        diag = np.real(np.diag(rho))
        return _log2_psd(rho) - np.diag(np.log2(np.clip(diag, 1e-14, None)))


class FreeEnergyMonotone(StateMonotone):
    """``F(rho) - F(tau) = D(rho || tau) / beta`` with a non-interacting Hamiltonian.

    A system of dimension ``dim(h)**k`` carries ``sum_k h_k``; with an ancilla
    of dimension ``c`` the ancilla Hamiltonian is zero, so its thermal state
    is maximally mixed.
    """

    name = "free_energy"

    def __init__(self, hamiltonian, beta: float, ancilla: int = 1):
        self.h = np.asarray(hamiltonian, dtype=complex)
        self.beta = float(beta)
        self.ancilla = int(ancilla)
        self._spec = FreeSetSpec.gibbs(self.h, self.beta)

    def hamiltonian(self, d: int) -> np.ndarray:
        if d % self.ancilla:
            raise DimensionMismatch("state dimension is not a multiple of the ancilla dimension")
        hs = self._spec.local_hamiltonian(d // self.ancilla)
        return np.kron(hs, np.eye(self.ancilla))

    def thermal(self, d: int) -> np.ndarray:
        return np.kron(self._spec.gibbs_state(d // self.ancilla), np.eye(self.ancilla) / self.ancilla)

    def value(self, rho):
        d = rho.shape[0]
        h = self.hamiltonian(d)
        return free_energy(rho, h, self.beta) - free_energy(self.thermal(d), h, self.beta)

    def gradient(self, rho, h: float = 0.0):
        d = rho.shape[0]
        return self.hamiltonian(d) + (_log2_psd(rho) * LN2 + np.eye(d)) / self.beta

    def with_ancilla(self, d_anc: int) -> "StateMonotone":
        return FreeEnergyMonotone(self.h, self.beta, self.ancilla * int(d_anc))

    def free_family(self, d: int):
        return [self.thermal(d)]


class CallbackMonotone(StateMonotone):
    def __init__(self, fn: Callable[[np.ndarray], float], free_states: Optional[Callable] = None,
                 name: str = "custom"):
        self.fn = fn
        self.free_states = free_states
        self.name = name

    def value(self, rho):
        return float(self.fn(rho))

    def free_family(self, d: int):
        return "diagonal" if self.free_states is None else list(self.free_states(d))


def resolve_monotone(omega) -> StateMonotone:
    if isinstance(omega, StateMonotone):
        return omega
    if isinstance(omega, str):
        if omega.lower() in ("coherence", "c_r", "coherence_rel_ent"):
            return CoherenceMonotone()
        raise UnsupportedMonotone(f"unknown state monotone {omega!r}"
                                  " (free energy needs a hamiltonian and beta)")
    if isinstance(omega, tuple) and omega and omega[0] == "free_energy":
        return FreeEnergyMonotone(omega[1], omega[2])
    if callable(omega):
        return CallbackMonotone(omega)
    raise UnsupportedMonotone(f"cannot interpret {omega!r} as a state monotone")


@dataclass
class PowerResult:
    value: float
    maximizing_state: np.ndarray
    ancilla_dim_used: int
    certified: bool = False
    kind: str = "ip"
    complete: bool = False
    monotone: str = ""


def _power_problem(n: Channel, mono: StateMonotone, complete: bool, ancilla: Optional[int]):
    if complete:
        dc = n.dim_in if ancilla is None else int(ancilla)
        ch = tensor(n, identity(dc))
        mono = mono.with_ancilla(dc)
    else:
        dc = 1
        ch = n

    def value(rho):
        return mono.value(apply(ch, rho)) - mono.value(rho)

    def grad(rho):
        return adjoint_apply(ch, mono.gradient(apply(ch, rho))) - mono.gradient(rho)

    return ch, mono, dc, value, grad


def _at_least(val: float, rho: np.ndarray, other_val: float, other_rho: np.ndarray):
    """The better of two candidate maximisers (ties keep the first)."""
    return (other_val, other_rho) if other_val > val else (val, rho)


def generating_power(n: Channel, omega="coherence", complete: bool = False, ancilla: Optional[int] = None,
                     starts: int = 20, seed=0, max_iter: int = 300, gtol: float = 1e-9) -> PowerResult:
    """Heuristic ``Omega_gp`` (or ``Omega*_gp``): largest resource created from free states.

    The complete version always includes the plain maximiser padded with a
    maximally mixed (free) ancilla, so ``plain <= complete`` holds exactly.
    """
    mono = resolve_monotone(omega)
    ch, m2, dc, value, grad = _power_problem(n, mono, complete, ancilla)
    d = ch.dim_in
    fam = m2.free_family(d)
    plain = None
    if complete:
        plain = generating_power(n, mono, False, starts=starts, seed=seed, max_iter=max_iter, gtol=gtol)
    if fam == "diagonal":
        rng = np.random.default_rng(seed)
        st = []
        for i in range(d):  # basis states first
            k = np.full(d, 1e-3)
            k[i] = 1.0
            st.append(np.diag(k))
        st += [np.diag(rng.random(d)) for _ in range(max(0, starts - d))]
        if plain is not None:
            padded = np.kron(np.real(np.diag(plain.maximizing_state)), np.full(dc, 1.0 / dc))
            st.insert(0, np.diag(np.sqrt(padded)))
        val, rho, _, _ = _ascend(value, grad, st, max_iter, gtol, diagonal=True)
    else:
        vals = [value(r) for r in fam]
        i = int(np.argmax(vals))
        val, rho = vals[i], fam[i]
    if plain is not None:
        val, rho = _at_least(val, rho, plain.value, np.kron(plain.maximizing_state, np.eye(dc) / dc))
    return PowerResult(float(val), rho, dc, False, "gp", complete, m2.name)


def increasing_power(n: Channel, omega="coherence", complete: bool = False, ancilla: Optional[int] = None,
                     starts: int = 20, seed=0, max_iter: int = 300, gtol: float = 1e-9,
                     extra_starts: Sequence[np.ndarray] = ()) -> PowerResult:
    """Heuristic ``Omega_ip`` (or ``Omega*_ip``).

    The ascent is seeded with the generating-power maximiser, the
    maximally mixed state and, for the complete version, the plain
    maximiser padded with a maximally mixed ancilla.  Those candidates are
    also kept as fall-backs, so ``gp <= ip`` and ``plain <= complete`` hold
    exactly rather than up to round-off.
    """
    mono = resolve_monotone(omega)
    gp = generating_power(n, mono, complete, ancilla, starts=starts, seed=seed,
                          max_iter=max_iter, gtol=gtol)
    ch, m2, dc, value, grad = _power_problem(n, mono, complete, ancilla)
    d = ch.dim_in
    seeds = [gp.maximizing_state, np.eye(d) / d] + list(extra_starts)
    plain = None
    if complete:
        plain = increasing_power(n, mono, False, starts=starts, seed=seed, max_iter=max_iter, gtol=gtol)
        seeds.append(np.kron(plain.maximizing_state, np.eye(dc) / dc))
    rng = np.random.default_rng(seed)
    st = [psd_sqrt(s) for s in seeds] + _random_starts(d, max(0, starts - len(seeds)), rng)
    val, rho, _, _ = _ascend(value, grad, st, max_iter, gtol)
    val, rho = _at_least(val, rho, gp.value, gp.maximizing_state)
    if plain is not None:
        val, rho = _at_least(val, rho, plain.value, np.kron(plain.maximizing_state, np.eye(dc) / dc))
    return PowerResult(float(val), rho, dc, False, "ip", complete, m2.name)


# ---------------------------------------------------------------------------
# MIO cost bracket and cq cost
# ---------------------------------------------------------------------------


@dataclass
class MioBracket:
    lower: float
    upper: float
    robustness: RobustnessResult
    epsilon: float

    @property
    def gap(self) -> float:
        return self.upper - self.lower


def mio_cost_bracket(n: Channel, eps: float = 0.0, options: Optional[SolverOptions] = None) -> MioBracket:
    """``LR^eps <= zeta_1^eps <= log2 ceil(1 + R^eps)`` for the MIO cone."""
    spec = FreeSetSpec.mio(n.dim_in, n.dim_out)
    r = robustness(n, spec, eps, options)
    lam = 1.0 + r.robustness
    k = max(1, math.ceil(lam - CEIL_TOL))
    return MioBracket(r.log_robustness, math.log2(k), r, eps)


def cq_asymptotic_cost(n: Union[Channel, Cq]) -> float:
    """``max_i C_r(sigma_i)`` for a classical-quantum channel ``i -> sigma_i``."""
    return max(coherence_rel_ent(s) for s in cq_states(n))


# ---------------------------------------------------------------------------
# monotonicity suite
# ---------------------------------------------------------------------------


@dataclass
class Violation:
    check: str
    trial: int
    lhs: float
    rhs: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {"check": self.check, "trial": self.trial, "lhs": self.lhs, "rhs": self.rhs,
                "detail": self.detail}


@dataclass
class MonotoneReport:
    spec: FreeSetSpec
    trials: int
    slack: float
    checks: dict
    violations: List[Violation]

    def to_dict(self) -> dict:
        return {"free_set": self.spec.describe(), "trials": self.trials, "slack": self.slack,
                "checks": self.checks, "violations": [v.to_dict() for v in self.violations]}


def monotone_suite(spec: FreeSetSpec, trials: int = 50, seed=0, slack: float = 1e-6,
                   options: Optional[SolverOptions] = None) -> MonotoneReport:
    """Empirical checks of the log-robustness monotone axioms on random channels.

    Per trial: left composition ``LR(M o N) <= LR(N)``, right composition
    ``LR(N o M) <= LR(N)``, tensoring ``LR(N (x) M) <= LR(N)``, convexity of
    ``R`` under a random mixture, and faithfulness in both directions.
    """
    rng = np.random.default_rng(seed)
    din, dout = spec.dim_in, spec.dim_out
    left_spec = spec.at(dout, dout)
    right_spec = spec.at(din, din)
    sq_spec = spec.at(din * din, dout * dout)
    names = ("left_composition", "right_composition", "tensoring", "convexity", "faithfulness")
    counts = {k: 0 for k in names}
    violations: List[Violation] = []

    def lr(ch, sp=spec):
        return robustness(ch, sp, 0.0, options)

    def note(check, t, lhs, rhs, detail=""):
        counts[check] += 1
        if lhs > rhs + slack:
            violations.append(Violation(check, t, lhs, rhs, detail))

    for t in range(trials):
        s = lambda: int(rng.integers(2 ** 32))  # noqa: E731
        nch = random_channel(din, dout, np.random.default_rng(s()), kraus_rank=int(rng.integers(1, din * dout + 1)))
        rn = lr(nch)
        ml = sample_free(left_spec, s())
        note("left_composition", t, lr(compose(ml, nch)).log_robustness, rn.log_robustness)
        mr = sample_free(right_spec, s())
        note("right_composition", t, lr(compose(nch, mr)).log_robustness, rn.log_robustness)
        mt = sample_free(spec, s())
        note("tensoring", t, lr(tensor(nch, mt), sq_spec).log_robustness, rn.log_robustness)
        n2 = random_channel(din, dout, np.random.default_rng(s()))
        p = float(rng.random())
        r2 = lr(n2)
        rmix = lr(mix([nch, n2], [p, 1 - p]))
        note("convexity", t, rmix.robustness, p * rn.robustness + (1 - p) * r2.robustness, f"p={p:.4f}")
        # faithfulness: a free channel has LR ~ 0, and LR ~ 0 only for free channels
        f = sample_free(spec, s())
        lf = lr(f).log_robustness
        note("faithfulness", t, lf, 0.0, "free channel with positive LR")
        small = rn.log_robustness <= slack
        counts["faithfulness"] += 1
        if small != is_free(nch, spec, tol=1e-6):
            violations.append(Violation("faithfulness", t, rn.log_robustness, slack,
                                        "LR ~ 0 disagrees with membership"))
    return MonotoneReport(spec, trials, slack, counts, violations)


__all__ = [
    "CallbackMonotone",
    "CoherenceMonotone",
    "FreeEnergyMonotone",
    "MioBracket",
    "MonotoneReport",
    "PowerResult",
    "RelEntResult",
    "RobustnessResult",
    "SmoothDmaxResult",
    "StateMonotone",
    "channel_dmax",
    "channel_dmax_smooth",
    "channel_rel_ent",
    "cq_asymptotic_cost",
    "generating_power",
    "i_max",
    "i_max_cross_check",
    "increasing_power",
    "log_robustness",
    "mio_cost_bracket",
    "monotone_suite",
    "resolve_monotone",
    "robustness",
]
