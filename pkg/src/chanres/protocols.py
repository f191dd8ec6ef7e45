"""Constructive protocols: convex split, catalytic resource erasure and simulation triples.

Multi-copy distances are half diamond norms of the n-fold channels.  When both
channels are replacer (constant) channels the diamond distance equals the trace
distance of the outputs, which is evaluated by one of three exact routes:

* ``dense``       -- explicit ``d_out**n``-dimensional output states;
* ``types``       -- commuting outputs: a classical sum over type classes;
* ``schur-weyl``  -- qubit outputs: block decomposition of permutation-symmetric
  operators into spin irreps, using ``gamma = (1/n) d/dt (beta + t alpha)^{(x)n}``
  at ``t = 0``.  In the eigenbasis of ``beta`` every block is tridiagonal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal
from scipy.special import gammaln

from .channel import (
    Channel,
    channel_from_choi,
    compose,
    constant_channel,
    constant_output,
    identity,
    tensor,
    tensor_all,
    tensor_power,
)
from .conic import SolverOptions
from .errors import BudgetExceeded, DimensionMismatch, InvalidInput, SupportViolation, UnsupportedKind
from .freesets import FreeSetSpec, is_free
from .linalg import hermitian_part, kron_all, trace_norm
from .monotones import channel_dmax, robustness
from .norms import diamond_distance
from .states import io_unitary_necessary_condition, majorizes


# LR below this is solver noise around a free channel (relative accuracy ~1e-8)
FREE_LR_TOL = 1e-7


@dataclass
class Budget:
    """Size limits for the explicit constructions.

    ``full_sdp_dim`` caps the Choi dimension ``(d_in d_out)**n`` of the n-fold
    channel handed to the diamond-norm SDP; ``dense_dim`` caps ``d_out**n`` for
    explicit output states; ``max_types`` caps the number of type classes;
    ``max_n`` caps the number of copies for the symmetric routes.
    """

    full_sdp_dim: int = 64
    dense_dim: int = 4096
    max_types: int = 2_000_000
    max_n: int = 100_000


# ---------------------------------------------------------------------------
# trace distance of convex-split outputs for replacer channels
# ---------------------------------------------------------------------------


def _split_state(alpha: np.ndarray, beta: np.ndarray, n: int) -> np.ndarray:
    out = 0
    for i in range(n):
        out = out + kron_all([alpha if k == i else beta for k in range(n)])
    return out / n


def _dense_distance(alpha, beta, n) -> float:
    return 0.5 * trace_norm(_split_state(alpha, beta, n) - kron_all([beta] * n))


def _joint_diagonal(alpha, beta, tol=1e-10):
    """Common eigenbasis of commuting Hermitian matrices, or ``None``."""
    if np.max(np.abs(alpha @ beta - beta @ alpha)) > tol:
        return None
    _, v = np.linalg.eigh(beta + math.pi / 7.0 * alpha)
    p = np.real(np.diag(v.conj().T @ alpha @ v))
    q = np.real(np.diag(v.conj().T @ beta @ v))
    if max(np.max(np.abs(v.conj().T @ alpha @ v - np.diag(p))),
           np.max(np.abs(v.conj().T @ beta @ v - np.diag(q)))) > 1e-8:
        return None
    return np.clip(p, 0.0, None), np.clip(q, 0.0, None)


def _compositions(n: int, k: int):
    for cut in itertools.combinations(range(n + k - 1), k - 1):
        prev = -1
        out = []
        for c in cut:
            out.append(c - prev - 1)
            prev = c
        out.append(n + k - 2 - prev)
        yield out


def _types_distance(p: np.ndarray, q: np.ndarray, n: int) -> float:
    """``1/2 sum_x q^n(x) |(1/n) sum_i r(x_i) - 1|`` with ``r = p / q``, summed by type."""
    keep = q > 0
    p, q = p[keep], q[keep]
    r = p / q
    lq = np.log(q)
    k = q.size
    total = 0.0
    base = gammaln(n + 1)
    for c in _compositions(n, k):
        c = np.asarray(c)
        lw = base - np.sum(gammaln(c + 1)) + float(np.sum(np.where(c > 0, c * lq, 0.0)))
        total += math.exp(lw) * abs(float(c @ r) / n - 1.0)
    return 0.5 * total


def _lpow(x: float, e: int) -> float:
    """``e log x`` with ``0 log 0 = 0``."""
    if e == 0:
        return 0.0
    return -math.inf if x <= 0 else e * math.log(x)


def _schur_weyl_distance(alpha: np.ndarray, beta: np.ndarray, n: int) -> float:
    """Exact ``1/2 || gamma_n - beta^{(x)n} ||_1`` for qubit states via spin blocks."""
    w, v = np.linalg.eigh(hermitian_part(beta))
    d0, d1 = (float(x) for x in np.clip(w, 0.0, None))
    a = v.conj().T @ hermitian_part(alpha) @ v
    a00, a11 = float(np.real(a[0, 0])), float(np.real(a[1, 1]))
    a01 = abs(a[0, 1])
    ddet = d0 * a11 + d1 * a00
    total = 0.0
    for p in range(0, n // 2 + 1):
        k = n - 2 * p
        # multiplicity of the spin-k/2 irrep
        lm = gammaln(n + 1) - gammaln(p + 1) - gammaln(n - p + 1)
        frac = 1.0 - p / (n - p + 1.0)
        if frac <= 0:
            continue
        lm += math.log(frac)

        def e(u, vv, q):
            if u < 0 or vv < 0 or q < 0:
                return 0.0
            lg = lm + _lpow(d0, u) + _lpow(d1, vv) + _lpow(d0 * d1, q)
            return 0.0 if lg == -math.inf else math.exp(lg)

        idx = np.arange(k + 1)
        diag = np.empty(k + 1)
        for t in idx:
            s = e(k - t, t, p)
            deriv = 0.0
            if k - t > 0:
                deriv += (k - t) * a00 * e(k - t - 1, t, p)
            if t > 0:
                deriv += t * a11 * e(k - t, t - 1, p)
            if p > 0:
                deriv += p * ddet * e(k - t, t, p - 1)
            diag[t] = deriv / n - s
        off = np.array([math.sqrt((b + 1) * (k - b)) * a01 * e(k - b - 1, b, p) / n for b in range(k)])
        ev = eigvalsh_tridiagonal(diag, off) if k > 0 else diag
        total += float(np.sum(np.abs(ev)))
    return 0.5 * total


def constant_split_distance(alpha: np.ndarray, beta: np.ndarray, n: int,
                            budget: Optional[Budget] = None, method: Optional[str] = None):
    """``(distance, method)`` for ``1/2 || (1/n) sum_i beta..alpha_i..beta - beta^{(x)n} ||_1``."""
    budget = budget or Budget()
    d = alpha.shape[0]
    if method is None:
        if d ** n <= budget.dense_dim and d ** n <= 256:
            method = "dense"
        elif d == 2:
            method = "schur-weyl"
        elif _joint_diagonal(alpha, beta) is not None:
            method = "types"
        elif d ** n <= budget.dense_dim:
            method = "dense"
        else:
            raise BudgetExceeded(f"output dimension {d}**{n} exceeds the dense budget")
    if method == "dense":
        if d ** n > budget.dense_dim:
            raise BudgetExceeded(f"output dimension {d}**{n} exceeds the dense budget")
        return _dense_distance(alpha, beta, n), method
    if method == "schur-weyl":
        if d != 2:
            raise InvalidInput("the Schur-Weyl route is implemented for qubit outputs")
        if n > budget.max_n:
            raise BudgetExceeded(f"n = {n} exceeds max_n")
        return _schur_weyl_distance(alpha, beta, n), method
    if method == "types":
        pq = _joint_diagonal(alpha, beta)
        if pq is None:
            raise InvalidInput("the type-class route needs commuting outputs")
        if math.comb(n + d - 1, d - 1) > budget.max_types:
            raise BudgetExceeded("too many type classes")
        return _types_distance(pq[0], pq[1], n), method
    raise InvalidInput(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# convex split
# ---------------------------------------------------------------------------


@dataclass
class ConvexSplitReport:
    n: int
    lam: float
    measured_distance: float
    bound: float
    used_shortcut: bool
    gamma_dim: int
    method: str
    gamma: Optional[Channel] = field(default=None, repr=False)

    @property
    def within_bound(self) -> bool:
        return self.measured_distance <= self.bound + 1e-6

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "gamma"}
        d["lambda"] = d.pop("lam")
        return d


def convex_split_channel(alpha: Channel, beta: Channel, n: int) -> Channel:
    """``gamma^(n) = (1/n) sum_i beta^{(x) i-1} (x) alpha (x) beta^{(x) n-i}`` (exact Choi mixture)."""
    terms = [tensor_all([alpha if k == i else beta for k in range(n)]) for i in range(n)]
    j = sum(t.choi for t in terms) / n
    return channel_from_choi(j, terms[0].dim_in, terms[0].dim_out, label=f"convex-split-{n}")


def convex_split(alpha: Channel, beta: Channel, n: int, budget: Optional[Budget] = None,
                 options: Optional[SolverOptions] = None) -> ConvexSplitReport:
    """Build ``gamma^(n)`` and measure ``1/2 || gamma^(n) - beta^{(x)n} ||_diamond``.

    The measured value is compared with the bound ``sqrt(lambda / n)`` where
    ``lambda = 2^{D_max(alpha || beta)}``.
    """
    budget = budget or Budget()
    if (alpha.dim_in, alpha.dim_out) != (beta.dim_in, beta.dim_out):
        raise DimensionMismatch("alpha and beta differ in dimensions")
    n = int(n)
    if n < 1:
        raise InvalidInput("n must be at least 1")
    dmax = channel_dmax(alpha, beta)
    if math.isinf(dmax):
        raise SupportViolation("D_max(alpha || beta) is infinite")
    lam = 2.0 ** dmax
    bound = math.sqrt(lam / n)
    gamma_dim = (alpha.dim_in * alpha.dim_out) ** n
    if np.max(np.abs(alpha.choi - beta.choi)) <= 1e-12:
        return ConvexSplitReport(n, lam, 0.0, bound, True, gamma_dim, "identical")
    sa, sb = constant_output(alpha), constant_output(beta)
    if sa is not None and sb is not None:
        dist, method = constant_split_distance(sa, sb, n, budget)
        gamma = None
        if gamma_dim <= budget.full_sdp_dim:
            gamma = constant_channel(_split_state(sa, sb, n), alpha.dim_in ** n)
        return ConvexSplitReport(n, lam, min(1.0, dist), bound, True, gamma_dim, method, gamma)
    if gamma_dim > budget.full_sdp_dim:
        raise BudgetExceeded(f"Choi dimension {gamma_dim} of the {n}-fold channel exceeds the SDP budget "
                             f"({budget.full_sdp_dim})")
    gamma = convex_split_channel(alpha, beta, n)
    dist = diamond_distance(gamma, tensor_power(beta, n), options)
    return ConvexSplitReport(n, lam, dist, bound, False, gamma_dim, "sdp", gamma)


# ---------------------------------------------------------------------------
# catalytic erasure
# ---------------------------------------------------------------------------


@dataclass
class ErasureReport:
    epsilon: float
    eta: float
    n_used: int
    cost_bits: float
    lr_value: float
    upper_bound: float
    achieved_distance: float
    lower_bound_info: dict
    executed: bool
    method: str
    smoothing_distance: float
    measured_distance: float
    catalyst: Optional[Channel] = field(default=None, repr=False)
    smoothed: Optional[Channel] = field(default=None, repr=False)
    averaged_channel: Optional[Channel] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        skip = ("catalyst", "smoothed", "averaged_channel")
        return {k: v for k, v in asdict(self).items() if k not in skip}


def _canonical_constant(ch: Channel, omega: np.ndarray) -> Channel:
    """``ch o R_omega``: the replacer channel onto ``ch(omega)``."""
    return compose(ch, constant_channel(omega, ch.dim_in))


def erasure_protocol(n_channel: Channel, spec: FreeSetSpec, epsilon: float, eta: float,
                     budget: Optional[Budget] = None, options: Optional[SolverOptions] = None,
                     mu: float = 2.0) -> ErasureReport:
    """Execute (or bound) the catalytic erasure of ``n_channel``'s resource.

    The smoothing witness ``N'`` and the optimal free channel ``F0`` of
    ``LR^{eps-eta}`` are combined with the catalyst ``F0^{(x) n-1}``; averaging
    over the pair transpositions gives
    ``(1/n) sum_i F0^{(x) i-1} (x) N' (x) F0^{(x) n-i}``, whose distance to
    ``F0^{(x) n}`` is measured exactly.  The certified distance to a free
    channel is that measurement plus ``1/2 ||N - N'||_diamond``.

    ``n = ceil(lambda / (4 eta^2))`` with ``lambda = 2^{LR^{eps-eta}}`` (and
    ``n = 1`` when ``LR^{eps-eta}`` is below ``FREE_LR_TOL``).  When the explicit
    construction exceeds the budget only the bounds are reported
    (``executed = False``, ``achieved_distance = nan``).
    """
    budget = budget or Budget()
    epsilon, eta = float(epsilon), float(eta)
    if not (0.0 < eta < epsilon < 1.0):
        raise InvalidInput("need 0 < eta < epsilon < 1")
    rob = robustness(n_channel, spec, epsilon - eta, options)
    lr = rob.log_robustness
    lam = 2.0 ** lr
    free_case = lr <= FREE_LR_TOL
    n = 1 if free_case else max(1, math.ceil(lam / (4.0 * eta ** 2) - 1e-9))
    cost = math.log2(n)
    upper = lr + 2.0 * math.log2(1.0 / eta) - 1.0

    # lower bounds (Theorem-style converse, plus the convex-cone variant)
    delta = math.sqrt(epsilon * (2.0 - epsilon))
    md = mu * delta
    lr_md = 0.0 if md >= 1.0 else robustness(n_channel, spec, md, options).log_robustness
    lr_delta = 0.0 if delta >= 1.0 else robustness(n_channel, spec, delta, options).log_robustness
    lower = {"mu": mu, "delta": delta, "lr_mu_delta": lr_md,
             "bound": lr_md + math.log2(1.0 - 1.0 / mu), "lr_delta": lr_delta}

    f0 = rob.optimal_free
    nprime = rob.optimal_smoothed if rob.optimal_smoothed is not None else n_channel
    if is_free(n_channel, spec):
        f0 = nprime = n_channel
    elif constant_output(n_channel) is not None and spec.kind != "custom":
        omega = spec.free_state(n_channel.dim_in)
        nprime = _canonical_constant(nprime, omega)
        f0 = _canonical_constant(f0, omega)
    smoothing = diamond_distance(n_channel, nprime, options) if nprime is not n_channel else 0.0
    try:
        split = convex_split(nprime, f0, n, budget, options)
    except BudgetExceeded:
        return ErasureReport(epsilon, eta, n, cost, lr, upper, math.nan, lower, False, "bound-only",
                             smoothing, math.nan, f0, nprime)
    achieved = min(1.0, split.measured_distance + smoothing)
    return ErasureReport(epsilon, eta, n, cost, lr, upper, achieved, lower, True, split.method,
                         smoothing, split.measured_distance, f0, nprime, split.gamma)


# ---------------------------------------------------------------------------
# superchannels and simulation triples
# ---------------------------------------------------------------------------


def apply_superchannel(pre: Channel, post: Channel, ancilla_dim: int, n: Channel) -> Channel:
    """``post o (n (x) id_C) o pre`` with ``pre: A' -> A C`` and ``post: B C -> B'``."""
    c = int(ancilla_dim)
    if pre.dim_out != n.dim_in * c:
        raise DimensionMismatch("pre must map into (channel input) x (ancilla)")
    if post.dim_in != n.dim_out * c:
        raise DimensionMismatch("post must act on (channel output) x (ancilla)")
    mid = tensor(n, identity(c)) if c > 1 else n
    return compose(post, compose(mid, pre))


@dataclass
class SimulationReport:
    pre_free: bool
    post_free: bool
    distance: float
    epsilon: float
    ancilla_dim: int

    @property
    def distance_ok(self) -> bool:
        return self.distance <= self.epsilon + 1e-6

    @property
    def passed(self) -> bool:
        return self.pre_free and self.post_free and self.distance_ok

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(distance_ok=self.distance_ok, passed=self.passed)
        return d


def verify_simulation(n: Channel, target: Channel, pre: Channel, post: Channel, spec: FreeSetSpec,
                      eps: float = 0.0, ancilla_dim: Optional[int] = None,
                      options: Optional[SolverOptions] = None) -> SimulationReport:
    """Check that ``(pre, post)`` is a free simulation of ``target`` from ``n`` within ``eps``."""
    if ancilla_dim is None:
        if pre.dim_out % n.dim_in:
            raise DimensionMismatch("pre output is not (channel input) x (ancilla)")
        ancilla_dim = pre.dim_out // n.dim_in
    out = apply_superchannel(pre, post, ancilla_dim, n)
    if (out.dim_in, out.dim_out) != (target.dim_in, target.dim_out):
        raise DimensionMismatch("simulated channel and target differ in dimensions")
    try:
        pre_free = is_free(pre, spec.at(pre.dim_in, pre.dim_out))
        post_free = is_free(post, spec.at(post.dim_in, post.dim_out))
    except UnsupportedKind:
        if (pre.dim_in, pre.dim_out) == (spec.dim_in, spec.dim_out) and \
                (post.dim_in, post.dim_out) == (spec.dim_in, spec.dim_out):
            pre_free, post_free = is_free(pre, spec), is_free(post, spec)
        else:
            raise
    dist = diamond_distance(out, target, options)
    return SimulationReport(bool(pre_free), bool(post_free), dist, float(eps), int(ancilla_dim))


__all__ = [
    "Budget",
    "ConvexSplitReport",
    "ErasureReport",
    "SimulationReport",
    "apply_superchannel",
    "constant_split_distance",
    "convex_split",
    "convex_split_channel",
    "erasure_protocol",
    "io_unitary_necessary_condition",
    "majorizes",
    "verify_simulation",
]
