"""Free-channel cones: declarative specs, conic compilation, membership and axiom checks.

Every kind is described by linear equalities on the Choi matrix ``J`` that
are *homogeneous*, so the compiled constraints describe the conic hull
``R_+ F`` of the free set.  Trace preservation is added separately (with an
optional scale variable) by the caller.

Kinds
-----
``constant``
    replacer channels, ``J = I/d_in (x) Tr_in J``.
``mio``
    maximally incoherent operations in the computational basis: every
    conditional output block ``<i|J|i>`` is diagonal.
``gibbs``
    Gibbs-preserving maps for a local Hamiltonian ``h`` at inverse
    temperature ``beta``.  A system of dimension ``dim(h)**k`` carries the
    non-interacting Hamiltonian ``sum_k h_k`` (thermal state ``tau^{(x)k}``);
    the trivial system carries ``H = 0``.
``maxmixed``
    maps sending ``I/d_in`` to ``I/d_out``.
``custom``
    user-supplied real-linear constraints ``tr(C J) (op) rhs`` for channels,
    enforced homogeneously as ``tr(C J) (op) rhs * tr(J)/d_in``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .channel import (
    Channel,
    Kraus,
    compose,
    constant_channel,
    decode_matrix,
    encode_matrix,
    identity,
    mix,
    swap_channel,
    tensor,
    to_choi,
    trace_channel,
)
from .conic.model import Expr, Model
from .errors import (
    DimensionMismatch,
    InvalidInput,
    UnsupportedKind,
    UnsupportedKindDimensions,
)
from .linalg import check_hermitian, kron_all, psd_sqrt, random_density, random_unitary
from .states import gibbs_state

KINDS = ("constant", "mio", "gibbs", "maxmixed", "custom")
FREE_TOL = 1e-7


@dataclass(frozen=True)
class LinearConstraint:
    """``tr(C J) op rhs`` for channels (``op`` one of ``==``, ``>=``, ``<=``)."""

    matrix: np.ndarray
    op: str = "=="
    rhs: float = 0.0

    def __post_init__(self):
        if self.op not in ("==", ">=", "<="):
            raise InvalidInput(f"constraint operator must be ==, >= or <=, got {self.op!r}")
        object.__setattr__(self, "matrix", check_hermitian(self.matrix, what="constraint matrix"))


@dataclass(frozen=True)
class FreeSetSpec:
    """Description of a free-channel cone at fixed dimensions."""

    kind: str
    dim_in: int
    dim_out: int
    hamiltonian: Optional[np.ndarray] = field(default=None, compare=False)
    beta: float = 1.0
    constraints: Tuple[LinearConstraint, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInput(f"unknown free-set kind {self.kind!r}; expected one of {KINDS}")
        if int(self.dim_in) < 1 or int(self.dim_out) < 1:
            raise DimensionMismatch("dimensions must be positive")
        object.__setattr__(self, "dim_in", int(self.dim_in))
        object.__setattr__(self, "dim_out", int(self.dim_out))
        if self.kind == "gibbs":
            if self.hamiltonian is None:
                raise InvalidInput("gibbs kind needs a hamiltonian")
            h = check_hermitian(self.hamiltonian, what="hamiltonian")
            object.__setattr__(self, "hamiltonian", h)
            if not (self.beta > 0 and math.isfinite(self.beta)):
                raise InvalidInput("beta must be positive and finite")
            # validates that both dimensions are powers of the local dimension
            self.gibbs_state(self.dim_in)
            self.gibbs_state(self.dim_out)
        if self.kind == "custom":
            cons = tuple(self.constraints)
            d = self.dim_in * self.dim_out
            for c in cons:
                if c.matrix.shape != (d, d):
                    raise DimensionMismatch("custom constraint matrices must match the Choi dimension")
            object.__setattr__(self, "constraints", cons)

    # -- factories
    @classmethod
    def constant(cls, dim_in: int, dim_out: Optional[int] = None) -> "FreeSetSpec":
        return cls("constant", dim_in, dim_in if dim_out is None else dim_out)

    @classmethod
    def mio(cls, dim_in: int, dim_out: Optional[int] = None) -> "FreeSetSpec":
        return cls("mio", dim_in, dim_in if dim_out is None else dim_out)

    @classmethod
    def maxmixed(cls, dim_in: int, dim_out: Optional[int] = None) -> "FreeSetSpec":
        return cls("maxmixed", dim_in, dim_in if dim_out is None else dim_out)

    @classmethod
    def gibbs(cls, hamiltonian, beta: float, dim_in: Optional[int] = None,
              dim_out: Optional[int] = None) -> "FreeSetSpec":
        h = np.asarray(hamiltonian, dtype=complex)
        d = h.shape[0]
        return cls("gibbs", d if dim_in is None else dim_in, d if dim_out is None else dim_out,
                   hamiltonian=h, beta=float(beta))

    @classmethod
    def custom(cls, dim_in: int, dim_out: int, constraints: Sequence[LinearConstraint]) -> "FreeSetSpec":
        return cls("custom", dim_in, dim_out, constraints=tuple(constraints))

    # -- derived data
    def gibbs_state(self, d: int) -> np.ndarray:
        """Thermal state of a ``d``-dimensional system under this spec's Hamiltonian model."""
        if self.kind != "gibbs":
            raise UnsupportedKind("only the gibbs kind has thermal states")
        if d == 1:
            return np.ones((1, 1), dtype=complex)
        dh = self.hamiltonian.shape[0]
        k = _int_log(d, dh)
        if k is None:
            raise UnsupportedKindDimensions(
                f"dimension {d} is not a power of the Hamiltonian dimension {dh}")
        return kron_all([gibbs_state(self.hamiltonian, self.beta)] * k)

    def local_hamiltonian(self, d: int) -> np.ndarray:
        """Non-interacting Hamiltonian on a ``d``-dimensional system (``0`` on the trivial system)."""
        if self.kind != "gibbs":
            raise UnsupportedKind("only the gibbs kind has a Hamiltonian")
        if d == 1:
            return np.zeros((1, 1), dtype=complex)
        dh = self.hamiltonian.shape[0]
        k = _int_log(d, dh)
        if k is None:
            raise UnsupportedKindDimensions(f"dimension {d} is not a power of {dh}")
        eye = np.eye(dh)
        return sum(kron_all([self.hamiltonian if j == i else eye for j in range(k)]) for i in range(k))

    def at(self, dim_in: int, dim_out: int) -> "FreeSetSpec":
        """The same resource theory at other system dimensions."""
        if (dim_in, dim_out) == (self.dim_in, self.dim_out):
            return self
        if self.kind == "custom":
            raise UnsupportedKindDimensions("custom cones exist only at their declared dimensions")
        return FreeSetSpec(self.kind, dim_in, dim_out, self.hamiltonian, self.beta)

    def tensor_square(self) -> "FreeSetSpec":
        return self.at(self.dim_in ** 2, self.dim_out ** 2)

    def free_state(self, d: Optional[int] = None) -> np.ndarray:
        """A canonical free state of dimension ``d`` (default ``dim_in``)."""
        d = self.dim_in if d is None else int(d)
        if self.kind in ("constant", "maxmixed"):
            return np.eye(d, dtype=complex) / d
        if self.kind == "mio":
            s = np.zeros((d, d), dtype=complex)
            s[0, 0] = 1.0
            return s
        if self.kind == "gibbs":
            return self.gibbs_state(d)
        raise UnsupportedKind("custom cones have no canonical free state")

    def describe(self) -> str:
        if self.kind == "gibbs":
            return f"gibbs(beta={self.beta:g}, d_H={self.hamiltonian.shape[0]}) {self.dim_in}->{self.dim_out}"
        return f"{self.kind} {self.dim_in}->{self.dim_out}"

    # -- JSON
    def to_dict(self) -> dict:
        doc = {"kind": self.kind, "dim_in": self.dim_in, "dim_out": self.dim_out}
        if self.kind == "gibbs":
            doc["hamiltonian"] = encode_matrix(self.hamiltonian)
            doc["beta"] = self.beta
        if self.kind == "custom":
            doc["constraints"] = [
                {"matrix": encode_matrix(c.matrix), "op": c.op, "rhs": c.rhs} for c in self.constraints
            ]
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "FreeSetSpec":
        if not isinstance(doc, dict):
            raise InvalidInput("free-set document must be a JSON object")
        try:
            kind = doc["kind"]
            din = int(doc["dim_in"])
            dout = int(doc["dim_out"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"free-set document missing field: {exc}") from exc
        if kind == "gibbs":
            if "hamiltonian" not in doc:
                raise InvalidInput("gibbs free set needs a hamiltonian")
            return cls("gibbs", din, dout, decode_matrix(doc["hamiltonian"], "hamiltonian"),
                       float(doc.get("beta", 1.0)))
        if kind == "custom":
            cons = []
            for i, c in enumerate(doc.get("constraints", [])):
                try:
                    cons.append(LinearConstraint(decode_matrix(c["matrix"], f"constraints[{i}]"),
                                                 c.get("op", "=="), float(c.get("rhs", 0.0))))
                except (KeyError, TypeError) as exc:
                    raise InvalidInput(f"constraints[{i}] is malformed") from exc
            return cls("custom", din, dout, constraints=tuple(cons))
        return cls(kind, din, dout)


def _int_log(d: int, base: int) -> Optional[int]:
    if base == 1:
        return None
    k, x = 0, 1
    while x < d:
        x *= base
        k += 1
    return k if x == d else None


def load_free_set(path: Union[str, Path]) -> FreeSetSpec:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: not valid JSON ({exc})") from exc
    return FreeSetSpec.from_dict(doc)


# ---------------------------------------------------------------------------
# compilation
# ---------------------------------------------------------------------------

Residual = Callable[[Expr], Expr]


@dataclass
class ConeConstraints:
    """PSD requirement plus named homogeneous linear conditions on a Choi expression.

    ``equalities`` map a Choi expression to a Hermitian expression that must
    vanish; ``inequalities`` map it to a scalar expression that must be
    nonnegative.  ``include_tp`` adds ``Tr_out J = scale * I``.
    """

    spec: FreeSetSpec
    include_tp: bool
    equalities: List[Tuple[str, Residual]]
    inequalities: List[Tuple[str, Residual]]

    def apply(self, model: Model, choi: Expr, scale: Optional[Expr] = None, psd: bool = True) -> None:
        """Add the constraints on ``choi`` to ``model``."""
        d = self.spec.dim_in * self.spec.dim_out
        if choi.dim != d:
            raise DimensionMismatch("Choi expression does not match the free-set dimensions")
        if psd:
            model.add_psd(choi)
        for _, f in self.equalities:
            model.add_eq(f(choi))
        for _, f in self.inequalities:
            model.add_ineq(f(choi))
        if self.include_tp:
            tp = choi.ptrace([self.spec.dim_in, self.spec.dim_out], [0])
            eye = np.eye(self.spec.dim_in)
            model.add_eq(tp - (eye if scale is None else scale * eye))

    def residuals(self, choi: np.ndarray) -> dict:
        """Largest violation of every named condition for a numeric Choi matrix."""
        e = Expr.constant(choi)
        out = {}
        for name, f in self.equalities:
            out[name] = float(np.max(np.abs(f(e).const), initial=0.0))
        for name, f in self.inequalities:
            out[name] = max(0.0, -float(f(e).const[0, 0].real))
        if self.include_tp:
            tp = np.trace(np.asarray(choi).reshape(self.spec.dim_in, self.spec.dim_out,
                                                   self.spec.dim_in, self.spec.dim_out), axis1=1, axis2=3)
            out["trace_preserving"] = float(np.max(np.abs(tp - np.eye(self.spec.dim_in))))
        return out


def compile(spec: FreeSetSpec, include_tp: bool = True) -> ConeConstraints:
    """Membership conditions for ``R_+ F`` (and trace preservation if requested)."""
    din, dout = spec.dim_in, spec.dim_out
    dims = [din, dout]
    eqs: List[Tuple[str, Residual]] = []
    ineqs: List[Tuple[str, Residual]] = []
    if spec.kind == "constant":
        def constant_eq(j: Expr) -> Expr:
            return j - j.ptrace(dims, [1]).kron_const_left(np.eye(din) / din)
        eqs.append(("constant", constant_eq))
    elif spec.kind == "mio":
        selectors = []
        for i in range(din):
            b = np.zeros((dout, din * dout))
            b[:, i * dout:(i + 1) * dout] = np.eye(dout)
            selectors.append(b)
        if dout > 1:
            for i, b in enumerate(selectors):
                eqs.append((f"incoherent_block_{i}", lambda j, b=b: j.congruence(b).offdiag()))
    elif spec.kind == "gibbs":
        tau_in = spec.gibbs_state(din)
        tau_out = spec.gibbs_state(dout)
        root = np.kron(psd_sqrt(tau_in).T, np.eye(dout))

        def gibbs_eq(j: Expr) -> Expr:
            out = j.congruence(root).ptrace(dims, [1])  # N(tau_in)
            return out - out.trace() * tau_out
        eqs.append(("gibbs_fixed_point", gibbs_eq))
    elif spec.kind == "maxmixed":
        def unital_eq(j: Expr) -> Expr:
            red = j.ptrace(dims, [1])
            return red - red.trace() * (np.eye(dout) / dout)
        eqs.append(("maximally_mixed_fixed_point", unital_eq))
    elif spec.kind == "custom":
        eye = np.eye(din * dout)
        for k, c in enumerate(spec.constraints):
            m = c.matrix - (c.rhs / din) * eye
            if c.op == "==":
                eqs.append((f"custom_{k}", lambda j, m=m: j.trace_with(m)))
            elif c.op == ">=":
                ineqs.append((f"custom_{k}", lambda j, m=m: j.trace_with(m)))
            else:
                ineqs.append((f"custom_{k}", lambda j, m=m: -j.trace_with(m)))
    return ConeConstraints(spec, include_tp, eqs, ineqs)


def is_free(channel: Channel, spec: FreeSetSpec, tol: float = FREE_TOL) -> bool:
    """Whether ``channel`` lies in the free set (all compiled conditions within ``tol``)."""
    if (channel.dim_in, channel.dim_out) != (spec.dim_in, spec.dim_out):
        raise DimensionMismatch(
            f"channel is {channel.dim_in}->{channel.dim_out}, free set is {spec.dim_in}->{spec.dim_out}")
    if np.linalg.eigvalsh(channel.choi)[0] < -tol:
        return False
    res = compile(spec, include_tp=True).residuals(channel.choi)
    return all(v <= tol for v in res.values())


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def _classical_channel(stochastic: np.ndarray) -> Channel:
    """``|i><i| -> sum_a P[a, i] |a><a|`` with dephasing of the input."""
    dout, din = stochastic.shape
    ops = []
    for i in range(din):
        for a in range(dout):
            k = np.zeros((dout, din))
            k[a, i] = math.sqrt(stochastic[a, i])
            ops.append(k)
    return to_choi(Kraus(ops))


def _incoherent_unitary(d: int, rng: np.random.Generator) -> Channel:
    perm = rng.permutation(d)
    u = np.zeros((d, d), dtype=complex)
    u[perm, np.arange(d)] = np.exp(2j * np.pi * rng.random(d))
    return to_choi(Kraus([u]))


def sample_free(spec: FreeSetSpec, seed=None) -> Channel:
    """A random free channel, deterministic per ``seed``."""
    rng = np.random.default_rng(seed)
    din, dout = spec.dim_in, spec.dim_out
    if spec.kind == "custom":
        raise UnsupportedKind("cannot sample from a custom cone")
    if spec.kind == "constant":
        ch = constant_channel(random_density(dout, rng), din)
    elif spec.kind == "mio":
        parts = []
        for _ in range(3):
            p = rng.random((dout, din))
            parts.append(_classical_channel(p / p.sum(axis=0, keepdims=True)))
        if din == dout:
            parts += [_incoherent_unitary(din, rng) for _ in range(2)]
        w = rng.dirichlet(np.ones(len(parts)))
        ch = mix(parts, w)
    elif spec.kind == "gibbs":
        tau_out = spec.gibbs_state(dout)
        parts = [constant_channel(tau_out, din)]
        if din == dout:
            h = spec.local_hamiltonian(din)
            _, v = np.linalg.eigh(h)
            ops = [np.outer(v[:, k], v[:, k].conj()) for k in range(din)]
            parts += [identity(din), to_choi(Kraus(ops))]
        w = rng.dirichlet(np.ones(len(parts)))
        ch = mix(parts, w)
    else:  # maxmixed
        parts = [constant_channel(np.eye(dout) / dout, din)]
        if din == dout:
            parts += [to_choi(Kraus([random_unitary(din, rng)])) for _ in range(3)]
        w = rng.dirichlet(np.ones(len(parts)))
        ch = mix(parts, w)
    return ch.with_label(f"free-{spec.kind}")


# ---------------------------------------------------------------------------
# axioms
# ---------------------------------------------------------------------------

AXIOMS = {
    1: "closed under composition and tensor product",
    2: "topologically closed",
    3: "contains the identity",
    4: "partial trace is free",
    5: "free states exist",
    6: "convex",
    7: "permutations of identical subsystems are free",
}


@dataclass
class AxiomFinding:
    axiom: int
    name: str
    status: str  # "pass" | "fail" | "not-checked"
    witness: str = ""

    def to_dict(self) -> dict:
        return {"axiom": self.axiom, "name": self.name, "status": self.status, "witness": self.witness}


@dataclass
class AxiomReport:
    spec: FreeSetSpec
    trials: int
    findings: List[AxiomFinding]

    def status(self, axiom: int) -> str:
        return next(f.status for f in self.findings if f.axiom == axiom)

    @property
    def violations(self) -> List[AxiomFinding]:
        return [f for f in self.findings if f.status == "fail"]

    def to_dict(self) -> dict:
        return {"free_set": self.spec.describe(), "trials": self.trials,
                "findings": [f.to_dict() for f in self.findings]}


def axiom_check(spec: FreeSetSpec, trials: int = 20, seed=0, tol: float = 1e-7) -> AxiomReport:
    """Empirical check of the free-set axioms on sampled free channels."""
    if spec.kind == "custom":
        raise UnsupportedKind("axiom checks need a samplable cone")
    rng = np.random.default_rng(seed)
    din, dout = spec.dim_in, spec.dim_out
    findings = []

    def first_failure(gen):
        for desc, ch, target in gen:
            if not is_free(ch, target, tol):
                return desc
        return None

    def seeds():
        return int(rng.integers(2 ** 32))

    # 1: composition (through a free self-map of the output) and tensor product
    out_spec = spec.at(dout, dout)
    sq_spec = spec.at(din * din, dout * dout)

    def closure():
        for t in range(trials):
            a = sample_free(spec, seeds())
            b = sample_free(out_spec, seeds())
            yield f"trial {t}: compose", compose(b, a), spec
            c = sample_free(spec, seeds())
            yield f"trial {t}: tensor", tensor(a, c), sq_spec
    w = first_failure(closure())
    findings.append(AxiomFinding(1, AXIOMS[1], "fail" if w else "pass", w or ""))

    findings.append(AxiomFinding(2, AXIOMS[2], "pass",
                                 "structural: finitely many linear equalities plus the PSD cone"))

    ident = spec.at(din, din)
    ok = is_free(identity(din), ident, tol)
    findings.append(AxiomFinding(3, AXIOMS[3], "pass" if ok else "fail",
                                 "" if ok else f"identity on dimension {din} violates "
                                 + _worst(ident, identity(din))))

    tr_spec = spec.at(din, 1)
    ok = is_free(trace_channel(din), tr_spec, tol)
    findings.append(AxiomFinding(4, AXIOMS[4], "pass" if ok else "fail",
                                 "" if ok else _worst(tr_spec, trace_channel(din))))

    prep = spec.at(1, dout)
    try:
        st = sample_free(prep, seeds())
        ok = is_free(st, prep, tol)
        findings.append(AxiomFinding(5, AXIOMS[5], "pass" if ok else "fail",
                                     "" if ok else "sampled state failed membership"))
    except UnsupportedKindDimensions as exc:
        findings.append(AxiomFinding(5, AXIOMS[5], "not-checked", str(exc)))

    def convexity():
        for t in range(trials):
            a = sample_free(spec, seeds())
            b = sample_free(spec, seeds())
            p = float(rng.random())
            yield f"trial {t}: mixture p={p:.3f}", mix([a, b], [p, 1 - p]), spec
    w = first_failure(convexity())
    findings.append(AxiomFinding(6, AXIOMS[6], "fail" if w else "pass", w or ""))

    sw = swap_channel(din, din)
    sw_spec = spec.at(din * din, din * din)
    ok = is_free(sw, sw_spec, tol)
    findings.append(AxiomFinding(7, AXIOMS[7], "pass" if ok else "fail",
                                 "" if ok else f"swap of two {din}-dimensional systems violates "
                                 + _worst(sw_spec, sw)))
    return AxiomReport(spec, trials, findings)


def _worst(spec: FreeSetSpec, ch: Channel) -> str:
    res = compile(spec).residuals(ch.choi)
    name = max(res, key=res.get)
    return f"{name} (residual {res[name]:.3g})"


__all__ = [
    "AXIOMS",
    "AxiomFinding",
    "AxiomReport",
    "ConeConstraints",
    "FreeSetSpec",
    "KINDS",
    "LinearConstraint",
    "axiom_check",
    "compile",
    "is_free",
    "load_free_set",
    "sample_free",
]
