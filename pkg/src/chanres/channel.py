"""Quantum channels in the unnormalized Choi representation.

Convention: ``J = sum_ij |i><j| (x) N(|i><j|)`` with the input factor first,
so ``J`` has trace ``dim_in`` for a channel and ``Tr_out J = I_in``.  Viewed
as a 4-tensor ``J[i, a, j, b] = N(|i><j|)[a, b]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidInput,
    NonCompletelyPositive,
    NonTracePreserving,
    NotCqChannel,
)
from .linalg import as_matrix, check_hermitian, hermitian_part, random_unitary
from .states import ensure_density

CHANNEL_TOL = 1e-9


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class HermitianPreservingMap:
    """A linear map given by a Hermitian Choi matrix (no positivity or TP requirement)."""

    dim_in: int
    dim_out: int
    choi: np.ndarray

    def __post_init__(self):
        d = int(self.dim_in) * int(self.dim_out)
        if self.dim_in < 1 or self.dim_out < 1:
            raise DimensionMismatch("dimensions must be positive")
        c = check_hermitian(self.choi, what="Choi matrix")
        if c.shape != (d, d):
            raise DimensionMismatch(f"Choi matrix has shape {c.shape}, expected {(d, d)}")
        object.__setattr__(self, "choi", _freeze(c))

    def __sub__(self, other: "HermitianPreservingMap") -> "HermitianPreservingMap":
        _same_dims(self, other)
        return HermitianPreservingMap(self.dim_in, self.dim_out, self.choi - other.choi)

    def __add__(self, other: "HermitianPreservingMap") -> "HermitianPreservingMap":
        _same_dims(self, other)
        return HermitianPreservingMap(self.dim_in, self.dim_out, self.choi + other.choi)

    def __mul__(self, c: float) -> "HermitianPreservingMap":
        return HermitianPreservingMap(self.dim_in, self.dim_out, float(c) * self.choi)

    __rmul__ = __mul__


@dataclass(frozen=True)
class Channel:
    """A cptp map ``dim_in -> dim_out`` stored by its unnormalized Choi matrix."""

    dim_in: int
    dim_out: int
    choi: np.ndarray
    label: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        din, dout = int(self.dim_in), int(self.dim_out)
        if din < 1 or dout < 1:
            raise DimensionMismatch("dimensions must be positive")
        object.__setattr__(self, "dim_in", din)
        object.__setattr__(self, "dim_out", dout)
        c = check_hermitian(self.choi, what="Choi matrix")
        if c.shape != (din * dout, din * dout):
            raise DimensionMismatch(f"Choi matrix has shape {c.shape}, expected {(din * dout,) * 2}")
        w = np.linalg.eigvalsh(c)
        if w[0] < -CHANNEL_TOL * max(1.0, din):
            raise NonCompletelyPositive(f"Choi matrix has eigenvalue {w[0]:.3e}")
        tp = np.trace(c.reshape(din, dout, din, dout), axis1=1, axis2=3)
        if np.max(np.abs(tp - np.eye(din))) > CHANNEL_TOL:
            raise NonTracePreserving("partial trace of the Choi matrix over the output is not the identity")
        object.__setattr__(self, "choi", _freeze(c))

    @property
    def choi_tensor(self) -> np.ndarray:
        """View of the Choi matrix as ``J[i, a, j, b]``."""
        return self.choi.reshape(self.dim_in, self.dim_out, self.dim_in, self.dim_out)

    @property
    def choi_state(self) -> np.ndarray:
        """Unit-trace Choi matrix ``J / dim_in``."""
        return self.choi / self.dim_in

    def as_map(self) -> HermitianPreservingMap:
        return HermitianPreservingMap(self.dim_in, self.dim_out, self.choi)

    def __sub__(self, other) -> HermitianPreservingMap:
        return self.as_map() - (other.as_map() if isinstance(other, Channel) else other)

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)

    def with_label(self, label: Optional[str]) -> "Channel":
        return Channel(self.dim_in, self.dim_out, self.choi, label)


def _same_dims(a, b) -> None:
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        raise DimensionMismatch(
            f"dimension mismatch: ({a.dim_in}->{a.dim_out}) vs ({b.dim_in}->{b.dim_out})"
        )


# ---------------------------------------------------------------------------
# representations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Kraus:
    operators: Sequence[np.ndarray]


@dataclass(frozen=True)
class Choi:
    dim_in: int
    dim_out: int
    matrix: np.ndarray


@dataclass(frozen=True)
class Unitary:
    matrix: np.ndarray


@dataclass(frozen=True)
class Cq:
    states: Sequence[np.ndarray]


ChannelRepr = Union[Kraus, Choi, Unitary, Cq]


def _kraus_choi(ops: Sequence[np.ndarray]) -> np.ndarray:
    dout, din = ops[0].shape
    j = np.zeros((din * dout, din * dout), dtype=complex)
    for k in ops:
        v = k.T.reshape(-1)  # entry (i, a) = K[a, i]
        j += np.outer(v, v.conj())
    return j


def to_choi(rep: ChannelRepr, label: Optional[str] = None) -> Channel:
    """Canonicalise any channel representation into a :class:`Channel`."""
    if isinstance(rep, Channel):
        return rep
    if isinstance(rep, Kraus):
        ops = [np.asarray(k, dtype=complex) for k in rep.operators]
        if not ops or any(k.ndim != 2 for k in ops):
            raise DimensionMismatch("Kraus operators must be a non-empty list of matrices")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise DimensionMismatch("Kraus operators differ in shape")
        dout, din = shape
        s = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(s - np.eye(din))) > CHANNEL_TOL:
            raise NonTracePreserving("Kraus operators are not complete")
        return Channel(din, dout, _kraus_choi(ops), label)
    if isinstance(rep, Unitary):
        u = as_matrix(rep.matrix)
        if np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > CHANNEL_TOL:
            raise InvalidInput("matrix is not unitary")
        return Channel(u.shape[0], u.shape[0], _kraus_choi([u]), label)
    if isinstance(rep, Cq):
        states = [ensure_density(s, what=f"cq state {i}") for i, s in enumerate(rep.states)]
        if not states:
            raise DimensionMismatch("cq channel needs at least one state")
        dout = states[0].shape[0]
        if any(s.shape != (dout, dout) for s in states):
            raise DimensionMismatch("cq states differ in dimension")
        din = len(states)
        j = np.zeros((din, dout, din, dout), dtype=complex)
        for i, s in enumerate(states):
            j[i, :, i, :] = s
        return Channel(din, dout, j.reshape(din * dout, din * dout), label)
    if isinstance(rep, Choi):
        return Channel(rep.dim_in, rep.dim_out, rep.matrix, label)
    raise InvalidInput(f"unknown channel representation {type(rep).__name__}")


def channel_from_choi(choi: np.ndarray, dim_in: int, dim_out: int, label: Optional[str] = None,
                      repair_tol: float = 1e-6) -> Channel:
    """Build a channel from a numerically approximate Choi matrix.

    Small negative eigenvalues are clipped and the trace-preservation defect is
    removed by the congruence ``(X^{-1/2} (x) I) J (X^{-1/2} (x) I)`` with
    ``X = Tr_out J``; both corrections preserve complete positivity.  Defects
    larger than ``repair_tol`` are reported rather than repaired.
    """
    j = hermitian_part(as_matrix(choi))
    d = dim_in * dim_out
    if j.shape != (d, d):
        raise DimensionMismatch(f"Choi matrix has shape {j.shape}, expected {(d, d)}")
    w, v = np.linalg.eigh(j)
    if w[0] < -repair_tol * max(1.0, dim_in):
        raise NonCompletelyPositive(f"Choi matrix has eigenvalue {w[0]:.3e}")
    j = (v * np.clip(w, 0.0, None)) @ v.conj().T
    x = np.trace(j.reshape(dim_in, dim_out, dim_in, dim_out), axis1=1, axis2=3)
    if np.max(np.abs(x - np.eye(dim_in))) > repair_tol:
        raise NonTracePreserving("Choi matrix is not trace preserving within the repair tolerance")
    xw, xv = np.linalg.eigh(hermitian_part(x))
    xis = (xv / np.sqrt(xw)) @ xv.conj().T
    k = np.kron(xis, np.eye(dim_out))
    return Channel(dim_in, dim_out, hermitian_part(k @ j @ k.conj().T), label)


# ---------------------------------------------------------------------------
# standard channels
# ---------------------------------------------------------------------------


def identity(d: int) -> Channel:
    return to_choi(Unitary(np.eye(d)), label=f"id{d}")


def unitary_channel(u) -> Channel:
    return to_choi(Unitary(u))


def constant_channel(sigma, dim_in: int) -> Channel:
    """Replacer channel ``rho -> Tr(rho) sigma``."""
    s = ensure_density(sigma, what="output state")
    return Channel(dim_in, s.shape[0], np.kron(np.eye(dim_in), s), label="const")


def completely_depolarizing(d: int) -> Channel:
    return constant_channel(np.eye(d) / d, d)


def depolarizing(d: int, p: float) -> Channel:
    """``rho -> (1-p) rho + p I/d``."""
    return mix([identity(d), completely_depolarizing(d)], [1.0 - p, p])


def dephasing(d: int) -> Channel:
    """Complete dephasing in the computational basis."""
    ops = []
    for i in range(d):
        k = np.zeros((d, d))
        k[i, i] = 1.0
        ops.append(k)
    return to_choi(Kraus(ops), label=f"dephase{d}")


def trace_channel(d: int) -> Channel:
    return Channel(d, 1, np.eye(d), label="trace")


def state_preparation(rho) -> Channel:
    """The channel ``C -> B`` (trivial input) preparing ``rho``."""
    return constant_channel(rho, 1)


def random_channel(dim_in: int, dim_out: int, rng: np.random.Generator,
                   kraus_rank: Optional[int] = None) -> Channel:
    """Random channel from a Gaussian Stinespring isometry."""
    r = dim_in * dim_out if kraus_rank is None else int(kraus_rank)
    g = rng.standard_normal((r * dim_out, dim_in)) + 1j * rng.standard_normal((r * dim_out, dim_in))
    q, rr = np.linalg.qr(g)
    q = q * (np.diag(rr) / np.abs(np.diag(rr)))
    ops = [q[k * dim_out:(k + 1) * dim_out, :] for k in range(r)]
    return to_choi(Kraus(ops), label="random")


def random_unitary_channel(d: int, rng: np.random.Generator) -> Channel:
    return unitary_channel(random_unitary(d, rng))


# ---------------------------------------------------------------------------
# calculus
# ---------------------------------------------------------------------------


def apply(channel: Union[Channel, HermitianPreservingMap], rho) -> np.ndarray:
    """``N(rho) = Tr_in[J (rho^T (x) I)]``."""
    rho = as_matrix(rho)
    if rho.shape != (channel.dim_in, channel.dim_in):
        raise DimensionMismatch(f"state has dimension {rho.shape[0]}, channel input is {channel.dim_in}")
    j4 = channel.choi.reshape(channel.dim_in, channel.dim_out, channel.dim_in, channel.dim_out)
    return np.einsum("iajb,ij->ab", j4, rho)


def adjoint_apply(channel: Union[Channel, HermitianPreservingMap], g) -> np.ndarray:
    """Heisenberg-picture map: ``Tr(G N(X)) = Tr(N^dag(G) X)``."""
    g = as_matrix(g)
    if g.shape != (channel.dim_out, channel.dim_out):
        raise DimensionMismatch("operator does not match the channel output")
    j4 = channel.choi.reshape(channel.dim_in, channel.dim_out, channel.dim_in, channel.dim_out)
    return np.einsum("iajb,ba->ji", j4, g)


def compose(second: Channel, first: Channel) -> Channel:
    """``second o first``."""
    if first.dim_out != second.dim_in:
        raise DimensionMismatch("first.dim_out must equal second.dim_in")
    j = np.einsum("iajb,acbd->icjd", first.choi_tensor, second.choi_tensor)
    d = first.dim_in * second.dim_out
    return channel_from_choi(j.reshape(d, d), first.dim_in, second.dim_out)


def _tensor_choi(ja: np.ndarray, dia: int, doa: int, jb: np.ndarray, dib: int, dob: int) -> np.ndarray:
    a4 = ja.reshape(dia, doa, dia, doa)
    b4 = jb.reshape(dib, dob, dib, dob)
    t = np.einsum("iajb,kcld->ikacjlbd", a4, b4)
    d = dia * dib * doa * dob
    return t.reshape(d, d)


def tensor(a: Channel, b: Channel) -> Channel:
    """``a (x) b`` with canonical factor order (in_a, in_b, out_a, out_b)."""
    j = _tensor_choi(a.choi, a.dim_in, a.dim_out, b.choi, b.dim_in, b.dim_out)
    return channel_from_choi(j, a.dim_in * b.dim_in, a.dim_out * b.dim_out)


def tensor_map(a, b) -> HermitianPreservingMap:
    """Tensor product of Hermitian-preserving maps (no positivity assumed)."""
    j = _tensor_choi(a.choi, a.dim_in, a.dim_out, b.choi, b.dim_in, b.dim_out)
    return HermitianPreservingMap(a.dim_in * b.dim_in, a.dim_out * b.dim_out, j)


def tensor_all(channels: Iterable[Channel]) -> Channel:
    channels = list(channels)
    out = channels[0]
    for c in channels[1:]:
        out = tensor(out, c)
    return out


def tensor_power(channel: Channel, n: int) -> Channel:
    return tensor_all([channel] * n)


def permute_systems(channel: Channel, dims_in: Sequence[int], dims_out: Sequence[int],
                    perm: Sequence[int]) -> Channel:
    """Relabel tensor factors: factor ``t`` of the result is factor ``perm[t]`` of ``channel``.

    The same permutation acts on the input and the output factors, i.e. the
    result is ``V_pi o N o U_pi^{-1}``.
    """
    dims_in = [int(d) for d in dims_in]
    dims_out = [int(d) for d in dims_out]
    perm = [int(p) for p in perm]
    k = len(perm)
    if len(dims_in) != k or len(dims_out) != k or sorted(perm) != list(range(k)):
        raise DimensionMismatch("perm must be a permutation of the factor indices")
    if int(np.prod(dims_in)) != channel.dim_in or int(np.prod(dims_out)) != channel.dim_out:
        raise DimensionMismatch("factor dimensions do not multiply to the channel dimensions")
    t = channel.choi.reshape(dims_in + dims_out + dims_in + dims_out)
    axes = perm + [k + p for p in perm] + [2 * k + p for p in perm] + [3 * k + p for p in perm]
    d = channel.dim_in * channel.dim_out
    return Channel(channel.dim_in, channel.dim_out, t.transpose(axes).reshape(d, d), channel.label)


def swap_channel(d1: int, d2: int) -> Channel:
    """Unitary swap ``A (x) B -> B (x) A``."""
    u = np.zeros((d1 * d2, d1 * d2))
    for i in range(d1):
        for j in range(d2):
            u[j * d1 + i, i * d2 + j] = 1.0
    return unitary_channel(u)


def mix(channels: Sequence[Channel], weights: Sequence[float]) -> Channel:
    """Convex combination of channels with equal dimensions."""
    w = np.asarray(weights, dtype=float)
    if len(channels) != w.size or np.any(w < -1e-12) or abs(w.sum() - 1.0) > 1e-9:
        raise InvalidInput("weights must be a probability vector matching the channels")
    for c in channels[1:]:
        _same_dims(channels[0], c)
    j = sum(float(wi) * c.choi for wi, c in zip(w, channels))
    return channel_from_choi(j, channels[0].dim_in, channels[0].dim_out)


def constant_output(channel: Channel, tol: float = 1e-9) -> Optional[np.ndarray]:
    """The output state if ``channel`` is a replacer channel, else ``None``."""
    sigma = np.trace(channel.choi_tensor, axis1=0, axis2=2) / channel.dim_in
    if np.max(np.abs(channel.choi - np.kron(np.eye(channel.dim_in), sigma))) <= tol:
        return hermitian_part(sigma)
    return None


def cq_states(channel: Union[Channel, Cq], tol: float = 1e-9) -> List[np.ndarray]:
    """Output states ``N(|i><i|)`` of a classical-quantum channel."""
    if isinstance(channel, Cq):
        return [ensure_density(s) for s in channel.states]
    j4 = channel.choi_tensor
    din = channel.dim_in
    for i in range(din):
        for k in range(din):
            if i != k and np.max(np.abs(j4[i, :, k, :])) > tol:
                raise NotCqChannel("off-diagonal input blocks of the Choi matrix do not vanish")
    return [hermitian_part(j4[i, :, i, :]) for i in range(din)]


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _encode(m: np.ndarray):
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _decode(data, what: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{what}: malformed numeric data") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise InvalidInput(f"{what}: expected a matrix of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def encode_matrix(m: np.ndarray):
    return _encode(m)


def decode_matrix(data, what: str = "matrix") -> np.ndarray:
    return _decode(data, what)


def channel_to_dict(channel: Channel, repr: str = "choi") -> dict:
    if repr != "choi":
        raise InvalidInput("channels are serialized in the choi representation")
    doc = {
        "version": 1,
        "dim_in": channel.dim_in,
        "dim_out": channel.dim_out,
        "repr": "choi",
        "data": _encode(channel.choi),
    }
    if channel.label is not None:
        doc["label"] = channel.label
    return doc


def channel_from_dict(doc: dict) -> Channel:
    if not isinstance(doc, dict):
        raise InvalidInput("channel document must be a JSON object")
    if doc.get("version") != 1:
        raise InvalidInput("unsupported channel file version")
    try:
        din = int(doc["dim_in"])
        dout = int(doc["dim_out"])
        kind = doc["repr"]
        data = doc["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"channel document missing field: {exc}") from exc
    label = doc.get("label")
    if kind == "choi":
        rep = Choi(din, dout, _decode(data, "choi"))
    elif kind == "unitary":
        rep = Unitary(_decode(data, "unitary"))
    elif kind == "kraus":
        rep = Kraus([_decode(k, f"kraus[{i}]") for i, k in enumerate(data)])
    elif kind == "cq":
        rep = Cq([_decode(s, f"cq[{i}]") for i, s in enumerate(data)])
    else:
        raise InvalidInput(f"unknown repr {kind!r}")
    ch = to_choi(rep, label=label)
    if (ch.dim_in, ch.dim_out) != (din, dout):
        raise DimensionMismatch("declared dimensions do not match the data")
    return ch


def save_channel(channel: Channel, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(channel_to_dict(channel)), encoding="utf-8")


def load_channel(path: Union[str, Path]) -> Channel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: not valid JSON ({exc})") from exc
    return channel_from_dict(doc)


__all__ = [
    "Channel",
    "ChannelRepr",
    "Choi",
    "Cq",
    "HermitianPreservingMap",
    "Kraus",
    "Unitary",
    "adjoint_apply",
    "apply",
    "channel_from_choi",
    "channel_from_dict",
    "channel_to_dict",
    "completely_depolarizing",
    "compose",
    "constant_channel",
    "constant_output",
    "cq_states",
    "dephasing",
    "depolarizing",
    "identity",
    "load_channel",
    "mix",
    "permute_systems",
    "random_channel",
    "random_unitary_channel",
    "save_channel",
    "state_preparation",
    "swap_channel",
    "tensor",
    "tensor_all",
    "tensor_map",
    "tensor_power",
    "to_choi",
    "trace_channel",
    "unitary_channel",
]
