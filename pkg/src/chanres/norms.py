"""Diamond norm and diamond distance to a free cone, computed by semidefinite programming.

For a Hermitian-preserving map with Choi matrix ``J`` we use

    ||Phi||_diamond = min  || Tr_out (P + Q) ||_inf   s.t.  P - Q = J,  P, Q >= 0,

eliminating ``Q = P - J``.  For a difference of channels ``Tr_out J = 0`` and
this reduces to the familiar ``2 min ||Tr_out Z||_inf`` over ``Z >= 0, Z >= J``.
Distances are reported as *half* diamond norms throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .channel import Channel, HermitianPreservingMap, channel_from_choi
from .conic import Model, SolveResult, SolverOptions
from .errors import DimensionMismatch
from .freesets import FreeSetSpec, compile as compile_cone


def _is_real(*arrays) -> bool:
    return all(np.max(np.abs(np.imag(a)), initial=0.0) == 0.0 for a in arrays)


def spec_is_real(spec: FreeSetSpec) -> bool:
    """Whether all data defining the cone are real (real symmetric variables then suffice)."""
    if spec.kind == "gibbs":
        return _is_real(spec.hamiltonian)
    if spec.kind == "custom":
        return _is_real(*[c.matrix for c in spec.constraints])
    return True


def diamond_norm_sdp(phi: Union[HermitianPreservingMap, Channel],
                     options: Optional[SolverOptions] = None):
    """``(||phi||_diamond, SolveResult)``."""
    j = np.asarray(phi.choi)
    din, dout = phi.dim_in, phi.dim_out
    d = din * dout
    m = Model()
    p = m.hermitian(d, real=_is_real(j))
    t = m.scalar()
    m.add_psd(p)
    m.add_psd(p - j)
    m.add_psd(t * np.eye(din) - (2.0 * p - j).ptrace([din, dout], [0]))
    m.minimize(t)
    res = m.solve(options)
    return max(0.0, res.objective_value), res


def diamond_norm(phi: Union[HermitianPreservingMap, Channel], options: Optional[SolverOptions] = None) -> float:
    """Completely bounded trace norm of a Hermitian-preserving map."""
    return diamond_norm_sdp(phi, options)[0]


def diamond_distance(a: Channel, b: Channel, options: Optional[SolverOptions] = None) -> float:
    """Half diamond norm ``1/2 ||a - b||_diamond`` in ``[0, 1]``."""
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        raise DimensionMismatch("channels differ in dimensions")
    return min(1.0, 0.5 * diamond_norm(a - b, options))


@dataclass
class DistanceToFree:
    value: float
    free_channel: Channel
    solve: SolveResult


def diamond_distance_to_free(n: Channel, spec: FreeSetSpec,
                             options: Optional[SolverOptions] = None) -> DistanceToFree:
    """``min_{L free} 1/2 ||n - L||_diamond`` as a single SDP."""
    if (n.dim_in, n.dim_out) != (spec.dim_in, spec.dim_out):
        raise DimensionMismatch("channel and free set differ in dimensions")
    din, dout = n.dim_in, n.dim_out
    d = din * dout
    j = np.asarray(n.choi)
    real = _is_real(j) and spec_is_real(spec)
    m = Model()
    lj = m.hermitian(d, real=real)
    z = m.hermitian(d, real=real)
    t = m.scalar()
    compile_cone(spec, include_tp=True).apply(m, lj)
    m.add_psd(z)
    m.add_psd(z - (j - lj))
    m.add_psd(t * np.eye(din) - z.ptrace([din, dout], [0]))
    m.minimize(t)
    res = m.solve(options)
    free = channel_from_choi(m.value(lj), din, dout, label=f"nearest-{spec.kind}")
    return DistanceToFree(max(0.0, res.objective_value), free, res)


__all__ = [
    "DistanceToFree",
    "diamond_distance",
    "diamond_distance_to_free",
    "diamond_norm",
    "diamond_norm_sdp",
    "spec_is_real",
]
