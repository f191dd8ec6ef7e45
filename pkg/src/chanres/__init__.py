"""Resource theory of quantum channels: channel calculus, conic monotones and protocols.

Sub-modules
-----------
channel    Choi-matrix channel calculus, constructors and JSON files.
states     Entropies, max-relative entropy and majorization on states.
conic      Self-contained interior-point SDP solver and modelling layer.
freesets   Free-channel cones (constant, MIO, Gibbs-preserving, max-mixed, custom).
norms      Diamond norm and distance to a free cone.
monotones  Robustness, smooth max-relative entropy, I_max, powers, cost brackets.
protocols  Convex split, catalytic erasure, superchannels and simulation checks.
cli        ``chanres`` command-line front end.
"""

from . import errors
from .channel import (
    Channel,
    Choi,
    Cq,
    HermitianPreservingMap,
    Kraus,
    Unitary,
    adjoint_apply,
    apply,
    channel_from_choi,
    completely_depolarizing,
    compose,
    constant_channel,
    dephasing,
    depolarizing,
    identity,
    load_channel,
    mix,
    random_channel,
    save_channel,
    tensor,
    tensor_power,
    to_choi,
    unitary_channel,
)
from .conic import Model, SolveResult, SolverOptions, solve
from .freesets import FreeSetSpec, axiom_check, is_free, load_free_set, sample_free
from .monotones import (
    channel_dmax,
    channel_dmax_smooth,
    channel_rel_ent,
    cq_asymptotic_cost,
    generating_power,
    i_max,
    increasing_power,
    log_robustness,
    mio_cost_bracket,
    monotone_suite,
    robustness,
)
from .norms import diamond_distance, diamond_distance_to_free, diamond_norm
from .protocols import apply_superchannel, convex_split, erasure_protocol, verify_simulation
from .states import (
    coherence_rel_ent,
    free_energy,
    io_unitary_necessary_condition,
    majorizes,
    relative_entropy,
    state_dmax,
    von_neumann_entropy,
)

__version__ = "0.1.0"

__all__ = [
    "Channel",
    "Choi",
    "Cq",
    "FreeSetSpec",
    "HermitianPreservingMap",
    "Kraus",
    "Model",
    "SolveResult",
    "SolverOptions",
    "Unitary",
    "adjoint_apply",
    "apply",
    "apply_superchannel",
    "axiom_check",
    "channel_dmax",
    "channel_dmax_smooth",
    "channel_from_choi",
    "channel_rel_ent",
    "coherence_rel_ent",
    "completely_depolarizing",
    "compose",
    "constant_channel",
    "convex_split",
    "cq_asymptotic_cost",
    "dephasing",
    "depolarizing",
    "diamond_distance",
    "diamond_distance_to_free",
    "diamond_norm",
    "erasure_protocol",
    "errors",
    "free_energy",
    "generating_power",
    "i_max",
    "identity",
    "increasing_power",
    "io_unitary_necessary_condition",
    "is_free",
    "load_channel",
    "load_free_set",
    "log_robustness",
    "majorizes",
    "mio_cost_bracket",
    "mix",
    "monotone_suite",
    "random_channel",
    "relative_entropy",
    "robustness",
    "sample_free",
    "save_channel",
    "solve",
    "state_dmax",
    "tensor",
    "tensor_power",
    "to_choi",
    "unitary_channel",
    "verify_simulation",
    "von_neumann_entropy",
]
