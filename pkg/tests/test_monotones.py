import math

import numpy as np
import pytest

from chanres import channel as ch
from chanres.conic import SolverOptions
from chanres.errors import DimensionMismatch, InvalidInput
from chanres.freesets import FreeSetSpec, is_free, sample_free
from chanres.linalg import random_density
from chanres.monotones import (
    CoherenceMonotone,
    FreeEnergyMonotone,
    _rel_ent_objective,
    channel_dmax,
    channel_dmax_smooth,
    channel_rel_ent,
    cq_asymptotic_cost,
    generating_power,
    i_max,
    i_max_cross_check,
    increasing_power,
    mio_cost_bracket,
    monotone_suite,
    robustness,
)
from chanres.norms import diamond_distance

H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
HAD = ch.unitary_channel(H)
PLUS = np.full((2, 2), 0.5)
HQ = np.diag([0.0, 1.0])


def _herm(rng, d):
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (a + a.conj().T) / 2


# -- D_max -----------------------------------------------------------------

def test_dmax_identity_vs_replacer():
    for d in (2, 3):
        assert abs(channel_dmax(ch.identity(d), ch.completely_depolarizing(d)) - 2 * math.log2(d)) < 1e-9


def test_dmax_eig_and_sdp_agree(rng):
    n, m = ch.random_channel(2, 2, rng), ch.random_channel(2, 2, rng)
    assert abs(channel_dmax(n, m) - channel_dmax(n, m, method="sdp")) < 1e-6


def test_dmax_support_violation_is_inf():
    assert channel_dmax(ch.identity(2), ch.constant_channel(np.diag([1.0, 0.0]), 2)) == math.inf


def test_dmax_self_is_zero(rng):
    n = ch.random_channel(2, 2, rng)
    assert abs(channel_dmax(n, n)) < 1e-9
    with pytest.raises(DimensionMismatch):
        channel_dmax(n, ch.identity(3))


def test_smooth_dmax_endpoints_and_order(rng):
    n, m = ch.identity(2), ch.completely_depolarizing(2)
    r0 = channel_dmax_smooth(n, m, 0.0)
    assert abs(r0.value - 2.0) < 1e-9
    vals = [channel_dmax_smooth(n, m, e).value for e in (0.0, 0.05, 0.2)]
    assert vals[0] >= vals[1] - 1e-7 >= vals[2] - 2e-7
    r = channel_dmax_smooth(n, m, 0.2)
    assert r.state_lower_bound <= r.value + 1e-6
    assert diamond_distance(n, r.smoothed) <= 0.2 + 1e-6
    # at eps = 1 every channel is within reach of m itself
    assert abs(channel_dmax_smooth(n, m, 1.0).value) < 1e-6
    with pytest.raises(InvalidInput):
        channel_dmax_smooth(n, m, 1.5)


def test_smooth_dmax_survives_state_bound_failure(monkeypatch):
    from chanres import monotones
    from chanres.conic import SolveResult
    from chanres.errors import SolverFailure

    def stalled(*args, **kwargs):
        raise SolverFailure("stalled", SolveResult("NumericalTrouble", math.nan, np.zeros(1), math.inf, 1e-6))

    monkeypatch.setattr(monotones, "_state_smooth_dmax", stalled)
    n, m = ch.identity(2), ch.completely_depolarizing(2)
    r = channel_dmax_smooth(n, m, 0.1)
    assert r.status == "Optimal"
    assert math.isnan(r.state_lower_bound)
    assert r.state_bound_status == "NumericalTrouble"
    assert r.value <= 2.0 + 1e-7


# -- robustness and I_max --------------------------------------------------

def test_hadamard_mio_robustness():
    r = robustness(HAD, FreeSetSpec.mio(2))
    assert abs(r.robustness - 1.0) < 1e-7
    assert abs(r.log_robustness - math.log2(1 + r.robustness)) < 1e-12
    assert is_free(r.optimal_free, FreeSetSpec.mio(2), tol=1e-6)


def test_robustness_of_free_channel_is_zero():
    spec = FreeSetSpec.mio(2)
    assert robustness(sample_free(spec, 3), spec).log_robustness < 1e-7


def test_mixing_channel_with_itself_leaves_robustness_unchanged(rng):
    n = ch.random_channel(2, 2, rng)
    spec = FreeSetSpec.maxmixed(2)
    a = robustness(n, spec).robustness
    b = robustness(ch.mix([n, n], [0.3, 0.7]), spec).robustness
    assert abs(a - b) < 1e-6


def test_smoothed_robustness_witness(rng):
    n = ch.random_channel(2, 2, rng)
    r = robustness(n, FreeSetSpec.mio(2), eps=0.1)
    assert r.optimal_smoothed is not None
    assert diamond_distance(n, r.optimal_smoothed) <= 0.1 + 1e-6
    assert r.log_robustness <= robustness(n, FreeSetSpec.mio(2)).log_robustness + 1e-7


def test_robustness_witness_attains_dmax(rng):
    n = ch.random_channel(2, 2, rng)
    r = robustness(n, FreeSetSpec.maxmixed(2))
    assert abs(channel_dmax(n, r.optimal_free) - r.log_robustness) < 1e-6


def test_i_max_examples():
    assert abs(i_max(ch.identity(2)) - 2.0) < 1e-6
    assert abs(i_max(ch.identity(3)) - 2 * math.log2(3)) < 1e-6
    assert abs(i_max(ch.completely_depolarizing(2))) < 1e-6


def test_i_max_cross_check(rng):
    a, b, ok = i_max_cross_check(ch.random_channel(2, 2, rng))
    assert ok and abs(a - b) < 1e-6


# -- relative entropy --------------------------------------------------------

def test_rel_ent_identity_vs_replacer():
    r = channel_rel_ent(ch.identity(2), ch.completely_depolarizing(2))
    assert abs(r.value - 2.0) < 1e-8
    assert r.consistent and not r.certified


def test_rel_ent_equal_channels_is_zero(rng):
    n = ch.random_channel(2, 2, rng)
    assert abs(channel_rel_ent(n, n, starts=3).value) < 1e-9


def test_rel_ent_below_dmax(rng):
    for _ in range(3):
        n, m = ch.random_channel(2, 2, rng), ch.random_channel(2, 2, rng)
        r = channel_rel_ent(n, m, starts=5)
        assert r.consistent
        assert r.value >= 0


def test_rel_ent_gradient_finite_difference(rng):
    n, m = ch.random_channel(2, 2, rng), ch.random_channel(2, 2, rng)
    f, grad = _rel_ent_objective(n, m)
    k = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    k /= np.linalg.norm(k)
    g = grad(k)
    h = 1e-6
    for _ in range(4):
        d = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        fd = (f(k + h * d) - f(k - h * d)) / (2 * h)
        assert abs(fd - np.real(np.vdot(g, d))) < 1e-6


@pytest.mark.parametrize("mono", [CoherenceMonotone(), FreeEnergyMonotone(HQ, 1.5)], ids=["coh", "free-energy"])
def test_state_monotone_gradients(mono, rng):
    rho = random_density(2, rng)
    g = mono.gradient(rho)
    h = 1e-6
    for _ in range(3):
        d = _herm(rng, 2)
        d -= np.trace(d) / 2 * np.eye(2)
        fd = (mono.value(rho + h * d) - mono.value(rho - h * d)) / (2 * h)
        assert abs(fd - np.real(np.trace(g @ d))) < 1e-6


# -- powers ----------------------------------------------------------------

def test_hadamard_coherence_powers():
    gp = generating_power(HAD, starts=4)
    ip = increasing_power(HAD, starts=4)
    assert abs(gp.value - 1.0) < 1e-6 and abs(ip.value - 1.0) < 1e-6
    assert gp.value <= ip.value + 1e-12
    gpc = generating_power(HAD, complete=True, starts=4)
    ipc = increasing_power(HAD, complete=True, starts=4)
    assert gp.value <= gpc.value + 1e-12 and ip.value <= ipc.value + 1e-12
    assert gpc.ancilla_dim_used == 2


def test_power_value_matches_reported_state():
    ip = increasing_power(HAD, starts=4)
    rho = ip.maximizing_state
    mono = CoherenceMonotone()
    assert ip.value >= mono.value(ch.apply(HAD, rho)) - mono.value(rho) - 1e-9


def test_identity_has_zero_increasing_power():
    assert abs(increasing_power(ch.identity(2), starts=4).value) < 1e-9


def test_thermal_powers():
    tau = FreeSetSpec.gibbs(HQ, 2.0).gibbs_state(2)
    omega = ("free_energy", HQ, 2.0)
    assert abs(increasing_power(ch.constant_channel(tau, 2), omega, starts=4).value) < 1e-9
    zero = ch.constant_channel(np.diag([1.0, 0.0]), 2)
    # F(|0>) - F(tau) = D(|0><0| || tau)/beta in nats
    expected = math.log(1 + math.exp(-2.0)) / 2.0
    assert abs(increasing_power(zero, omega, starts=4).value - expected) < 1e-7
    assert abs(generating_power(zero, omega).value - expected) < 1e-7


def test_callable_monotone():
    from chanres.states import von_neumann_entropy
    gp = generating_power(ch.completely_depolarizing(2), lambda r: -von_neumann_entropy(r), starts=3)
    assert gp.value <= 1e-9


# -- bracket and cq cost -----------------------------------------------------

@pytest.mark.parametrize("tol,atol", [(1e-8, 1e-7), (1e-6, 1e-5)])
def test_hadamard_bracket_regression(tol, atol):
    opts = SolverOptions(gap_tol=tol, feas_tol=tol)
    b0 = mio_cost_bracket(HAD, 0.0, opts)
    assert abs(b0.lower - 1.0) < atol and b0.upper == 1.0
    b1 = mio_cost_bracket(HAD, 0.05, opts)
    assert abs(b1.lower - 0.9259994185562233) < atol and b1.upper == 1.0
    assert b1.gap <= 1.0


def test_cq_cost():
    assert abs(cq_asymptotic_cost(ch.Cq([PLUS, np.diag([1.0, 0.0])])) - 1.0) < 1e-12
    p = 0.8
    rho = p * PLUS + (1 - p) * np.eye(2) / 2  # eigenvalues (1 +- p)/2, diagonal (1/2, 1/2)
    lam = np.array([(1 + p) / 2, (1 - p) / 2])
    expected = 1.0 + float(np.sum(lam * np.log2(lam)))
    assert abs(cq_asymptotic_cost(ch.to_choi(ch.Cq([rho, np.eye(2) / 2]))) - expected) < 1e-12


# -- suite -------------------------------------------------------------------

def test_monotone_suite_constant_cone():
    rep = monotone_suite(FreeSetSpec.constant(2), trials=50, seed=0)
    assert rep.violations == []
    assert rep.checks["left_composition"] == 50
    assert rep.to_dict()["violations"] == []
