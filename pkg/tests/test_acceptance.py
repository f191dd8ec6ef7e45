"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every reference value is produced by an oracle that does not share code with
the quantity under test (eigensolves, closed forms, direct enumeration).
"""

import math

import numpy as np

from chanres import channel as ch
from chanres.freesets import FreeSetSpec
from chanres.linalg import random_density, random_unitary
from chanres.monotones import (
    channel_dmax,
    channel_dmax_smooth,
    cq_asymptotic_cost,
    generating_power,
    i_max,
    increasing_power,
    mio_cost_bracket,
    monotone_suite,
    robustness,
)
from chanres.norms import diamond_distance
from chanres.protocols import constant_split_distance, convex_split, erasure_protocol
from chanres.states import io_unitary_necessary_condition, majorizes

RESULTS = {}
H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def _report(k, ok, detail):
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[k] = line
    print(line)
    assert ok, line


def _choi_ratio_oracle(jn, jm):
    w, v = np.linalg.eigh(jm)
    isq = v @ np.diag(w ** -0.5) @ v.conj().T
    return math.log2(np.linalg.eigvalsh(isq @ jn @ isq).max())


def _unitary_oracle(u, v):
    """1/2 ||U - V||_diamond = sqrt(1 - nu^2), nu = dist(0, conv eig(U^dag V))."""
    phases = np.sort(np.mod(np.angle(np.linalg.eigvals(u.conj().T @ v)), 2 * np.pi))
    gaps = np.diff(np.concatenate([phases, [phases[0] + 2 * np.pi]]))
    arc = 2 * np.pi - gaps.max()  # shortest arc containing every eigenvalue
    nu = math.cos(arc / 2) if arc < np.pi else 0.0
    return math.sqrt(max(0.0, 1 - nu * nu))


def _majorizes_oracle(p, q):
    """p majorizes q iff sum_i max(p_i - t, 0) >= sum_i max(q_i - t, 0) for every t."""
    ts = np.concatenate([p, q])
    return all(np.maximum(p - t, 0).sum() >= np.maximum(q - t, 0).sum() - 1e-12 for t in ts)


def _coherence_oracle(rho):
    p = np.real(np.diag(rho))
    lam = np.linalg.eigvalsh(rho)
    h = lambda x: -sum(a * math.log2(a) for a in x if a > 1e-15)  # noqa: E731
    return h(p) - h(lam)


def test_criterion_01_dmax_constants():
    worst = 0.0
    for d in (2, 3):
        n, m = ch.identity(d), ch.completely_depolarizing(d)
        oracle = _choi_ratio_oracle(n.choi, m.choi)
        assert abs(oracle - 2 * math.log2(d)) < 1e-12
        for method in ("eig", "sdp"):
            worst = max(worst, abs(channel_dmax(n, m, method=method) - oracle))
    _report(1, worst <= 1e-5, f"max |D_max - 2 log2 d| = {worst:.2e} (tol 1e-5)")


def test_criterion_02_imax_consistency():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(20):
        n = ch.random_channel(2, 2, rng)
        lr = robustness(n, FreeSetSpec.constant(2)).log_robustness
        worst = max(worst, abs(i_max(n) - lr))
    ident = abs(i_max(ch.identity(2)) - 2.0)
    _report(2, worst <= 1e-5 and ident <= 1e-5,
            f"max |I_max - LR_const| = {worst:.2e}, |I_max(id2) - 2| = {ident:.2e} (tol 1e-5)")


def test_criterion_03_diamond_unitary_oracle():
    rng = np.random.default_rng(3)
    worst = 0.0
    for t in range(20):
        d = 2 if t % 2 == 0 else 3
        u, v = random_unitary(d, rng), random_unitary(d, rng)
        got = diamond_distance(ch.unitary_channel(u), ch.unitary_channel(v))
        worst = max(worst, abs(got - _unitary_oracle(u, v)))
    z = abs(diamond_distance(ch.identity(2), ch.unitary_channel(np.diag([1.0, -1.0]))) - 1.0)
    _report(3, worst <= 1e-5 and z <= 1e-6,
            f"max |SDP - oracle| = {worst:.2e} (tol 1e-5), |id vs Z - 1| = {z:.2e} (tol 1e-6)")


def test_criterion_04_convex_split_bound():
    rng = np.random.default_rng(4)
    violations, checked, same = 0, 0, 0.0
    for _ in range(20):
        a = ch.constant_channel(random_density(2, rng), 2)
        b = ch.constant_channel(random_density(2, rng), 2)  # full rank, so lambda is finite
        for n in (2, 4, 8, 16):
            rep = convex_split(a, b, n)
            assert rep.used_shortcut
            checked += 1
            violations += rep.measured_distance > rep.bound
        same = max(same, convex_split(a, a, 8).measured_distance)
    # general (non-constant) qubit pair through the full diamond SDP
    a = ch.depolarizing(2, 0.3)
    b = ch.mix([ch.dephasing(2), ch.completely_depolarizing(2)], [0.5, 0.5])
    gen = convex_split(a, b, 3)
    ok = violations == 0 and same <= 1e-9 and gen.method == "sdp" and gen.measured_distance <= gen.bound
    _report(4, ok, f"{violations}/{checked} shortcut violations, alpha=beta distance {same:.1e}, "
                   f"general n=3: {gen.measured_distance:.4f} <= {gen.bound:.4f}")


def _constant_family(rng):
    states = []
    for th in np.linspace(0, np.pi, 7):
        psi = np.array([math.cos(th / 2), math.sin(th / 2)])
        states.append(np.outer(psi, psi))
    states += [random_density(2, rng) for _ in range(4)]
    hq = np.diag([0.0, 1.0])
    specs = [FreeSetSpec.gibbs(hq, 2.0), FreeSetSpec.gibbs(hq, 4.0), FreeSetSpec.maxmixed(2),
             FreeSetSpec.constant(2)]
    return [(ch.constant_channel(s, 2), sp) for s in states for sp in specs]


def test_criterion_05_erasure_protocol():
    eps, eta = 0.6, 0.1
    delta = math.sqrt(eps * (2 - eps))
    bad = []
    fam = _constant_family(np.random.default_rng(5))
    for i, (n, spec) in enumerate(fam):
        rep = erasure_protocol(n, spec, eps, eta)
        lr_delta = robustness(n, spec, delta).log_robustness if delta < 1 else 0.0
        ok = (rep.executed and rep.achieved_distance <= eps
              and rep.cost_bits <= rep.lr_value + 2 * math.log2(1 / eta) - 1 + 1
              and lr_delta <= rep.cost_bits + 1e-6)
        if not ok:
            bad.append(i)
    _report(5, not bad, f"{len(fam) - len(bad)}/{len(fam)} constant-channel cases satisfy "
                        f"distance <= eps, cost bound and LR^delta <= cost (failing: {bad})")


def test_criterion_06_monotone_axioms_and_powers():
    counts = {}
    for spec in (FreeSetSpec.mio(2), FreeSetSpec.maxmixed(2)):
        rep = monotone_suite(spec, trials=50, seed=6, slack=1e-6)
        counts[spec.kind] = len(rep.violations)
    rng = np.random.default_rng(6)
    chans = [ch.unitary_channel(H)] + [ch.random_channel(2, 2, rng) for _ in range(3)]
    order_bad = 0
    evaluations = 0
    for n in chans:
        for omega in ("coherence", ("free_energy", np.diag([0.0, 1.0]), 2.0)):
            gp = generating_power(n, omega, starts=6)
            ip = increasing_power(n, omega, starts=6)
            gpc = generating_power(n, omega, complete=True, starts=6)
            ipc = increasing_power(n, omega, complete=True, starts=6)
            evaluations += 4
            order_bad += (gp.value > ip.value) + (gpc.value > ipc.value)
            order_bad += (gp.value > gpc.value) + (ip.value > ipc.value)
    ok = all(v == 0 for v in counts.values()) and order_bad == 0
    _report(6, ok, f"suite violations {counts} (50 trials each, slack 1e-6); "
                   f"{order_bad} ordering violations over {evaluations} power evaluations")


def test_criterion_07_dmax_additivity():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        n1, m1, n2, m2 = (ch.random_channel(2, 2, rng) for _ in range(4))
        lhs = channel_dmax(ch.tensor(n1, n2), ch.tensor(m1, m2))
        worst = max(worst, abs(lhs - channel_dmax(n1, m1) - channel_dmax(n2, m2)))
    _report(7, worst <= 1e-7, f"max additivity defect {worst:.2e} (tol 1e-7)")


def test_criterion_08_mio_bracket_and_cq_cost():
    rng = np.random.default_rng(8)
    bad, worst_gap = 0, 0.0
    for _ in range(20):
        n = ch.random_channel(2, 2, rng)
        for eps in (0.0, 0.05):
            b = mio_cost_bracket(n, eps)
            worst_gap = max(worst_gap, b.gap)
            bad += not (b.lower <= b.upper + 1e-9 and b.gap <= 1.0)
    plus = np.full((2, 2), 0.5)
    p = 0.6
    tilted = p * plus + (1 - p) * np.diag([0.9, 0.1])
    cases = [
        ([plus, np.diag([1.0, 0.0])], 1.0),
        ([np.diag([0.3, 0.7]), np.eye(2) / 2], 0.0),
        ([tilted, np.diag([1.0, 0.0])], _coherence_oracle(tilted)),
    ]
    cq_err = max(abs(cq_asymptotic_cost(ch.Cq(s)) - v) for s, v in cases)
    _report(8, bad == 0 and cq_err <= 1e-8,
            f"{bad} bracket failures over 40 evaluations (max gap {worst_gap:.3f} bits); "
            f"cq cost error {cq_err:.1e} (tol 1e-8)")


def test_criterion_09_majorization():
    ok_io = io_unitary_necessary_condition(np.eye(2), H) and not io_unitary_necessary_condition(H, np.eye(2))
    rng = np.random.default_rng(9)
    disagree, positives = 0, 0
    for t in range(100):
        k = int(rng.integers(2, 6))
        p = rng.dirichlet(np.ones(k))
        if t % 2:
            # a doubly-stochastic image of p is always majorized by p
            perm = np.eye(k)[rng.permutation(k)]
            w = rng.random()
            q = w * p + (1 - w) * perm @ p
        else:
            q = rng.dirichlet(np.ones(k))
        truth = _majorizes_oracle(p, q)
        positives += truth
        disagree += majorizes(p, q) != truth
    _report(9, ok_io and disagree == 0,
            f"I->H / H->I condition {'as expected' if ok_io else 'WRONG'}; "
            f"{disagree}/100 disagreements with the oracle ({positives} majorizing pairs)")


def test_criterion_10_smoothing_sanity():
    rng = np.random.default_rng(10)
    grid = (0.0, 0.05, 0.1, 0.2)
    mono_bad, zero_err = 0, 0.0
    for _ in range(10):
        n, m = ch.random_channel(2, 2, rng), ch.random_channel(2, 2, rng)
        spec = FreeSetSpec.mio(2)
        dm = [channel_dmax_smooth(n, m, e).value for e in grid]
        lr = [robustness(n, spec, e).log_robustness for e in grid]
        for seq in (dm, lr):
            mono_bad += sum(b > a + 1e-7 for a, b in zip(seq, seq[1:]))
        zero_err = max(zero_err, abs(dm[0] - channel_dmax(n, m)),
                       abs(lr[0] - robustness(n, spec).log_robustness))
    _report(10, mono_bad == 0 and zero_err <= 1e-6,
            f"{mono_bad} monotonicity violations on the eps grid (slack 1e-7); "
            f"eps=0 reproduction error {zero_err:.1e} (tol 1e-6)")
