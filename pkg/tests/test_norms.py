import numpy as np

from chanres import channel as ch
from chanres.freesets import FreeSetSpec, is_free
from chanres.norms import diamond_distance, diamond_distance_to_free, diamond_norm

Z = np.diag([1.0, -1.0])
H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def test_identity_vs_z_is_perfectly_distinguishable():
    assert abs(diamond_distance(ch.identity(2), ch.unitary_channel(Z)) - 1.0) < 1e-6


def test_channel_diamond_norm_is_one(rng):
    assert abs(diamond_norm(ch.random_channel(2, 2, rng)) - 1.0) < 1e-6


def test_depolarizing_distance_closed_form():
    # 1/2 ||id - D_p|| = p (d^2 - 1) / d^2
    for d, p in ((2, 0.3), (3, 0.5)):
        got = diamond_distance(ch.identity(d), ch.depolarizing(d, p))
        assert abs(got - p * (d * d - 1) / d ** 2) < 1e-6


def test_dephasing_distance():
    assert abs(diamond_distance(ch.identity(2), ch.dephasing(2)) - 0.5) < 1e-6


def test_symmetry_and_triangle(rng):
    a, b, c = (ch.random_channel(2, 2, rng) for _ in range(3))
    ab = diamond_distance(a, b)
    assert abs(ab - diamond_distance(b, a)) < 1e-6
    assert ab <= diamond_distance(a, c) + diamond_distance(c, b) + 1e-6


def test_distance_to_constant_cone():
    for d, expected in ((2, 0.75), (3, 8 / 9)):
        res = diamond_distance_to_free(ch.identity(d), FreeSetSpec.constant(d))
        assert abs(res.value - expected) < 1e-6
        assert is_free(res.free_channel, FreeSetSpec.constant(d), tol=1e-6)


def test_distance_to_mio_of_hadamard():
    res = diamond_distance_to_free(ch.unitary_channel(H), FreeSetSpec.mio(2))
    assert abs(res.value - 0.5) < 1e-6
    # the reported free channel actually attains the value
    assert abs(diamond_distance(ch.unitary_channel(H), res.free_channel) - res.value) < 1e-5


def test_free_channel_has_zero_distance():
    res = diamond_distance_to_free(ch.dephasing(2), FreeSetSpec.mio(2))
    assert res.value < 1e-6


def _real_channel(rng):
    # real Kraus operators keep the SDP in the real cone
    g = rng.standard_normal((4, 2))
    q, _ = np.linalg.qr(g)
    return ch.to_choi(ch.Kraus([q[:2], q[2:]]))


def test_full_norm_identity_vs_z():
    assert abs(diamond_norm(ch.identity(2) - ch.unitary_channel(Z)) - 2.0) < 1e-6


def test_orthogonal_constant_channels():
    a = ch.constant_channel(np.diag([1.0, 0.0]), 2)
    b = ch.constant_channel(np.diag([0.0, 1.0]), 2)
    assert abs(diamond_distance(a, b) - 1.0) < 1e-6


def test_stability_under_tensoring(rng):
    a, b = _real_channel(rng), _real_channel(rng)
    c = ch.depolarizing(2, 0.4)
    lhs = diamond_distance(ch.tensor(a, c), ch.tensor(b, c))
    assert abs(lhs - diamond_distance(a, b)) < 1e-6


def test_data_processing(rng):
    a, b = ch.random_channel(2, 2, rng), ch.random_channel(2, 2, rng)
    f = ch.random_channel(2, 2, rng)
    assert diamond_distance(ch.compose(f, a), ch.compose(f, b)) <= diamond_distance(a, b) + 1e-7


def test_distance_to_free_vanishes_iff_free(rng):
    spec = FreeSetSpec.maxmixed(2)
    from chanres.freesets import sample_free
    for seed in range(3):
        assert diamond_distance_to_free(sample_free(spec, seed), spec).value < 1e-6
        n = ch.random_channel(2, 2, rng)
        assert (diamond_distance_to_free(n, spec).value < 1e-6) == is_free(n, spec, tol=1e-6)
