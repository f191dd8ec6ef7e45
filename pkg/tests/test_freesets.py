import json

import numpy as np
import pytest

from chanres import channel as ch
from chanres.errors import DimensionMismatch, InvalidInput, UnsupportedKind, UnsupportedKindDimensions
from chanres.freesets import FreeSetSpec, LinearConstraint, axiom_check, is_free, load_free_set, sample_free

H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
HQ = np.diag([0.0, 1.0])

SPECS = [
    FreeSetSpec.constant(2),
    FreeSetSpec.mio(2),
    FreeSetSpec.maxmixed(2),
    FreeSetSpec.gibbs(HQ, 1.5),
    FreeSetSpec.mio(2, 3),
    FreeSetSpec.constant(3, 2),
]


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.describe())
def test_samples_are_free(spec):
    for seed in range(5):
        assert is_free(sample_free(spec, seed), spec)


def test_membership_examples():
    mio = FreeSetSpec.mio(2)
    assert is_free(ch.identity(2), mio)
    assert is_free(ch.dephasing(2), mio)
    assert not is_free(ch.unitary_channel(H), mio)
    const = FreeSetSpec.constant(2)
    assert is_free(ch.constant_channel(np.diag([0.3, 0.7]), 2), const)
    assert not is_free(ch.identity(2), const)
    mm = FreeSetSpec.maxmixed(2)
    assert is_free(ch.unitary_channel(H), mm)
    assert not is_free(ch.constant_channel(np.diag([1.0, 0.0]), 2), mm)


def test_gibbs_preserving_membership():
    spec = FreeSetSpec.gibbs(HQ, 2.0)
    tau = spec.gibbs_state(2)
    assert is_free(ch.constant_channel(tau, 2), spec)
    assert not is_free(ch.unitary_channel(np.array([[0, 1], [1, 0]])), spec)
    # tensor powers carry the non-interacting Hamiltonian
    sq = spec.tensor_square()
    assert np.allclose(sq.gibbs_state(4), np.kron(tau, tau))
    assert np.allclose(sq.local_hamiltonian(4), np.kron(HQ, np.eye(2)) + np.kron(np.eye(2), HQ))
    with pytest.raises(UnsupportedKindDimensions):
        spec.gibbs_state(3)


def test_custom_cone_matches_mio():
    # "diagonal output blocks have zero off-diagonal entries" written as custom constraints
    cons = []
    for i in range(2):
        for re in (True, False):
            c = np.zeros((4, 4), dtype=complex)
            a, b = 2 * i + 0, 2 * i + 1
            if re:
                c[a, b] = c[b, a] = 0.5
            else:
                c[a, b], c[b, a] = 0.5j, -0.5j
            cons.append(LinearConstraint(c))
    spec = FreeSetSpec.custom(2, 2, cons)
    assert is_free(ch.dephasing(2), spec)
    assert not is_free(ch.unitary_channel(H), spec)
    with pytest.raises(UnsupportedKind):
        axiom_check(spec)


def test_spec_validation():
    with pytest.raises(InvalidInput):
        FreeSetSpec("bogus", 2, 2)
    with pytest.raises(InvalidInput):
        FreeSetSpec.gibbs(HQ, -1.0)
    with pytest.raises(InvalidInput):
        LinearConstraint(np.eye(4), op="!=")
    with pytest.raises(DimensionMismatch):
        FreeSetSpec.custom(2, 2, [LinearConstraint(np.eye(3))])


def test_spec_json_round_trip(tmp_path):
    for spec in SPECS:
        p = tmp_path / "f.json"
        p.write_text(json.dumps(spec.to_dict()))
        back = load_free_set(p)
        assert back.describe() == spec.describe()
    p.write_text("[1, 2]")
    with pytest.raises(InvalidInput):
        load_free_set(p)


def test_axiom_report_mio_all_pass():
    rep = axiom_check(FreeSetSpec.mio(2), trials=5)
    assert [f.status for f in rep.findings] == ["pass"] * 7
    assert rep.violations == []


def test_axiom_report_constant_flags_identity_and_swap():
    rep = axiom_check(FreeSetSpec.constant(2), trials=5)
    assert rep.status(1) == "pass"
    assert rep.status(6) == "pass"
    assert rep.status(3) == "fail"
    assert rep.status(7) == "fail"
    assert "swap" in next(f.witness for f in rep.findings if f.axiom == 7)
    assert rep.to_dict()["trials"] == 5
