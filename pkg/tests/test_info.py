import math

import numpy as np
import pytest

from chdl.channels import (apply, complementary, dephasing_channel, depolarizing_channel, isometric_channel,
                           unitary_channel)
from chdl.convergence import ChannelSequence
from chdl.info import (DiscreteEnsemble, complementary_sequence, entropic_disturbance, holevo_chi, lsc_experiment,
                       lsc_families, relative_entropy, reversibility_chi_test, von_neumann_entropy)
from chdl.linalg import ket, proj
from chdl.rand import random_channel, random_density_matrix, random_isometry, random_state_vector, random_unitary


def random_ensemble(d, k, rng, rank=None):
    w = rng.dirichlet(np.ones(k))
    return DiscreteEnsemble(w, [random_density_matrix(d, rng, rank) for _ in range(k)])


def test_entropy_examples(rng):
    assert von_neumann_entropy(proj(random_state_vector(3, rng))) == pytest.approx(0.0, abs=1e-12)
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(math.log(4))
    assert von_neumann_entropy(np.eye(4) / 4, base=2) == pytest.approx(2.0)
    ref = -0.25 * math.log(0.25) - 0.75 * math.log(0.75)
    assert von_neumann_entropy(np.diag([0.25, 0.75])) == pytest.approx(ref, abs=1e-14)


def test_relative_entropy_examples(rng):
    rho = random_density_matrix(3, rng)
    assert relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-12)
    assert relative_entropy(proj(ket(0, 2)), proj(ket(1, 2))) == math.inf
    p, q = np.array([0.2, 0.5, 0.3]), np.array([0.4, 0.4, 0.2])
    kl = float(np.sum(p * np.log(p / q)))
    assert relative_entropy(np.diag(p), np.diag(q)) == pytest.approx(kl, abs=1e-13)
    # support inside a rank-deficient σ stays finite
    assert math.isfinite(relative_entropy(np.diag([1.0, 0, 0]), np.diag([0.5, 0.5, 0])))


def test_holevo_examples(rng):
    s = random_density_matrix(3, rng)
    assert holevo_chi(DiscreteEnsemble([0.4, 0.6], [s, s])) == pytest.approx(0.0, abs=1e-12)
    pair = DiscreteEnsemble([0.5, 0.5], [proj(ket(0, 2)), proj(ket(1, 2))])
    assert holevo_chi(pair) == pytest.approx(math.log(2))
    assert holevo_chi(pair, base=2) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        holevo_chi(pair, form="mutual")


def test_holevo_forms_agree(rng):
    for d in (2, 3, 4):
        for _ in range(10):
            mu = random_ensemble(d, 3, rng)
            assert holevo_chi(mu) == pytest.approx(holevo_chi(mu, form="relative"), abs=1e-9)
        pure = random_ensemble(d, 2, rng, rank=1)
        assert holevo_chi(pure) == pytest.approx(holevo_chi(pure, form="relative"), abs=1e-9)


def test_holevo_entropy_identity(rng):
    mu = random_ensemble(3, 4, rng)
    mixed = sum(p * von_neumann_entropy(s) for p, s in zip(mu.weights, mu.states))
    assert holevo_chi(mu) + mixed == pytest.approx(von_neumann_entropy(mu.average()), abs=1e-9)


def test_disturbance_examples(rng):
    mu = random_ensemble(2, 3, rng)
    assert entropic_disturbance(unitary_channel(random_unitary(2, rng)), mu) == pytest.approx(0.0, abs=1e-10)
    assert entropic_disturbance(depolarizing_channel(2), mu) == pytest.approx(holevo_chi(mu), abs=1e-10)
    plus = np.full((2, 2), 0.5)
    mu = DiscreteEnsemble([0.5, 0.5], [proj(ket(0, 2)), plus])
    image = DiscreteEnsemble([0.5, 0.5], [np.diag([1.0, 0.0]), np.diag([0.5, 0.5])])
    expected = holevo_chi(mu) - holevo_chi(image)
    assert entropic_disturbance(dephasing_channel(2), mu) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_disturbance_monotone(dims):
    rng = np.random.default_rng(dims[0] * 7 + dims[1])
    for _ in range(200):
        ch = random_channel(dims[0], dims[1], int(rng.integers(1, 4)) + 1, rng)
        mu = random_ensemble(dims[0], int(rng.integers(2, 5)), rng)
        assert entropic_disturbance(ch, mu) >= -1e-9


def test_isometric_invariance(rng):
    mu = random_ensemble(2, 3, rng)
    ch = isometric_channel(random_isometry(4, 2, rng))
    assert holevo_chi(mu.image(ch)) == pytest.approx(holevo_chi(mu), abs=1e-9)


def test_lsc_constant(rng):
    ch = random_channel(2, 2, 2, rng)
    mu = random_ensemble(2, 2, rng)
    rep = lsc_experiment(ChannelSequence(ch, lambda n: ch, 5), [mu] * 6)
    assert rep.margin == 0.0
    assert max(rep.values) - min(rep.values) < 1e-12


@pytest.mark.parametrize("name", ["depolarizing", "counterexample", "complementary"])
def test_lsc_families(name):
    seq, ens = lsc_families(m=8)[name]
    rep = lsc_experiment(seq, ens)
    assert rep.margin == 0.0
    assert not rep.defect
    assert min(rep.tail) >= rep.limit_value - 1e-7


def test_lsc_flags_a_defect():
    # disturbance jumps up at the limit: constant identity members, limit fully depolarizing
    seq = ChannelSequence(depolarizing_channel(2), lambda n: depolarizing_channel(2, 0.0), 4)
    mu = DiscreteEnsemble([0.5, 0.5], [proj(ket(0, 2)), proj(ket(1, 2))])
    rep = lsc_experiment(seq, lambda n: mu)
    assert rep.defect
    assert rep.margin == pytest.approx(math.log(2))


def test_complementary_continuity_chain():
    # depolarizing rates converge, so both χ(Φ_n(μ)) and χ(Φ̂_n(μ)) converge
    seq, ens = lsc_families(m=8, n_max=16)["depolarizing"]
    comp = complementary_sequence(seq)
    mu = ens[0]
    for chain in (seq, comp):
        vals = [holevo_chi(mu.image(chain[n])) for n in chain.indices()]
        assert abs(vals[-1] - holevo_chi(mu.image(chain.limit))) < 1e-3
    assert apply(complementary(seq[3]), mu.average()).shape[0] == seq[3].dim_env


def test_reversibility_examples(rng):
    states = [proj(ket(0, 2)), proj(ket(1, 2)), np.full((2, 2), 0.5)]
    dists = [[0.5, 0.5, 0.0], [0.2, 0.3, 0.5], [1 / 3] * 3]
    assert reversibility_chi_test(unitary_channel(random_unitary(2, rng)), states, dists).passed
    assert reversibility_chi_test(isometric_channel(random_isometry(3, 2, rng)), states, dists).passed
    rep = reversibility_chi_test(depolarizing_channel(2), states[:2], [[0.5, 0.5]], base=2)
    assert not rep.passed
    assert rep.gaps[0] == pytest.approx(1.0, abs=1e-9)
    assert "necessary" in rep.as_dict()["note"]


def test_ensemble_validation(rng):
    with pytest.raises(ValueError):
        DiscreteEnsemble([0.5, 0.6], [np.eye(2) / 2, np.eye(2) / 2])
    with pytest.raises(ValueError):
        DiscreteEnsemble([1.0], [np.eye(2)])
    with pytest.raises(ValueError):
        DiscreteEnsemble([0.5, 0.5], [np.eye(2) / 2, np.eye(3) / 3])
