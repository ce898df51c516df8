import numpy as np
import pytest
from numpy.testing import assert_allclose

from chdl.channels import choi_distance, choi_rank, dual_apply, validate
from chdl.convergence import (ChannelSequence, ProbeSet, converging_stinespring_sequence, counterexample_dichotomy,
                              counterexample_dual_observable, counterexample_family, counterexample_sequence,
                              default_probes, depolarizing_sequence, dual_convergence_report,
                              kraus_convergence_check, rotation, rotation_sequence, strong_convergence_report,
                              unitary_dilation_family)
from chdl.energy import EnergyObservable, ec_bures_channels, ec_diamond_norm, number_hamiltonian
from chdl.errors import PreconditionError
from chdl.linalg import ket, proj
from chdl.rand import random_channel


def constant_sequence(ch, n_max=4):
    return ChannelSequence(ch, lambda n: ch, n_max)


def test_constant_sequence_reports(rng):
    ch = random_channel(2, 2, 2, rng)
    seq = constant_sequence(ch)
    fwd = strong_convergence_report(seq, default_probes(2))
    assert max(fwd.summary.values()) == 0.0
    dual = dual_convergence_report(seq, np.diag([1.0, 2.0]), [ket(0, 2), ket(1, 2)])
    assert max(dual.summary.values()) == 0.0


def test_sequence_indexing(rng):
    seq = constant_sequence(random_channel(2, 2, 2, rng), 3)
    assert list(seq.indices()) == [1, 2, 3]
    assert list(seq.indices(2)) == [1, 2]
    with pytest.raises(IndexError):
        seq[4]


def test_probe_set_validation():
    with pytest.raises(ValueError):
        ProbeSet(vectors=[np.array([1.0, 1.0])])
    with pytest.raises(ValueError):
        ProbeSet(states=[np.eye(2)])
    probes = default_probes(3, n_haar=2)
    assert probes.state_ids[:4] == ["basis0", "basis1", "basis2", "mixed"]
    assert len(probes.vectors) == 5


@pytest.mark.parametrize("m", [2, 8, 64])
def test_counterexample_family_valid(m):
    for n in (0, 1, m // 2, m):
        ch = counterexample_family(m, n)
        assert validate(ch).ok
        assert choi_rank(ch) == 2
    with pytest.raises(IndexError):
        counterexample_family(m, m + 1)


def test_counterexample_dual_action():
    m = 8
    b = counterexample_dual_observable(m)
    assert_allclose(dual_apply(counterexample_family(m, 0), b), 0.0)
    for n in range(2, m + 1):
        expected = np.outer(ket(n - 1, m + 1), ket(0, m + 1))
        assert_allclose(dual_apply(counterexample_family(m, n), b), expected)


def test_counterexample_forward_probes():
    m = 16
    seq = counterexample_sequence(m)
    tau1 = ProbeSet.from_vectors([ket(0, m + 1)], ["tau1"])
    rep = strong_convergence_report(seq, tau1)
    assert rep.summary[1] > 1.0
    assert all(v == 0.0 for n, v in rep.summary.items() if n >= 2)


def test_counterexample_mixed_probe_scales_with_m():
    vals = []
    for m in (8, 16, 32):
        mixed = np.zeros((m + 1, m + 1))
        mixed[:m, :m] = np.eye(m) / m
        rep = strong_convergence_report(counterexample_sequence(m), ProbeSet(states=[mixed]))
        vals.append(rep.summary[m])
        # two off-diagonal blocks and two diagonal entries of size 1/m
        assert vals[-1] == pytest.approx(2.0 / m, rel=1e-9)
    assert vals[0] > vals[1] > vals[2]


def test_counterexample_dichotomy():
    out = counterexample_dichotomy(64)
    fwd, dual = out["forward"], out["dual"]
    assert fwd.final < 1e-6
    for n, v in dual.summary.items():
        assert v == pytest.approx(0.0 if n == 1 else 1.0, abs=1e-12)


def test_kraus_convergence_counterexample():
    m = 32
    limit = counterexample_family(m, 0).kraus
    fams = [counterexample_family(m, n).kraus for n in range(1, m + 1)]
    d = m + 1
    c = np.zeros(d, dtype=complex)
    c[:m] = 0.25 ** np.arange(m)
    c /= np.linalg.norm(c)
    probes = ProbeSet.from_vectors([ket(0, d), c], ["tau1", "geom"])
    rep = kraus_convergence_check(fams, limit, probes)
    assert rep.operators_converge and rep.channels_converge and rep.consistent


def test_kraus_convergence_rotation():
    fams = [[rotation(2.0 ** -n)] for n in range(1, 21)]
    # channel gaps scale like 2θ, so 1e-6 is out of reach at θ = 2^-20
    rep = kraus_convergence_check(fams, [np.eye(2)], default_probes(2), tol=1e-5)
    assert rep.operators_converge and rep.channels_converge
    ops = rep.operator.summary
    assert ops[11] / ops[10] == pytest.approx(0.5, rel=1e-3)
    assert rep.channel.monotone_nonincreasing()


def test_kraus_convergence_constant_and_normalization(rng):
    ch = random_channel(2, 2, 2, rng)
    rep = kraus_convergence_check([ch.kraus] * 3, ch.kraus, default_probes(2))
    assert rep.operator.final == 0.0 and rep.channel.final == 0.0
    with pytest.raises(PreconditionError):
        kraus_convergence_check([[0.5 * k for k in ch.kraus]], ch.kraus, default_probes(2))


def test_depolarizing_sequence():
    seq = depolarizing_sequence(2, 0.25, 10)
    rep = strong_convergence_report(seq, default_probes(2))
    assert rep.monotone_nonincreasing()
    assert rep.final < 2e-3
    with pytest.raises(ValueError):
        depolarizing_sequence(2, 0.75)


def test_unitary_dilation_family_dual_gaps():
    fam = unitary_dilation_family(seed=0)
    seq = fam.sequence(20)
    b = np.diag([1.0, -1.0])
    rep = dual_convergence_report(seq, b, default_probes(2).vectors)
    assert rep.final < 1e-4
    assert rep.summary[20] < rep.summary[5]
    assert choi_distance(fam.channel(0), seq[0]) == 0.0


def test_converging_stinespring_constant(rng):
    ch = random_channel(2, 2, 2, rng)
    out = converging_stinespring_sequence(constant_sequence(ch, 2), EnergyObservable(number_hamiltonian(2), 0.5))
    for v in out.isometries:
        assert np.abs(v - out.V0).max() < 1e-5


def test_converging_stinespring_counterexample():
    m = 8
    obs = EnergyObservable(number_hamiltonian(m + 1), 2.0)
    seq = counterexample_sequence(m)
    out = converging_stinespring_sequence(seq, obs)
    gaps = np.array(out.e_norm_gaps)
    assert np.all(np.diff(gaps) <= 1e-6)
    assert np.allclose(gaps, out.betas, atol=1e-6)
    # the operator-norm gap stays away from zero while the E-norm gap decays
    assert min(out.operator_gaps) > 0.5
    for n, v in enumerate(out.isometries, start=1):
        from chdl.channels import StinespringChannel
        assert choi_distance(StinespringChannel(v, out.dim_out, out.dim_env), seq[n]) < 1e-7


def test_converging_stinespring_rotation_chain():
    seq = rotation_sequence(6)
    obs = EnergyObservable(np.diag([0.0, 1.0]), 0.4)
    out = converging_stinespring_sequence(seq, obs)
    for n, (g, op) in enumerate(zip(out.e_norm_gaps, out.operator_gaps), start=1):
        assert g <= op + 1e-9
        beta = ec_bures_channels(seq[n], seq[0], obs)
        lower = ec_diamond_norm(seq[n], seq[0], obs, restarts=2, bures=beta).lower
        assert 0.5 * lower <= beta.upper + 1e-9
        assert beta.value <= g + 1e-6


def test_proj_probe_state_ids():
    probes = ProbeSet.from_vectors([ket(0, 2)], ["zero"])
    assert probes.state_ids == ["zero"]
    assert_allclose(probes.states[0], proj(ket(0, 2)))
