import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from chdl.channels import apply, choi, choi_distance, dephasing_channel, identity_channel, unitary_channel
from chdl.dilations import (PartialIsometry, common_dilation, complete_to_unitary, doubled_dilations,
                            fixed_rep_approximation, isometry_residual, kernel_basis, random_partial_isometries,
                            rotation_partial_isometries, unitary_sequence_udc, universal_unitary_dilation)
from chdl.energy import EnergyObservable, common_environment, e_norm, env_blocks, number_hamiltonian
from chdl.errors import PreconditionError
from chdl.rand import ginibre, random_channel, random_density_matrix, random_unitary

Z = np.diag([1.0, -1.0])
H01 = np.diag([0.0, 1.0])


def random_contraction(d, rng):
    c = ginibre(d, d, rng)
    return c / (np.linalg.norm(c, 2) * rng.uniform(1.0, 2.0))


def test_common_dilation_identical(rng):
    ch = random_channel(2, 2, 2, rng)
    cd = common_dilation(ch, ch, EnergyObservable(H01, 0.3))
    assert cd.achieved == pytest.approx(0.0, abs=1e-5)
    assert np.abs(cd.V_phi - cd.V_psi).max() < 1e-5


def test_common_dilation_closed_form():
    obs = EnergyObservable(H01, 0.1)
    cd = common_dilation(identity_channel(2), unitary_channel(Z), obs)
    assert cd.achieved == pytest.approx(2 * math.sqrt(0.1), abs=1e-5)


def test_common_dilation_reconstructs(rng):
    obs = EnergyObservable(number_hamiltonian(3), 0.7)
    phi, psi = random_channel(3, 2, 2, rng), random_channel(3, 2, 3, rng)
    cd = common_dilation(phi, psi, obs)
    r = cd.residuals(phi, psi)
    assert r["isometry_phi"] < 1e-9 and r["isometry_psi"] < 1e-9
    assert r["choi_phi"] < 1e-7 and r["choi_psi"] < 1e-7
    assert abs(r["achieved_minus_beta"]) < 1e-6
    assert cd.dim_env == 6


def test_common_dilation_beats_random_contractions(rng):
    obs = EnergyObservable(H01, 0.35)
    phi, psi = random_channel(2, 2, 2, rng), random_channel(2, 2, 2, rng)
    cd = common_dilation(phi, psi, obs)
    kp, kq = common_environment(phi, psi)
    fphi, fpsi = env_blocks(kp), env_blocks(kq)
    for _ in range(50):
        vp, vq = doubled_dilations(fphi, fpsi, random_contraction(kp.dim_env, rng))
        assert isometry_residual(vq) < 1e-9
        assert cd.achieved <= e_norm(vp - vq, obs) + 1e-7


def test_fixed_rep_identical(rng):
    ch = random_channel(2, 2, 2, rng)
    res = fixed_rep_approximation(ch.to_stinespring(), ch, EnergyObservable(H01, 0.3), full_output=True)
    assert res.satisfied
    assert res.gap <= 1e-5
    assert res.channel.dim_env == 2


def test_fixed_rep_closed_form_bound():
    e = 0.2
    obs = EnergyObservable(H01, e)
    res = fixed_rep_approximation(identity_channel(2).to_stinespring(), unitary_channel(Z), obs,
                                  full_output=True)
    assert res.gap <= 4 * math.sqrt(e) + 1e-6
    assert res.satisfied


def test_fixed_rep_random_trials(rng):
    obs = EnergyObservable(number_hamiltonian(2), 0.4)
    for _ in range(20):
        phi, psi = random_channel(2, 2, 3, rng), random_channel(2, 2, 2, rng)
        v = phi.to_stinespring()
        res = fixed_rep_approximation(v, psi, obs, full_output=True)
        assert res.satisfied
        assert res.channel.dim_env == v.dim_env
        assert choi_distance(res.channel, psi) < 1e-7
        assert isometry_residual(res.channel.V) < 1e-9


def test_fixed_rep_precondition(rng):
    v = unitary_channel(random_unitary(2, rng)).to_stinespring()
    with pytest.raises(PreconditionError):
        fixed_rep_approximation(v, random_channel(2, 2, 3, rng), EnergyObservable(H01, 0.3))


def test_partial_isometry_validation():
    with pytest.raises(PreconditionError):
        PartialIsometry(np.array([[1.0, 1.0], [0.0, 0.0]]))
    w = PartialIsometry(np.diag([1.0, 0.0]))
    assert w.rank == 1
    assert_allclose(w.W @ w.P, w.W)


def test_complete_to_unitary_examples(rng):
    u = random_unitary(3, rng)
    assert_allclose(complete_to_unitary(PartialIsometry(u)), u)
    assert_allclose(complete_to_unitary(PartialIsometry(np.diag([1.0, 0.0]))), np.eye(2), atol=1e-14)
    for _ in range(5):
        basis = random_unitary(4, rng)
        p = basis[:, :3] @ basis[:, :3].conj().T
        v0 = PartialIsometry(random_unitary(4, rng) @ p)
        u0 = complete_to_unitary(v0)
        assert np.linalg.norm(u0.conj().T @ u0 - np.eye(4), 2) < 1e-10
        assert np.linalg.norm(u0 @ v0.P - v0.W, 2) < 1e-9


def test_complete_to_unitary_maps_kernels_in_order():
    w = np.zeros((3, 3))
    w[2, 0] = 1.0  # |2><0|
    u0 = complete_to_unitary(PartialIsometry(w))
    # ker P = span(e1, e2) is sent to ker Q = span(e0, e1) in index order
    assert_allclose(u0, np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]]), atol=1e-14)


def test_kernel_basis_is_canonical(rng):
    p = np.diag([1.0, 0.0, 0.0]).astype(complex)
    k = kernel_basis(p)
    assert_allclose(k, np.eye(3)[:, 1:], atol=1e-14)
    # a unitarily rotated description of the same projector gives the same basis
    u = np.eye(3, dtype=complex)
    u[1:, 1:] = random_unitary(2, rng)
    assert_allclose(kernel_basis(u @ p @ u.conj().T), k, atol=1e-12)


def test_udc_constant_sequence(rng):
    v0, _ = random_partial_isometries(seed=1)
    u0 = complete_to_unitary(v0)
    res = unitary_sequence_udc([v0] * 3, v0, u0)
    for un in res.unitaries:
        assert_allclose(un, u0, atol=1e-10)


def test_udc_rotation_family():
    v0, vs = rotation_partial_isometries(20)
    u0 = complete_to_unitary(v0)
    res = unitary_sequence_udc(vs, v0, u0)
    assert res.ok
    assert max(res.unitarity) < 1e-9
    assert max(res.reconstruction) < 1e-9
    assert all(d <= 1e-3 for d in res.distances[11:])


def test_udc_random_family():
    v0, vs = random_partial_isometries(dim=4, rank=3, n_max=20, seed=5)
    u0 = complete_to_unitary(v0)
    res = unitary_sequence_udc(vs, v0, u0)
    assert res.ok
    assert max(res.unitarity) < 1e-9
    assert max(res.reconstruction) < 1e-9
    assert res.distances[-1] < 1e-3
    assert res.distances[-1] < res.distances[0]


def test_udc_range_conditions():
    v0, vs = random_partial_isometries(seed=2, n_max=5)
    u0 = complete_to_unitary(v0)
    res = unitary_sequence_udc(vs, v0, u0)
    r0 = np.eye(4) - v0.Q
    for vn, un in zip(vs, res.unitaries):
        rn = np.eye(4) - vn.Q
        # U_n = (W_n + W̄_n)U₀ with W_n = V_nV₀*
        wbar = un @ u0.conj().T - vn.W @ v0.W.conj().T
        assert np.linalg.norm(wbar @ wbar.conj().T - rn, 2) < 1e-8
        assert np.linalg.norm(wbar.conj().T @ wbar - r0, 2) < 1e-8


def test_udc_precondition_failure():
    v0 = PartialIsometry(np.diag([1.0, 0.0]))
    flipped = PartialIsometry(np.array([[0.0, 0.0], [1.0, 0.0]]))
    res = unitary_sequence_udc([flipped], v0, np.eye(2))
    assert res.failures == [0]
    assert res.unitaries == [None]
    assert res.range_gaps[0] == pytest.approx(1.0)


def test_universal_dilation_identity_and_dephasing(rng):
    ud = universal_unitary_dilation(identity_channel(2))
    assert choi_distance(ud.channel(), identity_channel(2)) < 1e-12
    ud = universal_unitary_dilation(dephasing_channel(2))
    rho = random_density_matrix(2, rng)
    assert_allclose(apply(ud.channel(), rho), np.diag(np.diag(rho)), atol=1e-10)


@pytest.mark.parametrize("dims", [(2, 2, 2), (2, 3, 1), (3, 2, 3), (3, 3, 2)])
def test_universal_dilation_random(dims):
    rng = np.random.default_rng(sum(dims))
    d_a, d_b, k = dims
    ch = random_channel(d_a, d_b, k + (d_b * k < d_a), rng)
    ud = universal_unitary_dilation(ch)
    n = ud.U.shape[0]
    assert np.linalg.norm(ud.U.conj().T @ ud.U - np.eye(n), 2) < 1e-10
    assert choi_distance(ud.channel(), ch) < 1e-8
    assert np.linalg.eigvalsh(choi(ud.channel()).mat)[0] > -1e-10
    assert (ud.dim_aux, ud.dim_env) == (d_b * ch.dim_env, d_a * ch.dim_env)
