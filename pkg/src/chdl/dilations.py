"""Stinespring and unitary dilations.

Common dilations attaining the energy-constrained Bures distance, the
fixed-environment variant with the factor-2 bound, completion of partial
isometries to unitaries and the construction of norm-converging unitary
completions for a norm-converging family of partial isometries.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import (Channel, KrausChannel, StinespringChannel, choi_distance, choi_rank,
                       minimal_kraus, pad_kraus, unitary_dilation_channel)
from .energy import BuresResult, EnergyObservable, bures_from_blocks, common_environment, e_norm, env_blocks
from .errors import DimensionError, PreconditionError
from .linalg import as_matrix, dag, hermitian_part, operator_norm, sqrt_psd
from .policy import NumericPolicy, resolve


def _blocks_to_isometry(f: np.ndarray) -> np.ndarray:
    """Inverse of :func:`chdl.energy.env_blocks`: ``(d_B, d_E, d_A)`` to ``(d_B d_E) × d_A``."""
    d_out, d_env, d_in = f.shape
    return f.reshape(d_out * d_env, d_in)


def isometry_residual(v) -> float:
    v = as_matrix(v)
    return operator_norm(dag(v) @ v - np.eye(v.shape[1]))


# ---------------------------------------------------------------------------
# common dilations

@dataclass
class CommonDilation:
    """Stinespring isometries of ``Φ`` and ``Ψ`` on one environment of size ``dim_env``.

    ``achieved`` is the E-norm of ``V_phi - V_psi``; ``bures`` holds the
    bracket it is compared against.
    """

    V_phi: np.ndarray
    V_psi: np.ndarray
    dim_out: int
    dim_env: int
    achieved: float
    bures: BuresResult

    @property
    def phi(self) -> StinespringChannel:
        return StinespringChannel(self.V_phi, self.dim_out, self.dim_env)

    @property
    def psi(self) -> StinespringChannel:
        return StinespringChannel(self.V_psi, self.dim_out, self.dim_env)

    def residuals(self, phi: Channel, psi: Channel) -> dict:
        return {
            "isometry_phi": isometry_residual(self.V_phi),
            "isometry_psi": isometry_residual(self.V_psi),
            "choi_phi": choi_distance(self.phi, phi),
            "choi_psi": choi_distance(self.psi, psi),
            "achieved_minus_beta": self.achieved - self.bures.value,
        }


def doubled_dilations(fphi: np.ndarray, fpsi: np.ndarray, c: np.ndarray,
                      policy: NumericPolicy | None = None) -> tuple[np.ndarray, np.ndarray]:
    """``Ṽ_Φ = V_Φ ⊕ 0`` and ``Ṽ_Ψ = (I⊗C)V_Ψ ⊕ (I⊗sqrt(I - C*C))V_Ψ`` on ``E ⊕ E``."""
    d_env = c.shape[0]
    defect = sqrt_psd(np.eye(d_env) - dag(c) @ c, policy)
    v_phi = np.concatenate([fphi, np.zeros_like(fphi)], axis=1)
    v_psi = np.concatenate([np.einsum("ef,bfa->bea", c, fpsi),
                            np.einsum("ef,bfa->bea", defect, fpsi)], axis=1)
    return _blocks_to_isometry(v_phi), _blocks_to_isometry(v_psi)


def common_dilation(phi: Channel, psi: Channel, obs: EnergyObservable,
                    policy: NumericPolicy | None = None) -> CommonDilation:
    """Common Stinespring isometries whose E-norm distance equals ``β_E(Φ, Ψ)``.

    Both channels are written with minimal Kraus representations padded to a
    shared environment ``E``; the optimal contraction ``C`` of
    :func:`chdl.energy.ec_bures_channels` then defines the pair on ``E ⊕ E``.
    """
    pol = resolve(policy)
    kp, kq = common_environment(phi, psi, pol)
    fphi, fpsi = env_blocks(kp), env_blocks(kq)
    bures = bures_from_blocks(fphi, fpsi, obs, pol)
    v_phi, v_psi = doubled_dilations(fphi, fpsi, bures.C, pol)
    achieved = e_norm(v_phi - v_psi, obs, pol)
    return CommonDilation(v_phi, v_psi, kp.dim_out, 2 * kp.dim_env, achieved, bures)


@dataclass
class FixedRepResult:
    channel: StinespringChannel
    gap: float          # e_norm(V_phi - V_psi')
    beta: float         # β_E(Φ, Ψ) bracket lower end
    beta_upper: float
    bound: float        # 2 β_E + ε
    unitary: np.ndarray

    @property
    def satisfied(self) -> bool:
        return self.gap <= self.bound


def fixed_rep_approximation(v_phi: StinespringChannel, psi: Channel, obs: EnergyObservable,
                            eps: float = 1e-6, policy: NumericPolicy | None = None,
                            full_output: bool = False):
    """Representation ``(I_B ⊗ U)V_Ψ`` of ``Ψ`` on the environment of ``v_phi``.

    ``U`` is the unitary polar factor ``XY*`` of the optimal contraction
    ``C₀ = XΣY*``. When ``C₀`` is singular this is the polar unitary of
    ``C₀ + δXY*`` for every ``δ > 0``, so no explicit perturbation is needed.
    The guarantee is ``e_norm(V_Φ - V_Ψ') <= 2 β_E(Φ, Ψ) + ε``.
    """
    pol = resolve(policy)
    v_phi = v_phi.to_stinespring()
    d_env = v_phi.dim_env
    if (psi.dim_in, psi.dim_out) != (v_phi.dim_in, v_phi.dim_out):
        raise DimensionError("channels act between different spaces")
    rank = choi_rank(psi, pol)
    if rank > d_env:
        raise PreconditionError(f"Choi rank of Ψ is {rank}, environment of V_phi has only {d_env} levels")
    kq = pad_kraus(minimal_kraus(psi, pol), d_env)
    fphi, fpsi = env_blocks(v_phi.to_kraus()), env_blocks(kq)
    bures = bures_from_blocks(fphi, fpsi, obs, pol)
    x, _, yh = np.linalg.svd(bures.C)
    u = x @ yh
    v_new = _blocks_to_isometry(np.einsum("ef,bfa->bea", u, fpsi))
    gap = e_norm(v_phi.V - v_new, obs, pol)
    out = StinespringChannel(v_new, v_phi.dim_out, d_env)
    if not full_output:
        return out
    return FixedRepResult(out, gap, bures.value, bures.upper, 2.0 * bures.value + eps, u)


# ---------------------------------------------------------------------------
# partial isometries and unitary completion

@dataclass(frozen=True, eq=False)
class PartialIsometry:
    """Square matrix ``W`` with ``W*W`` and ``WW*`` orthogonal projectors."""

    W: np.ndarray
    tol: float = field(default=1e-9, compare=False)

    def __post_init__(self):
        w = as_matrix(self.W, name="partial isometry")
        if w.shape[0] != w.shape[1]:
            raise DimensionError(f"partial isometry must be square, got {w.shape}")
        object.__setattr__(self, "W", w)
        for name, p in (("initial", self.P), ("final", self.Q)):
            if operator_norm(p @ p - p) > self.tol:
                raise PreconditionError(f"{name} projector is not idempotent; W is not a partial isometry")

    @property
    def dim(self) -> int:
        return self.W.shape[0]

    @property
    def P(self) -> np.ndarray:
        return hermitian_part(dag(self.W) @ self.W)

    @property
    def Q(self) -> np.ndarray:
        return hermitian_part(self.W @ dag(self.W))

    @property
    def rank(self) -> int:
        return int(round(float(np.real(np.trace(self.P)))))


def _phase_fix(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    if nz.size:
        v = v * (abs(v[nz[0]]) / v[nz[0]])
    return v


def kernel_basis(projector: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of a projector.

    The kernel is read off the eigendecomposition; inside it the basis is
    fixed by Gram-Schmidt on the projected standard basis vectors in index
    order, with the first nonzero entry of each vector real positive. This
    makes the basis independent of how the eigensolver splits a degenerate
    eigenspace.
    """
    w, v = np.linalg.eigh(hermitian_part(projector))
    vk = v[:, w < 0.5]
    r = vk.shape[1]
    if r == 0:
        return np.zeros((projector.shape[0], 0), dtype=np.complex128)
    kp = vk @ dag(vk)
    basis = []
    for j in range(kp.shape[0]):
        x = kp[:, j].copy()
        for b in basis:
            x -= b * np.vdot(b, x)
        for b in basis:
            x -= b * np.vdot(b, x)
        nrm = np.linalg.norm(x)
        if nrm > 1e-6:
            basis.append(_phase_fix(x / nrm))
        if len(basis) == r:
            break
    return np.stack(basis, axis=1)


def complete_to_unitary(v0: PartialIsometry, rank_tol: float = 1e-8) -> np.ndarray:
    """Unitary ``U₀`` with ``U₀P = V₀``, mapping a basis of ``ker P`` onto one of ``ker Q``."""
    kp, kq = kernel_basis(v0.P), kernel_basis(v0.Q)
    tr_p = float(np.real(np.trace(v0.P)))
    tr_q = float(np.real(np.trace(v0.Q)))
    if abs(tr_p - tr_q) > rank_tol or kp.shape[1] != kq.shape[1]:
        raise PreconditionError(f"dim ker P = {kp.shape[1]} differs from dim ker Q = {kq.shape[1]}")
    return v0.W + kq @ dag(kp)


@dataclass
class UDCResult:
    """Per-index outcome of :func:`unitary_sequence_udc`.

    ``unitaries[n]`` is ``None`` where the precondition ``‖R_n - R₀‖ < 1``
    fails; ``range_gaps`` holds that norm for every index.
    """

    unitaries: list
    range_gaps: list
    unitarity: list
    reconstruction: list
    distances: list
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def unitary_sequence_udc(vs, v0: PartialIsometry, u0, policy: NumericPolicy | None = None) -> UDCResult:
    """Unitaries ``U_n = (W_n + W̄_n)U₀`` with ``U_nP = V_n``.

    ``W_n = V_nV₀*`` and ``W̄_n`` is the polar factor of ``T_n = R_nR₀``
    (``R = I - Q``) restricted to the initial space ``R₀ℋ``. Whenever
    ``‖V_n - V₀‖ → 0`` also ``‖U_n - U₀‖ → 0``.
    """
    pol = resolve(policy)
    u0 = as_matrix(u0)
    d = v0.dim
    p = v0.P
    if operator_norm(u0 @ p - v0.W) > pol.isometry_tol:
        raise PreconditionError("U0 does not extend V0 (U0 P != V0)")
    if operator_norm(dag(u0) @ u0 - np.eye(d)) > pol.isometry_tol:
        raise PreconditionError("U0 is not unitary")
    r0 = np.eye(d) - v0.Q
    r0_rank = d - v0.rank
    out = UDCResult([], [], [], [], [], [])
    for n, vn in enumerate(vs):
        vn = vn if isinstance(vn, PartialIsometry) else PartialIsometry(vn)
        if vn.dim != d or operator_norm(vn.P - p) > 1e-8:
            raise PreconditionError(f"index {n}: initial projector differs from that of V0")
        rn = np.eye(d) - vn.Q
        gap = operator_norm(rn - r0)
        out.range_gaps.append(gap)
        if gap >= 1.0 or d - vn.rank != r0_rank:
            out.failures.append(n)
            for lst in (out.unitaries, out.unitarity, out.reconstruction, out.distances):
                lst.append(None)
            continue
        wn = vn.W @ dag(v0.W)
        x, s, yh = np.linalg.svd(rn @ r0)
        wbar = x[:, :r0_rank] @ yh[:r0_rank, :]
        un = (wn + wbar) @ u0
        out.unitaries.append(un)
        out.unitarity.append(operator_norm(dag(un) @ un - np.eye(d)))
        out.reconstruction.append(operator_norm(un @ p - vn.W))
        out.distances.append(operator_norm(un - u0))
    return out


# ---------------------------------------------------------------------------
# universal unitary dilation

@dataclass
class UnitaryDilation:
    """``Φ(ρ) = Tr_{E'} U(ρ ⊗ σ₀)U*`` with ``D = B ⊗ E`` and ``E' = A ⊗ E``."""

    U: np.ndarray
    sigma0: np.ndarray
    dim_in: int
    dim_aux: int
    dim_out: int
    dim_env: int

    def channel(self) -> KrausChannel:
        return unitary_dilation_channel(self.U, self.sigma0, self.dim_in, self.dim_aux, self.dim_out)


def universal_unitary_dilation(phi: Channel) -> UnitaryDilation:
    """Unitary dilation built by completing ``φ ⊗ |0>_D ↦ V_Φφ`` (reshuffled into ``B ⊗ A ⊗ E``)."""
    kr = phi.to_kraus()
    d_a, d_b, d_e = kr.dim_in, kr.dim_out, kr.dim_env
    v = kr.to_stinespring().V.reshape(d_b, d_e, d_a)
    n = d_a * d_b * d_e
    w = np.zeros((d_b, d_a, d_e, d_a, d_b * d_e), dtype=np.complex128)
    # output b ⊗ |0>_A ⊗ e, input a ⊗ |0>_D
    w[:, 0, :, :, 0] = v
    u = complete_to_unitary(PartialIsometry(w.reshape(n, n)))
    sigma0 = np.zeros((d_b * d_e, d_b * d_e), dtype=np.complex128)
    sigma0[0, 0] = 1.0
    return UnitaryDilation(u, sigma0, d_a, d_b * d_e, d_b, d_a * d_e)


# ---------------------------------------------------------------------------
# partial isometry families for the completion experiments

def rotation_partial_isometries(n_max: int = 20) -> tuple[PartialIsometry, list]:
    """``V_n = R(2^{-n})|0><0|`` on ``C²`` with limit ``V₀ = |0><0|``."""
    from .convergence import rotation
    p = np.diag([1.0, 0.0]).astype(np.complex128)
    return PartialIsometry(p), [PartialIsometry(rotation(2.0 ** -n) @ p) for n in range(1, n_max + 1)]


def random_partial_isometries(dim: int = 4, rank: int = 3, n_max: int = 20,
                              seed=0) -> tuple[PartialIsometry, list]:
    """``V_n = exp(-i 2^{-n} K) V₀`` for a seeded rank-``rank`` partial isometry ``V₀``."""
    from scipy.linalg import expm
    from .rand import random_hermitian, random_unitary, rng_from
    rng = rng_from(seed)
    basis = random_unitary(dim, rng)
    p = basis[:, :rank] @ dag(basis[:, :rank])
    v0 = random_unitary(dim, rng) @ p
    k = random_hermitian(dim, rng)
    vs = [PartialIsometry(expm(-1j * 2.0 ** -n * k) @ v0) for n in range(1, n_max + 1)]
    return PartialIsometry(v0), vs
