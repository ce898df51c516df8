"""Energy-constrained norms and distances.

The central primitive is :func:`energy_constrained_max`, which maximizes a
linear functional ``Tr Kρ`` over states with ``Tr Hρ <= E``. It solves the
Lagrangian dual ``min_{λ>=0} λE + λ_max(K - λH)`` by golden-section search
and recovers a primal witness mixing at most two pure states. The operator
E-norm, the see-saw for energy-constrained diamond norms and the upper
bound of the channel Bures distance are all built on it.
"""
from __future__ import annotations

import logging
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np
from scipy.optimize import minimize_scalar

from . import kernels
from .channels import Channel, minimal_kraus, pad_kraus
from .errors import ConvergenceError, DimensionError, InfeasibleEnergyError, NotHermitianError, NotPSDError
from .linalg import as_matrix, dag, hermitian_part, is_hermitian, proj, sqrt_psd, trace_norm
from .policy import NumericPolicy, resolve
from .rand import random_hermitian, random_state_vector, rng_from

logger = logging.getLogger(__name__)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class EnergyObservable:
    """Hamiltonian ``H`` (Hermitian PSD) with an energy bound ``E > E0``."""

    H: np.ndarray
    E: float
    E0: float = field(init=False)

    def __post_init__(self):
        h = as_matrix(self.H, name="Hamiltonian")
        if h.shape[0] != h.shape[1] or not is_hermitian(h, 1e-10):
            raise NotHermitianError("Hamiltonian must be a Hermitian square matrix")
        h = hermitian_part(h)
        e0 = float(np.linalg.eigvalsh(h)[0])
        if e0 < -1e-10:
            raise NotPSDError(f"Hamiltonian has negative eigenvalue {e0:.3e}")
        e0 = max(e0, 0.0)
        if not float(self.E) > e0:
            raise InfeasibleEnergyError(f"energy bound E={self.E} must exceed ground energy E0={e0}")
        object.__setattr__(self, "H", h)
        object.__setattr__(self, "E", float(self.E))
        object.__setattr__(self, "E0", e0)

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    def energy(self, rho) -> float:
        return float(np.real(np.trace(self.H @ rho)))

    def is_feasible(self, rho, tol: float = 1e-10) -> bool:
        from .channels import is_density_matrix
        return is_density_matrix(rho) and self.energy(rho) <= self.E + tol

    def with_energy(self, E: float) -> "EnergyObservable":
        return EnergyObservable(self.H, E)

    def extended(self, dim_ref: int) -> "EnergyObservable":
        """The same constraint on ``A ⊗ R`` (``H ⊗ I_R``)."""
        return EnergyObservable(np.kron(self.H, np.eye(dim_ref)), self.E)

    def ground_state(self) -> np.ndarray:
        return np.linalg.eigh(self.H)[1][:, 0]


def number_hamiltonian(d: int) -> np.ndarray:
    """Truncated number operator ``diag(0, 1, ..., d-1)``."""
    return np.diag(np.arange(d, dtype=float)).astype(np.complex128)


@dataclass
class EnergyMaxResult:
    value: float            # dual (upper) value
    primal: float           # value attained by ``witness``
    multiplier: float       # optimal λ
    witness: np.ndarray     # feasible state attaining ``primal``
    iterations: int

    @property
    def gap(self) -> float:
        return self.value - self.primal


def _witness_from_vectors(k, obs, vectors) -> tuple[float, np.ndarray]:
    """Best feasible mixture of two of ``vectors`` (the ground state is always added)."""
    vecs = list(vectors) + [obs.ground_state()]
    vecs = [v / np.linalg.norm(v) for v in vecs]
    a = np.array([np.real(np.vdot(v, k @ v)) for v in vecs])
    h = np.array([np.real(np.vdot(v, obs.H @ v)) for v in vecs])
    best, i, j, p = kernels.best_mixture(a, h, obs.E, np.array([0.0, 1.0]))
    rho = (1.0 - p) * proj(vecs[i]) + p * proj(vecs[j])
    return float(np.real(np.trace(k @ rho))), rho


def energy_constrained_max(k, obs: EnergyObservable, policy: NumericPolicy | None = None) -> EnergyMaxResult:
    """Maximize ``Tr Kρ`` over states with ``Tr Hρ <= E``.

    Strong duality holds because ``E > E0`` gives a strictly feasible state,
    so the dual value equals the constrained maximum.
    """
    pol = resolve(policy)
    k = hermitian_part(as_matrix(k, name="objective"))
    if k.shape != obs.H.shape:
        raise DimensionError(f"objective is {k.shape}, Hamiltonian is {obs.H.shape}")
    H, E = obs.H, obs.E
    w, v = np.linalg.eigh(k)
    scale = max(1.0, float(np.max(np.abs(w))))

    # λ = 0 is optimal iff some top eigenvector of K already satisfies the bound
    top = w >= w[-1] - 1e-12 * scale
    q = v[:, top]
    hw, hv = np.linalg.eigh(hermitian_part(dag(q) @ H @ q))
    if hw[0] <= E:
        x = q @ hv[:, 0]
        return EnergyMaxResult(float(w[-1]), float(w[-1]), 0.0, proj(x), 0)

    def dual(lam):
        return lam * E + float(np.linalg.eigvalsh(k - lam * H)[-1])

    lo, hi = 0.0, (w[-1] - w[0]) / (E - obs.E0)
    hi = max(hi, 1e-300)
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = dual(x1), dual(x2)
    best_lam, best_val = (x1, f1) if f1 <= f2 else (x2, f2)
    it = 0
    xtol = pol.golden_xtol * max(1.0, hi)
    while hi - lo > xtol and it < pol.golden_iters:
        it += 1
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = dual(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = dual(x2)
        for x, f in ((x1, f1), (x2, f2)):
            if f < best_val:
                best_lam, best_val = x, f
    lam = best_lam

    # primal witness: eigenvectors on both sides of λ* plus the top cluster at λ*
    cands = []
    width = max(hi - lo, 1e-9 * max(1.0, lam))
    for shift in (-width, 0.0, width):
        wl, vl = np.linalg.eigh(k - max(lam + shift, 0.0) * H)
        cl = wl >= wl[-1] - 1e-9 * scale
        cands.extend(vl[:, cl].T)
    primal, rho = _witness_from_vectors(k, obs, cands)
    return EnergyMaxResult(best_val, primal, lam, rho, it)


# ---------------------------------------------------------------------------
# operator E-norm

@dataclass
class ENormResult:
    value: float
    lower: float
    multiplier: float
    witness: np.ndarray

    def __float__(self) -> float:
        return self.value


def e_norm(a, obs: EnergyObservable, policy: NumericPolicy | None = None, full_output: bool = False):
    """Operator E-norm ``sup sqrt(Tr AρA*)`` over states with ``Tr Hρ <= E``.

    With ``full_output`` returns an :class:`ENormResult` holding the dual
    multiplier, a feasible witness state and the witness value (``lower``).
    """
    a = as_matrix(a, name="operator")
    if a.shape[1] != obs.dim:
        raise DimensionError(f"operator has {a.shape[1]} columns, Hamiltonian dimension is {obs.dim}")
    res = energy_constrained_max(dag(a) @ a, obs, policy)
    value = math.sqrt(max(res.value, 0.0))
    if not full_output:
        return value
    return ENormResult(value, math.sqrt(max(res.primal, 0.0)), res.multiplier, res.witness)


def _lambda_grid(cap: float, n: int) -> np.ndarray:
    lin = np.linspace(0.0, cap, n // 2)
    geo = cap * np.geomspace(1e-6, 1.0, n - n // 2)
    return np.unique(np.concatenate([lin, geo]))


def e_norm_primal_oracle(a, obs: EnergyObservable, grid_resolution: int = 101, *,
                         n_lambda: int = 400, n_random: int = 200, seed=0) -> float:
    """Certified lower bound on ``‖A‖_E²`` by direct primal search.

    Scans two-point mixtures ``(1-p)|u><u| + p|v><v|`` over a candidate pool
    (eigenvectors of ``H`` and ``A*A``, top eigenvectors of ``A*A - λH`` on a
    λ-grid, random unit vectors) with ``p`` on a grid plus the exact point
    where the mixture saturates the energy bound. Every scored mixture is
    feasible, so the result never exceeds the true value.
    """
    a = as_matrix(a)
    d = obs.dim
    if d > 4:
        raise DimensionError("the primal oracle is limited to dimension <= 4")
    if a.shape[1] != d:
        raise DimensionError("operator and Hamiltonian dimensions differ")
    g = hermitian_part(dag(a) @ a)
    rng = rng_from(seed)
    p_grid = np.linspace(0.0, 1.0, grid_resolution)

    def top(lams):
        return [np.linalg.eigh(g - lam * obs.H)[1][:, -1] for lam in lams]

    def search(vecs):
        vecs = np.array(vecs)
        av = np.real(np.einsum("ki,ij,kj->k", vecs.conj(), g, vecs))
        hv = np.real(np.einsum("ki,ij,kj->k", vecs.conj(), obs.H, vecs))
        return kernels.best_mixture(av, hv, obs.E, p_grid, slack=0.0)

    fixed = list(np.linalg.eigh(obs.H)[1].T) + list(np.linalg.eigh(g)[1].T)
    fixed.extend(random_state_vector(d, rng) for _ in range(n_random))
    wg = np.linalg.eigvalsh(g)
    cap = (wg[-1] - wg[0]) / (obs.E - obs.E0) if wg[-1] > wg[0] else 1.0
    lams = _lambda_grid(cap, n_lambda)
    best, i, j, _ = search(fixed + top(lams))
    # zoom the λ-grid around the grid points that produced the best pair
    for _ in range(3):
        hits = [k - len(fixed) for k in (i, j) if k >= len(fixed)]
        if not hits:
            break
        window = []
        for k in hits:
            lo, hi = lams[max(k - 1, 0)], lams[min(k + 1, len(lams) - 1)]
            window.append(np.linspace(lo, hi, n_lambda // 4))
        lams = np.unique(np.concatenate(window))
        val, i, j, _ = search(fixed + top(lams))
        best = max(best, val)
    return float(best)


# ---------------------------------------------------------------------------
# states

def fidelity(rho, sigma, policy: NumericPolicy | None = None) -> float:
    """``F(ρ,σ) = ‖√ρ √σ‖₁²``."""
    rho, sigma = as_matrix(rho), as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise DimensionError("states have different dimensions")
    f = trace_norm(sqrt_psd(rho, policy) @ sqrt_psd(sigma, policy)) ** 2
    return float(min(max(f, 0.0), 1.0))


def bures_states(rho, sigma, policy: NumericPolicy | None = None) -> float:
    """Bures distance ``sqrt(2(1 - sqrt F))``."""
    f = fidelity(rho, sigma, policy)
    return math.sqrt(max(2.0 * (1.0 - math.sqrt(f)), 0.0))


# ---------------------------------------------------------------------------
# channel Bures distance

def common_environment(phi: Channel, psi: Channel, policy: NumericPolicy | None = None):
    """Minimal Kraus lists of both channels zero-padded to a shared environment (max Choi rank)."""
    if (phi.dim_in, phi.dim_out) != (psi.dim_in, psi.dim_out):
        raise DimensionError("channels act between different spaces")
    kp, kq = minimal_kraus(phi, policy), minimal_kraus(psi, policy)
    d_env = max(kp.dim_env, kq.dim_env)
    return pad_kraus(kp, d_env), pad_kraus(kq, d_env)


def env_blocks(kr) -> np.ndarray:
    """``F[b] = (<b| ⊗ I_E) V`` stacked as an array of shape ``(d_B, d_E, d_A)``."""
    return np.stack(kr.kraus, axis=0).transpose(1, 0, 2)


def cross_environment(fpsi: np.ndarray, fphi: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """``Tr_B(V_Ψ ρ V_Φ*)`` as a ``d_E × d_E`` matrix."""
    return np.einsum("bea,ac,bfc->ef", fpsi, rho, fphi.conj())


def overlap_operator(fphi: np.ndarray, fpsi: np.ndarray, c: np.ndarray) -> np.ndarray:
    """``V_Φ* (I_B ⊗ C) V_Ψ`` on ``H_A``."""
    return np.einsum("bea,ef,bfc->ac", fphi.conj(), c, fpsi)


def contraction_gap_sq(fphi, fpsi, c, obs, policy=None) -> EnergyMaxResult:
    """``sup_ρ 2 - 2 Re Tr V_Φ*(I⊗C)V_Ψ ρ``, the squared E-norm of the dilation gap."""
    k = -hermitian_part(overlap_operator(fphi, fpsi, c))
    res = energy_constrained_max(k, obs, policy)
    res.value, res.primal = 2.0 + 2.0 * res.value, 2.0 + 2.0 * res.primal
    return res


def _clip_contraction(c: np.ndarray) -> np.ndarray:
    u, s, vh = np.linalg.svd(c)
    return (u * np.minimum(s, 1.0)) @ vh


def _feasible_state(rho: np.ndarray, obs: EnergyObservable) -> np.ndarray:
    w, v = np.linalg.eigh(hermitian_part(rho))
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        return proj(obs.ground_state())
    rho = (v * (w / w.sum())) @ dag(v)
    e = obs.energy(rho)
    if e > obs.E:
        g = proj(obs.ground_state())
        t = (e - obs.E) / (e - obs.E0)
        rho = (1.0 - t) * rho + t * g
    return hermitian_part(rho)


def _clarabel(prob: cp.Problem, policy: NumericPolicy, ok) -> str:
    # chordal decomposition breaks the solve on these small dense cones
    for tol in (policy.solver_tol, 1e-8, 1e-6):
        try:
            with warnings.catch_warnings():
                # accuracy is certified afterwards by the primal/dual bounds
                warnings.simplefilter("ignore", UserWarning)
                prob.solve(solver=cp.CLARABEL, tol_gap_abs=tol, tol_gap_rel=tol, tol_feas=tol,
                           tol_ktratio=1e-8, max_iter=500, chordal_decomposition_enable=False)
        except cp.SolverError:
            continue
        if ok():
            return prob.status
    raise ConvergenceError(f"conic solver failed with status {prob.status}")


def _solve_contraction(fphi, fpsi, obs, policy) -> tuple[np.ndarray, str]:
    """``max_{‖C‖<=1} min_ρ Re Tr(C M(ρ))`` with the inner minimum dualized.

    ``min_ρ Tr(ρ Re N(C))`` over feasible ρ equals ``max t - λE`` subject to
    ``Re N(C) + λH - tI ⪰ 0``, ``λ >= 0``.
    """
    d_out, d_env, d_in = fphi.shape
    c = cp.Variable((d_env, d_env), complex=True)
    t = cp.Variable()
    lam = cp.Variable(nonneg=True)
    n = sum(fphi[b].conj().T @ c @ fpsi[b] for b in range(d_out))
    cons = [
        (n + cp.conj(n).T) / 2 + lam * obs.H - t * np.eye(d_in) >> 0,
        cp.bmat([[np.eye(d_env), c], [cp.conj(c).T, np.eye(d_env)]]) >> 0,
    ]
    prob = cp.Problem(cp.Maximize(t - lam * obs.E), cons)
    status = _clarabel(prob, policy, lambda: c.value is not None)
    return np.asarray(c.value), status


def _solve_state(fphi, fpsi, obs, policy) -> tuple[np.ndarray, str]:
    """``min ‖M(ρ)‖₁`` over feasible ρ via the block form of the trace norm."""
    d_out, d_env, d_in = fphi.shape
    rho = cp.Variable((d_in, d_in), hermitian=True)
    m = sum(fpsi[b] @ rho @ fphi[b].conj().T for b in range(d_out))
    p = cp.Variable((d_env, d_env), hermitian=True)
    q = cp.Variable((d_env, d_env), hermitian=True)
    cons = [
        cp.bmat([[p, m], [cp.conj(m).T, q]]) >> 0,
        rho >> 0,
        cp.real(cp.trace(rho)) == 1,
        cp.real(cp.trace(obs.H @ rho)) <= obs.E,
    ]
    prob = cp.Problem(cp.Minimize(cp.real(cp.trace(p) + cp.trace(q)) / 2), cons)
    status = _clarabel(prob, policy, lambda: rho.value is not None)
    return np.asarray(rho.value), status


@dataclass
class BuresResult:
    """Energy-constrained Bures distance between two channels.

    ``value`` is certified from below by the feasible state ``witness`` and
    ``upper`` from above by the contraction ``C``; ``gap = upper - value``.
    """

    value: float
    upper: float
    witness: np.ndarray
    C: np.ndarray
    dim_env: int
    status: str

    @property
    def gap(self) -> float:
        return self.upper - self.value

    def converged(self, tol: float = 1e-6) -> bool:
        return self.gap <= tol


def ec_bures_channels(phi: Channel, psi: Channel, obs: EnergyObservable,
                      policy: NumericPolicy | None = None) -> BuresResult:
    """Energy-constrained Bures distance ``β_E(Φ, Ψ)``.

    Uses ``β_E² = 2 - 2 min_ρ ‖Tr_B(V_Ψ ρ V_Φ*)‖₁`` over feasible ρ, with both
    channels written on a common (zero-padded) environment. The optimal
    contraction ``C`` realizes ``β_E`` as the E-norm distance between the
    doubled-environment dilations built in :mod:`chdl.dilations`.
    """
    pol = resolve(policy)
    kp, kq = common_environment(phi, psi, pol)
    return bures_from_blocks(env_blocks(kp), env_blocks(kq), obs, pol)


def bures_from_blocks(fphi: np.ndarray, fpsi: np.ndarray, obs: EnergyObservable,
                      policy: NumericPolicy | None = None) -> BuresResult:
    """:func:`ec_bures_channels` for fixed Stinespring blocks on a shared environment.

    ``fphi[b] = (<b| ⊗ I_E) V_Φ``, shape ``(d_B, d_E, d_A)``.
    """
    pol = resolve(policy)
    if fphi.shape != fpsi.shape:
        raise DimensionError(f"Stinespring blocks differ in shape: {fphi.shape} vs {fpsi.shape}")
    if fphi.shape[2] != obs.dim:
        raise DimensionError("Hamiltonian dimension differs from the channel input dimension")
    # each certificate is the primal variable of its own conic problem; solver
    # dual variables are too inaccurate here
    c_sdp, status_c = _solve_contraction(fphi, fpsi, obs, pol)
    rho_sdp, status_r = _solve_state(fphi, fpsi, obs, pol)
    status = status_c if status_c == status_r else f"{status_c}/{status_r}"
    rho_sdp = _feasible_state(rho_sdp, obs)

    def overlap(r):
        return trace_norm(cross_environment(fpsi, fphi, r))

    # candidate contractions: solver output, the polar factor of M(ρ)* and I
    u, _, vh = np.linalg.svd(cross_environment(fpsi, fphi, rho_sdp))
    best_c, best_up = None, None
    for c in (_clip_contraction(c_sdp), dag(u @ vh), np.eye(fphi.shape[1])):
        res = contraction_gap_sq(fphi, fpsi, c, obs, pol)
        if best_up is None or res.value < best_up.value:
            best_c, best_up = c, res

    # feasible inputs certify the lower bound; the segment between the solver
    # state and the energy witness of C stays feasible by convexity
    rho_c = best_up.witness
    seg = minimize_scalar(lambda t: overlap((1.0 - t) * rho_sdp + t * rho_c),
                          bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12})
    cands = [rho_sdp, rho_c, (1.0 - seg.x) * rho_sdp + seg.x * rho_c]
    vals = [overlap(r) for r in cands]
    k = int(np.argmin(vals))
    value = math.sqrt(max(2.0 - 2.0 * vals[k], 0.0))
    upper = math.sqrt(max(best_up.value, 0.0))
    return BuresResult(value, max(upper, value), cands[k], best_c, fphi.shape[1], status)


def bures_grid_oracle(phi: Channel, psi: Channel, obs: EnergyObservable, *,
                      resolution: int = 21, levels: int = 14) -> float:
    """Brute-force ``β_E`` for qubit inputs straight from the definition.

    Maximizes the Bures distance between ``(Φ⊗id)(ψ_ρ)`` and ``(Ψ⊗id)(ψ_ρ)``
    over purifications ``ψ_ρ`` of feasible qubit states ``ρ`` (Bloch-ball
    grid, then repeated local zooming around the best point).
    """
    jp, jq = phi.to_choi().mat, psi.to_choi().mat
    d_out = phi.dim_out

    def score(rhos):
        s = _batch_sqrt(rhos).conj()  # √ρ^T
        lift = np.einsum("ij,nkl->nikjl", np.eye(d_out), s).reshape(len(rhos), d_out * 2, d_out * 2)
        x = lift @ jp @ dag_batch(lift)
        y = lift @ jq @ dag_batch(lift)
        sx = _batch_sqrt(x)
        ev = np.linalg.eigvalsh(sx @ y @ sx)
        sqrt_f = np.clip(np.sqrt(np.clip(ev, 0.0, None)).sum(axis=1), 0.0, 1.0)
        return np.sqrt(np.clip(2.0 - 2.0 * sqrt_f, 0.0, None))

    best, _ = _bloch_zoom(score, obs, resolution, levels, starts=3)
    return float(best)


def diamond_grid_oracle(phi: Channel, psi: Channel, obs: EnergyObservable, *,
                        resolution: int = 21, levels: int = 14, starts: int = 6) -> float:
    """Brute-force lower bound on ``‖Φ-Ψ‖⋄^E`` for qubit inputs over pure feasible inputs."""
    jd = phi.to_choi().mat - psi.to_choi().mat
    d_out = phi.dim_out

    def score(rhos):
        s = _batch_sqrt(rhos).conj()
        lift = np.einsum("ij,nkl->nikjl", np.eye(d_out), s).reshape(len(rhos), d_out * 2, d_out * 2)
        x = lift @ jd @ dag_batch(lift)
        return np.abs(np.linalg.eigvalsh(0.5 * (x + dag_batch(x)))).sum(axis=1)

    best, _ = _bloch_zoom(score, obs, resolution, levels, starts=starts)
    return float(best)


def dag_batch(x: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(x, -1, -2))


def _batch_sqrt(x: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (x + dag_batch(x)))
    return (v * np.sqrt(np.clip(w, 0.0, None))[:, None, :]) @ dag_batch(v)


_PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=np.complex128)


def _bloch_zoom(score, obs, resolution, levels, starts):
    if obs.dim != 2:
        raise DimensionError("grid oracles are implemented for qubit inputs only")
    h0 = np.real(np.trace(obs.H)) / 2.0
    hv = np.real(np.einsum("kij,ji->k", _PAULI, obs.H)) / 2.0

    def states(points):
        return 0.5 * (np.eye(2) + np.einsum("nk,kij->nij", points, _PAULI))

    def feasible(points):
        ok = np.einsum("nk,nk->n", points, points) <= 1.0
        return ok & (h0 + points @ hv <= obs.E)

    axis = np.linspace(-1.0, 1.0, resolution)
    pts = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), -1).reshape(-1, 3)
    pts = pts[feasible(pts)]
    vals = score(states(pts))
    order = np.argsort(vals)[::-1]
    seeds = [pts[order[0]]]
    for k in order[1:]:
        if len(seeds) >= starts:
            break
        if min(np.linalg.norm(pts[k] - s) for s in seeds) > 0.3:
            seeds.append(pts[k])
    best, best_pt = -np.inf, None
    step0 = 2.0 / (resolution - 1)
    local = np.linspace(-1.0, 1.0, 11)
    offsets = np.stack(np.meshgrid(local, local, local, indexing="ij"), -1).reshape(-1, 3)
    for centre in seeds:
        centre_val = float(score(states(centre[None]))[0])
        half = 2.0 * step0
        for _ in range(levels):
            cand = centre + half * offsets
            cand = cand[feasible(cand)]
            if len(cand):
                v = score(states(cand))
                k = int(np.argmax(v))
                if v[k] >= centre_val:
                    centre, centre_val = cand[k], float(v[k])
            half *= 0.4
        if centre_val > best:
            best, best_pt = centre_val, centre
    return best, best_pt


# ---------------------------------------------------------------------------
# diamond norms

@dataclass
class DiamondBracket:
    lower: float
    upper: float
    witness: np.ndarray         # state on A ⊗ R attaining ``lower``
    restart_values: list

    def as_tuple(self) -> tuple[float, float]:
        return self.lower, self.upper


def _lift_apply(kraus, sigma, d_ref):
    return sum(np.kron(k, np.eye(d_ref)) @ sigma @ dag(np.kron(k, np.eye(d_ref))) for k in kraus)


def _lift_dual(kraus, x, d_ref):
    return sum(dag(np.kron(k, np.eye(d_ref))) @ x @ np.kron(k, np.eye(d_ref)) for k in kraus)


def _difference_output(kp, kq, sigma, d_ref):
    return _lift_apply(kp.kraus, sigma, d_ref) - _lift_apply(kq.kraus, sigma, d_ref)


def _seesaw(kp, kq, obs_ext, start_obs, d_ref, pol):
    """Alternate between the trace-norm-attaining observable and the best feasible input."""
    x = start_obs
    best, best_sigma, prev = -np.inf, None, -np.inf
    for _ in range(pol.seesaw_iters):
        k = _lift_dual(kp.kraus, x, d_ref) - _lift_dual(kq.kraus, x, d_ref)
        sigma = energy_constrained_max(k, obs_ext, pol).witness
        y = hermitian_part(_difference_output(kp, kq, sigma, d_ref))
        w, v = np.linalg.eigh(y)
        val = float(np.sum(np.abs(w)))
        if val > best:
            best, best_sigma = val, sigma
        x = (v * np.where(w >= 0, 1.0, -1.0)) @ dag(v)
        if val - prev <= pol.seesaw_rtol * max(1.0, abs(val)):
            break
        prev = val
    return best, best_sigma


def _num_threads() -> int:
    try:
        return max(1, int(os.environ.get("CHDL_NUM_THREADS", "1")))
    except ValueError:
        return 1


def purification(rho: np.ndarray) -> np.ndarray:
    """Vector ``Σ_i √ρ|i> ⊗ |i>`` on ``A ⊗ A`` with reduced state ``ρ``."""
    d = rho.shape[0]
    return sqrt_psd(rho).reshape(d * d)


def ec_diamond_norm(phi: Channel, psi: Channel, obs: EnergyObservable, restarts: int | None = None,
                    seed=0, policy: NumericPolicy | None = None,
                    bures: BuresResult | None = None) -> DiamondBracket:
    """Bracket ``(lower, upper)`` for the energy-constrained diamond norm of ``Φ - Ψ``.

    ``lower`` is the best see-saw value over feasible inputs on ``A ⊗ R`` with
    ``dim R = dim A``; one start is the purified optimal input of the Bures
    problem, the rest are random. ``upper = 2 β_E(Φ, Ψ)``.
    """
    pol = resolve(policy)
    restarts = pol.seesaw_restarts if restarts is None else restarts
    kp, kq = phi.to_kraus(), psi.to_kraus()
    if (kp.dim_in, kp.dim_out) != (kq.dim_in, kq.dim_out):
        raise DimensionError("channels act between different spaces")
    d_in, d_out = kp.dim_in, kp.dim_out
    if bures is None:
        bures = ec_bures_channels(phi, psi, obs, pol)
    obs_ext = obs.extended(d_in)

    starts = []
    sigma0 = proj(purification(bures.witness))
    y0 = hermitian_part(_difference_output(kp, kq, sigma0, d_in))
    w0, v0 = np.linalg.eigh(y0)
    starts.append((v0 * np.where(w0 >= 0, 1.0, -1.0)) @ dag(v0))
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(max(restarts, 0))]
    for rng in rngs:
        h = random_hermitian(d_out * d_in, rng)
        w, v = np.linalg.eigh(h)
        starts.append((v * np.sign(w)) @ dag(v))

    run = lambda x: _seesaw(kp, kq, obs_ext, x, d_in, pol)
    n_threads = _num_threads()
    if n_threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as ex:
            results = list(ex.map(run, starts))
    else:
        results = [run(x) for x in starts]
    vals = [r[0] for r in results]
    k = int(np.argmax(vals))
    # clamp round-off; a trace distance of channel outputs never exceeds 2
    lower = min(max(vals[k], 0.0), 2.0)
    return DiamondBracket(lower, min(2.0 * bures.upper, 2.0), results[k][1], vals)


def diamond_norm_unconstrained(phi: Channel, psi: Channel, restarts: int | None = None, seed=0,
                               policy: NumericPolicy | None = None) -> DiamondBracket:
    """Unconstrained diamond norm bracket (``H = I``, ``E = 2`` makes the bound vacuous)."""
    obs = EnergyObservable(np.eye(phi.dim_in), 2.0)
    return ec_diamond_norm(phi, psi, obs, restarts=restarts, seed=seed, policy=policy)
