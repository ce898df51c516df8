"""Quantum channels in Kraus, Stinespring and Choi form.

Conventions
-----------
* Stinespring isometries map ``H_A`` into ``H_B ⊗ H_E`` with the output
  factor first, so row ``b * d_E + e`` of ``V`` carries ``|b> ⊗ |e>``.
* ``V|φ> = Σ_i A_i|φ> ⊗ |τ_i>`` with ``τ_i`` the standard basis of ``H_E``
  ordered by Kraus index.
* The Choi matrix lives on ``H_B ⊗ H_A`` and equals
  ``Σ_ij Φ(|i><j|) ⊗ |i><j|``; its partial trace over ``B`` is ``I_A``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import DimensionError
from .linalg import as_matrix, dag, hermitian_part, is_hermitian, partial_trace, trace_norm
from .policy import NumericPolicy, resolve


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Channel ``ρ ↦ Σ_i A_i ρ A_i*``. Kraus operators are never pruned."""

    kraus: tuple

    def __post_init__(self):
        ops = tuple(as_matrix(k, name="Kraus operator") for k in self.kraus)
        if not ops:
            raise DimensionError("a Kraus channel needs at least one operator")
        if any(k.shape != ops[0].shape for k in ops):
            raise DimensionError("Kraus operators must share one shape")
        object.__setattr__(self, "kraus", ops)

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def dim_env(self) -> int:
        return len(self.kraus)

    def to_kraus(self) -> "KrausChannel":
        return self

    def to_stinespring(self) -> "StinespringChannel":
        v = np.stack(self.kraus, axis=1).reshape(self.dim_out * self.dim_env, self.dim_in)
        return StinespringChannel(v, self.dim_out, self.dim_env)

    def to_choi(self) -> "ChoiMatrix":
        d = self.dim_out * self.dim_in
        mat = np.zeros((d, d), dtype=np.complex128)
        for k in self.kraus:
            vec = k.reshape(d)
            mat += np.outer(vec, vec.conj())
        return ChoiMatrix(mat, self.dim_in, self.dim_out)


@dataclass(frozen=True, eq=False)
class StinespringChannel:
    """Channel ``ρ ↦ Tr_E V ρ V*`` given by a ``(d_B d_E) × d_A`` matrix ``V``."""

    V: np.ndarray
    dim_out: int
    dim_env: int

    def __post_init__(self):
        v = as_matrix(self.V, name="Stinespring isometry")
        if v.shape[0] != self.dim_out * self.dim_env:
            raise DimensionError(
                f"isometry has {v.shape[0]} rows, expected d_B*d_E = {self.dim_out * self.dim_env}")
        object.__setattr__(self, "V", v)
        object.__setattr__(self, "dim_out", int(self.dim_out))
        object.__setattr__(self, "dim_env", int(self.dim_env))

    @property
    def dim_in(self) -> int:
        return self.V.shape[1]

    def to_kraus(self) -> KrausChannel:
        t = self.V.reshape(self.dim_out, self.dim_env, self.dim_in)
        return KrausChannel(tuple(t[:, i, :].copy() for i in range(self.dim_env)))

    def to_stinespring(self) -> "StinespringChannel":
        return self

    def to_choi(self) -> "ChoiMatrix":
        return self.to_kraus().to_choi()


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    mat: np.ndarray
    dim_in: int
    dim_out: int
    rank_tol: float = field(default=1e-8, compare=False)

    def __post_init__(self):
        m = as_matrix(self.mat, name="Choi matrix")
        d = int(self.dim_in) * int(self.dim_out)
        if m.shape != (d, d):
            raise DimensionError(f"Choi matrix must be {d}x{d}, got {m.shape}")
        object.__setattr__(self, "mat", m)

    def to_kraus(self) -> KrausChannel:
        w, v = np.linalg.eigh(hermitian_part(self.mat))
        keep = w > self.rank_tol * max(1.0, float(w[-1]))
        ops = [np.sqrt(wk) * v[:, k].reshape(self.dim_out, self.dim_in)
               for k, wk in zip(np.flatnonzero(keep), w[keep])]
        if not ops:
            ops = [np.zeros((self.dim_out, self.dim_in), dtype=np.complex128)]
        return KrausChannel(tuple(ops[::-1]))

    def to_stinespring(self) -> StinespringChannel:
        return self.to_kraus().to_stinespring()

    def to_choi(self) -> "ChoiMatrix":
        return self


Channel = Union[KrausChannel, StinespringChannel, ChoiMatrix]


# ---------------------------------------------------------------------------
# constructors

def identity_channel(d: int) -> KrausChannel:
    return KrausChannel((np.eye(d, dtype=np.complex128),))


def unitary_channel(u) -> KrausChannel:
    return KrausChannel((as_matrix(u),))


def isometric_channel(v) -> KrausChannel:
    return KrausChannel((as_matrix(v),))


def depolarizing_channel(d: int, p: float = 1.0) -> KrausChannel:
    """``ρ ↦ (1-p) ρ + p Tr(ρ) I/d``; ``p = 1`` is completely depolarizing."""
    ops = []
    if p < 1.0:
        ops.append(np.sqrt(1.0 - p) * np.eye(d, dtype=np.complex128))
    for i in range(d):
        for j in range(d):
            k = np.zeros((d, d), dtype=np.complex128)
            k[i, j] = np.sqrt(p / d)
            ops.append(k)
    return KrausChannel(tuple(ops))


def dephasing_channel(d: int) -> KrausChannel:
    """Complete dephasing in the computational basis, Kraus ops ``{|i><i|}``."""
    ops = []
    for i in range(d):
        k = np.zeros((d, d), dtype=np.complex128)
        k[i, i] = 1.0
        ops.append(k)
    return KrausChannel(tuple(ops))


def pad_kraus(ch: Channel, dim_env: int) -> KrausChannel:
    """Append zero Kraus operators so that the environment has ``dim_env`` levels."""
    kr = ch.to_kraus()
    if dim_env < kr.dim_env:
        raise DimensionError(f"cannot pad {kr.dim_env} Kraus operators down to {dim_env}")
    zero = np.zeros((kr.dim_out, kr.dim_in), dtype=np.complex128)
    return KrausChannel(kr.kraus + (zero,) * (dim_env - kr.dim_env))


def _kraus_gram(kr: KrausChannel) -> np.ndarray:
    """Gram matrix of the vectorized Kraus operators; its spectrum is the nonzero Choi spectrum."""
    m = np.stack([k.ravel() for k in kr.kraus], axis=1)
    return hermitian_part(dag(m) @ m)


def minimal_kraus(ch: Channel, policy: NumericPolicy | None = None) -> KrausChannel:
    """Kraus representation with exactly ``choi_rank`` operators."""
    pol = resolve(policy)
    if isinstance(ch, ChoiMatrix):
        return ChoiMatrix(ch.mat, ch.dim_in, ch.dim_out, rank_tol=pol.rank_tol).to_kraus()
    kr = ch.to_kraus()
    # rotate the Kraus list by the Gram eigenvectors: B_k = Σ_i U_ik A_i
    w, u = np.linalg.eigh(_kraus_gram(kr))
    keep = np.flatnonzero(w > pol.rank_tol * max(1.0, float(w[-1])))[::-1]
    if not keep.size:
        return KrausChannel((np.zeros((kr.dim_out, kr.dim_in), dtype=np.complex128),))
    t = np.stack(kr.kraus, axis=0)
    return KrausChannel(tuple(np.tensordot(u[:, k], t, axes=1) for k in keep))


# ---------------------------------------------------------------------------
# operations

def _check_input(ch: Channel, rho: np.ndarray) -> np.ndarray:
    rho = as_matrix(rho, name="state")
    if rho.shape != (ch.dim_in, ch.dim_in):
        raise DimensionError(f"state has shape {rho.shape}, channel input dimension is {ch.dim_in}")
    return rho


def apply(ch: Channel, rho) -> np.ndarray:
    """Output ``Φ(ρ)``."""
    rho = _check_input(ch, rho)
    if isinstance(ch, StinespringChannel):
        out = partial_trace(ch.V @ rho @ dag(ch.V), (ch.dim_out, ch.dim_env), 1)
    elif isinstance(ch, ChoiMatrix):
        big = ch.mat @ np.kron(np.eye(ch.dim_out), rho.T)
        out = partial_trace(big, (ch.dim_out, ch.dim_in), 1)
    else:
        out = sum(k @ rho @ dag(k) for k in ch.kraus)
    return out


def dual_apply(ch: Channel, b) -> np.ndarray:
    """Heisenberg-picture map ``Φ*(B) = Σ A_i* B A_i``."""
    b = as_matrix(b, name="observable")
    if b.shape != (ch.dim_out, ch.dim_out):
        raise DimensionError(f"observable has shape {b.shape}, channel output dimension is {ch.dim_out}")
    return sum(dag(k) @ b @ k for k in ch.to_kraus().kraus)


def kraus_to_stinespring(ch: KrausChannel) -> StinespringChannel:
    return ch.to_stinespring()


def stinespring_to_kraus(ch: StinespringChannel) -> KrausChannel:
    return ch.to_kraus()


def complementary(ch: Channel) -> KrausChannel:
    """Complementary channel ``ρ ↦ Tr_B V ρ V*`` into the environment.

    Output matrix elements are ``Tr(A_i ρ A_j*)``. The representative is the
    one induced by the channel's own Kraus list.
    """
    kr = ch.to_kraus()
    t = np.stack(kr.kraus, axis=0)  # (d_E, d_B, d_A)
    return KrausChannel(tuple(t[:, b, :].copy() for b in range(kr.dim_out)))


def choi(ch: Channel) -> ChoiMatrix:
    return ch.to_choi()


def choi_rank(ch: Channel, policy: NumericPolicy | None = None) -> int:
    pol = resolve(policy)
    if isinstance(ch, ChoiMatrix):
        w = np.linalg.eigvalsh(hermitian_part(ch.mat))
    else:
        w = np.linalg.eigvalsh(_kraus_gram(ch.to_kraus()))
    return int(np.sum(w > pol.rank_tol))


def choi_distance(a: Channel, b: Channel) -> float:
    """Trace norm of the difference of Choi matrices."""
    ca, cb = a.to_choi(), b.to_choi()
    if (ca.dim_in, ca.dim_out) != (cb.dim_in, cb.dim_out):
        raise DimensionError("channels act between different spaces")
    return trace_norm(ca.mat - cb.mat)


def channels_equal(a: Channel, b: Channel, policy: NumericPolicy | None = None) -> bool:
    return choi_distance(a, b) <= resolve(policy).choi_equal_tol


@dataclass
class ValidationReport:
    ok: bool
    kind: str
    normalization_residual: float = 0.0
    min_choi_eigenvalue: float = 0.0
    hermiticity_residual: float = 0.0
    messages: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "kind": self.kind,
            "normalization_residual": self.normalization_residual,
            "min_choi_eigenvalue": self.min_choi_eigenvalue,
            "hermiticity_residual": self.hermiticity_residual,
            "messages": list(self.messages),
        }


def validate(ch: Channel, policy: NumericPolicy | None = None) -> ValidationReport:
    """Check trace preservation and complete positivity at policy tolerances.

    Kraus lists and Stinespring isometries are positive by construction, so
    for them only the normalization ``Σ A*A = I`` (equivalently ``V*V = I``)
    is tested. Choi matrices are tested for hermiticity, positivity and the
    partial-trace condition.
    """
    pol = resolve(policy)
    if isinstance(ch, ChoiMatrix):
        herm = float(np.max(np.abs(ch.mat - dag(ch.mat))))
        w = np.linalg.eigvalsh(hermitian_part(ch.mat))
        ptr = partial_trace(ch.mat, (ch.dim_out, ch.dim_in), 0)
        norm_res = float(np.linalg.norm(ptr - np.eye(ch.dim_in), 2))
        rep = ValidationReport(True, "choi", norm_res, float(w[0]), herm)
        if herm > pol.isometry_tol:
            rep.messages.append(f"Choi matrix is not Hermitian (residual {herm:.3e})")
        if w[0] < -pol.isometry_tol:
            rep.messages.append(f"Choi matrix has negative eigenvalue {w[0]:.6g}")
        if norm_res > pol.isometry_tol:
            rep.messages.append(f"partial trace over output differs from identity by {norm_res:.6g}")
    else:
        if isinstance(ch, StinespringChannel):
            gram, kind = dag(ch.V) @ ch.V, "stinespring"
        else:
            gram, kind = sum(dag(k) @ k for k in ch.kraus), "kraus"
        norm_res = float(np.linalg.norm(gram - np.eye(ch.dim_in), 2))
        rep = ValidationReport(True, kind, norm_res, 0.0, 0.0)
        if norm_res > pol.isometry_tol:
            what = "V*V" if kind == "stinespring" else "sum of A_i* A_i"
            rep.messages.append(f"{what} differs from identity by {norm_res:.6g}")
    rep.ok = not rep.messages
    return rep


# ---------------------------------------------------------------------------
# states

def is_density_matrix(rho, policy: NumericPolicy | None = None) -> bool:
    pol = resolve(policy)
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or not is_hermitian(rho, pol.state_tol):
        return False
    w = np.linalg.eigvalsh(hermitian_part(rho))
    return bool(w[0] >= -pol.state_tol and abs(np.trace(rho).real - 1.0) <= pol.state_tol)


def density_matrix(rho, policy: NumericPolicy | None = None) -> np.ndarray:
    """Validate and return ``rho`` as a density matrix."""
    rho = as_matrix(rho, name="state")
    if not is_density_matrix(rho, policy):
        raise ValueError("not a density matrix (Hermitian, PSD, unit trace) within tolerance")
    return hermitian_part(rho)


def unitary_dilation_channel(u, sigma, dim_in: int, dim_aux: int, dim_out: int) -> KrausChannel:
    """Channel ``ρ ↦ Tr_E U (ρ ⊗ σ) U*`` for ``U : A ⊗ D → B ⊗ E``."""
    u = as_matrix(u)
    sigma = as_matrix(sigma)
    dim_env = u.shape[0] // dim_out
    if u.shape != (dim_out * dim_env, dim_in * dim_aux) or dim_out * dim_env != u.shape[0]:
        raise DimensionError("unitary shape does not match the declared dimensions")
    w, vecs = np.linalg.eigh(hermitian_part(sigma))
    t = u.reshape(dim_out, dim_env, dim_in, dim_aux)
    ops = []
    for wk, s in zip(w, vecs.T):
        if wk <= 1e-14:
            continue
        # (I_B ⊗ <e|) U (I_A ⊗ |s>)
        block = np.einsum("beaj,j->eba", t, s) * np.sqrt(wk)
        ops.extend(block[e] for e in range(dim_env))
    return KrausChannel(tuple(ops))
