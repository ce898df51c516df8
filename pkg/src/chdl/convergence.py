"""Strong convergence experiments.

Finite-dimensional fingerprints of strong (pointwise) convergence of
channel sequences: probe-based forward and dual gap tables, the
discontinuity counterexample, Kraus-level checks and Stinespring
isometries converging in the E-norm.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm

from .channels import (Channel, KrausChannel, apply, choi_rank, dual_apply, is_density_matrix,
                       minimal_kraus, pad_kraus, unitary_channel, unitary_dilation_channel)
from .dilations import doubled_dilations
from .energy import EnergyObservable, bures_from_blocks, e_norm, env_blocks
from .errors import DimensionError, PreconditionError
from .linalg import as_matrix, dag, ket, operator_norm, proj, trace_norm
from .policy import NumericPolicy, resolve
from .rand import random_hermitian, random_state_vector, random_unitary, rng_from


@dataclass
class ChannelSequence:
    """Limit channel ``Φ₀`` and members ``Φ_n = generator(n)`` for ``1 <= n <= n_max``."""

    limit: Channel
    generator: Callable[[int], Channel]
    n_max: int
    name: str = "sequence"

    def __getitem__(self, n: int) -> Channel:
        if n == 0:
            return self.limit
        if not 1 <= n <= self.n_max:
            raise IndexError(f"index {n} outside 1..{self.n_max}")
        ch = self.generator(n)
        if (ch.dim_in, ch.dim_out) != (self.limit.dim_in, self.limit.dim_out):
            raise DimensionError(f"member {n} acts between different spaces than the limit")
        return ch

    @property
    def dim_in(self) -> int:
        return self.limit.dim_in

    @property
    def dim_out(self) -> int:
        return self.limit.dim_out

    def indices(self, n_max: int | None = None) -> range:
        return range(1, min(self.n_max, n_max or self.n_max) + 1)


@dataclass
class ProbeSet:
    """Finite witnesses for strong topologies: states, observables and unit vectors."""

    states: list = field(default_factory=list)
    observables: list = field(default_factory=list)
    vectors: list = field(default_factory=list)
    state_ids: list = field(default_factory=list)
    vector_ids: list = field(default_factory=list)

    def __post_init__(self):
        self.states = [as_matrix(s) for s in self.states]
        self.vectors = [np.asarray(v, dtype=np.complex128).ravel() for v in self.vectors]
        for i, s in enumerate(self.states):
            if not is_density_matrix(s):
                raise ValueError(f"probe state {i} is not a density matrix")
        for i, v in enumerate(self.vectors):
            if abs(np.linalg.norm(v) - 1.0) > 1e-10:
                raise ValueError(f"probe vector {i} is not a unit vector")
        if not self.state_ids:
            self.state_ids = [f"state{i}" for i in range(len(self.states))]
        if not self.vector_ids:
            self.vector_ids = [f"vec{i}" for i in range(len(self.vectors))]

    @classmethod
    def from_vectors(cls, vectors, ids=None) -> "ProbeSet":
        vectors = [np.asarray(v, dtype=np.complex128) for v in vectors]
        ids = list(ids) if ids is not None else None
        return cls(states=[proj(v) for v in vectors], vectors=vectors,
                   state_ids=ids or [], vector_ids=ids or [])


def default_probes(dim: int, seed=0, n_haar: int = 5) -> ProbeSet:
    """Computational basis, the maximally mixed state and ``n_haar`` seeded Haar-random pure states."""
    rng = rng_from(seed)
    basis = [ket(i, dim) for i in range(dim)]
    haar = [random_state_vector(dim, rng) for _ in range(n_haar)]
    states = [proj(v) for v in basis] + [np.eye(dim) / dim] + [proj(v) for v in haar]
    ids = [f"basis{i}" for i in range(dim)] + ["mixed"] + [f"haar{i}" for i in range(n_haar)]
    vids = [f"basis{i}" for i in range(dim)] + [f"haar{i}" for i in range(n_haar)]
    return ProbeSet(states=states, vectors=basis + haar, state_ids=ids, vector_ids=vids)


@dataclass
class ConvergenceReport:
    """Gap table with rows ``(n, probe_id, metric, value)`` and per-index maxima."""

    rows: list
    metric: str
    extra: dict = field(default_factory=dict)

    @property
    def summary(self) -> dict:
        out: dict = {}
        for n, _, metric, value in self.rows:
            if metric == self.metric:
                out[n] = max(out.get(n, 0.0), value)
        return dict(sorted(out.items()))

    def values(self, probe_id: str) -> dict:
        return {n: v for n, p, m, v in self.rows if p == probe_id and m == self.metric}

    @property
    def final(self) -> float:
        s = self.summary
        return s[max(s)] if s else 0.0

    def monotone_nonincreasing(self, tol: float = 1e-12) -> bool:
        vals = list(self.summary.values())
        return all(b <= a + tol for a, b in zip(vals, vals[1:]))

    def as_dict(self) -> dict:
        return {
            "metric": self.metric,
            "summary": {str(k): v for k, v in self.summary.items()},
            "final": self.final,
            "monotone_nonincreasing": self.monotone_nonincreasing(),
            **self.extra,
        }


def strong_convergence_report(seq: ChannelSequence, probes: ProbeSet, n_max: int | None = None) -> ConvergenceReport:
    """``‖Φ_n(ρ) - Φ₀(ρ)‖₁`` for each probe state and index."""
    limits = [apply(seq.limit, s) for s in probes.states]
    rows = []
    for n in seq.indices(n_max):
        ch = seq[n]
        for pid, s, lim in zip(probes.state_ids, probes.states, limits):
            rows.append((n, pid, "forward_gap", trace_norm(apply(ch, s) - lim)))
    return ConvergenceReport(rows, "forward_gap")


def dual_convergence_report(seq: ChannelSequence, b, vectors, n_max: int | None = None,
                            ids: Sequence[str] | None = None) -> ConvergenceReport:
    """``‖(Φ_n*(B) - Φ₀*(B))φ‖`` for each probe vector and index."""
    b = as_matrix(b)
    if b.shape != (seq.dim_out, seq.dim_out):
        raise DimensionError(f"observable must be {seq.dim_out}x{seq.dim_out}")
    vectors = [np.asarray(v, dtype=np.complex128).ravel() for v in vectors]
    ids = list(ids) if ids is not None else [f"vec{i}" for i in range(len(vectors))]
    lim = dual_apply(seq.limit, b)
    rows = []
    for n in seq.indices(n_max):
        diff = dual_apply(seq[n], b) - lim
        for pid, v in zip(ids, vectors):
            rows.append((n, pid, "dual_gap", float(np.linalg.norm(diff @ v))))
    return ConvergenceReport(rows, "dual_gap", {"operator_norm_B": operator_norm(b)})


# ---------------------------------------------------------------------------
# the discontinuity counterexample

def counterexample_family(m: int, n: int) -> KrausChannel:
    """Channel ``ρ ↦ V_nρV_n* + P̄₀ρP̄₀`` on ``C^{m+1}``.

    ``τ_i = e_{i-1}`` (``1 <= i <= m``) span ``ℋ₀``, ``ψ = e_m`` spans its
    complement and ``V_n = Σ_{i≠n} |τ_i><τ_i| + |ψ><τ_n|``. Index ``n = 0``
    gives the limit ``{P₀, P̄₀}``.
    """
    if m < 1 or not 0 <= n <= m:
        raise IndexError(f"need m >= 1 and 0 <= n <= m, got m={m}, n={n}")
    d = m + 1
    v = np.zeros((d, d), dtype=np.complex128)
    v[np.arange(m), np.arange(m)] = 1.0
    if n >= 1:
        v[n - 1, n - 1] = 0.0
        v[m, n - 1] = 1.0
    pbar = np.zeros((d, d), dtype=np.complex128)
    pbar[m, m] = 1.0
    return KrausChannel((v, pbar))


def counterexample_sequence(m: int) -> ChannelSequence:
    return ChannelSequence(counterexample_family(m, 0), lambda n: counterexample_family(m, n), m,
                           name=f"counterexample(m={m})")


def counterexample_probes(m: int, ratios: Sequence[float] = (0.5, 0.25, 0.1)) -> ProbeSet:
    """Fixed probes for the counterexample: ``τ₁``, ``ψ`` and vectors with ``|c_i|² ∝ r^i`` on ``ℋ₀``.

    The limit statement is about a fixed vector while ``n`` grows, so the
    probes must have vanishing weight on ``τ_n`` for large ``n``; uniform or
    Haar-random vectors in ``C^{m+1}`` carry weight ``~1/m`` on every ``τ_n``
    and show the truncation rather than the limit.
    """
    d = m + 1
    vecs, ids = [ket(0, d), ket(m, d)], ["tau1", "psi"]
    for r in ratios:
        c = np.zeros(d, dtype=np.complex128)
        c[:m] = np.sqrt(r) ** np.arange(m)
        vecs.append(c / np.linalg.norm(c))
        ids.append(f"geom{r:g}")
    return ProbeSet.from_vectors(vecs, ids)


def counterexample_dual_observable(m: int) -> np.ndarray:
    """``B = |ψ><τ₁|``, for which ``Φ_n*(B) = |τ_n><τ₁|`` and ``Φ₀*(B) = 0``."""
    d = m + 1
    return np.outer(ket(m, d), ket(0, d).conj())


def counterexample_dichotomy(m: int, n_max: int | None = None) -> dict:
    """Forward gaps on fixed probes next to the dual gap at ``(|ψ><τ₁|, τ₁)``."""
    seq = counterexample_sequence(m)
    fwd = strong_convergence_report(seq, counterexample_probes(m), n_max)
    dual = dual_convergence_report(seq, counterexample_dual_observable(m), [ket(0, m + 1)], n_max, ["tau1"])
    return {"forward": fwd, "dual": dual}


# ---------------------------------------------------------------------------
# Kraus-level convergence

@dataclass
class KrausConvergence:
    operator: ConvergenceReport
    channel: ConvergenceReport
    tol: float

    @property
    def operators_converge(self) -> bool:
        return self.operator.final <= self.tol

    @property
    def channels_converge(self) -> bool:
        return self.channel.final <= self.tol

    @property
    def consistent(self) -> bool:
        """Operator-level convergence on the probes is accompanied by channel-level convergence."""
        return self.channels_converge or not self.operators_converge


def kraus_convergence_check(families, limit, probes: ProbeSet, tol: float = 1e-6) -> KrausConvergence:
    """Per-operator gaps ``‖(A_i^n - A_i^0)φ‖`` next to channel gaps on probe states.

    ``families`` maps ``n = 1, 2, ...`` (list position plus one) to Kraus
    lists of the same length as ``limit``.
    """
    limit = [as_matrix(k) for k in limit]
    lim_ch = KrausChannel(tuple(limit))
    op_rows, ch_rows, bad = [], [], []
    for n, kraus in enumerate(families, start=1):
        kraus = [as_matrix(k) for k in kraus]
        if len(kraus) != len(limit):
            raise DimensionError(f"index {n}: {len(kraus)} Kraus operators, limit has {len(limit)}")
        gram = sum(dag(k) @ k for k in kraus)
        if operator_norm(gram - np.eye(gram.shape[0])) > 1e-8:
            bad.append(n)
            continue
        for pid, v in zip(probes.vector_ids, probes.vectors):
            gap = max(float(np.linalg.norm((k - k0) @ v)) for k, k0 in zip(kraus, limit))
            op_rows.append((n, pid, "operator_gap", gap))
        ch = KrausChannel(tuple(kraus))
        for pid, s in zip(probes.state_ids, probes.states):
            ch_rows.append((n, pid, "forward_gap", trace_norm(apply(ch, s) - apply(lim_ch, s))))
    if bad:
        raise PreconditionError(f"Kraus normalization fails at indices {bad}")
    return KrausConvergence(ConvergenceReport(op_rows, "operator_gap"),
                            ConvergenceReport(ch_rows, "forward_gap"), tol)


# ---------------------------------------------------------------------------
# constructed families

def rotation(theta: float) -> np.ndarray:
    """Real qubit rotation ``exp(-iθσ_y)``."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rotation_sequence(n_max: int = 20) -> ChannelSequence:
    """Unitary channels of ``R(2^{-n})`` converging in norm to the identity."""
    return ChannelSequence(unitary_channel(np.eye(2)), lambda n: unitary_channel(rotation(2.0 ** -n)),
                           n_max, name="rotation")


def depolarizing_sequence(d: int, p0: float, n_max: int = 20) -> ChannelSequence:
    """Depolarizing channels with ``p_n = p₀ + 2^{-n}`` decreasing to ``p₀``."""
    from .channels import depolarizing_channel
    if not 0.0 <= p0 <= 0.5:
        raise ValueError("p0 must lie in [0, 0.5] so that every p_n <= 1")
    return ChannelSequence(depolarizing_channel(d, p0), lambda n: depolarizing_channel(d, p0 + 2.0 ** -n),
                           n_max, name=f"depolarizing(p0={p0})")


@dataclass
class UnitaryDilationFamily:
    """Channels ``Tr_E U_n(ρ ⊗ σ_n)U_n*`` with ``U_n = exp(-i2^{-n}K)U₀`` and ``σ_n → σ₀``."""

    U0: np.ndarray
    K: np.ndarray
    sigma0: np.ndarray
    sigma_direction: np.ndarray
    dim_in: int
    dim_aux: int
    dim_out: int

    def unitary(self, n: int) -> np.ndarray:
        return self.U0 if n == 0 else expm(-1j * 2.0 ** -n * self.K) @ self.U0

    def sigma(self, n: int) -> np.ndarray:
        if n == 0:
            return self.sigma0
        t = 2.0 ** -n
        return (1.0 - t) * self.sigma0 + t * self.sigma_direction

    def channel(self, n: int) -> KrausChannel:
        return unitary_dilation_channel(self.unitary(n), self.sigma(n), self.dim_in, self.dim_aux, self.dim_out)

    def sequence(self, n_max: int = 20) -> ChannelSequence:
        return ChannelSequence(self.channel(0), self.channel, n_max, name="unitary-dilation")


def unitary_dilation_family(dim_in: int = 2, dim_aux: int = 2, dim_out: int = 2, seed=0) -> UnitaryDilationFamily:
    """Seeded instance of :class:`UnitaryDilationFamily` with pure ``σ₀ = |0><0|``."""
    rng = rng_from(seed)
    n = dim_in * dim_aux
    if n % dim_out:
        raise DimensionError("dim_in * dim_aux must be a multiple of dim_out")
    sigma0 = proj(ket(0, dim_aux))
    direction = np.eye(dim_aux, dtype=np.complex128) / dim_aux
    return UnitaryDilationFamily(random_unitary(n, rng), random_hermitian(n, rng), sigma0, direction,
                                 dim_in, dim_aux, dim_out)


# ---------------------------------------------------------------------------
# Stinespring isometries converging in E-norm

@dataclass
class StinespringSequence:
    V0: np.ndarray
    isometries: list
    dim_out: int
    dim_env: int
    e_norm_gaps: list
    betas: list
    beta_brackets: list
    operator_gaps: list

    def rows(self) -> list:
        out = []
        for n, (g, b, o) in enumerate(zip(self.e_norm_gaps, self.betas, self.operator_gaps), start=1):
            out += [(n, "V", "e_norm_gap", g), (n, "V", "beta", b), (n, "V", "operator_gap", o)]
        return out


def converging_stinespring_sequence(seq: ChannelSequence, obs: EnergyObservable, n_max: int | None = None,
                                    policy: NumericPolicy | None = None) -> StinespringSequence:
    """Isometries ``V_n`` of ``Φ_n`` with ``‖V_n - Ṽ₀‖_E = β_E(Φ_n, Φ₀)``.

    ``Ṽ₀ = V₀ ⊕ 0`` is fixed once on the doubled environment, whose first
    half is padded to the largest Choi rank along the sweep.
    """
    pol = resolve(policy)
    idx = list(seq.indices(n_max))
    members = [seq[n] for n in idx]
    d_env = max([choi_rank(seq.limit, pol)] + [choi_rank(ch, pol) for ch in members])
    f0 = env_blocks(pad_kraus(minimal_kraus(seq.limit, pol), d_env))
    v0 = None
    out = StinespringSequence(None, [], seq.dim_out, 2 * d_env, [], [], [], [])
    for ch in members:
        fn = env_blocks(pad_kraus(minimal_kraus(ch, pol), d_env))
        bures = bures_from_blocks(f0, fn, obs, pol)
        v0, vn = doubled_dilations(f0, fn, bures.C, pol)
        out.isometries.append(vn)
        out.e_norm_gaps.append(e_norm(vn - v0, obs, pol))
        out.betas.append(bures.value)
        out.beta_brackets.append((bures.value, bures.upper))
        out.operator_gaps.append(operator_norm(vn - v0))
    if v0 is None:
        v0 = doubled_dilations(f0, f0, np.eye(d_env), pol)[0]
    out.V0 = v0
    return out
