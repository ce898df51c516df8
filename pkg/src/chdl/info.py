"""Entropic quantities of discrete ensembles.

Logarithms are natural by default; pass ``base=2`` for bits. Generalized
(continuous) ensembles are not modelled; semicontinuity statements are
exercised through discrete sequences only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channels import Channel, apply, complementary, is_density_matrix
from .convergence import ChannelSequence, counterexample_sequence, depolarizing_sequence
from .errors import DimensionError
from .linalg import as_matrix, hermitian_part, ket, proj, trace_norm

SUPPORT_TOL = 1e-10


def _log(x, base):
    return np.log(x) if base is None else np.log(x) / math.log(base)


def von_neumann_entropy(rho, base: float | None = None) -> float:
    """``H(ρ) = -Tr ρ log ρ`` with ``0 log 0 = 0``."""
    w = np.clip(np.linalg.eigvalsh(hermitian_part(as_matrix(rho))), 0.0, None)
    w = w[w > 0]
    return float(max(-np.sum(w * _log(w, base)), 0.0))


def relative_entropy(rho, sigma, base: float | None = None) -> float:
    """``H(ρ‖σ) = Tr ρ(log ρ - log σ)``; ``inf`` unless ``supp ρ ⊆ supp σ``."""
    rho, sigma = hermitian_part(as_matrix(rho)), hermitian_part(as_matrix(sigma))
    if rho.shape != sigma.shape:
        raise DimensionError("states have different dimensions")
    ws, vs = np.linalg.eigh(sigma)
    supp = ws > SUPPORT_TOL
    outside = vs[:, ~supp]
    if outside.size and float(np.real(np.trace(outside.conj().T @ rho @ outside))) > SUPPORT_TOL:
        return math.inf
    wr = np.clip(np.linalg.eigvalsh(rho), 0.0, None)
    wr = wr[wr > 0]
    neg_h = float(np.sum(wr * _log(wr, base)))
    vsup = vs[:, supp]
    cross = float(np.real(np.sum(np.diag(vsup.conj().T @ rho @ vsup) * _log(ws[supp], base))))
    return max(neg_h - cross, 0.0)


@dataclass(frozen=True, eq=False)
class DiscreteEnsemble:
    """Ensemble ``{p_i, ρ_i}`` with average state ``ρ̄ = Σ p_i ρ_i``."""

    weights: np.ndarray
    states: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        states = tuple(hermitian_part(as_matrix(s)) for s in self.states)
        if len(w) != len(states) or not states:
            raise ValueError("weights and states must be nonempty lists of the same length")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-10:
            raise ValueError("weights must be a probability distribution")
        if len({s.shape for s in states}) != 1:
            raise DimensionError("ensemble states have different dimensions")
        for i, s in enumerate(states):
            if not is_density_matrix(s):
                raise ValueError(f"ensemble state {i} is not a density matrix")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", states)

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]

    def average(self) -> np.ndarray:
        return sum(p * s for p, s in zip(self.weights, self.states))

    def image(self, ch: Channel) -> "DiscreteEnsemble":
        """``Φ(μ) = {p_i, Φ(ρ_i)}``."""
        if ch.dim_in != self.dim:
            raise DimensionError(f"channel input dimension {ch.dim_in} differs from ensemble dimension {self.dim}")
        return DiscreteEnsemble(self.weights, tuple(apply(ch, s) for s in self.states))

    def distance(self, other: "DiscreteEnsemble") -> float:
        """Entrywise gap ``max_i |p_i - q_i| + ‖ρ_i - σ_i‖₁``."""
        if len(self.states) != len(other.states):
            raise ValueError("ensembles have different sizes")
        return max(abs(p - q) + trace_norm(a - b)
                   for p, q, a, b in zip(self.weights, other.weights, self.states, other.states))


def holevo_chi(mu: DiscreteEnsemble, base: float | None = None, form: str = "entropy") -> float:
    """Holevo quantity ``χ(μ)``.

    ``form="entropy"`` uses ``H(ρ̄) - Σ p_i H(ρ_i)``; ``form="relative"``
    uses ``Σ p_i H(ρ_i‖ρ̄)``.
    """
    if form == "entropy":
        avg = von_neumann_entropy(mu.average(), base)
        return max(avg - sum(p * von_neumann_entropy(s, base) for p, s in zip(mu.weights, mu.states)), 0.0)
    if form == "relative":
        avg = mu.average()
        return float(sum(p * relative_entropy(s, avg, base) for p, s in zip(mu.weights, mu.states) if p > 0))
    raise ValueError(f"unknown form {form!r}")


def entropic_disturbance(ch: Channel, mu: DiscreteEnsemble, base: float | None = None) -> float:
    """``Δ^Φχ(μ) = χ(μ) - χ(Φ(μ))``, nonnegative up to round-off."""
    return holevo_chi(mu, base) - holevo_chi(mu.image(ch), base)


# ---------------------------------------------------------------------------
# semicontinuity

@dataclass
class LSCReport:
    """``Δ^{Φ_n}χ(μ_n)`` along a sequence next to the limit value ``Δ^{Φ₀}χ(μ₀)``."""

    indices: list
    values: list
    limit_value: float
    ensemble_gaps: list
    average_entropies: list
    tol: float = 1e-7

    @property
    def tail(self) -> list:
        return self.values[len(self.values) // 2:]

    @property
    def margin(self) -> float:
        """``max(0, Δ₀ - min tail)``."""
        return max(0.0, self.limit_value - min(self.tail)) if self.tail else 0.0

    @property
    def defect(self) -> bool:
        return self.margin > self.tol

    def rows(self) -> list:
        out = [(0, "mu", "disturbance", self.limit_value)]
        for n, v, g in zip(self.indices, self.values, self.ensemble_gaps):
            out += [(n, "mu", "disturbance", v), (n, "mu", "ensemble_gap", g)]
        return out

    def as_dict(self) -> dict:
        return {"limit_value": self.limit_value, "margin": self.margin, "defect": self.defect,
                "final": self.values[-1] if self.values else None}


def lsc_experiment(seq: ChannelSequence, ensembles, n_max: int | None = None,
                   base: float | None = None, tol: float = 1e-7) -> LSCReport:
    """Evaluate ``Δ^{Φ_n}χ(μ_n)`` for ``n = 1..n_max``.

    ``ensembles`` is indexable by ``n`` with ``ensembles[0]`` the limit
    ensemble (a sequence or a callable ``n -> DiscreteEnsemble``). A margin
    above ``tol`` between the limit value and the tail minimum is flagged.
    """
    get = ensembles if callable(ensembles) else ensembles.__getitem__
    mu0 = get(0)
    idx = list(seq.indices(n_max))
    vals, gaps, ents = [], [], []
    for n in idx:
        mu = get(n)
        vals.append(entropic_disturbance(seq[n], mu, base))
        gaps.append(mu.distance(mu0))
        ents.append(von_neumann_entropy(mu.average(), base))
    return LSCReport(idx, vals, entropic_disturbance(seq.limit, mu0, base), gaps, ents, tol)


def complementary_sequence(seq: ChannelSequence) -> ChannelSequence:
    """Sequence of complementary channels ``Φ̂_n`` built from each member's Kraus list."""
    return ChannelSequence(complementary(seq.limit), lambda n: complementary(seq[n]), seq.n_max,
                           name=f"complementary({seq.name})")


def lsc_families(m: int = 8, n_max: int | None = None) -> dict:
    """Three constructed ``(sequence, ensembles)`` pairs for the semicontinuity check.

    ``depolarizing``: qubit depolarizing with ``p_n ↓ 1/4`` on a fixed
    orthogonal ensemble. ``counterexample``: the discontinuous family on an
    ensemble supported in ``ℋ₀``. ``complementary``: its complementary
    channels on the same ensemble.
    """
    n_max = m if n_max is None else n_max
    qubit = DiscreteEnsemble([0.5, 0.5], [proj(ket(0, 2)), proj(ket(1, 2))])
    d = m + 1
    h0 = np.zeros((d, d), dtype=np.complex128)
    h0[:m, :m] = np.eye(m) / m
    plus = np.zeros(d, dtype=np.complex128)
    plus[:2] = 1 / math.sqrt(2)
    mu = DiscreteEnsemble([0.25, 0.25, 0.5], [proj(ket(0, d)), proj(plus), h0])
    ce = counterexample_sequence(m)
    return {
        "depolarizing": (depolarizing_sequence(2, 0.25, n_max), [qubit] * (n_max + 1)),
        "counterexample": (ce, [mu] * (m + 1)),
        "complementary": (complementary_sequence(ce), [mu] * (m + 1)),
    }


# ---------------------------------------------------------------------------
# reversibility

@dataclass
class ReversibilityReport:
    """Outcome of a finite battery of the χ-preservation criterion.

    Passing is a necessary condition for reversibility on the family: the
    criterion quantifies over all distributions and only finitely many are
    tested.
    """

    passed: bool
    gaps: list
    tol: float
    base: float | None
    note: str = field(default="necessary-condition battery over the supplied distributions only")

    def __bool__(self) -> bool:
        return self.passed

    def as_dict(self) -> dict:
        return {"passed": self.passed, "gaps": self.gaps, "tol": self.tol, "note": self.note}


def reversibility_chi_test(ch: Channel, states: Sequence, distributions: Sequence,
                           tol: float = 1e-8, base: float | None = None) -> ReversibilityReport:
    """Check ``χ({p_i, Φ(ρ_i)}) = χ({p_i, ρ_i})`` for every supplied distribution."""
    gaps = []
    for dist in distributions:
        mu = DiscreteEnsemble(dist, states)
        gaps.append(entropic_disturbance(ch, mu, base))
    return ReversibilityReport(all(abs(g) <= tol for g in gaps), gaps, tol, base)

