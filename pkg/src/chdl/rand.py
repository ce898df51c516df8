"""Seeded random operators, states and channels for experiments and tests."""
from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .channels import KrausChannel
from .linalg import dag, hermitian_part


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ginibre(rows: int, cols: int, rng=None) -> np.ndarray:
    rng = rng_from(rng)
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_unitary(d: int, rng=None) -> np.ndarray:
    rng = rng_from(rng)
    if d == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1), dtype=np.complex128)
    return unitary_group.rvs(d, random_state=rng)


def random_isometry(rows: int, cols: int, rng=None) -> np.ndarray:
    return random_unitary(rows, rng)[:, :cols]


def random_hermitian(d: int, rng=None) -> np.ndarray:
    g = ginibre(d, d, rng)
    return hermitian_part(g)


def random_psd(d: int, rng=None, rank: int | None = None) -> np.ndarray:
    g = ginibre(d, rank or d, rng)
    return g @ dag(g)


def random_state_vector(d: int, rng=None) -> np.ndarray:
    v = ginibre(d, 1, rng).ravel()
    return v / np.linalg.norm(v)


def random_density_matrix(d: int, rng=None, rank: int | None = None) -> np.ndarray:
    p = random_psd(d, rng, rank)
    return p / np.trace(p).real


def random_channel(dim_in: int, dim_out: int, n_kraus: int = 2, rng=None) -> KrausChannel:
    """Channel from a Haar-random isometry ``H_A -> H_B ⊗ C^n_kraus``."""
    if dim_out * n_kraus < dim_in:
        raise ValueError("need dim_out * n_kraus >= dim_in for an isometry")
    v = random_isometry(dim_out * n_kraus, dim_in, rng)
    t = v.reshape(dim_out, n_kraus, dim_in)
    return KrausChannel(tuple(t[:, i, :] for i in range(n_kraus)))
