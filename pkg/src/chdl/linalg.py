"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
Tensor-product spaces are described by a tuple of factor dimensions,
ordered as in the Kronecker product (``(d_B, d_E)`` means ``B ⊗ E``).
"""
from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from .errors import DimensionError, NotHermitianError, NotPSDError
from .policy import NumericPolicy, resolve

logger = logging.getLogger(__name__)

MAX_DIM = 1 << 14


def as_matrix(a, *, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or 0 in m.shape:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def dag(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


def proj(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128).ravel()
    return np.outer(v, v.conj())


def tensor_product(*ops) -> np.ndarray:
    """Kronecker product of one or more matrices (left factor is the slow index)."""
    if not ops:
        raise ValueError("tensor_product needs at least one operand")
    out = as_matrix(ops[0])
    for op in ops[1:]:
        op = as_matrix(op)
        rows, cols = out.shape[0] * op.shape[0], out.shape[1] * op.shape[1]
        if rows > MAX_DIM or cols > MAX_DIM:
            raise DimensionError(f"tensor product of size {rows}x{cols} exceeds {MAX_DIM}")
        out = np.kron(out, op)
    return out


def _check_shape(m: np.ndarray, shape: Sequence[int]) -> tuple[int, ...]:
    shape = tuple(int(d) for d in shape)
    if any(d < 1 for d in shape):
        raise DimensionError(f"invalid subsystem shape {shape}")
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"partial trace needs a square matrix, got {m.shape}")
    if int(np.prod(shape)) != m.shape[0]:
        raise DimensionError(f"shape {shape} does not match matrix dimension {m.shape[0]}")
    return shape


def partial_trace(m, shape: Sequence[int], traced) -> np.ndarray:
    """Trace out the factor(s) ``traced`` (0-based) of an operator on ``⊗ shape``.

    The remaining factors keep their order.
    """
    m = as_matrix(m)
    shape = _check_shape(m, shape)
    traced = (traced,) if np.isscalar(traced) else tuple(traced)
    n = len(shape)
    traced = tuple(sorted({int(t) for t in traced}))
    if any(t < 0 or t >= n for t in traced):
        raise DimensionError(f"traced factor out of range for shape {shape}")
    kept = [k for k in range(n) if k not in traced]
    t = m.reshape(shape + shape)
    # einsum: pair row/col labels of traced factors
    row = list(range(n))
    col = [n + k for k in range(n)]
    for k in traced:
        col[k] = row[k]
    out_labels = [row[k] for k in kept] + [col[k] for k in kept]
    res = np.einsum(t, row + col, out_labels)
    d = int(np.prod([shape[k] for k in kept])) if kept else 1
    return res.reshape(d, d)


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dag(a))


def is_hermitian(a: np.ndarray, tol: float = 1e-10) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(a))))
    return bool(np.max(np.abs(a - dag(a))) <= tol * scale)


def hermitian_eig(a, policy: NumericPolicy | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a Hermitian matrix."""
    pol = resolve(policy)
    a = as_matrix(a)
    if not is_hermitian(a, pol.hermitian_tol):
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    return np.linalg.eigh(hermitian_part(a))


def singular_values(a) -> np.ndarray:
    return np.linalg.svd(as_matrix(a), compute_uv=False)


def trace_norm(a) -> float:
    """Sum of singular values."""
    return float(np.sum(singular_values(a)))


def operator_norm(a) -> float:
    """Largest singular value."""
    return float(singular_values(a)[0])


def polar_decompose(a, policy: NumericPolicy | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Polar decomposition ``A = W P`` with ``P = |A|``.

    ``W`` is the smallest partial isometry: it vanishes on the kernel of
    ``|A|`` and maps the support of ``|A|`` isometrically onto the range of
    ``A``. For invertible square ``A`` it is unitary.
    """
    pol = resolve(policy)
    a = as_matrix(a)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    p = (dag(vh) * s) @ vh
    p = hermitian_part(p)
    cutoff = pol.rank_tol * max(1.0, float(s[0]) if s.size else 0.0)
    keep = s > cutoff
    w = u[:, keep] @ vh[keep, :]
    return w, p


def sqrt_psd(a, policy: NumericPolicy | None = None) -> np.ndarray:
    """Positive square root of a positive semidefinite matrix.

    Eigenvalues in ``[-psd_reject, 0)`` are treated as round-off and clamped
    to zero; anything more negative raises :class:`NotPSDError`.
    """
    pol = resolve(policy)
    w, v = hermitian_eig(a, pol)
    if w.size and w[0] < -pol.psd_reject:
        raise NotPSDError(f"matrix has eigenvalue {w[0]:.3e} below -{pol.psd_reject:g}")
    if w.size and w[0] < -pol.psd_clamp:
        logger.warning("clamping eigenvalue %.3e to zero in sqrt_psd", w[0])
    r = np.sqrt(np.clip(w, 0.0, None))
    return hermitian_part((v * r) @ dag(v))
