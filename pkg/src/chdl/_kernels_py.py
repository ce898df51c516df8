"""Numpy implementation of the compiled kernels, used when the extension is absent."""
import numpy as np


def best_mixture(a, h, energy, p_grid, slack=1e-12):
    """Best feasible two-point mixture of candidate pure states.

    Candidate ``k`` has objective ``a[k]`` and energy ``h[k]``. Every pair
    ``i <= j`` is mixed as ``(1-p) k_i + p k_j`` for ``p`` in ``p_grid`` and at
    the point where the mixture energy crosses ``energy``. Returns
    ``(value, i, j, p)``; ``i == -1`` if nothing is feasible.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    h = np.ascontiguousarray(h, dtype=np.float64)
    p = np.ascontiguousarray(p_grid, dtype=np.float64)
    limit = energy + slack * max(1.0, abs(energy))
    n = a.shape[0]
    best, bi, bj, bp = -np.inf, -1, -1, 0.0
    q = 1.0 - p
    for i in range(n):
        aj, hj = a[i:], h[i:]
        en = q[None, :] * h[i] + p[None, :] * hj[:, None]
        val = q[None, :] * a[i] + p[None, :] * aj[:, None]
        val = np.where(en <= limit, val, -np.inf)
        k = int(np.argmax(val))
        if val.flat[k] > best:
            r, c = divmod(k, p.shape[0])
            best, bi, bj, bp = float(val.flat[k]), i, i + r, float(p[c])
        # exact energy crossing for pairs straddling the bound
        di, dj = h[i] - energy, hj - energy
        cross = di * dj < 0.0
        if np.any(cross):
            pc = di / (h[i] - hj[cross])
            vc = (1.0 - pc) * a[i] + pc * aj[cross]
            k = int(np.argmax(vc))
            if vc[k] > best:
                best, bi, bj, bp = float(vc[k]), i, i + int(np.flatnonzero(cross)[k]), float(pc[k])
    return best, bi, bj, bp
