import numpy as np
import pytest

from chdl import _kernels_py, kernels


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled extension not built")
@pytest.mark.parametrize("seed", range(5))
def test_backends_agree(seed):
    from chdl import _kernels
    rng = np.random.default_rng(seed)
    n = 60
    a, h = rng.random(n), 3 * rng.random(n)
    grid = np.linspace(0, 1, 51)
    for energy in (0.2, 1.0, 2.9):
        ref = _kernels_py.best_mixture(a, h, energy, grid, 0.0)
        out = _kernels.best_mixture(a, h, energy, grid, 0.0)
        assert out[1:3] == ref[1:3]
        assert out[0] == pytest.approx(ref[0], abs=1e-14)
        assert out[3] == pytest.approx(ref[3], abs=1e-14)


def test_best_mixture_crossing_point():
    # objective 0 at energy 0, objective 1 at energy 1: bound 0.25 gives 0.25
    val, i, j, p = _kernels_py.best_mixture(np.array([0.0, 1.0]), np.array([0.0, 1.0]), 0.25,
                                            np.linspace(0, 1, 3), 0.0)
    assert val == pytest.approx(0.25)
    assert (i, j) == (0, 1) and p == pytest.approx(0.25)


def test_best_mixture_infeasible():
    val, i, _, _ = _kernels_py.best_mixture(np.array([1.0]), np.array([2.0]), 1.0, np.array([0.0, 1.0]), 0.0)
    assert i == -1 and val == -np.inf


def test_fallback_selected_on_request():
    import os
    import subprocess
    import sys
    env = {**os.environ, "CHDL_PURE_PYTHON": "1"}
    code = ("from chdl import kernels, energy; import numpy as np; "
            "print(kernels.BACKEND, round(energy.e_norm(np.diag([0, 1]), energy.EnergyObservable(np.diag([0, 1]), 0.25)), 12))")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "0.5"]
