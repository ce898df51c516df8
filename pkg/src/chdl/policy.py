"""Numeric tolerances shared by every solver in the package."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class NumericPolicy:
    """Immutable record of tolerances and iteration caps.

    Every public routine accepts ``policy=None`` and falls back to
    :data:`DEFAULT_POLICY`. Use :meth:`replace` to derive overrides.
    """

    hermitian_tol: float = 1e-10
    psd_clamp: float = 1e-10
    psd_reject: float = 1e-6
    state_tol: float = 1e-10
    isometry_tol: float = 1e-9
    choi_equal_tol: float = 1e-8
    rank_tol: float = 1e-8
    # golden-section search for the Lagrangian dual of the E-norm
    golden_iters: int = 200
    golden_xtol: float = 1e-15
    # conic solve of the channel Bures minimax
    solver_tol: float = 1e-10
    # see-saw for diamond-norm lower bounds
    seesaw_restarts: int = 8
    seesaw_iters: int = 200
    seesaw_rtol: float = 1e-12

    def replace(self, **changes) -> "NumericPolicy":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULT_POLICY = NumericPolicy()


def resolve(policy: NumericPolicy | None) -> NumericPolicy:
    return DEFAULT_POLICY if policy is None else policy
