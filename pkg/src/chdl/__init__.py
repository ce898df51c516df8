"""Quantum channels, energy-constrained distances and Stinespring dilations."""
__version__ = "0.1.0"

from .policy import DEFAULT_POLICY, NumericPolicy
from .errors import (ChdlError, ConvergenceError, DimensionError, InfeasibleEnergyError, NotHermitianError,
                     NotPSDError, PreconditionError)
from .linalg import (hermitian_eig, operator_norm, partial_trace, polar_decompose, sqrt_psd, tensor_product,
                     trace_norm)
from .channels import (ChoiMatrix, KrausChannel, StinespringChannel, apply, choi, choi_rank, complementary,
                       depolarizing_channel, dual_apply, kraus_to_stinespring, stinespring_to_kraus,
                       unitary_channel, validate)
from .energy import (EnergyObservable, bures_states, diamond_norm_unconstrained, e_norm, e_norm_primal_oracle,
                     ec_bures_channels, ec_diamond_norm, fidelity)
from .dilations import (CommonDilation, PartialIsometry, common_dilation, complete_to_unitary,
                        fixed_rep_approximation, unitary_sequence_udc, universal_unitary_dilation)
from .convergence import (ChannelSequence, ProbeSet, converging_stinespring_sequence, counterexample_family,
                          dual_convergence_report, kraus_convergence_check, strong_convergence_report)
from .info import (DiscreteEnsemble, entropic_disturbance, holevo_chi, lsc_experiment, relative_entropy,
                   reversibility_chi_test, von_neumann_entropy)

__all__ = [
    "ChannelSequence", "ChdlError", "ChoiMatrix", "CommonDilation", "ConvergenceError", "DEFAULT_POLICY",
    "DimensionError", "DiscreteEnsemble", "EnergyObservable", "InfeasibleEnergyError", "KrausChannel",
    "NotHermitianError", "NotPSDError", "NumericPolicy", "PartialIsometry", "PreconditionError", "ProbeSet",
    "StinespringChannel", "apply", "bures_states", "choi", "choi_rank", "common_dilation", "complementary",
    "complete_to_unitary", "converging_stinespring_sequence", "counterexample_family", "depolarizing_channel",
    "diamond_norm_unconstrained", "dual_apply", "dual_convergence_report", "e_norm", "e_norm_primal_oracle",
    "ec_bures_channels", "ec_diamond_norm", "entropic_disturbance", "fidelity", "fixed_rep_approximation",
    "hermitian_eig", "holevo_chi", "kraus_convergence_check", "kraus_to_stinespring", "lsc_experiment",
    "operator_norm", "partial_trace", "polar_decompose", "relative_entropy", "reversibility_chi_test",
    "sqrt_psd", "stinespring_to_kraus", "strong_convergence_report", "tensor_product", "trace_norm",
    "unitary_channel", "unitary_sequence_udc", "universal_unitary_dilation", "validate",
    "von_neumann_entropy",
]
