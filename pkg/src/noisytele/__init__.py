"""Teleportation fidelity and entanglement of Lindblad-decohered resources."""

from .channels import (
    ALL_KINDS,
    DIFFERENT_AXIS,
    EPR_KINDS,
    ISOTROPIC,
    SAME_AXIS,
    W_CHANNEL,
    W_STATE,
    ChannelCoefficients,
    IntegrationWarning,
    NoiseSpec,
    analytic_channel,
    channel_coefficients,
    integrated_channel,
    lindblad_evolve,
)
from .decomp import (
    MU_STAR,
    NU_STAR,
    Ensemble,
    OutOfDomainError,
    optimal_ensemble,
    separable_ensemble,
    solve_phase_condition,
    verify_ensemble,
    wootters_decomposition,
)
from .entanglement import (
    EntanglementReport,
    concurrence_mixed,
    concurrence_pure,
    entanglement_report,
    eof_from_concurrence,
    groverian_from_concurrence,
    pmax_numeric,
    pmax_pure_2qubit,
    ppt_min_eigenvalue,
    separability_threshold_kt,
)
from .teleport import (
    CLASSICAL_FIDELITY,
    average_fidelity,
    average_fidelity_closed_form,
    classical_threshold_kt,
    fidelity_at,
    teleport_output,
)

__version__ = "0.1.0"
