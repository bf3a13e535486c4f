"""Semi-implicit manifold MCMC for diffusion paths observed with error.

Thin re-export of the compiled core; see the package README for the model
and sampler definitions.
"""

from ._core import (
    ChainState,
    ChainSummary,
    CholBidiag,
    DiffusionTarget,
    DriftFn,
    Error,
    GridSpec,
    InitStrategy,
    MetricMode,
    ModelFunctions,
    ObsMap,
    ObservationSet,
    Path,
    Potential,
    ProposalCoeffs,
    Rng,
    StepRecord,
    SymTridiag,
    brownian_bridge_fill,
    build_prior_precision,
    cholesky,
    derive_seed,
    exact_gaussian_posterior,
    grad_phi,
    init_path,
    log_accept_ratio,
    log_det,
    make_chain_state,
    matvec,
    metric_tensor,
    phi,
    preset_config_names,
    qv_estimate,
    quad_form,
    run_chain,
    simulate_observations,
    simulate_path,
    solve,
    step_inf_mala,
    step_inf_mmala,
    step_mmala,
    trace_indices,
)

__all__ = [
    "ChainState",
    "ChainSummary",
    "CholBidiag",
    "DiffusionTarget",
    "DriftFn",
    "Error",
    "GridSpec",
    "InitStrategy",
    "MetricMode",
    "ModelFunctions",
    "ObsMap",
    "ObservationSet",
    "Path",
    "Potential",
    "ProposalCoeffs",
    "Rng",
    "StepRecord",
    "SymTridiag",
    "brownian_bridge_fill",
    "build_prior_precision",
    "cholesky",
    "derive_seed",
    "exact_gaussian_posterior",
    "grad_phi",
    "init_path",
    "log_accept_ratio",
    "log_det",
    "make_chain_state",
    "matvec",
    "metric_tensor",
    "phi",
    "preset_config_names",
    "qv_estimate",
    "quad_form",
    "run_chain",
    "simulate_observations",
    "simulate_path",
    "solve",
    "step_inf_mala",
    "step_inf_mmala",
    "step_mmala",
    "trace_indices",
]
