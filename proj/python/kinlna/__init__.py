"""Stochastic reaction networks: simulation, LNA likelihoods, MCMC inference."""

from ._core import (  # noqa: F401
    BuiltinModel,
    EmpiricalTransition,
    FilterResult,
    GaussianDist,
    KineticError,
    ObservationModel,
    ObservationSeries,
    PriorSpec,
    ReactionNetwork,
    SampleChain,
    Trajectory,
    builtin,
    em_trajectory,
    empirical_transition,
    ess,
    lna_transition_density,
    log_prior,
    loglik_fully_observed,
    loglik_lna_filter,
    loglik_lna_global,
    loglik_ode_gauss,
    parse_network,
    rwm_chain,
    sample_at_times,
    serialize_network,
    smallpox_series,
    ssa_trajectory,
    summarize,
    tune_proposal,
)

__all__ = [name for name in dir() if not name.startswith("_")]
