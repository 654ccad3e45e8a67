"""Mean-field variational inference over binary variables."""

from ._core import (
    AnalysisConstants,
    CheckReport,
    EnergyModel,
    IterationTrace,
    ModelError,
    RateFitReport,
    SolveResult,
    Term,
    TraceRecord,
    TraceTooShort,
    __version__,
    check_box_membership,
    check_gradient_bound,
    check_ssoc,
    check_sufficient_decrease,
    compute_constants,
    conditional_gap,
    coordinate_update,
    fit_rate,
    generate_ising_grid,
    generate_random_poly,
    grad_g,
    hessian_g,
    ising_pair,
    kl_oracle,
    objective_g,
    omega,
    prox_value,
    psi,
    solve,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
