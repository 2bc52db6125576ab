"""Numerical laboratory for chemotaxis systems with signal-dependent
sensitivity: a conservative finite-volume discretization valid uniformly in
the signal relaxation constant, the closed-form theory that controls it, and
the experiments connecting the two."""

__version__ = "0.1.0"

from .mesh import (
    Field,
    Grid,
    HelmholtzOperator,
    build_grid,
    chemotaxis_divergence,
    grad_norm_lq,
    helmholtz_solve,
    laplacian_apply,
    norm_lp,
    w1q_norm,
)
from .theory import (
    ChiParams,
    ConditionParams,
    EtaInputs,
    chi_eval,
    condition_ass_pp,
    eta_closed_form,
    f_discriminant,
    f_poly,
    h_sign,
    lyapunov_functional,
    phi_r,
    phi_r_lower_bound,
    r_value,
    run_property_suite,
    threshold_chi0_pe,
    threshold_chi0_pp,
)
from .dynamics import (
    DiagnosticsRecord,
    FieldInit,
    GridSpec,
    SimConfig,
    SimState,
    init_state,
    run,
    stability_dt,
    step,
)
from .experiments import (
    BoundednessReport,
    C0Estimate,
    LyapunovReport,
    SweepConfig,
    SweepResult,
    boundedness_probe,
    estimate_c0,
    lambda_sweep,
    lyapunov_probe,
)
