"""Steady-state Gaussian entanglement in a double-cavity molecular
optomechanical system with an intracavity parametric amplifier."""

from .dynamics import StabilityReport, build_diffusion, build_drift, stability
from .entanglement import (
    MODE_LABELS,
    ModePair,
    PairCovariance,
    extract_pair,
    log_negativity,
    log_negativity_ppt_oracle,
)
from .errors import (
    Diverged,
    EigenvalueFailure,
    NonConvergence,
    NonPhysicalState,
    ParameterError,
    SingularSolve,
    UnstableSystem,
)
from .lyapunov import (
    integrate_covariance,
    is_physical,
    solve_lyapunov,
    symplectic_form,
    uncertainty_defect,
)
from .meanfield import SteadyState, integrate_classical, solve_mean_field
from .params import (
    DEFAULTS,
    DerivedCouplings,
    SystemParams,
    apply_overrides,
    collective_couplings,
    derived_couplings,
    load_config,
    thermal_occupation,
    to_canonical_json,
    validate,
)
from .sweep import (
    SweepAxis,
    SweepSpec,
    SweepTable,
    emit_csv,
    evaluate_point,
    find_stability_threshold,
    run_sweep,
)

__version__ = "0.1.0"
