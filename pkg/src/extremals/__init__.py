"""Numerical analysis of time-optimal extremals for control-affine systems.

The package classifies singular-locus crossings of the bang dynamics driven
by the maximized Hamiltonian h0 + ||(h1..hk)||, solves for the switch
parameter and jump controls, integrates extremals through switchings in
blow-up coordinates, and validates every analytic prediction against
brute-force oracles at desk scale.
"""

from .errors import (
    ConfigError,
    CovectorError,
    DimensionError,
    EvaluationError,
    ExtremalsError,
    FieldSyntaxError,
    FrameError,
    IntegrationError,
    MultipleSwitchError,
    NonSkewError,
    NoScheduleError,
    ScenarioError,
    SwitchSolveError,
)
from .fields import (
    AffineSystem,
    VectorField,
    complete_frame,
    jacobian,
    lie_bracket,
    parse_field,
)
from .lift import (
    BracketData,
    CotangentPoint,
    LiftedPoint,
    annihilator_covector,
    bracket_data,
    from_blowup,
    lift_h,
    pairing_table,
    to_blowup,
)
from .switch import (
    Codim1Result,
    MembershipVerdict,
    Scenario,
    SingularArcVerdict,
    SwitchSolution,
    classify,
    codim1_condition,
    equilibrium_jacobian,
    jump_controls,
    membership,
    singular_arc_check,
    solve_d,
    tangent_eigenvalues,
)
from .sphereflow import (
    LorentzState,
    SphereState,
    cone_directions,
    integrate_lorentz,
    integrate_sphere,
    lorentz_form,
    lorentz_matrix,
    sphere_limits,
    sphere_rhs,
)
from .integrate import (
    ExtremalTrajectory,
    IntegratorConfig,
    LemmaConstants,
    RescaledRun,
    RhoProbeResult,
    SwitchRecord,
    bang_rhs,
    export_trajectory,
    flow_continuity_probe,
    format_trajectory,
    hamiltonian_value,
    integrate_extremal,
    integrate_rescaled,
    passage_time_bound,
    rescaled_rhs,
    rho_lower_bound_probe,
    sample_lemma_constants,
)
from .oracle import (
    BangBangSchedule,
    GridSpec,
    LinearInstance,
    bangbang_grid_solver,
    sphere_membership_oracle,
    zero_search_g,
)

__version__ = "0.1.0"
