"""Pluricomplex Green functions, Lempert functions and Monge-Ampere checks
on the bidisc, polydiscs and the unit ball."""
from .complex_core import Domain, blaschke_eval, disc_green, in_domain, mobius
from .errors import (
    DegenerateSliceError,
    DimensionError,
    DomainError,
    EmptyGridError,
    GeometryError,
    InvalidParameterError,
    ParseError,
    PlurigreenError,
    SingularStencilError,
)
from .green import (
    ComanBallParams,
    PoleConfiguration,
    coman_E,
    coman_S_membership,
    green_ball_single,
    green_bidisc_equal,
    green_bidisc_maxform,
    green_bidisc_weighted,
    green_function,
    green_polydisc_axis,
)
from .harness import (
    VerificationReport,
    convexity_check,
    counterexample_experiment,
    decomposition_check,
    dirichlet_checklist,
    pole_lelong_report,
)
from .lelong import RadialScan, lelong_estimate, log_bound_check, psi
from .lempert import (
    DiscSpec,
    LempertResult,
    PickProblem,
    SolverConfig,
    disc_objective,
    explicit_disc,
    lempert_bidisc_axis,
    lempert_subset_min,
    pick_feasible,
    two_pole_lower_bound,
)
from .monge_ampere import (
    AnnulusSolution,
    GridRegion,
    annulus_from_data,
    annulus_solution,
    complex_hessian,
    ma_det,
    maximality_scan,
    section3_hessian_det,
    section3_u,
)

__version__ = "0.1.0"
