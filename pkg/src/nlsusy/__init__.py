"""Factorization partners for nonlinear Schrodinger-type equations.

The package builds level-dependent superpotentials for stationary NLSE-type
equations, maps solutions to their partner-equation counterparts, and checks
every construction by residual evaluation on a uniform 1-D grid.
"""

from .grid import (
    DegenerateFieldError,
    DerivativeScheme,
    Field,
    Grid1D,
    ResidualReport,
    SpectralAccuracyWarning,
    antiderivative,
    default_mask,
    derivative,
    mask_near_zeros,
    norms,
    residual_report,
)
from .riccati import (
    NonlinearitySpec,
    RiccatiSolveError,
    Superpotential,
    riccati_residual,
    solve_riccati_linearized,
    solve_riccati_shooting,
)
from .susy import (
    BrokenSusyError,
    PotentialField,
    SusyPair,
    apply_A,
    apply_A_dagger,
    apply_h1,
    factorization_check,
    partner_from_psi,
    psi_from_partner,
    superpotential_from_pair,
    v1_effective,
    v2_effective,
    vacuum_state_from_w,
)
from .residuals import (
    PartnerForm,
    duality_defect,
    invert_field,
    nlse_residual,
    partner_residual_phi,
    partner_residual_u,
)
from .vacuum import (
    EvolutionBlowupError,
    EvolutionState,
    LaxIdentityError,
    LaxPair,
    LaxReport,
    evolve_vacuum,
    lax_pair,
    lax_residual,
    scale_invariance_check,
    vacuum_residual,
)
from .catalog import (
    AnalyticSolutionFamily,
    build_pair,
    catalog_grid,
    energy_of,
    eval_catalog,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticSolutionFamily",
    "BrokenSusyError",
    "DegenerateFieldError",
    "DerivativeScheme",
    "EvolutionBlowupError",
    "EvolutionState",
    "Field",
    "Grid1D",
    "LaxIdentityError",
    "LaxPair",
    "LaxReport",
    "NonlinearitySpec",
    "PartnerForm",
    "PotentialField",
    "ResidualReport",
    "RiccatiSolveError",
    "SpectralAccuracyWarning",
    "Superpotential",
    "SusyPair",
    "antiderivative",
    "apply_A",
    "apply_A_dagger",
    "apply_h1",
    "build_pair",
    "catalog_grid",
    "default_mask",
    "derivative",
    "duality_defect",
    "energy_of",
    "eval_catalog",
    "evolve_vacuum",
    "factorization_check",
    "invert_field",
    "lax_pair",
    "lax_residual",
    "mask_near_zeros",
    "nlse_residual",
    "norms",
    "partner_from_psi",
    "partner_residual_phi",
    "partner_residual_u",
    "psi_from_partner",
    "residual_report",
    "riccati_residual",
    "scale_invariance_check",
    "solve_riccati_linearized",
    "solve_riccati_shooting",
    "superpotential_from_pair",
    "v1_effective",
    "v2_effective",
    "vacuum_residual",
    "vacuum_state_from_w",
]
