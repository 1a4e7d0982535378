"""Monte Carlo geometry of quantum state bodies.

The set of density matrices and its positive-partial-transpose section are
bodies of constant height: every generic boundary face is tangent to the
insphere around the maximally mixed state, the ratio r * A / V equals the body
dimension, and the interior-to-boundary PPT probability ratio equals two.
This package samples, certifies and cross-validates those facts numerically.
"""

__version__ = "0.1.0"

from .config import ConfigError, ExperimentConfig, config_from_dict, config_from_json
from .estimators import (
    AreaCrossCheck,
    CornerProbeResult,
    Estimate,
    HeightCertificate,
    InsufficientSamplesError,
    OmegaReport,
    corner_probe,
    cross_validate_area,
    estimate_omega,
    estimate_p_boundary,
    estimate_p_interior,
    height_certificate,
    mc_area,
    mc_boundary_ppt_fraction,
    mc_gamma,
    mc_volume,
    sphere_area,
)
from .experiments import run_experiment, summary_line
from .geometry import (
    BodySpec,
    BoundaryContact,
    NonGenericDirectionError,
    analytic_area_volume_ratio,
    boundary_contact,
    inscribed_radius,
    radial_function,
    support_height,
    tangency_state,
)
from .hermitian import (
    BipartiteShape,
    DensityMatrix,
    DimensionMismatchError,
    HermitianMatrix,
    TracelessDirection,
    hermitian_part,
    hs_distance,
    hs_inner,
    hs_norm,
    is_ppt,
    maximally_mixed,
    min_eigenvalue,
    negativity,
    partial_transpose,
)
from .polytopes import (
    FaceTieError,
    PolytopeContact,
    PolytopeHeightReport,
    TangentBody,
    UnboundedBodyError,
    constant_height_check,
    cross_generators,
    cube_generators,
    intersect_bodies,
    polar_contact,
    polar_radial,
    polytope_area_mc,
    polytope_gamma_mc,
    polytope_volume_mc,
    random_unit_generators,
    simplex_generators,
)
from .records import ResultRecord, load_records, render_report, write_record
from .sampling import (
    BoundaryState,
    RngStream,
    boundary_eigenvalues_metropolis,
    boundary_eigenvalues_wishart,
    sample_boundary_state_hs,
    sample_direction,
    sample_haar_unitary,
    sample_state_hs,
)
from .validation import sampler_validation, two_sample_chi2

__all__ = [name for name in dir() if not name.startswith("_")]
