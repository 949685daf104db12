"""Exact small quantum homology and Hofer-length bounds for circle loops."""

from .novikov import (
    NEG_INF,
    ChernFunctional,
    NovikovElement,
    OmegaFunctional,
    ParseError,
    SphereClass,
    format_exponent,
    format_novikov,
    nov_add,
    nov_mul,
    parse_exponent,
    parse_novikov,
    truncate_below,
    valuation,
)
from .quantum_homology import (
    ManifoldModel,
    ModelError,
    NotInvertibleError,
    QHElement,
    classical_product,
    exact_inverse,
    format_qh,
    hbar,
    invert,
    load_model,
    model_blowup_cp2,
    model_cpn,
    model_from_dict,
    model_to_dict,
    nov_scale,
    parse_qh,
    power,
    power_walk,
    quantum_product,
    rationality_index,
    save_model,
    validate_model,
)
from .seidel_bounds import (
    GrowthRow,
    GrowthSummary,
    GrowthTable,
    MonotoneCaseError,
    RTildeCertificate,
    SeidelElement,
    delta_constant,
    ell_plus_lower_bound,
    growth_table,
    omega_f,
    psi,
    q_element,
    r_tilde_certificate,
    r_tilde_estimate,
    two_sided_bound,
    two_sided_bounds,
)
from .hofer_lengths import (
    ExtremumReport,
    LoopLengths,
    PathLengths,
    RadialHamiltonian,
    SampledPath,
    fixed_extremum_check,
    lengths_blowup_loop,
    mean_radius_sq,
    mean_radius_sq_exact,
    path_lengths,
    radial_loop_path,
    radial_mean,
)

__version__ = "0.1.0"
