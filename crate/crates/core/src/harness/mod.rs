//! Inequality checks over operator families and ħ-sweeps.
//!
//! Every check returns [`CheckRecord`]s. Pass/fail records carry the paper's
//! constant inside `rhs`; checks whose constant is only known to exist are
//! report-only and judged by their spread across ħ.

mod checks;
mod families;
mod record;
mod suite;
mod vector;

pub use checks::{
    check_bernstein, check_besov_embedding, check_besov_endpoint, check_besov_schatten, check_besov_suite,
    check_bessel_sobolev, check_gagliardo_sobolev, check_hls, check_morrey, check_riesz_reconstruction,
    check_riesz_transform, check_sobolev_dilation, check_sobolev_product, check_uncertainty, check_young,
    check_young_delta, estimate_lower_bound, gagliardo_bound, grid_params, lower_bound_grid, optimizer_ratio,
    young_relation,
};
pub use families::{FamilyKind, OperatorFamily, MAX_RANK};
pub use record::{
    format_real, parse_real, CheckRecord, ParamValue, Params, Report, Status, Summary, EXACT_TOL, IDENTITY_TOL,
    QUADRATURE_TOL,
};
pub use suite::{run_suite, stability_records, GridSpec, SuiteConfig, SuiteId, STABILITY_FACTOR};
pub use vector::{check_clarkson_mccarthy, check_dot_bound, check_vector_sandwich, TUPLE_LEN, VECTOR_DIM, VECTOR_TOL};
