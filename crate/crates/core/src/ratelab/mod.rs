//! Certified sup distances, rate experiments and bound checks.

mod checks;
mod experiment;
mod fit;
mod plot;
mod report;
mod sup;

pub use checks::{
    check_dagum_lipschitz, check_rescaling, check_sandwich, check_tail_chain, dagum_lipschitz_bound,
    homomorphism_suite, CheckPoint, CheckReport, LipschitzReport, SuiteReport, LAW_TOL, SLACK_FLOOR,
};
pub use experiment::{
    boolean_frechet_sup, boolean_rate_experiment, default_von_mises_grid, free_frechet_sup, free_rate_experiment,
    interior_bound_experiment, InteriorReport, InteriorRow, RateConfig, RateReport, RateRow,
};
pub use plot::{reference_rate, render_svg};
pub use report::{to_json, write_csv, CSV_COLUMNS};
pub use fit::{fit_rate, RateFit, MIN_FIT_ROWS};
pub use sup::{
    sup_distance, sup_distance_closed, sup_distance_with, sup_monotone_product, Refined, SupBracket,
    SupOptions, DEFAULT_MAX_CELLS, DEFAULT_TAIL_MASS,
};
