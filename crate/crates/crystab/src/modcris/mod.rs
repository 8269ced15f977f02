//! Rank-2 filtered `(φ, Γ)`-modules `D(α, β)`, their weak admissibility,
//! the twisted dual, and the classification of triangulations.

mod classify;
mod module;

pub use classify::{classify_triangulation, classify_uw, Classification, TriangulationClass, TriangulationParams};
pub use module::{
    build_D, compare_modules, dual_twist, module_level, standard_gauss_sum, weakly_admissible_irreducible,
    AdmissibilityReport, DualReport, FilteredPhiModule, Filtration, LineCheck,
};
