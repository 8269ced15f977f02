//! Distributions on `Z_p` in a local moment model: integration, the
//! `γ`, `φ`, `ψ` and restriction actions, `LA_h` norms, the Amice transform
//! and the `w`-involution.

mod amice;
mod involution;
mod local;

pub use amice::{amice, amice_norm_check, derivative_at_root, derivative_at_root_via_series, AmiceNormCheck};
pub use involution::{w_involution, WSide};
pub use local::{
    dist_gamma, dist_norm_la, dist_phi, dist_psi, dist_res, dist_res_units, integrate, HigherMoments,
    LocalDistribution, LocalFunction,
};
