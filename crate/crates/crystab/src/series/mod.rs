//! Truncated Laurent series over `L` with the `φ`, `ψ`, `Γ` and restriction
//! operators, residues, norms and finite group-algebra actions.

pub mod binom;
mod group;
mod ops;
mod residue;
mod truncated;

pub use group::{duality_pairing, mellin_finite, twist_group_algebra, GroupAlgebraElement};
pub use ops::{
    frobenius_phi, gamma_act, log_one_plus_t, phi_of_t, psi, psi_row, psi_to_order, res_restrict, residue_at_zero, rho_exponent, rho_norm,
    sup_norm_r, UnitPolynomial, WindowNorm,
};
pub use residue::partial_fraction_residue;
pub use truncated::{Decay, TruncatedSeries, MIN_EXPONENT};
