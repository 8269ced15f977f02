//! p-adic scalars with tracked precision, the cyclotomic algebras `L_m`,
//! and roots of unity of p-power order.

pub mod cyclo;
pub mod linalg;
pub mod scalar;
pub mod val;

pub use cyclo::{binomial, cyclo_degree, CycloElement, RootOfUnity};
pub use scalar::{Field, PadicScalar};
pub use val::{fmt_q, parse_q, Val, Q};

/// Valuation of a scalar.
pub fn padic_val(x: &PadicScalar) -> Val {
    x.val()
}

/// p-adic logarithm of a principal unit.
pub fn padic_log(x: &PadicScalar) -> crate::Result<PadicScalar> {
    x.log()
}

/// `η^a` for a root of unity held as a cyclotomic element.
pub fn cyclo_power(eta: &CycloElement, a: i64) -> CycloElement {
    if a >= 0 {
        eta.pow(a as u64)
    } else {
        let n = num_traits::pow(eta.field().p() as u64, eta.level() as usize);
        eta.pow((a.rem_euclid(n as i64)) as u64)
    }
}

/// Valuation of a cyclotomic element.
pub fn cyclo_val(x: &CycloElement) -> Val {
    x.val()
}
