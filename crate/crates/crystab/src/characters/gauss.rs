use super::smooth::SmoothCharacter;
use crate::error::{Error, Result};
use crate::padic_core::scalar::ppow;
use crate::padic_core::{CycloElement, PadicScalar, RootOfUnity};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

/// `G(τ, η) = Σ_{a ∈ (Z/p^m)^×} τ^{−1}(a) η^a` for `τ` of conductor `m ≥ 1`
/// and `η` primitive of order `p^m`; `1` when `τ` is unramified.
pub fn gauss_sum(tau: &SmoothCharacter, eta: &RootOfUnity, prec: i64) -> Result<CycloElement> {
    let field = tau.field();
    let m = tau.conductor();
    if m == 0 {
        return Ok(CycloElement::one(field, eta.order_level(), prec));
    }
    if eta.order_level() != m {
        return Err(Error::domain(format!(
            "root of order p^{} does not match conductor {m}",
            eta.order_level()
        )));
    }
    let p = tau.p();
    let n = ppow(p, m).to_usize().expect("small level");
    let e = eta.primitive_form().at_level(m).exponent().clone();
    let tau_inv = tau.inv()?;
    let terms: Vec<Option<(usize, PadicScalar)>> = crate::par::map_range(n, |a| {
        if a % p as usize == 0 {
            return None;
        }
        let v = tau_inv.eval_unit_at(&BigInt::from(a), prec).ok()?;
        let root = v.root().at_level(m);
        let idx = (&e * a + root.exponent()).mod_floor(&BigInt::from(n)).to_usize()?;
        Some((idx, v.scalar().to_field(field)))
    });
    let mut coeffs = vec![field.zero(prec); n];
    for (idx, s) in terms.into_iter().flatten() {
        coeffs[idx] = coeffs[idx].add(&s);
    }
    CycloElement::from_coeffs(field, m, coeffs)
}
