use super::ops::{gamma_act, residue_at_zero};
use super::truncated::TruncatedSeries;
use crate::characters::ContinuousCharacter;
use crate::error::{Error, Result};
use crate::padic_core::scalar::val_int;
use crate::padic_core::PadicScalar;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

/// A finite element `Σ c_a γ_a` of the group algebra of `Γ ≅ Z_p^×`, with
/// `χ(γ_a) = a` an exact unit of `Z_(p)`.
#[derive(Clone, Debug)]
pub struct GroupAlgebraElement {
    p: u32,
    terms: Vec<(BigRational, PadicScalar)>,
}

impl GroupAlgebraElement {
    pub fn new(p: u32, terms: Vec<(BigRational, PadicScalar)>) -> Result<Self> {
        let mut out = GroupAlgebraElement { p, terms: vec![] };
        for (a, c) in terms {
            if a.is_zero() || val_int(a.numer(), p) != 0 || val_int(a.denom(), p) != 0 {
                return Err(Error::domain(format!("{a} is not a p-adic unit")));
            }
            out.push(a, c);
        }
        Ok(out)
    }

    /// `c·γ_a` for an integer unit `a`.
    pub fn single(p: u32, a: i64, c: PadicScalar) -> Result<Self> {
        Self::new(p, vec![(BigRational::from_integer(a.into()), c)])
    }

    fn push(&mut self, a: BigRational, c: PadicScalar) {
        if let Some(t) = self.terms.iter_mut().find(|t| t.0 == a) {
            t.1 = t.1.add(&c);
        } else {
            self.terms.push((a, c));
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn terms(&self) -> &[(BigRational, PadicScalar)] {
        &self.terms
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (a, c) in &o.terms {
            out.push(a.clone(), c.clone());
        }
        out
    }

    /// Termwise equality after collecting terms.
    pub fn eq_at_prec(&self, o: &Self) -> bool {
        let diff = self.add(&Self {
            p: o.p,
            terms: o.terms.iter().map(|(a, c)| (a.clone(), c.neg())).collect(),
        });
        diff.terms.iter().all(|(_, c)| c.is_zero())
    }

    /// `λ·f = Σ c_a γ_a(f)` up to `O(T^order)`.
    pub fn act(&self, f: &TruncatedSeries, order: i64) -> Result<TruncatedSeries> {
        let parts = crate::par::map(&self.terms, |(a, c)| gamma_act(a, f, order).map(|s| s.scale(c)));
        let mut acc = TruncatedSeries::zero(f.field(), f.prec());
        for s in parts {
            acc = acc.add(&s?);
        }
        Ok(acc)
    }
}

/// `λ ↦ λ(1+T) = Σ c_a (1+T)^a`, up to `O(T^order)` unless every `a` is a
/// nonnegative integer below `order`.
pub fn mellin_finite(lambda: &GroupAlgebraElement, field: crate::padic_core::Field, order: i64, prec: i64) -> TruncatedSeries {
    let mut acc = TruncatedSeries::zero(field, prec);
    for (a, c) in &lambda.terms {
        let e = TruncatedSeries::one_plus_t_pow(field, a, order, prec);
        acc = acc.add(&e.scale(c));
    }
    acc
}

/// `T_{τ,n}`: `γ_a ↦ τ(a)·γ_{a^n}`, extended linearly.
///
/// The values `τ(a)` must lie in the coefficient field.
pub fn twist_group_algebra(lambda: &GroupAlgebraElement, tau: &ContinuousCharacter, n: i64) -> Result<GroupAlgebraElement> {
    let mut out = GroupAlgebraElement { p: lambda.p, terms: vec![] };
    for (a, c) in &lambda.terms {
        let v = tau
            .eval_rational(a)?
            .as_scalar()
            .ok_or_else(|| Error::domain("twisting character takes values outside the coefficient field"))?;
        let an = if n >= 0 { a.pow(n as i32) } else { a.recip().pow((-n) as i32) };
        out.push(an, c.mul(&v));
    }
    Ok(out)
}

/// `{x, y} = res_0(Σ_i γ_{−1}(x_i)·y_i · dT/(1+T))`.
pub fn duality_pairing(x: &[TruncatedSeries], y: &[TruncatedSeries]) -> Result<PadicScalar> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::domain("coordinate vectors must have the same positive length"));
    }
    let minus_one = BigRational::from_integer(BigInt::from(-1));
    let mut acc: Option<TruncatedSeries> = None;
    for (xi, yi) in x.iter().zip(y) {
        // Enough terms of each factor to fix the T^{-1} coefficient.
        let need_x = -yi.i_min();
        let gx = gamma_act(&minus_one, xi, need_x.max(1))?;
        let prod = gx.mul(yi);
        acc = Some(match acc {
            None => prod,
            Some(a) => a.add(&prod),
        });
    }
    let acc = acc.expect("nonempty");
    let field = acc.field();
    let order = (-acc.i_min()).max(1);
    let inv = TruncatedSeries::one_plus_t_pow(field, &minus_one, order, acc.prec());
    residue_at_zero(&acc.mul(&inv))
}
