use super::continuous::ContinuousCharacter;
use super::smooth::SmoothCharacter;
use crate::error::{Error, Result};
use crate::padic_core::{Field, PadicScalar, Q};

/// A pair `(α, β)` of smooth characters with a weight `k ≥ 2`, normalized so
/// that `α_p = α(p)^{−1}` and `β_p = β(p)^{−1}` satisfy
/// `0 < val β_p ≤ val α_p < k − 1` and `val α_p + val β_p = k − 1`.
#[derive(Clone, Debug)]
pub struct CharacterPair {
    alpha: SmoothCharacter,
    beta: SmoothCharacter,
    k: u32,
}

fn finite_val(x: &PadicScalar) -> Result<Q> {
    x.val().finite().ok_or_else(|| Error::precision("valuation of a value at p is not determined"))
}

impl CharacterPair {
    /// Validates the valuation constraints, swapping `α` and `β` when needed.
    pub fn new(alpha: SmoothCharacter, beta: SmoothCharacter, k: u32) -> Result<Self> {
        if alpha.p() != beta.p() {
            return Err(Error::domain("characters for different primes"));
        }
        if k < 2 {
            return Err(Error::domain("weight k must be at least 2"));
        }
        let va = -finite_val(alpha.at_p())?;
        let vb = -finite_val(beta.at_p())?;
        let (alpha, beta, va, vb) = if vb > va { (beta, alpha, vb, va) } else { (alpha, beta, va, vb) };
        let w = Q::from_integer(k as i64 - 1);
        if va + vb != w {
            return Err(Error::domain(format!(
                "val(alpha_p) + val(beta_p) = {} but k - 1 = {}",
                crate::padic_core::fmt_q(va + vb),
                k - 1
            )));
        }
        if vb <= Q::from_integer(0) || va >= w {
            return Err(Error::domain("need 0 < val(beta_p) <= val(alpha_p) < k - 1"));
        }
        Ok(CharacterPair { alpha, beta, k })
    }

    pub fn alpha(&self) -> &SmoothCharacter {
        &self.alpha
    }
    pub fn beta(&self) -> &SmoothCharacter {
        &self.beta
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn p(&self) -> u32 {
        self.alpha.p()
    }
    /// The coefficient field, the larger of the two value fields.
    pub fn field(&self) -> Field {
        if self.alpha.field().is_base() {
            self.beta.field()
        } else {
            self.alpha.field()
        }
    }

    /// `α_p = α(p)^{−1}`.
    pub fn alpha_p(&self) -> PadicScalar {
        self.alpha.at_p().inv().expect("checked invertible")
    }
    /// `β_p = β(p)^{−1}`.
    pub fn beta_p(&self) -> PadicScalar {
        self.beta.at_p().inv().expect("checked invertible")
    }

    /// `βα^{−1}`.
    pub fn ratio(&self) -> SmoothCharacter {
        self.beta.div(&self.alpha).expect("checked invertible")
    }

    /// Whether `α = β`.
    pub fn is_exceptional(&self) -> bool {
        self.alpha == self.beta
    }

    /// `m(α, β) = max(n(βα^{−1}), 1)`.
    pub fn essential_conductor(&self) -> u32 {
        self.ratio().conductor().max(1)
    }

    /// `δ_α(z) = (βα^{−1})(z)|z|^{−1}z^{k−2}`.
    pub fn delta_alpha(&self) -> ContinuousCharacter {
        self.twist_character(&self.ratio())
    }

    /// `δ_β(z) = (αβ^{−1})(z)|z|^{−1}z^{k−2}`.
    pub fn delta_beta(&self) -> ContinuousCharacter {
        self.twist_character(&self.alpha.div(&self.beta).expect("checked invertible"))
    }

    fn twist_character(&self, ratio: &SmoothCharacter) -> ContinuousCharacter {
        let p = self.p() as i64;
        let prec = crate::padic_core::val::ceil_q(ratio.at_p().abs_prec());
        let inv_norm = SmoothCharacter::unramified(Field::qp(self.p()).int(p, prec + 1)).expect("p invertible");
        ContinuousCharacter::new(ratio.mul(&inv_norm), self.k as i64 - 2)
    }
}

/// `m(α, β)`.
pub fn essential_conductor(pair: &CharacterPair) -> u32 {
    pair.essential_conductor()
}

/// The constant `C(α_p, β_p)`: `(β_p/(pα_p))^m` when `βα^{−1}` is ramified
/// of conductor `m`, and `(1 − β_p/(pα_p))/(1 − α_p/β_p)` otherwise.
pub fn intertwining_constant(pair: &CharacterPair) -> Result<PadicScalar> {
    let (ap, bp) = (pair.alpha_p(), pair.beta_p());
    let ratio = bp.div(&ap.mul_i64(pair.p() as i64))?;
    if !pair.ratio().is_unramified() {
        return ratio.pow(pair.essential_conductor() as i64);
    }
    let one = ap.field().one(crate::padic_core::val::ceil_q(ap.abs_prec().max(bp.abs_prec())) + 2);
    let den = one.sub(&ap.div(&bp)?);
    if den.is_zero() {
        return Err(Error::domain("alpha = beta: the unramified constant is undefined"));
    }
    one.sub(&ratio).div(&den)
}
