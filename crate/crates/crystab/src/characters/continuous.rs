use super::smooth::{CharValue, SmoothCharacter};
use crate::error::{Error, Result};
use crate::padic_core::scalar::{ppow, val_int};
use crate::padic_core::val::{ceil_q, Q};
use crate::padic_core::{Field, PadicScalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::fmt;

/// A continuous character `x^n · ⟨x⟩^s · χ` with `χ` smooth.
///
/// `⟨x⟩` is the principal-unit part of the unit part of `x` (so `⟨p⟩ = 1`);
/// the rational exponent `s` must have denominator prime to `p`. The weight
/// is `n + s`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuousCharacter {
    smooth: SmoothCharacter,
    alg_exp: i64,
    wt_shift: Q,
}

impl ContinuousCharacter {
    pub fn new(smooth: SmoothCharacter, alg_exp: i64) -> Self {
        ContinuousCharacter { smooth, alg_exp, wt_shift: Q::from_integer(0) }
    }

    pub fn with_shift(smooth: SmoothCharacter, alg_exp: i64, wt_shift: Q) -> Result<Self> {
        if *wt_shift.denom() % smooth.p() as i64 == 0 {
            return Err(Error::domain("weight shift must have denominator prime to p"));
        }
        Ok(ContinuousCharacter { smooth, alg_exp, wt_shift })
    }

    pub fn from_smooth(smooth: SmoothCharacter) -> Self {
        Self::new(smooth, 0)
    }

    /// `x^n`.
    pub fn x_power(field: Field, n: i64, prec: i64) -> Self {
        Self::new(SmoothCharacter::trivial(field, prec), n)
    }

    /// `x|x|`, the cyclotomic character.
    pub fn x_abs(field: Field, prec: i64) -> Self {
        Self::new(SmoothCharacter::norm(field, prec), 1)
    }

    pub fn p(&self) -> u32 {
        self.smooth.p()
    }
    pub fn smooth(&self) -> &SmoothCharacter {
        &self.smooth
    }
    pub fn alg_exp(&self) -> i64 {
        self.alg_exp
    }
    pub fn wt_shift(&self) -> Q {
        self.wt_shift
    }

    /// `δ(p) = p^n · χ(p)`.
    pub fn value_at_p(&self) -> PadicScalar {
        let at_p = self.smooth.at_p();
        if self.alg_exp >= 0 {
            at_p.mul_int(&ppow(self.p(), self.alg_exp as u32))
        } else {
            at_p.div_int(&ppow(self.p(), (-self.alg_exp) as u32))
        }
    }

    /// The weight `w(δ) = log δ(u) / log u`, read off symbolically.
    pub fn weight(&self) -> Q {
        Q::from_integer(self.alg_exp) + self.wt_shift
    }

    /// The weight computed as `log δ(u) / log u` at `u = (1+p)^{p^r}`, where
    /// `p^r` kills the wild part of the smooth factor.
    pub fn weight_via_log(&self, prec: i64) -> Result<PadicScalar> {
        let p = self.p();
        let r = self.smooth.wild().level();
        let u = BigInt::from(1 + p as i64).pow(ppow(p, r).to_u32().expect("small level"));
        let value = self.eval_rational_at(&BigRational::from_integer(u.clone()), prec + r as i64 + 2)?;
        let scalar = value
            .as_scalar()
            .ok_or_else(|| Error::domain("value at a p^r-th power should be a scalar"))?;
        let qp = Field::qp(p);
        let lu = qp.big(&u, prec + r as i64 + 2).log()?;
        scalar.log()?.div(&lu)
    }

    /// `⟨u⟩^s` for a unit `u` of `Q_p`.
    fn bracket_power(&self, u: &BigRational, prec: i64) -> Result<PadicScalar> {
        let p = self.p();
        let qp = Field::qp(p);
        let uu = qp.big_rat(u, prec);
        let res = uu.residue_mod(1)?.to_i64().expect("small");
        let bracket = uu.div(&qp.teichmuller(res, prec))?;
        if self.wt_shift.is_integer() {
            return bracket.pow(self.wt_shift.to_integer());
        }
        let y = bracket.sub(&qp.one(prec));
        let s = BigRational::new((*self.wt_shift.numer()).into(), (*self.wt_shift.denom()).into());
        let mut acc = qp.one(prec);
        let mut coef = BigRational::from_integer(1.into());
        let mut pw = qp.one(prec);
        for k in 1..=prec {
            coef = coef * (&s - BigRational::from_integer((k - 1).into())) / BigRational::from_integer(k.into());
            pw = pw.mul(&y);
            acc = acc.add(&pw.mul_rat(&coef));
        }
        Ok(acc.cap_prec(Q::from_integer(prec)))
    }

    fn eval_rational_at(&self, x: &BigRational, prec: i64) -> Result<CharValue> {
        if x.is_zero() {
            return Err(Error::domain("character evaluated at 0"));
        }
        let p = self.p();
        let base = self.smooth.eval_rational(x)?;
        let v = val_int(x.numer(), p) - val_int(x.denom(), p);
        let pv = BigRational::from_integer(ppow(p, v.unsigned_abs() as u32));
        let unit = if v >= 0 { x / &pv } else { x * &pv };
        let qp = Field::qp(p);
        let xn = qp.big_rat(x, prec + v.max(0) * self.alg_exp.abs()).pow(self.alg_exp)?;
        let br = self.bracket_power(&unit, prec)?;
        Ok(base.mul(&CharValue::from_scalar(xn.mul(&br))))
    }

    /// `δ(x)` for an exact nonzero rational.
    pub fn eval_rational(&self, x: &BigRational) -> Result<CharValue> {
        let prec = ceil_q(self.smooth.at_p().abs_prec()).max(1) + 2;
        self.eval_rational_at(x, prec)
    }

    /// `δ(x)` for a nonzero element of `Q_p`.
    pub fn eval(&self, x: &PadicScalar) -> Result<CharValue> {
        let q = x.as_rational().ok_or_else(|| Error::domain("argument must lie in Q_p"))?;
        if !x.val().is_finite() {
            return Err(Error::precision("valuation of the argument is not determined"));
        }
        let rel = ceil_q(x.abs_prec() - x.val().lower_bound());
        if rel < self.smooth.wild().level() as i64 + 1 {
            return Err(Error::precision("argument not known to the conductor"));
        }
        self.eval_rational_at(&q, rel)
    }

    pub fn mul(&self, o: &ContinuousCharacter) -> ContinuousCharacter {
        ContinuousCharacter {
            smooth: self.smooth.mul(&o.smooth),
            alg_exp: self.alg_exp + o.alg_exp,
            wt_shift: self.wt_shift + o.wt_shift,
        }
    }

    pub fn inv(&self) -> Result<ContinuousCharacter> {
        Ok(ContinuousCharacter { smooth: self.smooth.inv()?, alg_exp: -self.alg_exp, wt_shift: -self.wt_shift })
    }

    pub fn div(&self, o: &ContinuousCharacter) -> Result<ContinuousCharacter> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn mul_smooth(&self, s: &SmoothCharacter) -> ContinuousCharacter {
        ContinuousCharacter { smooth: self.smooth.mul(s), ..self.clone() }
    }
}

impl fmt::Display for ContinuousCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.alg_exp != 0 {
            write!(f, "x^{}*", self.alg_exp)?;
        }
        if !self.wt_shift.is_zero() {
            write!(f, "<x>^{}*", crate::padic_core::fmt_q(self.wt_shift))?;
        }
        write!(f, "{}", self.smooth)
    }
}
