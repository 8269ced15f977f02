use super::local::{HigherMoments, LocalDistribution};
use crate::characters::CharacterPair;
use crate::error::{Error, Result};
use crate::padic_core::scalar::{inv_mod, ppow};
use crate::padic_core::val::Q;
use crate::padic_core::PadicScalar;
use crate::series::binom;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Which character of the pair twists the involution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WSide {
    /// `δ_α`, with sign `β(−1)(−1)^k`.
    Alpha,
    /// `δ_β`, with sign `α(−1)(−1)^k`.
    Beta,
}

/// Polynomial product truncated below degree `n`.
fn mul_trunc(a: &[BigRational], b: &[BigRational], n: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `wμ` with `∫f d(wμ) = ε∫_{Z_p^×} δ(z) f(1/z) dμ`, where `δ = δ_α` and
/// `ε = β(−1)(−1)^k` (or the same with `α` and `β` swapped).
///
/// For a unit class `t` with inverse class `s`, on `z = s + p^h u`:
/// `(1/z − t)/p^h = c₀ + Σ_{j≥1} (−1)^j s^{−j−1} p^{h(j−1)} u^j` with
/// `c₀ = (1 − st)/(s p^h)`, and `δ(z) = χ(s)(s + p^h u)^{k−2}` for the tame
/// character `χ = δ|_{Z_p^×}·x^{2−k}`. The `m`-th moment of `wμ` on `t` is
/// the pairing of `μ`'s moments on `s` with the coefficients of
/// `δ(z)·G(u)^m`; the coefficient of `u^i` has valuation at least
/// `h·max(0, i − m)`, which bounds what the dropped moments contribute.
pub fn w_involution(mu: &LocalDistribution, pair: &CharacterPair, side: WSide) -> Result<LocalDistribution> {
    let p = mu.p();
    let h = mu.level();
    let chi = match side {
        WSide::Alpha => pair.ratio(),
        WSide::Beta => pair.ratio().inv()?,
    };
    if chi.conductor() > 1 {
        return Err(Error::domain(format!(
            "the w-involution on scalar moments needs a tame twist, got conductor {}",
            chi.conductor()
        )));
    }
    if h < 1.max(chi.conductor()) {
        return Err(Error::level(format!("the w-involution needs level at least 1, got {h}")));
    }
    let modulus = ppow(p, h);
    let classes = mu.classes();
    for a in (0..classes).filter(|a| a % p as usize == 0) {
        if mu.entries()[a].iter().any(|d| !d.is_zero()) || mu.higher()[a] != HigherMoments::Zero {
            return Err(Error::support(format!("distribution is not supported on units (class {a})")));
        }
    }
    let prec = mu.work_prec();
    let field = if mu.field().is_base() { pair.field() } else { mu.field() };
    let other = match side {
        WSide::Alpha => pair.beta(),
        WSide::Beta => pair.alpha(),
    };
    let minus_one = other
        .eval_unit(&BigInt::from(-1))?
        .as_scalar()
        .ok_or_else(|| Error::domain("character value at −1 is not a scalar"))?;
    let sign = if pair.k().is_multiple_of(2) { minus_one } else { minus_one.neg() };
    let k2 = pair.k() as i64 - 2;
    let degree = mu.degree();
    let ph = BigRational::from_integer(modulus.clone());

    let rows = crate::par::map_range(classes, |t| -> Result<(Vec<PadicScalar>, HigherMoments)> {
        if t % p as usize == 0 {
            return Ok((vec![field.zero(prec); degree], HigherMoments::Zero));
        }
        let tb = BigInt::from(t);
        let s = inv_mod(&tb, &modulus);
        let su = s.to_usize().expect("small level");
        let sr = BigRational::from_integer(s.clone());
        let c0 = (BigRational::one() - &sr * BigRational::from_integer(tb)) / (&sr * &ph);
        let sinv = sr.recip();
        let mut g = vec![c0.clone()];
        let mut coef = -sinv.clone() * &sinv;
        for _ in 1..degree {
            g.push(coef.clone());
            coef = -coef * &sinv * &ph;
        }
        // (s + p^h u)^{k−2}
        let exps = binom::choose_rational_row(&BigRational::from_integer(k2.into()), degree);
        let mut z: Vec<BigRational> = Vec::with_capacity(degree);
        let mut php = BigRational::one();
        for (i, c) in exps.iter().enumerate() {
            z.push(c * rat_pow(&sr, k2 - i as i64) * &php);
            php *= &ph;
        }
        let chi_s = chi
            .eval_unit(&s)?
            .as_scalar()
            .ok_or_else(|| Error::domain("tame character value is not a scalar"))?;
        let factor = sign.mul(&chi_s);
        let src = &mu.entries()[su];
        let src_higher = mu.higher()[su];
        let src_val = src.iter().map(|d| d.val().lower_bound()).min().expect("nonempty");
        let mut hm = z;
        let mut out = Vec::with_capacity(degree);
        for m in 0..degree {
            let mut acc = field.zero(prec);
            for (i, d) in src.iter().enumerate() {
                if !hm[i].is_zero() {
                    acc = acc.add(&d.mul_rat(&hm[i]));
                }
            }
            let mut entry = acc.mul(&factor);
            match src_higher {
                HigherMoments::Zero => {}
                HigherMoments::Bounded(b) => {
                    entry = entry.cap_prec(b + Q::from_integer(h as i64 * (degree - m) as i64));
                }
                HigherMoments::Unknown => {
                    return Err(Error::precision("higher moments of the source are unknown"));
                }
            }
            out.push(entry);
            hm = mul_trunc(&hm, &g, degree);
        }
        let higher = if c0.is_zero() {
            src_higher
        } else {
            match src_higher {
                HigherMoments::Zero => HigherMoments::Bounded(src_val),
                HigherMoments::Bounded(b) => HigherMoments::Bounded(b.min(src_val)),
                HigherMoments::Unknown => HigherMoments::Unknown,
            }
        };
        Ok((out, higher))
    });
    let mut entries = Vec::with_capacity(classes);
    let mut higher = Vec::with_capacity(classes);
    for r in rows {
        let (e, hgh) = r?;
        entries.push(e);
        higher.push(hgh);
    }
    LocalDistribution::new(field, h, entries, higher)
}

fn rat_pow(x: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}
