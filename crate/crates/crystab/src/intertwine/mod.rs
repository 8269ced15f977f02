//! The smooth intertwining integral on elementary functions
//! `1_{a+p^nZ_p}·z^j·e^{2πizy}`, its brute-force shell decomposition, and the
//! moment relation it induces between a pair of distributions.

use crate::characters::{gauss_sum, intertwining_constant, CharacterPair};
use crate::distributions::{amice, dist_res_units, integrate, w_involution, LocalDistribution, LocalFunction, WSide};
use crate::error::{Error, Result};
use crate::padic_core::scalar::{ppow, val_int};
use crate::padic_core::val::ceil_q;
use crate::padic_core::{CycloElement, Field, PadicScalar, RootOfUnity};
use crate::series::binom;
use crate::series::TruncatedSeries;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// `1_{a+p^nZ_p}(z)·z^j·e^{2πizy}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryFunction {
    center: BigInt,
    n: i64,
    j: u32,
    y: BigRational,
}

impl ElementaryFunction {
    /// `y` must be a nonzero rational.
    pub fn new(center: BigInt, n: i64, j: u32, y: BigRational) -> Result<Self> {
        if y.is_zero() {
            return Err(Error::domain("the additive character needs y ≠ 0"));
        }
        Ok(ElementaryFunction { center, n, j, y })
    }

    /// `1_{p^nZ_p}·e^{2πizy}`.
    pub fn ball(n: i64, y: BigRational) -> Result<Self> {
        Self::new(BigInt::zero(), n, 0, y)
    }

    pub fn center(&self) -> &BigInt {
        &self.center
    }
    pub fn n(&self) -> i64 {
        self.n
    }
    pub fn j(&self) -> u32 {
        self.j
    }
    pub fn y(&self) -> &BigRational {
        &self.y
    }
    /// `val_p(y)`.
    pub fn val_y(&self, p: u32) -> i64 {
        val_int(self.y.numer(), p) - val_int(self.y.denom(), p)
    }

    /// The same function with `y` replaced by `c·y`.
    pub fn scale_y(&self, c: &BigRational) -> Result<Self> {
        Self::new(self.center.clone(), self.n, self.j, &self.y * c)
    }
}

fn working_prec(pair: &CharacterPair) -> i64 {
    ceil_q(pair.alpha_p().abs_prec().min(pair.beta_p().abs_prec())).max(1)
}

fn check_hypothesis(h: &ElementaryFunction, pair: &CharacterPair) -> Result<()> {
    let m = pair.essential_conductor() as i64;
    if h.n + h.val_y(pair.p()) > -m {
        return Err(Error::hypothesis(format!(
            "need n + val(y) ≤ −{m}, got n = {} and val(y) = {}",
            h.n,
            h.val_y(pair.p())
        )));
    }
    Ok(())
}

/// `e^{2πi·y·p^{−(m+val y)}}`, primitive of order `p^m` when `val y ≤ −m`.
fn gauss_root(p: u32, y: &BigRational, m: u32) -> Result<RootOfUnity> {
    let v = val_int(y.numer(), p) - val_int(y.denom(), p);
    let shift = -v - m as i64;
    if shift < 0 {
        return Err(Error::hypothesis(format!("need val(y) ≤ −{m}, got {v}")));
    }
    RootOfUnity::from_additive(p, &(y.numer() * ppow(p, shift as u32)), y.denom())
}

/// `(β_p/α_p)^{val y}·G(β^{−1}α, e^{2πiy/p^{m+val y}})` in `L_m`.
fn transfer_factor(pair: &CharacterPair, y: &BigRational, prec: i64) -> Result<CycloElement> {
    let p = pair.p();
    let m = pair.essential_conductor();
    let v = val_int(y.numer(), p) - val_int(y.denom(), p);
    let root = gauss_root(p, y, m)?;
    let tau = pair.ratio().inv()?;
    let g = gauss_sum(&tau, &root, prec)?.embed(m);
    let ratio = pair.beta_p().div(&pair.alpha_p())?.pow(v)?;
    Ok(g.scale(&ratio))
}

/// The closed form: `I(h) = factor·h` with
/// `factor = C(α_p,β_p)(β_p/α_p)^{val y}G(β^{−1}α, e^{2πiy/p^{m+val y}})`,
/// valid when `n + val y ≤ −m(α,β)`. The polynomial factor `z^j` and the
/// centre of the ball pass through unchanged.
pub fn intertwine_closed(h: &ElementaryFunction, pair: &CharacterPair) -> Result<(CycloElement, ElementaryFunction)> {
    if h.j as i64 > pair.k() as i64 - 2 {
        return Err(Error::domain(format!("polynomial degree {} exceeds k − 2 = {}", h.j, pair.k() - 2)));
    }
    check_hypothesis(h, pair)?;
    let prec = working_prec(pair);
    let c = intertwining_constant(pair)?;
    let factor = transfer_factor(pair, &h.y, prec)?.scale(&c);
    Ok((factor, h.clone()))
}

/// The same factor as a sum over shells `p^l Z_p^×`, `l ≥ n`.
///
/// Each shell is split into the classes `p^l a + p^{l+m}Z_p` with `a` running
/// over `(Z/p^m)^×`, on which `βα^{−1}` is constant; the class integral of
/// `e^{2πixy}` is `p^{−l−m}e^{2πip^l a y}` or `0`. From `l = −val y` on every
/// additive value is `1`, so the remaining shells form a geometric series in
/// `α_p/β_p`, summed as a rational function of the ratio.
pub fn intertwine_oracle(h: &ElementaryFunction, pair: &CharacterPair) -> Result<(CycloElement, ElementaryFunction)> {
    if h.j != 0 {
        return Err(Error::domain("the shell decomposition is stated for j = 0"));
    }
    check_hypothesis(h, pair)?;
    let p = pair.p();
    let m = pair.essential_conductor();
    let prec = working_prec(pair);
    let field = pair.field();
    let chi = pair.ratio();
    let r = pair.alpha_p().div(&pair.beta_p())?;
    let v_top = -h.val_y(p);
    let modulus = ppow(p, m).to_i64().expect("small conductor");
    let units: Vec<i64> = (1..modulus).filter(|a| a % p as i64 != 0).collect();
    let chi_values = units
        .iter()
        .map(|&a| chi.eval_unit(&BigInt::from(a))?.to_cyclo(m))
        .collect::<Result<Vec<_>>>()?;
    let p_minus_m = field.one(prec).div_int(&ppow(p, m));

    let shells = crate::par::map_range((v_top - h.n).max(0) as usize, |i| -> Result<CycloElement> {
        let l = h.n + i as i64;
        if l + (m as i64) < v_top {
            return Ok(CycloElement::zero(field, m, prec));
        }
        let mut sum = CycloElement::zero(field, m, prec);
        for (a, ca) in units.iter().zip(&chi_values) {
            let num = h.y.numer() * BigInt::from(*a) * ppow(p, l as u32);
            let e = RootOfUnity::from_additive(p, &num, h.y.denom())?;
            sum = sum.add(&ca.mul(&e.to_cyclo(field, prec).embed(m)));
        }
        Ok(sum.scale(&r.pow(l)?).scale(&p_minus_m))
    });
    let mut total = CycloElement::zero(field, m, prec);
    for s in shells {
        total = total.add(&s?);
    }

    let tail_sum = chi_values.iter().fold(CycloElement::zero(field, m, prec), |acc, c| acc.add(c));
    if !tail_sum.is_zero() {
        let one = field.one(prec + ceil_q(r.abs_prec()).max(0));
        let den = one.sub(&r);
        if den.is_zero() {
            return Err(Error::Divergence("the shell ratio α_p/β_p equals 1".into()));
        }
        let geometric = r.pow(v_top.max(h.n))?.div(&den)?;
        total = total.add(&tail_sum.scale(&geometric).scale(&p_minus_m));
    }
    Ok((total, h.clone()))
}

fn check_degree(pair: &CharacterPair, j: usize) -> Result<()> {
    if j as i64 > pair.k() as i64 - 2 {
        return Err(Error::domain(format!("moment index {j} exceeds k − 2 = {}", pair.k() - 2)));
    }
    Ok(())
}

/// `∫ z^j e^{2πizy} dμ`, with the twist realized at level `−val y`.
fn twisted_moment(mu: &LocalDistribution, field: Field, j: usize, eta: &RootOfUnity) -> Result<CycloElement> {
    let prec = mu.work_prec();
    let mut coeffs = vec![field.zero(prec); j + 1];
    coeffs[j] = field.one(prec);
    integrate(mu, &LocalFunction::polynomial(field, coeffs).with_twist(eta.clone()))
}

/// The moment of `μ_β` against `z^j e^{2πizy}` determined by `μ_α`:
/// `G(β^{−1}α, e^{2πiy/p^{val y+m}})(β_p/α_p)^{val y}∫z^j e^{2πizy}dμ_α`.
pub fn moment_transfer(mu_alpha: &LocalDistribution, j: usize, y: &BigRational, pair: &CharacterPair) -> Result<CycloElement> {
    check_degree(pair, j)?;
    let p = pair.p();
    if y.is_zero() {
        return Err(Error::domain("the additive character needs y ≠ 0"));
    }
    let v = val_int(y.numer(), p) - val_int(y.denom(), p);
    let m = pair.essential_conductor() as i64;
    if v > -m {
        return Err(Error::hypothesis(format!("need val(y) ≤ −{m}, got {v}")));
    }
    if (mu_alpha.level() as i64) < -v {
        return Err(Error::level(format!("e^{{2πizy}} needs level {}, got {}", -v, mu_alpha.level())));
    }
    let field = field_of(mu_alpha, pair);
    let eta = RootOfUnity::from_additive(p, y.numer(), y.denom())?;
    let integral = twisted_moment(mu_alpha, field, j, &eta)?;
    let factor = transfer_factor(pair, y, mu_alpha.work_prec())?;
    Ok(factor.mul(&integral))
}

fn field_of(mu: &LocalDistribution, pair: &CharacterPair) -> Field {
    if mu.field().is_base() {
        pair.field()
    } else {
        mu.field()
    }
}

/// Outcome of the filtration test at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilCheck {
    pub holds: bool,
    /// Failing `(j, a)`: the identity fails for `j` and the root `ζ_{p^m}^a`.
    pub witnesses: Vec<(usize, u64)>,
}

/// Tests `G(β^{−1}α, η^{p^{m−m(α,β)}})α_p^m∫z^jη^z dμ_α = β_p^m∫z^jη^z dμ_β`
/// for every `j ≤ k−2` and every primitive `p^m`-th root `η = ζ_{p^m}^a`.
pub fn fil_condition_check(
    mu_alpha: &LocalDistribution,
    mu_beta: &LocalDistribution,
    pair: &CharacterPair,
    m: u32,
) -> Result<FilCheck> {
    let p = pair.p();
    let mv = pair.essential_conductor();
    if m < mv {
        return Err(Error::level(format!("level {m} is below the conductor {mv}")));
    }
    if mu_alpha.level() < m || mu_beta.level() < m {
        return Err(Error::level(format!(
            "distributions of levels {} and {} cannot see roots of order p^{m}",
            mu_alpha.level(),
            mu_beta.level()
        )));
    }
    let prec = mu_alpha.work_prec().min(mu_beta.work_prec());
    let field = field_of(mu_alpha, pair);
    let tau = pair.ratio().inv()?;
    let ap = pair.alpha_p().pow(m as i64)?;
    let bp = pair.beta_p().pow(m as i64)?;
    let modulus = ppow(p, m).to_u64().expect("small level");
    let roots: Vec<u64> = (1..modulus).filter(|a| a % p as u64 != 0).collect();
    let jmax = pair.k() as usize - 2;
    let rows = crate::par::map(&roots, |&a| -> Result<Vec<(usize, u64)>> {
        let eta = RootOfUnity::new(p, m, &BigInt::from(a));
        let g = gauss_sum(&tau, &eta.pow(&ppow(p, m - mv)), prec)?;
        let mut bad = Vec::new();
        for j in 0..=jmax {
            let lhs = g.mul(&twisted_moment(mu_alpha, field, j, &eta)?).scale(&ap);
            let rhs = twisted_moment(mu_beta, field, j, &eta)?.scale(&bp);
            if !lhs.eq_at_prec(&rhs) {
                bad.push((j, a));
            }
        }
        Ok(bad)
    });
    let mut witnesses = Vec::new();
    for r in rows {
        witnesses.extend(r?);
    }
    witnesses.sort_unstable();
    Ok(FilCheck { holds: witnesses.is_empty(), witnesses })
}

/// A distribution `μ_β` whose twisted moments satisfy the filtration identity
/// against `μ_α` at every level from `m(α,β)` to the level of `μ_α`.
///
/// The class moments `∫_{c+p^hZ_p} z^j dμ` are the discrete Fourier transform
/// of the twisted moments, so `μ_β` is the convolution of `μ_α` with the
/// inverse transform of the multiplier. Twisted moments by roots of order
/// below `p^{m(α,β)}` are unconstrained and set to zero; moments above `k−2`
/// are zero as well. The multiplier must be Galois-equivariant for the
/// kernel to lie in `L`, which holds when `β^{−1}α` has conductor at most 1.
pub fn transferred_distribution(mu_alpha: &LocalDistribution, pair: &CharacterPair) -> Result<LocalDistribution> {
    let p = pair.p();
    let h = mu_alpha.level();
    let mv = pair.essential_conductor();
    if h < mv {
        return Err(Error::level(format!("level {h} is below the conductor {mv}")));
    }
    let jmax = pair.k() as usize - 2;
    if jmax >= mu_alpha.degree() {
        return Err(Error::degree(format!("need {} moments, the distribution tracks {}", jmax + 1, mu_alpha.degree())));
    }
    let prec = mu_alpha.work_prec();
    let field = field_of(mu_alpha, pair);
    let tau = pair.ratio().inv()?;
    let r = pair.alpha_p().div(&pair.beta_p())?;
    let classes = mu_alpha.classes();
    let ph = ppow(p, h);
    let php = BigRational::from_integer(ph.clone());

    // multiplier on the character x ↦ ζ_{p^h}^{xc}
    let multiplier = crate::par::map_range(classes, |x| -> Result<Option<CycloElement>> {
        let eta = RootOfUnity::new(p, h, &BigInt::from(x));
        let order = eta.order_level();
        if order < mv {
            return Ok(None);
        }
        let g = gauss_sum(&tau, &eta.pow(&ppow(p, order - mv)), prec)?;
        Ok(Some(g.embed(h).scale(&r.pow(order as i64)?)))
    });
    let multiplier = multiplier.into_iter().collect::<Result<Vec<_>>>()?;
    let inv_ph = field.one(prec).div_int(&ph);
    let kernel = crate::par::map_range(classes, |d| -> Result<PadicScalar> {
        let mut acc = CycloElement::zero(field, h, prec);
        for (x, f) in multiplier.iter().enumerate() {
            if let Some(f) = f {
                acc = acc.add(&f.mul_root_power(&BigInt::from(-((d * x) as i64))));
            }
        }
        acc.as_scalar()
            .map(|s| s.mul(&inv_ph))
            .ok_or_else(|| Error::domain("the transfer kernel does not lie in the coefficient field (wild twist)"))
    });
    let kernel = kernel.into_iter().collect::<Result<Vec<_>>>()?;

    // class moments ∫_{c+p^h Z_p} z^j dμ_α = Σ_i C(j,i) c^{j−i} p^{hi} d[c][i]
    let moments_alpha: Vec<Vec<PadicScalar>> = (0..classes)
        .map(|c| {
            let cr = BigRational::from_integer(BigInt::from(c));
            (0..=jmax)
                .map(|j| {
                    let row = binom::row(j);
                    (0..=j).fold(field.zero(prec), |acc, i| {
                        let coef = BigRational::from_integer(row[i].clone())
                            * num_traits::pow(cr.clone(), j - i)
                            * num_traits::pow(php.clone(), i);
                        acc.add(&mu_alpha.entry(c, i).mul_rat(&coef))
                    })
                })
                .collect()
        })
        .collect();

    let entries = crate::par::map_range(classes, |b| {
        let moments_beta: Vec<PadicScalar> = (0..=jmax)
            .map(|j| {
                (0..classes).fold(field.zero(prec), |acc, c| {
                    let d = (b + classes - c) % classes;
                    acc.add(&kernel[d].mul(&moments_alpha[c][j]))
                })
            })
            .collect();
        let neg_b = BigRational::from_integer(BigInt::from(-(b as i64)));
        let mut row = Vec::with_capacity(mu_alpha.degree());
        for i in 0..mu_alpha.degree() {
            if i > jmax {
                row.push(field.zero(prec));
                continue;
            }
            let binoms = binom::row(i);
            let mut acc = field.zero(prec);
            for (j, mb) in moments_beta.iter().enumerate().take(i + 1) {
                let coef = BigRational::from_integer(binoms[j].clone()) * num_traits::pow(neg_b.clone(), i - j)
                    / num_traits::pow(php.clone(), i);
                acc = acc.add(&mb.mul_rat(&coef));
            }
            row.push(acc);
        }
        row
    });
    LocalDistribution::full(field, h, entries)
}

/// The coordinates `(A(μ_α), A(μ_β)/C(α_p,β_p))` in the basis `(e_α, e_β)`.
pub fn assemble_vector(
    mu_alpha: &LocalDistribution,
    mu_beta: &LocalDistribution,
    pair: &CharacterPair,
    order: usize,
) -> Result<(TruncatedSeries, TruncatedSeries)> {
    let c_inv = intertwining_constant(pair)?.inv()?;
    Ok((amice(mu_alpha, order)?, amice(mu_beta, order)?.scale(&c_inv)))
}

/// The companion built from the unit restrictions through the twisted
/// involutions: `(A(w_α μ_α|_{Z_p^×}), A(w_β μ_β|_{Z_p^×})/C(α_p,β_p))`.
pub fn assemble_w_companion(
    mu_alpha: &LocalDistribution,
    mu_beta: &LocalDistribution,
    pair: &CharacterPair,
    order: usize,
) -> Result<(TruncatedSeries, TruncatedSeries)> {
    let wa = w_involution(&dist_res_units(mu_alpha), pair, WSide::Alpha)?;
    let wb = w_involution(&dist_res_units(mu_beta), pair, WSide::Beta)?;
    assemble_vector(&wa, &wb, pair, order)
}
