use crate::error::{Error, Result};
use crate::padic_core::scalar::{inv_mod, ppow, val_int};
use crate::padic_core::val::{ceil_q, Q};
use crate::padic_core::{CycloElement, Field, PadicScalar, RootOfUnity, Val};
use crate::series::binom;
use crate::series::WindowNorm;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// What is known about the moments of order `≥ M` on one class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HigherMoments {
    /// They all vanish: on this class the distribution is a combination of
    /// derivatives of the Dirac mass at the class centre.
    Zero,
    /// They all have valuation at least the bound.
    Bounded(Q),
    /// Nothing is known.
    Unknown,
}

impl HigherMoments {
    fn merge(self, o: HigherMoments) -> HigherMoments {
        use HigherMoments::*;
        match (self, o) {
            (Zero, x) | (x, Zero) => x,
            (Bounded(a), Bounded(b)) => Bounded(a.min(b)),
            _ => Unknown,
        }
    }

    /// The bound after adding moments of valuation `≥ v`.
    fn widen(self, v: Q) -> HigherMoments {
        match self {
            HigherMoments::Zero => HigherMoments::Bounded(v),
            HigherMoments::Bounded(b) => HigherMoments::Bounded(b.min(v)),
            HigherMoments::Unknown => HigherMoments::Unknown,
        }
    }

    fn shift(self, v: Q) -> HigherMoments {
        match self {
            HigherMoments::Bounded(b) => HigherMoments::Bounded(b + v),
            x => x,
        }
    }
}

/// The class of `x ∈ Z_(p)` modulo `p^h` as a representative `r ∈ [0, p^h)`,
/// together with the offset `(x − r)/p^h`.
pub(crate) fn split_class(x: &BigRational, p: u32, h: u32) -> Result<(usize, BigRational)> {
    if val_int(x.denom(), p) > 0 {
        return Err(Error::domain(format!("{x} is not p-integral")));
    }
    let modulus = ppow(p, h);
    let r = (x.numer() * inv_mod(&x.denom().mod_floor(&modulus), &modulus)).mod_floor(&modulus);
    let t = (x - BigRational::from_integer(r.clone())) / BigRational::from_integer(modulus);
    Ok((r.to_usize().expect("small level"), t))
}

pub(crate) fn rat_val(q: &BigRational, p: u32) -> Q {
    Q::from_integer(val_int(q.numer(), p) - val_int(q.denom(), p))
}

/// A distribution on `Z_p` seen through its local moments
/// `d[a][i] = ∫_{a+p^h Z_p} ((z−a)/p^h)^i dμ` for `a ∈ [0, p^h)`, `i < M`.
#[derive(Clone, Debug)]
pub struct LocalDistribution {
    field: Field,
    level: u32,
    degree: usize,
    entries: Vec<Vec<PadicScalar>>,
    higher: Vec<HigherMoments>,
}

impl LocalDistribution {
    pub fn new(field: Field, level: u32, entries: Vec<Vec<PadicScalar>>, higher: Vec<HigherMoments>) -> Result<Self> {
        let classes = ppow(field.p(), level).to_usize().ok_or_else(|| Error::domain("level too large"))?;
        if entries.len() != classes || higher.len() != classes {
            return Err(Error::domain(format!("expected {classes} classes at level {level}")));
        }
        let degree = entries.first().map_or(0, Vec::len);
        if degree == 0 || entries.iter().any(|r| r.len() != degree) {
            return Err(Error::domain("every class needs the same positive number of moments"));
        }
        Ok(LocalDistribution { field, level, degree, entries, higher })
    }

    /// A distribution whose moments of order `≥ M` vanish on every class.
    pub fn full(field: Field, level: u32, entries: Vec<Vec<PadicScalar>>) -> Result<Self> {
        let n = entries.len();
        Self::new(field, level, entries, vec![HigherMoments::Zero; n])
    }

    pub fn zero(field: Field, level: u32, degree: usize, prec: i64) -> Self {
        let classes = ppow(field.p(), level).to_usize().expect("small level");
        LocalDistribution {
            field,
            level,
            degree: degree.max(1),
            entries: vec![vec![field.zero(prec); degree.max(1)]; classes],
            higher: vec![HigherMoments::Zero; classes],
        }
    }

    /// The Dirac mass at `c ∈ Z_(p)`.
    pub fn dirac(field: Field, c: &BigRational, level: u32, degree: usize, prec: i64) -> Result<Self> {
        let p = field.p();
        let (r, t) = split_class(c, p, level)?;
        let mut out = Self::zero(field, level, degree, prec);
        let mut pw = BigRational::one();
        for i in 0..out.degree {
            out.entries[r][i] = field.big_rat(&pw, prec);
            pw *= &t;
        }
        if !t.is_zero() {
            out.higher[r] = HigherMoments::Bounded(rat_val(&t, p) * Q::from_integer(out.degree as i64));
        }
        Ok(out)
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn p(&self) -> u32 {
        self.field.p()
    }
    pub fn level(&self) -> u32 {
        self.level
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn classes(&self) -> usize {
        self.entries.len()
    }
    pub fn entries(&self) -> &[Vec<PadicScalar>] {
        &self.entries
    }
    pub fn entry(&self, class: usize, i: usize) -> &PadicScalar {
        &self.entries[class][i]
    }
    pub fn higher(&self) -> &[HigherMoments] {
        &self.higher
    }

    /// Whether every class has vanishing higher moments.
    pub fn is_full(&self) -> bool {
        self.higher.iter().all(|h| *h == HigherMoments::Zero)
    }

    /// The minimum absolute precision of the entries.
    pub fn abs_prec(&self) -> Q {
        self.entries.iter().flatten().map(PadicScalar::abs_prec).min().expect("nonempty")
    }

    pub(crate) fn work_prec(&self) -> i64 {
        ceil_q(self.entries.iter().flatten().map(PadicScalar::abs_prec).max().expect("nonempty"))
    }

    fn class_val(&self, a: usize) -> Q {
        self.entries[a].iter().map(|c| c.val().lower_bound()).min().expect("nonempty")
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.p() != o.p() || self.level != o.level || self.degree != o.degree {
            return Err(Error::domain("distributions have different shapes"));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        let field = if self.field.is_base() { o.field } else { self.field };
        let entries = self
            .entries
            .iter()
            .zip(&o.entries)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.add(y)).collect())
            .collect();
        let higher = self.higher.iter().zip(&o.higher).map(|(a, b)| a.merge(*b)).collect();
        Ok(LocalDistribution { field, level: self.level, degree: self.degree, entries, higher })
    }

    pub fn scale(&self, c: &PadicScalar) -> Self {
        let field = if c.field().is_base() { self.field } else { c.field() };
        let v = c.val().lower_bound();
        LocalDistribution {
            field,
            level: self.level,
            degree: self.degree,
            entries: self.entries.iter().map(|r| r.iter().map(|x| x.mul(c)).collect()).collect(),
            higher: self.higher.iter().map(|h| h.shift(v)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&o.field.int(-1, o.work_prec())))
    }

    /// Entrywise equality at tracked precision.
    pub fn eq_at_prec(&self, o: &Self) -> bool {
        self.same_shape(o).is_ok()
            && self.entries.iter().zip(&o.entries).all(|(a, b)| a.iter().zip(b).all(|(x, y)| x.eq_at_prec(y)))
    }

    /// Moments after precomposing with an affine map on one class.
    ///
    /// With `z' = x' + p^h(t + a·u)` the new moments are
    /// `Σ_{l ≤ i} C(i,l) t^{i−l} a^l d_l`.
    fn recentre(&self, row: &[PadicScalar], t: &BigRational, a: &BigRational) -> Vec<PadicScalar> {
        let prec = self.work_prec();
        (0..self.degree)
            .map(|i| {
                let binoms = binom::row(i);
                let mut acc = self.field.zero(prec);
                let mut apow = BigRational::one();
                for (l, d) in row.iter().enumerate().take(i + 1) {
                    let tp = num_traits::pow(t.clone(), i - l);
                    let c = BigRational::from_integer(binoms[l].clone()) * tp * &apow;
                    if !c.is_zero() {
                        acc = acc.add(&d.mul_rat(&c));
                    }
                    apow *= a;
                }
                acc
            })
            .collect()
    }
}

/// `‖μ‖_{LA_h} = sup |d[a][i]|`, in valuation form. The value is exact when
/// the higher moments are known not to exceed the entries.
pub fn dist_norm_la(mu: &LocalDistribution) -> WindowNorm {
    let val = Val::min_of(mu.entries.iter().flatten().map(PadicScalar::val)).expect("nonempty");
    let complete = mu.higher.iter().all(|h| match h {
        HigherMoments::Zero => true,
        HigherMoments::Bounded(b) => val.finite().is_some_and(|v| *b >= v),
        HigherMoments::Unknown => false,
    });
    WindowNorm { val, complete }
}

fn check_unit(a: &BigRational, p: u32) -> Result<()> {
    if a.is_zero() || val_int(a.numer(), p) != 0 || val_int(a.denom(), p) != 0 {
        return Err(Error::domain(format!("{a} is not a p-adic unit")));
    }
    Ok(())
}

/// `γ_a(μ)`: `∫ f dγ_a(μ) = ∫ f(az) dμ`.
pub fn dist_gamma(a: &BigRational, mu: &LocalDistribution) -> Result<LocalDistribution> {
    let p = mu.p();
    check_unit(a, p)?;
    let mut entries = vec![vec![]; mu.classes()];
    let mut higher = vec![HigherMoments::Zero; mu.classes()];
    for c in 0..mu.classes() {
        // z ∈ c + p^h Z_p maps to ac + p^h(a·u) = r + p^h(t + a·u).
        let (r, t) = split_class(&(a * BigRational::from_integer(c.into())), p, mu.level)?;
        entries[r] = mu.recentre(&mu.entries[c], &t, a);
        let vanishes = mu.higher[c] == HigherMoments::Zero && mu.entries[c].iter().all(PadicScalar::is_zero);
        higher[r] = if t.is_zero() || vanishes { mu.higher[c] } else { mu.higher[c].widen(mu.class_val(c)) };
    }
    Ok(LocalDistribution { entries, higher, ..mu.clone() })
}

/// `φ(μ)`: `∫ f dφ(μ) = ∫ f(pz) dμ`, one level finer.
pub fn dist_phi(mu: &LocalDistribution) -> LocalDistribution {
    let p = mu.p() as usize;
    let prec = mu.work_prec();
    let mut out = LocalDistribution::zero(mu.field, mu.level + 1, mu.degree, prec);
    out.field = mu.field;
    for a in 0..mu.classes() {
        out.entries[p * a] = mu.entries[a].clone();
        out.higher[p * a] = mu.higher[a];
    }
    out
}

/// `ψ(μ)`: `∫ f dψ(μ) = ∫_{pZ_p} f(z/p) dμ`, one level coarser.
pub fn dist_psi(mu: &LocalDistribution) -> Result<LocalDistribution> {
    if mu.level == 0 {
        return Err(Error::level("psi needs a distribution of level at least 1"));
    }
    let p = mu.p() as usize;
    let n = mu.classes() / p;
    Ok(LocalDistribution {
        field: mu.field,
        level: mu.level - 1,
        degree: mu.degree,
        entries: (0..n).map(|a| mu.entries[p * a].clone()).collect(),
        higher: (0..n).map(|a| mu.higher[p * a]).collect(),
    })
}

/// Restriction to the union of the given classes modulo `p^level`.
pub fn dist_res(mu: &LocalDistribution, level: u32, classes: &[u64]) -> Result<LocalDistribution> {
    if level > mu.level {
        return Err(Error::level(format!("restriction level {level} is finer than the distribution level {}", mu.level)));
    }
    let m = ppow(mu.p(), level).to_u64().expect("small level");
    let keep: std::collections::BTreeSet<u64> = classes.iter().map(|c| c % m).collect();
    let prec = mu.work_prec();
    let mut out = mu.clone();
    for b in 0..mu.classes() {
        if !keep.contains(&(b as u64 % m)) {
            out.entries[b] = vec![mu.field.zero(prec); mu.degree];
            out.higher[b] = HigherMoments::Zero;
        }
    }
    Ok(out)
}

/// Restriction to `Z_p^×`.
pub fn dist_res_units(mu: &LocalDistribution) -> LocalDistribution {
    let classes: Vec<u64> = (1..mu.p() as u64).collect();
    dist_res(mu, 1.min(mu.level), &classes).expect("level 1 restriction")
}

/// A locally polynomial function of level `h'`, optionally multiplied by
/// `η^z` for a `p`-power root of unity `η`: on `a + p^{h'}Z_p` it is
/// `η^z Σ_i c[a][i] ((z−a)/p^{h'})^i`.
#[derive(Clone, Debug)]
pub struct LocalFunction {
    field: Field,
    level: u32,
    coeffs: Vec<Vec<PadicScalar>>,
    twist: Option<RootOfUnity>,
}

impl LocalFunction {
    pub fn new(field: Field, level: u32, coeffs: Vec<Vec<PadicScalar>>, twist: Option<RootOfUnity>) -> Result<Self> {
        let classes = ppow(field.p(), level).to_usize().ok_or_else(|| Error::domain("level too large"))?;
        if coeffs.len() != classes {
            return Err(Error::domain(format!("expected {classes} classes at level {level}")));
        }
        Ok(LocalFunction { field, level, coeffs, twist })
    }

    /// `Σ c_i z^i` on all of `Z_p`.
    pub fn polynomial(field: Field, coeffs: Vec<PadicScalar>) -> Self {
        LocalFunction { field, level: 0, coeffs: vec![coeffs], twist: None }
    }

    /// `C(z, n)` expanded on the classes of level `h`.
    pub fn binomial(field: Field, n: usize, level: u32, prec: i64) -> Result<Self> {
        let p = field.p();
        let classes = ppow(p, level).to_usize().ok_or_else(|| Error::domain("level too large"))?;
        let coeffs = (0..classes)
            .map(|a| local_binomial(p, level, a, n).iter().map(|q| field.big_rat(q, prec)).collect())
            .collect();
        Ok(LocalFunction { field, level, coeffs, twist: None })
    }

    pub fn with_twist(mut self, eta: RootOfUnity) -> Self {
        self.twist = Some(eta);
        self
    }

    pub fn level(&self) -> u32 {
        self.level
    }
    pub fn coeffs(&self) -> &[Vec<PadicScalar>] {
        &self.coeffs
    }
    pub fn twist(&self) -> Option<&RootOfUnity> {
        self.twist.as_ref()
    }

    /// `‖f‖_{LA_{h'}} = sup |c[a][i]|` of the polynomial part, in valuation form.
    pub fn norm_la(&self) -> Val {
        Val::min_of(self.coeffs.iter().flatten().map(PadicScalar::val)).unwrap_or(Val::AtLeast(Q::from_integer(0)))
    }
}

/// The coefficients of `C(a + p^h u, n)` as a polynomial in `u`.
pub(crate) fn local_binomial(p: u32, h: u32, a: usize, n: usize) -> Vec<BigRational> {
    let ph = ppow(p, h);
    let mut poly = vec![BigInt::one()];
    let mut fact = BigInt::one();
    for k in 0..n {
        // multiply by (a − k) + p^h u
        let c0 = BigInt::from(a as i64 - k as i64);
        let mut next = vec![BigInt::zero(); poly.len() + 1];
        for (i, x) in poly.iter().enumerate() {
            next[i] += x * &c0;
            next[i + 1] += x * &ph;
        }
        poly = next;
        fact *= k + 1;
    }
    poly.into_iter().map(|x| BigRational::new(x, fact.clone())).collect()
}

/// `∫ f dμ`, in `L_m` where `p^m` is the order of the twist (`m = 0` without one).
pub fn integrate(mu: &LocalDistribution, f: &LocalFunction) -> Result<CycloElement> {
    let p = mu.p();
    if f.level > mu.level {
        return Err(Error::level(format!("function level {} exceeds distribution level {}", f.level, mu.level)));
    }
    let m = match &f.twist {
        Some(eta) => {
            if eta.order_level() > mu.level {
                return Err(Error::level("twist is not constant on the classes of the distribution"));
            }
            eta.level()
        }
        None => 0,
    };
    let prec = mu.work_prec();
    let field = if mu.field.is_base() { f.field } else { mu.field };
    let step = ppow(p, mu.level - f.level);
    let fine = BigRational::from_integer(step.clone());
    let coarse = ppow(p, f.level).to_usize().expect("small level");
    let parts = crate::par::map_range(mu.classes(), |b| -> Result<Option<CycloElement>> {
        let a = b % coarse;
        let cs = &f.coeffs[a];
        if cs.len() > mu.degree && mu.higher[b] != HigherMoments::Zero {
            return Err(Error::degree(format!(
                "function of degree {} against {} tracked moments",
                cs.len() - 1,
                mu.degree
            )));
        }
        // (z − a)/p^{h'} = s + p^{h−h'}u on b + p^h Z_p
        let s = BigRational::new(BigInt::from(b as i64 - a as i64), ppow(p, f.level));
        let mut total = field.zero(prec);
        for (i, c) in cs.iter().enumerate() {
            let binoms = binom::row(i);
            for j in 0..=i.min(mu.degree - 1) {
                let k = BigRational::from_integer(binoms[j].clone())
                    * num_traits::pow(s.clone(), i - j)
                    * num_traits::pow(fine.clone(), j);
                if k.is_zero() {
                    continue;
                }
                total = total.add(&c.mul_rat(&k).mul(&mu.entries[b][j]));
            }
        }
        if total.is_zero() && ceil_q(total.abs_prec()) >= prec {
            return Ok(None);
        }
        let value = match &f.twist {
            Some(eta) => eta.pow(&BigInt::from(b)).to_cyclo(field, prec).scale(&total),
            None => CycloElement::from_scalar(&total, m),
        };
        Ok(Some(value))
    });
    let mut acc = CycloElement::zero(field, m, prec);
    for part in parts {
        if let Some(v) = part? {
            acc = acc.add(&v);
        }
    }
    Ok(acc)
}
