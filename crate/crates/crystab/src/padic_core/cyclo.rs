//! The cyclotomic algebras `L_m = L[X]/Φ_{p^m}(X)` and roots of unity of
//! p-power order.

use super::scalar::{ppow, Field, PadicScalar};
use super::val::{Q, Val};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use std::fmt;

/// `deg Φ_{p^m}`, with level 0 meaning `L` itself.
pub fn cyclo_degree(p: u32, m: u32) -> usize {
    if m == 0 {
        1
    } else {
        (p as usize - 1) * (p as usize).pow(m - 1)
    }
}

fn order(p: u32, m: u32) -> usize {
    (p as usize).pow(m)
}

/// An element of `L_m`, stored as its reduced coefficient vector in the basis
/// `1, X, …, X^{d−1}`. The class of `X` is the root of unity `ε^{(m)}`.
#[derive(Clone, Debug)]
pub struct CycloElement {
    field: Field,
    m: u32,
    coeffs: Vec<PadicScalar>,
}

impl CycloElement {
    pub fn zero(field: Field, m: u32, prec: i64) -> Self {
        let d = cyclo_degree(field.p(), m);
        CycloElement { field, m, coeffs: vec![field.zero(prec); d] }
    }

    pub fn one(field: Field, m: u32, prec: i64) -> Self {
        Self::from_scalar(&field.one(prec), m)
    }

    /// The constant `s` viewed in `L_m`.
    pub fn from_scalar(s: &PadicScalar, m: u32) -> Self {
        let field = s.field();
        let prec = super::val::ceil_q(s.abs_prec());
        let mut out = Self::zero(field, m, prec);
        out.coeffs[0] = s.clone();
        out
    }

    /// Builds an element from coefficients in the power basis; longer
    /// vectors are reduced modulo `Φ_{p^m}`.
    pub fn from_coeffs(field: Field, m: u32, coeffs: Vec<PadicScalar>) -> Result<Self> {
        let n = order(field.p(), m);
        if coeffs.len() > n {
            return Err(Error::domain("coefficient vector longer than p^m"));
        }
        if coeffs.is_empty() {
            return Err(Error::domain("empty coefficient vector"));
        }
        let prec = coeffs.iter().map(|c| super::val::ceil_q(c.abs_prec())).min().unwrap_or(0);
        let mut cyc: Vec<Option<PadicScalar>> = vec![None; n];
        for (i, c) in coeffs.into_iter().enumerate() {
            cyc[i] = Some(c);
        }
        Ok(Self::reduce(field, m, cyc, prec))
    }

    /// `(ε^{(m)})^a`.
    pub fn root_power(field: Field, m: u32, a: &BigInt, prec: i64) -> Self {
        let n = order(field.p(), m);
        let k = a.mod_floor(&BigInt::from(n)).to_usize().expect("small");
        let mut cyc: Vec<Option<PadicScalar>> = vec![None; n];
        cyc[k] = Some(field.one(prec));
        Self::reduce(field, m, cyc, prec)
    }

    pub fn root_power_i64(field: Field, m: u32, a: i64, prec: i64) -> Self {
        Self::root_power(field, m, &BigInt::from(a), prec)
    }

    /// Reduces a vector indexed by `Z/p^m` modulo `Φ_{p^m}`.
    fn reduce(field: Field, m: u32, mut cyc: Vec<Option<PadicScalar>>, prec: i64) -> Self {
        let p = field.p() as usize;
        let d = cyclo_degree(field.p(), m);
        let n = cyc.len();
        if m >= 1 {
            let step = n / p;
            for e in d..n {
                if let Some(c) = cyc[e].take() {
                    let neg = c.neg();
                    for j in 0..p - 1 {
                        let idx = e - d + j * step;
                        cyc[idx] = Some(match cyc[idx].take() {
                            None => neg.clone(),
                            Some(s) => s.add(&neg),
                        });
                    }
                }
            }
        }
        let coeffs = cyc
            .into_iter()
            .take(d)
            .map(|c| c.unwrap_or_else(|| field.zero(prec)))
            .collect();
        CycloElement { field, m, coeffs }
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn level(&self) -> u32 {
        self.m
    }
    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }
    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn abs_prec(&self) -> Q {
        self.coeffs.iter().map(|c| c.abs_prec()).min().expect("nonempty")
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn align(&self, o: &CycloElement) -> (CycloElement, CycloElement) {
        let m = self.m.max(o.m);
        let f = if self.field.is_base() { o.field } else { self.field };
        (self.embed(m).to_field(f), o.embed(m).to_field(f))
    }

    /// The same element with coefficients viewed in `target`.
    pub fn to_field(&self, target: Field) -> CycloElement {
        if target == self.field {
            return self.clone();
        }
        CycloElement {
            field: target,
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| c.to_field(target)).collect(),
        }
    }

    pub fn eq_at_prec(&self, o: &CycloElement) -> bool {
        let (a, b) = self.align(o);
        a.sub(&b).is_zero()
    }

    /// Lowers the precision so that the element is only claimed modulo
    /// elements of valuation `≥ bound`. Coordinates in the power basis of an
    /// element of valuation `≥ bound` have valuation `≥ ⌊bound⌋`, one less
    /// over a ramified `L`.
    pub fn cap(&self, bound: Q) -> CycloElement {
        let mut k = super::val::floor_q(bound);
        if !self.field.is_base() {
            k -= 1;
        }
        let kq = Q::from_integer(k);
        CycloElement {
            field: self.field,
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| c.cap_prec(kq)).collect(),
        }
    }

    /// Tower embedding `L_m → L_{m'}`, `X ↦ X^{p^{m'−m}}`.
    pub fn embed(&self, to: u32) -> CycloElement {
        assert!(to >= self.m, "cannot embed into a lower level");
        if to == self.m {
            return self.clone();
        }
        let p = self.field.p() as usize;
        let n = order(self.field.p(), to);
        let stride = p.pow(to - self.m);
        let mut cyc: Vec<Option<PadicScalar>> = vec![None; n];
        for (i, c) in self.coeffs.iter().enumerate() {
            cyc[(i * stride) % n] = Some(c.clone());
        }
        let prec = super::val::ceil_q(self.abs_prec());
        Self::reduce(self.field, to, cyc, prec)
    }

    /// The scalar, if the element lies in `L` at the tracked precision.
    pub fn as_scalar(&self) -> Option<PadicScalar> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, o: &CycloElement) -> CycloElement {
        let (a, b) = self.align(o);
        CycloElement {
            field: a.field,
            m: a.m,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x.add(y)).collect(),
        }
    }

    pub fn neg(&self) -> CycloElement {
        CycloElement { field: self.field, m: self.m, coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn sub(&self, o: &CycloElement) -> CycloElement {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &PadicScalar) -> CycloElement {
        let field = if s.field().is_base() { self.field } else { s.field() };
        CycloElement { field, m: self.m, coeffs: self.coeffs.iter().map(|c| c.mul(s)).collect() }
    }

    pub fn scale_int(&self, n: &BigInt) -> CycloElement {
        CycloElement { field: self.field, m: self.m, coeffs: self.coeffs.iter().map(|c| c.mul_int(n)).collect() }
    }

    pub fn mul(&self, o: &CycloElement) -> CycloElement {
        let (a, b) = self.align(o);
        let n = order(a.field.p(), a.m);
        let mut cyc: Vec<Option<PadicScalar>> = vec![None; n];
        for (i, x) in a.coeffs.iter().enumerate() {
            for (j, y) in b.coeffs.iter().enumerate() {
                let k = (i + j) % n;
                let t = x.mul(y);
                cyc[k] = Some(match cyc[k].take() {
                    None => t,
                    Some(s) => s.add(&t),
                });
            }
        }
        let prec = super::val::ceil_q(a.abs_prec().min(b.abs_prec()));
        Self::reduce(a.field, a.m, cyc, prec)
    }

    /// Multiplication by `(ε^{(m)})^a`, a coefficient rotation.
    pub fn mul_root_power(&self, a: &BigInt) -> CycloElement {
        let n = order(self.field.p(), self.m);
        let k = a.mod_floor(&BigInt::from(n)).to_usize().expect("small");
        let mut cyc: Vec<Option<PadicScalar>> = vec![None; n];
        for (i, c) in self.coeffs.iter().enumerate() {
            cyc[(i + k) % n] = Some(c.clone());
        }
        let prec = super::val::ceil_q(self.abs_prec());
        Self::reduce(self.field, self.m, cyc, prec)
    }

    pub fn pow(&self, mut e: u64) -> CycloElement {
        let prec = super::val::ceil_q(self.abs_prec()) + 64;
        let mut acc = CycloElement::one(self.field, self.m, prec);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        acc
    }

    /// Valuation in `L_m`, normalized by `val(p) = 1`.
    ///
    /// Computed from the expansion in powers of `X − 1`, whose class has
    /// valuation `1/d`; when two terms tie, falls back to the norm.
    pub fn val(&self) -> Val {
        let d = self.coeffs.len();
        if self.m == 0 {
            return self.coeffs[0].val();
        }
        // b_i = Σ_j C(j, i) c_j, the Taylor shift X = 1 + Y.
        let mut b: Vec<PadicScalar> = Vec::with_capacity(d);
        for i in 0..d {
            let mut acc: Option<PadicScalar> = None;
            for j in i..d {
                let c = binomial(j as u64, i as u64);
                let t = self.coeffs[j].mul_int(&c);
                acc = Some(match acc {
                    None => t,
                    Some(s) => s.add(&t),
                });
            }
            b.push(acc.expect("nonempty"));
        }
        let vals: Vec<Val> = b
            .iter()
            .enumerate()
            .map(|(i, x)| x.val().shift(Q::new(i as i64, d as i64)))
            .collect();
        let best = Val::min_of(vals.iter().copied()).expect("nonempty");
        if let Val::Finite(v) = best {
            let ties = vals.iter().filter(|w| **w == Val::Finite(v)).count();
            if ties == 1 {
                return best;
            }
        } else {
            return best;
        }
        match self.norm() {
            Ok(n) => n.val().finite().map_or_else(
                || Val::AtLeast(n.val().lower_bound() / Q::from_integer(d as i64)),
                |v| Val::Finite(v / Q::from_integer(d as i64)),
            ),
            Err(_) => best,
        }
    }

    /// `N_{L_m/L}`, the determinant of multiplication.
    pub fn norm(&self) -> Result<PadicScalar> {
        let d = self.coeffs.len();
        let mut cols: Vec<Vec<PadicScalar>> = Vec::with_capacity(d);
        let prec = super::val::ceil_q(self.abs_prec());
        for j in 0..d {
            let basis = CycloElement::root_power_i64(self.field, self.m, j as i64, prec + 64);
            cols.push(self.mul(&basis).coeffs);
        }
        let rows: Vec<Vec<PadicScalar>> =
            (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect();
        super::linalg::det(rows)
    }
}

impl fmt::Display for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("[{c}]*X^{i}"))
            .collect();
        if terms.is_empty() {
            write!(f, "0 (level {})", self.m)
        } else {
            write!(f, "{} (level {})", terms.join(" + "), self.m)
        }
    }
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// A root of unity `(ε^{(m)})^a` of p-power order, kept in exponent form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootOfUnity {
    p: u32,
    m: u32,
    exp: BigInt,
}

impl RootOfUnity {
    pub fn new(p: u32, m: u32, exp: &BigInt) -> Self {
        let n = ppow(p, m);
        RootOfUnity { p, m, exp: exp.mod_floor(&n) }
    }

    pub fn new_i64(p: u32, m: u32, exp: i64) -> Self {
        Self::new(p, m, &BigInt::from(exp))
    }

    /// The root `e^{2πi y}` for `y = num/den` with `den` a power of `p`
    /// (times a unit), realized as `(ε^{(m)})^{p^m y mod p^m}`.
    pub fn from_additive(p: u32, num: &BigInt, den: &BigInt) -> Result<Self> {
        use super::scalar::{inv_mod, val_int};
        if num.is_zero() {
            return Ok(RootOfUnity::new_i64(p, 0, 0));
        }
        let g = num.gcd(den);
        let (num, den) = (num / &g, den / &g);
        let vd = val_int(&den, p);
        let unit_den = &den / ppow(p, vd as u32);
        let m = vd.max(0) as u32;
        if m == 0 {
            return Ok(RootOfUnity::new_i64(p, 0, 0));
        }
        let modulus = ppow(p, m);
        let a = (num * inv_mod(&unit_den.mod_floor(&modulus), &modulus)).mod_floor(&modulus);
        Ok(RootOfUnity::new(p, m, &a))
    }

    pub fn level(&self) -> u32 {
        self.m
    }
    pub fn exponent(&self) -> &BigInt {
        &self.exp
    }
    pub fn p(&self) -> u32 {
        self.p
    }

    /// Exponent `k` such that the root is primitive of order `p^k`.
    pub fn order_level(&self) -> u32 {
        if self.exp.is_zero() {
            return 0;
        }
        let v = super::scalar::val_int(&self.exp, self.p) as u32;
        self.m - v.min(self.m)
    }

    /// Same root expressed at level `m' ≥ m`.
    pub fn at_level(&self, m2: u32) -> RootOfUnity {
        assert!(m2 >= self.m);
        RootOfUnity::new(self.p, m2, &(&self.exp * ppow(self.p, m2 - self.m)))
    }

    /// Same root expressed at its own order level.
    pub fn primitive_form(&self) -> RootOfUnity {
        let k = self.order_level();
        let shift = self.m - k;
        RootOfUnity::new(self.p, k, &(&self.exp / ppow(self.p, shift)))
    }

    pub fn pow(&self, a: &BigInt) -> RootOfUnity {
        RootOfUnity::new(self.p, self.m, &(&self.exp * a))
    }

    pub fn mul(&self, o: &RootOfUnity) -> RootOfUnity {
        let m = self.m.max(o.m);
        let (a, b) = (self.at_level(m), o.at_level(m));
        RootOfUnity::new(self.p, m, &(a.exp + b.exp))
    }

    pub fn inv(&self) -> RootOfUnity {
        RootOfUnity::new(self.p, self.m, &(-&self.exp))
    }

    pub fn to_cyclo(&self, field: Field, prec: i64) -> CycloElement {
        CycloElement::root_power(field, self.m, &self.exp, prec)
    }
}
