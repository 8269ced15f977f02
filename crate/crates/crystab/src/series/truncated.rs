use crate::error::{Error, Result};
use crate::padic_core::scalar::log_floor;
use crate::padic_core::val::{ceil_q, Q};
use crate::padic_core::{CycloElement, Field, PadicScalar, Val};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use std::fmt;

/// Lowest exponent accepted by [`TruncatedSeries::new`].
pub const MIN_EXPONENT: i64 = -64;

/// A decay bound for the unknown tail of a series: every coefficient `a_n`
/// with `n` at or beyond the tail satisfies
/// `val(a_n) ≥ base − log_slope·⌊log_p n⌋`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decay {
    pub base: Q,
    pub log_slope: Q,
}

impl Decay {
    /// `min_{n ≥ from} (base − log_slope·⌊log_p n⌋ + g(n))` for a
    /// nondecreasing `g` that eventually grows at least linearly.
    pub fn tail_min(&self, p: u32, from: i64, g: impl Fn(i64) -> Q) -> Q {
        let from = from.max(1);
        let at = |n: i64| self.base - self.log_slope * Q::from_integer(log_floor(n, p)) + g(n);
        let mut best = at(from);
        let mut block = (p as i64).pow(log_floor(from, p) as u32 + 1);
        // On each block [p^L, p^{L+1}) the log term is constant, so the
        // minimum sits at the block start.
        let mut rises = 0;
        let mut prev = best;
        while block < (1i64 << 52) {
            let v = at(block);
            if v < best {
                best = v;
            }
            rises = if v > prev { rises + 1 } else { 0 };
            if rises >= 3 && v - best > self.log_slope {
                break;
            }
            prev = v;
            block *= p as i64;
        }
        best
    }
}

/// A Laurent series `Σ_{i ≥ i_min} a_i T^i` over `L`, known up to `O(T^tail)`.
///
/// `tail = None` marks an exact finite sum. Coefficients carry their own
/// p-adic precision; `prec` is the precision given to structural zeros.
#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    field: Field,
    i_min: i64,
    coeffs: Vec<PadicScalar>,
    tail: Option<i64>,
    prec: i64,
    decay: Option<Decay>,
}

impl TruncatedSeries {
    /// Coefficients `coeffs[j]` of `T^{i_min + j}`, known up to `O(T^tail)`.
    pub fn new(field: Field, i_min: i64, coeffs: Vec<PadicScalar>, tail: Option<i64>, prec: i64) -> Result<Self> {
        if i_min < MIN_EXPONENT {
            return Err(Error::domain(format!("exponent {i_min} is below the window floor {MIN_EXPONENT}")));
        }
        Ok(Self::build(field, i_min, coeffs, tail, prec))
    }

    pub(crate) fn build(field: Field, i_min: i64, mut coeffs: Vec<PadicScalar>, tail: Option<i64>, prec: i64) -> Self {
        if let Some(t) = tail {
            let keep = (t - i_min).max(0) as usize;
            coeffs.truncate(keep);
        }
        let mut s = TruncatedSeries { field, i_min, coeffs, tail, prec, decay: None };
        s.trim();
        s
    }

    fn trim(&mut self) {
        if self.tail.is_none() {
            while self.coeffs.last().is_some_and(|c| c.is_zero() && ceil_q(c.abs_prec()) >= self.prec) {
                self.coeffs.pop();
            }
        }
        let lead = self
            .coeffs
            .iter()
            .take_while(|c| c.is_zero() && ceil_q(c.abs_prec()) >= self.prec)
            .count();
        if lead > 0 && self.i_min < 0 {
            let lead = lead.min((-self.i_min) as usize);
            self.coeffs.drain(..lead);
            self.i_min += lead as i64;
        }
    }

    /// An exact polynomial `Σ c_i T^i`.
    pub fn polynomial(field: Field, coeffs: Vec<PadicScalar>, prec: i64) -> Self {
        Self::build(field, 0, coeffs, None, prec)
    }

    /// An exact polynomial with integer coefficients known modulo `p^prec`.
    pub fn from_ints(field: Field, coeffs: &[i64], prec: i64) -> Self {
        Self::polynomial(field, coeffs.iter().map(|&c| field.int(c, prec)).collect(), prec)
    }

    pub fn zero(field: Field, prec: i64) -> Self {
        Self::polynomial(field, vec![], prec)
    }

    pub fn one(field: Field, prec: i64) -> Self {
        Self::polynomial(field, vec![field.one(prec)], prec)
    }

    /// `c·T^i`, exact.
    pub fn monomial(i: i64, c: PadicScalar, prec: i64) -> Self {
        Self::build(c.field(), i, vec![c], None, prec)
    }

    /// `(1+T)^a` for an exact unit exponent `a ∈ Z_(p)`, up to `O(T^order)`;
    /// exact when `a` is a nonnegative integer below `order`.
    pub fn one_plus_t_pow(field: Field, a: &BigRational, order: i64, prec: i64) -> Self {
        let n = order.max(0) as usize;
        if a.is_integer() && a.numer() >= &BigInt::from(0) && a.numer() < &BigInt::from(order) {
            let e = a.to_integer().to_usize().expect("small exponent");
            let row = super::binom::row(e);
            return Self::polynomial(field, row.iter().map(|c| field.big(c, prec)).collect(), prec);
        }
        let coeffs = super::binom::choose_rational_row(a, n).iter().map(|c| field.big_rat(c, prec)).collect();
        Self::build(field, 0, coeffs, Some(order), prec)
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn p(&self) -> u32 {
        self.field.p()
    }
    pub fn i_min(&self) -> i64 {
        self.i_min
    }
    /// One past the last stored exponent.
    pub fn i_end(&self) -> i64 {
        self.i_min + self.coeffs.len() as i64
    }
    pub fn coeffs(&self) -> &[PadicScalar] {
        &self.coeffs
    }
    /// Exponent from which coefficients are unknown; `None` when exact.
    pub fn tail(&self) -> Option<i64> {
        self.tail
    }
    pub fn is_exact(&self) -> bool {
        self.tail.is_none()
    }
    pub fn prec(&self) -> i64 {
        self.prec
    }
    pub fn decay(&self) -> Option<Decay> {
        self.decay
    }

    /// Attaches a decay bound for the coefficients beyond the tail.
    pub fn with_decay(mut self, decay: Decay) -> Self {
        self.decay = Some(decay);
        self
    }

    /// The minimum absolute precision of the stored coefficients.
    pub fn coeff_prec(&self) -> Q {
        self.coeffs.iter().map(|c| c.abs_prec()).min().unwrap_or(Q::from_integer(self.prec))
    }

    /// Whether every stored exponent is nonnegative.
    pub fn is_power_series(&self) -> bool {
        self.i_min >= 0 || self.coeffs.iter().take((-self.i_min) as usize).all(|c| c.is_zero())
    }

    /// The coefficient of `T^i`.
    pub fn coeff(&self, i: i64) -> Result<PadicScalar> {
        if let Some(t) = self.tail {
            if i >= t {
                return Err(Error::precision(format!("coefficient of T^{i} lies beyond O(T^{t})")));
            }
        }
        if i < self.i_min || i >= self.i_end() {
            return Ok(self.field.zero(self.prec));
        }
        Ok(self.coeffs[(i - self.i_min) as usize].clone())
    }

    /// The same series with coefficients in a larger field.
    pub fn to_field(&self, target: Field) -> Self {
        if target == self.field {
            return self.clone();
        }
        TruncatedSeries {
            field: target,
            coeffs: self.coeffs.iter().map(|c| c.to_field(target)).collect(),
            ..self.clone()
        }
    }

    fn common_field(&self, o: &Self) -> Field {
        if self.field.is_base() {
            o.field
        } else {
            self.field
        }
    }

    fn min_tail(a: Option<i64>, b: Option<i64>) -> Option<i64> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(x), Some(y)) => Some(x.min(y)),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let field = self.common_field(o);
        let tail = Self::min_tail(self.tail, o.tail);
        let prec = self.prec.min(o.prec);
        let lo = self.i_min.min(o.i_min);
        let mut hi = self.i_end().max(o.i_end());
        if let Some(t) = tail {
            hi = hi.min(t);
        }
        let coeffs = (lo..hi.max(lo))
            .map(|i| {
                let a = self.stored(i).map(|c| c.to_field(field));
                let b = o.stored(i).map(|c| c.to_field(field));
                match (a, b) {
                    (Some(a), Some(b)) => a.add(&b),
                    (Some(a), None) => a.add(&field.zero(o.prec)),
                    (None, Some(b)) => b.add(&field.zero(self.prec)),
                    (None, None) => field.zero(prec),
                }
            })
            .collect();
        Self::build(field, lo, coeffs, tail, prec)
    }

    fn stored(&self, i: i64) -> Option<&PadicScalar> {
        if i < self.i_min || i >= self.i_end() {
            None
        } else {
            Some(&self.coeffs[(i - self.i_min) as usize])
        }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(PadicScalar::neg).collect(), decay: None, ..self.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &PadicScalar) -> Self {
        let field = if c.field().is_base() { self.field } else { c.field() };
        let prec = ceil_q(c.val().lower_bound() + Q::from_integer(self.prec)).min(ceil_q(c.abs_prec()));
        let coeffs = self.coeffs.iter().map(|a| a.mul(c)).collect();
        Self::build(field, self.i_min, coeffs, self.tail, prec)
    }

    /// Multiplication by an exact rational.
    pub fn scale_rat(&self, q: &BigRational) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.mul_rat(q)).collect();
        Self::build(self.field, self.i_min, coeffs, self.tail, self.prec)
    }

    /// Multiplication by `T^k`.
    pub fn shift(&self, k: i64) -> Self {
        TruncatedSeries { i_min: self.i_min + k, tail: self.tail.map(|t| t + k), decay: None, ..self.clone() }
    }

    /// Forgets every coefficient from `T^order` on.
    pub fn truncate(&self, order: i64) -> Self {
        let tail = Some(self.tail.map_or(order, |t| t.min(order)));
        let mut s = Self::build(self.field, self.i_min, self.coeffs.clone(), tail, self.prec);
        if self.tail.is_some() {
            s.decay = self.decay;
        }
        s
    }

    pub fn mul(&self, o: &Self) -> Self {
        let field = self.common_field(o);
        let prec = self.prec.min(o.prec);
        let tail = Self::min_tail(self.tail.map(|t| t + o.i_min), o.tail.map(|t| t + self.i_min));
        let lo = self.i_min + o.i_min;
        let mut len = (self.coeffs.len() + o.coeffs.len()).saturating_sub(1);
        if let Some(t) = tail {
            len = len.min((t - lo).max(0) as usize);
        }
        let mut out: Vec<Option<PadicScalar>> = vec![None; len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() && ceil_q(a.abs_prec()) >= prec {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= len {
                    break;
                }
                let t = a.mul(b);
                out[k] = Some(match out[k].take() {
                    None => t,
                    Some(s) => s.add(&t),
                });
            }
        }
        let coeffs = out.into_iter().map(|c| c.unwrap_or_else(|| field.zero(prec)).to_field(field)).collect();
        Self::build(field, lo, coeffs, tail, prec)
    }

    /// `f(g)` for a power series `f` and `g` with zero constant term.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        if !self.is_power_series() {
            return Err(Error::domain("composition needs a power series"));
        }
        if g.i_min < 1 && g.coeffs.iter().take((1 - g.i_min) as usize).any(|c| !c.is_zero()) {
            return Err(Error::domain("inner series must have positive T-adic valuation"));
        }
        // T^n ↦ g^n has valuation ≥ n, so the tail of f is preserved.
        let mut order = self.tail;
        if let Some(t) = g.tail {
            order = Some(order.map_or(t, |o| o.min(t)));
        }
        let g = match order {
            Some(t) => g.truncate(t),
            None => g.clone(),
        };
        let mut acc = Self::zero(self.field, self.prec);
        for i in (self.i_min.max(0)..self.i_end()).rev() {
            acc = acc.mul(&g);
            if let Some(t) = order {
                acc = acc.truncate(t);
            }
            acc = acc.add(&Self::monomial(0, self.coeff(i)?, self.prec));
        }
        if let Some(t) = order {
            acc = acc.truncate(t);
        }
        Ok(acc)
    }

    /// `1/f` up to `O(T^order)`; the lowest coefficient must be invertible.
    pub fn inverse(&self, order: i64) -> Result<Self> {
        let lead = self
            .coeffs
            .iter()
            .position(|c| c.val().is_finite())
            .ok_or_else(|| Error::precision("series is indistinguishable from zero"))?;
        let v = self.i_min + lead as i64;
        let c0 = self.coeffs[lead].inv()?;
        // f = T^v (c + …); invert the unit part by the recursion b_n = −c^{−1} Σ_{k≥1} u_k b_{n−k}.
        let n = (order - (-v)).max(0) as usize;
        let unit: Vec<PadicScalar> = self.coeffs[lead..].to_vec();
        let avail = self.tail.map(|t| (t - v) as usize);
        if let Some(a) = avail {
            if a < n {
                return Err(Error::precision("not enough known coefficients for the requested order"));
            }
        }
        let mut b: Vec<PadicScalar> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                b.push(c0.clone());
                continue;
            }
            let mut s = self.field.zero(self.prec);
            for j in 1..=k.min(unit.len().saturating_sub(1)) {
                s = s.add(&unit[j].mul(&b[k - j]));
            }
            b.push(s.mul(&c0).neg());
        }
        Ok(Self::build(self.field, -v, b, Some(order), self.prec))
    }

    /// The formal derivative `d/dT`.
    pub fn derivative(&self) -> Self {
        let coeffs: Vec<PadicScalar> = (self.i_min..self.i_end())
            .map(|i| self.coeffs[(i - self.i_min) as usize].mul_i64(i))
            .collect();
        let mut s = Self::build(self.field, self.i_min - 1, coeffs, self.tail.map(|t| t - 1), self.prec);
        s.trim();
        s
    }

    /// Equality of the commonly known window at tracked precision.
    pub fn eq_at_prec(&self, o: &Self) -> bool {
        let tail = Self::min_tail(self.tail, o.tail);
        let lo = self.i_min.min(o.i_min);
        let mut hi = self.i_end().max(o.i_end());
        if let Some(t) = tail {
            hi = hi.min(t);
        }
        (lo..hi).all(|i| {
            let a = self.stored(i).cloned().unwrap_or_else(|| self.field.zero(self.prec));
            let b = o.stored(i).cloned().unwrap_or_else(|| o.field.zero(o.prec));
            a.eq_at_prec(&b)
        })
    }

    /// Caps every coefficient at absolute precision `prec`.
    pub fn cap_prec(&self, prec: i64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.cap_prec(Q::from_integer(prec))).collect();
        Self::build(self.field, self.i_min, coeffs, self.tail, self.prec.min(prec))
    }

    /// `((d/dT)^j f)(z)` for `z` in some `L_m` with `val(z) > 0`.
    ///
    /// Sums the stored window; when the series is truncated its decay bound
    /// caps the precision of the result.
    pub fn eval_derivative(&self, j: u32, z: &CycloElement) -> Result<CycloElement> {
        if !self.is_power_series() {
            return Err(Error::domain("evaluation needs a power series"));
        }
        let vz = z.val().lower_bound();
        if vz <= Q::from_integer(0) {
            return Err(Error::domain("evaluation point must have positive valuation"));
        }
        let j = j as i64;
        let m = z.level();
        let mut acc = CycloElement::zero(z.field(), m, self.prec);
        let mut zp = CycloElement::one(z.field(), m, self.prec);
        for n in j..self.i_end() {
            // n!/(n−j)! a_n z^{n−j}
            let mut fall = BigInt::from(1);
            for t in 0..j {
                fall *= n - t;
            }
            let c = self.coeff(n)?.mul_int(&fall);
            acc = acc.add(&zp.scale(&c));
            zp = zp.mul(z);
        }
        if let Some(t) = self.tail {
            let d = self
                .decay
                .ok_or_else(|| Error::precision("truncated series without a decay bound"))?;
            let floor = d.tail_min(self.p(), t.max(j), |n| Q::from_integer(n - j) * vz);
            acc = acc.cap(floor);
        }
        Ok(acc)
    }

    /// `min_i (val a_i + r·i)` over the stored window, and whether the window
    /// is the whole series.
    pub fn sup_norm_val(&self, r: Q) -> (Val, bool) {
        let v = Val::min_of(self.coeffs.iter().enumerate().map(|(k, c)| {
            let i = self.i_min + k as i64;
            c.val().shift(r * Q::from_integer(i))
        }))
        .unwrap_or(Val::AtLeast(Q::from_integer(self.prec)));
        (v, self.tail.is_none())
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let i = self.i_min + k as i64;
            let body = match c.as_rational() {
                Some(q) => q.to_string(),
                None => format!("({c})"),
            };
            parts.push(match i {
                0 => body,
                1 => format!("{body}*T"),
                _ => format!("{body}*T^{i}"),
            });
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        if let Some(t) = self.tail {
            parts.push(format!("O(T^{t})"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}
