//! Scalars of `Q_p` and of a totally ramified extension `Q_p(π)`, `π^e = p·u`,
//! with absolute precision tracking.

use super::val::{ceil_q, Q, Val};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

thread_local! {
    static POW_CACHE: RefCell<HashMap<(u32, u32), BigInt>> = RefCell::new(HashMap::new());
}

/// `p^k` as a big integer, cached per thread.
pub fn ppow(p: u32, k: u32) -> BigInt {
    POW_CACHE.with(|c| {
        c.borrow_mut()
            .entry((p, k))
            .or_insert_with(|| num_traits::pow(BigInt::from(p), k as usize))
            .clone()
    })
}

/// p-adic valuation of a nonzero integer.
pub fn val_int(n: &BigInt, p: u32) -> i64 {
    assert!(!n.is_zero(), "valuation of zero integer");
    let mut v = 0;
    let mut m = n.clone();
    while (&m % p).is_zero() {
        m /= p;
        v += 1;
    }
    v
}

fn strip_p(n: &BigInt, p: u32) -> (BigInt, i64) {
    let mut v = 0;
    let mut m = n.clone();
    while (&m % p).is_zero() {
        m /= p;
        v += 1;
    }
    (m, v)
}

/// Inverse of a unit modulo `p^k`.
pub fn inv_mod(a: &BigInt, modulus: &BigInt) -> BigInt {
    let g = a.extended_gcd(modulus);
    debug_assert!(g.gcd.is_one() || (-&g.gcd).is_one());
    let x = if g.gcd.is_negative() { -g.x } else { g.x };
    x.mod_floor(modulus)
}

pub fn is_odd_prime(p: u32) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The coefficient field `L = Q_p(π)` with `π^e = p·u`.
///
/// `e = 1` is `Q_p` itself. For quadratic `L` the unit `u` is chosen so that
/// `L` meets the cyclotomic tower only in `Q_p`, which keeps every
/// `L[X]/Φ_{p^m}` a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    p: u32,
    e: u32,
    u: i64,
}

impl Field {
    /// `Q_p`. Panics unless `p` is an odd prime.
    pub fn qp(p: u32) -> Field {
        Self::try_qp(p).expect("p must be an odd prime")
    }

    pub fn try_qp(p: u32) -> Result<Field> {
        Self::eisenstein(p, 1, 1)
    }

    /// `Q_p(π)` with `π^e = p·u`, `u` prime to `p`.
    pub fn eisenstein(p: u32, e: u32, u: i64) -> Result<Field> {
        if !is_odd_prime(p) {
            return Err(Error::domain(format!("{p} is not an odd prime")));
        }
        if e == 0 || u == 0 || u.rem_euclid(p as i64) == 0 {
            return Err(Error::domain("Eisenstein data must have e >= 1 and u prime to p"));
        }
        Ok(Field { p, e, u })
    }

    /// The quadratic ramified extension linearly disjoint from `Q_p(μ_{p^∞})`.
    pub fn quadratic(p: u32) -> Field {
        // The unique quadratic subfield of the cyclotomic tower is Q_p(sqrt(p*)),
        // p* = (-1)^((p-1)/2) p; take p·u with u/(-1)^((p-1)/2) a non-square.
        let sign: i64 = if p % 4 == 1 { 1 } else { -1 };
        let is_square = |a: i64| {
            let a = a.rem_euclid(p as i64);
            (1..p as i64).any(|x| (x * x) % p as i64 == a)
        };
        let u = (1..p as i64)
            .find(|&u| !is_square(u * sign))
            .expect("non-residue exists");
        Field::eisenstein(p, 2, u).expect("valid data")
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    pub fn pi_unit(&self) -> i64 {
        self.u
    }
    pub fn is_base(&self) -> bool {
        self.e == 1
    }

    /// Zero known modulo `p^prec`.
    pub fn zero(&self, prec: i64) -> PadicScalar {
        PadicScalar {
            field: *self,
            c: (0..self.e).map(|_| Comp::zero(prec)).collect(),
        }
    }

    pub fn one(&self, prec: i64) -> PadicScalar {
        self.int(1, prec)
    }

    pub fn int(&self, n: i64, prec: i64) -> PadicScalar {
        self.big(&BigInt::from(n), prec)
    }

    pub fn big(&self, n: &BigInt, prec: i64) -> PadicScalar {
        let mut s = self.zero(prec);
        s.c[0] = Comp::normalize(n.clone(), 0, prec, self.p);
        s
    }

    /// `num/den` known modulo `p^prec`.
    pub fn rat(&self, num: i64, den: i64, prec: i64) -> PadicScalar {
        self.big_rat(&BigRational::new(num.into(), den.into()), prec)
    }

    pub fn big_rat(&self, q: &BigRational, prec: i64) -> PadicScalar {
        let mut s = self.zero(prec);
        s.c[0] = Comp::from_ratio(q.numer(), q.denom(), prec, self.p);
        s
    }

    /// `q` known to relative precision `rel`, i.e. modulo `p^{val(q)+rel}`.
    pub fn big_rat_rel(&self, q: &BigRational, rel: i64) -> PadicScalar {
        if q.is_zero() {
            return self.zero(rel);
        }
        let v = strip_p(q.numer(), self.p).1 - strip_p(q.denom(), self.p).1;
        self.big_rat(q, v + rel)
    }

    /// The uniformizer `π` (equal to `p` when `e = 1`).
    pub fn pi(&self, prec: i64) -> PadicScalar {
        if self.e == 1 {
            return self.int(self.p as i64, prec);
        }
        let mut s = self.zero(prec);
        s.c[1] = Comp::normalize(BigInt::one(), 0, prec, self.p);
        s
    }

    /// Teichmüller lift of the residue `a mod p`.
    pub fn teichmuller(&self, a: i64, prec: i64) -> PadicScalar {
        let p = self.p;
        let a = a.rem_euclid(p as i64);
        if a == 0 {
            return self.zero(prec);
        }
        let modulus = ppow(p, prec.max(1) as u32);
        let mut x = BigInt::from(a);
        loop {
            let y = x.modpow(&BigInt::from(p), &modulus);
            if y == x {
                break;
            }
            x = y;
        }
        self.big(&x, prec)
    }
}

/// One `Q_p`-coordinate: `unit · p^val` known modulo `p^prec`.
#[derive(Clone, Debug)]
pub(crate) struct Comp {
    unit: BigInt,
    val: i64,
    prec: i64,
}

impl Comp {
    fn zero(prec: i64) -> Comp {
        Comp { unit: BigInt::zero(), val: prec, prec }
    }

    fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    /// Valuation, or the precision for an undetermined zero.
    fn v(&self) -> i64 {
        self.val
    }

    fn normalize(unit: BigInt, val: i64, prec: i64, p: u32) -> Comp {
        if val >= prec || unit.is_zero() {
            return Comp::zero(prec);
        }
        let (mut unit, shift) = strip_p(&unit, p);
        let val = val + shift;
        if val >= prec {
            return Comp::zero(prec);
        }
        let modulus = ppow(p, (prec - val) as u32);
        unit = unit.mod_floor(&modulus);
        Comp { unit, val, prec }
    }

    fn from_ratio(num: &BigInt, den: &BigInt, prec: i64, p: u32) -> Comp {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Comp::zero(prec);
        }
        let (d, vd) = strip_p(den, p);
        let (n, vn) = strip_p(num, p);
        let val = vn - vd;
        if val >= prec {
            return Comp::zero(prec);
        }
        let modulus = ppow(p, (prec - val) as u32);
        let unit = (n * inv_mod(&d, &modulus)).mod_floor(&modulus);
        Comp { unit, val, prec }
    }

    fn add(&self, o: &Comp, p: u32) -> Comp {
        let prec = self.prec.min(o.prec);
        if self.is_zero() {
            return Comp::normalize(o.unit.clone(), o.val, prec, p);
        }
        if o.is_zero() {
            return Comp::normalize(self.unit.clone(), self.val, prec, p);
        }
        let v = self.val.min(o.val);
        let a = &self.unit * ppow(p, (self.val - v) as u32);
        let b = &o.unit * ppow(p, (o.val - v) as u32);
        Comp::normalize(a + b, v, prec, p)
    }

    fn neg(&self, p: u32) -> Comp {
        if self.is_zero() {
            return self.clone();
        }
        Comp::normalize(-&self.unit, self.val, self.prec, p)
    }

    fn mul(&self, o: &Comp, p: u32) -> Comp {
        let prec = (self.prec + o.v()).min(o.prec + self.v());
        if self.is_zero() || o.is_zero() {
            return Comp::zero(prec);
        }
        Comp::normalize(&self.unit * &o.unit, self.val + o.val, prec, p)
    }

    fn mul_int(&self, n: &BigInt, p: u32) -> Comp {
        if n.is_zero() {
            return Comp::zero(self.prec);
        }
        let (m, v) = strip_p(n, p);
        if self.is_zero() {
            return Comp::zero(self.prec + v);
        }
        Comp::normalize(&self.unit * m, self.val + v, self.prec + v, p)
    }

    fn div_int(&self, n: &BigInt, p: u32) -> Comp {
        assert!(!n.is_zero(), "division by zero integer");
        let (m, v) = strip_p(n, p);
        if self.is_zero() {
            return Comp::zero(self.prec - v);
        }
        let rel = self.prec - self.val;
        let modulus = ppow(p, rel as u32);
        let unit = &self.unit * inv_mod(&m.mod_floor(&modulus), &modulus);
        Comp::normalize(unit, self.val - v, self.prec - v, p)
    }

    fn inv(&self, p: u32) -> Option<Comp> {
        if self.is_zero() {
            return None;
        }
        let rel = self.prec - self.val;
        let modulus = ppow(p, rel as u32);
        let unit = inv_mod(&self.unit, &modulus);
        Some(Comp::normalize(unit, -self.val, -self.val + rel, p))
    }

    fn cap(&self, prec: i64, p: u32) -> Comp {
        if prec >= self.prec {
            return self.clone();
        }
        Comp::normalize(self.unit.clone(), self.val, prec, p)
    }

    /// Exact rational representative `unit·p^val`.
    fn to_rational(&self, p: u32) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        if self.val >= 0 {
            BigRational::from_integer(&self.unit * ppow(p, self.val as u32))
        } else {
            BigRational::new(self.unit.clone(), ppow(p, (-self.val) as u32))
        }
    }
}

/// An element of `L` with tracked absolute precision.
///
/// Stored as `Σ_{i<e} c_i π^i` with each `c_i ∈ Q_p`. The element's absolute
/// precision is `min_i(prec(c_i) + i/e)`.
#[derive(Clone, Debug)]
pub struct PadicScalar {
    field: Field,
    c: Vec<Comp>,
}

impl PadicScalar {
    pub fn field(&self) -> Field {
        self.field
    }
    pub fn p(&self) -> u32 {
        self.field.p
    }

    fn lift(&self, target: Field) -> PadicScalar {
        if self.field == target {
            return self.clone();
        }
        assert!(
            self.field.e == 1 && self.field.p == target.p,
            "incompatible coefficient fields {:?} and {:?}",
            self.field,
            target
        );
        let prec = self.c[0].prec;
        let mut c = vec![self.c[0].clone()];
        c.extend((1..target.e).map(|_| Comp::zero(prec)));
        PadicScalar { field: target, c }
    }

    /// The same element viewed in `target`, which must contain this
    /// element's field.
    pub fn to_field(&self, target: Field) -> PadicScalar {
        self.lift(target)
    }

    fn common(&self, o: &PadicScalar) -> Field {
        if self.field == o.field {
            self.field
        } else if self.field.e == 1 {
            o.field
        } else {
            self.field
        }
    }

    /// Valuation, normalized by `val(p) = 1`.
    pub fn val(&self) -> Val {
        let e = self.field.e as i64;
        Val::min_of(self.c.iter().enumerate().map(|(i, c)| {
            let shift = Q::new(i as i64, e);
            if c.is_zero() {
                Val::AtLeast(Q::from_integer(c.prec) + shift)
            } else {
                Val::Finite(Q::from_integer(c.val) + shift)
            }
        }))
        .expect("nonempty")
    }

    /// Absolute precision: the element is known modulo `p^abs_prec`.
    pub fn abs_prec(&self) -> Q {
        let e = self.field.e as i64;
        self.c
            .iter()
            .enumerate()
            .map(|(i, c)| Q::from_integer(c.prec) + Q::new(i as i64, e))
            .min()
            .expect("nonempty")
    }

    /// The largest number of known digits in any coordinate.
    pub fn max_rel_prec(&self) -> i64 {
        self.c.iter().map(|c| if c.is_zero() { 0 } else { c.prec - c.val }).max().expect("nonempty")
    }

    /// Whether the element is indistinguishable from zero at its precision.
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Comp::is_zero)
    }

    /// Equality as far as both operands are known.
    pub fn eq_at_prec(&self, o: &PadicScalar) -> bool {
        (self - o).is_zero()
    }

    /// Lowers the absolute precision to at most `prec`.
    pub fn cap_prec(&self, prec: Q) -> PadicScalar {
        let e = self.field.e as i64;
        let p = self.field.p;
        PadicScalar {
            field: self.field,
            c: self
                .c
                .iter()
                .enumerate()
                .map(|(i, c)| c.cap(ceil_q(prec - Q::new(i as i64, e)), p))
                .collect(),
        }
    }

    pub fn neg(&self) -> PadicScalar {
        let p = self.field.p;
        PadicScalar { field: self.field, c: self.c.iter().map(|c| c.neg(p)).collect() }
    }

    pub fn add(&self, o: &PadicScalar) -> PadicScalar {
        let f = self.common(o);
        let (a, b) = (self.lift(f), o.lift(f));
        PadicScalar { field: f, c: a.c.iter().zip(&b.c).map(|(x, y)| x.add(y, f.p)).collect() }
    }

    pub fn sub(&self, o: &PadicScalar) -> PadicScalar {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &PadicScalar) -> PadicScalar {
        let f = self.common(o);
        let p = f.p;
        if f.e == 1 {
            return PadicScalar { field: f, c: vec![self.c[0].mul(&o.c[0], p)] };
        }
        let (a, b) = (self.lift(f), o.lift(f));
        let e = f.e as usize;
        let pu = BigInt::from(p as i64 * f.u);
        let mut out: Vec<Option<Comp>> = vec![None; e];
        for i in 0..e {
            for j in 0..e {
                let mut t = a.c[i].mul(&b.c[j], p);
                let k = if i + j >= e {
                    t = t.mul_int(&pu, p);
                    i + j - e
                } else {
                    i + j
                };
                out[k] = Some(match out[k].take() {
                    None => t,
                    Some(s) => s.add(&t, p),
                });
            }
        }
        PadicScalar { field: f, c: out.into_iter().map(|c| c.expect("filled")).collect() }
    }

    /// Multiplication by an exact integer (no precision is lost).
    pub fn mul_int(&self, n: &BigInt) -> PadicScalar {
        let p = self.field.p;
        PadicScalar { field: self.field, c: self.c.iter().map(|c| c.mul_int(n, p)).collect() }
    }

    pub fn mul_i64(&self, n: i64) -> PadicScalar {
        self.mul_int(&BigInt::from(n))
    }

    /// Division by an exact nonzero integer.
    pub fn div_int(&self, n: &BigInt) -> PadicScalar {
        let p = self.field.p;
        PadicScalar { field: self.field, c: self.c.iter().map(|c| c.div_int(n, p)).collect() }
    }

    pub fn div_i64(&self, n: i64) -> PadicScalar {
        self.div_int(&BigInt::from(n))
    }

    /// Multiplication by the exact rational `num/den`.
    pub fn mul_rat(&self, q: &BigRational) -> PadicScalar {
        self.mul_int(q.numer()).div_int(q.denom())
    }

    /// Multiplication by `π^k`, exact.
    pub fn shift_pi(&self, k: i64) -> PadicScalar {
        let f = self.field;
        let p = f.p;
        if f.e == 1 {
            let n = ppow(p, k.unsigned_abs() as u32);
            return if k >= 0 { self.mul_int(&n) } else { self.div_int(&n) };
        }
        let pu = BigInt::from(p as i64 * f.u);
        let mut c = self.c.clone();
        if k >= 0 {
            for _ in 0..k {
                let last = c.pop().expect("nonempty").mul_int(&pu, p);
                c.insert(0, last);
            }
        } else {
            for _ in 0..(-k) {
                let first = c.remove(0).div_int(&pu, p);
                c.push(first);
            }
        }
        PadicScalar { field: f, c }
    }

    /// Multiplicative inverse; fails on an undetermined zero.
    pub fn inv(&self) -> Result<PadicScalar> {
        let f = self.field;
        let v = match self.val() {
            Val::Finite(v) => v,
            Val::AtLeast(b) => {
                return Err(Error::precision(format!(
                    "cannot invert an element indistinguishable from zero (valuation >= {b})"
                )))
            }
        };
        if f.e == 1 {
            return Ok(PadicScalar { field: f, c: vec![self.c[0].inv(f.p).expect("nonzero")] });
        }
        let s = (v * Q::from_integer(f.e as i64)).to_integer();
        let y = self.shift_pi(-s);
        let c0 = y.c[0].inv(f.p).ok_or_else(|| Error::precision("leading digit undetermined"))?;
        let mut z = f.zero(c0.prec);
        z.c[0] = c0;
        // Newton iteration doubles the π-adic accuracy each step.
        let target = (y.abs_prec() * Q::from_integer(f.e as i64)).ceil().to_integer().max(1);
        let mut acc = 1i64;
        while acc < target + 1 {
            z = z.mul_i64(2).sub(&z.mul(&y.mul(&z)));
            acc *= 2;
        }
        let z = z.cap_prec(Q::new(acc, f.e as i64));
        Ok(z.shift_pi(-s))
    }

    pub fn div(&self, o: &PadicScalar) -> Result<PadicScalar> {
        Ok(self.mul(&o.inv()?))
    }

    /// Integer power (negative exponents invert).
    pub fn pow(&self, n: i64) -> Result<PadicScalar> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let prec_hint = ceil_q(self.abs_prec()).max(1) + 64;
        let mut acc = self.field.one(prec_hint.max(ceil_q(base.abs_prec()) + 64));
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        if n == 0 {
            return Ok(self.field.one(prec_hint));
        }
        Ok(acc)
    }

    /// The `Q_p`-coordinates as exact rationals (`c_0 + c_1 π + …`).
    pub fn to_rationals(&self) -> Vec<BigRational> {
        self.c.iter().map(|c| c.to_rational(self.field.p)).collect()
    }

    /// Per-coordinate absolute precisions.
    pub fn comp_precs(&self) -> Vec<i64> {
        self.c.iter().map(|c| c.prec).collect()
    }

    /// Rebuilds a scalar from coordinates and per-coordinate precisions.
    pub fn from_rationals(field: Field, coords: &[BigRational], precs: &[i64]) -> Result<PadicScalar> {
        if coords.len() != field.e as usize || precs.len() != coords.len() {
            return Err(Error::domain("coordinate count must equal the ramification index"));
        }
        Ok(PadicScalar {
            field,
            c: coords
                .iter()
                .zip(precs)
                .map(|(q, &n)| Comp::from_ratio(q.numer(), q.denom(), n, field.p))
                .collect(),
        })
    }

    /// The value as an exact rational when it lies in `Q_p` (`e = 1` or all
    /// higher coordinates zero).
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.c[1..].iter().all(Comp::is_zero) {
            Some(self.c[0].to_rational(self.field.p))
        } else {
            None
        }
    }

    /// The residue class modulo `p^k` of an integral element of `Q_p`, as an
    /// integer in `[0, p^k)`.
    pub fn residue_mod(&self, k: u32) -> Result<BigInt> {
        let q = self
            .as_rational()
            .ok_or_else(|| Error::domain("residue requested for an element outside Q_p"))?;
        if (self.c[0].prec as i128) < k as i128 {
            return Err(Error::precision(format!("element not known modulo p^{k}")));
        }
        let modulus = ppow(self.field.p, k);
        if q.is_zero() {
            return Ok(BigInt::zero());
        }
        if val_int(q.denom(), self.field.p) > 0 {
            return Err(Error::domain("element is not integral"));
        }
        Ok((q.numer() * inv_mod(&q.denom().mod_floor(&modulus), &modulus)).mod_floor(&modulus))
    }

    /// p-adic logarithm of an element with `val(x−1) > 1/(p−1)`.
    pub fn log(&self) -> Result<PadicScalar> {
        let f = self.field;
        let y = self.sub(&f.one(ceil_q(self.abs_prec()) + 1));
        let v = y.val();
        let vq = match v {
            Val::AtLeast(_) => return Ok(y),
            Val::Finite(v) => v,
        };
        if vq <= Q::new(1, f.p as i64 - 1) {
            return Err(Error::domain("logarithm needs val(x-1) > 1/(p-1)"));
        }
        let target = y.abs_prec();
        // Terms y^n/n with n > N have valuation >= n·v − log_p(n) >= target.
        let mut n_max = 1i64;
        loop {
            let ok = (n_max + 1..n_max + 200).all(|n| {
                Q::from_integer(n) * vq - Q::from_integer(log_floor(n, f.p)) >= target
            });
            if ok {
                break;
            }
            n_max += 1;
        }
        let mut acc = f.zero(ceil_q(target) + 1);
        let mut pw = y.clone();
        for n in 1..=n_max {
            let term = pw.div_i64(n);
            acc = if n % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
            pw = pw.mul(&y);
        }
        Ok(acc.cap_prec(target))
    }
}

/// `floor(log_p n)` for `n >= 1`.
pub fn log_floor(n: i64, p: u32) -> i64 {
    let mut k = 0;
    let mut q = n;
    while q >= p as i64 {
        q /= p as i64;
        k += 1;
    }
    k
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.field.p;
        let parts: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let body = if c.is_zero() { "0".to_string() } else { c.to_rational(p).to_string() };
                let term = match i {
                    0 => body,
                    1 => format!("({body})*pi"),
                    _ => format!("({body})*pi^{i}"),
                };
                format!("{term} + O({p}^{})", c.prec)
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl std::ops::$tr<&PadicScalar> for &PadicScalar {
            type Output = PadicScalar;
            fn $m(self, o: &PadicScalar) -> PadicScalar {
                PadicScalar::$inner(self, o)
            }
        }
        impl std::ops::$tr<PadicScalar> for PadicScalar {
            type Output = PadicScalar;
            fn $m(self, o: PadicScalar) -> PadicScalar {
                PadicScalar::$inner(&self, &o)
            }
        }
    };
}
forward_binop!(Add, add, add);
forward_binop!(Sub, sub, sub);
forward_binop!(Mul, mul, mul);

impl std::ops::Neg for &PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        PadicScalar::neg(self)
    }
}
