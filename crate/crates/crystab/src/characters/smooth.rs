use crate::error::{Error, Result};
use crate::padic_core::scalar::{inv_mod, ppow, val_int};
use crate::padic_core::val::ceil_q;
use crate::padic_core::{CycloElement, Field, PadicScalar, RootOfUnity, Val};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// A character value: a scalar of `L` times a root of unity of p-power order.
#[derive(Clone, Debug)]
pub struct CharValue {
    scalar: PadicScalar,
    root: RootOfUnity,
}

impl CharValue {
    pub fn new(scalar: PadicScalar, root: RootOfUnity) -> Self {
        CharValue { scalar, root: root.primitive_form() }
    }

    pub fn from_scalar(scalar: PadicScalar) -> Self {
        let p = scalar.p();
        CharValue { scalar, root: RootOfUnity::new_i64(p, 0, 0) }
    }

    pub fn scalar(&self) -> &PadicScalar {
        &self.scalar
    }
    pub fn root(&self) -> &RootOfUnity {
        &self.root
    }

    /// The value as a scalar when its root-of-unity part is trivial.
    pub fn as_scalar(&self) -> Option<PadicScalar> {
        if self.root.order_level() == 0 {
            Some(self.scalar.clone())
        } else {
            None
        }
    }

    pub fn mul(&self, o: &CharValue) -> CharValue {
        CharValue::new(self.scalar.mul(&o.scalar), self.root.mul(&o.root))
    }

    pub fn inv(&self) -> Result<CharValue> {
        Ok(CharValue::new(self.scalar.inv()?, self.root.inv()))
    }

    /// The value in `L_level`; `level` must be at least the root's order level.
    pub fn to_cyclo(&self, level: u32) -> Result<CycloElement> {
        if self.root.order_level() > level {
            return Err(Error::domain(format!(
                "value needs level {} but level {level} was requested",
                self.root.order_level()
            )));
        }
        let prec = ceil_q(self.scalar.abs_prec()).max(1);
        let r = self.root.at_level(level);
        Ok(r.to_cyclo(self.scalar.field(), prec).scale(&self.scalar))
    }

    pub fn eq_at_prec(&self, o: &CharValue) -> bool {
        self.root == o.root && self.scalar.eq_at_prec(&o.scalar)
    }
}

impl fmt::Display for CharValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.root.order_level() == 0 {
            write!(f, "{}", self.scalar)
        } else {
            write!(
                f,
                "({}) * eps_{}^{}",
                self.scalar,
                self.root.level(),
                self.root.exponent()
            )
        }
    }
}

/// Discrete logarithms keyed by `(p, level)`.
type LogTables = HashMap<(u32, u32), Arc<HashMap<u64, u64>>>;

thread_local! {
    static LOG_TABLES: RefCell<LogTables> = RefCell::new(HashMap::new());
}

fn log_table(p: u32, r: u32) -> Result<Arc<HashMap<u64, u64>>> {
    if let Some(t) = LOG_TABLES.with(|c| c.borrow().get(&(p, r)).cloned()) {
        return Ok(t);
    }
    let n = ppow(p, r).to_u64().filter(|&n| n <= 1 << 22).ok_or_else(|| {
        Error::domain(format!("wild level {r} is too large for discrete logarithms"))
    })?;
    let modulus = n * p as u64;
    let mut table = HashMap::with_capacity(n as usize);
    let mut x: u64 = 1;
    for i in 0..n {
        table.insert(x, i);
        x = ((x as u128 * (1 + p as u128)) % modulus as u128) as u64;
    }
    let t = Arc::new(table);
    LOG_TABLES.with(|c| c.borrow_mut().insert((p, r), t.clone()));
    Ok(t)
}

/// The index `ℓ(u) mod p^r` with `u / ω(u) = (1+p)^{ℓ(u)}`, for a unit `u`.
pub fn log_index(p: u32, u: &BigInt, r: u32) -> Result<BigInt> {
    if r == 0 {
        return Ok(BigInt::zero());
    }
    let pb = BigInt::from(p);
    if u.mod_floor(&pb).is_zero() {
        return Err(Error::domain("log index of a non-unit"));
    }
    let modulus = ppow(p, r + 1);
    let pr = ppow(p, r);
    // u^{p−1} = <u>^{p−1} lies in 1 + pZ_p.
    let x = u.mod_floor(&modulus).modpow(&BigInt::from(p - 1), &modulus);
    let table = log_table(p, r)?;
    let i = table
        .get(&x.to_u64().expect("small modulus"))
        .copied()
        .expect("1+pZ/p^{r+1} is generated by 1+p");
    let inv = inv_mod(&BigInt::from(p - 1), &pr);
    Ok((BigInt::from(i) * inv).mod_floor(&pr))
}

/// The smallest primitive root modulo `p^2`, which generates `(Z/p^n)^×`
/// for every `n`.
pub fn primitive_root(p: u32) -> u64 {
    let p64 = p as u64;
    let mut factors = vec![];
    let mut m = p64 - 1;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            factors.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    let pow = |b: u64, e: u64, n: u64| BigInt::from(b).modpow(&BigInt::from(e), &BigInt::from(n));
    (2..p64 * p64)
        .find(|&g| {
            g % p64 != 0
                && factors.iter().all(|&q| pow(g, (p64 - 1) / q, p64) != BigInt::one())
                && pow(g, p64 - 1, p64 * p64) != BigInt::one()
        })
        .expect("primitive roots exist")
}

/// A smooth character of `Q_p^×`.
///
/// On `Z_p^× = μ_{p−1} × (1+pZ_p)` it is `ω^t` on the first factor and
/// sends `1+p` to a root of unity of p-power order; its value at `p` is an
/// invertible scalar.
#[derive(Clone, Debug)]
pub struct SmoothCharacter {
    at_p: PadicScalar,
    tame: u32,
    wild: RootOfUnity,
}

impl SmoothCharacter {
    /// The character with `χ(p) = at_p`, `χ = ω^tame` on `μ_{p−1}` and
    /// `χ(1+p) = wild`.
    pub fn new(at_p: PadicScalar, tame: i64, wild: RootOfUnity) -> Result<Self> {
        let p = at_p.p();
        if wild.p() != p {
            return Err(Error::domain("root of unity for a different prime"));
        }
        if !at_p.val().is_finite() {
            return Err(Error::domain("value at p must be invertible"));
        }
        Ok(SmoothCharacter {
            tame: tame.rem_euclid(p as i64 - 1) as u32,
            wild: wild.primitive_form(),
            at_p,
        })
    }

    /// The unramified character `ur(c)`.
    pub fn unramified(c: PadicScalar) -> Result<Self> {
        let p = c.p();
        Self::new(c, 0, RootOfUnity::new_i64(p, 0, 0))
    }

    pub fn trivial(field: Field, prec: i64) -> Self {
        Self::unramified(field.one(prec)).expect("1 is invertible")
    }

    /// `|x| = ur(1/p)`.
    pub fn norm(field: Field, prec: i64) -> Self {
        Self::unramified(field.rat(1, field.p() as i64, prec)).expect("1/p is invertible")
    }

    /// The character of conductor `n` sending the fixed generator `g` of
    /// `(Z/p^n)^×` to `ζ^j`, where `ζ = ω(g)·ε^{(n−1)}` has order
    /// `(p−1)p^{n−1}`. Fails unless the conductor is exactly `n`.
    pub fn from_generator(at_p: PadicScalar, conductor: u32, j: &BigInt) -> Result<Self> {
        let p = at_p.p();
        if conductor == 0 {
            if !j.is_zero() {
                return Err(Error::domain("conductor 0 requires generator exponent 0"));
            }
            return Self::unramified(at_p);
        }
        let tame = j.mod_floor(&BigInt::from(p - 1)).to_i64().expect("small");
        let r = conductor - 1;
        let wild = if r == 0 {
            RootOfUnity::new_i64(p, 0, 0)
        } else {
            let pr = ppow(p, r);
            let lg = log_index(p, &BigInt::from(primitive_root(p)), r)?;
            RootOfUnity::new(p, r, &(j * inv_mod(&lg, &pr)))
        };
        let chi = Self::new(at_p, tame, wild)?;
        if chi.conductor() != conductor {
            return Err(Error::domain(format!(
                "generator exponent {j} gives conductor {} rather than {conductor}",
                chi.conductor()
            )));
        }
        Ok(chi)
    }

    pub fn p(&self) -> u32 {
        self.at_p.p()
    }
    pub fn field(&self) -> Field {
        self.at_p.field()
    }
    pub fn at_p(&self) -> &PadicScalar {
        &self.at_p
    }
    pub fn tame(&self) -> u32 {
        self.tame
    }
    /// `χ(1+p)`, in primitive form.
    pub fn wild(&self) -> &RootOfUnity {
        &self.wild
    }

    /// The conductor exponent `n(χ)`.
    pub fn conductor(&self) -> u32 {
        let r = self.wild.order_level();
        if r > 0 {
            r + 1
        } else if self.tame != 0 {
            1
        } else {
            0
        }
    }

    pub fn is_unramified(&self) -> bool {
        self.conductor() == 0
    }

    /// The exponent `j` with `χ(g) = ζ^j`, reduced modulo `(p−1)p^{n−1}`.
    pub fn gen_value(&self) -> BigInt {
        let n = self.conductor();
        if n == 0 {
            return BigInt::zero();
        }
        let p = self.p();
        let t = BigInt::from(self.tame);
        if n == 1 {
            return t;
        }
        let pr = ppow(p, n - 1);
        let lg = log_index(p, &BigInt::from(primitive_root(p)), n - 1).expect("small level");
        let target = (self.wild.at_level(n - 1).exponent() * lg).mod_floor(&pr);
        let pm1 = BigInt::from(p - 1);
        let k = ((target - &t) * inv_mod(&pm1, &pr)).mod_floor(&pr);
        t + pm1 * k
    }

    /// Working precision for values on units.
    fn prec(&self) -> i64 {
        (ceil_q(self.at_p.abs_prec()) - ceil_q(self.at_p.val().lower_bound()).min(0)).max(1)
    }

    /// `χ(u)` for an integer unit `u`.
    pub fn eval_unit(&self, u: &BigInt) -> Result<CharValue> {
        self.eval_unit_at(u, self.prec())
    }

    pub(crate) fn eval_unit_at(&self, u: &BigInt, prec: i64) -> Result<CharValue> {
        let p = self.p();
        let pb = BigInt::from(p);
        let res = u.mod_floor(&pb);
        if res.is_zero() {
            return Err(Error::domain("character evaluated at a non-unit"));
        }
        let res = res.to_i64().expect("small");
        let qp = Field::qp(p);
        let t = BigInt::from(res).modpow(&BigInt::from(self.tame), &pb).to_i64().expect("small");
        let tame = qp.teichmuller(t, prec);
        let r = self.wild.level();
        let root = self.wild.pow(&log_index(p, u, r)?);
        Ok(CharValue::new(tame, root))
    }

    /// `χ(x)` for an exact nonzero rational `x`.
    pub fn eval_rational(&self, x: &BigRational) -> Result<CharValue> {
        if x.is_zero() {
            return Err(Error::domain("character evaluated at 0"));
        }
        let p = self.p();
        let v = val_int(x.numer(), p) - val_int(x.denom(), p);
        let pv = ppow(p, v.unsigned_abs() as u32);
        let unit = if v >= 0 { x / BigRational::from_integer(pv) } else { x * BigRational::from_integer(pv) };
        let modulus = ppow(p, self.wild.level() + 1);
        let u = (unit.numer() * inv_mod(&unit.denom().mod_floor(&modulus), &modulus)).mod_floor(&modulus);
        let on_unit = self.eval_unit(&u)?;
        Ok(CharValue::from_scalar(self.at_p.pow(v)?).mul(&on_unit))
    }

    /// `χ(x)` for a nonzero element of `Q_p`.
    pub fn eval(&self, x: &PadicScalar) -> Result<CharValue> {
        let q = x.as_rational().ok_or_else(|| Error::domain("argument must lie in Q_p"))?;
        let v = match x.val() {
            Val::Finite(v) => v.to_integer(),
            Val::AtLeast(_) => return Err(Error::precision("valuation of the argument is not determined")),
        };
        let rel = ceil_q(x.abs_prec()) - v;
        if rel < self.wild.level() as i64 + 1 {
            return Err(Error::precision("argument not known to the conductor"));
        }
        self.eval_rational(&q)
    }

    pub fn mul(&self, o: &SmoothCharacter) -> SmoothCharacter {
        SmoothCharacter::new(self.at_p.mul(&o.at_p), self.tame as i64 + o.tame as i64, self.wild.mul(&o.wild))
            .expect("product of invertible values")
    }

    pub fn inv(&self) -> Result<SmoothCharacter> {
        SmoothCharacter::new(self.at_p.inv()?, -(self.tame as i64), self.wild.inv())
    }

    pub fn div(&self, o: &SmoothCharacter) -> Result<SmoothCharacter> {
        Ok(self.mul(&o.inv()?))
    }

    /// Twist by `ur(c)`.
    pub fn twist_unramified(&self, c: &PadicScalar) -> SmoothCharacter {
        SmoothCharacter { at_p: self.at_p.mul(c), ..self.clone() }
    }
}

impl PartialEq for SmoothCharacter {
    fn eq(&self, o: &Self) -> bool {
        self.p() == o.p()
            && self.tame == o.tame
            && self.wild == o.wild
            && self.at_p.val() == o.at_p.val()
            && self.at_p.eq_at_prec(&o.at_p)
    }
}

impl fmt::Display for SmoothCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at_p = match self.at_p.as_rational() {
            Some(q) => q.to_string(),
            None => format!("{}", self.at_p),
        };
        if self.is_unramified() {
            write!(f, "ur({at_p})")
        } else {
            write!(f, "cond:{};gen:{};at_p:{at_p}", self.conductor(), self.gen_value())
        }
    }
}
