//! Canonical JSON encodings; every string here parses back through
//! [`crate::parse`].

use crystab::characters::{ContinuousCharacter, SmoothCharacter};
use crystab::distributions::LocalDistribution;
use crystab::padic_core::{fmt_q, CycloElement, PadicScalar, Q};
use crystab::refinements::TorusCharacter;
use crystab::series::TruncatedSeries;
use crystab::padic_core::scalar::{inv_mod, ppow, val_int};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};

use crate::parse::is_integer;

pub fn rational(q: &BigRational) -> String {
    if is_integer(q) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn q(x: Q) -> Value {
    Value::String(fmt_q(x))
}

/// The simplest rational congruent to `r` modulo `p^prec`: rational
/// reconstruction of the unit part, so `−1/3` prints as `-1/3` rather than
/// as a large positive representative.
fn simplest(r: &BigRational, p: u32, prec: i64) -> BigRational {
    if r.is_zero() {
        return BigRational::zero();
    }
    let v = val_int(r.numer(), p) - val_int(r.denom(), p);
    if v >= prec {
        return BigRational::zero();
    }
    let pv = |k: i64| BigRational::from_integer(ppow(p, k.unsigned_abs() as u32));
    let unit = if v >= 0 { r / pv(v) } else { r * pv(v) };
    let m = ppow(p, (prec - v) as u32);
    let a = ((unit.numer() * inv_mod(unit.denom(), &m)) % &m + &m) % &m;
    let bound = (&m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.clone());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        (r0, r1, t0, t1) = (r1, r2, t1, t2);
    }
    let reconstructed = if t1.abs() <= bound && !t1.is_zero() && r1.gcd(&t1).is_one() {
        BigRational::new(r1, t1)
    } else if a > &m / BigInt::from(2) {
        BigRational::from_integer(a - m)
    } else {
        BigRational::from_integer(a)
    };
    if v >= 0 {
        reconstructed * pv(v)
    } else {
        reconstructed / pv(v)
    }
}

pub fn scalar(s: &PadicScalar) -> String {
    let p = s.p();
    let coords: Vec<BigRational> =
        s.to_rationals().iter().zip(s.comp_precs()).map(|(r, n)| simplest(r, p, n)).collect();
    if coords[1..].iter().all(Zero::is_zero) {
        rational(&coords[0])
    } else {
        format!("[{},{}]", rational(&coords[0]), rational(&coords[1]))
    }
}

pub fn cyclo(c: &CycloElement) -> Value {
    let mut out = json!({
        "level": c.level(),
        "coeffs": c.coeffs().iter().map(scalar).collect::<Vec<_>>(),
        "prec": q(c.abs_prec()),
    });
    if let Some(s) = c.as_scalar() {
        out["scalar"] = Value::String(scalar(&s));
    }
    out
}

pub fn smooth_character(s: &SmoothCharacter) -> String {
    if s.conductor() == 0 {
        format!("ur({})", scalar(s.at_p()))
    } else {
        format!("cond:{};gen:{};at_p:{}", s.conductor(), s.gen_value(), scalar(s.at_p()))
    }
}

pub fn continuous_character(c: &ContinuousCharacter) -> String {
    let smooth = smooth_character(c.smooth());
    if c.alg_exp() == 0 {
        smooth
    } else {
        format!("x^{}*{}", c.alg_exp(), smooth)
    }
}

pub fn torus(t: &TorusCharacter) -> Value {
    json!({ "first": continuous_character(&t.first), "second": continuous_character(&t.second) })
}

/// Nonzero coefficients keyed by exponent, plus the series precision.
pub fn series(f: &TruncatedSeries) -> Value {
    let mut coeffs = Map::new();
    let mut prec: Option<Q> = None;
    for (j, c) in f.coeffs().iter().enumerate() {
        prec = Some(prec.map_or(c.abs_prec(), |p| p.min(c.abs_prec())));
        if !c.is_zero() {
            coeffs.insert((f.i_min() + j as i64).to_string(), Value::String(scalar(c)));
        }
    }
    let mut out = json!({ "coeffs": coeffs, "prec": q(prec.unwrap_or(Q::from_integer(f.prec()))) });
    if let Some(t) = f.tail() {
        out["order"] = json!(t);
    }
    out
}

pub fn distribution(mu: &LocalDistribution) -> Value {
    json!({
        "level": mu.level(),
        "entries": mu.entries().iter().map(|r| r.iter().map(scalar).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "prec": q(mu.abs_prec()),
    })
}
