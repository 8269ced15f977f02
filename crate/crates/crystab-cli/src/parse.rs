//! Text grammar for scalars, characters, series and distributions.
//!
//! * scalar: `a/b` for `Q_p`, `[c0,c1]` for `c0 + c1·π` in the quadratic
//!   extension;
//! * smooth character: `1`, `quadratic`, `ur(s)` or `cond:n;gen:j;at_p:s`;
//! * continuous character: an optional `x^n*` prefix on a smooth character,
//!   or `x^n` alone;
//! * series: a Laurent polynomial in `T` such as `3*T^2 - T + 1/2`, or the
//!   `{"coeffs": {...}}` object the CLI emits;
//! * distribution: `{"level": h, "entries": [[...], ...]}`.

use std::collections::BTreeMap;
use std::str::FromStr;

use crystab::characters::{ContinuousCharacter, SmoothCharacter};
use crystab::distributions::LocalDistribution;
use crystab::padic_core::{Field, PadicScalar};
use crystab::series::TruncatedSeries;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::Value;

pub type ParseResult<T> = std::result::Result<T, String>;

pub fn rational(s: &str) -> ParseResult<BigRational> {
    let t = s.trim();
    BigRational::from_str(t).map_err(|_| format!("not a rational number: {s:?}"))
}

pub fn scalar(s: &str, p: u32, prec: i64) -> ParseResult<PadicScalar> {
    let t = s.trim();
    if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 2 {
            return Err(format!("expected two coordinates in {s:?}"));
        }
        let f = Field::quadratic(p);
        let c0 = f.big_rat(&rational(parts[0])?, prec);
        let c1 = f.big_rat(&rational(parts[1])?, prec);
        return Ok(c0.add(&c1.mul(&f.pi(prec))));
    }
    Ok(Field::qp(p).big_rat(&rational(t)?, prec))
}

pub fn smooth_character(s: &str, p: u32, prec: i64) -> ParseResult<SmoothCharacter> {
    let t = s.trim();
    let err = |e: crystab::Error| format!("{s:?}: {e}");
    match t {
        "1" | "trivial" => return Ok(SmoothCharacter::trivial(Field::qp(p), prec)),
        "quadratic" => {
            return SmoothCharacter::from_generator(Field::qp(p).one(prec), 1, &BigInt::from((p - 1) / 2)).map_err(err)
        }
        _ => {}
    }
    if let Some(inner) = t.strip_prefix("ur(").and_then(|r| r.strip_suffix(')')) {
        return SmoothCharacter::unramified(scalar(inner, p, prec)?).map_err(err);
    }
    let mut cond = None;
    let mut gen = None;
    let mut at_p = None;
    for field in t.split(';') {
        let (key, value) = field.split_once(':').ok_or_else(|| format!("malformed character {s:?}"))?;
        match key.trim() {
            "cond" => cond = Some(value.trim().parse::<u32>().map_err(|_| format!("bad conductor in {s:?}"))?),
            "gen" => gen = Some(BigInt::from_str(value.trim()).map_err(|_| format!("bad generator exponent in {s:?}"))?),
            "at_p" => at_p = Some(scalar(value, p, prec)?),
            other => return Err(format!("unknown key {other:?} in {s:?}")),
        }
    }
    match (cond, gen, at_p) {
        (Some(n), Some(j), Some(a)) => SmoothCharacter::from_generator(a, n, &j).map_err(err),
        _ => Err(format!("character {s:?} needs cond, gen and at_p")),
    }
}

pub fn continuous_character(s: &str, p: u32, prec: i64) -> ParseResult<ContinuousCharacter> {
    let t = s.trim();
    if let Some(rest) = t.strip_prefix("x^") {
        let (exp, smooth) = match rest.split_once('*') {
            Some((e, sm)) => (e, Some(sm)),
            None => (rest, None),
        };
        let n: i64 = exp.trim().parse().map_err(|_| format!("bad exponent in {s:?}"))?;
        let smooth = match smooth {
            Some(sm) => smooth_character(sm, p, prec)?,
            None => SmoothCharacter::trivial(Field::qp(p), prec),
        };
        return Ok(ContinuousCharacter::new(smooth, n));
    }
    Ok(ContinuousCharacter::from_smooth(smooth_character(t, p, prec)?))
}

/// Splits at top-level `+`/`-`, keeping the sign with each term.
fn split_terms(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0;
    let mut prev = ' ';
    for ch in s.chars().filter(|c| !c.is_whitespace()) {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
        if (ch == '+' || ch == '-') && depth == 0 && !cur.is_empty() && prev != '^' && prev != '*' {
            out.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
        prev = ch;
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// `(exponent, coefficient)` of one monomial.
fn monomial(term: &str, p: u32, prec: i64) -> ParseResult<(i64, PadicScalar)> {
    let (sign, body) = match term.strip_prefix('-') {
        Some(b) => (-1, b),
        None => (1, term.strip_prefix('+').unwrap_or(term)),
    };
    let (coef, exp) = match body.find('T') {
        None => (body, 0),
        Some(i) => {
            let c = body[..i].trim_end_matches('*');
            let e = match body[i + 1..].strip_prefix('^') {
                Some(e) => e.parse::<i64>().map_err(|_| format!("bad exponent in {term:?}"))?,
                None if body.len() == i + 1 => 1,
                None => return Err(format!("malformed term {term:?}")),
            };
            (c, e)
        }
    };
    let c = if coef.is_empty() { Field::qp(p).one(prec) } else { scalar(coef, p, prec)? };
    Ok((exp, c.mul_i64(sign)))
}

pub fn series(s: &str, p: u32, prec: i64) -> ParseResult<TruncatedSeries> {
    let t = s.trim();
    let mut terms: BTreeMap<i64, PadicScalar> = BTreeMap::new();
    let mut tail = None;
    if t.starts_with('{') {
        let v: Value = serde_json::from_str(t).map_err(|e| format!("bad series JSON: {e}"))?;
        let coeffs = v.get("coeffs").and_then(Value::as_object).ok_or("series JSON needs a coeffs object")?;
        for (k, c) in coeffs {
            let e: i64 = k.parse().map_err(|_| format!("bad exponent key {k:?}"))?;
            let c = c.as_str().ok_or("coefficients must be strings")?;
            terms.insert(e, scalar(c, p, prec)?);
        }
        if let Some(o) = v.get("order") {
            tail = Some(o.as_i64().ok_or("order must be an integer")?);
        }
    } else {
        for term in split_terms(t) {
            let (e, c) = monomial(&term, p, prec)?;
            let acc = match terms.remove(&e) {
                Some(prev) => prev.add(&c),
                None => c,
            };
            terms.insert(e, acc);
        }
    }
    let field = terms.values().map(PadicScalar::field).find(|f| !f.is_base()).unwrap_or(Field::qp(p));
    let lo = terms.keys().next().copied().unwrap_or(0).min(0);
    let hi = terms.keys().next_back().copied().unwrap_or(0).max(tail.unwrap_or(0) - 1);
    let coeffs = (lo..=hi)
        .map(|i| terms.get(&i).map(|c| c.to_field(field)).unwrap_or_else(|| field.zero(prec)))
        .collect();
    TruncatedSeries::new(field, lo, coeffs, tail, prec).map_err(|e| e.to_string())
}

pub fn distribution(s: &str, p: u32, prec: i64) -> ParseResult<LocalDistribution> {
    let v: Value = serde_json::from_str(s.trim()).map_err(|e| format!("bad distribution JSON: {e}"))?;
    let level = v.get("level").and_then(Value::as_u64).ok_or("distribution JSON needs an integer level")? as u32;
    let rows = v.get("entries").and_then(Value::as_array).ok_or("distribution JSON needs an entries array")?;
    let mut entries = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row.as_array().ok_or("each class must be an array of moments")?;
        let mut out = Vec::with_capacity(row.len());
        for c in row {
            out.push(scalar(c.as_str().ok_or("moments must be strings")?, p, prec)?);
        }
        entries.push(out);
    }
    let field = entries.iter().flatten().map(PadicScalar::field).find(|f| !f.is_base()).unwrap_or(Field::qp(p));
    let entries = entries.into_iter().map(|r| r.into_iter().map(|c| c.to_field(field)).collect()).collect();
    LocalDistribution::full(field, level, entries).map_err(|e| e.to_string())
}

/// `a:k` for a pole at `a` of order `k`.
pub fn pole(s: &str, p: u32, prec: i64) -> ParseResult<(PadicScalar, u32)> {
    let (a, k) = match s.rsplit_once(':') {
        Some((a, k)) => (a, k.trim().parse::<u32>().map_err(|_| format!("bad pole order in {s:?}"))?),
        None => (s, 1),
    };
    Ok((scalar(a, p, prec)?, k))
}

pub fn is_integer(q: &BigRational) -> bool {
    q.denom().is_one() || q.numer().is_zero()
}
