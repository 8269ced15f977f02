use super::binom;
use super::truncated::TruncatedSeries;
use crate::error::{Error, Result};
use crate::padic_core::val::Q;
use crate::padic_core::{PadicScalar, Val};

/// Taylor coefficients `g^{(t)}(a)/t!` for `t < count`.
fn taylor_at(g: &TruncatedSeries, a: &PadicScalar, count: usize) -> Result<Vec<PadicScalar>> {
    let va = a.val().lower_bound();
    let mut out = Vec::with_capacity(count);
    for t in 0..count {
        let mut acc = g.field().zero(g.prec());
        let mut pw = g.field().one(g.prec());
        for n in t as i64..g.i_end() {
            let c = g.coeff(n)?.mul_int(&binom::choose(n as usize, t));
            acc = acc.add(&c.mul(&pw));
            pw = pw.mul(a);
        }
        if let Some(tail) = g.tail() {
            let d = g.decay().ok_or_else(|| Error::precision("truncated numerator without a decay bound"))?;
            let floor = d.tail_min(g.p(), tail.max(t as i64), |n| Q::from_integer(n - t as i64) * va);
            acc = acc.cap_prec(floor);
        }
        out.push(acc);
    }
    Ok(out)
}

/// `res_0(g / ∏(T − a_i)^{k_i} dT)` for a power series `g` and distinct
/// poles with `|a_i| < 1`, as the sum of the residues at the poles.
///
/// The residue at `a_i` is the coefficient of `s^{k_i−1}` in
/// `g(a_i + s)·∏_{j≠i}(a_i − a_j + s)^{−k_j}`.
pub fn partial_fraction_residue(g: &TruncatedSeries, poles: &[(PadicScalar, u32)]) -> Result<PadicScalar> {
    if !g.is_power_series() {
        return Err(Error::domain("numerator must be a power series"));
    }
    for (a, k) in poles {
        if *k == 0 {
            return Err(Error::domain("pole orders must be positive"));
        }
        match a.val() {
            Val::Finite(v) if v > Q::from_integer(0) => {}
            Val::Finite(_) => return Err(Error::domain("poles must satisfy |a| < 1")),
            Val::AtLeast(b) if b > Q::from_integer(0) => {}
            Val::AtLeast(_) => return Err(Error::precision("cannot decide whether |a| < 1")),
        }
    }
    let mut total = g.field().zero(g.prec());
    for (i, (a, k)) in poles.iter().enumerate() {
        let k = *k as usize;
        let taylor = taylor_at(g, a, k)?;
        // ∏_{j≠i} (d_j + s)^{−k_j} up to s^{k−1}
        let mut prod: Vec<PadicScalar> = (0..k)
            .map(|t| if t == 0 { g.field().one(g.prec()) } else { g.field().zero(g.prec()) })
            .collect();
        for (j, (b, kj)) in poles.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = a.sub(b);
            if !d.val().is_finite() {
                return Err(Error::domain("poles are not distinct at tracked precision"));
            }
            let dinv = d.inv()?;
            let kj = *kj as usize;
            // (d + s)^{−kj} = d^{−kj} Σ_t (−1)^t C(kj+t−1, t) d^{−t} s^t
            let base = dinv.pow(kj as i64)?;
            let mut factor = Vec::with_capacity(k);
            let mut dpow = base;
            for t in 0..k {
                let c = binom::choose(kj + t - 1, t);
                let c = if t % 2 == 0 { c } else { -c };
                factor.push(dpow.mul_int(&c));
                dpow = dpow.mul(&dinv);
            }
            prod = (0..k)
                .map(|n| {
                    let mut s = g.field().zero(g.prec());
                    for t in 0..=n {
                        s = s.add(&prod[t].mul(&factor[n - t]));
                    }
                    s
                })
                .collect();
        }
        for t in 0..k {
            total = total.add(&taylor[t].mul(&prod[k - 1 - t]));
        }
    }
    Ok(total)
}
