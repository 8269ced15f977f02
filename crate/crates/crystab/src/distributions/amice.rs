use super::local::{integrate, HigherMoments, LocalDistribution, LocalFunction};
use crate::error::{Error, Result};
use crate::padic_core::scalar::ppow;
use crate::padic_core::val::Q;
use crate::padic_core::{CycloElement, Field, PadicScalar, RootOfUnity, Val};
use crate::series::{rho_exponent, Decay, TruncatedSeries, WindowNorm};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Rows `n` of `[u^i] C(a + p^h u, n)` for every class `a` and `i < M`.
struct BinomialMoments {
    /// `numer[a][i]` of the falling product `∏_{k<n}(a − k + p^h u)`, truncated.
    falling: Vec<Vec<BigInt>>,
    factorial: BigInt,
    rows: Vec<Arc<Vec<Vec<BigRational>>>>,
    /// The same rows reduced into `Q_p`, keyed by relative precision.
    reduced: HashMap<i64, Vec<Arc<ReducedRow>>>,
}

/// `row[a][i]`, or `None` for an exact zero.
type ReducedRow = Vec<Vec<Option<PadicScalar>>>;

type TableKey = (u32, u32, usize);

static TABLES: Mutex<Option<HashMap<TableKey, Arc<Mutex<BinomialMoments>>>>> = Mutex::new(None);

fn table(p: u32, h: u32, degree: usize) -> Arc<Mutex<BinomialMoments>> {
    let mut guard = TABLES.lock().expect("table lock");
    let map = guard.get_or_insert_with(HashMap::new);
    map.entry((p, h, degree))
        .or_insert_with(|| {
            let classes = ppow(p, h).to_usize().expect("small level");
            let mut start = vec![BigInt::zero(); degree];
            start[0] = BigInt::one();
            let row0: Vec<Vec<BigRational>> =
                (0..classes).map(|_| start.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
            Arc::new(Mutex::new(BinomialMoments {
                falling: vec![start; classes],
                factorial: BigInt::one(),
                rows: vec![Arc::new(row0)],
                reduced: HashMap::new(),
            }))
        })
        .clone()
}

fn extend_rows(tb: &mut BinomialMoments, ph: &BigInt, degree: usize, count: usize) {
    while tb.rows.len() < count {
        let k = tb.rows.len() - 1;
        let mut falling = std::mem::take(&mut tb.falling);
        for (a, poly) in falling.iter_mut().enumerate() {
            // multiply by (a − k) + p^h u, dropping degree M
            let c0 = BigInt::from(a as i64 - k as i64);
            for i in (0..degree).rev() {
                let mut v = &poly[i] * &c0;
                if i > 0 {
                    v += &poly[i - 1] * ph;
                }
                poly[i] = v;
            }
        }
        tb.factorial *= k + 1;
        let f = tb.factorial.clone();
        let row = falling
            .iter()
            .map(|poly| poly.iter().map(|x| BigRational::new(x.clone(), f.clone())).collect())
            .collect();
        tb.falling = falling;
        tb.rows.push(Arc::new(row));
    }
}

/// The first `count` rows for level `h` and degree `M`, reduced into `Q_p`
/// with `rel` digits. Reductions are cached, so repeated transforms at one
/// level only pay for small-integer products.
fn binomial_rows(p: u32, h: u32, degree: usize, count: usize, rel: i64) -> Vec<Arc<ReducedRow>> {
    let t = table(p, h, degree);
    let mut tb = t.lock().expect("table lock");
    extend_rows(&mut tb, &ppow(p, h), degree, count);
    let have = tb.reduced.get(&rel).map_or(0, Vec::len);
    if have < count {
        let field = Field::qp(p);
        let fresh: Vec<Arc<ReducedRow>> = tb.rows[have..count]
            .iter()
            .map(|row| {
                let reduced = row
                    .iter()
                    .map(|cls| cls.iter().map(|b| (!b.is_zero()).then(|| field.big_rat_rel(b, rel))).collect())
                    .collect();
                Arc::new(reduced)
            })
            .collect();
        tb.reduced.entry(rel).or_default().extend(fresh);
    }
    tb.reduced[&rel][..count].to_vec()
}

fn vp_factorial(n: usize, p: u32) -> i64 {
    let (mut n, mut s) = (n as i64, 0);
    while n > 0 {
        n /= p as i64;
        s += n;
    }
    s
}

/// The tail bound for the Amice transform of a measure whose higher moments
/// all vanish: `val ∫C(z,n)dμ ≥ base − (M−1)⌊log_p n⌋`.
///
/// On one class `∫f dμ = Σ_i d_i p^{hi} f^{(i)}(a)/i!`, and the `i`-th
/// derivative of `C(x,n)` at an integer is a combination of `C(a,n−j)` with
/// denominators of valuation at most `i⌊log_p n⌋`.
fn full_decay(mu: &LocalDistribution) -> Decay {
    let p = mu.p();
    let h = mu.level() as i64;
    let base = (0..mu.degree())
        .flat_map(|i| {
            mu.entries().iter().map(move |row| {
                row[i].val().lower_bound() + Q::from_integer(h * i as i64 - vp_factorial(i, p))
            })
        })
        .min()
        .expect("nonempty");
    Decay { base, log_slope: Q::from_integer(mu.degree() as i64 - 1) }
}

/// `A(μ) = Σ_n T^n ∫C(z,n)dμ` up to `O(T^order)`.
///
/// Coefficients below `M` are exact on any distribution; beyond that the
/// higher moments must vanish, and the result then carries a decay bound.
pub fn amice(mu: &LocalDistribution, order: usize) -> Result<TruncatedSeries> {
    if order > mu.degree() && !mu.is_full() {
        return Err(Error::degree(format!(
            "order {order} exceeds the {} tracked moments of a distribution with unknown higher moments",
            mu.degree()
        )));
    }
    let p = mu.p();
    let prec = mu.work_prec();
    // enough digits that the products keep every digit of the moments;
    // rounded up so nearby precisions share a cache entry
    let needed = mu.entries().iter().flatten().map(PadicScalar::max_rel_prec).max().unwrap_or(0).max(prec);
    let rel = (needed + 15) / 16 * 16;
    let rows = binomial_rows(p, mu.level(), mu.degree(), order, rel);
    let field = mu.field();
    let coeffs = crate::par::map_range(order, |n| {
        let row = &rows[n];
        let mut acc = field.zero(prec);
        for (a, moments) in mu.entries().iter().enumerate() {
            for (i, d) in moments.iter().enumerate().take(n + 1) {
                if let Some(b) = &row[a][i] {
                    acc = acc.add(&d.mul(b));
                }
            }
        }
        acc
    });
    let s = TruncatedSeries::new(field, 0, coeffs, Some(order as i64), prec)?;
    Ok(if mu.is_full() { s.with_decay(full_decay(mu)) } else { s })
}

/// Both sides of `‖A(μ)‖_{ρ_h} ≤ ‖μ‖_{LA_h} ≤ p‖A(μ)‖_{ρ_{h+1}}` in valuation
/// form, the outer norms read from a window of the transform.
#[derive(Clone, Debug)]
pub struct AmiceNormCheck {
    pub rho_h: WindowNorm,
    pub la_h: WindowNorm,
    pub rho_h1: WindowNorm,
    /// `val‖A‖_{ρ_h} ≥ val‖μ‖_{LA_h}` on the window, a necessary condition.
    pub left_holds: bool,
    /// `val‖μ‖_{LA_h} ≥ val‖A‖_{ρ_{h+1}} − 1`. The window value bounds the
    /// true valuation from above, so this is certified.
    pub right_holds: bool,
}

/// `min_{n ≥ from} (val a_n + r·n)` guaranteed by a decay bound.
fn tail_floor(d: &Decay, p: u32, from: i64, r: Q) -> Q {
    d.tail_min(p, from, |n| r * Q::from_integer(n))
}

fn window(s: &TruncatedSeries, r: Q) -> WindowNorm {
    let (val, _) = s.sup_norm_val(r);
    // The window attains the norm once the certified tail lies strictly above it.
    let complete = match (s.decay(), s.tail(), val) {
        (_, None, _) => true,
        (Some(d), Some(t), Val::Finite(v)) => tail_floor(&d, s.p(), t, r) > v,
        _ => false,
    };
    WindowNorm { val, complete }
}

pub fn amice_norm_check(mu: &LocalDistribution, order: usize) -> Result<AmiceNormCheck> {
    let p = mu.p();
    let h = mu.level();
    let a = amice(mu, order)?;
    let rho_h = window(&a, rho_exponent(p, h));
    let rho_h1 = window(&a, rho_exponent(p, h + 1));
    let la_h = super::local::dist_norm_la(mu);
    let middle = la_h.val.lower_bound();
    let left_holds = rho_h.val.lower_bound() >= middle;
    let right_holds = match rho_h1.val {
        Val::Finite(v) => la_h.val.is_finite() && middle >= v - Q::one(),
        Val::AtLeast(_) => false,
    };
    Ok(AmiceNormCheck { rho_h, la_h, rho_h1, left_holds, right_holds })
}

/// `((d/dT)^j A(μ))(η − 1) = j!·η^{−j}·∫C(z,j)η^z dμ`.
pub fn derivative_at_root(mu: &LocalDistribution, j: usize, eta: &RootOfUnity) -> Result<CycloElement> {
    if eta.order_level() > mu.level() {
        return Err(Error::level(format!(
            "root of order p^{} is not constant on classes of level {}",
            eta.order_level(),
            mu.level()
        )));
    }
    if j >= mu.degree() && mu.higher().iter().any(|h| *h != HigherMoments::Zero) {
        return Err(Error::degree(format!("derivative order {j} needs more than {} moments", mu.degree())));
    }
    let prec = mu.work_prec();
    let f = LocalFunction::binomial(mu.field(), j, mu.level(), prec)?.with_twist(eta.clone());
    let integral = integrate(mu, &f)?;
    let mut fact = BigInt::one();
    for k in 2..=j {
        fact *= k;
    }
    let back = eta.pow(&BigInt::from(-(j as i64))).to_cyclo(mu.field(), prec);
    Ok(integral.scale_int(&fact).mul(&back))
}

/// The same derivative read off the truncated transform, with its tail bound.
pub fn derivative_at_root_via_series(
    mu: &LocalDistribution,
    j: usize,
    eta: &RootOfUnity,
    order: usize,
) -> Result<CycloElement> {
    let a = amice(mu, order)?;
    let prec = mu.work_prec();
    let z = eta.to_cyclo(mu.field(), prec).sub(&CycloElement::one(mu.field(), eta.level(), prec));
    a.eval_derivative(j as u32, &z)
}
