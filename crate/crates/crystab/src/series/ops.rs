use super::binom;
use super::truncated::TruncatedSeries;
use crate::error::{Error, Result};
use crate::padic_core::scalar::{ppow, val_int};
use crate::padic_core::val::{ceil_q, Q};
use crate::padic_core::{Field, PadicScalar, Val};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

/// A finite sum `Σ b_j (1+T)^j` with `j ∈ Z`.
///
/// This is the basis in which `φ`, `ψ` and `Γ` act by relabelling exponents.
#[derive(Clone, Debug)]
pub struct UnitPolynomial {
    field: Field,
    prec: i64,
    terms: BTreeMap<i64, PadicScalar>,
}

impl UnitPolynomial {
    pub fn new(field: Field, prec: i64) -> Self {
        UnitPolynomial { field, prec, terms: BTreeMap::new() }
    }

    /// Rewrites an exact polynomial via `T^n = Σ_j C(n,j)(−1)^{n−j}(1+T)^j`.
    pub fn from_series(f: &TruncatedSeries) -> Result<Self> {
        if !f.is_exact() {
            return Err(Error::precision("exact polynomial required for the (1+T)-basis"));
        }
        if !f.is_power_series() {
            return Err(Error::domain("Laurent terms have no finite (1+T)-expansion"));
        }
        let mut out = Self::new(f.field(), f.prec());
        for n in f.i_min().max(0)..f.i_end() {
            let c = f.coeff(n)?;
            if c.is_zero() && ceil_q(c.abs_prec()) >= f.prec() {
                continue;
            }
            let row = binom::row(n as usize);
            for (j, b) in row.iter().enumerate() {
                let t = if (n as usize - j).is_multiple_of(2) { c.mul_int(b) } else { c.mul_int(&-b) };
                out.add_term(j as i64, t);
            }
        }
        Ok(out)
    }

    pub fn add_term(&mut self, j: i64, c: PadicScalar) {
        let e = self.terms.entry(j).or_insert_with(|| self.field.zero(self.prec));
        *e = e.add(&c);
    }

    pub fn terms(&self) -> &BTreeMap<i64, PadicScalar> {
        &self.terms
    }

    fn relabel(&self, f: impl Fn(i64) -> Option<i64>) -> Self {
        let mut out = Self::new(self.field, self.prec);
        for (&j, c) in &self.terms {
            if let Some(k) = f(j) {
                out.add_term(k, c.clone());
            }
        }
        out
    }

    /// Multiplication by `(1+T)^i`.
    pub fn shift(&self, i: i64) -> Self {
        self.relabel(|j| Some(j + i))
    }

    pub fn phi(&self) -> Self {
        let p = self.field.p() as i64;
        self.relabel(|j| Some(j * p))
    }

    pub fn psi(&self) -> Self {
        let p = self.field.p() as i64;
        self.relabel(|j| if j.rem_euclid(p) == 0 { Some(j / p) } else { None })
    }

    /// `γ_a` for an integer `a`.
    pub fn gamma(&self, a: i64) -> Self {
        self.relabel(|j| Some(j * a))
    }

    /// Back to the `T`-basis; exact when every exponent is nonnegative,
    /// otherwise truncated at `O(T^order)`.
    pub fn to_series(&self, order: i64) -> TruncatedSeries {
        if self.terms.keys().all(|&j| j >= 0) {
            let deg = self.terms.keys().next_back().copied().unwrap_or(0) as usize;
            let mut acc = vec![self.field.zero(self.prec); deg + 1];
            for (&j, c) in &self.terms {
                for (k, b) in binom::row(j as usize).iter().enumerate() {
                    acc[k] = acc[k].add(&c.mul_int(b));
                }
            }
            return TruncatedSeries::polynomial(self.field, acc, self.prec);
        }
        let mut acc = TruncatedSeries::zero(self.field, self.prec).truncate(order);
        for (&j, c) in &self.terms {
            let e = TruncatedSeries::one_plus_t_pow(self.field, &BigRational::from_integer(j.into()), order, self.prec);
            acc = acc.add(&e.scale(c));
        }
        acc
    }
}

/// `φ(T) = (1+T)^p − 1` as an exact polynomial.
pub fn phi_of_t(field: Field, prec: i64) -> TruncatedSeries {
    let p = field.p() as usize;
    let row = binom::row(p);
    let mut c: Vec<PadicScalar> = row.iter().map(|b| field.big(b, prec)).collect();
    c[0] = field.zero(prec);
    TruncatedSeries::polynomial(field, c, prec)
}

/// `φ(f) = f((1+T)^p − 1)` for a power series `f`; the tail is preserved.
pub fn frobenius_phi(f: &TruncatedSeries) -> Result<TruncatedSeries> {
    f.compose(&phi_of_t(f.field(), f.prec()))
}

fn check_unit(a: &BigRational, p: u32) -> Result<()> {
    if a.is_zero() || val_int(a.numer(), p) != 0 || val_int(a.denom(), p) != 0 {
        return Err(Error::domain(format!("{a} is not a p-adic unit")));
    }
    Ok(())
}

/// `γ_a(f) = f((1+T)^a − 1)` for a unit `a ∈ Z_(p)`, up to `O(T^order)`.
///
/// The result is exact when `f` is an exact polynomial, `a` is a
/// nonnegative integer and `a·deg f < order`.
pub fn gamma_act(a: &BigRational, f: &TruncatedSeries, order: i64) -> Result<TruncatedSeries> {
    let field = f.field();
    let prec = f.prec();
    check_unit(a, field.p())?;
    let deg = f.i_end() - 1;
    let exact = f.is_exact()
        && f.is_power_series()
        && a.is_integer()
        && !a.is_negative()
        && a.to_integer().to_i64().is_some_and(|a| a.saturating_mul(deg.max(0)) < order);
    let g = TruncatedSeries::one_plus_t_pow(field, a, order, prec).sub(&TruncatedSeries::one(field, prec));
    let g = if exact { g } else { g.truncate(order) };
    let pos_part = {
        let c: Vec<PadicScalar> = (0..f.i_end().max(0)).map(|i| f.coeff(i)).collect::<Result<_>>()?;
        let s = TruncatedSeries::polynomial(field, c, prec);
        match f.tail() {
            Some(t) => s.truncate(t),
            None => s,
        }
    };
    let mut out = pos_part.compose(&g)?;
    if !exact {
        out = out.truncate(order);
    }
    if f.i_min() < 0 {
        // Each factor of g^{−1} costs one term of tail in g^{−k}.
        let long = order - f.i_min() + 2;
        let g = TruncatedSeries::one_plus_t_pow(field, a, long, prec)
            .sub(&TruncatedSeries::one(field, prec))
            .truncate(long);
        let ginv = g.inverse(order - f.i_min())?;
        let mut pw = ginv.clone();
        for i in (f.i_min()..0).rev() {
            let c = f.coeff(i)?;
            out = out.add(&pw.scale(&c).truncate(order));
            pw = pw.mul(&ginv);
        }
    }
    Ok(out)
}

type PsiRows = Vec<Arc<Vec<BigInt>>>;

static PSI_ROWS: RwLock<BTreeMap<u32, PsiRows>> = RwLock::new(BTreeMap::new());

/// `ψ(T^n) = Σ_q C(n, pq)(−1)^{n−pq}(1+T)^q`, as integer coefficients in `T`.
pub fn psi_row(p: u32, n: usize) -> Arc<Vec<BigInt>> {
    if let Some(r) = PSI_ROWS.read().expect("psi cache").get(&p).and_then(|rows| rows.get(n)) {
        return r.clone();
    }
    let mut guard = PSI_ROWS.write().expect("psi cache");
    let rows = guard.entry(p).or_default();
    let pu = p as usize;
    while rows.len() <= n {
        let m = rows.len();
        let row_n = binom::row(m);
        let mut out = vec![BigInt::zero(); m / pu + 1];
        for q in 0..=m / pu {
            let c = &row_n[pu * q];
            let c = if (m - pu * q).is_multiple_of(2) { c.clone() } else { -c };
            for (k, b) in binom::row(q).iter().enumerate() {
                out[k] += &c * b;
            }
        }
        rows.push(Arc::new(out));
    }
    rows[n].clone()
}

/// `ψ(f)`: keep the `(1+T)^{pj}` components of `f` and send them to `(1+T)^j`.
///
/// Exact on exact polynomials. A truncated power series needs a decay bound;
/// coefficient `k` then loses precision to
/// `min_{n ≥ tail}(base − s⌊log_p n⌋ + max(0, ⌊n/p⌋ − k))`, using
/// `val [T^k]ψ(T^n) ≥ ⌊n/p⌋ − k`.
pub fn psi(f: &TruncatedSeries) -> Result<TruncatedSeries> {
    let p = f.field().p() as i64;
    let order = match f.tail() {
        Some(t) => (t + p - 1) / p,
        None => f.i_end() / p + 1,
    };
    psi_to_order(f, order)
}

/// The first `order` coefficients of `ψ(f)`.
pub fn psi_to_order(f: &TruncatedSeries, order: i64) -> Result<TruncatedSeries> {
    if !f.is_power_series() {
        return Err(Error::domain("psi is implemented on power series"));
    }
    let field = f.field();
    let p = field.p() as i64;
    let decay = match f.tail() {
        None => None,
        Some(_) => Some(
            f.decay()
                .ok_or_else(|| Error::precision("psi of a truncated series needs a decay bound"))?,
        ),
    };
    let end = f.tail().map_or(f.i_end(), |t| t.min(f.i_end()));
    let out_order = match f.tail() {
        Some(t) => order.min((t + p - 1) / p),
        None => order.min(f.i_end() / p + 1),
    }
    .max(0) as usize;
    let mut acc = vec![field.zero(f.prec()); out_order];
    for n in 0..end.max(0) {
        let a = f.coeff(n)?;
        if a.is_zero() && ceil_q(a.abs_prec()) >= f.prec() {
            continue;
        }
        let row = psi_row(p as u32, n as usize);
        for (k, b) in row.iter().enumerate().take(out_order) {
            acc[k] = acc[k].add(&a.mul_int(b));
        }
    }
    match (f.tail(), decay) {
        (Some(tail), Some(d)) => {
            for (k, c) in acc.iter_mut().enumerate() {
                let k = k as i64;
                let floor = d.tail_min(p as u32, tail, |n| Q::from_integer((n / p - k).max(0)));
                *c = c.cap_prec(floor);
            }
            TruncatedSeries::new(field, 0, acc, Some(out_order as i64), f.prec())
        }
        _ if (out_order as i64) < f.i_end() / p + 1 => {
            TruncatedSeries::new(field, 0, acc, Some(out_order as i64), f.prec())
        }
        _ => Ok(TruncatedSeries::polynomial(field, acc, f.prec())),
    }
}

/// `Res_{i + p^n Z_p}(f) = (1+T)^i φ^n ψ^n ((1+T)^{−i} f)` on an exact polynomial.
pub fn res_restrict(f: &TruncatedSeries, i: &BigInt, n: u32) -> Result<TruncatedSeries> {
    let modulus = ppow(f.p(), n);
    let i = i.mod_floor(&modulus).to_i64().ok_or_else(|| Error::domain("level too large"))?;
    let mut u = UnitPolynomial::from_series(f)?.shift(-i);
    for _ in 0..n {
        u = u.psi();
    }
    for _ in 0..n {
        u = u.phi();
    }
    Ok(u.shift(i).to_series(0))
}

/// `res_0(f dT) = a_{−1}`.
pub fn residue_at_zero(f: &TruncatedSeries) -> Result<PadicScalar> {
    f.coeff(-1)
}

/// A norm read from a finite window, in valuation form: `‖f‖ = p^{−val}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowNorm {
    pub val: Val,
    /// `true` when the window is the whole series, so the value is exact;
    /// otherwise it bounds the norm from below.
    pub complete: bool,
}

/// `‖f‖_r = sup_i |a_i| p^{−ri}`, as `min_i(val a_i + r·i)`.
pub fn sup_norm_r(f: &TruncatedSeries, r: Q) -> WindowNorm {
    let (val, complete) = f.sup_norm_val(r);
    WindowNorm { val, complete }
}

/// `‖f‖_{ρ_h}` with `ρ_h = p^{−1/((p−1)p^h)}`.
pub fn rho_norm(f: &TruncatedSeries, h: u32) -> WindowNorm {
    let p = f.p() as i64;
    sup_norm_r(f, rho_exponent(p as u32, h))
}

/// The exponent `r` with `ρ_h = p^{−r}`.
pub fn rho_exponent(p: u32, h: u32) -> Q {
    Q::new(1, (p as i64 - 1) * (p as i64).pow(h))
}

/// `log(1+T) = Σ_{n=1}^{N} (−1)^{n+1} T^n / n`, up to `O(T^{N+1})`.
pub fn log_one_plus_t(field: Field, n: i64, prec: i64) -> TruncatedSeries {
    let mut c = vec![field.zero(prec)];
    for k in 1..=n {
        let s = if k % 2 == 1 { 1 } else { -1 };
        c.push(field.rat(s, k, prec));
    }
    TruncatedSeries::new(field, 0, c, Some(n + 1), prec).expect("nonnegative exponents")
}
