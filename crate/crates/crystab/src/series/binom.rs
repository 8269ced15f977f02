//! Exact binomial coefficients with an append-only Pascal-row cache.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::sync::{Arc, RwLock};

static ROWS: RwLock<Vec<Arc<Vec<BigInt>>>> = RwLock::new(Vec::new());

/// Row `n` of Pascal's triangle, `[C(n, 0), …, C(n, n)]`.
pub fn row(n: usize) -> Arc<Vec<BigInt>> {
    if let Some(r) = ROWS.read().expect("cache lock").get(n) {
        return r.clone();
    }
    let mut rows = ROWS.write().expect("cache lock");
    if rows.is_empty() {
        rows.push(Arc::new(vec![BigInt::one()]));
    }
    while rows.len() <= n {
        let prev = rows.last().expect("nonempty").clone();
        let mut next = Vec::with_capacity(prev.len() + 1);
        next.push(BigInt::one());
        for w in prev.windows(2) {
            next.push(&w[0] + &w[1]);
        }
        next.push(BigInt::one());
        rows.push(Arc::new(next));
    }
    rows[n].clone()
}

/// `C(n, k)` for `0 ≤ n`, zero when `k > n`.
pub fn choose(n: usize, k: usize) -> BigInt {
    if k > n {
        BigInt::zero()
    } else {
        row(n)[k].clone()
    }
}

/// `C(a, k)` for a rational `a`, as an exact rational.
pub fn choose_rational(a: &BigRational, k: usize) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..k {
        acc = acc * (a - BigRational::from_integer(BigInt::from(i))) / BigRational::from_integer(BigInt::from(i + 1));
    }
    acc
}

/// `[C(a, 0), …, C(a, n−1)]` for a rational `a`.
pub fn choose_rational_row(a: &BigRational, n: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(n);
    let mut acc = BigRational::one();
    for i in 0..n {
        out.push(acc.clone());
        acc = acc * (a - BigRational::from_integer(BigInt::from(i))) / BigRational::from_integer(BigInt::from(i + 1));
    }
    out
}
