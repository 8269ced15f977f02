//! Small dense linear algebra over `L`.

use super::scalar::PadicScalar;
use super::val::Val;
use crate::error::{Error, Result};

/// Determinant by elimination with minimal-valuation pivoting.
pub fn det(mut a: Vec<Vec<PadicScalar>>) -> Result<PadicScalar> {
    let n = a.len();
    if n == 0 {
        return Err(Error::domain("empty matrix"));
    }
    let field = a[0][0].field();
    let mut sign_neg = false;
    let mut acc: Option<PadicScalar> = None;
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| a[r][col].val().is_finite())
            .min_by_key(|&r| a[r][col].val().lower_bound());
        let Some(pr) = pivot else {
            let bound = (col..n).map(|r| a[r][col].abs_prec()).min().expect("rows");
            return Ok(field.zero(super::val::ceil_q(bound)));
        };
        if pr != col {
            a.swap(pr, col);
            sign_neg = !sign_neg;
        }
        let piv = a[col][col].clone();
        let inv = piv.inv()?;
        for r in col + 1..n {
            if matches!(a[r][col].val(), Val::AtLeast(_)) && a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].mul(&inv);
            for c in col..n {
                let t = factor.mul(&a[col][c]);
                a[r][c] = a[r][c].sub(&t);
            }
        }
        acc = Some(match acc {
            None => piv,
            Some(s) => s.mul(&piv),
        });
    }
    let d = acc.expect("n > 0");
    Ok(if sign_neg { d.neg() } else { d })
}
