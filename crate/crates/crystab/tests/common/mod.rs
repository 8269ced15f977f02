#![allow(dead_code)]

use crystab::characters::{CharacterPair, SmoothCharacter};
use crystab::padic_core::{Field, PadicScalar};
use num_bigint::BigInt;

pub const PREC: i64 = 30;

/// A value of valuation `twice_val/2`, in the quadratic field when odd.
fn value(p: u32, twice_val: i64, unit: i64) -> PadicScalar {
    if twice_val % 2 == 0 {
        Field::qp(p).int(unit, PREC).mul_int(&BigInt::from(p).pow((twice_val / 2) as u32))
    } else {
        Field::quadratic(p).int(unit, PREC).shift_pi(twice_val)
    }
}

/// The character with `χ(p)^{−1} = value` and tame part `ω^tame`.
pub fn character(p: u32, twice_val: i64, unit: i64, tame: i64) -> SmoothCharacter {
    let at_p = value(p, twice_val, unit).inv().unwrap();
    if tame == 0 {
        SmoothCharacter::unramified(at_p).unwrap()
    } else {
        SmoothCharacter::from_generator(at_p, 1, &BigInt::from(tame)).unwrap()
    }
}

/// Pairs of weight `k` with conductors at most 1, over every split of
/// `k−1` into two valuations (half-integral ones in the quadratic field).
pub fn pair_grid(p: u32, k: u32, include_exceptional: bool) -> Vec<CharacterPair> {
    let total = 2 * (k as i64 - 1);
    let mut out = Vec::new();
    for tb in 1..=total / 2 {
        let ta = total - tb;
        if ta >= total {
            continue;
        }
        for (ua, ub) in [(1i64, 1i64), (1, -1), (2, 1), (-1, 2)] {
            for (ja, jb) in [(0i64, 0i64), (0, 1), (1, 0), (1, 1)] {
                let alpha = character(p, ta, ua, ja);
                let beta = character(p, tb, ub, jb);
                let pair = CharacterPair::new(alpha, beta, k).unwrap();
                if pair.is_exceptional() && !include_exceptional {
                    continue;
                }
                out.push(pair);
            }
        }
    }
    out
}
