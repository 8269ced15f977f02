use crate::characters::ContinuousCharacter;
use crate::error::{Error, Result};
use crate::padic_core::val::Q;
use num_traits::{One, Zero};
use std::fmt;

/// A triangulation datum `(δ₁, δ₂, h̄)`; only whether `h̄ = ∞` is recorded.
#[derive(Clone, Debug)]
pub struct TriangulationParams {
    pub delta1: ContinuousCharacter,
    pub delta2: ContinuousCharacter,
    pub h_bar_infinite: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriangulationClass {
    /// Non-geometric.
    Ng,
    /// Crystalline.
    Cris,
    /// Semistable, not crystalline.
    St,
    None,
}

impl fmt::Display for TriangulationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriangulationClass::Ng => "NG",
            TriangulationClass::Cris => "CRIS",
            TriangulationClass::St => "ST",
            TriangulationClass::None => "NONE",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub class: TriangulationClass,
    pub u: Q,
    pub w: Q,
}

/// The class from the invariants `u = val δ₁(p)` and `w = w(δ₁) − w(δ₂)`.
pub fn classify_uw(u: Q, w: Q, h_bar_infinite: bool) -> TriangulationClass {
    let integral_w = w.is_integer() && w >= Q::one();
    if !integral_w {
        return if u > Q::zero() { TriangulationClass::Ng } else { TriangulationClass::None };
    }
    if u > Q::zero() && u < w {
        if h_bar_infinite {
            TriangulationClass::Cris
        } else {
            TriangulationClass::St
        }
    } else {
        TriangulationClass::None
    }
}

/// Requires `val δ₁(p) + val δ₂(p) = 0` and `val δ₁(p) ≥ 0`.
pub fn classify_triangulation(s: &TriangulationParams) -> Result<Classification> {
    let v1 = s.delta1.value_at_p().val().finite();
    let v2 = s.delta2.value_at_p().val().finite();
    let (Some(v1), Some(v2)) = (v1, v2) else {
        return Err(Error::precision("values at p have undetermined valuation"));
    };
    if !(v1 + v2).is_zero() || v1 < Q::zero() {
        return Err(Error::domain("need val δ₁(p) + val δ₂(p) = 0 and val δ₁(p) ≥ 0"));
    }
    let w = s.delta1.weight() - s.delta2.weight();
    Ok(Classification { class: classify_uw(v1, w, s.h_bar_infinite), u: v1, w })
}
