//! Refinements of `V_{α,β}`, their torus characters `σ(R)`, the Jacquet
//! exponents of `B(V)_an`, and the comparison of the two dimension counts.
//!
//! Characters of `Q_p^×` and of the abelianised Weil group are identified by
//! the Artin map with `p ↦` geometric Frobenius, so the cyclotomic character
//! is `x|x|` and `ur(c)` sends `p` to `c`.

use std::fmt;

use crate::characters::{CharacterPair, ContinuousCharacter, SmoothCharacter};
use crate::padic_core::{PadicScalar, Q};
use crate::{Error, Result};

/// Which `φ`-eigenvector of `D(α, β)` the period map points at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Eigenvector {
    Alpha,
    Beta,
}

impl fmt::Display for Eigenvector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Eigenvector::Alpha => "e_alpha",
            Eigenvector::Beta => "e_beta",
        })
    }
}

/// A refinement `(η, c, r)`; the period map `r` is carried by its tag.
#[derive(Clone, Debug)]
pub struct Refinement {
    eta: ContinuousCharacter,
    c: PadicScalar,
    tag: Eigenvector,
}

impl Refinement {
    pub fn new(eta: ContinuousCharacter, c: PadicScalar, tag: Eigenvector) -> Result<Self> {
        if !c.val().is_finite() {
            return Err(Error::domain("refinement eigenvalue must be invertible"));
        }
        Ok(Refinement { eta, c, tag })
    }

    pub fn eta(&self) -> &ContinuousCharacter {
        &self.eta
    }
    pub fn c(&self) -> &PadicScalar {
        &self.c
    }
    pub fn tag(&self) -> Eigenvector {
        self.tag
    }

    /// The equivalent refinement `(η·ur(u^{−1}), u·c, u·r)` for a unit `u`.
    pub fn rescale(&self, unit: &PadicScalar) -> Result<Refinement> {
        if unit.val().lower_bound() != Q::from_integer(0) || !unit.val().is_finite() {
            return Err(Error::domain("rescaling factor must be a unit"));
        }
        let eta = self.eta.mul_smooth(&SmoothCharacter::unramified(unit.inv()?)?);
        Refinement::new(eta, unit.mul(&self.c), self.tag)
    }
}

/// A character `first ⊗ second` of the diagonal torus.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusCharacter {
    pub first: ContinuousCharacter,
    pub second: ContinuousCharacter,
}

impl TorusCharacter {
    pub fn new(first: ContinuousCharacter, second: ContinuousCharacter) -> Self {
        TorusCharacter { first, second }
    }

    /// Componentwise product with `a ⊗ b`.
    pub fn twist(&self, a: &ContinuousCharacter, b: &ContinuousCharacter) -> TorusCharacter {
        TorusCharacter { first: self.first.mul(a), second: self.second.mul(b) }
    }
}

impl fmt::Display for TorusCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) ⊗ ({})", self.first, self.second)
    }
}

fn working_prec(pair: &CharacterPair) -> i64 {
    let a = crate::padic_core::val::ceil_q(pair.alpha().at_p().abs_prec());
    let b = crate::padic_core::val::ceil_q(pair.beta().at_p().abs_prec());
    a.min(b).max(1) + pair.k() as i64
}

fn check_non_exceptional(pair: &CharacterPair) -> Result<()> {
    if pair.is_exceptional() {
        return Err(Error::domain("the exceptional pair α = β is not covered"));
    }
    Ok(())
}

fn cont(s: &SmoothCharacter) -> ContinuousCharacter {
    ContinuousCharacter::from_smooth(s.clone())
}

/// The restriction of `s` to `Z_p^×`, extended by `1` at `p`.
fn unit_part(s: &SmoothCharacter, prec: i64) -> SmoothCharacter {
    SmoothCharacter::new(s.field().one(prec), s.tame() as i64, s.wild().clone()).expect("1 is invertible")
}

/// `det V_{α,β} = αβ·x^{k−1}`, i.e. the central character
/// `αβ|x|^{−1}x^{k−2}` times `x|x|`.
pub fn det_v(pair: &CharacterPair) -> ContinuousCharacter {
    ContinuousCharacter::new(pair.alpha().mul(pair.beta()), pair.k() as i64 - 1)
}

/// `x^n·s` for a smooth `s`.
pub fn x_times(s: &SmoothCharacter, n: i64) -> ContinuousCharacter {
    ContinuousCharacter::new(s.clone(), n)
}

/// The refinements `R_α` and `R_β`.
///
/// `η` is `χ^{k−1}` times the restriction of the eigen-character to
/// `Z_p^×`, which is trivial in the crystalline case; the ramified part is
/// needed for `D_cris^+(V(η^{−1}))` to see the eigenline over `Q_p`.
pub fn refinements_of(pair: &CharacterPair) -> Result<[Refinement; 2]> {
    check_non_exceptional(pair)?;
    let prec = working_prec(pair);
    let field = pair.field();
    let k1 = pair.k() as i64 - 1;
    let cyc = SmoothCharacter::norm(field, prec);
    let mut cyc_pow = SmoothCharacter::trivial(field, prec);
    for _ in 0..k1 {
        cyc_pow = cyc_pow.mul(&cyc);
    }
    let chi_k1 = ContinuousCharacter::new(cyc_pow, k1);
    let pk1 = field.int(pair.p() as i64, prec).pow(k1)?;
    let make = |s: &SmoothCharacter, tag| {
        Refinement::new(chi_k1.mul_smooth(&unit_part(s, prec)), s.at_p().mul(&pk1), tag)
    };
    Ok([make(pair.alpha(), Eigenvector::Alpha)?, make(pair.beta(), Eigenvector::Beta)?])
}

/// `σ(R) = η·ur(c) ⊗ (det V)·η^{−1}·ur(c^{−1})`.
pub fn sigma(r: &Refinement, pair: &CharacterPair) -> Result<TorusCharacter> {
    let ur_c = SmoothCharacter::unramified(r.c.clone())?;
    let first = r.eta.mul_smooth(&ur_c);
    let second = det_v(pair).div(&r.eta)?.mul_smooth(&ur_c.inv()?);
    Ok(TorusCharacter::new(first, second))
}

/// Whether `R₂ = (η₁·ur(u^{−1}), u·c₁, u·r₁)` for some unit `u`.
pub fn refinement_equivalent(r1: &Refinement, r2: &Refinement) -> bool {
    if r1.tag != r2.tag {
        return false;
    }
    let Ok(u) = r2.c.div(&r1.c) else {
        return false;
    };
    if !u.val().is_finite() || u.val().lower_bound() != Q::from_integer(0) {
        return false;
    }
    SmoothCharacter::unramified(u)
        .and_then(|ur_u| ur_u.inv())
        .map(|ur_inv| r1.eta.mul_smooth(&ur_inv) == r2.eta)
        .unwrap_or(false)
}

/// Projective dimension of `Ref^σ(V)`: `0` for `σ(R_α)`, `σ(R_β)`, else `−1`.
pub fn dim_ref(pair: &CharacterPair, target: &TorusCharacter) -> Result<i64> {
    Ok(EmertonTables::new(pair)?.dim_ref(target))
}

/// The torus characters in `J_B(B(V)_an)`:
/// `x^{k−2}β ⊗ α|x|^{−1}` and `x^{k−2}α ⊗ β|x|^{−1}`.
pub fn jacquet_exponents(pair: &CharacterPair) -> Result<[TorusCharacter; 2]> {
    check_non_exceptional(pair)?;
    let prec = working_prec(pair);
    let norm_inv = SmoothCharacter::norm(pair.field(), prec).inv()?;
    let k2 = pair.k() as i64 - 2;
    let exp = |a: &SmoothCharacter, b: &SmoothCharacter| {
        TorusCharacter::new(x_times(b, k2), cont(&a.mul(&norm_inv)))
    };
    Ok([exp(pair.alpha(), pair.beta()), exp(pair.beta(), pair.alpha())])
}

/// `x^{−1}α ⊗ x^{k−1}β|x|^{−1}`, the exponent of the middle term of the
/// locally analytic sequence that does not survive in `J_B(B(V)_an)`.
pub fn excluded_exponent(pair: &CharacterPair) -> Result<TorusCharacter> {
    check_non_exceptional(pair)?;
    let prec = working_prec(pair);
    let norm_inv = SmoothCharacter::norm(pair.field(), prec).inv()?;
    Ok(TorusCharacter::new(x_times(pair.alpha(), -1), x_times(&pair.beta().mul(&norm_inv), pair.k() as i64 - 1)))
}

/// Projective dimension of `Exp^δ(B(V)_an ⊗ (x|x|∘det))`.
pub fn dim_exp_twisted(pair: &CharacterPair, delta: &TorusCharacter) -> Result<i64> {
    Ok(EmertonTables::new(pair)?.dim_exp_twisted(delta))
}

/// Both sides of `dim Ref^{η⊗ψ}(V) = dim Exp^{η|x|⊗xψ}(B(V)_an ⊗ (x|x|∘det))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmertonCheck {
    pub lhs: i64,
    pub rhs: i64,
    pub equal: bool,
}

/// The torus characters both sides are read from, computed once per pair.
#[derive(Clone, Debug)]
pub struct EmertonTables {
    sigmas: [TorusCharacter; 2],
    twisted_exponents: [TorusCharacter; 2],
    norm: SmoothCharacter,
    x: ContinuousCharacter,
}

impl EmertonTables {
    pub fn new(pair: &CharacterPair) -> Result<Self> {
        let prec = working_prec(pair);
        let [ra, rb] = refinements_of(pair)?;
        let xa = ContinuousCharacter::x_abs(pair.field(), prec);
        let [ja, jb] = jacquet_exponents(pair)?;
        Ok(EmertonTables {
            sigmas: [sigma(&ra, pair)?, sigma(&rb, pair)?],
            twisted_exponents: [ja.twist(&xa, &xa), jb.twist(&xa, &xa)],
            norm: SmoothCharacter::norm(pair.field(), prec),
            x: ContinuousCharacter::x_power(pair.field(), 1, prec),
        })
    }

    pub fn sigmas(&self) -> &[TorusCharacter; 2] {
        &self.sigmas
    }

    pub fn dim_ref(&self, target: &TorusCharacter) -> i64 {
        if self.sigmas.contains(target) {
            0
        } else {
            -1
        }
    }

    pub fn dim_exp_twisted(&self, delta: &TorusCharacter) -> i64 {
        self.twisted_exponents.iter().filter(|e| *e == delta).count() as i64 - 1
    }

    pub fn check(&self, eta: &ContinuousCharacter, psi: &ContinuousCharacter) -> EmertonCheck {
        let lhs = self.dim_ref(&TorusCharacter::new(eta.clone(), psi.clone()));
        let reindexed = TorusCharacter::new(eta.mul_smooth(&self.norm), psi.mul(&self.x));
        let rhs = self.dim_exp_twisted(&reindexed);
        EmertonCheck { lhs, rhs, equal: lhs == rhs }
    }
}

pub fn verify_emerton(pair: &CharacterPair, eta: &ContinuousCharacter, psi: &ContinuousCharacter) -> Result<EmertonCheck> {
    Ok(EmertonTables::new(pair)?.check(eta, psi))
}

/// Characters `x^j·s` for `s ∈ {1, α, β, αβ}` and `−1 ≤ j ≤ k`.
pub fn test_characters(pair: &CharacterPair) -> Vec<ContinuousCharacter> {
    let prec = working_prec(pair);
    let one = SmoothCharacter::trivial(pair.field(), prec);
    let smooth = [one, pair.alpha().clone(), pair.beta().clone(), pair.alpha().mul(pair.beta())];
    let mut out = Vec::new();
    for s in &smooth {
        for j in -1..=pair.k() as i64 {
            out.push(x_times(s, j));
        }
    }
    out
}

/// A failed sweep cell: `η`, `ψ` and the two dimensions.
pub type SweepFailure = (ContinuousCharacter, ContinuousCharacter, EmertonCheck);

/// Runs [`verify_emerton`] on every `η ⊗ ψ` drawn from [`test_characters`],
/// returning the number of checks and the failures.
pub fn emerton_sweep(pair: &CharacterPair) -> Result<(usize, Vec<SweepFailure>)> {
    let tables = EmertonTables::new(pair)?;
    let chars = test_characters(pair);
    let pairs: Vec<(usize, usize)> = (0..chars.len()).flat_map(|i| (0..chars.len()).map(move |j| (i, j))).collect();
    let results = crate::par::map(&pairs, |&(i, j)| (i, j, tables.check(&chars[i], &chars[j])));
    let mut failures = Vec::new();
    for (i, j, c) in results {
        if !c.equal {
            failures.push((chars[i].clone(), chars[j].clone(), c));
        }
    }
    Ok((pairs.len(), failures))
}
