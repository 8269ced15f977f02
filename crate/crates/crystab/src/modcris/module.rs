use crate::characters::{gauss_sum, CharacterPair, SmoothCharacter};
use crate::error::{Error, Result};
use crate::padic_core::scalar::ppow;
use crate::padic_core::val::{ceil_q, Q};
use crate::padic_core::{CycloElement, PadicScalar, RootOfUnity, Val};

/// A two-step filtration on a rank-2 module over `L_n`: everything for
/// `i ≤ full_to`, the line for `full_to < i ≤ line_to`, zero above.
#[derive(Clone, Debug)]
pub struct Filtration {
    pub full_to: i64,
    pub line_to: i64,
    /// Coordinates of the middle line in the module basis, over `L_n`.
    pub line: [CycloElement; 2],
}

impl Filtration {
    /// The jump indices, lower first.
    pub fn jumps(&self) -> (i64, i64) {
        (self.full_to, self.line_to)
    }
}

/// A rank-2 filtered `(φ, Γ)`-module over `L` with basis `(e₁, e₂)`.
///
/// `phi[i][j]` is the `e_i`-coordinate of `φ(e_j)`; `Γ` acts on `e_j`
/// through the restriction of `gamma[j]` to `Z_p^×`.
#[derive(Clone, Debug)]
pub struct FilteredPhiModule {
    phi: [[PadicScalar; 2]; 2],
    gamma: [SmoothCharacter; 2],
    fil: Filtration,
    level: u32,
}

fn finite(v: Val) -> Result<Q> {
    v.finite().ok_or_else(|| Error::precision("valuation is not determined at the tracked precision"))
}

/// `a₁b₂ − a₂b₁`, zero exactly when the two vectors are proportional.
fn cross(a: &[CycloElement; 2], b: &[CycloElement; 2]) -> CycloElement {
    a[0].mul(&b[1]).sub(&a[1].mul(&b[0]))
}

impl FilteredPhiModule {
    pub fn new(
        phi: [[PadicScalar; 2]; 2],
        gamma: [SmoothCharacter; 2],
        fil: Filtration,
        level: u32,
    ) -> Result<Self> {
        if fil.full_to > fil.line_to {
            return Err(Error::domain("filtration jumps out of order"));
        }
        if fil.line.iter().all(|c| c.is_zero()) {
            return Err(Error::domain("the middle filtration step must be a line"));
        }
        Ok(FilteredPhiModule { phi, gamma, fil, level })
    }

    pub fn phi(&self) -> &[[PadicScalar; 2]; 2] {
        &self.phi
    }
    pub fn gamma(&self) -> &[SmoothCharacter; 2] {
        &self.gamma
    }
    pub fn filtration(&self) -> &Filtration {
        &self.fil
    }
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn det_phi(&self) -> PadicScalar {
        self.phi[0][0].mul(&self.phi[1][1]).sub(&self.phi[0][1].mul(&self.phi[1][0]))
    }

    /// `t_N(D) = val det φ`.
    pub fn t_newton(&self) -> Result<Q> {
        finite(self.det_phi().val())
    }

    /// `t_H(D)`, the sum of the jump indices.
    pub fn t_hodge(&self) -> Q {
        Q::from_integer(self.fil.full_to + self.fil.line_to)
    }

    fn line_in_level(&self, v: &[PadicScalar; 2]) -> [CycloElement; 2] {
        [CycloElement::from_scalar(&v[0], self.level), CycloElement::from_scalar(&v[1], self.level)]
    }
}

/// `D(α, β)` over `L_n`: `φ = diag(α(p), β(p))` with the middle filtration
/// line `e_α + G(αβ^{−1})e_β` when `α ≠ β`, and `φ(e_β) = β(p)(e_β − e_α)`
/// with middle line `e_β` when `α = β`. Jumps sit at `−(k−1)` and `0`.
#[allow(non_snake_case)]
pub fn build_D(pair: &CharacterPair, n: u32) -> Result<FilteredPhiModule> {
    let need = pair.alpha().conductor().max(pair.beta().conductor());
    if n < need {
        return Err(Error::level(format!("the filtration needs level at least {need}, got {n}")));
    }
    let field = pair.field();
    let a = pair.alpha().at_p().to_field(field);
    let b = pair.beta().at_p().to_field(field);
    let prec = ceil_q(a.abs_prec().min(b.abs_prec())).max(1);
    let zero = field.zero(prec);
    let k = pair.k() as i64;
    let gamma = [pair.alpha().clone(), pair.beta().clone()];
    let (phi, line) = if pair.is_exceptional() {
        (
            [[a.clone(), b.neg()], [zero.clone(), b.clone()]],
            [CycloElement::zero(field, n, prec), CycloElement::one(field, n, prec)],
        )
    } else {
        let g = standard_gauss_sum(&pair.alpha().div(pair.beta())?, prec)?.embed(n);
        ([[a, zero.clone()], [zero, b]], [CycloElement::one(field, n, prec), g])
    };
    FilteredPhiModule::new(phi, gamma, Filtration { full_to: -(k - 1), line_to: 0, line }, n)
}

/// `G(τ) = G(τ, ε^{(m)})` for `τ` of conductor `m`, and `1` when unramified.
pub fn standard_gauss_sum(tau: &SmoothCharacter, prec: i64) -> Result<CycloElement> {
    let m = tau.conductor();
    gauss_sum(tau, &RootOfUnity::new_i64(tau.p(), m, 1), prec)
}

/// One candidate sub-object and its two invariants.
#[derive(Clone, Debug)]
pub struct LineCheck {
    pub vector: [PadicScalar; 2],
    pub t_newton: Q,
    pub t_hodge: Q,
}

#[derive(Clone, Debug)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub irreducible: bool,
    pub t_newton: Q,
    pub t_hodge: Q,
    pub lines: Vec<LineCheck>,
    /// Lines with `t_H > t_N` (admissibility failures) or `t_H = t_N`
    /// (reducibility witnesses).
    pub witnesses: Vec<LineCheck>,
    /// Set when `φ` is not semisimple, where the verdict rests on the
    /// stated Newton/Hodge convention.
    pub convention_dependent: bool,
}

/// A line's spanning vector and its `φ`-eigenvalue.
type EigenLine = ([PadicScalar; 2], PadicScalar);

/// The `(φ, Γ)`-stable lines of `D` defined over `L`, each with its
/// `φ`-eigenvalue. `None` means every line is stable.
fn stable_lines(d: &FilteredPhiModule) -> Result<Option<Vec<EigenLine>>> {
    let m = &d.phi;
    let field = m[0][0].field();
    let prec = ceil_q(d.det_phi().abs_prec()).max(1);
    let (one, zero) = (field.one(prec), field.zero(prec));
    let e1 = [one.clone(), zero.clone()];
    let e2 = [zero.clone(), one.clone()];
    let lower = m[1][0].is_zero();
    let upper = m[0][1].is_zero();
    let phi_lines: Option<Vec<EigenLine>> = match (lower, upper) {
        (true, true) if m[0][0].eq_at_prec(&m[1][1]) => None,
        (true, true) => Some(vec![(e1.clone(), m[0][0].clone()), (e2.clone(), m[1][1].clone())]),
        (true, false) => {
            let diff = m[1][1].sub(&m[0][0]);
            let mut v = vec![(e1.clone(), m[0][0].clone())];
            if !diff.is_zero() {
                v.push(([m[0][1].clone(), diff], m[1][1].clone()));
            }
            Some(v)
        }
        (false, true) => {
            let diff = m[0][0].sub(&m[1][1]);
            let mut v = vec![(e2.clone(), m[1][1].clone())];
            if !diff.is_zero() {
                v.push(([diff, m[1][0].clone()], m[0][0].clone()));
            }
            Some(v)
        }
        (false, false) => {
            return Err(Error::domain("φ must be triangular in the given basis to enumerate its stable lines"));
        }
    };
    let same_gamma = d.gamma[0].tame() == d.gamma[1].tame() && d.gamma[0].wild() == d.gamma[1].wild();
    let is_axis = |v: &[PadicScalar; 2]| v[0].is_zero() || v[1].is_zero();
    Ok(match phi_lines {
        Some(lines) if same_gamma => Some(lines),
        Some(lines) => Some(lines.into_iter().filter(|(v, _)| is_axis(v)).collect()),
        None if same_gamma => None,
        None => Some(vec![(e1, m[0][0].clone()), (e2, m[1][1].clone())]),
    })
}

/// Weak admissibility (`t_H(D) = t_N(D)` and `t_H(ℓ) ≤ t_N(ℓ)` on every
/// stable line) and irreducibility (strict inequality on every line).
///
/// `t_N(ℓ)` is the valuation of the `φ`-eigenvalue on `ℓ`; `t_H(ℓ)` is the
/// upper jump if `L_n⊗ℓ` is the middle filtration step and the lower jump
/// otherwise.
pub fn weakly_admissible_irreducible(d: &FilteredPhiModule) -> Result<AdmissibilityReport> {
    let t_newton = d.t_newton()?;
    let t_hodge = d.t_hodge();
    let (lo, hi) = d.fil.jumps();
    let field = d.phi[0][0].field();
    let prec = ceil_q(d.det_phi().abs_prec()).max(1);
    let lines = match stable_lines(d)? {
        Some(lines) => lines,
        None => {
            // every line is stable; the middle step (if L-rational) and one other line cover all cases
            let lam = d.phi[0][0].clone();
            let mut v = Vec::new();
            if let (Some(x), Some(y)) = (d.fil.line[0].as_scalar(), d.fil.line[1].as_scalar()) {
                v.push(([x, y], lam.clone()));
            }
            let axis = if d.fil.line[1].is_zero() {
                [field.zero(prec), field.one(prec)]
            } else {
                [field.one(prec), field.zero(prec)]
            };
            v.push((axis, lam));
            v
        }
    };
    let mut checks = Vec::with_capacity(lines.len());
    for (v, lam) in lines {
        let on_fil = cross(&d.line_in_level(&v), &d.fil.line).is_zero();
        let th = Q::from_integer(if on_fil { hi } else { lo });
        checks.push(LineCheck { vector: v, t_newton: finite(lam.val())?, t_hodge: th });
    }
    let admissible = t_newton == t_hodge && checks.iter().all(|c| c.t_hodge <= c.t_newton);
    let irreducible = admissible && checks.iter().all(|c| c.t_hodge < c.t_newton);
    let witnesses = checks.iter().filter(|c| c.t_hodge >= c.t_newton).cloned().collect();
    let convention_dependent = !d.phi[0][1].is_zero() || !d.phi[1][0].is_zero();
    Ok(AdmissibilityReport {
        admissible,
        irreducible,
        t_newton,
        t_hodge,
        lines: checks,
        witnesses,
        convention_dependent,
    })
}

/// The Hom-dual, its twist, and the comparison with `D` of the dual pair.
#[derive(Clone, Debug)]
pub struct DualReport {
    /// `Hom(D(α,β), L)` in the dual basis `(e'_α, e'_β)`.
    pub dual: FilteredPhiModule,
    /// The `(k−1)`-twist of the dual in the basis `(−e'_β, e'_α)`.
    pub twisted: FilteredPhiModule,
    /// `(β^{−1}|x|^{k−1}, α^{−1}|x|^{k−1})`.
    pub dual_pair: CharacterPair,
    pub target: FilteredPhiModule,
    pub mismatches: Vec<String>,
}

fn inverse_transpose(m: &[[PadicScalar; 2]; 2]) -> Result<[[PadicScalar; 2]; 2]> {
    let det = m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0]));
    let inv = det.inv()?;
    // (M^{-1})^T = (1/det)[[d, −c], [−b, a]]
    Ok([
        [m[1][1].mul(&inv), m[1][0].neg().mul(&inv)],
        [m[0][1].neg().mul(&inv), m[0][0].mul(&inv)],
    ])
}

/// Dualizes `D(α, β)`, twists by `k−1`, and compares the result, through
/// `−e'_β ↦ e_{β^{−1}|x|^{k−1}}` and `e'_α ↦ e_{α^{−1}|x|^{k−1}}`, with
/// `D(β^{−1}|x|^{k−1}, α^{−1}|x|^{k−1})`.
///
/// The dual filtration is `Fil^i = (Fil^{1−i})^⊥`; the twist multiplies `φ`
/// by `p^{−(k−1)}`, lowers the jumps by `k−1`, and leaves `Γ` unchanged.
pub fn dual_twist(pair: &CharacterPair, n: u32) -> Result<DualReport> {
    let d = build_D(pair, n)?;
    let p = pair.p();
    let k = pair.k() as i64;
    let field = pair.field();
    let prec = ceil_q(d.det_phi().abs_prec()).max(1);

    let phi_dual = inverse_transpose(&d.phi)?;
    let gamma_dual = [d.gamma[0].inv()?, d.gamma[1].inv()?];
    // functionals killing a·e₁ + b·e₂ are spanned by b·e'₁ − a·e'₂
    let [a, b] = &d.fil.line;
    let fil_dual = Filtration { full_to: -d.fil.line_to, line_to: -d.fil.full_to, line: [b.clone(), a.neg()] };
    let dual = FilteredPhiModule::new(phi_dual.clone(), gamma_dual.clone(), fil_dual.clone(), n)?;

    let twist = field.one(prec).div_int(&ppow(p, (k - 1) as u32));
    let tw = |x: &PadicScalar| x.mul(&twist);
    // basis f₁ = −e'_β, f₂ = e'_α: x·e'_α + y·e'_β = −y·f₁ + x·f₂
    let phi_new = [
        [tw(&phi_dual[1][1]), tw(&phi_dual[1][0]).neg()],
        [tw(&phi_dual[0][1]).neg(), tw(&phi_dual[0][0])],
    ];
    let [x, y] = &fil_dual.line;
    let fil_new = Filtration {
        full_to: fil_dual.full_to - (k - 1),
        line_to: fil_dual.line_to - (k - 1),
        line: [y.neg(), x.clone()],
    };
    let twisted = FilteredPhiModule::new(phi_new, [gamma_dual[1].clone(), gamma_dual[0].clone()], fil_new, n)?;

    let norm_power = SmoothCharacter::unramified(field.rat(1, p as i64, prec).pow(k - 1)?)?;
    let dual_pair = CharacterPair::new(pair.beta().inv()?.mul(&norm_power), pair.alpha().inv()?.mul(&norm_power), pair.k())?;
    let target = build_D(&dual_pair, n)?;
    let mismatches = compare_modules(&twisted, &target);
    Ok(DualReport { dual, twisted, dual_pair, target, mismatches })
}

/// Differences between two modules in the same basis: `φ`, `Γ` on units,
/// the jumps, and the middle line up to scaling.
pub fn compare_modules(a: &FilteredPhiModule, b: &FilteredPhiModule) -> Vec<String> {
    let mut out = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            if !a.phi[i][j].eq_at_prec(&b.phi[i][j]) {
                out.push(format!("phi[{i}][{j}]: {} vs {}", a.phi[i][j], b.phi[i][j]));
            }
        }
        let (ga, gb) = (&a.gamma[i], &b.gamma[i]);
        if ga.tame() != gb.tame() || ga.wild() != gb.wild() {
            out.push(format!("gamma[{i}] differs on units"));
        }
    }
    if a.fil.jumps() != b.fil.jumps() {
        out.push(format!("jumps {:?} vs {:?}", a.fil.jumps(), b.fil.jumps()));
    }
    if !cross(&a.fil.line, &b.fil.line).is_zero() {
        out.push("middle filtration lines differ".to_string());
    }
    out
}

/// `n(χ)` for the largest conductor among `α`, `β`.
pub fn module_level(pair: &CharacterPair) -> u32 {
    pair.alpha().conductor().max(pair.beta().conductor())
}
