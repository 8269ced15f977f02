mod common;

use common::{character, pair_grid, PREC};
use crystab::characters::*;
use crystab::modcris::*;
use crystab::padic_core::*;
use crystab::Error;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn unramified_pair() -> CharacterPair {
    CharacterPair::new(character(3, 2, 1, 0), character(3, 2, -1, 0), 3).unwrap()
}

#[test]
fn unramified_module_is_diagonal_with_line_through_both_axes() {
    let pair = unramified_pair();
    let d = build_D(&pair, 0).unwrap();
    assert!(d.phi()[0][1].is_zero() && d.phi()[1][0].is_zero());
    assert!(d.phi()[0][0].eq_at_prec(pair.alpha().at_p()));
    let fil = d.filtration();
    assert_eq!(fil.jumps(), (-2, 0));
    assert!(fil.line[0].eq_at_prec(&CycloElement::one(pair.field(), 0, PREC)));
    assert!(fil.line[1].eq_at_prec(&CycloElement::one(pair.field(), 0, PREC)));
    assert_eq!(d.t_newton().unwrap(), q(-2, 1));
    assert_eq!(d.t_hodge(), q(-2, 1));
}

#[test]
fn exceptional_module_is_not_semisimple() {
    let alpha = character(3, 2, 1, 0);
    let pair = CharacterPair::new(alpha.clone(), alpha, 3).unwrap();
    let d = build_D(&pair, 0).unwrap();
    let b = pair.beta().at_p();
    assert!(d.phi()[0][1].eq_at_prec(&b.neg()));
    assert!(d.phi()[1][1].eq_at_prec(b));
    assert!(d.filtration().line[0].is_zero());
    let r = weakly_admissible_irreducible(&d).unwrap();
    assert!(r.admissible && r.irreducible && r.convention_dependent);
    assert_eq!(r.lines.len(), 1);
}

#[test]
fn build_needs_the_conductor_level() {
    let pair = CharacterPair::new(character(5, 2, 1, 0), character(5, 2, 1, 1), 3).unwrap();
    assert!(matches!(build_D(&pair, 0), Err(Error::Level(_))));
    let d = build_D(&pair, 1).unwrap();
    // Stickelberger: G(ω^{−a}) has valuation a/(p−1); here the sum is over ω^{3}
    assert_eq!(d.filtration().line[1].val(), Val::Finite(q(3, 4)));
}

#[test]
fn every_grid_module_is_admissible_and_irreducible() {
    for p in [3u32, 5] {
        for k in 2..=5u32 {
            for pair in pair_grid(p, k, true) {
                let d = build_D(&pair, module_level(&pair)).unwrap();
                assert_eq!(d.t_newton().unwrap(), d.t_hodge());
                let r = weakly_admissible_irreducible(&d).unwrap();
                assert!(r.admissible && r.irreducible, "p={p} k={k}: {:?}", r.witnesses);
            }
        }
    }
}

#[test]
fn a_filtration_on_an_eigenline_of_slope_zero_violates_admissibility() {
    let f = Field::qp(3);
    let k = 3i64;
    let a = f.int(2, PREC); // val α(p) = 0
    let b = f.rat(1, 9, PREC); // val β(p) = −(k−1)
    let gamma = [SmoothCharacter::trivial(f, PREC), SmoothCharacter::trivial(f, PREC).twist_unramified(&f.int(-1, PREC))];
    let fil = Filtration {
        full_to: -(k - 1),
        line_to: 0,
        line: [CycloElement::zero(f, 0, PREC), CycloElement::one(f, 0, PREC)],
    };
    let d = FilteredPhiModule::new([[a, f.zero(PREC)], [f.zero(PREC), b]], gamma, fil, 0).unwrap();
    let r = weakly_admissible_irreducible(&d).unwrap();
    assert!(!r.admissible && !r.irreducible);
    let w = &r.witnesses[0];
    assert!(w.vector[0].is_zero());
    assert_eq!((w.t_hodge, w.t_newton), (q(0, 1), q(-2, 1)));
}

#[test]
fn dual_twist_reproduces_the_dual_pair_module() {
    for p in [3u32, 5] {
        for k in 2..=5u32 {
            for pair in pair_grid(p, k, true) {
                let r = dual_twist(&pair, module_level(&pair)).unwrap();
                assert!(r.mismatches.is_empty(), "{:?}", r.mismatches);
                assert_eq!(r.dual.filtration().jumps(), (0, k as i64 - 1));
            }
        }
    }
}

#[test]
fn dual_middle_line_is_minus_e_beta_plus_gauss_sum_e_alpha() {
    let pair = CharacterPair::new(character(3, 2, 1, 0), character(3, 2, 1, 1), 3).unwrap();
    let r = dual_twist(&pair, 1).unwrap();
    let g = standard_gauss_sum(&pair.alpha().div(pair.beta()).unwrap(), PREC).unwrap();
    let line = &r.dual.filtration().line;
    assert!(line[0].eq_at_prec(&g));
    assert!(line[1].eq_at_prec(&CycloElement::one(pair.field(), 1, PREC).neg()));

    let alpha = character(3, 2, 1, 0);
    let ex = CharacterPair::new(alpha.clone(), alpha, 3).unwrap();
    let r = dual_twist(&ex, 0).unwrap();
    let line = &r.dual.filtration().line;
    assert!(line[1].is_zero() && !line[0].is_zero());
    assert!(r.mismatches.is_empty());
}

#[test]
fn double_dual_twist_returns_the_original_pair() {
    for pair in pair_grid(5, 4, true) {
        let n = module_level(&pair);
        let once = dual_twist(&pair, n).unwrap();
        let twice = dual_twist(&once.dual_pair, n).unwrap();
        assert!(twice.dual_pair.alpha() == pair.alpha() && twice.dual_pair.beta() == pair.beta());
        assert!(compare_modules(&twice.target, &build_D(&pair, n).unwrap()).is_empty());
    }
}

fn tri(u: Q, w_diff: i64) -> TriangulationParams {
    let f = Field::quadratic(3);
    // δ₁ = x^{w}·ur(c) with val(3^w c) = u, δ₂ = ur(1/(3^w c))
    let c = f.one(PREC).shift_pi((u * Q::from_integer(2)).to_integer() - 2 * w_diff);
    let d1 = ContinuousCharacter::new(SmoothCharacter::unramified(c.clone()).unwrap(), w_diff);
    let d2_at_p = c.mul_int(&num_bigint::BigInt::from(3).pow(w_diff as u32)).inv().unwrap();
    let d2 = ContinuousCharacter::from_smooth(SmoothCharacter::unramified(d2_at_p).unwrap());
    TriangulationParams { delta1: d1, delta2: d2, h_bar_infinite: true }
}

#[test]
fn triangulation_examples() {
    let s = tri(q(1, 1), 2);
    let c = classify_triangulation(&s).unwrap();
    assert_eq!((c.class, c.u, c.w), (TriangulationClass::Cris, q(1, 1), q(2, 1)));
    let st = TriangulationParams { h_bar_infinite: false, ..s };
    assert_eq!(classify_triangulation(&st).unwrap().class, TriangulationClass::St);
    assert_eq!(classify_uw(q(1, 2), q(1, 2), true), TriangulationClass::Ng);
    assert_eq!(classify_uw(q(0, 1), q(3, 1), true), TriangulationClass::None);
    assert_eq!(classify_uw(q(3, 1), q(2, 1), true), TriangulationClass::None);
    assert_eq!(classify_triangulation(&tri(q(0, 1), 1)).unwrap().class, TriangulationClass::None);
}

#[test]
fn triangulation_outside_the_positive_set_is_rejected() {
    let f = Field::qp(3);
    let d1 = ContinuousCharacter::from_smooth(SmoothCharacter::unramified(f.rat(1, 3, PREC)).unwrap());
    let d2 = ContinuousCharacter::from_smooth(SmoothCharacter::unramified(f.int(3, PREC)).unwrap());
    let s = TriangulationParams { delta1: d1.clone(), delta2: d1, h_bar_infinite: true };
    assert!(matches!(classify_triangulation(&s), Err(Error::Domain(_))));
    let s = TriangulationParams { delta1: ContinuousCharacter::from_smooth(SmoothCharacter::unramified(f.rat(1, 3, PREC)).unwrap()), delta2: d2, h_bar_infinite: true };
    assert!(matches!(classify_triangulation(&s), Err(Error::Domain(_))));
}

#[test]
fn triangulation_classes_are_disjoint_and_total() {
    for un in -4..=12i64 {
        for wn in -4..=12i64 {
            for h in [true, false] {
                let (u, w) = (q(un, 2), q(wn, 2));
                let class = classify_uw(u, w, h);
                let integral = w.is_integer() && w >= q(1, 1);
                let ng = !integral && u > q(0, 1);
                let cris = integral && u > q(0, 1) && u < w && h;
                let st = integral && u > q(0, 1) && u < w && !h;
                assert!([ng, cris, st].iter().filter(|x| **x).count() <= 1);
                let expected = if ng {
                    TriangulationClass::Ng
                } else if cris {
                    TriangulationClass::Cris
                } else if st {
                    TriangulationClass::St
                } else {
                    TriangulationClass::None
                };
                assert_eq!(class, expected);
            }
        }
    }
}
