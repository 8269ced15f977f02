use crystab::characters::*;
use crystab::padic_core::*;
use crystab::series::*;
use crystab::Error;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

const PREC: i64 = 30;

fn poly(p: u32, c: &[i64]) -> TruncatedSeries {
    TruncatedSeries::from_ints(Field::qp(p), c, PREC)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `Σ c_i T^i` with `c` given from exponent `i_min` on.
fn laurent(p: u32, i_min: i64, c: &[i64]) -> TruncatedSeries {
    let f = Field::qp(p);
    TruncatedSeries::new(f, i_min, c.iter().map(|&x| f.int(x, PREC)).collect(), None, PREC).unwrap()
}

fn assert_series_eq(a: &TruncatedSeries, b: &TruncatedSeries) {
    assert!(a.eq_at_prec(b), "{a}\n  !=\n{b}");
}

/// `φ(ψ(f)) = p^{−1} Σ_{ζ^p = 1} f(ζ(1+T) − 1)`, computed in `Q_p(μ_p)[T]`.
fn phi_psi_by_roots(f: &TruncatedSeries) -> TruncatedSeries {
    let field = f.field();
    let p = field.p();
    let deg = (f.i_end() - 1).max(0) as usize;
    let zero = CycloElement::zero(field, 1, PREC);
    let mut total = vec![zero.clone(); deg + 1];
    for i in 0..p as i64 {
        let zeta = CycloElement::root_power_i64(field, 1, i, PREC);
        let zm1 = zeta.sub(&CycloElement::one(field, 1, PREC));
        for n in 0..=deg {
            let a = f.coeff(n as i64).unwrap();
            for k in 0..=n {
                // C(n,k) (ζ−1)^{n−k} ζ^k T^k
                let term = zm1
                    .pow((n - k) as u64)
                    .mul(&zeta.pow(k as u64))
                    .scale_int(&binomial(n as u64, k as u64))
                    .scale(&a);
                total[k] = total[k].add(&term);
            }
        }
    }
    let coeffs = total
        .into_iter()
        .map(|c| c.as_scalar().expect("Galois-invariant sum").div_i64(p as i64))
        .collect();
    TruncatedSeries::polynomial(field, coeffs, PREC)
}

#[test]
fn frobenius_of_t_at_three() {
    let phi_t = frobenius_phi(&poly(3, &[0, 1])).unwrap();
    assert_series_eq(&phi_t, &poly(3, &[0, 3, 3, 1]));
    assert!(phi_t.is_exact());
    assert_series_eq(&frobenius_phi(&poly(3, &[1])).unwrap(), &poly(3, &[1]));
}

#[test]
fn frobenius_preserves_tail() {
    let f = poly(5, &[1, 2, 3, 4, 5, 6]).truncate(4);
    let g = frobenius_phi(&f).unwrap();
    assert_eq!(g.tail(), Some(4));
}

#[test]
fn psi_of_t_is_minus_one() {
    for p in [3, 5, 7] {
        assert_series_eq(&psi(&poly(p, &[0, 1])).unwrap(), &poly(p, &[-1]));
    }
}

#[test]
fn psi_of_unit_power_divisible_by_p() {
    let f = TruncatedSeries::one_plus_t_pow(Field::qp(3), &int(3), 10, PREC);
    assert_series_eq(&psi(&f).unwrap(), &poly(3, &[1, 1]));
}

#[test]
fn psi_matches_root_of_unity_average() {
    let cases: [&[i64]; 4] = [&[0, 1], &[1, 2, 3, 4, 5], &[0, 0, 0, 0, 0, 0, 0, 0, 0, 1], &[7, -3, 0, 11, 2, 0, 0, 5]];
    for p in [3, 5] {
        for c in cases {
            let f = poly(p, c);
            let lhs = frobenius_phi(&psi(&f).unwrap()).unwrap();
            assert_series_eq(&lhs, &phi_psi_by_roots(&f));
        }
    }
}

#[test]
fn psi_needs_exactness_or_decay() {
    let f = poly(3, &[1, 2, 3, 4]).truncate(3);
    assert!(matches!(psi(&f), Err(Error::Precision(_))));
}

#[test]
fn psi_with_decay_bound_is_certified() {
    let p = 3;
    let c: Vec<i64> = (0..30).map(|n| (n * 7 + 3) % 19 - 9).collect();
    let full = poly(p, &c);
    let cut = full
        .truncate(15)
        .with_decay(Decay { base: Q::from_integer(0), log_slope: Q::from_integer(0) });
    let approx = psi(&cut).unwrap();
    let exact = psi(&full).unwrap();
    assert_eq!(approx.tail(), Some(5));
    assert_series_eq(&approx, &exact);
    // Coefficient k loses at most ⌊15/p⌋ − k digits.
    for k in 0..5 {
        assert!(approx.coeff(k).unwrap().abs_prec() >= Q::from_integer(5 - k));
    }
}

#[test]
fn gamma_identity_and_composition() {
    let f = poly(5, &[3, 1, 4, 1, 5]);
    assert_series_eq(&gamma_act(&int(1), &f, 20).unwrap(), &f);
    for (a, b) in [(int(2), int(3)), (rat(1, 2), int(-1)), (int(7), rat(3, 4))] {
        let lhs = gamma_act(&a, &gamma_act(&b, &f, 12).unwrap(), 12).unwrap();
        let rhs = gamma_act(&(&a * &b), &f, 12).unwrap();
        assert_series_eq(&lhs, &rhs);
    }
}

#[test]
fn gamma_rejects_non_units() {
    let f = poly(3, &[0, 1]);
    assert!(matches!(gamma_act(&int(3), &f, 5), Err(Error::Domain(_))));
    assert!(matches!(gamma_act(&rat(1, 6), &f, 5), Err(Error::Domain(_))));
}

#[test]
fn gamma_scales_logarithm() {
    let n = 12;
    let field = Field::qp(3);
    let log = log_one_plus_t(field, n, PREC);
    for a in [int(2), int(-1), rat(1, 2), int(4)] {
        let lhs = gamma_act(&a, &log, n + 1).unwrap();
        assert_series_eq(&lhs, &log.scale_rat(&a));
    }
}

#[test]
fn frobenius_scales_logarithm() {
    let n = 10;
    let field = Field::qp(3);
    let log = log_one_plus_t(field, n, PREC);
    let lhs = frobenius_phi(&log).unwrap();
    assert_series_eq(&lhs, &log.scale_rat(&int(3)));
}

#[test]
fn logarithm_coefficients() {
    let log = log_one_plus_t(Field::qp(5), 6, PREC);
    assert!(log.coeff(1).unwrap().eq_at_prec(&Field::qp(5).one(PREC)));
    assert!(log.coeff(4).unwrap().eq_at_prec(&Field::qp(5).rat(-1, 4, PREC)));
    assert!(matches!(log.coeff(7), Err(Error::Precision(_))));
}

/// `T·∏_{i<I} φ^i(q)/p` with `q = φ(T)/T` converges to `log(1+T)`:
/// coefficient j agrees to precision `I − 2⌊log_p j⌋`.
#[test]
fn logarithm_product_converges() {
    let p = 3u32;
    let field = Field::qp(p);
    let order = 10;
    let q = poly(p, &[3, 3, 1]);
    let log = log_one_plus_t(field, order - 1, PREC);
    let mut prod = poly(p, &[0, 1]);
    let mut factor = q.clone();
    for levels in 1..=5i64 {
        prod = prod.mul(&factor.scale_rat(&rat(1, p as i64))).truncate(order);
        factor = frobenius_phi(&factor).unwrap().truncate(order);
        for j in 1..order {
            let d = prod.coeff(j).unwrap().sub(&log.coeff(j).unwrap());
            let bound = levels - 2 * scalar::log_floor(j, p);
            assert!(d.val().certainly_ge(Q::from_integer(bound)), "levels {levels} coefficient {j}: {:?}", d.val());
        }
    }
}

#[test]
fn frobenius_of_one_plus_t_power() {
    // φ((1+T)^a) = (1+T)^{pa}
    let field = Field::qp(5);
    let f = TruncatedSeries::one_plus_t_pow(field, &int(3), 20, PREC);
    let g = TruncatedSeries::one_plus_t_pow(field, &int(15), 20, PREC);
    assert_series_eq(&frobenius_phi(&f).unwrap(), &g);
}

#[test]
fn restriction_of_dirac_masses() {
    let field = Field::qp(3);
    for a in [1i64, 2, 4, 7, 13] {
        let f = TruncatedSeries::one_plus_t_pow(field, &int(a), 40, PREC);
        for n in 1..=2u32 {
            let m = 3i64.pow(n);
            for i in 0..m {
                let r = res_restrict(&f, &BigInt::from(i), n).unwrap();
                if i == a % m {
                    assert_series_eq(&r, &f);
                } else {
                    assert_series_eq(&r, &TruncatedSeries::zero(field, PREC));
                }
            }
        }
    }
}

#[test]
fn restriction_independent_of_representative() {
    let f = poly(3, &[2, -1, 0, 5, 1, 1, 3]);
    for i in 0..9i64 {
        let a = res_restrict(&f, &BigInt::from(i), 2).unwrap();
        let b = res_restrict(&f, &BigInt::from(i + 27), 2).unwrap();
        let c = res_restrict(&f, &BigInt::from(i - 9), 2).unwrap();
        assert_series_eq(&a, &b);
        assert_series_eq(&a, &c);
    }
}

#[test]
fn residue_examples() {
    let field = Field::qp(5);
    assert!(residue_at_zero(&laurent(5, -1, &[1])).unwrap().eq_at_prec(&field.one(PREC)));
    assert!(residue_at_zero(&poly(5, &[1, 2, 3])).unwrap().is_zero());
    let a = field.int(5, PREC);
    let one = TruncatedSeries::one(field, PREC);
    let r1 = partial_fraction_residue(&one, &[(a.clone(), 1)]).unwrap();
    assert!(r1.eq_at_prec(&field.one(PREC)));
    for k in 2..5 {
        assert!(partial_fraction_residue(&one, &[(a.clone(), k)]).unwrap().is_zero());
    }
    let t = laurent(5, -2, &[1, 0, 3]).truncate(-1);
    assert!(matches!(residue_at_zero(&t), Err(Error::Precision(_))));
}

#[test]
fn residue_single_simple_pole_is_value() {
    let field = Field::qp(3);
    let g = poly(3, &[1, 4, -2, 7]);
    let a = field.int(9, PREC);
    let r = partial_fraction_residue(&g, &[(a, 1)]).unwrap();
    // g(9) = 1 + 36 − 162 + 5103
    assert!(r.eq_at_prec(&field.int(4978, PREC)));
}

#[test]
fn residue_rejects_bad_poles() {
    let field = Field::qp(3);
    let g = poly(3, &[1]);
    let a = field.int(3, PREC);
    assert!(matches!(partial_fraction_residue(&g, &[(a.clone(), 1), (a.clone(), 2)]), Err(Error::Domain(_))));
    assert!(matches!(partial_fraction_residue(&g, &[(field.int(2, PREC), 1)]), Err(Error::Domain(_))));
    assert!(matches!(partial_fraction_residue(&laurent(3, -1, &[1]), &[(a, 1)]), Err(Error::Domain(_))));
}

/// `res_0(g ∏ (T − a_i)^{−k_i} dT)` from `(T − a)^{−k} = Σ_n C(n+k−1, k−1) a^n T^{−n−k}`.
///
/// Only finitely many terms reach `T^{−1}` when `g` is a polynomial.
fn laurent_residue_oracle(g: &[BigRational], poles: &[(BigRational, u32)]) -> BigRational {
    let total_order: i64 = poles.iter().map(|(_, k)| *k as i64).sum();
    let depth = (g.len() as i64 + 1 - total_order).max(0) as usize;
    // prod[n] = coefficient of T^{−K−n}
    let mut prod = vec![BigRational::zero(); depth + 1];
    prod[0] = BigRational::one();
    for (a, k) in poles {
        let expansion: Vec<BigRational> = (0..=depth)
            .map(|n| {
                let c = binomial(n as u64 + *k as u64 - 1, *k as u64 - 1);
                BigRational::from_integer(c) * num_traits::pow(a.clone(), n)
            })
            .collect();
        prod = (0..=depth)
            .map(|n| (0..=n).map(|t| &prod[t] * &expansion[n - t]).sum())
            .collect();
    }
    // [T^{−1}] Σ_d g_d T^d · T^{−K−n} needs n = d + 1 − K.
    let mut res = BigRational::zero();
    for (d, gd) in g.iter().enumerate() {
        let n = d as i64 + 1 - total_order;
        if n >= 0 {
            res += gd * &prod[n as usize];
        }
    }
    res
}

#[test]
fn residue_with_double_pole_and_two_poles() {
    // 1/((T−a)²(T−b)): the residue is the sum of the residues at both poles, which is 0
    // since the rational function decays like T^{−3}.
    let field = Field::qp(3);
    let one = TruncatedSeries::one(field, PREC);
    let a = field.int(3, PREC);
    let b = field.int(9, PREC);
    let r = partial_fraction_residue(&one, &[(a, 2), (b, 1)]).unwrap();
    assert!(r.is_zero(), "{r}");
}

#[test]
fn decay_tail_bounds_residue() {
    let field = Field::qp(3);
    let c: Vec<i64> = (0..24).map(|n| (n * 5 + 1) % 7 - 3).collect();
    let full = poly(3, &c);
    let cut = full
        .truncate(12)
        .with_decay(Decay { base: Q::from_integer(0), log_slope: Q::from_integer(0) });
    let a = field.int(3, PREC);
    let exact = partial_fraction_residue(&full, &[(a.clone(), 2)]).unwrap();
    let approx = partial_fraction_residue(&cut, &[(a, 2)]).unwrap();
    assert!(approx.eq_at_prec(&exact));
    assert!(approx.abs_prec() >= Q::from_integer(11));
}

#[test]
fn sup_norm_examples() {
    let field = Field::qp(5);
    let r = Q::new(1, 3);
    assert_eq!(sup_norm_r(&poly(5, &[0, 1]), r), WindowNorm { val: Val::Finite(r), complete: true });
    assert_eq!(sup_norm_r(&poly(5, &[1, 5]), r).val, Val::Finite(Q::from_integer(0)));
    assert_eq!(sup_norm_r(&poly(5, &[1, 5]), Q::new(-1, 2)).val, Val::Finite(Q::from_integer(0)));
    let cut = poly(5, &[1, 5, 25]).truncate(2);
    assert!(!sup_norm_r(&cut, r).complete);
    assert_eq!(rho_exponent(5, 2), Q::new(1, 100));
    let f = TruncatedSeries::polynomial(field, vec![field.int(25, PREC), field.int(5, PREC)], PREC);
    assert_eq!(rho_norm(&f, 0).val, Val::Finite(Q::new(5, 4)));
}

#[test]
fn mellin_examples() {
    let field = Field::qp(3);
    let one = field.one(PREC);
    let l = GroupAlgebraElement::single(3, 1, one.clone()).unwrap();
    assert_series_eq(&mellin_finite(&l, field, 10, PREC), &poly(3, &[1, 1]));
    let diff = GroupAlgebraElement::new(3, vec![(int(5), one.clone()), (int(2), one.neg())]).unwrap();
    let m = mellin_finite(&diff, field, 10, PREC);
    let expected = TruncatedSeries::one_plus_t_pow(field, &int(5), 10, PREC)
        .sub(&TruncatedSeries::one_plus_t_pow(field, &int(2), 10, PREC));
    assert_series_eq(&m, &expected);
    assert_series_eq(&psi(&m).unwrap(), &TruncatedSeries::zero(field, PREC));
    assert!(GroupAlgebraElement::single(3, 6, one).is_err());
}

#[test]
fn twist_examples() {
    let field = Field::qp(5);
    let one = field.one(PREC);
    let l = GroupAlgebraElement::new(5, vec![(int(2), one.clone()), (int(3), field.int(7, PREC))]).unwrap();
    let trivial = ContinuousCharacter::from_smooth(SmoothCharacter::trivial(field, PREC));
    assert!(twist_group_algebra(&l, &trivial, 1).unwrap().eq_at_prec(&l));
    let tame = SmoothCharacter::from_generator(one.clone(), 1, &BigInt::from(1)).unwrap();
    let tau = ContinuousCharacter::new(tame, 2);
    let single = GroupAlgebraElement::single(5, 2, one).unwrap();
    let twisted = twist_group_algebra(&single, &tau, 1).unwrap();
    let value = tau.eval_rational(&int(2)).unwrap().as_scalar().unwrap();
    assert_eq!(twisted.terms().len(), 1);
    assert_eq!(twisted.terms()[0].0, int(2));
    assert!(twisted.terms()[0].1.eq_at_prec(&value));
}

fn char_power(tau: &ContinuousCharacter, n: i64) -> ContinuousCharacter {
    let base = if n < 0 { tau.inv().unwrap() } else { tau.clone() };
    let mut out = ContinuousCharacter::from_smooth(SmoothCharacter::trivial(tau.smooth().field(), PREC));
    for _ in 0..n.abs() {
        out = out.mul(&base);
    }
    out
}

#[test]
fn twist_composition_law() {
    let field = Field::qp(5);
    let one = field.one(PREC);
    let tame = |j| SmoothCharacter::from_generator(one.clone(), 1, &BigInt::from(j)).unwrap();
    let t1 = ContinuousCharacter::new(tame(1), 1);
    let t2 = ContinuousCharacter::new(tame(3), 2);
    let l = GroupAlgebraElement::new(
        5,
        vec![(int(2), field.int(3, PREC)), (rat(3, 7), field.int(-1, PREC)), (int(-4), field.rat(1, 2, PREC))],
    )
    .unwrap();
    for (n1, n2) in [(1, 1), (2, 3), (-1, 2), (3, -1), (0, 2)] {
        let lhs = twist_group_algebra(&twist_group_algebra(&l, &t2, n2).unwrap(), &t1, n1).unwrap();
        let combined = char_power(&t1, n2).mul(&t2);
        let rhs = twist_group_algebra(&l, &combined, n1 * n2).unwrap();
        assert!(lhs.eq_at_prec(&rhs), "n1 = {n1}, n2 = {n2}");
    }
}

#[test]
fn pairing_examples() {
    let field = Field::qp(3);
    let zero = TruncatedSeries::zero(field, PREC);
    let x = vec![TruncatedSeries::one(field, PREC), zero.clone()];
    let y = vec![laurent(3, -1, &[1, 1]), zero.clone()];
    assert!(duality_pairing(&x, &y).unwrap().eq_at_prec(&field.one(PREC)));
    let xp = vec![poly(3, &[1, 2]), poly(3, &[0, 5])];
    let yp = vec![poly(3, &[4, 1, 1]), poly(3, &[2])];
    assert!(duality_pairing(&xp, &yp).unwrap().is_zero());
    assert!(duality_pairing(&x, &y[..1]).is_err());
}

#[test]
fn pairing_twisted_equivariance() {
    let field = Field::qp(3);
    let x = vec![laurent(3, -2, &[1, -2, 3, 1]), laurent(3, 0, &[2, 0, 1])];
    let y = vec![laurent(3, -3, &[2, 1, 0, 4]), laurent(3, -1, &[5, 1, 1])];
    let base = duality_pairing(&x, &y).unwrap();
    assert!(!base.is_zero());
    for a in [int(2), int(-1), rat(1, 2), int(4)] {
        let gx: Vec<_> = x.iter().map(|s| gamma_act(&a, s, 8).unwrap()).collect();
        let gy: Vec<_> = y.iter().map(|s| gamma_act(&a, s, 8).unwrap()).collect();
        let v = duality_pairing(&gx, &gy).unwrap().mul_rat(&a);
        assert!(v.eq_at_prec(&base), "a = {a}: {v} vs {base}");
    }
    let _ = field;
}

fn small_poly() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-40i64..40, 1..9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn frobenius_is_multiplicative(a in small_poly(), b in small_poly()) {
        let (f, g) = (poly(3, &a), poly(3, &b));
        let lhs = frobenius_phi(&f.mul(&g)).unwrap();
        let rhs = frobenius_phi(&f).unwrap().mul(&frobenius_phi(&g).unwrap());
        prop_assert!(lhs.eq_at_prec(&rhs));
    }

    #[test]
    fn psi_projection_formula(a in small_poly(), b in small_poly()) {
        let (g, h) = (poly(3, &a), poly(3, &b));
        let lhs = psi(&frobenius_phi(&g).unwrap().mul(&h)).unwrap();
        let rhs = g.mul(&psi(&h).unwrap());
        prop_assert!(lhs.eq_at_prec(&rhs));
    }

    #[test]
    fn psi_left_inverts_frobenius(a in small_poly(), p in prop::sample::select(vec![3u32, 5, 7])) {
        let g = poly(p, &a);
        prop_assert!(psi(&frobenius_phi(&g).unwrap()).unwrap().eq_at_prec(&g));
    }

    #[test]
    fn frobenius_psi_is_restriction_to_pzp(a in small_poly()) {
        let f = poly(3, &a);
        let lhs = frobenius_phi(&psi(&f).unwrap()).unwrap();
        let rhs = res_restrict(&f, &BigInt::from(0), 1).unwrap();
        prop_assert!(lhs.eq_at_prec(&rhs));
    }

    #[test]
    fn restrictions_are_orthogonal_idempotents(a in small_poly(), n in 1u32..3) {
        let f = poly(3, &a);
        let m = 3i64.pow(n);
        let parts: Vec<_> = (0..m).map(|i| res_restrict(&f, &BigInt::from(i), n).unwrap()).collect();
        let mut sum = TruncatedSeries::zero(Field::qp(3), PREC);
        for (i, part) in parts.iter().enumerate() {
            sum = sum.add(part);
            let again = res_restrict(part, &BigInt::from(i as i64), n).unwrap();
            prop_assert!(again.eq_at_prec(part));
            let other = res_restrict(part, &BigInt::from(i as i64 + 1), n).unwrap();
            prop_assert!(other.eq_at_prec(&TruncatedSeries::zero(Field::qp(3), PREC)));
        }
        prop_assert!(sum.eq_at_prec(&f));
    }

    #[test]
    fn gamma_commutes_with_frobenius_and_psi(a in small_poly(), u in prop::sample::select(vec![1i64, 2, 4, 5, 7])) {
        let f = poly(3, &a);
        let order = 1000;
        let lhs = gamma_act(&int(u), &frobenius_phi(&f).unwrap(), order).unwrap();
        let rhs = frobenius_phi(&gamma_act(&int(u), &f, order).unwrap()).unwrap();
        prop_assert!(lhs.is_exact() && lhs.eq_at_prec(&rhs));
        let lhs = gamma_act(&int(u), &psi(&f).unwrap(), order).unwrap();
        let rhs = psi(&gamma_act(&int(u), &f, order).unwrap()).unwrap();
        prop_assert!(lhs.eq_at_prec(&rhs));
    }

    #[test]
    fn frobenius_rescales_rho_norms(a in small_poly(), h in 0u32..3) {
        let f = poly(3, &a);
        let lhs = rho_norm(&frobenius_phi(&f).unwrap(), h + 1);
        let rhs = rho_norm(&f, h);
        prop_assert_eq!(lhs.val, rhs.val);
    }

    #[test]
    fn mellin_image_is_killed_by_psi(
        terms in prop::collection::vec((1i64..40, -20i64..20), 1..5)
    ) {
        let field = Field::qp(3);
        let terms: Vec<_> = terms
            .into_iter()
            .map(|(a, c)| (int(if a % 3 == 0 { a + 1 } else { a }), field.int(c, PREC)))
            .collect();
        let l = GroupAlgebraElement::new(3, terms).unwrap();
        let m = mellin_finite(&l, field, 64, PREC);
        prop_assert!(psi(&m).unwrap().eq_at_prec(&TruncatedSeries::zero(field, PREC)));
    }

    #[test]
    fn mellin_is_additive(
        a in prop::collection::vec((1i64..20, -9i64..9), 1..4),
        b in prop::collection::vec((1i64..20, -9i64..9), 1..4),
    ) {
        let field = Field::qp(5);
        let mk = |v: &[(i64, i64)]| {
            let t = v.iter().map(|&(a, c)| (int(if a % 5 == 0 { a + 1 } else { a }), field.int(c, PREC))).collect();
            GroupAlgebraElement::new(5, t).unwrap()
        };
        let (la, lb) = (mk(&a), mk(&b));
        let lhs = mellin_finite(&la.add(&lb), field, 32, PREC);
        let rhs = mellin_finite(&la, field, 32, PREC).add(&mellin_finite(&lb, field, 32, PREC));
        prop_assert!(lhs.eq_at_prec(&rhs));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn residue_matches_laurent_oracle(g in prop::collection::vec(-50i64..50, 1..10), p in prop::sample::select(vec![3i64, 5])) {
        let field = Field::qp(p as u32);
        let series = poly(p as u32, &g);
        let poles = [(field.int(p, PREC), 1u32), (field.int(p * p, PREC), 2u32)];
        let got = partial_fraction_residue(&series, &poles).unwrap();
        let g_rat: Vec<BigRational> = g.iter().map(|&c| int(c)).collect();
        let oracle = laurent_residue_oracle(&g_rat, &[(int(p), 1), (int(p * p), 2)]);
        prop_assert!(got.eq_at_prec(&field.big_rat(&oracle, PREC)), "{} vs {}", got, oracle);
    }
}
