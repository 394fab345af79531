use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ruelle_core::euler::{multiplicity_thm3, BettiVector, EulerError};
use ruelle_core::forms::{invariant_d, wedge, ExteriorForm};
use ruelle_core::lie::{build_model, Family};
use ruelle_core::rational::rat;
use ruelle_core::spectrum::{bolza_generators, ConjugacyClassRecord, LengthSpectrum, WordRules};
use ruelle_core::zeta::{ruelle_fe_rhs, ruelle_zeta, selberg_fe_factor, selberg_zeta, TruncationParams};

fn form_strategy(ambient: usize, degree: usize) -> impl Strategy<Value = ExteriorForm> {
    let term = (proptest::sample::subsequence((0..ambient).collect::<Vec<_>>(), degree), -5i64..=5, 1i64..=3);
    proptest::collection::vec(term, 0..6).prop_map(move |terms| {
        ExteriorForm::from_terms(ambient, degree, terms.into_iter().map(|(ix, p, q)| (ix, rat(p, q)))).unwrap()
    })
}

fn any_degree_form(ambient: usize) -> impl Strategy<Value = ExteriorForm> {
    (0..=ambient).prop_flat_map(move |k| form_strategy(ambient, k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn d_squared_vanishes_without_compact_part(f in any_degree_form(3)) {
        for family in [Family::RealHyperbolic(2), Family::ComplexHyperbolic(1)] {
            let model = build_model(family).unwrap();
            prop_assume!(f.degree() + 2 <= 3);
            let dd = invariant_d(&invariant_d(&f, &model).unwrap(), &model).unwrap();
            prop_assert!(dd.is_zero());
        }
    }

    #[test]
    fn wedge_is_graded_commutative(f in any_degree_form(7), g in any_degree_form(7)) {
        prop_assume!(f.degree() + g.degree() <= 7);
        let fg = wedge(&f, &g).unwrap();
        let gf = wedge(&g, &f).unwrap();
        if (f.degree() * g.degree()) % 2 == 0 {
            prop_assert_eq!(fg, gf);
        } else {
            prop_assert!(fg.checked_add(&gf).unwrap().is_zero());
        }
    }

    #[test]
    fn d_is_an_antiderivation(f in any_degree_form(7), g in any_degree_form(7)) {
        prop_assume!(f.degree() + g.degree() < 7);
        let model = build_model(Family::RealHyperbolic(4)).unwrap();
        let lhs = invariant_d(&wedge(&f, &g).unwrap(), &model).unwrap();
        let a = wedge(&invariant_d(&f, &model).unwrap(), &g).unwrap();
        let b = wedge(&f, &invariant_d(&g, &model).unwrap()).unwrap();
        let rhs = if f.degree() % 2 == 0 { a.checked_add(&b) } else { a.checked_sub(&b) }.unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

fn dual_vector(half: Vec<u64>) -> Vec<u64> {
    let mut b = vec![1];
    b.extend(&half);
    let mut full = b.clone();
    full.extend(b.iter().rev());
    full
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn theorem_three_is_even(half in proptest::collection::vec(0u64..50, 0..6)) {
        let b = BettiVector::new(dual_vector(half)).unwrap();
        prop_assert_eq!(multiplicity_thm3(&b) % 2, 0);
    }

    #[test]
    fn theorem_three_rejects_broken_duality(half in proptest::collection::vec(0u64..50, 1..6), at in 1usize..6, bump in 1u64..5) {
        let mut v = dual_vector(half);
        let p = 1 + at % (v.len() / 2 - 1);
        v[p] += bump;
        let rejected = matches!(BettiVector::new(v), Err(EulerError::DualityViolation { .. }));
        prop_assert!(rejected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ruelle_rhs_is_even(re in -3.0f64..3.0, im in -1.5f64..1.5, genus in 0u32..5) {
        let s = Complex64::new(re, im);
        prop_assume!((s.re - s.re.round()).abs() > 1e-6 || s.im.abs() > 1e-6);
        let a = ruelle_fe_rhs(s, genus).unwrap();
        let b = ruelle_fe_rhs(-s, genus).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn selberg_factor_reflection(re in -1.5f64..2.5, im in 0.05f64..1.2) {
        let s = Complex64::new(re, im);
        let one = Complex64::new(1.0, 0.0);
        let prod = selberg_fe_factor(s, 2).unwrap() * selberg_fe_factor(one - s, 2).unwrap();
        prop_assert!((prod - one).norm() < 1e-10, "{}", prod);
    }
}

fn letters() -> impl Strategy<Value = Vec<u8>> {
    proptest::collection::vec(0u8..8, 1..9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_form_is_a_class_invariant(w in letters(), x in letters(), rot in 0usize..8) {
        let rules: WordRules = bolza_generators().rules();
        let base = rules.canonical(&w, 2, 200_000);
        prop_assume!(!base.word.is_empty() && base.word.len() <= 8);
        let mut conj = x.clone();
        conj.extend(&w);
        conj.extend(rules.invert(&x));
        prop_assert_eq!(&rules.canonical(&conj, 2, 200_000).word, &base.word);
        let k = rot % w.len();
        let rotated: Vec<u8> = w[k..].iter().chain(&w[..k]).copied().collect();
        prop_assert_eq!(&rules.canonical(&rotated, 2, 200_000).word, &base.word);
    }

    #[test]
    fn canonical_words_carry_the_trace(w in letters()) {
        let p = bolza_generators();
        let rules = p.rules();
        let c = rules.canonical(&w, 2, 200_000);
        let t = |v: &[u8]| { let m = p.word_matrix(v); (m[0] + m[3]).abs() };
        let (a, b) = (t(&w), t(&c.word));
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0), "{} vs {}", a, b);
    }
}

#[test]
fn zeta_is_independent_of_factor_order() {
    let p = bolza_generators();
    let spec = ruelle_core::spectrum::enumerate_classes(&p, 6, 8.0).unwrap();
    let params = TruncationParams::for_spectrum(&spec);
    let s = Complex64::new(2.0, 0.7);
    let r0 = ruelle_zeta(&spec, s, &params).unwrap().value;
    let z0 = selberg_zeta(&spec, s, &params).unwrap().value;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let mut shuffled: Vec<ConjugacyClassRecord> = spec.records.clone();
        shuffled.shuffle(&mut rng);
        let other = LengthSpectrum { records: shuffled, ..spec.clone() };
        let r = ruelle_zeta(&other, s, &params).unwrap().value;
        let z = selberg_zeta(&other, s, &params).unwrap().value;
        assert!((r - r0).norm() < 1e-12 * r0.norm());
        assert!((z - z0).norm() < 1e-12 * z0.norm());
    }
}

#[test]
fn theorem_three_fixtures() {
    assert_eq!(multiplicity_thm3(&BettiVector::new(vec![1, 0, 0, 1]).unwrap()), -4);
    assert_eq!(multiplicity_thm3(&BettiVector::new(vec![1, 2, 2, 1]).unwrap()), 0);
}
