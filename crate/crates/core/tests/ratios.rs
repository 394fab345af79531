use ruelle_core::exec::Execution;
use ruelle_core::forms::{check_forms, ScaledScalar};
use ruelle_core::lie::{build_model, Family};
use ruelle_core::multiplicity::{multiplicity_ratio, multiplicity_ratio_with};
use ruelle_core::rational::int;

const FAMILIES: [Family; 5] = [
    Family::RealHyperbolic(4),
    Family::RealHyperbolic(6),
    Family::ComplexHyperbolic(2),
    Family::ComplexHyperbolic(3),
    Family::QuaternionicHyperbolic(2),
];

#[test]
fn ratio_is_half_the_dimension() {
    for family in FAMILIES {
        let r = multiplicity_ratio(family).unwrap();
        assert_eq!(r.ratio, int(family.dim() as i64 / 2), "{family}");
        assert!(r.signs_agree);
        let plus = r.integrands[0].ratio.parse().unwrap();
        let minus = r.integrands[1].ratio.parse().unwrap();
        assert_eq!(plus, minus);
        assert_eq!((r.pfaffian_density.pi_pow, r.fiber_volume.pi_pow), (-(r.d as i32) / 2, r.d as i32 / 2));
    }
}

#[test]
fn sequential_and_parallel_ratios_match() {
    let family = Family::ComplexHyperbolic(2);
    let a = multiplicity_ratio_with(family, Execution::Sequential).unwrap();
    let b = multiplicity_ratio_with(family, Execution::Parallel).unwrap();
    assert_eq!(a.ratio, b.ratio);
    assert_eq!(a.integrands[0].top_coefficient, b.integrands[0].top_coefficient);
}

#[test]
fn closed_basic_forms() {
    for family in [Family::RealHyperbolic(2)].into_iter().chain(FAMILIES) {
        let model = build_model(family).unwrap();
        let report = check_forms(&model, Execution::default()).unwrap();
        assert!(report.all_pass(), "{family}: {report:?}");
        for c in &report.checks {
            assert_eq!(c.omega_degree, 2 * family.dim() as usize - 2);
        }
    }
}

#[test]
fn gauss_bonnet_on_compact_duals() {
    use ruelle_core::multiplicity::pfaffian_euler_density;
    use ruelle_core::rational::rat;
    // (−1)^{d/2} · density · vol(dual) = χ(dual) with the dual scaled to
    // minimal sectional curvature 1.
    let cases = [
        (Family::RealHyperbolic(2), ScaledScalar::new(int(4), 1, 0), 2),
        (Family::RealHyperbolic(4), ScaledScalar::new(rat(8, 3), 2, 0), 2),
        (Family::RealHyperbolic(6), ScaledScalar::new(rat(16, 15), 3, 0), 2),
        (Family::ComplexHyperbolic(2), ScaledScalar::new(rat(1, 2), 2, 0), 3),
        (Family::ComplexHyperbolic(3), ScaledScalar::new(rat(1, 6), 3, 0), 4),
        (Family::QuaternionicHyperbolic(2), ScaledScalar::new(rat(1, 120), 4, 0), 3),
    ];
    for (family, volume, chi) in cases {
        let model = build_model(family).unwrap();
        let density = pfaffian_euler_density(&model).unwrap();
        let sign = if family.dim() % 4 == 0 { 1 } else { -1 };
        let product = &(&density * &volume) * &ScaledScalar::rational(int(sign));
        assert_eq!(product, ScaledScalar::rational(int(chi)), "{family}");
    }
}
