use ruelle_core::exec::Execution;
use ruelle_core::spectrum::crosscheck::dedup_crosscheck;
use ruelle_core::spectrum::csv::to_csv_string;
use ruelle_core::spectrum::{bolza_generators, counting_function, enumerate_with, EnumerationParams, LengthSpectrum};

fn bolza(w: usize, l: f64, exec: Execution) -> LengthSpectrum {
    enumerate_with(&bolza_generators(), &EnumerationParams::new(w, l).with_exec(exec)).unwrap()
}

#[test]
fn output_is_identical_across_execution_modes() {
    let a = bolza(7, 9.0, Execution::Sequential);
    let b = bolza(7, 9.0, Execution::Parallel);
    assert_eq!(to_csv_string(&a), to_csv_string(&b));
    assert_eq!(a, b);
}

#[test]
fn inversion_closure_and_even_shells() {
    let spec = bolza(7, 9.0, Execution::default());
    let by_word: std::collections::HashMap<&str, f64> =
        spec.records.iter().map(|r| (r.canonical_word.as_str(), r.length)).collect();
    for r in &spec.records {
        let partner = by_word[r.orientation_partner.as_str()];
        assert!((partner - r.length).abs() < 1e-9);
        assert_ne!(r.orientation_partner, r.canonical_word);
    }
    assert!(spec.shells().iter().all(|s| s.count % 2 == 0));
}

#[test]
fn powers_are_multiples_of_their_roots() {
    let spec = bolza(8, 10.0, Execution::default());
    let by_word: std::collections::HashMap<&str, f64> =
        spec.records.iter().map(|r| (r.canonical_word.as_str(), r.length)).collect();
    let powers: Vec<_> = spec.records.iter().filter(|r| !r.primitive).collect();
    assert!(!powers.is_empty());
    for r in powers {
        assert!(r.power >= 2);
        let root = by_word[r.power_of.as_deref().unwrap()];
        assert!((r.length - r.power as f64 * root).abs() < 1e-9, "{}", r.canonical_word);
    }
}

#[test]
fn counting_is_monotone() {
    let spec = bolza(6, 8.0, Execution::default());
    let mut last = 0;
    for k in 0..=80 {
        let n = counting_function(&spec, k as f64 * 0.1).unwrap();
        assert!(n >= last);
        last = n;
    }
    assert_eq!(last, spec.len());
}

#[test]
fn dedup_routes_agree() {
    let check = dedup_crosscheck(&bolza_generators(), &EnumerationParams::new(7, 10.0));
    assert!(check.agrees(), "{check:?}");
}
