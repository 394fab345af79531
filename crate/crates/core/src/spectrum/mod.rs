//! Closed-geodesic length spectrum of a compact hyperbolic surface given by a
//! one-relator presentation of its fundamental group in `SL(2, R)`.

pub mod crosscheck;
pub mod csv;
pub mod enumerate;
pub mod exact;
pub mod expr;
pub mod words;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use enumerate::{enumerate_classes, enumerate_with, EnumerationParams};
pub use words::{Letter, WordRules};

use exact::{octagon_translation, ExactMatrix, QuadSqrt2, Tower};

pub type Mat2 = [f64; 4];

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("trace {trace} is not hyperbolic (|t| <= 2)")]
    NotHyperbolic { trace: f64 },
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error(transparent)]
    Expression(#[from] expr::ExprError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("length {ell} lies beyond the enumeration horizon {horizon}")]
    BeyondHorizon { ell: f64, horizon: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("malformed spectrum CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SpectrumError>;

#[inline]
pub fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

#[inline]
pub fn mat_det(x: &Mat2) -> f64 {
    x[0] * x[3] - x[1] * x[2]
}

pub const IDENTITY: Mat2 = [1.0, 0.0, 0.0, 1.0];

/// `ℓ = 2 arccosh(|t| / 2)`.
pub fn length_from_trace(t: f64) -> Result<f64> {
    if !(t.abs() > 2.0) {
        return Err(SpectrumError::NotHyperbolic { trace: t });
    }
    Ok(2.0 * (t.abs() / 2.0).acosh())
}

/// Largest `|trace|` whose translation length is at most `ell`.
pub fn trace_bound(ell: f64) -> f64 {
    2.0 * (ell / 2.0).cosh()
}

/// On-disk presentation: generator matrices as expression strings, the
/// relation in generator labels (upper case for inverses).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PresentationFile {
    pub labels: Vec<char>,
    pub generators: Vec<[[String; 2]; 2]>,
    pub relation: String,
    #[serde(default)]
    pub trace_field_note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurfaceGroupPresentation {
    /// Generator labels followed by inverse labels.
    pub labels: Vec<char>,
    /// Row-major entry expressions for each generator.
    pub expressions: Vec<[String; 4]>,
    /// Matrices for generators followed by their inverses.
    pub matrices: Vec<Mat2>,
    pub relation: Vec<Letter>,
    pub trace_field_note: String,
    /// Whether the generators were verified in exact arithmetic.
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PresentationCheck {
    pub max_det_drift: f64,
    pub min_abs_trace: f64,
    pub relator_residual: f64,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactCheck {
    pub unimodular: bool,
    pub traces: Vec<String>,
    pub relator_is_identity: bool,
}

const BOLZA_RELATION: &str = "aBcDAbCd";

/// The side pairings of the regular octagon with angles `π/4`:
/// `T_k = R_{kπ/4} T₀ R_{−kπ/4}` for `k = 0..3`.
pub fn bolza_generators() -> SurfaceGroupPresentation {
    let labels = vec!['a', 'b', 'c', 'd'];
    let mut expressions = Vec::new();
    let mut mats = Vec::new();
    for k in 0..4 {
        let (s, c) = [("0", "1"), ("sqrt(2)/2", "sqrt(2)/2"), ("1", "0"), ("sqrt(2)/2", "-sqrt(2)/2")][k as usize];
        let b = "sqrt(2+2*sqrt(2))";
        expressions.push([
            format!("1+sqrt(2)+{b}*({s})"),
            format!("{b}*({c})"),
            format!("{b}*({c})"),
            format!("1+sqrt(2)-{b}*({s})"),
        ]);
        mats.push(octagon_translation(k).to_f64());
    }
    let inverses: Vec<Mat2> = mats.iter().map(|m| [m[3], -m[1], -m[2], m[0]]).collect();
    mats.extend(inverses);
    SurfaceGroupPresentation {
        labels: with_inverse_labels(&labels),
        expressions,
        matrices: mats,
        relation: parse_word(&with_inverse_labels(&labels), BOLZA_RELATION).unwrap(),
        trace_field_note: "entries in Q(sqrt 2)(beta), beta^2 = 2 + 2 sqrt 2; traces 2 + 2 sqrt 2".into(),
        exact: true,
    }
}

/// Symbolic check of the built-in generators and relation.
pub fn bolza_exact_check() -> ExactCheck {
    let gens: Vec<ExactMatrix> = (0..4).map(octagon_translation).collect();
    let mut all = gens.clone();
    all.extend(gens.iter().map(ExactMatrix::adjugate));
    let unimodular = gens.iter().all(|g| g.det() == Tower::one());
    let traces = gens.iter().map(|g| render_tower(&g.trace())).collect();
    let p = bolza_generators();
    let relator = p.relation.iter().fold(ExactMatrix::identity(), |acc, &x| acc.mul(&all[x as usize]));
    ExactCheck { unimodular, traces, relator_is_identity: relator == ExactMatrix::identity() }
}

fn render_tower(t: &Tower) -> String {
    let part = |q: &QuadSqrt2| format!("{} + {}*sqrt(2)", q.p, q.q);
    if t.y.is_zero() { part(&t.x) } else { format!("({}) + ({})*beta", part(&t.x), part(&t.y)) }
}

fn with_inverse_labels(labels: &[char]) -> Vec<char> {
    let mut all = labels.to_vec();
    all.extend(labels.iter().map(|c| c.to_ascii_uppercase()));
    all
}

/// Parse a word in the labels of `full` (generators then inverses).
pub fn parse_word(full: &[char], s: &str) -> Result<Vec<Letter>> {
    s.chars()
        .map(|c| {
            full.iter()
                .position(|&l| l == c)
                .map(|i| i as Letter)
                .ok_or_else(|| SpectrumError::InvalidPresentation(format!("unknown letter {c:?} in {s:?}")))
        })
        .collect()
}

impl SurfaceGroupPresentation {
    pub fn from_file(file: &PresentationFile) -> Result<Self> {
        let n = file.labels.len();
        if n == 0 || file.generators.len() != n {
            return Err(SpectrumError::InvalidPresentation(format!(
                "{} labels but {} generator matrices",
                n,
                file.generators.len()
            )));
        }
        if file.labels.iter().any(|c| !c.is_ascii_lowercase()) {
            return Err(SpectrumError::InvalidPresentation("labels must be lower-case letters".into()));
        }
        let labels = with_inverse_labels(&file.labels);
        let mut expressions = Vec::new();
        let mut mats = Vec::new();
        for g in &file.generators {
            let e = [g[0][0].clone(), g[0][1].clone(), g[1][0].clone(), g[1][1].clone()];
            let m = [expr::evaluate(&e[0])?, expr::evaluate(&e[1])?, expr::evaluate(&e[2])?, expr::evaluate(&e[3])?];
            expressions.push(e);
            mats.push(m);
        }
        let inverses: Vec<Mat2> = mats.iter().map(|m| [m[3], -m[1], -m[2], m[0]]).collect();
        mats.extend(inverses);
        let relation = parse_word(&labels, &file.relation)?;
        let p = Self {
            labels,
            expressions,
            matrices: mats,
            relation,
            trace_field_note: file.trace_field_note.clone(),
            exact: false,
        };
        p.verify()?;
        Ok(p)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(s)?)
    }

    pub fn generator_count(&self) -> usize {
        self.expressions.len()
    }

    pub fn rules(&self) -> WordRules {
        WordRules::new(self.generator_count() as u8, &self.relation)
    }

    pub fn word_matrix(&self, w: &[Letter]) -> Mat2 {
        w.iter().fold(IDENTITY, |acc, &x| mat_mul(&acc, &self.matrices[x as usize]))
    }

    pub fn render(&self, w: &[Letter]) -> String {
        words::render(&self.labels, w)
    }

    pub fn parse(&self, s: &str) -> Result<Vec<Letter>> {
        parse_word(&self.labels, s)
    }

    /// Floating checks: unimodular, hyperbolic generators and a relation
    /// evaluating to `±I`.
    pub fn verify(&self) -> Result<PresentationCheck> {
        let n = self.generator_count();
        let mut max_det_drift: f64 = 0.0;
        let mut min_abs_trace = f64::INFINITY;
        for (i, m) in self.matrices[..n].iter().enumerate() {
            let drift = (mat_det(m) - 1.0).abs();
            max_det_drift = max_det_drift.max(drift);
            if drift > 1e-9 {
                return Err(SpectrumError::InvalidPresentation(format!(
                    "generator {} has determinant {}",
                    self.labels[i],
                    mat_det(m)
                )));
            }
            let t = (m[0] + m[3]).abs();
            min_abs_trace = min_abs_trace.min(t);
            if t <= 2.0 {
                return Err(SpectrumError::InvalidPresentation(format!(
                    "generator {} has trace {} and is not hyperbolic",
                    self.labels[i], t
                )));
            }
        }
        let r = self.word_matrix(&self.relation);
        let sign = if r[0] + r[3] >= 0.0 { 1.0 } else { -1.0 };
        let relator_residual = [r[0] - sign, r[1], r[2], r[3] - sign].iter().fold(0f64, |a, x| a.max(x.abs()));
        if relator_residual > 1e-8 {
            return Err(SpectrumError::InvalidPresentation(format!(
                "relation evaluates {relator_residual:e} away from the identity"
            )));
        }
        Ok(PresentationCheck { max_det_drift, min_abs_trace, relator_residual, exact: self.exact })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyClassRecord {
    pub canonical_word: String,
    pub trace: f64,
    pub length: f64,
    pub primitive: bool,
    /// Exponent over the primitive root, 1 for primitive classes.
    pub power: u32,
    pub power_of: Option<String>,
    pub orientation_partner: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDiagnostics {
    pub nodes_visited: u64,
    pub candidate_words: usize,
    pub recomputations: u64,
    /// Distinct classes whose traces agree within the tolerance without being
    /// orientation partners. They are kept apart.
    pub tolerance_collisions: usize,
    /// Candidate words whose trace disagrees with their canonical class.
    pub trace_checksum_failures: usize,
    pub closure_truncations: usize,
    pub unpaired_classes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthSpectrum {
    pub records: Vec<ConjugacyClassRecord>,
    pub max_word_length: usize,
    pub max_geodesic_length: f64,
    pub dedup_tolerance: f64,
    #[serde(default)]
    pub diagnostics: SpectrumDiagnostics,
}

#[derive(Clone, Debug, Serialize)]
pub struct LengthShell {
    pub length: f64,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyFit {
    pub entropy: f64,
    /// `log N(ℓ) ≈ intercept + entropy · ℓ` on the window.
    pub intercept: f64,
    pub window: (f64, f64),
    pub points: Vec<(f64, f64)>,
}

impl LengthSpectrum {
    pub fn empty(max_geodesic_length: f64) -> Self {
        Self {
            records: Vec::new(),
            max_word_length: 0,
            max_geodesic_length,
            dedup_tolerance: 1e-9,
            diagnostics: SpectrumDiagnostics::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn systole(&self) -> Option<f64> {
        self.records.first().map(|r| r.length)
    }

    pub fn primitive(&self) -> impl Iterator<Item = &ConjugacyClassRecord> {
        self.records.iter().filter(|r| r.primitive)
    }

    /// Records grouped into shells of equal length within the tolerance.
    pub fn shells(&self) -> Vec<LengthShell> {
        let mut out: Vec<LengthShell> = Vec::new();
        let tol = self.dedup_tolerance.max(1e-12);
        for r in &self.records {
            match out.last_mut() {
                Some(s) if (r.length - s.length).abs() <= tol * s.length.max(1.0) => s.count += 1,
                _ => out.push(LengthShell { length: r.length, count: 1 }),
            }
        }
        out
    }
}

/// Order by length, with lengths equal to nine decimals treated as ties
/// broken by the canonical word.
pub fn sort_records(records: &mut [ConjugacyClassRecord]) {
    records.sort_by_cached_key(|r| ((r.length * 1e9).round() as i64, r.canonical_word.clone()));
}

/// Number of oriented classes of length at most `ell`.
pub fn counting_function(spec: &LengthSpectrum, ell: f64) -> Result<usize> {
    if ell > spec.max_geodesic_length {
        return Err(SpectrumError::BeyondHorizon { ell, horizon: spec.max_geodesic_length });
    }
    Ok(spec.records.partition_point(|r| r.length <= ell))
}

/// Least-squares slope of `log N(ℓ)` over the upper half of the range
/// between the systole and the horizon.
pub fn entropy_fit(spec: &LengthSpectrum) -> Result<EntropyFit> {
    let shells = spec.shells();
    if shells.len() < 3 {
        return Err(SpectrumError::InsufficientData(format!(
            "{} length shells, at least 3 needed",
            shells.len()
        )));
    }
    let top = if spec.max_geodesic_length.is_finite() {
        spec.max_geodesic_length
    } else {
        shells.last().unwrap().length
    };
    let lo = 0.5 * (shells[0].length + top);
    let mut cumulative = 0usize;
    let mut points = Vec::new();
    for s in &shells {
        cumulative += s.count;
        if s.length >= lo {
            points.push((s.length, (cumulative as f64).ln()));
        }
    }
    if points.len() < 2 {
        return Err(SpectrumError::InsufficientData(format!(
            "{} shells in the fit window [{lo}, {top}]",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(SpectrumError::InsufficientData("degenerate fit window".into()));
    }
    let slope = sxy / sxx;
    Ok(EntropyFit { entropy: slope, intercept: my - slope * mx, window: (lo, top), points })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SYSTOLE: f64 = 3.057142;

    #[test]
    fn bolza_is_exact() {
        let c = bolza_exact_check();
        assert!(c.unimodular);
        assert!(c.relator_is_identity);
        assert!(c.traces.iter().all(|t| t == "2 + 2*sqrt(2)"));
    }

    #[test]
    fn bolza_floating_checks() {
        let p = bolza_generators();
        let check = p.verify().unwrap();
        assert!(check.max_det_drift < 1e-12);
        assert!((check.min_abs_trace - (2.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!(check.relator_residual < 1e-9);
        let t0 = p.matrices[0];
        assert!((t0[0] + t0[3] - 4.828427).abs() < 1e-6);
        let t2 = p.matrices[2];
        assert!((t2[0] + t2[3] - (t0[0] + t0[3])).abs() < 1e-12);
    }

    #[test]
    fn expressions_match_exact_matrices() {
        let p = bolza_generators();
        for (e, m) in p.expressions.iter().zip(&p.matrices) {
            for (s, v) in e.iter().zip(m) {
                assert!((expr::evaluate(s).unwrap() - v).abs() < 1e-12, "{s}");
            }
        }
    }

    #[test]
    fn lengths_from_traces() {
        let s = length_from_trace(2.0 + 2.0 * 2f64.sqrt()).unwrap();
        assert!((s - SYSTOLE).abs() < 1e-6);
        assert!((length_from_trace(-3.0).unwrap() - 1.924847).abs() < 1e-6);
        assert!(matches!(length_from_trace(2.0), Err(SpectrumError::NotHyperbolic { .. })));
        assert!(length_from_trace(f64::NAN).is_err());
    }

    #[test]
    fn json_presentation_round_trip() {
        let json = r#"{
            "labels": ["a","b","c","d"],
            "generators": [
              [["1+sqrt(2)", "sqrt(2+2*sqrt(2))"], ["sqrt(2+2*sqrt(2))", "1+sqrt(2)"]],
              [["1+sqrt(2)+sqrt(2+2*sqrt(2))*sqrt(2)/2", "sqrt(2+2*sqrt(2))*sqrt(2)/2"], ["sqrt(2+2*sqrt(2))*sqrt(2)/2", "1+sqrt(2)-sqrt(2+2*sqrt(2))*sqrt(2)/2"]],
              [["1+sqrt(2)+sqrt(2+2*sqrt(2))", "0"], ["0", "1+sqrt(2)-sqrt(2+2*sqrt(2))"]],
              [["1+sqrt(2)+sqrt(2+2*sqrt(2))*sqrt(2)/2", "-sqrt(2+2*sqrt(2))*sqrt(2)/2"], ["-sqrt(2+2*sqrt(2))*sqrt(2)/2", "1+sqrt(2)-sqrt(2+2*sqrt(2))*sqrt(2)/2"]]
            ],
            "relation": "aBcDAbCd"
        }"#;
        let p = SurfaceGroupPresentation::from_json(json).unwrap();
        let b = bolza_generators();
        for (x, y) in p.matrices.iter().zip(&b.matrices) {
            for k in 0..4 {
                assert!((x[k] - y[k]).abs() < 1e-12);
            }
        }
        assert_eq!(p.relation, b.relation);
    }

    #[test]
    fn bad_presentations_are_rejected() {
        let json = r#"{"labels":["a"],"generators":[[["2","0"],["0","2"]]],"relation":"aA"}"#;
        assert!(matches!(
            SurfaceGroupPresentation::from_json(json),
            Err(SpectrumError::InvalidPresentation(_))
        ));
        let json = r#"{"labels":["a"],"generators":[[["2","1"],["1","1"]]],"relation":"ab"}"#;
        assert!(SurfaceGroupPresentation::from_json(json).is_err());
    }

    fn synthetic(lengths: &[(f64, usize)]) -> LengthSpectrum {
        let mut spec = LengthSpectrum::empty(lengths.last().unwrap().0);
        for &(l, k) in lengths {
            for i in 0..k {
                spec.records.push(ConjugacyClassRecord {
                    canonical_word: format!("{l}-{i}"),
                    trace: 2.0 * (l / 2.0).cosh(),
                    length: l,
                    primitive: true,
                    power: 1,
                    power_of: None,
                    orientation_partner: String::new(),
                });
            }
        }
        spec
    }

    #[test]
    fn counting_and_horizon() {
        let spec = synthetic(&[(1.0, 2), (2.0, 4), (3.0, 8)]);
        assert_eq!(counting_function(&spec, 0.5).unwrap(), 0);
        assert_eq!(counting_function(&spec, 2.0).unwrap(), 6);
        assert_eq!(counting_function(&spec, 3.0).unwrap(), 14);
        assert!(matches!(counting_function(&spec, 3.5), Err(SpectrumError::BeyondHorizon { .. })));
    }

    #[test]
    fn entropy_of_exponential_growth() {
        let shells: Vec<(f64, usize)> = (1..=12).map(|k| (k as f64, (2f64.powi(k) as usize).max(1))).collect();
        let fit = entropy_fit(&synthetic(&shells)).unwrap();
        assert!((fit.entropy - 2f64.ln()).abs() < 0.05, "{}", fit.entropy);
        let doubled: Vec<(f64, usize)> = shells.iter().map(|&(l, k)| (l, 2 * k)).collect();
        let fit2 = entropy_fit(&synthetic(&doubled)).unwrap();
        assert!((fit.entropy - fit2.entropy).abs() < 1e-9);
    }

    #[test]
    fn single_shell_is_insufficient() {
        let spec = synthetic(&[(3.0, 8)]);
        assert!(matches!(entropy_fit(&spec), Err(SpectrumError::InsufficientData(_))));
    }
}
