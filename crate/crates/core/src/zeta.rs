//! Truncated Euler products for the Ruelle and Selberg zeta functions of a
//! surface over an enumerated length spectrum, and the factors in their
//! functional equations.

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exec::Execution;
use crate::quadrature::{integrate_segment, QuadratureError, QuadratureOptions};
use crate::spectrum::{entropy_fit, LengthSpectrum, SpectrumError};

#[derive(Debug, Error)]
pub enum ZetaError {
    #[error("Re(s) = {re} is outside the convergence region Re(s) > {threshold} (entropy {entropy} + margin)")]
    OutsideConvergence { re: f64, threshold: f64, entropy: f64 },
    #[error("s = {s} is an integer and the functional-equation factor has a pole there")]
    PoleAtInteger { s: Complex64 },
    #[error("the path from 0 to {end} passes within {distance:e} of the pole at {pole}")]
    PathNearPole { end: Complex64, pole: f64, distance: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

pub type Result<T> = std::result::Result<T, ZetaError>;

pub const DEFAULT_MARGIN: f64 = 0.2;
const POLE_CLEARANCE: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub struct TruncationParams {
    pub max_geodesic_length: f64,
    pub selberg_n_max: usize,
    /// Required gap between `Re(s)` and the entropy estimate.
    pub margin: f64,
    /// Entropy used for convergence and tail bounds; fitted when absent.
    pub entropy: Option<f64>,
    #[serde(skip)]
    pub exec: Execution,
}

impl TruncationParams {
    pub fn new(max_geodesic_length: f64) -> Self {
        Self { max_geodesic_length, selberg_n_max: 20, margin: DEFAULT_MARGIN, entropy: None, exec: Execution::default() }
    }

    pub fn for_spectrum(spec: &LengthSpectrum) -> Self {
        Self::new(spec.max_geodesic_length)
    }

    pub fn with_n_max(mut self, n: usize) -> Self {
        self.selberg_n_max = n;
        self
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }
}

fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Parts {
        re: f64,
        im: f64,
    }
    Parts { re: z.re, im: z.im }.serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexEval {
    #[serde(serialize_with = "ser_complex")]
    pub s: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub log_value: Complex64,
    /// Bound on `|log Z − log Z_truncated|`, length tail plus `N` tail.
    pub truncation_bound: f64,
    /// The part of the bound coming from cutting the `N` product.
    pub n_tail_bound: f64,
    pub factors: usize,
    pub entropy: f64,
}

/// Growth model `N(ℓ) ≈ exp(intercept + h ℓ)` beyond the cutoff, or none
/// when the spectrum is too small to fit and is taken as complete.
#[derive(Clone, Copy, Debug)]
struct TailModel {
    entropy: f64,
    intercept: Option<f64>,
}

fn tail_model(spec: &LengthSpectrum, params: &TruncationParams) -> Result<TailModel> {
    if spec.is_empty() {
        return Ok(TailModel { entropy: 0.0, intercept: None });
    }
    if let Some(h) = params.entropy {
        let n = spec.records.iter().filter(|r| r.length <= params.max_geodesic_length).count().max(1);
        return Ok(TailModel { entropy: h, intercept: Some((n as f64).ln() - h * params.max_geodesic_length) });
    }
    match entropy_fit(spec) {
        Ok(fit) => Ok(TailModel { entropy: fit.entropy, intercept: Some(fit.intercept) }),
        Err(SpectrumError::InsufficientData(_)) => Ok(TailModel { entropy: 0.0, intercept: None }),
        Err(e) => Err(e.into()),
    }
}

impl TailModel {
    fn check(&self, s: Complex64, margin: f64) -> Result<()> {
        let threshold = self.entropy + margin;
        if !(s.re > threshold) {
            return Err(ZetaError::OutsideConvergence { re: s.re, threshold, entropy: self.entropy });
        }
        Ok(())
    }

    /// Bound on `Σ_{ℓ > L} |log(1 − e^{−sℓ})|` from the density `h A e^{hℓ}`.
    fn length_tail(&self, sigma: f64, cutoff: f64) -> f64 {
        match self.intercept {
            None => 0.0,
            Some(c) => {
                let h = self.entropy;
                h.max(0.0) * (c + (h - sigma) * cutoff).exp() / ((sigma - h) * (1.0 - (-sigma * cutoff).exp()))
            }
        }
    }
}

fn validate(spec: &LengthSpectrum, params: &TruncationParams) -> Result<()> {
    if !(params.max_geodesic_length > 0.0) {
        return Err(ZetaError::InvalidParameter("max_geodesic_length must be positive".into()));
    }
    if params.max_geodesic_length > spec.max_geodesic_length * (1.0 + 1e-12) && !spec.is_empty() {
        return Err(SpectrumError::BeyondHorizon {
            ell: params.max_geodesic_length,
            horizon: spec.max_geodesic_length,
        }
        .into());
    }
    if !(params.margin >= 0.0) {
        return Err(ZetaError::InvalidParameter("margin must be non-negative".into()));
    }
    Ok(())
}

/// Compensated (Neumaier) sum.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in xs {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + comp
}

fn complex_sum(xs: &[Complex64]) -> Complex64 {
    Complex64::new(neumaier_sum(xs.iter().map(|z| z.re)), neumaier_sum(xs.iter().map(|z| z.im)))
}

/// Principal `log(1 − e^{−s ℓ})`.
fn log_one_minus_exp(s: Complex64, ell: f64) -> Complex64 {
    let x = (-s * ell).exp();
    if x.norm() < 1e-8 {
        // series keeps full relative accuracy for tiny x
        -(x + x * x / 2.0 + x * x * x / 3.0)
    } else {
        (Complex64::new(1.0, 0.0) - x).ln()
    }
}

fn primitive_lengths(spec: &LengthSpectrum, cutoff: f64) -> Vec<f64> {
    spec.records.iter().filter(|r| r.primitive && r.length <= cutoff).map(|r| r.length).collect()
}

/// `Z_R(s) = ∏_c (1 − e^{−s ℓ_c})^{−1}` over oriented primitive classes.
pub fn ruelle_zeta(spec: &LengthSpectrum, s: Complex64, params: &TruncationParams) -> Result<ComplexEval> {
    validate(spec, params)?;
    let model = tail_model(spec, params)?;
    model.check(s, params.margin)?;
    let lengths = primitive_lengths(spec, params.max_geodesic_length);
    let logs = params.exec.map(&lengths, |&l| -log_one_minus_exp(s, l));
    let log_value = complex_sum(&logs);
    Ok(ComplexEval {
        s,
        value: log_value.exp(),
        log_value,
        truncation_bound: model.length_tail(s.re, params.max_geodesic_length),
        n_tail_bound: 0.0,
        factors: lengths.len(),
        entropy: model.entropy,
    })
}

/// `Z_S(s) = ∏_c ∏_{N ≥ 0} (1 − e^{−(s+N) ℓ_c})`, the inner product cut at
/// `selberg_n_max`.
pub fn selberg_zeta(spec: &LengthSpectrum, s: Complex64, params: &TruncationParams) -> Result<ComplexEval> {
    validate(spec, params)?;
    let model = tail_model(spec, params)?;
    model.check(s, params.margin)?;
    let lengths = primitive_lengths(spec, params.max_geodesic_length);
    let n_max = params.selberg_n_max;
    let logs = params.exec.map(&lengths, |&l| {
        let inner: Vec<Complex64> = (0..=n_max).map(|n| log_one_minus_exp(s + n as f64, l)).collect();
        complex_sum(&inner)
    });
    let log_value = complex_sum(&logs);
    let first_cut = s.re + n_max as f64 + 1.0;
    let n_tail = neumaier_sum(lengths.iter().map(|&l| {
        let x = (-first_cut * l).exp();
        x / ((1.0 - (-l).exp()) * (1.0 - x))
    }));
    let cutoff = params.max_geodesic_length;
    let length_tail = model.length_tail(s.re, cutoff) / (1.0 - (-cutoff).exp());
    Ok(ComplexEval {
        s,
        value: log_value.exp(),
        log_value,
        truncation_bound: length_tail + n_tail,
        n_tail_bound: n_tail,
        factors: lengths.len(),
        entropy: model.entropy,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientCheck {
    pub residual: f64,
    /// Residual bound implied by the two `N` tails.
    pub residual_bound: f64,
    pub ruelle: ComplexEval,
    pub selberg_s: ComplexEval,
    pub selberg_s_plus_one: ComplexEval,
}

/// `|Z_R(s) − Z_S(s+1) / Z_S(s)|` on a common class set and cutoff.
pub fn check_quotient_identity(spec: &LengthSpectrum, s: Complex64, params: &TruncationParams) -> Result<QuotientCheck> {
    let ruelle = ruelle_zeta(spec, s, params)?;
    let selberg_s = selberg_zeta(spec, s, params)?;
    let selberg_s_plus_one = selberg_zeta(spec, s + 1.0, params)?;
    let quotient = (selberg_s_plus_one.log_value - selberg_s.log_value).exp();
    let residual = (ruelle.value - quotient).norm();
    let residual_bound =
        ruelle.value.norm() * ((selberg_s.n_tail_bound + selberg_s_plus_one.n_tail_bound).exp_m1()) + f64::EPSILON;
    Ok(QuotientCheck { residual, residual_bound, ruelle, selberg_s, selberg_s_plus_one })
}

/// `((1 − e^{2πis})(1 − e^{−2πis}))^{2−2g} = (4 sin²(πs))^{2−2g}`.
pub fn ruelle_fe_rhs(s: Complex64, genus: u32) -> Result<Complex64> {
    let k = 2 - 2 * genus as i64;
    if k == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let sin = (s * std::f64::consts::PI).sin();
    if k < 0 && sin.norm() < 1e-12 {
        return Err(ZetaError::PoleAtInteger { s });
    }
    let base = sin * sin * 4.0;
    let k = i32::try_from(k).map_err(|_| ZetaError::InvalidParameter(format!("genus {genus} too large")))?;
    Ok(base.powi(k))
}

/// Nearest pole of `tan(πt)` to the segment from 0 to `end`, with its distance.
fn nearest_pole(end: Complex64) -> (f64, f64) {
    let lo = end.re.min(0.0).floor() - 1.0;
    let hi = end.re.max(0.0).ceil() + 1.0;
    let mut best = (f64::NAN, f64::INFINITY);
    let mut k = lo;
    while k <= hi {
        let p = Complex64::new(k + 0.5, 0.0);
        let len2 = end.norm_sqr();
        let t = if len2 == 0.0 { 0.0 } else { ((p * end.conj()).re / len2).clamp(0.0, 1.0) };
        let d = (p - end * t).norm();
        if d < best.1 {
            best = (p.re, d);
        }
        k += 1.0;
    }
    best
}

/// `exp(2(2 − 2g) ∫_0^{s−1/2} π t tan(π t) dt)` along the straight segment.
pub fn selberg_fe_factor(s: Complex64, genus: u32) -> Result<Complex64> {
    let end = s - 0.5;
    let (pole, distance) = nearest_pole(end);
    if distance <= POLE_CLEARANCE {
        return Err(ZetaError::PathNearPole { end, pole, distance });
    }
    let k = 2.0 - 2.0 * genus as f64;
    if k == 0.0 || end == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let pi = std::f64::consts::PI;
    let integral = integrate_segment(
        |t: Complex64| t * pi * (t * pi).tan(),
        Complex64::new(0.0, 0.0),
        end,
        QuadratureOptions::default(),
    )?;
    Ok((integral.value * (2.0 * k)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::ConjugacyClassRecord;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(ell: f64) -> LengthSpectrum {
        let mut spec = LengthSpectrum::empty(ell);
        spec.records.push(ConjugacyClassRecord {
            canonical_word: "a".into(),
            trace: 2.0 * (ell / 2.0).cosh(),
            length: ell,
            primitive: true,
            power: 1,
            power_of: None,
            orientation_partner: "A".into(),
        });
        spec
    }

    #[test]
    fn empty_products_are_one() {
        let spec = LengthSpectrum::empty(10.0);
        let p = TruncationParams::new(10.0);
        let s = c(1.5, 0.3);
        assert_eq!(ruelle_zeta(&spec, s, &p).unwrap().value, c(1.0, 0.0));
        assert_eq!(selberg_zeta(&spec, s, &p).unwrap().value, c(1.0, 0.0));
        assert_eq!(check_quotient_identity(&spec, s, &p).unwrap().residual, 0.0);
    }

    #[test]
    fn single_class_products() {
        let spec = single(3.0);
        let p = TruncationParams::new(3.0).with_n_max(0);
        let r = ruelle_zeta(&spec, c(2.0, 0.0), &p).unwrap();
        assert!((r.value.re - 1.0 / (1.0 - (-6f64).exp())).abs() < 1e-15);
        assert!((r.value.re - 1.0024845).abs() < 1e-6);
        assert!(r.value.im.abs() < 1e-15);
        let z = selberg_zeta(&spec, c(2.0, 0.0), &p).unwrap();
        assert!((z.value.re - 0.9975212).abs() < 1e-7);
        let q = check_quotient_identity(&spec, c(2.0, 0.0), &TruncationParams::new(3.0).with_n_max(30)).unwrap();
        assert!(q.residual < 1e-10);
        assert!(q.residual <= q.residual_bound);
    }

    #[test]
    fn refuses_outside_convergence() {
        let spec = single(3.0);
        let p = TruncationParams::new(3.0);
        assert!(matches!(ruelle_zeta(&spec, c(0.1, 0.0), &p), Err(ZetaError::OutsideConvergence { .. })));
        let p = TruncationParams { entropy: Some(1.0), ..TruncationParams::new(3.0) };
        assert!(matches!(selberg_zeta(&spec, c(1.1, 5.0), &p), Err(ZetaError::OutsideConvergence { .. })));
        assert!(ruelle_zeta(&spec, c(1.3, 5.0), &p).is_ok());
    }

    #[test]
    fn ruelle_rhs_values() {
        let v = ruelle_fe_rhs(c(0.5, 0.0), 2).unwrap();
        assert!((v - c(0.0625, 0.0)).norm() < 1e-15);
        assert_eq!(ruelle_fe_rhs(c(0.37, 1.2), 1).unwrap(), c(1.0, 0.0));
        assert!(matches!(ruelle_fe_rhs(c(2.0, 0.0), 2), Err(ZetaError::PoleAtInteger { .. })));
        assert!(ruelle_fe_rhs(c(2.0, 0.0), 0).is_ok());
    }

    #[test]
    fn selberg_factor_values() {
        assert_eq!(selberg_fe_factor(c(0.5, 0.0), 2).unwrap(), c(1.0, 0.0));
        assert_eq!(selberg_fe_factor(c(0.3, 0.7), 1).unwrap(), c(1.0, 0.0));
        let s = c(0.3, 0.7);
        let prod = selberg_fe_factor(s, 2).unwrap() * selberg_fe_factor(c(1.0, 0.0) - s, 2).unwrap();
        assert!((prod - c(1.0, 0.0)).norm() < 1e-10);
        assert!(matches!(selberg_fe_factor(c(1.0005, 0.0), 2), Err(ZetaError::PathNearPole { .. })));
        assert!(matches!(selberg_fe_factor(c(1.0, 0.0), 2), Err(ZetaError::PathNearPole { .. })));
    }

    #[test]
    fn selberg_factor_small_argument() {
        // ∫_0^w πt tan(πt) dt = π² w³/3 + π⁴ w⁵/15 + O(w⁷)
        let w = 1e-3;
        let pi = std::f64::consts::PI;
        let f = selberg_fe_factor(c(0.5 + w, 0.0), 2).unwrap();
        let expected = (-4.0 * (pi.powi(2) * w.powi(3) / 3.0 + pi.powi(4) * w.powi(5) / 15.0)).exp();
        assert!((f.re - expected).abs() < 1e-14);
    }

    #[test]
    fn compensated_sum() {
        assert_eq!(neumaier_sum([1.0, 1e100, 1.0, -1e100]), 2.0);
    }
}
