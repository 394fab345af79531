//! The multiplicity integral reduced to base-point algebra.
//!
//! By invariance, `∫_{S(X)} φ*(Ω^± ∧ α^∓)` equals the top coefficient of the
//! integrand per unit Sasaki volume times `vol(S(X)) = vol(S^{d−1}) vol(X)`,
//! and Gauss–Bonnet turns `vol(X)` into `χ(X)` divided by the Pfaffian
//! density. The resulting ratio `r = m₀ / χ(X)` is an exact rational.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::sync::OnceLock;
use thiserror::Error;

use crate::exec::Execution;
use crate::forms::{
    alpha_from_mu, capital_omega_r, contact_two_form, form_ambient, mu_r, wedge, ExteriorForm,
    FormError, ScaledScalar, Sign,
};
use crate::lie::{build_model, Family, LieAlgebraModel, LieError, Root};
use crate::linalg::{CoordinateSolver, RationalMatrix};
use crate::rational::{exact_sqrt, int, to_i64, Rational, RationalRepr};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MultiplicityError {
    #[error("the multiplicity integral needs even dim(X); got {0}")]
    OddDimension(usize),
    #[error("calibration on the real hyperbolic plane failed: {0}")]
    CalibrationMissing(String),
    #[error("the two integrands disagree: {plus} vs {minus}")]
    MismatchedSigns { plus: String, minus: String },
    #[error("r * chi = {value} is not an integer")]
    NonIntegerMultiplicity { value: String },
    #[error("{0} is not the real hyperbolic plane")]
    WrongFamily(Family),
    #[error("Sasaki Gram determinant {0} is not a rational square")]
    NonSquareVolume(String),
    #[error("{0} is not a real rational")]
    NotRational(String),
    #[error("Liouville form vanishes")]
    DegenerateOrientation,
    #[error(transparent)]
    Forms(#[from] FormError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

fn half_sum(x: &RationalMatrix) -> RationalMatrix {
    (x + &x.transpose()).scale(&Rational::new(BigInt::one(), BigInt::from(2)))
}

fn half_diff(x: &RationalMatrix) -> RationalMatrix {
    (x - &x.transpose()).scale(&Rational::new(BigInt::one(), BigInt::from(2)))
}

/// Basis `(H0, P_1, …, P_{d−1})` of `p₀`,
/// `P_j = (Z_j + Z_jᵀ)/2` for `Z_j ∈ n₀⁺`.
fn tangent_basis(model: &LieAlgebraModel) -> Vec<RationalMatrix> {
    let mut out = vec![model.matrix(model.h0_index()).clone()];
    out.extend(model.nplus_indices().map(|i| half_sum(model.matrix(i))));
    out
}

/// `⟨A, B⟩ = tr(AB) / tr(H0²)`, the metric with `|H0| = 1`.
fn metric(model: &LieAlgebraModel) -> impl Fn(&RationalMatrix, &RationalMatrix) -> Rational + '_ {
    let h0 = model.matrix(model.h0_index());
    let norm = h0.trace_pairing(h0);
    move |a, b| a.trace_pairing(b) / &norm
}

fn pfaffian(omega: &[Vec<ExteriorForm>], idx: &[usize], ambient: usize) -> ExteriorForm {
    if idx.is_empty() {
        return ExteriorForm::constant(ambient, ScaledScalar::one());
    }
    let first = idx[0];
    let mut total = ExteriorForm::zero(ambient, idx.len());
    for (pos, &j) in idx.iter().enumerate().skip(1) {
        let entry = &omega[first][j];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx[1..].iter().copied().filter(|&x| x != j).collect();
        let term = wedge(entry, &pfaffian(omega, &rest, ambient)).expect("degree fits");
        let term = if pos % 2 == 0 { term.scaled(&ScaledScalar::rational(int(-1))) } else { term };
        total = total.checked_add(&term).expect("common scale");
    }
    total
}

/// Euler density `Pf(Ω)/(2π)^{d/2}` of the symmetric metric, relative to the
/// Riemannian volume, with curvature `R(X, Y)Z = −[[X, Y], Z]` on `p₀`.
pub fn pfaffian_euler_density(model: &LieAlgebraModel) -> Result<ScaledScalar, MultiplicityError> {
    let d = model.space_dim();
    if d % 2 == 1 {
        return Err(MultiplicityError::OddDimension(d));
    }
    let basis = tangent_basis(model);
    let ip = metric(model);
    let g = RationalMatrix::from_fn(d, d, |i, j| ip(&basis[i], &basis[j]));
    let solver = CoordinateSolver::new(&basis)
        .ok_or_else(|| LieError::DegenerateRank("p0 basis is dependent".into()))?;
    let mut omega = vec![vec![ExteriorForm::zero(d, 2); d]; d];
    for a in 0..d {
        for b in a + 1..d {
            let xy = basis[a].commutator(&basis[b]);
            for j in 0..d {
                let image = -&xy.commutator(&basis[j]);
                let v = solver.coordinates(&image).ok_or_else(|| {
                    LieError::DegenerateRank("curvature leaves the tangent space".into())
                })?;
                for i in 0..d {
                    let lowered = (0..d).fold(Rational::zero(), |acc, l| acc + &g[(i, l)] * &v[l]);
                    if lowered.is_zero() {
                        continue;
                    }
                    let term = ExteriorForm::from_terms(d, 2, [(vec![a, b], lowered)])?;
                    omega[i][j] = omega[i][j].checked_add(&term)?;
                }
            }
        }
    }
    let idx: Vec<usize> = (0..d).collect();
    let pf = pfaffian(&omega, &idx, d).top_coefficient();
    let two_pow = Rational::from_integer(BigInt::from(2).pow(d as u32 / 2));
    Ok(ScaledScalar::new(pf.q / g.determinant() / two_pow, -(d as i32) / 2, 0))
}

/// `vol(S^{d−1}) = 2π^{d/2} / (d/2 − 1)!` for even `d`.
pub fn sphere_volume(d: usize) -> ScaledScalar {
    let half = d / 2;
    let fact: BigInt = (1..half).map(BigInt::from).product();
    ScaledScalar::new(Rational::new(BigInt::from(2), fact), half as i32, 0)
}

/// Sasaki volume of the frame `(H0, n₀⁺, n₀⁻)`: the `p₀` part measures the
/// base, the `k₀` part acts on `H0` to give the fibre direction.
pub fn sasaki_volume(model: &LieAlgebraModel) -> Result<Rational, MultiplicityError> {
    let h0 = model.matrix(model.h0_index()).clone();
    let ip = metric(model);
    let frame: Vec<usize> = std::iter::once(model.h0_index())
        .chain(model.nplus_indices())
        .chain(model.nminus_indices())
        .collect();
    let parts: Vec<(RationalMatrix, RationalMatrix)> = frame
        .iter()
        .map(|&i| {
            let x = model.matrix(i);
            (half_sum(x), half_diff(x).commutator(&h0))
        })
        .collect();
    let n = frame.len();
    let gram = RationalMatrix::from_fn(n, n, |i, j| {
        ip(&parts[i].0, &parts[j].0) + ip(&parts[i].1, &parts[j].1)
    });
    let det = gram.determinant();
    exact_sqrt(&det).ok_or_else(|| MultiplicityError::NonSquareVolume(det.to_string()))
}

/// Sign of `H0* ∧ κ^{d−1}` on the frame `(H0, n₀⁺, n₀⁻)`.
pub fn liouville_orientation(model: &LieAlgebraModel) -> Result<i64, MultiplicityError> {
    let kappa = contact_two_form(model);
    let mut acc = ExteriorForm::covector(form_ambient(model), 0)?;
    for _ in 0..model.n_dim() {
        acc = wedge(&acc, &kappa)?;
    }
    let c = acc.top_coefficient();
    if c.is_zero() {
        return Err(MultiplicityError::DegenerateOrientation);
    }
    Ok(if c.q.is_positive() { 1 } else { -1 })
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegrandDiagnostics {
    /// Sign of `Ω` in the integrand `Ω^± ∧ α^∓`.
    pub sign: Sign,
    pub top_coefficient: ScaledScalar,
    pub normalized_density: ScaledScalar,
    pub mu_lambda: RationalRepr,
    pub mu_root: Root,
    pub ratio: RationalRepr,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiplicityRatio {
    pub family: Family,
    pub d: usize,
    #[serde(serialize_with = "ser_rational")]
    pub ratio: Rational,
    pub signs_agree: bool,
    pub integrands: Vec<IntegrandDiagnostics>,
    pub pfaffian_density: ScaledScalar,
    pub fiber_volume: ScaledScalar,
    #[serde(serialize_with = "ser_rational")]
    pub sasaki_volume: Rational,
    pub orientation: i64,
    #[serde(serialize_with = "ser_rational")]
    pub calibration: Rational,
}

fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    RationalRepr::from(q).serialize(s)
}

fn real_rational(x: &ScaledScalar) -> Result<Rational, MultiplicityError> {
    if x.pi_pow == 0 && x.i_pow == 0 {
        Ok(x.q.clone())
    } else {
        Err(MultiplicityError::NotRational(x.to_string()))
    }
}

struct Uncalibrated {
    density: Vec<(Sign, ScaledScalar, ScaledScalar, Rational, Root)>,
    pfaffian: ScaledScalar,
    fiber: ScaledScalar,
    sasaki: Rational,
    orientation: i64,
}

impl Uncalibrated {
    /// Ratio for one integrand before calibration.
    fn raw(&self, normalized: &ScaledScalar) -> Result<Rational, MultiplicityError> {
        let pf_inv = self
            .pfaffian
            .recip()
            .ok_or_else(|| MultiplicityError::NotRational("zero Pfaffian".into()))?;
        real_rational(&(&(normalized * &self.fiber) * &pf_inv))
    }
}

fn uncalibrated(model: &LieAlgebraModel, exec: Execution) -> Result<Uncalibrated, MultiplicityError> {
    let d = model.space_dim();
    if d % 2 == 1 {
        return Err(MultiplicityError::OddDimension(d));
    }
    let sasaki = sasaki_volume(model)?;
    let orientation = liouville_orientation(model)?;
    let unit = ScaledScalar::rational((sasaki.clone() * int(orientation)).recip());
    let mut density = Vec::new();
    for sign in [Sign::Plus, Sign::Minus] {
        let omega = capital_omega_r(model, sign, exec)?;
        let mu = mu_r(model, sign.opposite(), exec)?;
        let alpha = alpha_from_mu(model, &mu);
        let top = wedge(&omega, &alpha)?.top_coefficient();
        let normalized = &top * &unit;
        density.push((sign, top, normalized, mu.lambda, mu.root));
    }
    Ok(Uncalibrated {
        density,
        pfaffian: pfaffian_euler_density(model)?,
        fiber: sphere_volume(d),
        sasaki,
        orientation,
    })
}

static CALIBRATION: OnceLock<Result<Rational, String>> = OnceLock::new();

/// The constant `σ` making the real hyperbolic plane give `m₀ = χ(X)`.
pub fn calibration() -> Result<Rational, MultiplicityError> {
    CALIBRATION
        .get_or_init(|| {
            let model = build_model(Family::RealHyperbolic(2)).map_err(|e| e.to_string())?;
            let u = uncalibrated(&model, Execution::Sequential).map_err(|e| e.to_string())?;
            let raw = u.raw(&u.density[0].2).map_err(|e| e.to_string())?;
            if raw.is_zero() {
                return Err("anchor integrand vanishes".into());
            }
            Ok(raw.recip())
        })
        .clone()
        .map_err(MultiplicityError::CalibrationMissing)
}

pub fn multiplicity_ratio(family: Family) -> Result<MultiplicityRatio, MultiplicityError> {
    multiplicity_ratio_with(family, Execution::default())
}

pub fn multiplicity_ratio_with(
    family: Family,
    exec: Execution,
) -> Result<MultiplicityRatio, MultiplicityError> {
    let d = family.dim() as usize;
    if d % 2 == 1 {
        return Err(MultiplicityError::OddDimension(d));
    }
    let sigma = calibration()?;
    let model = build_model(family)?;
    let u = uncalibrated(&model, exec)?;
    let mut integrands = Vec::new();
    for (sign, top, normalized, lambda, root) in &u.density {
        let ratio = u.raw(normalized)? * &sigma;
        integrands.push((
            ratio.clone(),
            IntegrandDiagnostics {
                sign: *sign,
                top_coefficient: top.clone(),
                normalized_density: normalized.clone(),
                mu_lambda: RationalRepr::from(lambda),
                mu_root: *root,
                ratio: RationalRepr::from(&ratio),
            },
        ));
    }
    let (plus, minus) = (&integrands[0].0, &integrands[1].0);
    if plus != minus {
        return Err(MultiplicityError::MismatchedSigns {
            plus: plus.to_string(),
            minus: minus.to_string(),
        });
    }
    Ok(MultiplicityRatio {
        family,
        d,
        ratio: plus.clone(),
        signs_agree: true,
        integrands: integrands.into_iter().map(|(_, diag)| diag).collect(),
        pfaffian_density: u.pfaffian,
        fiber_volume: u.fiber,
        sasaki_volume: u.sasaki,
        orientation: u.orientation,
        calibration: sigma,
    })
}

pub fn multiplicity_from_chi(family: Family, chi: i64) -> Result<i64, MultiplicityError> {
    let r = multiplicity_ratio(family)?;
    multiplicity_from_ratio(&r.ratio, chi)
}

pub fn multiplicity_from_ratio(ratio: &Rational, chi: i64) -> Result<i64, MultiplicityError> {
    let value = ratio * int(chi);
    to_i64(&value).ok_or_else(|| MultiplicityError::NonIntegerMultiplicity { value: value.to_string() })
}

#[derive(Debug, Clone, Serialize)]
pub struct GodbillonVey {
    pub genus: u32,
    pub chi: i64,
    /// `4π²` times the calibrated integrand per unit Sasaki volume.
    pub density: ScaledScalar,
    /// `density · vol(S(X))`, expected to be `4π² χ(X)`.
    pub integral: ScaledScalar,
}

/// `4π² φ*(Ω⁺ ∧ α⁻)` per unit volume of the unit tangent bundle of a surface.
pub fn godbillon_vey_density(model: &LieAlgebraModel) -> Result<ScaledScalar, MultiplicityError> {
    if model.family() != Family::RealHyperbolic(2) {
        return Err(MultiplicityError::WrongFamily(model.family()));
    }
    let u = uncalibrated(model, Execution::Sequential)?;
    let sigma = ScaledScalar::rational(calibration()?);
    let four_pi_sq = ScaledScalar::new(int(4), 2, 0);
    Ok(&(&four_pi_sq * &u.density[0].2) * &sigma)
}

pub fn godbillon_vey(genus: u32) -> Result<GodbillonVey, MultiplicityError> {
    let model = build_model(Family::RealHyperbolic(2))?;
    let density = godbillon_vey_density(&model)?;
    let chi = 2 - 2 * genus as i64;
    // vol(S(X)) = vol(S¹) · χ / (Euler density)
    let pf = pfaffian_euler_density(&model)?;
    let volume = &(&sphere_volume(2) * &ScaledScalar::rational(int(chi))) * &pf.recip().expect("nonzero");
    Ok(GodbillonVey { genus, chi, integral: &density * &volume, density })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn plane_density_and_anchor() {
        let model = build_model(Family::RealHyperbolic(2)).unwrap();
        assert_eq!(pfaffian_euler_density(&model).unwrap(), ScaledScalar::new(rat(-1, 2), -1, 0));
        let r = multiplicity_ratio(Family::RealHyperbolic(2)).unwrap();
        assert_eq!(r.ratio, int(1));
        assert_eq!(r.calibration, int(1));
    }

    #[test]
    fn sphere_volumes() {
        assert_eq!(sphere_volume(2), ScaledScalar::new(int(2), 1, 0));
        assert_eq!(sphere_volume(4), ScaledScalar::new(int(2), 2, 0));
        assert_eq!(sphere_volume(6), ScaledScalar::new(int(1), 3, 0));
    }

    #[test]
    fn four_dimensional_densities() {
        // χ(S⁴) = 2 = vol(S⁴) · 3/(4π²), vol(S⁴) = 8π²/3.
        let rh4 = build_model(Family::RealHyperbolic(4)).unwrap();
        assert_eq!(pfaffian_euler_density(&rh4).unwrap(), ScaledScalar::new(rat(3, 4), -2, 0));
        let ch2 = build_model(Family::ComplexHyperbolic(2)).unwrap();
        let pf = pfaffian_euler_density(&ch2).unwrap();
        assert_eq!((pf.pi_pow, pf.i_pow), (-2, 0));
        assert!(pf.q.is_positive());
    }

    #[test]
    fn odd_dimension_rejected() {
        let rh3 = build_model(Family::RealHyperbolic(3)).unwrap();
        assert!(matches!(pfaffian_euler_density(&rh3), Err(MultiplicityError::OddDimension(3))));
        assert!(matches!(
            multiplicity_ratio(Family::RealHyperbolic(5)),
            Err(MultiplicityError::OddDimension(5))
        ));
    }

    #[test]
    fn ratios_in_low_dimension() {
        for (family, r) in [
            (Family::RealHyperbolic(4), 2),
            (Family::ComplexHyperbolic(1), 1),
            (Family::ComplexHyperbolic(2), 2),
            (Family::QuaternionicHyperbolic(1), 2),
        ] {
            let m = multiplicity_ratio(family).unwrap();
            assert_eq!(m.ratio, int(r), "{family}");
            assert!(m.signs_agree);
        }
    }

    #[test]
    fn chi_products() {
        assert_eq!(multiplicity_from_chi(Family::RealHyperbolic(2), -2).unwrap(), -2);
        assert_eq!(multiplicity_from_chi(Family::RealHyperbolic(4), -4).unwrap(), -8);
        assert!(matches!(
            multiplicity_from_ratio(&rat(1, 2), 3),
            Err(MultiplicityError::NonIntegerMultiplicity { .. })
        ));
    }

    #[test]
    fn godbillon_vey_genus_two() {
        let gv = godbillon_vey(2).unwrap();
        assert!(gv.density.is_real());
        assert_eq!(gv.integral, ScaledScalar::new(int(-8), 2, 0));
        let rh4 = build_model(Family::RealHyperbolic(4)).unwrap();
        assert!(matches!(godbillon_vey_density(&rh4), Err(MultiplicityError::WrongFamily(_))));
    }
}
