use std::path::Path;
use std::str::FromStr;

use clap::ValueEnum;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use ruelle_core::euler::{
    euler_table as table_rows, multiplicity_cor1, multiplicity_thm2, multiplicity_thm3, BettiVector, EulerRow,
};
use ruelle_core::exec::Execution;
use ruelle_core::forms::{check_forms, FormsReport, ScaledScalar};
use ruelle_core::lie::{build_model, Family};
use ruelle_core::multiplicity::{godbillon_vey, multiplicity_from_ratio, multiplicity_ratio, GodbillonVey, MultiplicityRatio};
use ruelle_core::rational::int;
use ruelle_core::spectrum::csv::{read_csv, to_csv_string};
use ruelle_core::spectrum::{
    bolza_exact_check, bolza_generators, entropy_fit, enumerate_with, EnumerationParams, ExactCheck, LengthShell,
    LengthSpectrum, PresentationCheck, SpectrumDiagnostics, SurfaceGroupPresentation,
};
use ruelle_core::zeta::{
    check_quotient_identity, ruelle_fe_rhs, ruelle_zeta, selberg_fe_factor, selberg_zeta, ComplexEval,
    TruncationParams, DEFAULT_MARGIN,
};

use crate::config::Config;
use crate::error::{CliError, Result};
use crate::report::{envelope, RunManifest};
use crate::{
    EntropyArgs, EulerTableArgs, FamilyArgs, FamilyKind, FormsCheckArgs, MultiplicityArgs, SpectrumArgs, SpectrumSource,
    TableFormat, ZetaArgs, ZetaKind,
};

pub const DEFAULT_MAX_WORD_LENGTH: usize = 10;
pub const DEFAULT_MAX_LENGTH: f64 = 12.0;
pub const DEFAULT_GENUS: u32 = 2;
pub const DEFAULT_N_MAX: usize = 20;

pub struct Context {
    pub config: Config,
    pub timestamp: bool,
}

impl Context {
    fn manifest(&self, command: &str, parameters: serde_json::Value) -> RunManifest {
        RunManifest::new(command, parameters, self.timestamp)
    }

    fn exec(&self, sequential: bool) -> Execution {
        if sequential || self.config.sequential.unwrap_or(false) {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn resolve_family(ctx: &Context, a: &FamilyArgs, default: Option<FamilyKind>) -> Result<Option<Family>> {
    let configured = match &ctx.config.family {
        Some(s) => Some(FamilyKind::from_str(s, true).map_err(|_| usage(format!("unknown family {s:?} in config")))?),
        None => None,
    };
    let Some(kind) = a.family.or(configured).or(default) else { return Ok(None) };
    let n = a.n.or(ctx.config.n);
    let dim = a.dim.or(ctx.config.dim);
    let from_dim = |k: u32| -> Result<Option<u32>> {
        match dim {
            Some(d) if d % k != 0 => Err(usage(format!("dimension {d} is not a multiple of {k} for this family"))),
            Some(d) => Ok(Some(d / k)),
            None => Ok(None),
        }
    };
    let pick = |k: u32| -> Result<u32> {
        let by_dim = from_dim(k)?;
        match (n, by_dim) {
            (Some(a), Some(b)) if a != b => Err(usage(format!("--n {a} and --dim {} disagree", b * k))),
            (Some(a), _) | (None, Some(a)) => Ok(a),
            (None, None) => Err(usage("give --n or --dim")),
        }
    };
    let family = match kind {
        FamilyKind::RealHyperbolic => Family::RealHyperbolic(pick(1)?),
        FamilyKind::ComplexHyperbolic => Family::ComplexHyperbolic(pick(2)?),
        FamilyKind::QuaternionicHyperbolic => Family::QuaternionicHyperbolic(pick(4)?),
        FamilyKind::OctonionicHyperbolic => {
            if dim.is_some_and(|d| d != 16) {
                return Err(usage("the octonionic hyperbolic plane has dimension 16"));
            }
            Family::OctonionicHyperbolic
        }
    };
    family.validate()?;
    Ok(Some(family))
}

#[derive(Serialize)]
struct FormsRoute {
    m0: i64,
    ratio: String,
    signs_agree: bool,
    detail: MultiplicityRatio,
}

#[derive(Serialize)]
struct Routes {
    forms: Option<FormsRoute>,
    euler_ratio: Option<i64>,
    half_dimension: Option<i64>,
    betti_sum: Option<i64>,
}

#[derive(Serialize)]
struct GodbillonVeyReport {
    #[serde(flatten)]
    value: GodbillonVey,
    expected: ScaledScalar,
    matches: bool,
}

#[derive(Serialize)]
struct MultiplicityReport {
    family: Option<String>,
    d: usize,
    chi: Option<i64>,
    genus: Option<u32>,
    betti: Option<Vec<u64>>,
    routes: Routes,
    m0: Option<i64>,
    agreement: bool,
    godbillon_vey: Option<GodbillonVeyReport>,
}

pub fn multiplicity(ctx: &Context, a: &MultiplicityArgs) -> Result<String> {
    let betti = match (&a.betti, &a.betti_file) {
        (Some(b), _) => Some(b.clone()),
        (None, Some(path)) => Some(
            serde_json::from_str::<Vec<u64>>(&read_file(path)?)
                .map_err(|e| CliError::Config { path: path.clone(), reason: e.to_string() })?,
        ),
        (None, None) => None,
    };
    let report = match betti {
        Some(b) => {
            let family = resolve_family(ctx, &a.family, None)?;
            let bv = BettiVector::new(b.clone())?;
            if let Some(f) = family {
                if f.dim() as usize != bv.dim() {
                    return Err(usage(format!("{f} has dimension {} but the Betti vector has {}", f.dim(), bv.dim())));
                }
            }
            let m = multiplicity_thm3(&bv);
            MultiplicityReport {
                family: family.map(|f| f.to_string()),
                d: bv.dim(),
                chi: None,
                genus: None,
                betti: Some(b),
                routes: Routes { forms: None, euler_ratio: None, half_dimension: None, betti_sum: Some(m) },
                m0: Some(m),
                agreement: true,
                godbillon_vey: None,
            }
        }
        None => {
            let family = resolve_family(ctx, &a.family, Some(FamilyKind::RealHyperbolic))?
                .ok_or_else(|| usage("give --family and --n or --dim"))?;
            let d = family.dim();
            if d % 2 == 1 {
                return Err(usage(format!("{family} is odd-dimensional; supply --betti")));
            }
            let genus = a.genus.or(if a.chi.is_none() { ctx.config.genus } else { None });
            let chi = match (a.chi.or(ctx.config.chi), genus) {
                (Some(c), None) => c,
                (None, Some(g)) if d == 2 => 2 - 2 * g as i64,
                (None, Some(_)) => return Err(usage("--genus applies to surfaces only; use --chi")),
                (Some(_), Some(_)) => return Err(usage("give either --chi or --genus")),
                (None, None) => return Err(usage("give --chi or --genus")),
            };
            let forms = if family == Family::OctonionicHyperbolic {
                None
            } else {
                let detail = multiplicity_ratio(family)?;
                Some(FormsRoute {
                    m0: multiplicity_from_ratio(&detail.ratio, chi)?,
                    ratio: detail.ratio.to_string(),
                    signs_agree: detail.signs_agree,
                    detail,
                })
            };
            let euler_ratio = multiplicity_thm2(family, chi)?;
            let half_dimension = multiplicity_cor1(d, chi)?;
            let agreement =
                euler_ratio == half_dimension && forms.as_ref().is_none_or(|f| f.m0 == euler_ratio && f.signs_agree);
            let godbillon_vey = match genus {
                Some(g) if d == 2 => {
                    let value = godbillon_vey(g)?;
                    let expected = ScaledScalar::new(int(4 * value.chi), 2, 0);
                    Some(GodbillonVeyReport { matches: value.integral == expected, value, expected })
                }
                _ => None,
            };
            MultiplicityReport {
                family: Some(family.to_string()),
                d: d as usize,
                chi: Some(chi),
                genus,
                betti: None,
                m0: agreement.then_some(half_dimension),
                routes: Routes { forms, euler_ratio: Some(euler_ratio), half_dimension: Some(half_dimension), betti_sum: None },
                agreement,
                godbillon_vey,
            }
        }
    };
    let params = json!({
        "family": report.family,
        "chi": report.chi,
        "genus": report.genus,
        "betti": report.betti,
    });
    Ok(envelope(&ctx.manifest("multiplicity", params), &report))
}

pub const EULER_CSV_HEADER: &str = "family,d,dual,chi_dual,geodesic_space,chi_geodesic,ratio,half_d,consistent,m0_formula";

pub fn euler_table(ctx: &Context, a: &EulerTableArgs) -> Result<String> {
    let rows = table_rows()?;
    match a.format {
        TableFormat::Csv => {
            let mut out = String::from(EULER_CSV_HEADER);
            out.push('\n');
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},m0 = {} chi(X)\n",
                    r.family, r.d, r.dual, r.chi_dual, r.geodesic_space, r.chi_geodesic, r.ratio, r.half_d, r.consistent, r.half_d
                ));
            }
            Ok(out)
        }
        TableFormat::Json => {
            #[derive(Serialize)]
            struct Table {
                rows: Vec<EulerRow>,
                all_consistent: bool,
            }
            let all_consistent = rows.iter().all(|r| r.consistent);
            Ok(envelope(&ctx.manifest("euler-table", json!({})), &Table { rows, all_consistent }))
        }
    }
}

pub fn forms_families() -> Vec<Family> {
    vec![
        Family::RealHyperbolic(2),
        Family::RealHyperbolic(4),
        Family::RealHyperbolic(6),
        Family::ComplexHyperbolic(1),
        Family::ComplexHyperbolic(2),
        Family::ComplexHyperbolic(3),
        Family::QuaternionicHyperbolic(1),
        Family::QuaternionicHyperbolic(2),
    ]
}

pub fn forms_check(ctx: &Context, a: &FormsCheckArgs) -> Result<String> {
    let families = match resolve_family(ctx, &a.family, None)? {
        Some(f) => vec![f],
        None => forms_families(),
    };
    let exec = ctx.exec(a.sequential);
    let reports: Vec<FormsReport> = families
        .iter()
        .map(|&f| Ok(check_forms(&build_model(f)?, exec)?))
        .collect::<Result<_>>()?;
    #[derive(Serialize)]
    struct Out {
        reports: Vec<FormsReport>,
        all_pass: bool,
    }
    let all_pass = reports.iter().all(FormsReport::all_pass);
    let params = json!({ "families": families.iter().map(|f| f.to_string()).collect::<Vec<_>>() });
    Ok(envelope(&ctx.manifest("forms-check", params), &Out { reports, all_pass }))
}

struct LoadedSpectrum {
    spec: LengthSpectrum,
    csv: String,
    params: serde_json::Value,
    check: Option<PresentationCheck>,
    exact: Option<ExactCheck>,
}

fn load_spectrum(ctx: &Context, src: &SpectrumSource) -> Result<LoadedSpectrum> {
    let max_length = src.max_length.or(ctx.config.max_length);
    if let Some(path) = src.spectrum.clone().or(ctx.config.spectrum.clone()) {
        let text = read_file(&path)?;
        let spec = read_csv(text.as_bytes(), max_length)?;
        let params = json!({ "spectrum": path.display().to_string(), "max_length": spec.max_geodesic_length });
        return Ok(LoadedSpectrum { spec, csv: text, params, check: None, exact: None });
    }
    let max_word_length = src.max_word_length.or(ctx.config.max_word_length).unwrap_or(DEFAULT_MAX_WORD_LENGTH);
    let max_length = max_length.unwrap_or(DEFAULT_MAX_LENGTH);
    let (presentation, name, exact) = match src.presentation.clone().or(ctx.config.presentation.clone()) {
        Some(path) => (SurfaceGroupPresentation::from_json(&read_file(&path)?)?, path.display().to_string(), None),
        None => (bolza_generators(), "bolza".to_string(), Some(bolza_exact_check())),
    };
    let check = presentation.verify()?;
    let params = EnumerationParams::new(max_word_length, max_length).with_exec(ctx.exec(src.sequential));
    let spec = enumerate_with(&presentation, &params)?;
    let csv = to_csv_string(&spec);
    let params = json!({
        "presentation": name,
        "max_word_length": max_word_length,
        "max_length": max_length,
        "dedup_tolerance": params.dedup_tolerance,
    });
    Ok(LoadedSpectrum { spec, csv, params, check: Some(check), exact })
}

#[derive(Serialize)]
struct SpectrumSummary {
    classes: usize,
    primitive: usize,
    systole: Option<f64>,
    shells: usize,
    odd_shells: usize,
    max_word_length: usize,
    max_geodesic_length: f64,
    dedup_tolerance: f64,
    diagnostics: SpectrumDiagnostics,
    presentation_check: Option<PresentationCheck>,
    exact_check: Option<ExactCheck>,
    csv: Option<String>,
}

pub fn spectrum(ctx: &Context, a: &SpectrumArgs) -> Result<String> {
    let loaded = load_spectrum(ctx, &a.source)?;
    let Some(out) = &a.out else { return Ok(loaded.csv) };
    std::fs::write(out, &loaded.csv).map_err(|e| CliError::io(out, e))?;
    let spec = &loaded.spec;
    let shells = spec.shells();
    let summary = SpectrumSummary {
        classes: spec.len(),
        primitive: spec.primitive().count(),
        systole: spec.systole(),
        shells: shells.len(),
        odd_shells: shells.iter().filter(|s| s.count % 2 == 1).count(),
        max_word_length: spec.max_word_length,
        max_geodesic_length: spec.max_geodesic_length,
        dedup_tolerance: spec.dedup_tolerance,
        diagnostics: spec.diagnostics.clone(),
        presentation_check: loaded.check.clone(),
        exact_check: loaded.exact.clone(),
        csv: Some(out.display().to_string()),
    };
    Ok(envelope(&ctx.manifest("spectrum", loaded.params.clone()).with_spectrum(&loaded.csv), &summary))
}

#[derive(Serialize)]
struct Parts {
    re: f64,
    im: f64,
}

impl From<Complex64> for Parts {
    fn from(z: Complex64) -> Self {
        Parts { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct ZetaReport {
    kind: String,
    s: Parts,
    value: Parts,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_tail_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    entropy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    factors: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    genus: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation: Option<TruncationParams>,
}

impl ZetaReport {
    fn scalar(kind: ZetaKind, s: Complex64, value: Complex64, genus: u32) -> Self {
        Self {
            kind: kind_name(kind),
            s: s.into(),
            value: value.into(),
            truncation_bound: None,
            n_tail_bound: None,
            residual: None,
            residual_bound: None,
            entropy: None,
            factors: None,
            genus: Some(genus),
            truncation: None,
        }
    }

    fn product(kind: ZetaKind, eval: &ComplexEval, params: &TruncationParams) -> Self {
        Self {
            kind: kind_name(kind),
            s: eval.s.into(),
            value: eval.value.into(),
            truncation_bound: Some(eval.truncation_bound),
            n_tail_bound: Some(eval.n_tail_bound),
            residual: None,
            residual_bound: None,
            entropy: Some(eval.entropy),
            factors: Some(eval.factors),
            genus: None,
            truncation: Some(params.clone()),
        }
    }
}

fn kind_name(kind: ZetaKind) -> String {
    kind.to_possible_value().expect("named variant").get_name().to_string()
}

pub fn zeta(ctx: &Context, a: &ZetaArgs) -> Result<String> {
    let s = Complex64::from_str(a.s.trim()).map_err(|_| usage(format!("cannot parse s = {:?}", a.s)))?;
    let genus = a.genus.or(ctx.config.genus).unwrap_or(DEFAULT_GENUS);
    let scalar_params = |s: Complex64| json!({ "s": [s.re, s.im], "genus": genus });
    match a.kind {
        ZetaKind::RuelleFe => {
            let v = ruelle_fe_rhs(s, genus)?;
            let report = ZetaReport::scalar(a.kind, s, v, genus);
            Ok(envelope(&ctx.manifest("zeta ruelle-fe", scalar_params(s)), &report))
        }
        ZetaKind::SelbergFe => {
            let v = selberg_fe_factor(s, genus)?;
            let mirror = selberg_fe_factor(Complex64::new(1.0, 0.0) - s, genus)?;
            let mut report = ZetaReport::scalar(a.kind, s, v, genus);
            report.residual = Some((v * mirror - 1.0).norm());
            Ok(envelope(&ctx.manifest("zeta selberg-fe", scalar_params(s)), &report))
        }
        ZetaKind::Ruelle | ZetaKind::Selberg | ZetaKind::QuotientCheck => {
            let loaded = load_spectrum(ctx, &a.source)?;
            let params = TruncationParams {
                max_geodesic_length: loaded.spec.max_geodesic_length,
                selberg_n_max: a.n_max.or(ctx.config.n_max).unwrap_or(DEFAULT_N_MAX),
                margin: a.margin.or(ctx.config.margin).unwrap_or(DEFAULT_MARGIN),
                entropy: a.entropy.or(ctx.config.entropy),
                exec: ctx.exec(a.source.sequential),
            };
            let report = match a.kind {
                ZetaKind::Ruelle => ZetaReport::product(a.kind, &ruelle_zeta(&loaded.spec, s, &params)?, &params),
                ZetaKind::Selberg => ZetaReport::product(a.kind, &selberg_zeta(&loaded.spec, s, &params)?, &params),
                _ => {
                    let q = check_quotient_identity(&loaded.spec, s, &params)?;
                    let mut r = ZetaReport::product(a.kind, &q.ruelle, &params);
                    r.n_tail_bound = Some(q.selberg_s.n_tail_bound + q.selberg_s_plus_one.n_tail_bound);
                    r.truncation_bound = Some(
                        q.ruelle.truncation_bound + q.selberg_s.truncation_bound + q.selberg_s_plus_one.truncation_bound,
                    );
                    r.residual = Some(q.residual);
                    r.residual_bound = Some(q.residual_bound);
                    r
                }
            };
            let mut p = loaded.params.clone();
            p["s"] = json!([s.re, s.im]);
            p["kind"] = json!(kind_name(a.kind));
            Ok(envelope(&ctx.manifest("zeta", p).with_spectrum(&loaded.csv), &report))
        }
    }
}

pub fn entropy(ctx: &Context, a: &EntropyArgs) -> Result<String> {
    let loaded = load_spectrum(ctx, &a.source)?;
    let fit = entropy_fit(&loaded.spec)?;
    #[derive(Serialize)]
    struct Out {
        entropy: f64,
        intercept: f64,
        window: (f64, f64),
        points: Vec<(f64, f64)>,
        classes: usize,
        shells: Vec<LengthShell>,
    }
    let out = Out {
        entropy: fit.entropy,
        intercept: fit.intercept,
        window: fit.window,
        points: fit.points,
        classes: loaded.spec.len(),
        shells: loaded.spec.shells(),
    };
    Ok(envelope(&ctx.manifest("entropy", loaded.params.clone()).with_spectrum(&loaded.csv), &out))
}
