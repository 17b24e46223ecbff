//! Subcommand implementations behind the `normcurv` binary. Each returns a
//! [`RunReport`]; the process exits nonzero iff a check fails.

use std::path::{Path, PathBuf};
use std::time::Duration;

use num::traits::Zero;
use serde::Serialize;
use serde_json::json;

use crate::certifier::{certify, scalar_identity_exact, scalar_identity_f64, CertifyConfig, Condition};
use crate::copositivity::{critical_s, critical_s_f64, is_isotropic, ExactCertificate};
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, q, qi, to_f64, Q};
use crate::immersion::{
    build_sns1, build_sns1_optimal, build_tensor, build_veronese, estimate_normal_curvature, ExplicitImmersion,
    FiniteDifference,
};
use crate::measure::{
    ambient_dimension, curvature_data, immersion_check, measure_to_json, MeasureFile, ProblemInstance, VeroneseMeasure,
};
use crate::optimizer::{
    check_design_moments, design_from_json, design_to_measure, minimize_s, solve_isotropic_system, DesignInput,
    IsotropicWeights, MomentReport, MomentValue, ResultsCache, SearchConfig,
};
use crate::report::RunReport;
use crate::spectral::{eigen_dimension, lambda_iso, rho, SpectralParams};

fn read_input(report: &mut RunReport, path: &Path) -> Result<String> {
    let text = std::fs::read_to_string(path)?;
    report.digest(&path.display().to_string(), text.as_bytes());
    Ok(text)
}

fn parse_measure_file(text: &str) -> Result<VeroneseMeasure> {
    serde_json::from_str::<MeasureFile>(text)?.to_unchecked()
}

fn certificate_json(c: &ExactCertificate) -> serde_json::Value {
    json!({
        "s_star": format_rational(&c.s_star),
        "u_star": c.u_star.iter().map(format_rational).collect::<Vec<_>>(),
        "support": c.support,
        "mode": c.mode,
        "certified": c.certified,
    })
}

pub fn cmd_spectral(n: u32, l: u32) -> Result<RunReport> {
    let p = SpectralParams::new(n, l)?;
    let mut report = RunReport::new(&["spectral".to_string(), format!("--n={n}"), format!("--l={l}")]);
    report.set("eigen_dimension", eigen_dimension(p).to_string());
    report.set("rho", format_rational(&rho(p)));
    report.set("lambda", format_rational(&lambda_iso(p)));
    Ok(report)
}

/// Validation, curvature data, exact `s*` and ambient dimension of a measure file.
pub fn cmd_eval_measure(path: &Path) -> Result<RunReport> {
    let mut report = RunReport::new(&["eval-measure".to_string(), path.display().to_string()]);
    let mu = parse_measure_file(&read_input(&mut report, path)?)?;
    if let Err(msg) = mu.validate() {
        report.check("valid measure", false, msg);
        return Ok(report);
    }
    report.check(
        "valid measure",
        true,
        format!("{} atoms on {}", mu.atoms().len(), mu.instance()),
    );
    let data = curvature_data(&mu);
    report.set("G", data.g.iter().map(format_rational).collect::<Vec<_>>());
    report.set(
        "A",
        data.a
            .iter()
            .map(|r| r.iter().map(format_rational).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    );
    report.set("ambient_dimension", ambient_dimension(&mu).to_string());
    if let Err(Error::Degenerate { index }) = immersion_check(&data) {
        report.check(
            "immersion",
            false,
            format!("E[rho_{}] = 0 (factor {index} is collapsed)", index + 1),
        );
        return Ok(report);
    }
    report.check("immersion", true, "all E[rho_m] > 0");
    let cert = critical_s(&data)?;
    report.set("certificate", certificate_json(&cert));
    report.set("isotropic", is_isotropic(&data, &cert.s_star));
    report.set("s_star_f64", to_f64(&cert.s_star));
    report.check(
        "certificate",
        cert.verify(&data).is_ok(),
        format!("s* = {}", format_rational(&cert.s_star)),
    );
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct MinSOptions {
    pub factors: Vec<u32>,
    pub config: SearchConfig,
    pub warm_start: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    /// Write the best measure here.
    pub save: Option<PathBuf>,
    /// Fail unless `s* <= target`.
    pub target: Option<Q>,
}

impl MinSOptions {
    pub fn new(factors: Vec<u32>) -> Self {
        Self {
            factors,
            config: SearchConfig::default(),
            warm_start: None,
            cache: None,
            save: None,
            target: None,
        }
    }
}

pub fn cmd_min_s(opts: &MinSOptions) -> Result<RunReport> {
    let cfg = &opts.config;
    let factors: Vec<String> = opts.factors.iter().map(u32::to_string).collect();
    let mut echo = vec![
        "min-s".to_string(),
        format!("--factors={}", factors.join(",")),
        format!("--lmax={}", cfg.l_max),
        format!("--max-support={}", cfg.max_support),
        format!("--restarts={}", cfg.restarts),
    ];
    if let Some(b) = cfg.budget {
        echo.push(format!("--budget-secs={}", b.as_secs_f64()));
    }
    let mut report = RunReport::new(&echo);
    report.seed = Some(cfg.seed);
    let instance = ProblemInstance::new(opts.factors.clone())?;

    let mut warm = None;
    if let Some(path) = &opts.warm_start {
        let mu = parse_measure_file(&read_input(&mut report, path)?)?;
        mu.validate().map_err(Error::InvalidMeasure)?;
        warm = Some(mu);
    }
    let cache = opts.cache.as_deref().map(ResultsCache::open).transpose()?;
    if let Some((cached, s)) = cache.as_ref().map(|c| c.lookup(&instance)).transpose()?.flatten() {
        let better = match &warm {
            Some(w) => critical_s(&curvature_data(w)).map(|c| s < c.s_star).unwrap_or(true),
            None => true,
        };
        if better {
            warm = Some(cached);
        }
    }
    let out = minimize_s(&instance, cfg, warm.as_ref())?;
    if let Some(c) = &cache {
        report.set("cache_updated", c.store(&out.measure, &out.certificate.s_star)?);
    }
    if let Some(path) = &opts.save {
        std::fs::write(path, measure_to_json(&out.measure))?;
    }
    report.set("instance", instance.to_string());
    report.set("measure", MeasureFile::from_measure(&out.measure));
    report.set("certificate", certificate_json(&out.certificate));
    report.set("s_star_f64", to_f64(&out.certificate.s_star));
    report.set("isotropic", out.isotropic);
    report.set("complete", out.complete);
    report.set("ambient_dimension", ambient_dimension(&out.measure).to_string());
    if let Some(t) = &opts.target {
        report.check(
            format!("s* <= {}", format_rational(t)),
            out.certificate.s_star <= *t,
            format!("s* = {}", format_rational(&out.certificate.s_star)),
        );
    }
    Ok(report)
}

/// Which explicit map to sample.
#[derive(Debug, Clone)]
pub enum MapSpec {
    Sns1 { n: u32, r1: Option<f64> },
    Veronese { n: u32, l: u32 },
    Tensor { measure: PathBuf },
}

impl MapSpec {
    fn echo(&self) -> Vec<String> {
        match self {
            Self::Sns1 { n, r1 } => {
                let mut v = vec!["--map=sns1".into(), format!("--n={n}")];
                if let Some(r) = r1 {
                    v.push(format!("--r1={r}"));
                }
                v
            }
            Self::Veronese { n, l } => vec!["--map=veronese".into(), format!("--n={n}"), format!("--l={l}")],
            Self::Tensor { measure } => vec!["--map=tensor".into(), format!("--measure={}", measure.display())],
        }
    }

    fn build(&self, report: &mut RunReport) -> Result<ExplicitImmersion> {
        match self {
            Self::Sns1 { n, r1: None } => build_sns1_optimal(*n),
            Self::Sns1 { n, r1: Some(r1) } => build_sns1(*n, *r1, (1.0 - r1 * r1).max(0.0).sqrt()),
            Self::Veronese { n, l } => build_veronese(*n, *l),
            Self::Tensor { measure } => {
                let mu = parse_measure_file(&read_input(report, measure)?)?;
                build_tensor(&mu)
            }
        }
    }
}

/// `(s*, exact)` of the tensor-Veronese measure behind a map.
fn map_s_star(f: &ExplicitImmersion) -> Result<(f64, Option<Q>)> {
    match f.measure() {
        Some(mu) => {
            let c = critical_s(&curvature_data(mu))?;
            Ok((to_f64(&c.s_star), Some(c.s_star)))
        }
        None => Ok((critical_s_f64(&f.curvature_f64())?.s_star, None)),
    }
}

#[derive(Debug, Clone)]
pub struct SampleOptions {
    pub map: MapSpec,
    pub samples: usize,
    pub seed: u64,
}

pub fn cmd_sample(opts: &SampleOptions) -> Result<RunReport> {
    let mut echo = vec!["sample".to_string()];
    echo.extend(opts.map.echo());
    echo.push(format!("--samples={}", opts.samples));
    let mut report = RunReport::new(&echo);
    report.seed = Some(opts.seed);
    let f = opts.map.build(&mut report)?;
    let stats = estimate_normal_curvature(&f, opts.samples, opts.seed, &FiniteDifference::default())?;
    report.set("domain", f.domain().to_string());
    report.set("ambient_dimension", f.ambient_dim());
    report.set("metric_scales", f.metric_scales());
    report.set("statistics", &stats);
    if f.metric_scales().iter().all(|&c| c > 0.0) {
        let (s, exact) = map_s_star(&f)?;
        if let Some(s) = exact {
            report.set("s_star", format_rational(&s));
        }
        report.set("sqrt_s_star", s.sqrt());
        report.set("max_minus_sqrt_s_star", stats.max - s.sqrt());
        report.check(
            "sampled max <= sqrt(s*)",
            stats.max <= s.sqrt() + 1e-6,
            format!("max = {:.12}, sqrt(s*) = {:.12}", stats.max, s.sqrt()),
        );
    }
    report.check(
        "finite differences match the closed form",
        stats.closed_form_gap < 1e-6,
        format!("largest gap {:.3e}", stats.closed_form_gap),
    );
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub map: MapSpec,
    pub condition: Condition,
    pub c: Option<f64>,
    pub samples: usize,
    pub frames_per_point: usize,
    pub seed: u64,
}

pub fn cmd_certify(opts: &CertifyOptions) -> Result<RunReport> {
    let mut echo = vec!["certify".to_string()];
    echo.extend(opts.map.echo());
    echo.push(format!("--condition={}", opts.condition.name()));
    if let Some(c) = opts.c {
        echo.push(format!("--c={c}"));
    }
    echo.push(format!("--samples={}", opts.samples));
    echo.push(format!("--frames-per-point={}", opts.frames_per_point));
    let mut report = RunReport::new(&echo);
    report.seed = Some(opts.seed);
    let f = opts.map.build(&mut report)?;
    let mut cfg = CertifyConfig::new(opts.condition);
    cfg.c = opts.c;
    cfg.samples = opts.samples;
    cfg.frames_per_point = opts.frames_per_point;
    cfg.seed = opts.seed;
    let r = certify(&f, &cfg)?;
    report.set("domain", f.domain().to_string());
    report.set("certification", &r);
    if let Some(passed) = r.passed {
        report.check(
            format!("{} margin >= -{:e}", opts.condition.name(), cfg.tolerance),
            passed,
            format!("min margin {:.6e} (min value {:.6e})", r.min_margin, r.min_value),
        );
    }
    Ok(report)
}

#[derive(Serialize)]
struct MomentRow {
    kind: crate::optimizer::MomentKind,
    expected: String,
    actual: String,
    residual: f64,
    holds: bool,
}

fn moment_rows(m: &MomentReport) -> Vec<MomentRow> {
    m.identities
        .iter()
        .map(|i| MomentRow {
            kind: i.kind,
            expected: format_rational(&i.expected),
            actual: match &i.actual {
                MomentValue::Exact(x) => format_rational(x),
                MomentValue::Float(x) => format!("{:.12e}", x),
            },
            residual: i.residual,
            holds: i.holds,
        })
        .collect()
}

fn torus_measure(d: &DesignInput) -> Result<VeroneseMeasure> {
    design_to_measure(d, &ProblemInstance::new(vec![1; d.dimension()])?)
}

pub fn cmd_check_design(path: &Path) -> Result<RunReport> {
    let mut report = RunReport::new(&["check-design".to_string(), path.display().to_string()]);
    let d = design_from_json(&read_input(&mut report, path)?)?;
    design_report(&mut report, &d, "")?;
    Ok(report)
}

fn design_report(report: &mut RunReport, d: &DesignInput, label: &str) -> Result<()> {
    let moments = check_design_moments(d);
    let n = d.dimension();
    report.set(&format!("{label}moments"), moment_rows(&moments));
    let detail = match moments.violations().next() {
        Some(v) => format!("{:?} off by {:.3e}", v.kind, v.residual),
        None => format!(
            "{} identities ({})",
            moments.identities.len(),
            if moments.exact { "exact" } else { "numeric" }
        ),
    };
    report.check(format!("{label}moment identities"), moments.passes(), detail);
    if let Ok(mu) = torus_measure(d) {
        let cert = critical_s(&curvature_data(&mu))?;
        report.set(&format!("{label}torus_measure"), MeasureFile::from_measure(&mu));
        report.set(&format!("{label}s_star"), format_rational(&cert.s_star));
        if moments.passes() {
            let expected = q(3 * n as i64, n as i64 + 2);
            report.check(
                format!("{label}s* = 3n/(n+2)"),
                cert.s_star == expected,
                format!(
                    "s* = {}, expected {}",
                    format_rational(&cert.s_star),
                    format_rational(&expected)
                ),
            );
        }
    }
    Ok(())
}

macro_rules! fixture {
    ($name:literal) => {
        ($name, include_str!(concat!("../fixtures/", $name)))
    };
}

const FIXTURES: &[(&str, &str)] = &[
    fixture!("sns1.json"),
    fixture!("sphere_delta1.json"),
    fixture!("prop32_n1.json"),
    fixture!("prop32_n2.json"),
    fixture!("prop32_n3.json"),
    fixture!("prop32_n4.json"),
    fixture!("prop32_n5.json"),
    fixture!("prop33_n1.json"),
    fixture!("prop33_n2.json"),
    fixture!("prop33_n3.json"),
    fixture!("prop33_n4.json"),
    fixture!("prop33_n5.json"),
    fixture!("prop34.json"),
    fixture!("pythagorean_torus.json"),
    fixture!("pythagorean_design.json"),
    fixture!("pentagon_design.json"),
];

/// Names of the bundled data files.
pub fn fixture_names() -> Vec<&'static str> {
    FIXTURES.iter().map(|f| f.0).collect()
}

/// Contents of a bundled data file.
pub fn bundled_fixture(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|f| f.0 == name).map(|f| f.1)
}

/// A bundled measure together with the values it must reproduce.
struct Claim {
    file: String,
    label: String,
    s: Q,
    ambient_dim: u64,
}

fn claims() -> Vec<Claim> {
    let mut out = vec![
        Claim {
            file: "sphere_delta1.json".into(),
            label: "inclusion of S^3".into(),
            s: qi(1),
            ambient_dim: 4,
        },
        Claim {
            file: "sns1.json".into(),
            label: "S^2 x S^1 optimum".into(),
            s: q(3, 2),
            ambient_dim: 8,
        },
    ];
    for k in 1..=5u64 {
        let (n1, n2) = (k + 1, k);
        out.push(Claim {
            file: format!("prop32_n{k}.json"),
            label: format!("S^{n1} x S^{n2} two-atom measure"),
            s: q(2 * k as i64 + 1, k as i64 + 1),
            ambient_dim: (n1 + 1) * (n2 + 1) + n2 * (n2 + 3) / 2,
        });
    }
    for k in 1..=5u64 {
        let (n1, n2, n3) = (k + 2, k + 1, k);
        out.push(Claim {
            file: format!("prop33_n{k}.json"),
            label: format!("S^{n1} x S^{n2} x S^{n3} four-atom measure"),
            s: q(6 * k as i64 + 5, 3 * k as i64 + 3),
            ambient_dim: (n1 + 1) * (n2 + 1) + (n1 + 1) * (n3 + 1) + (n2 + 1) * (n3 + 1) + n3 * (n3 + 3) / 2,
        });
    }
    out.push(Claim {
        file: "prop34.json".into(),
        label: "S^2 x T^2 measure".into(),
        s: q(9, 5),
        ambient_dim: 4 * 2 + 16,
    });
    out.push(Claim {
        file: "pythagorean_torus.json".into(),
        label: "folded Pythagorean torus measure".into(),
        s: q(3, 2),
        ambient_dim: 2 + 4 + 4 + 2,
    });
    out
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Read data files from this directory instead of the bundled copies.
    pub fixtures: Option<PathBuf>,
    pub numeric_only: bool,
}

fn load_fixture(report: &mut RunReport, opts: &VerifyOptions, name: &str) -> Result<String> {
    match &opts.fixtures {
        Some(dir) => read_input(report, &dir.join(name)),
        None => {
            let text = bundled_fixture(name).ok_or_else(|| Error::InvalidArgument(format!("no bundled {name}")))?;
            report.digest(&format!("bundled:{name}"), text.as_bytes());
            Ok(text.to_string())
        }
    }
}

fn verify_measure(
    report: &mut RunReport,
    claim: &Claim,
    text: Result<String>,
    numeric: bool,
) -> Option<VeroneseMeasure> {
    let label = &claim.label;
    let mu = match text.and_then(|t| parse_measure_file(&t)) {
        Ok(mu) => mu,
        Err(e) => {
            report.check(format!("{label}: read {}", claim.file), false, e.to_string());
            return None;
        }
    };
    if let Err(msg) = mu.validate() {
        report.check(format!("{label}: probability measure"), false, msg);
        return None;
    }
    report.check(
        format!("{label}: probability measure"),
        true,
        format!("{} atoms, weights sum to 1", mu.atoms().len()),
    );
    let data = curvature_data(&mu);
    if let Err(e) = immersion_check(&data) {
        report.check(format!("{label}: immersion"), false, e.to_string());
        return None;
    }
    if numeric {
        let fd = data.to_f64();
        let target = to_f64(&claim.s);
        match critical_s_f64(&fd) {
            Ok(c) => report.check(
                format!("{label}: s* = {}", format_rational(&claim.s)),
                (c.s_star - target).abs() <= 1e-9,
                format!("s* = {:.15}", c.s_star),
            ),
            Err(e) => report.check(format!("{label}: s*"), false, e.to_string()),
        }
        let b = fd.b_matrix(target);
        let worst = b.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        report.check(
            format!("{label}: B(s) = 0"),
            worst <= 1e-9,
            format!("max |B_ij| = {worst:.3e}"),
        );
        match scalar_identity_f64(&mu) {
            Ok(p) => report.check(
                format!("{label}: scalar curvature identity"),
                p.residual <= 1e-9,
                format!("R = {:.12}, residual {:.3e}", p.scalar, p.residual),
            ),
            Err(e) => report.check(format!("{label}: scalar curvature identity"), false, e.to_string()),
        }
    } else {
        match critical_s(&data) {
            Ok(c) => report.check(
                format!("{label}: s* = {}", format_rational(&claim.s)),
                c.s_star == claim.s,
                format!("s* = {}", format_rational(&c.s_star)),
            ),
            Err(e) => report.check(format!("{label}: s*"), false, e.to_string()),
        }
        let iso = is_isotropic(&data, &claim.s);
        report.check(
            format!("{label}: B(s) = 0"),
            iso,
            if iso { "exact" } else { "B(s) has a nonzero entry" },
        );
        match scalar_identity_exact(&mu) {
            Ok(p) => report.check(
                format!("{label}: scalar curvature identity"),
                p.residual.is_zero(),
                format!(
                    "R = {}, residual {}",
                    format_rational(&p.scalar),
                    format_rational(&p.residual)
                ),
            ),
            Err(e) => report.check(format!("{label}: scalar curvature identity"), false, e.to_string()),
        }
    }
    let n = ambient_dimension(&mu);
    report.check(
        format!("{label}: N = {}", claim.ambient_dim),
        n == claim.ambient_dim.into(),
        format!("N = {n}"),
    );
    Some(mu)
}

fn verify_isotropic_solve(report: &mut RunReport, label: &str, mu: &VeroneseMeasure, numeric: bool) {
    let name = format!("{label}: recovered from its support");
    match solve_isotropic_system(mu.instance(), &mu.support()) {
        Ok(sol) => {
            let ok = match (&sol.weights, numeric) {
                (IsotropicWeights::Exact { weights, .. }, false) => {
                    weights.iter().zip(mu.atoms()).all(|(w, a)| *w == a.weight)
                }
                _ => {
                    let w: Vec<f64> = match &sol.weights {
                        IsotropicWeights::Exact { weights, .. } => weights.iter().map(to_f64).collect(),
                        IsotropicWeights::Numeric { weights, .. } => weights.clone(),
                    };
                    w.iter().zip(mu.weights_f64()).all(|(a, b)| (a - b).abs() <= 1e-9)
                }
            };
            report.check(name, ok, format!("s = {:.12}", sol.s_f64()));
        }
        Err(e) => report.check(name, false, e.to_string()),
    }
}

/// The full battery of exact reproductions over the bundled data.
pub fn cmd_verify_paper(opts: &VerifyOptions) -> Result<RunReport> {
    let mut echo = vec!["verify-paper".to_string()];
    if let Some(d) = &opts.fixtures {
        echo.push(format!("--fixtures={}", d.display()));
    }
    if opts.numeric_only {
        echo.push("--numeric-only".into());
    }
    let mut report = RunReport::new(&echo);
    let numeric = opts.numeric_only;
    let mut torus = None;
    for claim in claims() {
        let text = load_fixture(&mut report, opts, &claim.file);
        let mu = verify_measure(&mut report, &claim, text, numeric);
        if let Some(mu) = mu {
            if claim.file.starts_with("prop3") {
                verify_isotropic_solve(&mut report, &claim.label, &mu, numeric);
            }
            if claim.file == "prop34.json" {
                let data = curvature_data(&mu);
                let expect_g = [q(5, 9), q(125, 3), q(125, 3)];
                let expect_a = [
                    [q(5, 9), q(125, 3), q(125, 3)],
                    [q(125, 3), qi(3125), qi(3125)],
                    [q(125, 3), qi(3125), qi(3125)],
                ];
                let ok = data.g == expect_g && (0..3).all(|i| data.a[i] == expect_a[i]);
                report.check(
                    format!("{}: listed G and A", claim.label),
                    ok,
                    "G = (5/9, 125/3, 125/3), A_22 = A_23 = A_33 = 3125",
                );
            }
            if claim.file == "pythagorean_torus.json" {
                torus = Some(mu);
            }
        }
    }
    for name in ["pythagorean_design.json", "pentagon_design.json"] {
        match load_fixture(&mut report, opts, name).and_then(|t| design_from_json(&t)) {
            Ok(d) => {
                let label = format!("{}: ", name.trim_end_matches(".json"));
                design_report(&mut report, &d, &label)?;
                if name.starts_with("pythagorean") {
                    let folded = torus_measure(&d).ok();
                    report.check(
                        "pythagorean design folds to the bundled torus measure",
                        folded.is_some() && folded == torus,
                        "componentwise absolute values, merged weights",
                    );
                }
            }
            Err(e) => report.check(format!("read {name}"), false, e.to_string()),
        }
    }
    let passed = report.checks.iter().filter(|c| c.passed).count();
    report.set("checks_passed", format!("{passed}/{}", report.checks.len()));
    Ok(report)
}

/// Parses `"2,1"` into factor dimensions.
pub fn parse_factors(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad factor '{p}'")))
        })
        .collect()
}

/// Parses a rational like `3/2` or a decimal like `1.5` (exactly).
pub fn parse_target(s: &str) -> Result<Q> {
    if let Some((int, frac)) = s.split_once('.') {
        let digits = format!("{int}{frac}");
        let den = 10i64
            .checked_pow(frac.len() as u32)
            .ok_or_else(|| Error::Parse(s.into()))?;
        return Ok(Q::new(parse_rational(&digits)?.to_integer(), den.into()));
    }
    parse_rational(s)
}

pub fn budget(secs: Option<f64>) -> Option<Duration> {
    secs.map(Duration::from_secs_f64)
}
