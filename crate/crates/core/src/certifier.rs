//! Intrinsic and conformal curvature quantities evaluated on sampled
//! second-fundamental-form tables.

use nalgebra::{DMatrix, DVector};
use num::traits::Zero;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{qi, Q};
use crate::immersion::{
    random_frame_rotation, random_point, sample_rng, ExplicitImmersion, FiniteDifference, FramePoint, SffSample,
};
use crate::measure::{curvature_data, VeroneseMeasure};
use crate::spectral::{rho, rho_f64, SpectralParams};

/// `Rm(e_i,e_j,e_k,e_l) = <A_il, A_jk> - <A_ik, A_jl>`; `Rm(i,j,j,i)` is a
/// sectional curvature.
pub fn gauss_rm(s: &SffSample, i: usize, j: usize, k: usize, l: usize) -> f64 {
    s.a[i][l].dot(&s.a[j][k]) - s.a[i][k].dot(&s.a[j][l])
}

/// `Ric(e_i,e_i) = <A_ii, H> - sum_j |A_ij|^2`.
pub fn gauss_ricci(s: &SffSample, i: usize) -> f64 {
    s.a[i][i].dot(&s.h) - s.a[i].iter().map(|v| v.norm_squared()).sum::<f64>()
}

/// `Ric(e_i,e_j) = <A_ij, H> - sum_k <A_ik, A_jk>`.
pub fn ricci_matrix(s: &SffSample) -> DMatrix<f64> {
    let n = s.dim();
    DMatrix::from_fn(n, n, |i, j| {
        s.a[i][j].dot(&s.h) - (0..n).map(|k| s.a[i][k].dot(&s.a[j][k])).sum::<f64>()
    })
}

pub fn scalar_curvature(s: &SffSample) -> f64 {
    (0..s.dim()).map(|i| gauss_ricci(s, i)).sum()
}

/// Both sides of `R = 3/2 |H|^2 - n(n+2)/2 avg_{|u|=1} |A(u,u)|^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarIdentityCheck<T> {
    pub scalar: T,
    pub mean_curvature2: T,
    pub average: T,
    pub rhs: T,
    pub residual: T,
}

/// Exact check for a tensor measure, using the pullback metric
/// `sum G_m g_{S^{n_m}}`, the Laplacian `Delta phi = -n rho phi` on each
/// factor and the quartic moments of the unit sphere.
pub fn scalar_identity_exact(mu: &VeroneseMeasure) -> Result<ScalarIdentityCheck<Q>> {
    let data = curvature_data(mu);
    crate::measure::immersion_check(&data)?;
    let f = mu.instance().factors();
    let m = f.len();
    let n = qi(mu.instance().dimension() as i64);
    let nm: Vec<Q> = f.iter().map(|&k| qi(k as i64)).collect();
    let scalar: Q = (0..m).map(|k| &nm[k] * (&nm[k] - qi(1)) / &data.g[k]).sum();
    let mut mean_curvature2 = Q::zero();
    for atom in mu.atoms() {
        let trace: Q = (0..m)
            .map(|k| &nm[k] * rho(SpectralParams::new(f[k], atom.l[k]).expect("validated")) / &data.g[k])
            .sum();
        mean_curvature2 += &atom.weight * &trace * &trace;
    }
    let norm = &n * (&n + qi(2));
    let mut average = Q::zero();
    for a in 0..m {
        for b in 0..m {
            let moment = if a == b {
                &nm[a] * (&nm[a] + qi(2))
            } else {
                &nm[a] * &nm[b]
            } / &norm;
            average += &data.a[a][b] * moment / (&data.g[a] * &data.g[b]);
        }
    }
    let rhs = Q::new(3.into(), 2.into()) * &mean_curvature2 - &norm / qi(2) * &average;
    let residual = &scalar - &rhs;
    Ok(ScalarIdentityCheck {
        scalar,
        mean_curvature2,
        average,
        rhs,
        residual,
    })
}

/// Floating-point twin of [`scalar_identity_exact`]; `residual` is `|lhs - rhs|`.
pub fn scalar_identity_f64(mu: &VeroneseMeasure) -> Result<ScalarIdentityCheck<f64>> {
    let data = curvature_data(mu);
    crate::measure::immersion_check(&data)?;
    let data = data.to_f64();
    let f = mu.instance().factors();
    let m = f.len();
    let n = mu.instance().dimension() as f64;
    let nm: Vec<f64> = f.iter().map(|&k| k as f64).collect();
    let scalar: f64 = (0..m).map(|k| nm[k] * (nm[k] - 1.0) / data.g[k]).sum();
    let mut mean_curvature2 = 0.0;
    for (atom, w) in mu.atoms().iter().zip(mu.weights_f64()) {
        let trace: f64 = (0..m).map(|k| nm[k] * rho_f64(f[k], atom.l[k]) / data.g[k]).sum();
        mean_curvature2 += w * trace * trace;
    }
    let norm = n * (n + 2.0);
    let mut average = 0.0;
    for a in 0..m {
        for b in 0..m {
            let moment = if a == b { nm[a] * (nm[a] + 2.0) } else { nm[a] * nm[b] } / norm;
            average += data.a[a][b] * moment / (data.g[a] * data.g[b]);
        }
    }
    let rhs = 1.5 * mean_curvature2 - norm / 2.0 * average;
    Ok(ScalarIdentityCheck {
        scalar,
        mean_curvature2,
        average,
        rhs,
        residual: (scalar - rhs).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SphereAverage {
    /// Exact quartic moments applied to the sampled table.
    Moments,
    MonteCarlo {
        samples: usize,
        seed: u64,
    },
}

/// The same identity from a sampled table, with `residual = |lhs - rhs|`.
pub fn scalar_identity_sampled(s: &SffSample, average: SphereAverage) -> ScalarIdentityCheck<f64> {
    let n = s.dim();
    let nf = n as f64;
    let avg = match average {
        SphereAverage::Moments => {
            let off: f64 = s.a.iter().flatten().map(|v| v.norm_squared()).sum();
            (2.0 * off + s.h.norm_squared()) / (nf * (nf + 2.0))
        }
        SphereAverage::MonteCarlo { samples, seed } => {
            let mut rng = sample_rng(seed, 0);
            let total: f64 = (0..samples)
                .map(|_| {
                    let c = DVector::<f64>::from_fn(n, |_, _| rng.sample(StandardNormal)).normalize();
                    s.eval(c.as_slice()).norm_squared()
                })
                .sum();
            total / samples as f64
        }
    };
    let scalar = scalar_curvature(s);
    let h2 = s.h.norm_squared();
    let rhs = 1.5 * h2 - nf * (nf + 2.0) / 2.0 * avg;
    ScalarIdentityCheck {
        scalar,
        mean_curvature2: h2,
        average: avg,
        rhs,
        residual: (scalar - rhs).abs(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleBound {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// `|x_perp| >= 1 + (c/2)(|x|^2 - 1)`.
pub fn angle_bound(fp: &FramePoint, c: f64) -> AngleBound {
    let lhs = fp.x_perp.norm();
    let rhs = 1.0 + c / 2.0 * (fp.position.norm_squared() - 1.0);
    AngleBound {
        lhs,
        rhs,
        margin: lhs - rhs,
    }
}

/// `4 c_f^2 - (|A_ii + A_jj|^2 + 4 |A_ij|^2)`.
pub fn offdiag_bound(s: &SffSample, i: usize, j: usize, c_f: f64) -> f64 {
    4.0 * c_f * c_f - ((&s.a[i][i] + &s.a[j][j]).norm_squared() + 4.0 * s.a[i][j].norm_squared())
}

/// `e^{2 psi} sec~(e_i, e_j)` for the conformal factor `psi = -(c/2)|x|^2`.
pub fn conformal_sec(s: &SffSample, i: usize, j: usize, c: f64) -> f64 {
    let fp = &s.point;
    let (aii, ajj, aij) = (&s.a[i][i], &s.a[j][j], &s.a[i][j]);
    let xi = fp.position.dot(&fp.pushed[i]);
    let xj = fp.position.dot(&fp.pushed[j]);
    2.0 * c + aii.dot(ajj) - aij.norm_squared() + c * fp.x_perp.dot(&(aii + ajj)) + c * c * (xi * xi + xj * xj)
        - c * c * fp.x_tan.norm_squared()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PicParams {
    pub lam: f64,
    pub mu: f64,
}

impl PicParams {
    pub fn new(lam: f64, mu: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&lam) || !(-1.0..=1.0).contains(&mu) {
            return Err(Error::InvalidArgument(format!(
                "(lam, mu) = ({lam}, {mu}) outside [-1, 1]^2"
            )));
        }
        Ok(Self { lam, mu })
    }

    fn weight(&self) -> f64 {
        (1.0 + self.lam * self.lam) * (1.0 + self.mu * self.mu)
    }

    /// 9 x 9 uniform grid over `[-1, 1]^2`; contains the corners and the origin.
    pub fn grid() -> Vec<Self> {
        let ticks: Vec<f64> = (0..9).map(|k| -1.0 + k as f64 / 4.0).collect();
        ticks
            .iter()
            .flat_map(|&lam| ticks.iter().map(move |&mu| Self { lam, mu }))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Pic2Blocks {
    pub w: DVector<f64>,
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub z: DVector<f64>,
    pub s: DVector<f64>,
}

impl Pic2Blocks {
    pub fn new(s: &SffSample, e: [usize; 4], p: PicParams) -> Self {
        let a = |i: usize, j: usize| &s.a[e[i]][e[j]];
        let (l, m) = (p.lam, p.mu);
        let w = a(0, 0) + a(1, 1) * (m * m);
        let x = a(2, 2) + a(3, 3) * (l * l);
        let y = a(0, 2) - a(1, 3) * (l * m);
        let z = a(0, 3) * l + a(1, 2) * m;
        let sv = &w * (1.0 + l * l) + &x * (1.0 + m * m);
        Self { w, x, y, z, s: sv }
    }
}

fn check_frame(s: &SffSample, e: [usize; 4]) -> Result<()> {
    if s.dim() < 4 {
        return Err(Error::Dimension(format!("PIC-2 needs n >= 4, got n = {}", s.dim())));
    }
    for i in 0..4 {
        if e[i] >= s.dim() || e[..i].contains(&e[i]) {
            return Err(Error::InvalidArgument(format!(
                "frame indices {e:?} must be distinct and < n"
            )));
        }
    }
    Ok(())
}

/// `e^{2 psi} Q~_{lam,mu}(e~_1..e~_4)` with `psi = -(c/2)|x|^2`.
pub fn pic2_quantity(s: &SffSample, e: [usize; 4], p: PicParams, c: f64) -> Result<f64> {
    check_frame(s, e)?;
    let (l2, m2) = (p.lam * p.lam, p.mu * p.mu);
    Ok(conformal_sec(s, e[0], e[2], c)
        + l2 * conformal_sec(s, e[0], e[3], c)
        + m2 * conformal_sec(s, e[1], e[2], c)
        + l2 * m2 * conformal_sec(s, e[1], e[3], c)
        - 2.0 * p.lam * p.mu * gauss_rm(s, e[0], e[1], e[2], e[3]))
}

/// `8 - 3 c_f^2 + 12 |x_perp|^2 - 16 |x|^2`, the pointwise lower bound for
/// `pic2_quantity / ((1 + lam^2)(1 + mu^2))` at `c = 4`.
pub fn pic2_pointwise_bound(fp: &FramePoint, c_f: f64) -> f64 {
    8.0 - 3.0 * c_f * c_f + 12.0 * fp.x_perp.norm_squared() - 16.0 * fp.position.norm_squared()
}

/// Margins of `|S|^2 + 4(1+lam^2)(1+mu^2)|Y|^2 <= 4(1+lam^2)^2(1+mu^2)^2 c_f^2`
/// and of the same inequality with `Z`.
pub fn pic2_helper_margins(s: &SffSample, e: [usize; 4], p: PicParams, c_f: f64) -> Result<(f64, f64)> {
    check_frame(s, e)?;
    let b = Pic2Blocks::new(s, e, p);
    let w = p.weight();
    let rhs = 4.0 * w * w * c_f * c_f;
    let s2 = b.s.norm_squared();
    Ok((
        rhs - s2 - 4.0 * w * b.y.norm_squared(),
        rhs - s2 - 4.0 * w * b.z.norm_squared(),
    ))
}

/// `e^{2 psi} Ric~` in the `g`-orthonormal frame, from the conformal change
/// of Ricci with `grad^2 psi = -c g - c <x_perp, A>` and `d psi = -c <x, .>`.
pub fn conformal_ricci(s: &SffSample, c: f64) -> DMatrix<f64> {
    let fp = &s.point;
    let n = s.dim();
    let k = n as f64 - 2.0;
    let dpsi: Vec<f64> = fp.pushed.iter().map(|e| -c * fp.position.dot(e)).collect();
    let grad2 = c * c * fp.x_tan.norm_squared();
    let lap = -c * n as f64 - c * fp.x_perp.dot(&s.h);
    let ric = ricci_matrix(s);
    DMatrix::from_fn(n, n, |i, j| {
        let hess = -c * (i == j) as u8 as f64 - c * fp.x_perp.dot(&s.a[i][j]);
        ric[(i, j)] - k * hess + k * dpsi[i] * dpsi[j] - if i == j { lap + k * grad2 } else { 0.0 }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experimental {
    Biricci,
    RicEigen,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentalReport {
    pub condition: Experimental,
    /// Bi-Ricci: one value per pair `i < j`. Ricci: `scal - 2 Ric(e_i,e_i)` per frame vector.
    pub values: Vec<f64>,
    /// Ascending eigenvalues of the rescaled conformal Ricci (ric-eigen only).
    pub eigenvalues: Option<Vec<f64>>,
    /// Bi-Ricci: the smallest value. Ricci: `scal - 2 lambda_max`, which is
    /// `lambda_1 + lambda_2 + lambda_3 - lambda_4` when `n = 4`.
    pub margin: f64,
}

/// Bi-Ricci or Ricci-eigenvalue condition of the metric `e^{-c|x|^2} g`.
pub fn experimental_conditions(s: &SffSample, which: Experimental, c: f64) -> Result<ExperimentalReport> {
    let n = s.dim();
    if n < 2 {
        return Err(Error::Dimension(format!("condition needs n >= 2, got n = {n}")));
    }
    let ric = conformal_ricci(s, c);
    match which {
        Experimental::Biricci => {
            let values: Vec<f64> = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .map(|(i, j)| ric[(i, i)] + ric[(j, j)] - conformal_sec(s, i, j, c))
                .collect();
            let margin = values.iter().copied().fold(f64::INFINITY, f64::min);
            Ok(ExperimentalReport {
                condition: which,
                values,
                eigenvalues: None,
                margin,
            })
        }
        Experimental::RicEigen => {
            let mut eig: Vec<f64> = ric.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            eig.sort_by(f64::total_cmp);
            let scal: f64 = eig.iter().sum();
            let values = (0..n).map(|i| scal - 2.0 * ric[(i, i)]).collect();
            let margin = scal - 2.0 * eig[n - 1];
            Ok(ExperimentalReport {
                condition: which,
                values,
                eigenvalues: Some(eig),
                margin,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    Sec,
    Pic2,
    Angle,
    Offdiag,
    Biricci,
    RicEigen,
}

impl std::str::FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sec" => Self::Sec,
            "pic2" => Self::Pic2,
            "angle" => Self::Angle,
            "offdiag" => Self::Offdiag,
            "biricci" => Self::Biricci,
            "ric-eigen" => Self::RicEigen,
            _ => return Err(Error::InvalidArgument(format!("unknown condition '{s}'"))),
        })
    }
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sec => "sec",
            Self::Pic2 => "pic2",
            Self::Angle => "angle",
            Self::Offdiag => "offdiag",
            Self::Biricci => "biricci",
            Self::RicEigen => "ric-eigen",
        }
    }

    /// Conformal constant used when none is given.
    pub fn default_c(self) -> Option<f64> {
        match self {
            Self::Sec => Some(3.0),
            Self::Pic2 => Some(4.0),
            Self::Biricci | Self::RicEigen => Some(0.0),
            Self::Angle | Self::Offdiag => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyConfig {
    pub condition: Condition,
    /// Conformal constant (sec, pic2, biricci, ric-eigen) or curvature bound
    /// (angle, offdiag; defaults to the measured one).
    pub c: Option<f64>,
    pub samples: usize,
    pub frames_per_point: usize,
    pub seed: u64,
    pub fd: FiniteDifference,
    /// Allowed negative margin.
    pub tolerance: f64,
}

impl CertifyConfig {
    pub fn new(condition: Condition) -> Self {
        let tolerance = match condition {
            Condition::Sec | Condition::Pic2 => 1e-6,
            _ => 1e-8,
        };
        Self {
            condition,
            c: None,
            samples: 1000,
            frames_per_point: 8,
            seed: 0,
            fd: FiniteDifference::default(),
            tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Location {
    pub sample: usize,
    /// 0 is the factor-aligned frame.
    pub frame: usize,
    pub indices: [usize; 4],
    pub params: Option<PicParams>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMinimum {
    pub lam: f64,
    pub mu: f64,
    pub min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    pub condition: Condition,
    pub c: f64,
    /// Largest pointwise `sup |A(u,u)|` over the sample points.
    pub measured_cf: f64,
    pub samples: usize,
    pub frames_per_point: usize,
    /// Smallest raw value of the condition's quantity.
    pub min_value: f64,
    /// Smallest margin against the condition's bound.
    pub min_margin: f64,
    pub argmin: Location,
    /// Per-(lam, mu) minimum of the raw PIC-2 quantity.
    pub grid_minima: Vec<GridMinimum>,
    /// Smallest margin of the two PIC-2 helper inequalities.
    pub helper_margin: Option<f64>,
    /// `None` for the exploratory conditions.
    pub passed: Option<bool>,
}

struct Candidate {
    value: f64,
    margin: f64,
    at: Location,
}

fn frames(f: &ExplicitImmersion, cfg: &CertifyConfig, index: usize) -> Result<Vec<SffSample>> {
    let mut rng = sample_rng(cfg.seed, index as u64);
    let base = random_point(f, &mut rng);
    let point = FramePoint::canonical(f, base)?;
    let sample = SffSample::measure(f, point, &cfg.fd)?;
    let mut out = vec![sample];
    for _ in 0..cfg.frames_per_point {
        let r = random_frame_rotation(out[0].dim(), &mut rng);
        let rotated = out[0].rotated(&r);
        out.push(rotated);
    }
    Ok(out)
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    cond: Condition,
    c: f64,
    c_f: f64,
    sample_index: usize,
    frame_index: usize,
    s: &SffSample,
    grid: &[PicParams],
    grid_min: &mut [f64],
    helper: &mut f64,
) -> Result<Vec<Candidate>> {
    let loc = |indices: [usize; 4], params| Location {
        sample: sample_index,
        frame: frame_index,
        indices,
        params,
    };
    let mut out = Vec::new();
    match cond {
        Condition::Sec => {
            let bound = 3.0 - 2.0 * c_f * c_f;
            for (i, j) in pairs(s.dim()) {
                let v = conformal_sec(s, i, j, c);
                out.push(Candidate {
                    value: v,
                    margin: v - bound,
                    at: loc([i, j, 0, 0], None),
                });
            }
        }
        Condition::Offdiag => {
            for (i, j) in pairs(s.dim()) {
                let m = offdiag_bound(s, i, j, c);
                out.push(Candidate {
                    value: m,
                    margin: m,
                    at: loc([i, j, 0, 0], None),
                });
            }
        }
        Condition::Angle => {
            if frame_index == 0 {
                let a = angle_bound(&s.point, c);
                out.push(Candidate {
                    value: a.lhs,
                    margin: a.margin,
                    at: loc([0; 4], None),
                });
            }
        }
        Condition::Pic2 => {
            let bound = pic2_pointwise_bound(&s.point, c_f);
            let e = [0, 1, 2, 3];
            for (g, p) in grid.iter().enumerate() {
                let v = pic2_quantity(s, e, *p, c)?;
                grid_min[g] = grid_min[g].min(v);
                let (my, mz) = pic2_helper_margins(s, e, *p, c_f)?;
                *helper = helper.min(my).min(mz);
                out.push(Candidate {
                    value: v,
                    margin: v / p.weight() - bound,
                    at: loc(e, Some(*p)),
                });
            }
        }
        Condition::Biricci | Condition::RicEigen => {
            let which = if cond == Condition::Biricci {
                Experimental::Biricci
            } else {
                Experimental::RicEigen
            };
            let r = experimental_conditions(s, which, c)?;
            out.push(Candidate {
                value: r.margin,
                margin: r.margin,
                at: loc([0; 4], None),
            });
        }
    }
    Ok(out)
}

/// Samples points and frames of `f` and reports the worst case of one condition.
pub fn certify(f: &ExplicitImmersion, cfg: &CertifyConfig) -> Result<CertifyReport> {
    if cfg.samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    cfg.fd.validate()?;
    let n = f.domain().dimension();
    if cfg.condition == Condition::Pic2 && n < 4 {
        return Err(Error::Dimension(format!("PIC-2 needs n >= 4, got n = {n}")));
    }
    if matches!(cfg.condition, Condition::Biricci | Condition::RicEigen) && n < 2 {
        return Err(Error::Dimension(format!("condition needs n >= 2, got n = {n}")));
    }
    let tables: Vec<Vec<SffSample>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| frames(f, cfg, i))
        .collect::<Result<_>>()?;
    let measured_cf = tables.par_iter().map(|t| t[0].pointwise_sup()).reduce(|| 0.0, f64::max);
    let c = cfg.c.or(cfg.condition.default_c()).unwrap_or(measured_cf);
    let c_f = match cfg.condition {
        Condition::Angle | Condition::Offdiag => c,
        _ => measured_cf,
    };
    let grid = if cfg.condition == Condition::Pic2 {
        PicParams::grid()
    } else {
        Vec::new()
    };

    let per_sample: Vec<(Candidate, Candidate, Vec<f64>, f64)> = tables
        .par_iter()
        .enumerate()
        .map(|(i, table)| {
            let mut grid_min = vec![f64::INFINITY; grid.len()];
            let mut helper = f64::INFINITY;
            let mut by_value: Option<Candidate> = None;
            let mut by_margin: Option<Candidate> = None;
            for (k, s) in table.iter().enumerate() {
                for cand in evaluate(cfg.condition, c, c_f, i, k, s, &grid, &mut grid_min, &mut helper)? {
                    if by_value.as_ref().is_none_or(|b| cand.value < b.value) {
                        by_value = Some(Candidate { ..cand });
                    }
                    if by_margin.as_ref().is_none_or(|b| cand.margin < b.margin) {
                        by_margin = Some(cand);
                    }
                }
            }
            Ok((
                by_value.expect("nonempty"),
                by_margin.expect("nonempty"),
                grid_min,
                helper,
            ))
        })
        .collect::<Result<_>>()?;

    let mut min_value = f64::INFINITY;
    let mut worst: Option<&Candidate> = None;
    let mut grid_min = vec![f64::INFINITY; grid.len()];
    let mut helper = f64::INFINITY;
    for (v, m, g, h) in &per_sample {
        min_value = min_value.min(v.value);
        if worst.is_none_or(|w| m.margin < w.margin) {
            worst = Some(m);
        }
        grid_min.iter_mut().zip(g).for_each(|(a, b)| *a = a.min(*b));
        helper = helper.min(*h);
    }
    let worst = worst.expect("at least one sample");
    let passed = match cfg.condition {
        Condition::Biricci | Condition::RicEigen => None,
        Condition::Pic2 => Some(worst.margin >= -cfg.tolerance && min_value > 0.0 && helper >= -1e-8),
        _ => Some(worst.margin >= -cfg.tolerance),
    };
    Ok(CertifyReport {
        condition: cfg.condition,
        c,
        measured_cf,
        samples: cfg.samples,
        frames_per_point: cfg.frames_per_point,
        min_value,
        min_margin: worst.margin,
        argmin: worst.at,
        grid_minima: grid
            .iter()
            .zip(grid_min)
            .map(|(p, m)| GridMinimum {
                lam: p.lam,
                mu: p.mu,
                min: m,
            })
            .collect(),
        helper_margin: (cfg.condition == Condition::Pic2).then_some(helper),
        passed,
    })
}
