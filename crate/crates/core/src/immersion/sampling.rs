use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::frame::{sff_at, FiniteDifference, FramePoint};
use super::map::{ExplicitImmersion, ProductVector};
use crate::error::{Error, Result};
use crate::exact::{quad_form, Q};
use crate::measure::{curvature_data, CurvatureDataF64, VeroneseMeasure};

/// Independent stream `index` of the generator seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian(rng: &mut impl Rng, len: usize) -> DVector<f64> {
    DVector::from_fn(len, |_, _| rng.sample(StandardNormal))
}

/// Uniform point of the product: a normalized Gaussian per factor.
pub fn random_point(f: &ExplicitImmersion, rng: &mut impl Rng) -> ProductVector {
    f.domain()
        .factors()
        .iter()
        .map(|&n| loop {
            let g = gaussian(rng, n as usize + 1);
            let norm = g.norm();
            if norm > 1e-12 {
                break g / norm;
            }
        })
        .collect()
}

/// Uniform pullback-unit direction, as frame coefficients and as a domain vector.
pub fn random_unit_tangent(fp: &FramePoint, rng: &mut impl Rng) -> (Vec<f64>, ProductVector) {
    let g = loop {
        let g = gaussian(rng, fp.dim());
        if g.norm() > 1e-12 {
            break g.normalize();
        }
    };
    let c: Vec<f64> = g.iter().copied().collect();
    let u = fp.combine(&c);
    (c, u)
}

/// Haar-distributed orthogonal matrix.
pub fn random_frame_rotation(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let col = -q.column(j);
            q.set_column(j, &col);
        }
    }
    q
}

/// `U_m = |u_m|^2` in the round metric of each factor.
pub fn round_norms2(u: &[DVector<f64>]) -> Vec<f64> {
    u.iter().map(|b| b.norm_squared()).collect()
}

/// `sum E[lambda_m] U_m^2 + 6 sum_{a<b} E[rho_a rho_b] U_a U_b`.
pub fn closed_form_sff_norm2(mu: &VeroneseMeasure, u: &[Q]) -> Result<Q> {
    if u.len() != mu.instance().len() {
        return Err(Error::Dimension(format!(
            "U has {} entries for {} factors",
            u.len(),
            mu.instance().len()
        )));
    }
    Ok(quad_form(&curvature_data(mu).a, u))
}

pub fn closed_form_sff_norm2_f64(data: &CurvatureDataF64, u: &[f64]) -> f64 {
    let m = u.len();
    (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| data.a[i][j] * u[i] * u[j])
        .sum()
}

/// One sampled direction and its second fundamental form.
#[derive(Debug, Clone)]
pub struct TangentSample {
    pub point: FramePoint,
    pub u: ProductVector,
    pub a_uu: DVector<f64>,
    /// `U^T A U` at the direction's round norms.
    pub closed_form: f64,
}

/// Sample `index` of the stream seeded by `seed`.
pub fn random_sample(f: &ExplicitImmersion, seed: u64, index: u64, fd: &FiniteDifference) -> Result<TangentSample> {
    let mut rng = sample_rng(seed, index);
    let base = random_point(f, &mut rng);
    let point = FramePoint::canonical(f, base)?;
    let (_, u) = random_unit_tangent(&point, &mut rng);
    let a_uu = sff_at(f, &point, &u, fd)?;
    let closed_form = closed_form_sff_norm2_f64(&f.curvature_f64(), &round_norms2(&u));
    Ok(TangentSample {
        point,
        u,
        a_uu,
        closed_form,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureStats {
    pub samples: usize,
    pub max: f64,
    pub min: f64,
    pub mean: f64,
    pub stddev: f64,
    /// Largest `| |A(u,u)|^2 - U^T A U |` over the samples.
    pub closed_form_gap: f64,
}

/// Statistics of `|A(u,u)|` over uniformly sampled points and unit directions.
pub fn estimate_normal_curvature(
    f: &ExplicitImmersion,
    samples: usize,
    seed: u64,
    fd: &FiniteDifference,
) -> Result<CurvatureStats> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let draws: Vec<(f64, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| random_sample(f, seed, i, fd).map(|s| (s.a_uu.norm(), s.a_uu.norm_squared() - s.closed_form)))
        .collect::<Result<_>>()?;
    let n = samples as f64;
    let mean = draws.iter().map(|d| d.0).sum::<f64>() / n;
    let var = draws.iter().map(|d| (d.0 - mean).powi(2)).sum::<f64>() / n;
    Ok(CurvatureStats {
        samples,
        max: draws.iter().map(|d| d.0).fold(f64::NEG_INFINITY, f64::max),
        min: draws.iter().map(|d| d.0).fold(f64::INFINITY, f64::min),
        mean,
        stddev: var.sqrt(),
        closed_form_gap: draws.iter().map(|d| d.1.abs()).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};
    use crate::immersion::{build_sns1_optimal, build_tensor, build_veronese, measured_pullback_norm2};

    #[test]
    fn closed_form_examples() {
        let mu = VeroneseMeasure::from_pairs(&[2, 1], &[(&[1, 1], q(2, 3)), (&[0, 2], q(1, 3))]).unwrap();
        assert_eq!(closed_form_sff_norm2(&mu, &[qi(1), qi(0)]).unwrap(), q(2, 3));
        assert_eq!(closed_form_sff_norm2(&mu, &[qi(0), qi(0)]).unwrap(), qi(0));
        assert_eq!(closed_form_sff_norm2(&mu, &[qi(0), q(1, 2)]).unwrap(), q(3, 2));
    }

    #[test]
    fn sphere_inclusion_has_unit_curvature() {
        let f = build_veronese(3, 1).unwrap();
        let stats = estimate_normal_curvature(&f, 200, 7, &FiniteDifference::default()).unwrap();
        assert!((stats.max - 1.0).abs() < 1e-8 && (stats.min - 1.0).abs() < 1e-8);
    }

    #[test]
    fn sns1_is_isotropic() {
        let f = build_sns1_optimal(2).unwrap();
        let stats = estimate_normal_curvature(&f, 300, 1, &FiniteDifference::default()).unwrap();
        assert!((stats.max - 1.5f64.sqrt()).abs() < 1e-6, "{stats:?}");
        assert!(stats.stddev < 1e-6);
        assert!(stats.closed_form_gap < 1e-6);
    }

    #[test]
    fn veronese_plane_curvature() {
        let f = build_veronese(2, 2).unwrap();
        let stats = estimate_normal_curvature(&f, 300, 3, &FiniteDifference::default()).unwrap();
        assert!((stats.max - (4.0f64 / 3.0).sqrt()).abs() < 1e-6, "{stats:?}");
        let mut rng = sample_rng(3, 0);
        let x = random_point(&f, &mut rng);
        let fp = FramePoint::canonical(&f, x.clone()).unwrap();
        let (_, u) = random_unit_tangent(&fp, &mut rng);
        let m = measured_pullback_norm2(&f, &x, &u, &FiniteDifference::default());
        assert!((m - 1.0).abs() < 1e-8);
        assert!(fp.orthonormality_error() < 1e-10);
    }

    #[test]
    fn rotations_are_orthogonal() {
        let mut rng = sample_rng(0, 0);
        let r = random_frame_rotation(4, &mut rng);
        assert!((r.transpose() * &r - DMatrix::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn tensor_prop32_sampled() {
        let mu = VeroneseMeasure::from_pairs(&[2, 2], &[(&[1, 1], q(3, 5)), (&[0, 2], q(2, 5))]).unwrap();
        let f = build_tensor(&mu).unwrap();
        let stats = estimate_normal_curvature(&f, 200, 5, &FiniteDifference::default()).unwrap();
        assert!((stats.max - (5.0f64 / 3.0).sqrt()).abs() < 1e-6, "{stats:?}");
    }
}
