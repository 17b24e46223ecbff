use nalgebra::DVector;
use num::ToPrimitive;

use super::basis::FactorMap;
use crate::error::{Error, Result};
use crate::exact::to_f64;
use crate::measure::{
    ambient_dimension, curvature_data, immersion_check, CurvatureDataF64, ProblemInstance, VeroneseMeasure,
};
use crate::spectral::{lambda_iso_f64, rho_f64};

/// A point or tangent vector of a sphere product, one block per factor in
/// `R^{n_m + 1}`.
pub type ProductVector = Vec<DVector<f64>>;

#[derive(Debug, Clone)]
enum Kind {
    Sns1 {
        r1: f64,
        r2: f64,
    },
    Tensor {
        maps: Vec<Vec<FactorMap>>,
        atoms: Vec<(Vec<u32>, f64)>,
    },
}

/// An explicit map from a sphere product into the unit ball of `R^N`.
#[derive(Debug, Clone)]
pub struct ExplicitImmersion {
    domain: ProblemInstance,
    ambient_dim: usize,
    metric_scales: Vec<f64>,
    weights: Vec<(Vec<u32>, f64)>,
    measure: Option<VeroneseMeasure>,
    kind: Kind,
}

/// `(r1 cos t x, r1 sin t x, r2 cos 2t, r2 sin 2t)` on `S^n x S^1`.
pub fn build_sns1(n: u32, r1: f64, r2: f64) -> Result<ExplicitImmersion> {
    if !(r1 > 0.0 && r2 > 0.0) || (r1 * r1 + r2 * r2 - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "need r1, r2 > 0 with r1^2 + r2^2 = 1, got ({r1}, {r2})"
        )));
    }
    let domain = ProblemInstance::new(vec![n, 1])?;
    Ok(ExplicitImmersion {
        ambient_dim: 2 * n as usize + 4,
        metric_scales: vec![r1 * r1, r1 * r1 + 4.0 * r2 * r2],
        weights: vec![(vec![1, 1], r1 * r1), (vec![0, 2], r2 * r2)],
        measure: None,
        kind: Kind::Sns1 { r1, r2 },
        domain,
    })
}

/// The product-of-circles map with the curvature-optimal radii `sqrt(2/3), sqrt(1/3)`.
pub fn build_sns1_optimal(n: u32) -> Result<ExplicitImmersion> {
    build_sns1(n, (2.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt())
}

/// `phi_{n,l}` on its own: constant, inclusion, or quadratic Veronese.
pub fn build_veronese(n: u32, l: u32) -> Result<ExplicitImmersion> {
    if l > 2 {
        return Err(Error::Unsupported(format!(
            "no explicit eigenbasis for l = {l} on S^{n}"
        )));
    }
    let mu = VeroneseMeasure::from_pairs(&[n], &[(&[l], crate::exact::qi(1))])?;
    tensor_unchecked(&mu)
}

/// The weighted direct sum of tensor products of the factor maps.
pub fn build_tensor(mu: &VeroneseMeasure) -> Result<ExplicitImmersion> {
    mu.validate().map_err(Error::InvalidMeasure)?;
    if let Some(atom) = mu.atoms().iter().find(|a| a.l.iter().any(|&l| l > 2)) {
        return Err(Error::Unsupported(format!(
            "atom {:?} needs a factor with l >= 3",
            atom.l
        )));
    }
    immersion_check(&curvature_data(mu))?;
    tensor_unchecked(mu)
}

fn tensor_unchecked(mu: &VeroneseMeasure) -> Result<ExplicitImmersion> {
    let domain = mu.instance().clone();
    let maps = domain
        .factors()
        .iter()
        .map(|&n| (0..=2).map(|l| FactorMap::new(n, l).expect("l <= 2")).collect())
        .collect();
    let data = curvature_data(mu).to_f64();
    let weights: Vec<(Vec<u32>, f64)> = mu.atoms().iter().map(|a| (a.l.clone(), to_f64(&a.weight))).collect();
    let atoms = weights.iter().map(|(l, w)| (l.clone(), w.sqrt())).collect();
    Ok(ExplicitImmersion {
        ambient_dim: ambient_dimension(mu)
            .to_usize()
            .ok_or_else(|| Error::InvalidArgument("ambient dimension overflows".into()))?,
        metric_scales: data.g,
        weights,
        measure: Some(mu.clone()),
        kind: Kind::Tensor { maps, atoms },
        domain,
    })
}

fn kron_all(parts: &[DVector<f64>]) -> DVector<f64> {
    let mut out = DVector::from_element(1, 1.0);
    for p in parts {
        out = out.kronecker(p);
    }
    out
}

impl ExplicitImmersion {
    pub fn domain(&self) -> &ProblemInstance {
        &self.domain
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// `c_m` with pullback metric `sum c_m g_{S^{n_m}}`.
    pub fn metric_scales(&self) -> &[f64] {
        &self.metric_scales
    }

    /// The measure this map was built from, if any.
    pub fn measure(&self) -> Option<&VeroneseMeasure> {
        self.measure.as_ref()
    }

    /// Curvature data of the tensor-Veronese measure equivalent to this map.
    pub fn curvature_f64(&self) -> CurvatureDataF64 {
        let f = self.domain.factors();
        let m = f.len();
        let mut a = vec![vec![0.0; m]; m];
        let mut g = vec![0.0; m];
        for (l, w) in &self.weights {
            for i in 0..m {
                g[i] += w * rho_f64(f[i], l[i]);
                a[i][i] += w * lambda_iso_f64(f[i], l[i]);
                for j in 0..m {
                    if i != j {
                        a[i][j] += 3.0 * w * rho_f64(f[i], l[i]) * rho_f64(f[j], l[j]);
                    }
                }
            }
        }
        CurvatureDataF64 { a, g }
    }

    pub fn check_point(&self, x: &[DVector<f64>]) -> Result<()> {
        let f = self.domain.factors();
        if x.len() != f.len() || x.iter().zip(f).any(|(v, &n)| v.len() != n as usize + 1) {
            return Err(Error::Dimension("point does not match the domain".into()));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[DVector<f64>]) -> DVector<f64> {
        match &self.kind {
            Kind::Sns1 { r1, r2 } => {
                let (p, y) = (&x[0], &x[1]);
                let mut out = Vec::with_capacity(self.ambient_dim);
                out.extend(p.iter().map(|v| r1 * y[0] * v));
                out.extend(p.iter().map(|v| r1 * y[1] * v));
                out.push(r2 * (y[0] * y[0] - y[1] * y[1]));
                out.push(r2 * 2.0 * y[0] * y[1]);
                DVector::from_vec(out)
            }
            Kind::Tensor { maps, atoms } => {
                let values: Vec<Vec<DVector<f64>>> = maps
                    .iter()
                    .zip(x)
                    .map(|(ms, p)| ms.iter().map(|m| m.eval(p)).collect())
                    .collect();
                let mut out = Vec::with_capacity(self.ambient_dim);
                for (l, sw) in atoms {
                    let parts: Vec<DVector<f64>> = l
                        .iter()
                        .enumerate()
                        .map(|(m, &k)| values[m][k as usize].clone())
                        .collect();
                    out.extend(kron_all(&parts).iter().map(|v| v * sw));
                }
                DVector::from_vec(out)
            }
        }
    }

    /// `dF_x(v)`.
    pub fn differential(&self, x: &[DVector<f64>], v: &[DVector<f64>]) -> DVector<f64> {
        match &self.kind {
            Kind::Sns1 { r1, r2 } => {
                let (p, y, dp, dy) = (&x[0], &x[1], &v[0], &v[1]);
                let mut out = Vec::with_capacity(self.ambient_dim);
                out.extend(p.iter().zip(dp.iter()).map(|(a, b)| r1 * (dy[0] * a + y[0] * b)));
                out.extend(p.iter().zip(dp.iter()).map(|(a, b)| r1 * (dy[1] * a + y[1] * b)));
                out.push(r2 * 2.0 * (y[0] * dy[0] - y[1] * dy[1]));
                out.push(r2 * 2.0 * (dy[0] * y[1] + y[0] * dy[1]));
                DVector::from_vec(out)
            }
            Kind::Tensor { maps, atoms } => {
                let mut out = Vec::with_capacity(self.ambient_dim);
                for (l, sw) in atoms {
                    let values: Vec<DVector<f64>> = l
                        .iter()
                        .enumerate()
                        .map(|(m, &k)| maps[m][k as usize].eval(&x[m]))
                        .collect();
                    let mut block = DVector::zeros(values.iter().map(|v| v.len()).product());
                    for m in 0..l.len() {
                        let mut parts = values.clone();
                        parts[m] = maps[m][l[m] as usize].differential(&x[m], &v[m]);
                        block += kron_all(&parts);
                    }
                    out.extend(block.iter().map(|b| b * sw));
                }
                DVector::from_vec(out)
            }
        }
    }

    /// `sum_m c_m |v_m|^2`.
    pub fn pullback_norm2(&self, v: &[DVector<f64>]) -> f64 {
        v.iter()
            .zip(&self.metric_scales)
            .map(|(b, c)| c * b.norm_squared())
            .sum()
    }
}
