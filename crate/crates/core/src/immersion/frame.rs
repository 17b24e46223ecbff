use nalgebra::{DMatrix, DVector};

use super::map::{ExplicitImmersion, ProductVector};
use crate::error::{Error, Result};

/// Central differences at `h, h/2, ..., h/2^(levels-1)` combined by
/// Richardson extrapolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDifference {
    pub h: f64,
    pub levels: usize,
}

impl Default for FiniteDifference {
    fn default() -> Self {
        Self { h: 0.02, levels: 3 }
    }
}

impl FiniteDifference {
    pub fn validate(&self) -> Result<()> {
        let smallest = self.h / 2f64.powi(self.levels as i32 - 1);
        let in_range = (1e-6..1.0).contains(&smallest) && self.h < 1.0;
        if self.levels == 0 || !in_range {
            return Err(Error::InvalidArgument(format!(
                "finite-difference step underflow (h = {}, levels = {})",
                self.h, self.levels
            )));
        }
        Ok(())
    }

    fn extrapolate(&self, mut column: Vec<DVector<f64>>) -> DVector<f64> {
        for j in 1..column.len() {
            let factor = 4f64.powi(j as i32);
            for k in (j..column.len()).rev() {
                column[k] = (&column[k] * factor - &column[k - 1]) / (factor - 1.0);
            }
        }
        column.pop().expect("at least one level")
    }

    pub fn first<F: Fn(f64) -> DVector<f64>>(&self, f: F) -> DVector<f64> {
        let column = (0..self.levels)
            .map(|k| {
                let h = self.h / 2f64.powi(k as i32);
                (f(h) - f(-h)) / (2.0 * h)
            })
            .collect();
        self.extrapolate(column)
    }

    pub fn second<F: Fn(f64) -> DVector<f64>>(&self, f: F) -> DVector<f64> {
        let f0 = f(0.0);
        let column = (0..self.levels)
            .map(|k| {
                let h = self.h / 2f64.powi(k as i32);
                (f(h) - &f0 * 2.0 + f(-h)) / (h * h)
            })
            .collect();
        self.extrapolate(column)
    }
}

/// The product of great circles through `x` with initial velocity `v`;
/// a geodesic of every metric `sum c_m g_{S^{n_m}}`.
pub fn product_geodesic(x: &[DVector<f64>], v: &[DVector<f64>], t: f64) -> ProductVector {
    x.iter()
        .zip(v)
        .map(|(p, w)| {
            let speed = w.norm();
            if speed == 0.0 {
                p.clone()
            } else {
                p * (speed * t).cos() + w * ((speed * t).sin() / speed)
            }
        })
        .collect()
}

/// `|d/dt F(gamma(t))|^2` at `t = 0` by finite differences.
pub fn measured_pullback_norm2(
    f: &ExplicitImmersion,
    x: &[DVector<f64>],
    v: &[DVector<f64>],
    fd: &FiniteDifference,
) -> f64 {
    fd.first(|t| f.eval(&product_geodesic(x, v, t))).norm_squared()
}

fn project_to_tangent(x: &DVector<f64>, v: DVector<f64>) -> DVector<f64> {
    let c = x.dot(&v);
    v - x * c
}

/// A point of the image with a pullback-orthonormal tangent frame.
#[derive(Debug, Clone)]
pub struct FramePoint {
    pub base: ProductVector,
    /// `F(x)`.
    pub position: DVector<f64>,
    /// Frame vectors in the domain, one block per factor.
    pub frame: Vec<ProductVector>,
    /// `dF(e_i)`, orthonormal in `R^N`.
    pub pushed: Vec<DVector<f64>>,
    pub x_tan: DVector<f64>,
    pub x_perp: DVector<f64>,
}

impl FramePoint {
    /// Factor-aligned frame: an orthonormal basis of each `T_{x_m} S^{n_m}`
    /// scaled by `1/sqrt(c_m)`.
    pub fn canonical(f: &ExplicitImmersion, base: ProductVector) -> Result<Self> {
        f.check_point(&base)?;
        let scales = f.metric_scales();
        if let Some(m) = scales.iter().position(|&c| c <= 0.0) {
            return Err(Error::Degenerate { index: m });
        }
        let mut frame = Vec::new();
        for (m, x) in base.iter().enumerate() {
            let dim = x.len();
            let mut basis: Vec<DVector<f64>> = Vec::new();
            let mut candidates: Vec<DVector<f64>> = (0..dim)
                .map(|k| project_to_tangent(x, DVector::from_fn(dim, |i, _| (i == k) as u8 as f64)))
                .collect();
            candidates.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
            for mut c in candidates {
                for b in &basis {
                    let d = b.dot(&c);
                    c -= b * d;
                }
                c = project_to_tangent(x, c);
                let n = c.norm();
                if n > 1e-8 && basis.len() < dim - 1 {
                    basis.push(c / n);
                }
            }
            for b in basis {
                let mut v: ProductVector = base.iter().map(|p| DVector::zeros(p.len())).collect();
                v[m] = b / scales[m].sqrt();
                frame.push(v);
            }
        }
        Ok(Self::with_frame(f, base, frame))
    }

    fn with_frame(f: &ExplicitImmersion, base: ProductVector, frame: Vec<ProductVector>) -> Self {
        let position = f.eval(&base);
        let pushed: Vec<DVector<f64>> = frame.iter().map(|e| f.differential(&base, e)).collect();
        let mut x_tan = DVector::zeros(position.len());
        for e in &pushed {
            x_tan += e * position.dot(e);
        }
        let x_perp = &position - &x_tan;
        Self {
            base,
            position,
            frame,
            pushed,
            x_tan,
            x_perp,
        }
    }

    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    /// The frame `e'_i = sum_k R_ki e_k` for an orthogonal `R`.
    pub fn rotated(&self, r: &DMatrix<f64>) -> Self {
        let n = self.dim();
        let frame = (0..n)
            .map(|i| {
                (0..self.base.len())
                    .map(|m| {
                        (0..n).fold(DVector::zeros(self.base[m].len()), |acc, k| {
                            acc + &self.frame[k][m] * r[(k, i)]
                        })
                    })
                    .collect()
            })
            .collect();
        let pushed = (0..n)
            .map(|i| {
                (0..n).fold(DVector::zeros(self.position.len()), |acc, k| {
                    acc + &self.pushed[k] * r[(k, i)]
                })
            })
            .collect();
        Self {
            frame,
            pushed,
            ..self.clone()
        }
    }

    /// Max deviation of `<dF e_i, dF e_j>` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.pushed[i].dot(&self.pushed[j]) - target).abs());
            }
        }
        worst
    }

    /// `sum_i a_i e_i` as a domain tangent vector.
    pub fn combine(&self, coeffs: &[f64]) -> ProductVector {
        (0..self.base.len())
            .map(|m| {
                coeffs
                    .iter()
                    .zip(&self.frame)
                    .fold(DVector::zeros(self.base[m].len()), |acc, (a, e)| acc + &e[m] * *a)
            })
            .collect()
    }

    fn remove_tangential(&self, mut v: DVector<f64>) -> DVector<f64> {
        for e in &self.pushed {
            let c = e.dot(&v);
            v -= e * c;
        }
        v
    }
}

fn sff_raw(f: &ExplicitImmersion, fp: &FramePoint, u: &[DVector<f64>], fd: &FiniteDifference) -> DVector<f64> {
    let acc = fd.second(|t| f.eval(&product_geodesic(&fp.base, u, t)));
    fp.remove_tangential(acc)
}

/// `A(u,u)` for a pullback-unit tangent vector `u` at `fp`.
pub fn sff_at(
    f: &ExplicitImmersion,
    fp: &FramePoint,
    u: &[DVector<f64>],
    fd: &FiniteDifference,
) -> Result<DVector<f64>> {
    fd.validate()?;
    let norm2 = f.pullback_norm2(u);
    if (norm2 - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "tangent vector has pullback norm^2 {norm2}, expected 1"
        )));
    }
    if u.iter()
        .zip(&fp.base)
        .any(|(w, x)| w.dot(x).abs() > 1e-9 * w.norm().max(1.0))
    {
        return Err(Error::InvalidArgument("vector is not tangent at the base point".into()));
    }
    Ok(sff_raw(f, fp, u, fd))
}

/// The table `A(e_i, e_j)` at one frame point.
#[derive(Debug, Clone)]
pub struct SffSample {
    pub point: FramePoint,
    pub a: Vec<Vec<DVector<f64>>>,
    pub h: DVector<f64>,
}

impl SffSample {
    /// Diagonal entries directly, off-diagonal ones by polarization.
    pub fn measure(f: &ExplicitImmersion, point: FramePoint, fd: &FiniteDifference) -> Result<Self> {
        fd.validate()?;
        let n = point.dim();
        let mut a = vec![vec![DVector::zeros(point.position.len()); n]; n];
        for i in 0..n {
            a[i][i] = sff_raw(f, &point, &point.frame[i], fd);
            for j in 0..i {
                let mut plus = vec![0.0; n];
                plus[i] = 1.0;
                plus[j] = 1.0;
                let mut minus = plus.clone();
                minus[j] = -1.0;
                let ap = sff_raw(f, &point, &point.combine(&plus), fd);
                let am = sff_raw(f, &point, &point.combine(&minus), fd);
                a[i][j] = (ap - am) / 4.0;
                a[j][i] = a[i][j].clone();
            }
        }
        Ok(Self::from_table(point, a))
    }

    pub fn from_table(point: FramePoint, a: Vec<Vec<DVector<f64>>>) -> Self {
        let h = (0..a.len()).fold(DVector::zeros(point.position.len()), |acc, i| acc + &a[i][i]);
        Self { point, a, h }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// `A(u, u)` for `u = sum_i c_i e_i`.
    pub fn eval(&self, c: &[f64]) -> DVector<f64> {
        let mut out = DVector::zeros(self.h.len());
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                out += &self.a[i][j] * (c[i] * c[j]);
            }
        }
        out
    }

    /// The same data in the frame `e'_i = sum_k R_ki e_k`.
    pub fn rotated(&self, r: &DMatrix<f64>) -> Self {
        let n = self.dim();
        let mut a = vec![vec![DVector::zeros(self.h.len()); n]; n];
        for i in 0..n {
            for j in 0..=i {
                let mut v = DVector::zeros(self.h.len());
                for k in 0..n {
                    for l in 0..n {
                        v += &self.a[k][l] * (r[(k, i)] * r[(l, j)]);
                    }
                }
                a[j][i] = v.clone();
                a[i][j] = v;
            }
        }
        Self::from_table(self.point.rotated(r), a)
    }

    /// Largest `|<A(e_i,e_j), dF e_k>|`.
    pub fn tangential_leak(&self) -> f64 {
        let mut worst = 0.0f64;
        for row in &self.a {
            for v in row {
                for e in &self.point.pushed {
                    worst = worst.max(v.dot(e).abs());
                }
            }
        }
        worst
    }

    /// `sup_{|u|=1} |A(u,u)|` at this point, by projected ascent from the
    /// frame vectors and their pairwise diagonals.
    pub fn pointwise_sup(&self) -> f64 {
        let n = self.dim();
        let mut starts: Vec<Vec<f64>> = Vec::new();
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            starts.push(e);
            for j in 0..i {
                for sign in [1.0, -1.0] {
                    let mut d = vec![0.0; n];
                    d[i] = std::f64::consts::FRAC_1_SQRT_2;
                    d[j] = sign * std::f64::consts::FRAC_1_SQRT_2;
                    starts.push(d);
                }
            }
        }
        let mut best = 0.0f64;
        for mut c in starts {
            let mut value = self.eval(&c).norm_squared();
            for _ in 0..500 {
                let a = self.eval(&c);
                // gradient of |A(u,u)|^2 is 4 <A(u, e_k), A(u,u)>
                let grad: Vec<f64> = (0..n)
                    .map(|k| {
                        4.0 * (0..n)
                            .fold(DVector::zeros(a.len()), |acc, j| acc + &self.a[k][j] * c[j])
                            .dot(&a)
                    })
                    .collect();
                let mut step = 0.25;
                let mut improved = false;
                while step > 1e-12 {
                    let trial: Vec<f64> = c.iter().zip(&grad).map(|(x, g)| x + step * g).collect();
                    let norm = trial.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let trial: Vec<f64> = trial.iter().map(|x| x / norm).collect();
                    let tv = self.eval(&trial).norm_squared();
                    if tv > value {
                        improved = tv - value > 1e-16 * value.max(1.0);
                        c = trial;
                        value = tv;
                        break;
                    }
                    step /= 2.0;
                }
                if !improved {
                    break;
                }
            }
            best = best.max(value);
        }
        best.sqrt()
    }
}
