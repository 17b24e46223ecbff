use nalgebra::{DMatrix, DVector};
use num::traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::copositivity::is_isotropic;
use crate::error::{Error, Result};
use crate::exact::{qi, snap_rational, solve_exact, to_f64, Q};
use crate::measure::{curvature_data, Atom, ProblemInstance, VeroneseMeasure};
use crate::spectral::{lambda_iso, rho, SpectralParams};

#[derive(Debug, Clone)]
pub struct IsotropicOptions {
    pub starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Largest denominator accepted when snapping `s` and `G` to rationals.
    pub max_denominator: u64,
}

impl Default for IsotropicOptions {
    fn default() -> Self {
        Self {
            starts: 24,
            seed: 0x150_7201,
            max_iterations: 400,
            max_denominator: 100_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IsotropicWeights {
    /// Verified exactly: `B(s) = 0` with rational weights.
    Exact { weights: Vec<Q>, s: Q },
    /// Verified to relative residual `1e-9` only.
    Numeric { weights: Vec<f64>, s: f64, residual: f64 },
}

/// Weights aligned with the requested support (zeros allowed) and `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropicSolution {
    pub support: Vec<Vec<u32>>,
    pub weights: IsotropicWeights,
}

impl IsotropicSolution {
    pub fn is_exact(&self) -> bool {
        matches!(self.weights, IsotropicWeights::Exact { .. })
    }

    pub fn s_f64(&self) -> f64 {
        match &self.weights {
            IsotropicWeights::Exact { s, .. } => to_f64(s),
            IsotropicWeights::Numeric { s, .. } => *s,
        }
    }

    /// The exact measure with zero-weight atoms removed; `None` on the numeric path.
    pub fn measure(&self, instance: &ProblemInstance) -> Option<VeroneseMeasure> {
        let IsotropicWeights::Exact { weights, .. } = &self.weights else {
            return None;
        };
        let atoms = self
            .support
            .iter()
            .zip(weights)
            .filter(|(_, w)| !w.is_zero())
            .map(|(l, w)| Atom::new(l.clone(), w.clone()))
            .collect();
        VeroneseMeasure::new(instance.clone(), atoms).ok()
    }
}

/// Per-atom coefficients of the isotropic system.
struct System {
    m: usize,
    /// `rho[k][a]`
    rho: Vec<Vec<f64>>,
    /// Equation list `(a, b, coefficient per atom, scale)`.
    pairs: Vec<(usize, usize, Vec<f64>, f64)>,
}

impl System {
    fn new(instance: &ProblemInstance, support: &[Vec<u32>]) -> Self {
        let f = instance.factors();
        let m = f.len();
        let rho_q: Vec<Vec<Q>> = support
            .iter()
            .map(|l| (0..m).map(|a| rho(SpectralParams::new(f[a], l[a]).unwrap())).collect())
            .collect();
        let rho: Vec<Vec<f64>> = rho_q.iter().map(|r| r.iter().map(to_f64).collect()).collect();
        let mut pairs = Vec::new();
        for a in 0..m {
            for b in a..m {
                let coeff: Vec<f64> = support
                    .iter()
                    .enumerate()
                    .map(|(k, l)| {
                        if a == b {
                            to_f64(&lambda_iso(SpectralParams::new(f[a], l[a]).unwrap()))
                        } else {
                            3.0 * rho[k][a] * rho[k][b]
                        }
                    })
                    .collect();
                let scale = coeff
                    .iter()
                    .chain(rho.iter().map(|r| r[a] * r[b]).collect::<Vec<_>>().iter())
                    .fold(0.0f64, |acc, x| acc.max(x.abs()));
                if scale > 0.0 {
                    pairs.push((a, b, coeff, scale));
                }
            }
        }
        Self { m, rho, pairs }
    }

    fn g(&self, alpha: &[f64]) -> Vec<f64> {
        (0..self.m)
            .map(|a| alpha.iter().zip(&self.rho).map(|(w, r)| w * r[a]).sum())
            .collect()
    }

    /// Normalized residuals `(s G_a G_b - A_ab)/scale` and their Jacobian in
    /// `(alpha, s)`.
    fn residual(&self, alpha: &[f64], s: f64) -> (Vec<f64>, DMatrix<f64>) {
        let k = alpha.len();
        let g = self.g(alpha);
        let mut r = Vec::with_capacity(self.pairs.len());
        let mut jac = DMatrix::zeros(self.pairs.len(), k + 1);
        for (row, (a, b, coeff, scale)) in self.pairs.iter().enumerate() {
            let amat: f64 = alpha.iter().zip(coeff).map(|(w, c)| w * c).sum();
            r.push((s * g[*a] * g[*b] - amat) / scale);
            for j in 0..k {
                jac[(row, j)] = (s * (self.rho[j][*a] * g[*b] + g[*a] * self.rho[j][*b]) - coeff[j]) / scale;
            }
            jac[(row, k)] = g[*a] * g[*b] / scale;
        }
        (r, jac)
    }
}

fn alpha_of(x: &[f64]) -> Vec<f64> {
    let total: f64 = x.iter().map(|v| v * v).sum();
    x.iter().map(|v| v * v / total).collect()
}

/// Levenberg-Marquardt on `alpha = x^2 / |x|^2`, `s` free.
fn levenberg_marquardt(sys: &System, x0: Vec<f64>, s0: f64, iters: usize) -> (Vec<f64>, f64, f64) {
    let k = x0.len();
    let cost = |x: &[f64], s: f64| -> f64 {
        let (r, _) = sys.residual(&alpha_of(x), s);
        r.iter().map(|v| v * v).sum()
    };
    let (mut x, mut s) = (x0, s0);
    let mut c = cost(&x, s);
    let mut damping = 1e-3;
    for _ in 0..iters {
        if c < 1e-30 {
            break;
        }
        let alpha = alpha_of(&x);
        let (r, ja) = sys.residual(&alpha, s);
        // chain rule through the simplex parametrization
        let total: f64 = x.iter().map(|v| v * v).sum();
        let mut jac = DMatrix::zeros(r.len(), k + 1);
        for row in 0..r.len() {
            let mean: f64 = (0..k).map(|j| alpha[j] * ja[(row, j)]).sum();
            for j in 0..k {
                jac[(row, j)] = 2.0 * x[j] / total * (ja[(row, j)] - mean);
            }
            jac[(row, k)] = ja[(row, k)];
        }
        let rv = DVector::from_vec(r);
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let grad = &jt * &rv;
        let mut improved = false;
        for _ in 0..30 {
            let mut lhs = jtj.clone();
            for i in 0..=k {
                lhs[(i, i)] += damping * (jtj[(i, i)] + 1e-12);
            }
            let Some(step) = lhs.lu().solve(&(-&grad)) else {
                damping *= 10.0;
                continue;
            };
            let xn: Vec<f64> = (0..k).map(|j| x[j] + step[j]).collect();
            let sn = s + step[k];
            let cn = cost(&xn, sn);
            if cn.is_finite() && cn < c && xn.iter().any(|v| *v != 0.0) {
                x = xn;
                s = sn;
                c = cn;
                damping = (damping / 3.0).max(1e-15);
                improved = true;
                break;
            }
            damping *= 4.0;
        }
        if !improved {
            break;
        }
        // rescale to keep |x| ~ 1; alpha is invariant
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
    }
    (alpha_of(&x), s, c.sqrt())
}

fn verify_exact(instance: &ProblemInstance, support: &[Vec<u32>], weights: &[Q], s: &Q) -> bool {
    if weights.iter().any(|w| w.is_negative()) || !s.is_positive() {
        return false;
    }
    let atoms: Vec<Atom> = support
        .iter()
        .zip(weights)
        .filter(|(_, w)| !w.is_zero())
        .map(|(l, w)| Atom::new(l.clone(), w.clone()))
        .collect();
    match VeroneseMeasure::new(instance.clone(), atoms) {
        Ok(mu) => is_isotropic(&curvature_data(&mu), s),
        Err(_) => false,
    }
}

/// Attempts to lift a numeric solution to exact rationals: snap `s` and `G`,
/// then solve the (now linear) system for the weights exactly.
fn exact_lift(
    instance: &ProblemInstance,
    support: &[Vec<u32>],
    alpha: &[f64],
    s: f64,
    g: &[f64],
    max_den: u64,
) -> Option<(Vec<Q>, Q)> {
    let snap = |x: f64| snap_rational(x, max_den, 1e-9 * x.abs().max(1.0));
    let s_q = snap(s)?;
    let g_q: Vec<Q> = g.iter().map(|&v| snap(v)).collect::<Option<_>>()?;
    let f = instance.factors();
    let m = f.len();
    let k = support.len();
    let p = |a: usize, l: u32| SpectralParams::new(f[a], l).unwrap();

    let mut rows: Vec<Vec<Q>> = vec![vec![qi(1); k]];
    let mut rhs = vec![qi(1)];
    for a in 0..m {
        rows.push(support.iter().map(|l| rho(p(a, l[a]))).collect());
        rhs.push(g_q[a].clone());
    }
    for a in 0..m {
        for b in a..m {
            rows.push(
                support
                    .iter()
                    .map(|l| {
                        if a == b {
                            lambda_iso(p(a, l[a]))
                        } else {
                            qi(3) * rho(p(a, l[a])) * rho(p(b, l[b]))
                        }
                    })
                    .collect(),
            );
            rhs.push(&s_q * &g_q[a] * &g_q[b]);
        }
    }
    let sys = solve_exact(&rows, &rhs);
    if !sys.is_consistent() {
        return None;
    }
    let free: Vec<Q> = sys
        .free_columns()
        .iter()
        .map(|&c| {
            snap_rational(alpha[c], 1_000_000, 1e-9)
                .unwrap_or_else(|| crate::exact::approx_rational(alpha[c], 1_000_000))
        })
        .collect();
    let weights = sys.solution_with(Some(&free))?;
    verify_exact(instance, support, &weights, &s_q).then_some((weights, s_q))
}

pub fn solve_isotropic_system(instance: &ProblemInstance, support: &[Vec<u32>]) -> Result<IsotropicSolution> {
    solve_isotropic_system_with(instance, support, &IsotropicOptions::default())
}

/// Solves `B(s) = 0`, `sum alpha = 1`, `alpha >= 0` on a fixed support.
///
/// A numeric solution is found by damped least squares from seeded interior
/// starts and then lifted to exact rationals when `s` and `G` snap to short
/// fractions. Failure to converge is reported as [`Error::NoSolution`], which
/// does not prove that no solution exists.
pub fn solve_isotropic_system_with(
    instance: &ProblemInstance,
    support: &[Vec<u32>],
    opts: &IsotropicOptions,
) -> Result<IsotropicSolution> {
    let m = instance.len();
    if support.is_empty() {
        return Err(Error::InvalidArgument("support must be nonempty".into()));
    }
    for (i, l) in support.iter().enumerate() {
        if l.len() != m {
            return Err(Error::InvalidArgument(format!("atom {l:?} does not have {m} entries")));
        }
        if support[..i].contains(l) {
            return Err(Error::InvalidArgument(format!("duplicate atom {l:?}")));
        }
    }
    if let Some(a) = (0..m).find(|&a| support.iter().all(|l| l[a] == 0)) {
        return Err(Error::NoSolution(format!(
            "factor {a} is constant on every atom of the support, so E[rho_{a}] = 0 for all weights"
        )));
    }

    let sys = System::new(instance, support);
    let k = support.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(Vec<f64>, f64, f64)> = None;
    for start in 0..opts.starts {
        let x0: Vec<f64> = if start == 0 {
            vec![1.0; k]
        } else {
            (0..k).map(|_| rng.random_range(0.1..1.0)).collect()
        };
        let alpha0 = alpha_of(&x0);
        let g0 = sys.g(&alpha0);
        // s from the diagonal equations s G_a^2 = A_aa, averaged
        let s0 = {
            let (mut num, mut den) = (0.0, 0.0);
            for (a, b, coeff, _) in &sys.pairs {
                if a == b {
                    num += alpha0.iter().zip(coeff).map(|(w, c)| w * c).sum::<f64>() * g0[*a] * g0[*a];
                    den += g0[*a].powi(4);
                }
            }
            if den > 0.0 {
                num / den
            } else {
                1.0
            }
        };
        let (alpha, s, res) = levenberg_marquardt(&sys, x0, s0, opts.max_iterations);
        if !(res < 1e-9 && s > 0.0 && sys.g(&alpha).iter().all(|&v| v > 0.0)) {
            continue;
        }
        if let Some((weights, s_q)) = exact_lift(instance, support, &alpha, s, &sys.g(&alpha), opts.max_denominator) {
            return Ok(IsotropicSolution {
                support: support.to_vec(),
                weights: IsotropicWeights::Exact { weights, s: s_q },
            });
        }
        if best.as_ref().is_none_or(|b| s < b.1) {
            best = Some((alpha, s, res));
        }
    }
    match best {
        Some((weights, s, residual)) => Ok(IsotropicSolution {
            support: support.to_vec(),
            weights: IsotropicWeights::Numeric { weights, s, residual },
        }),
        None => Err(Error::NoSolution(format!(
            "isotropic system on support {support:?} did not converge"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn two_sphere_product_closed_form() {
        for n2 in 1..=5i64 {
            let inst = ProblemInstance::new(vec![n2 as u32 + 1, n2 as u32]).unwrap();
            let sol = solve_isotropic_system(&inst, &[vec![1, 1], vec![0, 2]]).unwrap();
            let IsotropicWeights::Exact { weights, s } = &sol.weights else {
                panic!("expected exact solution for n2 = {n2}");
            };
            assert_eq!(weights, &vec![q(n2 + 1, 2 * n2 + 1), q(n2, 2 * n2 + 1)]);
            assert_eq!(s, &q(2 * n2 + 1, n2 + 1));
        }
    }

    #[test]
    fn single_atom() {
        let inst = ProblemInstance::new(vec![3]).unwrap();
        let sol = solve_isotropic_system(&inst, &[vec![1]]).unwrap();
        assert_eq!(
            sol.weights,
            IsotropicWeights::Exact {
                weights: vec![qi(1)],
                s: qi(1)
            }
        );
    }

    #[test]
    fn structural_rejections() {
        let inst = ProblemInstance::new(vec![2, 2]).unwrap();
        assert!(matches!(
            solve_isotropic_system(&inst, &[]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            solve_isotropic_system(&inst, &[vec![1, 1], vec![1, 1]]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            solve_isotropic_system(&inst, &[vec![0, 1], vec![0, 2]]),
            Err(Error::NoSolution(_))
        ));
    }

    #[test]
    fn non_isotropic_support_reports_no_solution() {
        // a single atom (1,1) has A = [[1,3],[3,1]], G = (1,1): B(s) = 0 impossible
        let inst = ProblemInstance::new(vec![2, 2]).unwrap();
        assert!(matches!(
            solve_isotropic_system(&inst, &[vec![1, 1]]),
            Err(Error::NoSolution(_))
        ));
    }
}
