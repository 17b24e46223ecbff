use nalgebra::{DMatrix, DVector};
use num::traits::{One, Zero};

use crate::exact::{qi, to_f64, Q};

/// Mean of `x^alpha` over the unit sphere `S^n` (so `alpha` has `n + 1` entries).
pub fn sphere_moment(n: u32, alpha: &[u32]) -> Q {
    assert_eq!(alpha.len(), n as usize + 1, "exponent length must be n + 1");
    if alpha.iter().any(|a| a % 2 == 1) {
        return Q::zero();
    }
    let mut num = Q::one();
    for &a in alpha {
        let mut k = 1;
        while k < a {
            num *= qi(k as i64);
            k += 2;
        }
    }
    let d: u32 = alpha.iter().sum();
    let mut den = Q::one();
    for k in 0..d / 2 {
        den *= qi((n + 1 + 2 * k) as i64);
    }
    num / den
}

/// Quadratic forms indexed by pairs `a <= b` over `n + 1` coordinates.
fn monomials(n: u32) -> Vec<(usize, usize)> {
    let k = n as usize + 1;
    (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect()
}

/// An orthogonal basis of the degree-2 spherical harmonics on `S^n`,
/// exact in rational arithmetic.
#[derive(Debug, Clone)]
pub struct QuadraticHarmonics {
    n: u32,
    /// Coefficient of `x_a x_b` for each pair `(a, b)` from [`Self::monomials`].
    pub polys: Vec<Vec<Q>>,
    /// Mean square of each basis polynomial over the sphere.
    pub norms2: Vec<Q>,
}

impl QuadraticHarmonics {
    /// Gram-Schmidt on `{x_i x_j (i<j), x_i^2 - x_{i+1}^2}` in the sphere's
    /// mean-square inner product.
    pub fn new(n: u32) -> Self {
        let mons = monomials(n);
        let index = |a: usize, b: usize| mons.iter().position(|&p| p == (a.min(b), a.max(b))).unwrap();
        let k = n as usize + 1;
        let mut start = Vec::new();
        for i in 0..k {
            for j in (i + 1)..k {
                let mut p = vec![Q::zero(); mons.len()];
                p[index(i, j)] = qi(1);
                start.push(p);
            }
        }
        for i in 0..n as usize {
            let mut p = vec![Q::zero(); mons.len()];
            p[index(i, i)] = qi(1);
            p[index(i + 1, i + 1)] = qi(-1);
            start.push(p);
        }
        let mut basis = Self {
            n,
            polys: Vec::new(),
            norms2: Vec::new(),
        };
        for mut p in start {
            for (b, nb) in basis.polys.iter().zip(&basis.norms2) {
                let c = basis.inner(&p, b) / nb;
                p.iter_mut().zip(b).for_each(|(x, y)| *x -= &c * y);
            }
            let norm2 = basis.inner(&p, &p);
            basis.polys.push(p);
            basis.norms2.push(norm2);
        }
        basis
    }

    pub fn monomials(&self) -> Vec<(usize, usize)> {
        monomials(self.n)
    }

    /// Mean over the sphere of the product of two quadratic forms.
    pub fn inner(&self, p: &[Q], q: &[Q]) -> Q {
        let mons = monomials(self.n);
        let mut total = Q::zero();
        for (i, &(a, b)) in mons.iter().enumerate() {
            if p[i].is_zero() {
                continue;
            }
            for (j, &(c, d)) in mons.iter().enumerate() {
                if q[j].is_zero() {
                    continue;
                }
                let mut alpha = vec![0; self.n as usize + 1];
                for x in [a, b, c, d] {
                    alpha[x] += 1;
                }
                total += &p[i] * &q[j] * sphere_moment(self.n, &alpha);
            }
        }
        total
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// Symmetric matrices `M_k` with `phi_k(x) = x^T M_k x` and `|phi(x)| = 1`
    /// on the sphere.
    fn unit_matrices(&self) -> Vec<DMatrix<f64>> {
        let k = self.n as usize + 1;
        let d = self.len() as f64;
        let mons = self.monomials();
        self.polys
            .iter()
            .zip(&self.norms2)
            .map(|(p, n2)| {
                let scale = 1.0 / (d * to_f64(n2)).sqrt();
                let mut m = DMatrix::zeros(k, k);
                for (c, &(a, b)) in p.iter().zip(&mons) {
                    let v = to_f64(c) * scale;
                    if a == b {
                        m[(a, a)] += v;
                    } else {
                        m[(a, b)] += v / 2.0;
                        m[(b, a)] += v / 2.0;
                    }
                }
                m
            })
            .collect()
    }
}

/// One factor `phi_{n,l}: S^n -> S^{D-1}` for `l <= 2`.
#[derive(Debug, Clone)]
pub(crate) enum FactorMap {
    Constant,
    Linear,
    Quadratic(Vec<DMatrix<f64>>),
}

impl FactorMap {
    pub(crate) fn new(n: u32, l: u32) -> Option<Self> {
        match l {
            0 => Some(Self::Constant),
            1 => Some(Self::Linear),
            2 => Some(Self::Quadratic(QuadraticHarmonics::new(n).unit_matrices())),
            _ => None,
        }
    }

    pub(crate) fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            Self::Constant => DVector::from_element(1, 1.0),
            Self::Linear => x.clone(),
            Self::Quadratic(ms) => DVector::from_iterator(ms.len(), ms.iter().map(|m| x.dot(&(m * x)))),
        }
    }

    pub(crate) fn differential(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        match self {
            Self::Constant => DVector::zeros(1),
            Self::Linear => v.clone(),
            Self::Quadratic(ms) => DVector::from_iterator(ms.len(), ms.iter().map(|m| 2.0 * x.dot(&(m * v)))),
        }
    }
}
