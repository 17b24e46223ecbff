//! Closed-form spectral constants of the round sphere `S^n`.
//!
//! The `l`-th Laplace eigenspace has eigenvalue `l(l+n-1)`; the associated
//! normalized Veronese map has pullback metric `rho(n,l) g` and isotropic
//! second fundamental form `|A(u,u)|^2 = lambda(n,l) |u|^4` (round norms).

use num::bigint::BigUint;
use num::traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{qi, Q};

/// Sphere dimension `n >= 1` and eigenvalue index `l >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpectralParams {
    n: u32,
    l: u32,
}

impl SpectralParams {
    pub fn new(n: u32, l: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("sphere dimension must be >= 1".into()));
        }
        Ok(Self { n, l })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn l(&self) -> u32 {
        self.l
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `D(n,l) = C(n+l-1, n-1) + C(n+l-2, n-1)`.
pub fn eigen_dimension(p: SpectralParams) -> BigUint {
    let (n, l) = (p.n as u64, p.l as u64);
    let first = binomial(n + l - 1, n - 1);
    let second = if l == 0 {
        BigUint::zero()
    } else {
        binomial(n + l - 2, n - 1)
    };
    first + second
}

/// `rho(n,l) = l(l+n-1)/n`.
pub fn rho(p: SpectralParams) -> Q {
    let (n, l) = (p.n as i64, p.l as i64);
    Q::new((l * (l + n - 1)).into(), n.into())
}

/// `lambda(n,l) = 3n/(n+2) rho^2 - 2(n-1)/(n+2) rho`.
pub fn lambda_iso(p: SpectralParams) -> Q {
    let n = p.n as i64;
    let r = rho(p);
    (qi(3 * n) * &r * &r - qi(2 * (n - 1)) * &r) / qi(n + 2)
}

pub fn rho_f64(n: u32, l: u32) -> f64 {
    let (n, l) = (n as f64, l as f64);
    l * (l + n - 1.0) / n
}

pub fn lambda_iso_f64(n: u32, l: u32) -> f64 {
    let r = rho_f64(n, l);
    let n = n as f64;
    (3.0 * n * r * r - 2.0 * (n - 1.0) * r) / (n + 2.0)
}
