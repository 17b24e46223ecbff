//! Exact rational helpers: parsing, formatting, float conversion and the
//! fraction-free linear solver used by the exact copositivity path.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use num::Integer;

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`; the result is reduced.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Q::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Q::from_integer(n))
        }
    }
}

/// Lowest-terms string: `"p/q"`, or `"p"` for integers.
pub fn format_rational(x: &Q) -> String {
    // BigRational keeps itself reduced with a positive denominator.
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Very large numerators/denominators: scale through the bit lengths.
        let shift = x.numer().bits().max(x.denom().bits()) as i64 - 60;
        let (n, d) = if shift > 0 {
            (x.numer() >> shift as usize, x.denom() >> shift as usize)
        } else {
            (x.numer().clone(), x.denom().clone())
        };
        n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
    })
}

/// Best rational approximation with denominator at most `max_den`, by
/// continued fractions. Returns `None` when no convergent lands within `tol`.
pub fn snap_rational(x: f64, max_den: u64, tol: f64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1): (i128, i128, i128, i128) = (0, 1, 1, 0);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let approx = p1 as f64 / q1 as f64;
        if (approx - x).abs() <= tol {
            return Some(Q::new(BigInt::from(p1), BigInt::from(q1)));
        }
        let frac = r - a;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

/// Rational approximation with bounded denominator, always succeeding.
pub fn approx_rational(x: f64, max_den: u64) -> Q {
    if let Some(v) = snap_rational(x, max_den, 0.0) {
        return v;
    }
    let d = max_den as f64;
    Q::new(BigInt::from((x * d).round() as i128), BigInt::from(max_den))
}

/// Outcome of an exact linear solve `M x = b`.
#[derive(Debug, Clone)]
pub struct EchelonSystem {
    cols: usize,
    /// Reduced rows `(pivot column, coefficients, rhs)`, coefficients over Q.
    rows: Vec<(usize, Vec<Q>, Q)>,
    consistent: bool,
}

impl EchelonSystem {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    pub fn is_unique(&self) -> bool {
        self.consistent && self.rows.len() == self.cols
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let pivots: Vec<usize> = self.rows.iter().map(|r| r.0).collect();
        (0..self.cols).filter(|c| !pivots.contains(c)).collect()
    }

    /// A solution with the free variables set to `free_values` (zero when
    /// `None`). `None` if the system is inconsistent.
    pub fn solution_with(&self, free_values: Option<&[Q]>) -> Option<Vec<Q>> {
        if !self.consistent {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        if let Some(vals) = free_values {
            for (c, v) in self.free_columns().into_iter().zip(vals) {
                x[c] = v.clone();
            }
        }
        for (pivot, coeffs, rhs) in self.rows.iter().rev() {
            let mut acc = rhs.clone();
            for (c, a) in coeffs.iter().enumerate() {
                if c != *pivot && !a.is_zero() {
                    acc -= a * &x[c];
                }
            }
            x[*pivot] = acc / &coeffs[*pivot];
        }
        Some(x)
    }

    pub fn solution(&self) -> Option<Vec<Q>> {
        self.solution_with(None)
    }
}

/// Fraction-free (Bareiss) elimination of the augmented system `[m | b]`.
///
/// Rows are first cleared of denominators, elimination runs over the
/// integers with exact Bareiss divisions, and back substitution happens in Q.
pub fn solve_exact(m: &[Vec<Q>], b: &[Q]) -> EchelonSystem {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    assert_eq!(rows, b.len(), "rhs length must match row count");

    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let lcm = row
                .iter()
                .chain(std::iter::once(rhs))
                .fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            row.iter()
                .chain(std::iter::once(rhs))
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect()
        })
        .collect();

    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in (r + 1)..rows {
            for j in (c + 1)..=cols {
                let v = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }

    let consistent = a[r..].iter().all(|row| row[cols].is_zero());
    let reduced = pivots
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let coeffs = a[i][..cols].iter().map(|x| Q::from_integer(x.clone())).collect();
            (p, coeffs, Q::from_integer(a[i][cols].clone()))
        })
        .collect();
    EchelonSystem {
        cols,
        rows: reduced,
        consistent,
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

/// `uᵀ M u` over Q.
pub fn quad_form(m: &[Vec<Q>], u: &[Q]) -> Q {
    let mut acc = Q::zero();
    for (i, ui) in u.iter().enumerate() {
        if ui.is_zero() {
            continue;
        }
        for (j, uj) in u.iter().enumerate() {
            if !uj.is_zero() {
                acc += &m[i][j] * ui * uj;
            }
        }
    }
    acc
}

pub fn is_nonneg(x: &Q) -> bool {
    !x.is_negative()
}
