//! Copositivity of symmetric matrices and the exact normal curvature
//! `s* = max { U^T A U : U >= 0, G.U = 1 }` of a tensor-Veronese immersion.
//!
//! Both the simplex minimum and `s*` are computed by enumerating every face
//! of the feasible simplex and solving the face's Lagrange system
//! `2 Q_S U_S = theta g_S, g_S.U_S = 1`. Only strictly positive face solutions
//! are kept. A singular face whose particular solution is not positive is
//! skipped: the quadratic is constant along its solution set, which reaches
//! the face boundary, so a smaller face already carries the same value.

use nalgebra::{DMatrix, DVector};
use num::traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{dot, quad_form, solve_exact, to_f64, Q};
use crate::measure::{immersion_check, CurvatureData, CurvatureDataF64};

/// Largest dimension handled by face enumeration (`2^12 - 1` faces).
pub const FACE_ENUMERATION_CAP: usize = 12;

/// Feasibility tolerance of the numeric path.
pub const NUMERIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Numeric,
}

/// Minimal `s` with `B(s) = s G G^T - A` copositive, with its maximizing
/// direction normalized by `G.U = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<T> {
    pub s_star: T,
    pub u_star: Vec<T>,
    pub support: Vec<usize>,
    pub mode: Mode,
    /// False only for the heuristic bisection path beyond the enumeration cap.
    pub certified: bool,
}

pub type ExactCertificate = Certificate<Q>;
pub type NumericCertificate = Certificate<f64>;

impl ExactCertificate {
    /// Re-checks the certificate invariants against `data`, returning the
    /// first failure.
    pub fn verify(&self, data: &CurvatureData) -> std::result::Result<(), String> {
        if self.u_star.iter().any(|x| x.is_negative()) {
            return Err("u_star has a negative entry".into());
        }
        if self.u_star.iter().all(Zero::is_zero) {
            return Err("u_star is zero".into());
        }
        if dot(&data.g, &self.u_star) != Q::from_integer(1.into()) {
            return Err("G.u_star != 1".into());
        }
        let b = data.b_matrix(&self.s_star);
        if !quad_form(&b, &self.u_star).is_zero() {
            return Err("u_star^T B(s*) u_star != 0".into());
        }
        match is_copositive(&b) {
            Ok(r) if r.copositive => Ok(()),
            Ok(_) => Err("B(s*) is not copositive".into()),
            Err(e) => Err(e.to_string()),
        }
    }
}

/// Global extremum of a quadratic over a simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOptimum<T> {
    pub value: T,
    pub point: Vec<T>,
    pub support: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CopositivityResult<T> {
    pub copositive: bool,
    pub min: T,
    /// Minimizer on the standard simplex; a violating direction when not copositive.
    pub witness: Option<Vec<T>>,
}

/// Nonempty subsets of `0..m`, ordered by size and then lexicographically.
pub(crate) fn faces(m: usize) -> impl Iterator<Item = Vec<usize>> {
    (1..=m).flat_map(move |k| Combinations::new(m, k))
}

struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in (i + 1)..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

fn check_square<T>(q: &[Vec<T>], g_len: usize) -> Result<usize> {
    let m = q.len();
    if m == 0 || q.iter().any(|r| r.len() != m) || g_len != m {
        return Err(Error::Dimension(format!(
            "expected a nonempty square matrix matching g (len {g_len})"
        )));
    }
    if m > FACE_ENUMERATION_CAP {
        return Err(Error::TooLarge {
            dim: m,
            cap: FACE_ENUMERATION_CAP,
        });
    }
    Ok(m)
}

/// Exact face solution on support `s`, if strictly positive.
fn face_point_exact(q: &[Vec<Q>], g: &[Q], s: &[usize]) -> Option<Vec<Q>> {
    let k = s.len();
    let mut rows = Vec::with_capacity(k + 1);
    let mut rhs = Vec::with_capacity(k + 1);
    for &i in s {
        let mut row: Vec<Q> = s.iter().map(|&j| &q[i][j] * Q::from_integer(2.into())).collect();
        row.push(-g[i].clone());
        rows.push(row);
        rhs.push(Q::zero());
    }
    let mut last: Vec<Q> = s.iter().map(|&j| g[j].clone()).collect();
    last.push(Q::zero());
    rows.push(last);
    rhs.push(Q::from_integer(1.into()));

    let sys = solve_exact(&rows, &rhs);
    let sol = sys.solution()?;
    if sol[..k].iter().all(|x| x.is_positive()) {
        let mut u = vec![Q::zero(); g.len()];
        for (pos, &i) in s.iter().enumerate() {
            u[i] = sol[pos].clone();
        }
        Some(u)
    } else {
        None
    }
}

/// Extremum of `U^T q U` over `{U >= 0, g.U = 1}` (g > 0), exact.
fn face_search_exact(q: &[Vec<Q>], g: &[Q], maximize: bool) -> Result<SimplexOptimum<Q>> {
    let m = check_square(q, g.len())?;
    if g.iter().any(|x| !x.is_positive()) {
        return Err(Error::InvalidArgument("normalization vector must be positive".into()));
    }
    let mut best: Option<SimplexOptimum<Q>> = None;
    for s in faces(m) {
        let Some(u) = face_point_exact(q, g, &s) else {
            continue;
        };
        let value = quad_form(q, &u);
        let better = match &best {
            None => true,
            Some(b) => {
                if maximize {
                    value > b.value
                } else {
                    value < b.value
                }
            }
        };
        if better {
            best = Some(SimplexOptimum {
                value,
                point: u,
                support: s,
            });
        }
    }
    Ok(best.expect("every vertex is a feasible face"))
}

fn face_point_numeric(q: &[Vec<f64>], g: &[f64], s: &[usize]) -> Option<Vec<f64>> {
    let k = s.len();
    let mut mat = DMatrix::<f64>::zeros(k + 1, k + 1);
    let mut rhs = DVector::<f64>::zeros(k + 1);
    for (r, &i) in s.iter().enumerate() {
        for (c, &j) in s.iter().enumerate() {
            mat[(r, c)] = 2.0 * q[i][j];
        }
        mat[(r, k)] = -g[i];
        mat[(k, r)] = g[i];
    }
    rhs[k] = 1.0;
    let scale = mat.amax().max(1.0);
    let lu = mat.full_piv_lu();
    let diag_min = (0..=k).map(|i| lu.u()[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if diag_min <= 1e-12 * scale {
        return None;
    }
    let sol = lu.solve(&rhs)?;
    if sol.iter().take(k).any(|&x| !x.is_finite() || x <= -NUMERIC_TOL) {
        return None;
    }
    let mut u = vec![0.0; g.len()];
    for (pos, &i) in s.iter().enumerate() {
        u[i] = sol[pos].max(0.0);
    }
    let norm: f64 = u.iter().zip(g).map(|(a, b)| a * b).sum();
    if norm <= 0.0 {
        return None;
    }
    u.iter_mut().for_each(|x| *x /= norm);
    Some(u)
}

pub(crate) fn quad_form_f64(q: &[Vec<f64>], u: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (i, ui) in u.iter().enumerate() {
        for (j, uj) in u.iter().enumerate() {
            acc += q[i][j] * ui * uj;
        }
    }
    acc
}

fn face_search_numeric(q: &[Vec<f64>], g: &[f64], maximize: bool) -> Result<SimplexOptimum<f64>> {
    let m = check_square(q, g.len())?;
    if g.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
        return Err(Error::InvalidArgument("normalization vector must be positive".into()));
    }
    let mut best: Option<SimplexOptimum<f64>> = None;
    for s in faces(m) {
        let Some(u) = face_point_numeric(q, g, &s) else {
            continue;
        };
        let value = quad_form_f64(q, &u);
        let better = match &best {
            None => true,
            Some(b) => {
                let slack = 1e-12 * b.value.abs().max(1.0);
                if maximize {
                    value > b.value + slack
                } else {
                    value < b.value - slack
                }
            }
        };
        if better {
            best = Some(SimplexOptimum {
                value,
                point: u,
                support: s,
            });
        }
    }
    Ok(best.expect("every vertex is a feasible face"))
}

/// Global minimum of `U^T B U` over the standard simplex, exact.
pub fn simplex_quadratic_min(b: &[Vec<Q>]) -> Result<SimplexOptimum<Q>> {
    let ones = vec![Q::from_integer(1.into()); b.len()];
    face_search_exact(b, &ones, false)
}

pub fn simplex_quadratic_min_f64(b: &[Vec<f64>]) -> Result<SimplexOptimum<f64>> {
    face_search_numeric(b, &vec![1.0; b.len()], false)
}

pub fn is_copositive(b: &[Vec<Q>]) -> Result<CopositivityResult<Q>> {
    let opt = simplex_quadratic_min(b)?;
    let copositive = !opt.value.is_negative();
    Ok(CopositivityResult {
        copositive,
        witness: Some(opt.point),
        min: opt.value,
    })
}

/// Numeric copositivity: negative minima down to `-NUMERIC_TOL` still count.
pub fn is_copositive_f64(b: &[Vec<f64>]) -> Result<CopositivityResult<f64>> {
    let opt = simplex_quadratic_min_f64(b)?;
    Ok(CopositivityResult {
        copositive: opt.value >= -NUMERIC_TOL,
        witness: Some(opt.point),
        min: opt.value,
    })
}

/// Exact minimal `s` with `B(s)` copositive, i.e. the squared normal curvature.
pub fn critical_s(data: &CurvatureData) -> Result<ExactCertificate> {
    immersion_check(data)?;
    let opt = face_search_exact(&data.a, &data.g, true)?;
    Ok(Certificate {
        s_star: opt.value,
        u_star: opt.point,
        support: opt.support,
        mode: Mode::Exact,
        certified: true,
    })
}

/// Floating counterpart of [`critical_s`]. Above the enumeration cap it falls
/// back to [`critical_s_bisection`] and is flagged uncertified.
pub fn critical_s_f64(data: &CurvatureDataF64) -> Result<NumericCertificate> {
    if let Some(index) = data.g.iter().position(|&x| x <= 0.0) {
        return Err(Error::Degenerate { index });
    }
    if data.dim() > FACE_ENUMERATION_CAP {
        return Ok(critical_s_bisection(data, 1e-10, 0));
    }
    let opt = face_search_numeric(&data.a, &data.g, true)?;
    Ok(Certificate {
        s_star: opt.value,
        u_star: opt.point,
        support: opt.support,
        mode: Mode::Numeric,
        certified: true,
    })
}

/// Exact isotropy test: `B(s)` is the zero matrix.
pub fn is_isotropic(data: &CurvatureData, s: &Q) -> bool {
    data.b_matrix(s).iter().flatten().all(Zero::is_zero)
}

/// Projection onto `{x >= 0, sum x = 1}`.
pub(crate) fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Multistart projected-gradient minimum of `U^T B U` on the standard
/// simplex. Heuristic: an upper bound on the true minimum.
pub fn simplex_min_local(b: &[Vec<f64>], starts: usize, seed: u64) -> (f64, Vec<f64>) {
    let m = b.len();
    let norm = b.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs())) * m as f64;
    let step = if norm > 0.0 { 0.5 / norm } else { 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inits: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    inits.push(vec![1.0 / m as f64; m]);
    for _ in 0..starts {
        let raw: Vec<f64> = (0..m).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        let total: f64 = raw.iter().sum();
        inits.push(raw.iter().map(|x| x / total).collect());
    }
    let mut best = (f64::INFINITY, vec![]);
    for mut u in inits {
        for _ in 0..2000 {
            let grad: Vec<f64> = (0..m)
                .map(|i| 2.0 * (0..m).map(|j| b[i][j] * u[j]).sum::<f64>())
                .collect();
            let next = project_simplex(&u.iter().zip(&grad).map(|(x, g)| x - step * g).collect::<Vec<_>>());
            let moved: f64 = next.iter().zip(&u).map(|(a, c)| (a - c).abs()).sum();
            u = next;
            if moved < 1e-15 {
                break;
            }
        }
        let v = quad_form_f64(b, &u);
        if v < best.0 {
            best = (v, u);
        }
    }
    best
}

/// Bisection on `s` with the heuristic copositivity test. Used beyond the
/// enumeration cap; the result is not certified.
pub fn critical_s_bisection(data: &CurvatureDataF64, tol: f64, seed: u64) -> NumericCertificate {
    let m = data.dim();
    let mut lo = (0..m)
        .map(|i| data.a[i][i] / (data.g[i] * data.g[i]))
        .fold(f64::MIN, f64::max);
    let mut hi = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| data.a[i][j] / (data.g[i] * data.g[j]))
        .fold(f64::MIN, f64::max);
    let mut witness = vec![0.0; m];
    while hi - lo > tol * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        let (min, u) = simplex_min_local(&data.b_matrix(mid), 4, seed);
        if min >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            witness = u;
        }
    }
    if witness.iter().all(|&x| x == 0.0) {
        let i = (0..m)
            .max_by(|&i, &j| {
                (data.a[i][i] / (data.g[i] * data.g[i])).total_cmp(&(data.a[j][j] / (data.g[j] * data.g[j])))
            })
            .unwrap_or(0);
        witness[i] = 1.0;
    }
    let gu: f64 = witness.iter().zip(&data.g).map(|(a, b)| a * b).sum();
    let u_star: Vec<f64> = witness.iter().map(|x| x / gu).collect();
    let support = (0..m).filter(|&i| u_star[i] > NUMERIC_TOL).collect();
    Certificate {
        s_star: hi,
        u_star,
        support,
        mode: Mode::Numeric,
        certified: false,
    }
}

pub fn to_f64_matrix(b: &[Vec<Q>]) -> Vec<Vec<f64>> {
    b.iter().map(|r| r.iter().map(to_f64).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect()
    }

    #[test]
    fn face_order_is_size_then_lex() {
        let f: Vec<Vec<usize>> = faces(3).collect();
        assert_eq!(
            f,
            vec![
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 1, 2]
            ]
        );
        assert_eq!(faces(12).count(), 4095);
    }

    #[test]
    fn identity_min() {
        let r = simplex_quadratic_min(&mat(&[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(r.value, q(1, 2));
        assert_eq!(r.point, vec![q(1, 2), q(1, 2)]);
        assert!(is_copositive(&mat(&[&[1, 0], &[0, 1]])).unwrap().copositive);
    }

    #[test]
    fn indefinite_min() {
        let b = mat(&[&[1, -2], &[-2, 1]]);
        let r = simplex_quadratic_min(&b).unwrap();
        assert_eq!(r.value, q(-1, 2));
        assert_eq!(r.point, vec![q(1, 2), q(1, 2)]);
        let c = is_copositive(&b).unwrap();
        assert!(!c.copositive);
        assert_eq!(c.witness.unwrap(), vec![q(1, 2), q(1, 2)]);
    }

    #[test]
    fn zero_matrix_prefers_smallest_support() {
        let r = simplex_quadratic_min(&mat(&[&[0, 0], &[0, 0]])).unwrap();
        assert_eq!(r.value, qi(0));
        assert_eq!(r.support, vec![0]);
        assert!(is_copositive(&mat(&[&[0, 1], &[1, 0]])).unwrap().copositive);
    }

    #[test]
    fn degenerate_face_is_covered() {
        // Constant value 1 on the whole simplex: every face system with two or
        // more indices is singular.
        let r = simplex_quadratic_min(&mat(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]])).unwrap();
        assert_eq!(r.value, qi(1));
        assert_eq!(r.support, vec![0]);
    }

    #[test]
    fn size_cap() {
        let b = vec![vec![qi(0); 13]; 13];
        assert!(matches!(
            simplex_quadratic_min(&b),
            Err(Error::TooLarge { dim: 13, .. })
        ));
    }

    #[test]
    fn sns1_critical() {
        let data = CurvatureData::new(mat(&[&[0, 0], &[0, 0]]), vec![qi(1), qi(1)]).unwrap();
        assert_eq!(critical_s(&data).unwrap().s_star, qi(0));
        let a = vec![vec![q(2, 3), qi(2)], vec![qi(2), qi(6)]];
        let data = CurvatureData::new(a, vec![q(2, 3), qi(2)]).unwrap();
        let cert = critical_s(&data).unwrap();
        assert_eq!(cert.s_star, q(3, 2));
        assert!(is_isotropic(&data, &q(3, 2)));
        assert!(!is_isotropic(&data, &qi(1)));
        cert.verify(&data).unwrap();
        // isotropic: every direction is maximal, so the vertex {0} wins the tie.
        assert_eq!(cert.support, vec![0]);
        assert_eq!(cert.u_star, vec![q(3, 2), qi(0)]);
    }

    #[test]
    fn single_sphere() {
        let data = CurvatureData::new(vec![vec![qi(1)]], vec![qi(1)]).unwrap();
        assert_eq!(critical_s(&data).unwrap().s_star, qi(1));
    }

    #[test]
    fn degenerate_data_rejected() {
        let data = CurvatureData::new(mat(&[&[1, 0], &[0, 0]]), vec![qi(1), qi(0)]).unwrap();
        assert!(matches!(critical_s(&data), Err(Error::Degenerate { index: 1 })));
    }

    #[test]
    fn numeric_matches_exact() {
        let a = vec![vec![q(2, 3), qi(2)], vec![qi(2), qi(6)]];
        let data = CurvatureData::new(a, vec![q(2, 3), qi(2)]).unwrap();
        let c = critical_s_f64(&data.to_f64()).unwrap();
        assert!((c.s_star - 1.5).abs() < 1e-12);
        let r = simplex_quadratic_min_f64(&[vec![1.0, -2.0], vec![-2.0, 1.0]]).unwrap();
        assert!((r.value + 0.5).abs() < 1e-12);
    }

    #[test]
    fn bisection_beyond_cap_is_uncertified() {
        // 14 copies of the single-sphere block: A = I + 3(J - I), G = 1.
        let m = 14;
        let a: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 3.0 }).collect())
            .collect();
        let data = CurvatureDataF64 { a, g: vec![1.0; m] };
        let c = critical_s_f64(&data).unwrap();
        assert!(!c.certified);
        // max of U^T A U / (sum U)^2 = 3 - 2 sum U_i^2 / (sum U)^2, sup 3 - 2/m.
        assert!((c.s_star - (3.0 - 2.0 / m as f64)).abs() < 1e-6, "{}", c.s_star);
    }

    #[test]
    fn projection() {
        let p = project_simplex(&[0.5, 0.5, 0.5]);
        assert!(p.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-15));
        let p = project_simplex(&[2.0, 0.0]);
        assert_eq!(p, vec![1.0, 0.0]);
    }
}
