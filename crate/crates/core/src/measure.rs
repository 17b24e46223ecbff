//! Finitely supported probability measures on `N_0^M` and the curvature data
//! `(A, G)` of the associated tensor-Veronese immersion.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use num::bigint::BigUint;
use num::traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, qi, to_f64, Q};
use crate::spectral::{eigen_dimension, lambda_iso, rho, SpectralParams};

/// The base manifold `S^{n_1} x ... x S^{n_M}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProblemInstance {
    factors: Vec<u32>,
}

impl ProblemInstance {
    pub fn new(factors: Vec<u32>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("at least one sphere factor is required".into()));
        }
        if factors.contains(&0) {
            return Err(Error::InvalidArgument("sphere dimensions must be >= 1".into()));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    /// Number of sphere factors `M`.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Total manifold dimension `n_1 + ... + n_M`.
    pub fn dimension(&self) -> usize {
        self.factors.iter().map(|&n| n as usize).sum()
    }

    pub fn is_all_circles(&self) -> bool {
        self.factors.iter().all(|&n| n == 1)
    }

    pub fn key(&self) -> String {
        self.factors.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|n| format!("S^{n}")).collect();
        f.write_str(&parts.join(" x "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub l: Vec<u32>,
    pub weight: Q,
}

impl Atom {
    pub fn new(l: Vec<u32>, weight: Q) -> Self {
        Self { l, weight }
    }
}

/// `mu = sum alpha(l) delta_l`. Equality ignores atom order.
#[derive(Debug, Clone)]
pub struct VeroneseMeasure {
    instance: ProblemInstance,
    atoms: Vec<Atom>,
}

impl PartialEq for VeroneseMeasure {
    fn eq(&self, other: &Self) -> bool {
        let mut a = self.atoms.clone();
        let mut b = other.atoms.clone();
        a.sort_by(|x, y| x.l.cmp(&y.l));
        b.sort_by(|x, y| x.l.cmp(&y.l));
        self.instance == other.instance && a == b
    }
}

impl VeroneseMeasure {
    /// Validated constructor; atoms are stored sorted by `l`.
    pub fn new(instance: ProblemInstance, mut atoms: Vec<Atom>) -> Result<Self> {
        atoms.sort_by(|x, y| x.l.cmp(&y.l));
        let mu = Self { instance, atoms };
        mu.validate().map_err(Error::InvalidMeasure)?;
        Ok(mu)
    }

    /// Builds a measure without checking its invariants (see [`validate`](Self::validate)).
    pub fn new_unchecked(instance: ProblemInstance, atoms: Vec<Atom>) -> Self {
        Self { instance, atoms }
    }

    /// Convenience constructor from `(l, "p/q")` pairs.
    pub fn from_pairs(factors: &[u32], pairs: &[(&[u32], Q)]) -> Result<Self> {
        let instance = ProblemInstance::new(factors.to_vec())?;
        let atoms = pairs.iter().map(|(l, w)| Atom::new(l.to_vec(), w.clone())).collect();
        Self::new(instance, atoms)
    }

    pub fn instance(&self) -> &ProblemInstance {
        &self.instance
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn support(&self) -> Vec<Vec<u32>> {
        self.atoms.iter().map(|a| a.l.clone()).collect()
    }

    /// Checks every measure invariant and reports the first violation.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let m = self.instance.len();
        if self.atoms.is_empty() {
            return Err("measure has no atoms".into());
        }
        let mut seen = BTreeSet::new();
        for atom in &self.atoms {
            if atom.l.len() != m {
                return Err(format!(
                    "atom {:?} has length {} but the instance has {m} factors",
                    atom.l,
                    atom.l.len()
                ));
            }
            if atom.weight <= Q::zero() {
                return Err(format!(
                    "atom {:?} has non-positive weight {}",
                    atom.l,
                    format_rational(&atom.weight)
                ));
            }
            if !seen.insert(atom.l.clone()) {
                return Err(format!("duplicate atom {:?}", atom.l));
            }
        }
        let total: Q = self.atoms.iter().map(|a| a.weight.clone()).sum();
        if !total.is_one() {
            return Err(format!("weights sum to {}", format_rational(&total)));
        }
        Ok(())
    }

    /// `t mu1 + (1-t) mu2`, merging coincident atoms. Atoms that receive zero
    /// weight (t = 0 or 1) are dropped.
    pub fn mixture(t: &Q, a: &Self, b: &Self) -> Result<Self> {
        if a.instance != b.instance {
            return Err(Error::Dimension("mixture of measures on different instances".into()));
        }
        let one_minus = qi(1) - t;
        let mut merged: std::collections::BTreeMap<Vec<u32>, Q> = Default::default();
        for (atoms, f) in [(&a.atoms, t), (&b.atoms, &one_minus)] {
            for atom in atoms.iter() {
                *merged.entry(atom.l.clone()).or_insert_with(Q::zero) += &atom.weight * f;
            }
        }
        let atoms = merged
            .into_iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(l, w)| Atom::new(l, w))
            .collect();
        Self::new(a.instance.clone(), atoms)
    }

    /// Reorders the factors: new factor `k` is old factor `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let f = self.instance.factors();
        let instance = ProblemInstance::new(perm.iter().map(|&k| f[k]).collect())?;
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom::new(perm.iter().map(|&k| a.l[k]).collect(), a.weight.clone()))
            .collect();
        Self::new(instance, atoms)
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| to_f64(&a.weight)).collect()
    }
}

/// The exact `M x M` matrix `A` and vector `G` of a measure.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureData {
    pub a: Vec<Vec<Q>>,
    pub g: Vec<Q>,
}

impl CurvatureData {
    pub fn new(a: Vec<Vec<Q>>, g: Vec<Q>) -> Result<Self> {
        let m = g.len();
        if a.len() != m || a.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension(format!("A must be {m}x{m}")));
        }
        for i in 0..m {
            for j in 0..i {
                if a[i][j] != a[j][i] {
                    return Err(Error::Dimension("A must be symmetric".into()));
                }
            }
        }
        Ok(Self { a, g })
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    /// `B(s) = s G G^T - A`.
    pub fn b_matrix(&self, s: &Q) -> Vec<Vec<Q>> {
        let m = self.dim();
        (0..m)
            .map(|i| (0..m).map(|j| s * &self.g[i] * &self.g[j] - &self.a[i][j]).collect())
            .collect()
    }

    pub fn to_f64(&self) -> CurvatureDataF64 {
        CurvatureDataF64 {
            a: self.a.iter().map(|r| r.iter().map(to_f64).collect()).collect(),
            g: self.g.iter().map(to_f64).collect(),
        }
    }
}

/// Floating view of [`CurvatureData`] used by the numeric paths.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureDataF64 {
    pub a: Vec<Vec<f64>>,
    pub g: Vec<f64>,
}

impl CurvatureDataF64 {
    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn b_matrix(&self, s: f64) -> Vec<Vec<f64>> {
        let m = self.dim();
        (0..m)
            .map(|i| (0..m).map(|j| s * self.g[i] * self.g[j] - self.a[i][j]).collect())
            .collect()
    }
}

fn params(n: u32, l: u32) -> SpectralParams {
    SpectralParams::new(n, l).expect("instance factors are validated to be >= 1")
}

/// `A_mm = E[lambda_m]`, `A_ab = 3 E[rho_a rho_b]`, `G_m = E[rho_m]`.
pub fn curvature_data(mu: &VeroneseMeasure) -> CurvatureData {
    let factors = mu.instance.factors();
    let m = factors.len();
    let mut a = vec![vec![Q::zero(); m]; m];
    let mut g = vec![Q::zero(); m];
    for atom in &mu.atoms {
        let rhos: Vec<Q> = (0..m).map(|k| rho(params(factors[k], atom.l[k]))).collect();
        for k in 0..m {
            g[k] += &atom.weight * &rhos[k];
            a[k][k] += &atom.weight * lambda_iso(params(factors[k], atom.l[k]));
            for j in (k + 1)..m {
                let v = qi(3) * &atom.weight * &rhos[k] * &rhos[j];
                a[k][j] += &v;
                a[j][k] += v;
            }
        }
    }
    CurvatureData { a, g }
}

/// `N = sum over the support of prod_m D(n_m, l_m)`.
pub fn ambient_dimension(mu: &VeroneseMeasure) -> BigUint {
    let factors = mu.instance.factors();
    mu.atoms
        .iter()
        .map(|atom| {
            factors
                .iter()
                .zip(&atom.l)
                .map(|(&n, &l)| eigen_dimension(params(n, l)))
                .product::<BigUint>()
        })
        .sum()
}

/// Ok iff every `G_m > 0`; otherwise the first degenerate (0-based) index.
pub fn immersion_check(data: &CurvatureData) -> Result<()> {
    match data.g.iter().position(|x| x.is_zero()) {
        Some(index) => Err(Error::Degenerate { index }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomRecord {
    pub l: Vec<u32>,
    pub w: String,
}

/// On-disk measure document: `{"factors": [...], "atoms": [{"l": [...], "w": "p/q"}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub factors: Vec<u32>,
    pub atoms: Vec<AtomRecord>,
}

impl MeasureFile {
    pub fn from_measure(mu: &VeroneseMeasure) -> Self {
        Self {
            factors: mu.instance.factors().to_vec(),
            atoms: mu
                .atoms
                .iter()
                .map(|a| AtomRecord {
                    l: a.l.clone(),
                    w: format_rational(&a.weight),
                })
                .collect(),
        }
    }

    /// Parses the weights without validating the measure.
    pub fn to_unchecked(&self) -> Result<VeroneseMeasure> {
        let instance = ProblemInstance::new(self.factors.clone())?;
        let atoms = self
            .atoms
            .iter()
            .map(|r| Ok(Atom::new(r.l.clone(), parse_rational(&r.w)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(VeroneseMeasure::new_unchecked(instance, atoms))
    }

    pub fn to_measure(&self) -> Result<VeroneseMeasure> {
        let raw = self.to_unchecked()?;
        VeroneseMeasure::new(raw.instance, raw.atoms)
    }
}

pub fn measure_to_json(mu: &VeroneseMeasure) -> String {
    serde_json::to_string_pretty(&MeasureFile::from_measure(mu)).expect("measure serializes") + "\n"
}

pub fn measure_from_json(text: &str) -> Result<VeroneseMeasure> {
    serde_json::from_str::<MeasureFile>(text)?.to_measure()
}

pub fn read_measure(path: &Path) -> Result<VeroneseMeasure> {
    measure_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_measure(path: &Path, mu: &VeroneseMeasure) -> Result<()> {
    std::fs::write(path, measure_to_json(mu))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    fn sns1(n: u32) -> VeroneseMeasure {
        VeroneseMeasure::from_pairs(&[n, 1], &[(&[1, 1], q(2, 3)), (&[0, 2], q(1, 3))]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let inst = ProblemInstance::new(vec![2, 1]).unwrap();
        let ok = VeroneseMeasure::new_unchecked(inst.clone(), vec![Atom::new(vec![1, 1], qi(1))]);
        assert_eq!(ok.validate(), Ok(()));

        let short = VeroneseMeasure::new_unchecked(
            inst.clone(),
            vec![Atom::new(vec![1, 1], q(1, 2)), Atom::new(vec![0, 2], q(1, 3))],
        );
        assert_eq!(short.validate(), Err("weights sum to 5/6".to_string()));

        let dup = VeroneseMeasure::new_unchecked(
            inst.clone(),
            vec![Atom::new(vec![1, 1], q(1, 2)), Atom::new(vec![1, 1], q(1, 2))],
        );
        assert!(dup.validate().unwrap_err().contains("duplicate atom"));

        let empty = VeroneseMeasure::new_unchecked(inst.clone(), vec![]);
        assert!(empty.validate().is_err());
        let wrong_len = VeroneseMeasure::new_unchecked(inst.clone(), vec![Atom::new(vec![1], qi(1))]);
        assert!(wrong_len.validate().is_err());
        let zero_w =
            VeroneseMeasure::new_unchecked(inst, vec![Atom::new(vec![1, 1], qi(1)), Atom::new(vec![0, 1], qi(0))]);
        assert!(zero_w.validate().unwrap_err().contains("non-positive"));
    }

    #[test]
    fn sns1_curvature_data() {
        let d = curvature_data(&sns1(2));
        assert_eq!(d.g, vec![q(2, 3), qi(2)]);
        assert_eq!(d.a, vec![vec![q(2, 3), qi(2)], vec![qi(2), qi(6)]]);
        assert!(immersion_check(&d).is_ok());
    }

    #[test]
    fn all_ones_atom() {
        for m in 1..5 {
            let l = vec![1; m];
            let mu = VeroneseMeasure::from_pairs(&vec![3; m], &[(&l, qi(1))]).unwrap();
            let d = curvature_data(&mu);
            for i in 0..m {
                assert_eq!(d.g[i], qi(1));
                for j in 0..m {
                    assert_eq!(d.a[i][j], if i == j { qi(1) } else { qi(3) });
                }
            }
        }
    }

    #[test]
    fn zero_column_is_degenerate() {
        let mu = VeroneseMeasure::from_pairs(&[2, 2], &[(&[0, 1], q(1, 2)), (&[0, 2], q(1, 2))]).unwrap();
        let d = curvature_data(&mu);
        assert_eq!(d.g[0], qi(0));
        assert!(matches!(immersion_check(&d), Err(Error::Degenerate { index: 0 })));

        let constant = VeroneseMeasure::from_pairs(&[3, 1, 2], &[(&[0, 0, 0], qi(1))]).unwrap();
        assert!(matches!(
            immersion_check(&curvature_data(&constant)),
            Err(Error::Degenerate { index: 0 })
        ));
    }

    #[test]
    fn ambient_dimensions() {
        for n in 1..8u32 {
            assert_eq!(ambient_dimension(&sns1(n)), BigUint::from(2 * n + 4));
        }
        let t2 = VeroneseMeasure::from_pairs(
            &[3, 1, 1],
            &[
                (&[1, 5, 5], q(5, 9)),
                (&[0, 2, 11], q(200, 7371)),
                (&[0, 5, 10], q(719, 3024)),
                (&[0, 11, 2], q(3025, 16848)),
            ],
        )
        .unwrap();
        assert_eq!(ambient_dimension(&t2), BigUint::from(4 * 3 + 16u32));
    }

    #[test]
    fn single_factor() {
        let mu = VeroneseMeasure::from_pairs(&[2], &[(&[1], q(1, 4)), (&[2], q(3, 4))]).unwrap();
        let d = curvature_data(&mu);
        assert_eq!(d.g, vec![q(1, 4) + q(3, 4) * qi(3)]);
        assert_eq!(d.a, vec![vec![q(1, 4) + q(3, 4) * qi(12)]]);
    }

    #[test]
    fn json_format() {
        let mu = sns1(2);
        let text = measure_to_json(&mu);
        assert!(text.contains("\"w\": \"2/3\""));
        assert_eq!(measure_from_json(&text).unwrap(), mu);
        let unreduced = r#"{"factors":[2,1],"atoms":[{"l":[1,1],"w":"4/6"},{"l":[0,2],"w":"1/3"}]}"#;
        let parsed = measure_from_json(unreduced).unwrap();
        assert!(measure_to_json(&parsed).contains("\"2/3\""));
        let bad = r#"{"factors":[2,1],"atoms":[{"l":[1,1],"w":"1/2"}]}"#;
        assert!(matches!(measure_from_json(bad), Err(Error::InvalidMeasure(_))));
    }

    #[test]
    fn equality_ignores_order() {
        let inst = ProblemInstance::new(vec![2, 1]).unwrap();
        let a = VeroneseMeasure::new_unchecked(
            inst.clone(),
            vec![Atom::new(vec![1, 1], q(2, 3)), Atom::new(vec![0, 2], q(1, 3))],
        );
        let b = VeroneseMeasure::new_unchecked(
            inst,
            vec![Atom::new(vec![0, 2], q(1, 3)), Atom::new(vec![1, 1], q(2, 3))],
        );
        assert_eq!(a, b);
    }
}
