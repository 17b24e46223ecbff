use std::collections::BTreeMap;
use std::path::Path;

use num::traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, qi, to_f64, Q};
use crate::measure::{Atom, ProblemInstance, VeroneseMeasure};

/// Numeric tolerance for designs given with floating coordinates.
const FLOAT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum DesignPoints {
    Exact(Vec<Vec<Q>>),
    Float(Vec<Vec<f64>>),
}

/// Weighted points `u_k` on the sphere of squared radius `radius2` in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignInput {
    radius2: u64,
    points: DesignPoints,
    weights: Vec<Q>,
}

impl DesignInput {
    pub fn new(radius2: u64, points: DesignPoints, weights: Vec<Q>) -> Result<Self> {
        let count = match &points {
            DesignPoints::Exact(p) => p.len(),
            DesignPoints::Float(p) => p.len(),
        };
        if count == 0 || count != weights.len() {
            return Err(Error::InvalidDesign(format!(
                "{count} points but {} weights",
                weights.len()
            )));
        }
        if radius2 == 0 {
            return Err(Error::InvalidDesign("radius2 must be positive".into()));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::InvalidDesign("weights must be positive".into()));
        }
        let total: Q = weights.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::InvalidDesign(format!(
                "weights sum to {}",
                format_rational(&total)
            )));
        }
        let r2 = qi(radius2 as i64);
        match &points {
            DesignPoints::Exact(p) => {
                let n = p[0].len();
                for u in p {
                    if u.len() != n || n == 0 {
                        return Err(Error::InvalidDesign("points must share a positive dimension".into()));
                    }
                    let norm2: Q = u.iter().map(|x| x * x).sum();
                    if norm2 != r2 {
                        return Err(Error::InvalidDesign(format!(
                            "point has squared norm {} instead of {radius2}",
                            format_rational(&norm2)
                        )));
                    }
                }
            }
            DesignPoints::Float(p) => {
                let n = p[0].len();
                for u in p {
                    if u.len() != n || n == 0 {
                        return Err(Error::InvalidDesign("points must share a positive dimension".into()));
                    }
                    let norm2: f64 = u.iter().map(|x| x * x).sum();
                    if (norm2 - radius2 as f64).abs() > FLOAT_TOL * radius2 as f64 {
                        return Err(Error::InvalidDesign(format!(
                            "point has squared norm {norm2} instead of {radius2}"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            radius2,
            points,
            weights,
        })
    }

    pub fn dimension(&self) -> usize {
        match &self.points {
            DesignPoints::Exact(p) => p[0].len(),
            DesignPoints::Float(p) => p[0].len(),
        }
    }

    pub fn radius2(&self) -> u64 {
        self.radius2
    }

    pub fn points(&self) -> &DesignPoints {
        &self.points
    }

    pub fn weights(&self) -> &[Q] {
        &self.weights
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MomentKind {
    /// `sum w <u, e_m>^2 = 1/n`
    Second { m: usize },
    /// `sum w <u, e_m>^4 = 3/(n(n+2))`
    PureFourth { m: usize },
    /// `sum w <u, e_a>^2 <u, e_b>^2 = 1/(n(n+2))`
    MixedFourth { a: usize, b: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum MomentValue {
    Exact(Q),
    Float(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentIdentity {
    pub kind: MomentKind,
    pub expected: Q,
    pub actual: MomentValue,
    pub residual: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub n: usize,
    pub exact: bool,
    pub identities: Vec<MomentIdentity>,
}

impl MomentReport {
    pub fn passes(&self) -> bool {
        self.identities.iter().all(|i| i.holds)
    }

    pub fn violations(&self) -> impl Iterator<Item = &MomentIdentity> {
        self.identities.iter().filter(|i| !i.holds)
    }
}

/// Checks the normalized second and fourth moment identities of a weighted
/// 4-design. Exact for rational coordinates, within `1e-12` otherwise.
pub fn check_design_moments(d: &DesignInput) -> MomentReport {
    let n = d.dimension();
    let nn = n as i64;
    let mut kinds = Vec::new();
    for m in 0..n {
        kinds.push((MomentKind::Second { m }, Q::new(1.into(), nn.into())));
    }
    for m in 0..n {
        kinds.push((MomentKind::PureFourth { m }, Q::new(3.into(), (nn * (nn + 2)).into())));
    }
    for a in 0..n {
        for b in (a + 1)..n {
            kinds.push((
                MomentKind::MixedFourth { a, b },
                Q::new(1.into(), (nn * (nn + 2)).into()),
            ));
        }
    }
    let exps = |k: &MomentKind| -> Vec<(usize, u32)> {
        match *k {
            MomentKind::Second { m } => vec![(m, 2)],
            MomentKind::PureFourth { m } => vec![(m, 4)],
            MomentKind::MixedFourth { a, b } => vec![(a, 2), (b, 2)],
        }
    };
    let identities = match &d.points {
        DesignPoints::Exact(points) => {
            let r2 = qi(d.radius2 as i64);
            kinds
                .into_iter()
                .map(|(kind, expected)| {
                    let e = exps(&kind);
                    let degree: u32 = e.iter().map(|x| x.1).sum();
                    let norm = num::pow::pow(r2.clone(), (degree / 2) as usize);
                    let actual: Q = points
                        .iter()
                        .zip(&d.weights)
                        .map(|(u, w)| {
                            e.iter()
                                .fold(w.clone(), |acc, &(i, p)| acc * num::pow::pow(u[i].clone(), p as usize))
                        })
                        .sum::<Q>()
                        / norm;
                    let diff = &actual - &expected;
                    MomentIdentity {
                        kind,
                        residual: to_f64(&diff).abs(),
                        holds: diff.is_zero(),
                        expected,
                        actual: MomentValue::Exact(actual),
                    }
                })
                .collect()
        }
        DesignPoints::Float(points) => {
            let r2 = d.radius2 as f64;
            kinds
                .into_iter()
                .map(|(kind, expected)| {
                    let e = exps(&kind);
                    let degree: u32 = e.iter().map(|x| x.1).sum();
                    let actual: f64 = points
                        .iter()
                        .zip(&d.weights)
                        .map(|(u, w)| e.iter().fold(to_f64(w), |acc, &(i, p)| acc * u[i].powi(p as i32)))
                        .sum::<f64>()
                        / r2.powi(degree as i32 / 2);
                    let residual = (actual - to_f64(&expected)).abs();
                    MomentIdentity {
                        kind,
                        residual,
                        holds: residual < FLOAT_TOL,
                        expected,
                        actual: MomentValue::Float(actual),
                    }
                })
                .collect()
        }
    };
    MomentReport {
        n,
        exact: matches!(d.points, DesignPoints::Exact(_)),
        identities,
    }
}

/// Folds a design on `S^{n-1}` into a measure on `T^n = (S^1)^n` by taking
/// componentwise absolute values and merging coincident atoms.
pub fn design_to_measure(d: &DesignInput, instance: &ProblemInstance) -> Result<VeroneseMeasure> {
    if !instance.is_all_circles() {
        return Err(Error::InvalidArgument(
            "design conversion needs an all-circles instance".into(),
        ));
    }
    if instance.len() != d.dimension() {
        return Err(Error::Dimension(format!(
            "design lives in R^{} but the torus has {} factors",
            d.dimension(),
            instance.len()
        )));
    }
    let integer_points: Vec<Vec<u32>> = match &d.points {
        DesignPoints::Exact(points) => points
            .iter()
            .map(|u| {
                u.iter()
                    .map(|x| {
                        if !x.is_integer() {
                            return Err(Error::InvalidDesign(format!(
                                "non-integer coordinate {}",
                                format_rational(x)
                            )));
                        }
                        x.to_integer()
                            .abs()
                            .to_u32()
                            .ok_or_else(|| Error::InvalidDesign("coordinate too large".into()))
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<_>>()?,
        DesignPoints::Float(points) => points
            .iter()
            .map(|u| {
                u.iter()
                    .map(|&x| {
                        if x.fract() != 0.0 || !x.is_finite() {
                            return Err(Error::InvalidDesign(format!("non-integer coordinate {x}")));
                        }
                        Ok(x.abs() as u32)
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<_>>()?,
    };
    let mut merged: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
    for (l, w) in integer_points.into_iter().zip(&d.weights) {
        if l.iter().all(|&x| x == 0) {
            return Err(Error::InvalidDesign("zero vector in design".into()));
        }
        *merged.entry(l).or_insert_with(Q::zero) += w;
    }
    let atoms = merged.into_iter().map(|(l, w)| Atom::new(l, w)).collect();
    VeroneseMeasure::new(instance.clone(), atoms)
}

/// On-disk design document: `{"radius2": 25, "points": [[5, 0], ...], "weights": ["527/2304", ...]}`.
/// Coordinates may be JSON integers, rational strings, or floats (which
/// switch the moment check to the numeric path).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignFile {
    pub radius2: u64,
    pub points: Vec<Vec<Value>>,
    pub weights: Vec<String>,
}

impl DesignFile {
    pub fn to_design(&self) -> Result<DesignInput> {
        let weights = self
            .weights
            .iter()
            .map(|w| parse_rational(w))
            .collect::<Result<Vec<_>>>()?;
        let any_float = self
            .points
            .iter()
            .flatten()
            .any(|v| matches!(v, Value::Number(n) if !n.is_i64() && !n.is_u64()));
        let points = if any_float {
            DesignPoints::Float(
                self.points
                    .iter()
                    .map(|p| p.iter().map(value_to_f64).collect::<Result<Vec<_>>>())
                    .collect::<Result<_>>()?,
            )
        } else {
            DesignPoints::Exact(
                self.points
                    .iter()
                    .map(|p| p.iter().map(value_to_q).collect::<Result<Vec<_>>>())
                    .collect::<Result<_>>()?,
            )
        };
        DesignInput::new(self.radius2, points, weights)
    }
}

fn value_to_q(v: &Value) -> Result<Q> {
    match v {
        Value::Number(n) if n.is_i64() => Ok(qi(n.as_i64().unwrap())),
        Value::String(s) => parse_rational(s),
        other => Err(Error::Parse(format!("bad coordinate {other}"))),
    }
}

fn value_to_f64(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse(format!("bad coordinate {n}"))),
        Value::String(s) => Ok(to_f64(&parse_rational(s)?)),
        other => Err(Error::Parse(format!("bad coordinate {other}"))),
    }
}

pub fn design_from_json(text: &str) -> Result<DesignInput> {
    serde_json::from_str::<DesignFile>(text)?.to_design()
}

pub fn read_design(path: &Path) -> Result<DesignInput> {
    design_from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copositivity::critical_s;
    use crate::exact::q;
    use crate::measure::curvature_data;

    fn pythagorean() -> DesignInput {
        let pts = [[5, 0], [0, 5], [3, 4], [4, 3]];
        DesignInput::new(
            25,
            DesignPoints::Exact(pts.iter().map(|p| p.iter().map(|&x| qi(x)).collect()).collect()),
            vec![q(527, 2304), q(527, 2304), q(625, 2304), q(625, 2304)],
        )
        .unwrap()
    }

    #[test]
    fn pythagorean_weights_from_fourth_moment_equation() {
        // Symmetric point sets on S^1 are 4-designs iff sum w cos(4 theta) = 0.
        // cos(4a) = 8c^4 - 8c^2 + 1 with c = cos a = 4/5.
        let c = q(4, 5);
        let cos4 = qi(8) * c.clone() * c.clone() * c.clone() * c.clone() - qi(8) * c.clone() * c + qi(1);
        assert_eq!(cos4, q(-527, 625));
        // w1 + w2 cos4 = 0, w1 + w2 = 1
        let w2 = qi(1) / (qi(1) - cos4);
        let w1 = qi(1) - &w2;
        assert_eq!(w1.clone() / qi(2), q(527, 2304));
        assert_eq!(w2.clone() / qi(2), q(625, 2304));
    }

    #[test]
    fn pythagorean_design_is_exact_four_design() {
        let r = check_design_moments(&pythagorean());
        assert!(r.exact);
        assert!(r.passes(), "{r:?}");
        assert_eq!(r.identities.len(), 2 + 2 + 1);
        let mu = design_to_measure(&pythagorean(), &ProblemInstance::new(vec![1, 1]).unwrap()).unwrap();
        assert_eq!(critical_s(&curvature_data(&mu)).unwrap().s_star, q(3, 2));
    }

    #[test]
    fn pentagon_numeric() {
        let pts: Vec<Vec<f64>> = (0..5)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 5.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let d = DesignInput::new(1, DesignPoints::Float(pts), vec![q(1, 5); 5]).unwrap();
        let r = check_design_moments(&d);
        assert!(!r.exact);
        assert!(r.passes());
        assert!(r.identities.iter().all(|i| i.residual < 1e-12));
        // floats are not integral, so no torus measure
        assert!(design_to_measure(&d, &ProblemInstance::new(vec![1, 1]).unwrap()).is_err());
    }

    #[test]
    fn square_fails_fourth_moment() {
        let pts = vec![
            vec![qi(1), qi(0)],
            vec![qi(0), qi(1)],
            vec![qi(-1), qi(0)],
            vec![qi(0), qi(-1)],
        ];
        let d = DesignInput::new(1, DesignPoints::Exact(pts), vec![q(1, 4); 4]).unwrap();
        let r = check_design_moments(&d);
        assert!(!r.passes());
        let failed: Vec<MomentKind> = r.violations().map(|v| v.kind).collect();
        assert!(failed.contains(&MomentKind::PureFourth { m: 0 }));
        assert!(failed.contains(&MomentKind::MixedFourth { a: 0, b: 1 }));
        assert!(!failed.iter().any(|k| matches!(k, MomentKind::Second { .. })));
        // folded cross-polytope: still a valid measure with s > 3n/(n+2)
        let mu = design_to_measure(&d, &ProblemInstance::new(vec![1, 1]).unwrap()).unwrap();
        assert_eq!(mu.atoms().len(), 2);
        let s = critical_s(&curvature_data(&mu)).unwrap().s_star;
        assert!(s > q(3, 2));
        assert_eq!(s, qi(2));
    }

    #[test]
    fn rejections() {
        let pts = vec![vec![q(1, 2), q(1, 2)]];
        assert!(DesignInput::new(1, DesignPoints::Exact(pts), vec![qi(1)]).is_err());
        let pts = vec![vec![q(3, 5), q(4, 5)]];
        let d = DesignInput::new(1, DesignPoints::Exact(pts), vec![qi(1)]).unwrap();
        assert!(design_to_measure(&d, &ProblemInstance::new(vec![1, 1]).unwrap()).is_err());
        let pts = vec![vec![qi(1), qi(0)]];
        assert!(DesignInput::new(1, DesignPoints::Exact(pts.clone()), vec![q(1, 2)]).is_err());
        let d = DesignInput::new(1, DesignPoints::Exact(pts), vec![qi(1)]).unwrap();
        assert!(design_to_measure(&d, &ProblemInstance::new(vec![2, 1]).unwrap()).is_err());
    }

    #[test]
    fn json_points_mixed_notation() {
        let text = r#"{"radius2": 25, "points": [[5, 0], [0, "5"], [3, 4], ["4/1", 3]],
            "weights": ["527/2304", "527/2304", "625/2304", "625/2304"]}"#;
        let d = design_from_json(text).unwrap();
        assert_eq!(d, pythagorean());
    }
}
