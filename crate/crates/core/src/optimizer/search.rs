use std::time::{Duration, Instant};

use num::traits::{Signed, Zero};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::isotropic::{solve_isotropic_system, IsotropicWeights};
use crate::copositivity::{critical_s, critical_s_f64, ExactCertificate};
use crate::error::{Error, Result};
use crate::exact::{approx_rational, qi, Q};
use crate::measure::{curvature_data, Atom, CurvatureDataF64, ProblemInstance, VeroneseMeasure};
use crate::spectral::{lambda_iso_f64, rho_f64};

/// Seeded annealing search over supports in `{0..=l_max}^M` and their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub l_max: u32,
    pub max_support: usize,
    pub restarts: usize,
    /// Annealing steps per restart.
    pub iterations: usize,
    pub initial_temperature: f64,
    pub final_temperature: f64,
    pub seed: u64,
    pub budget: Option<Duration>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            l_max: 2,
            max_support: 4,
            restarts: 8,
            iterations: 1500,
            initial_temperature: 0.05,
            final_temperature: 1e-5,
            seed: 20_251_015,
            budget: None,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.l_max < 1 || self.max_support < 1 || self.restarts < 1 {
            return Err(Error::InvalidArgument(
                "l_max, max_support and restarts must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub measure: VeroneseMeasure,
    pub certificate: ExactCertificate,
    /// Whether `B(s*) = 0` exactly for the returned measure.
    pub isotropic: bool,
    /// False when the time budget ran out.
    pub complete: bool,
    pub restarts_run: usize,
}

/// All nonzero `l` vectors with entries in `0..=l_max`, lexicographic.
pub fn grid_support(m: usize, l_max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|p| (0..=l_max).map(move |l| [p.clone(), vec![l]].concat()))
            .collect();
    }
    out.retain(|l| l.iter().any(|&x| x > 0));
    out
}

struct Evaluator {
    m: usize,
    rho: Vec<Vec<f64>>,
    lam: Vec<Vec<f64>>,
}

impl Evaluator {
    fn new(instance: &ProblemInstance, grid: &[Vec<u32>]) -> Self {
        let f = instance.factors();
        let rho = grid
            .iter()
            .map(|l| (0..f.len()).map(|a| rho_f64(f[a], l[a])).collect())
            .collect();
        let lam = grid
            .iter()
            .map(|l| (0..f.len()).map(|a| lambda_iso_f64(f[a], l[a])).collect())
            .collect();
        Self { m: f.len(), rho, lam }
    }

    fn s(&self, state: &[(usize, f64)]) -> f64 {
        let m = self.m;
        let mut a = vec![vec![0.0; m]; m];
        let mut g = vec![0.0; m];
        for &(idx, w) in state {
            let r = &self.rho[idx];
            for i in 0..m {
                g[i] += w * r[i];
                a[i][i] += w * self.lam[idx][i];
                for j in (i + 1)..m {
                    let v = 3.0 * w * r[i] * r[j];
                    a[i][j] += v;
                    a[j][i] += v;
                }
            }
        }
        match critical_s_f64(&CurvatureDataF64 { a, g }) {
            Ok(c) => c.s_star,
            Err(_) => f64::INFINITY,
        }
    }
}

fn normalize(state: &mut Vec<(usize, f64)>) {
    state.retain(|x| x.1 > 0.0);
    let total: f64 = state.iter().map(|x| x.1).sum();
    state.iter_mut().for_each(|x| x.1 /= total);
}

fn propose(state: &[(usize, f64)], grid: &[Vec<u32>], cfg: &SearchConfig, rng: &mut ChaCha8Rng) -> Vec<(usize, f64)> {
    let mut next = state.to_vec();
    let k = next.len();
    match rng.random_range(0..5) {
        0 if k > 1 => {
            let i = rng.random_range(0..k);
            let mut j = rng.random_range(0..k - 1);
            if j >= i {
                j += 1;
            }
            let delta = next[j].1 * rng.random_range(0.0..0.5);
            next[j].1 -= delta;
            next[i].1 += delta;
        }
        1 => {
            let i = rng.random_range(0..k);
            next[i].1 *= (rng.random_range(-0.3..0.3f64)).exp();
        }
        2 if k < cfg.max_support => {
            let fresh: Vec<usize> = (0..grid.len()).filter(|g| !next.iter().any(|x| x.0 == *g)).collect();
            if let Some(&g) = fresh.choose(rng) {
                let eps = rng.random_range(0.01..0.3);
                next.iter_mut().for_each(|x| x.1 *= 1.0 - eps);
                next.push((g, eps));
            }
        }
        3 if k > 1 => {
            next.remove(rng.random_range(0..k));
        }
        _ => {
            let i = rng.random_range(0..k);
            let mut l = grid[next[i].0].clone();
            let c = rng.random_range(0..l.len());
            if rng.random_bool(0.5) {
                l[c] = (l[c] + 1).min(cfg.l_max);
            } else {
                l[c] = l[c].saturating_sub(1);
            }
            if let Some(g) = grid.iter().position(|x| *x == l) {
                if !next.iter().any(|x| x.0 == g) {
                    next[i].0 = g;
                }
            }
        }
    }
    normalize(&mut next);
    next
}

/// Projected coordinate descent on the weights: pairwise mass transfers with a
/// shrinking step.
fn polish(eval: &Evaluator, state: &mut Vec<(usize, f64)>, s: &mut f64) {
    let mut step = 0.1;
    while step > 1e-7 {
        let mut improved = true;
        while improved {
            improved = false;
            for i in 0..state.len() {
                for j in 0..state.len() {
                    if i == j {
                        continue;
                    }
                    let delta = step * state[j].1;
                    let mut trial = state.clone();
                    trial[j].1 -= delta;
                    trial[i].1 += delta;
                    let st = eval.s(&trial);
                    if st < *s - 1e-15 {
                        *state = trial;
                        *s = st;
                        improved = true;
                    }
                }
            }
        }
        step /= 3.0;
    }
}

/// Rationalizes floating weights with an exact unit sum.
fn rationalize(instance: &ProblemInstance, grid: &[Vec<u32>], state: &[(usize, f64)]) -> Option<VeroneseMeasure> {
    let mut sorted = state.to_vec();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut weights: Vec<Q> = sorted.iter().skip(1).map(|x| approx_rational(x.1, 1_000_000)).collect();
    let rest: Q = weights.iter().cloned().sum();
    weights.insert(0, qi(1) - rest);
    let atoms: Vec<Atom> = sorted
        .iter()
        .zip(weights)
        .filter(|(_, w)| w.is_positive())
        .map(|(x, w)| Atom::new(grid[x.0].clone(), w))
        .collect();
    let total: Q = atoms.iter().map(|a| a.weight.clone()).sum();
    let atoms = atoms.into_iter().map(|a| Atom::new(a.l, a.weight / &total)).collect();
    VeroneseMeasure::new(instance.clone(), atoms).ok()
}

#[derive(Clone)]
struct Candidate {
    s: Q,
    measure: VeroneseMeasure,
    cert: ExactCertificate,
}

impl Candidate {
    fn from_measure(measure: VeroneseMeasure) -> Option<Self> {
        let cert = critical_s(&curvature_data(&measure)).ok()?;
        Some(Self {
            s: cert.s_star.clone(),
            measure,
            cert,
        })
    }

    fn key(&self) -> (usize, Vec<Vec<u32>>) {
        (self.measure.atoms().len(), self.measure.support())
    }

    fn better_than(&self, other: &Self) -> bool {
        self.s < other.s || (self.s == other.s && self.key() < other.key())
    }
}

fn pick(best: &mut Option<Candidate>, c: Option<Candidate>) {
    if let Some(c) = c {
        if best.as_ref().is_none_or(|b| c.better_than(b)) {
            *best = Some(c);
        }
    }
}

/// Exact isotropic refinement on every subset of a (small) support.
fn refine(instance: &ProblemInstance, support: &[Vec<u32>]) -> Option<Candidate> {
    let k = support.len().min(6);
    let mut best = None;
    for mask in 1u32..(1 << k) {
        let sub: Vec<Vec<u32>> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| support[i].clone())
            .collect();
        if let Ok(sol) = solve_isotropic_system(instance, &sub) {
            if let IsotropicWeights::Exact { .. } = sol.weights {
                pick(&mut best, sol.measure(instance).and_then(Candidate::from_measure));
            }
        }
    }
    best
}

struct RestartResult {
    best: Option<Candidate>,
    complete: bool,
}

fn run_restart(
    instance: &ProblemInstance,
    grid: &[Vec<u32>],
    eval: &Evaluator,
    cfg: &SearchConfig,
    index: usize,
    deadline: Option<Instant>,
) -> RestartResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let expired = || deadline.is_some_and(|d| Instant::now() >= d);
    if expired() {
        return RestartResult {
            best: None,
            complete: false,
        };
    }

    let size = rng.random_range(1..=cfg.max_support.min(grid.len()));
    let chosen: Vec<usize> = rand::seq::index::sample(&mut rng, grid.len(), size).into_vec();
    let mut state: Vec<(usize, f64)> = chosen
        .into_iter()
        .map(|g| (g, -rng.random::<f64>().max(1e-300).ln()))
        .collect();
    normalize(&mut state);
    let mut s = eval.s(&state);
    let mut best_state = state.clone();
    let mut best_s = s;

    let ratio = cfg.final_temperature / cfg.initial_temperature;
    let mut complete = true;
    for it in 0..cfg.iterations {
        if it % 64 == 0 && expired() {
            complete = false;
            break;
        }
        let temp = cfg.initial_temperature * ratio.powf(it as f64 / cfg.iterations.max(1) as f64);
        let next = propose(&state, grid, cfg, &mut rng);
        let sn = eval.s(&next);
        if !sn.is_finite() {
            continue;
        }
        let accept = sn < s || (s.is_finite() && rng.random::<f64>() < (-(sn - s) / (s.abs().max(1e-12) * temp)).exp());
        if accept {
            state = next;
            s = sn;
            if s < best_s {
                best_s = s;
                best_state = state.clone();
            }
        }
    }
    if !best_s.is_finite() {
        return RestartResult { best: None, complete };
    }
    polish(eval, &mut best_state, &mut best_s);

    let mut best = None;
    pick(
        &mut best,
        rationalize(instance, grid, &best_state).and_then(Candidate::from_measure),
    );
    let mut pruned = best_state.clone();
    pruned.retain(|x| x.1 > 1e-6);
    let support: Vec<Vec<u32>> = pruned.iter().map(|x| grid[x.0].clone()).collect();
    pick(&mut best, refine(instance, &support));
    RestartResult { best, complete }
}

/// Searches tensor-Veronese measures on `instance` for small `s*`.
///
/// Deterministic for a fixed config unless the time budget expires. The
/// result never exceeds the warm start's `s*`.
pub fn minimize_s(
    instance: &ProblemInstance,
    cfg: &SearchConfig,
    warm_start: Option<&VeroneseMeasure>,
) -> Result<SearchOutcome> {
    cfg.validate()?;
    if let Some(w) = warm_start {
        if w.instance() != instance {
            return Err(Error::Dimension("warm start lives on a different instance".into()));
        }
    }
    let grid = grid_support(instance.len(), cfg.l_max);
    let eval = Evaluator::new(instance, &grid);
    let deadline = cfg.budget.map(|b| Instant::now() + b);

    let results: Vec<RestartResult> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(instance, &grid, &eval, cfg, r, deadline))
        .collect();

    let mut best = None;
    if let Some(w) = warm_start {
        pick(&mut best, Candidate::from_measure(w.clone()));
    }
    let mut complete = true;
    let mut restarts_run = 0;
    for r in results {
        complete &= r.complete;
        if r.best.is_some() {
            restarts_run += 1;
        }
        pick(&mut best, r.best);
    }
    let best = best.ok_or_else(|| Error::NoSolution("no restart produced an immersion".into()))?;
    let isotropic = crate::copositivity::is_isotropic(&curvature_data(&best.measure), &best.s);
    debug_assert!(!best.s.is_zero());
    Ok(SearchOutcome {
        measure: best.measure,
        certificate: best.cert,
        isotropic,
        complete,
        restarts_run,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn grid_excludes_zero() {
        let g = grid_support(2, 2);
        assert_eq!(g.len(), 8);
        assert_eq!(g[0], vec![0, 1]);
        assert!(!g.contains(&vec![0, 0]));
    }

    #[test]
    fn single_circle_reaches_one() {
        let inst = ProblemInstance::new(vec![1]).unwrap();
        let cfg = SearchConfig {
            restarts: 2,
            iterations: 200,
            ..Default::default()
        };
        let out = minimize_s(&inst, &cfg, None).unwrap();
        assert_eq!(out.certificate.s_star, qi(1));
        assert!(out.complete);
    }

    #[test]
    fn warm_start_is_never_worse() {
        let inst = ProblemInstance::new(vec![2, 1]).unwrap();
        let warm = VeroneseMeasure::from_pairs(&[2, 1], &[(&[1, 1], q(2, 3)), (&[0, 2], q(1, 3))]).unwrap();
        let cfg = SearchConfig {
            restarts: 1,
            iterations: 10,
            l_max: 1,
            ..Default::default()
        };
        let out = minimize_s(&inst, &cfg, Some(&warm)).unwrap();
        assert!(out.certificate.s_star <= q(3, 2));
    }

    #[test]
    fn invalid_config() {
        let inst = ProblemInstance::new(vec![1]).unwrap();
        let cfg = SearchConfig {
            l_max: 0,
            ..Default::default()
        };
        assert!(minimize_s(&inst, &cfg, None).is_err());
    }

    #[test]
    fn zero_budget_is_incomplete() {
        let inst = ProblemInstance::new(vec![2, 1]).unwrap();
        let warm = VeroneseMeasure::from_pairs(&[2, 1], &[(&[1, 1], qi(1))]).unwrap();
        let cfg = SearchConfig {
            budget: Some(Duration::ZERO),
            ..Default::default()
        };
        let out = minimize_s(&inst, &cfg, Some(&warm)).unwrap();
        assert!(!out.complete);
        assert_eq!(out.measure, warm);
    }
}
