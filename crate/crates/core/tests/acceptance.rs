//! Acceptance run: one line per criterion with its runtime budget.
//! Built with `harness = false` so the lines are always visible.

#![allow(clippy::needless_range_loop)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num::traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use normcurv::certifier::{
    certify, gauss_ricci, gauss_rm, pic2_quantity, scalar_identity_exact, CertifyConfig, Condition, PicParams,
};
use normcurv::cli::{bundled_fixture, fixture_names};
use normcurv::copositivity::{critical_s, critical_s_bisection, is_isotropic, simplex_quadratic_min, to_f64_matrix};
use normcurv::exact::{q, qi, to_f64, Q};
use normcurv::immersion::{
    build_sns1_optimal, build_tensor, build_veronese, estimate_normal_curvature, measured_pullback_norm2,
    random_frame_rotation, random_point, random_unit_tangent, round_norms2, sample_rng, FiniteDifference, FramePoint,
    SffSample,
};
use normcurv::measure::{
    ambient_dimension, curvature_data, immersion_check, measure_from_json, CurvatureData, ProblemInstance,
    VeroneseMeasure,
};
use normcurv::optimizer::{
    check_design_moments, design_to_measure, minimize_s, DesignInput, DesignPoints, SearchConfig,
};
use normcurv::spectral::{lambda_iso, rho, SpectralParams};

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn p(n: u32, l: u32) -> SpectralParams {
    SpectralParams::new(n, l).unwrap()
}

fn exact_zero(b: &[Vec<Q>]) -> bool {
    b.iter().flatten().all(Zero::is_zero)
}

/// `s*` of `mu`, checked to be `expected` with `B(s*) = 0` and the given `N`.
fn check_isotropic(mu: &VeroneseMeasure, expected: &Q, n_ambient: u64) -> Result<(), String> {
    mu.validate()?;
    let data = curvature_data(mu);
    let cert = critical_s(&data).map_err(|e| e.to_string())?;
    ensure(&cert.s_star == expected, || {
        format!("{}: s* = {}, expected {}", mu.instance(), cert.s_star, expected)
    })?;
    ensure(exact_zero(&data.b_matrix(expected)), || {
        format!("{}: B(s) != 0", mu.instance())
    })?;
    let n = ambient_dimension(mu);
    ensure(n == n_ambient.into(), || {
        format!("{}: N = {n}, expected {n_ambient}", mu.instance())
    })
}

fn spectral_identities() -> Outcome {
    let mut count = 0;
    for n in 1..=10u32 {
        let nq = qi(n as i64);
        ensure(rho(p(n, 1)).is_one() && lambda_iso(p(n, 1)).is_one(), || {
            format!("l = 1 fails at n = {n}")
        })?;
        ensure(rho(p(n, 2)) == qi(2) * (&nq + qi(1)) / &nq, || {
            format!("rho(n,2) fails at n = {n}")
        })?;
        ensure(lambda_iso(p(n, 2)) == qi(8) * (&nq + qi(1)) / &nq, || {
            format!("lambda(n,2) fails at n = {n}")
        })?;
        for l in 0..=20u32 {
            let lq = qi(l as i64);
            // Independent closed form of the pullback scale.
            let r = &lq * (&lq + &nq - qi(1)) / &nq;
            ensure(rho(p(n, l)) == r, || format!("rho({n},{l})"))?;
            ensure(!lambda_iso(p(n, l)).is_negative(), || format!("lambda({n},{l}) < 0"))?;
            count += 2;
        }
    }
    for l in 0..=20i64 {
        ensure(rho(p(1, l as u32)) == qi(l * l), || format!("rho(1,{l}) != l^2"))?;
        ensure(lambda_iso(p(1, l as u32)) == qi(l.pow(4)), || {
            format!("lambda(1,{l}) != l^4")
        })?;
    }
    Ok(format!("{count} values for n <= 10, l <= 20"))
}

fn prop_two_factor() -> Outcome {
    let mut cases = 0;
    for n2 in 1..=5i64 {
        for n1 in n2..=n2 + 2 {
            let d = 2 * n2 + 1;
            let mu =
                VeroneseMeasure::from_pairs(&[n1 as u32, n2 as u32], &[(&[1, 1], q(n2 + 1, d)), (&[0, 2], q(n2, d))])
                    .map_err(|e| e.to_string())?;
            let n = ((n1 + 1) * (n2 + 1) + n2 * (n2 + 3) / 2) as u64;
            check_isotropic(&mu, &q(d, n2 + 1), n)?;
            cases += 1;
        }
    }
    Ok(format!("{cases} instances, s = (2n2+1)/(n2+1), B(s) = 0"))
}

fn prop_three_factor() -> Outcome {
    let mut cases = 0;
    for n3 in 1..=5i64 {
        for (n1, n2) in [(n3, n3), (n3 + 1, n3), (n3 + 2, n3 + 1)] {
            let d = 6 * n3 + 5;
            let mu = VeroneseMeasure::from_pairs(
                &[n1 as u32, n2 as u32, n3 as u32],
                &[
                    (&[1, 1, 0], q(n3 + 1, d)),
                    (&[0, 1, 1], q(2 * (n3 + 1), d)),
                    (&[1, 0, 1], q(2 * (n3 + 1), d)),
                    (&[0, 0, 2], q(n3, d)),
                ],
            )
            .map_err(|e| e.to_string())?;
            let n = ((n1 + 1) * (n2 + 1) + (n1 + 1) * (n3 + 1) + (n2 + 1) * (n3 + 1) + n3 * (n3 + 3) / 2) as u64;
            check_isotropic(&mu, &q(d, 3 * n3 + 3), n)?;
            cases += 1;
        }
    }
    Ok(format!("{cases} instances, s = (6n3+5)/(3n3+3), B(s) = 0"))
}

fn prop_sphere_torus() -> Outcome {
    let w = [q(5, 9), q(200, 7371), q(719, 3024), q(3025, 16848)];
    let total: Q = w.iter().sum();
    ensure(total.is_one(), || format!("weights sum to {total}"))?;
    for n in 1..=5u32 {
        let mu = VeroneseMeasure::from_pairs(
            &[n, 1, 1],
            &[
                (&[1, 5, 5], w[0].clone()),
                (&[0, 2, 11], w[1].clone()),
                (&[0, 5, 10], w[2].clone()),
                (&[0, 11, 2], w[3].clone()),
            ],
        )
        .map_err(|e| e.to_string())?;
        check_isotropic(&mu, &q(9, 5), 4 * n as u64 + 16)?;
    }
    Ok("weights sum to 1; s = 9/5, B = 0, N = 4n+16 for n = 1..5".into())
}

fn pythagorean_design() -> Outcome {
    // Axis points and (3,4)-type points on the circle of radius 5; the split
    // of mass kills the degree-4 harmonic: w1 + w2 cos(4a) = 0, cos a = 4/5.
    let c = q(4, 5);
    let cos4 = qi(8) * c.pow(4) - qi(8) * c.pow(2) + qi(1);
    let w_axis_total = -&cos4 / (qi(1) - &cos4);
    let w_other_total = qi(1) - &w_axis_total;
    let mut points = vec![vec![5, 0], vec![-5, 0], vec![0, 5], vec![0, -5]];
    let mut weights = vec![&w_axis_total / qi(4); 4];
    for (a, b) in [(3, 4), (4, 3)] {
        for (sa, sb) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            points.push(vec![sa * a, sb * b]);
            weights.push(&w_other_total / qi(8));
        }
    }
    let exact: Vec<Vec<Q>> = points.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect();
    let design = DesignInput::new(25, DesignPoints::Exact(exact), weights).map_err(|e| e.to_string())?;
    let moments = check_design_moments(&design);
    ensure(moments.exact && moments.passes(), || "design moments fail".into())?;
    let torus = ProblemInstance::new(vec![1, 1]).unwrap();
    let mu = design_to_measure(&design, &torus).map_err(|e| e.to_string())?;
    let data = curvature_data(&mu);
    let cert = critical_s(&data).map_err(|e| e.to_string())?;
    ensure(cert.s_star == q(3, 2), || format!("s* = {}", cert.s_star))?;
    ensure(is_isotropic(&data, &cert.s_star), || "B(3/2) != 0".into())?;
    let bundled = measure_from_json(bundled_fixture("pythagorean_torus.json").unwrap()).map_err(|e| e.to_string())?;
    ensure(bundled == mu, || {
        "bundled torus measure differs from the folded design".into()
    })?;
    Ok(format!(
        "{} exact moment identities; folded measure has {} atoms, s = 3/2",
        moments.identities.len(),
        mu.atoms().len()
    ))
}

fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Q {
    q(rng.random_range(lo * 12..=hi * 12), rng.random_range(1..=12))
}

fn random_data(rng: &mut ChaCha8Rng, m: usize) -> CurvatureData {
    let mut a = vec![vec![Q::zero(); m]; m];
    for i in 0..m {
        for j in 0..=i {
            let v = random_rational(rng, -3, 6);
            a[i][j] = v.clone();
            a[j][i] = v;
        }
    }
    let g = (0..m)
        .map(|_| q(rng.random_range(1..=24), rng.random_range(1..=6)))
        .collect();
    CurvatureData::new(a, g).unwrap()
}

fn random_measure_data(rng: &mut ChaCha8Rng, m: usize) -> CurvatureData {
    loop {
        let factors: Vec<u32> = (0..m).map(|_| rng.random_range(1..=3)).collect();
        let atoms = rng.random_range(1..=4);
        let raw: Vec<i64> = (0..atoms).map(|_| rng.random_range(1..=9)).collect();
        let total: i64 = raw.iter().sum();
        let pairs: Vec<(Vec<u32>, Q)> = raw
            .iter()
            .map(|&w| ((0..m).map(|_| rng.random_range(0..=3)).collect(), q(w, total)))
            .collect();
        let borrowed: Vec<(&[u32], Q)> = pairs.iter().map(|(l, w)| (l.as_slice(), w.clone())).collect();
        if let Ok(mu) = VeroneseMeasure::from_pairs(&factors, &borrowed) {
            let data = curvature_data(&mu);
            if immersion_check(&data).is_ok() {
                return data;
            }
        }
    }
}

/// Brute-force minimum of `U^T B U` over the simplex grid with spacing `1/k`.
fn grid_min(b: &[Vec<f64>], k: usize) -> f64 {
    fn rec(b: &[Vec<f64>], k: usize, u: &mut Vec<usize>, left: usize, best: &mut f64) {
        let m = b.len();
        if u.len() == m - 1 {
            u.push(left);
            let x: Vec<f64> = u.iter().map(|&c| c as f64 / k as f64).collect();
            let v: f64 = (0..m).map(|i| (0..m).map(|j| b[i][j] * x[i] * x[j]).sum::<f64>()).sum();
            *best = best.min(v);
            u.pop();
            return;
        }
        for c in 0..=left {
            u.push(c);
            rec(b, k, u, left - c, best);
            u.pop();
        }
    }
    let mut best = f64::INFINITY;
    rec(b, k, &mut Vec::new(), k, &mut best);
    best
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    let mut instances = 0;
    for i in 0..160 {
        let m = 1 + i % 4;
        let data = if i % 2 == 0 {
            random_data(&mut rng, m)
        } else {
            random_measure_data(&mut rng, m)
        };
        let exact = to_f64(&critical_s(&data).map_err(|e| e.to_string())?.s_star);
        let bisect = critical_s_bisection(&data.to_f64(), 1e-12, i as u64).s_star;
        let gap = (exact - bisect).abs();
        ensure(gap <= 1e-9, || {
            format!("instance {i} (M = {m}): face {exact} vs bisection {bisect}")
        })?;
        worst = worst.max(gap);
        instances += 1;
    }
    let k = 100;
    let mut grids = 0;
    for m in 2..=4usize {
        for _ in 0..10 {
            let b: Vec<Vec<Q>> = random_data(&mut rng, m).a;
            let opt = simplex_quadratic_min(&b).map_err(|e| e.to_string())?;
            let bf = to_f64_matrix(&b);
            let brute = grid_min(&bf, k);
            let exact = to_f64(&opt.value);
            // Every simplex point is within l1 distance m/k of a grid point and
            // |f(u) - f(v)| <= |u - v|_1 * 2 max |B_ij|.
            let bmax = bf.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
            let lip = 2.0 * bmax * m as f64 / k as f64;
            ensure(exact <= brute + 1e-12 && brute - exact <= lip, || {
                format!("M = {m}: exact {exact} vs grid {brute} (tolerance {lip})")
            })?;
            grids += 1;
        }
    }
    Ok(format!(
        "{instances} instances, largest gap {worst:.1e}; {grids} grid checks"
    ))
}

fn sampling_sns1() -> Outcome {
    let fd = FiniteDifference::default();
    let mut parts = Vec::new();
    for n in [2, 3] {
        let f = build_sns1_optimal(n).map_err(|e| e.to_string())?;
        let stats = estimate_normal_curvature(&f, 10_000, 7, &fd).map_err(|e| e.to_string())?;
        let target = 1.5f64.sqrt();
        ensure((stats.max - target).abs() <= 1e-3, || {
            format!("n = {n}: max {} vs sqrt(3/2)", stats.max)
        })?;
        ensure(stats.stddev < 1e-6, || format!("n = {n}: stddev {:.3e}", stats.stddev))?;
        ensure(stats.closed_form_gap < 1e-6, || {
            format!("n = {n}: closed-form gap {:.3e}", stats.closed_form_gap)
        })?;
        parts.push(format!(
            "n={n} max-sqrt(3/2)={:.1e} sd={:.1e} gap={:.1e}",
            stats.max - target,
            stats.stddev,
            stats.closed_form_gap
        ));
    }
    Ok(parts.join("; "))
}

fn veronese_plane() -> Outcome {
    let f = build_veronese(2, 2).map_err(|e| e.to_string())?;
    let fd = FiniteDifference::default();
    let (mut norm_err, mut scale_err): (f64, f64) = (0.0, 0.0);
    for i in 0..1000u64 {
        let mut rng = sample_rng(8, i);
        let x = random_point(&f, &mut rng);
        norm_err = norm_err.max((f.eval(&x).norm() - 1.0).abs());
        let fp = FramePoint::canonical(&f, x.clone()).map_err(|e| e.to_string())?;
        let (_, v) = random_unit_tangent(&fp, &mut rng);
        let round: f64 = round_norms2(&v).iter().sum();
        let measured = measured_pullback_norm2(&f, &x, &v, &fd);
        scale_err = scale_err.max((measured / round - 3.0).abs());
    }
    ensure(norm_err <= 1e-12, || format!("|phi| - 1 up to {norm_err:.1e}"))?;
    ensure(scale_err <= 1e-8, || format!("pullback scale off by {scale_err:.1e}"))?;
    let stats = estimate_normal_curvature(&f, 2000, 8, &fd).map_err(|e| e.to_string())?;
    let target = (4.0f64 / 3.0).sqrt();
    ensure(
        (stats.max - target).abs() <= 1e-4 && (stats.min - target).abs() <= 1e-4,
        || format!("|A(u,u)| in [{}, {}], expected {target}", stats.min, stats.max),
    )?;
    Ok(format!(
        "| |phi|-1 | <= {norm_err:.1e}, scale error {scale_err:.1e}, |A(u,u)| - sqrt(4/3) = {:.1e}",
        stats.max - target
    ))
}

fn gauss_identities() -> Outcome {
    let mut measures = 0;
    for name in fixture_names() {
        let text = bundled_fixture(name).unwrap();
        let Ok(mu) = measure_from_json(text) else {
            continue;
        };
        let check = scalar_identity_exact(&mu).map_err(|e| e.to_string())?;
        ensure(check.residual.is_zero(), || {
            format!("{name}: residual {}", check.residual)
        })?;
        measures += 1;
    }
    ensure(measures >= 14, || format!("only {measures} bundled measures"))?;
    let fd = FiniteDifference::default();
    let maps = [
        build_sns1_optimal(3).unwrap(),
        build_veronese(2, 2).unwrap(),
        build_tensor(&measure_from_json(bundled_fixture("prop32_n1.json").unwrap()).unwrap()).unwrap(),
        build_tensor(&measure_from_json(bundled_fixture("prop33_n1.json").unwrap()).unwrap()).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for (k, f) in maps.iter().enumerate() {
        for i in 0..25u64 {
            let mut rng = sample_rng(9 + k as u64, i);
            let fp = FramePoint::canonical(f, random_point(f, &mut rng)).map_err(|e| e.to_string())?;
            let base = SffSample::measure(f, fp, &fd).map_err(|e| e.to_string())?;
            let s = base.rotated(&random_frame_rotation(base.dim(), &mut rng));
            let n = s.dim();
            for a in 0..n {
                let traced: f64 = (0..n).filter(|&b| b != a).map(|b| gauss_rm(&s, a, b, b, a)).sum();
                worst = worst.max((traced - gauss_ricci(&s, a)).abs());
            }
        }
    }
    ensure(worst <= 1e-8, || format!("Ricci trace mismatch {worst:.1e}"))?;
    Ok(format!(
        "{measures} measures with residual 0; Ricci trace error {worst:.1e}"
    ))
}

fn certification() -> Outcome {
    let mut parts = Vec::new();
    for n in [2, 3] {
        let f = build_sns1_optimal(n).map_err(|e| e.to_string())?;
        let mut cfg = CertifyConfig::new(Condition::Sec);
        cfg.samples = 10_000;
        let r = certify(&f, &cfg).map_err(|e| e.to_string())?;
        ensure(r.min_value >= -1e-6, || format!("n = {n}: min sec {:.3e}", r.min_value))?;
        ensure(r.min_value <= 1e-3, || {
            format!("n = {n}: min sec {:.3e} not sharp", r.min_value)
        })?;
        parts.push(format!("sec n={n} min {:.1e}", r.min_value));
    }
    let sphere = build_veronese(4, 1).map_err(|e| e.to_string())?;
    let fd = FiniteDifference::default();
    let mut worst: f64 = 0.0;
    for i in 0..50u64 {
        let mut rng = sample_rng(10, i);
        let fp = FramePoint::canonical(&sphere, random_point(&sphere, &mut rng)).map_err(|e| e.to_string())?;
        let s = SffSample::measure(&sphere, fp, &fd).map_err(|e| e.to_string())?;
        for pp in PicParams::grid() {
            let v = pic2_quantity(&s, [0, 1, 2, 3], pp, 4.0).map_err(|e| e.to_string())?;
            worst = worst.max((v - (1.0 + pp.lam * pp.lam) * (1.0 + pp.mu * pp.mu)).abs());
        }
    }
    ensure(worst <= 1e-8, || format!("round S^4 PIC-2 off by {worst:.1e}"))?;
    parts.push(format!("S^4 pic2 error {worst:.1e}"));
    for (cond, n) in [
        (Condition::Angle, 2),
        (Condition::Angle, 3),
        (Condition::Offdiag, 2),
        (Condition::Offdiag, 3),
        (Condition::Pic2, 3),
    ] {
        let f = build_sns1_optimal(n).map_err(|e| e.to_string())?;
        let mut cfg = CertifyConfig::new(cond);
        cfg.samples = 10_000;
        let r = certify(&f, &cfg).map_err(|e| e.to_string())?;
        let margin = r.helper_margin.unwrap_or(r.min_margin);
        ensure(margin >= -1e-8, || {
            format!("{} n = {n}: margin {margin:.3e}", cond.name())
        })?;
        parts.push(format!("{} n={n} margin {margin:.1e}", cond.name()));
    }
    Ok(parts.join("; "))
}

fn optimizer_targets() -> Outcome {
    let cfg = SearchConfig::default();
    let mut parts = Vec::new();
    for (factors, target) in [(vec![2, 1], q(3, 2)), (vec![2, 2], q(5, 3))] {
        let instance = ProblemInstance::new(factors.clone()).unwrap();
        let start = Instant::now();
        let out = minimize_s(&instance, &cfg, None).map_err(|e| e.to_string())?;
        let s = to_f64(&out.certificate.s_star);
        ensure(s <= to_f64(&target) + 1e-6, || {
            format!("{factors:?}: s = {s}, target {target}")
        })?;
        parts.push(format!(
            "{factors:?} s = {} in {:.2}s",
            out.certificate.s_star,
            start.elapsed().as_secs_f64()
        ));
    }
    Ok(parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("spectral identities", 1, spectral_identities),
        ("two-factor isotropic measures", 1, prop_two_factor),
        ("three-factor isotropic measures", 1, prop_three_factor),
        ("S^n x T^2 measure", 1, prop_sphere_torus),
        ("folded Pythagorean design", 1, pythagorean_design),
        ("face enumeration vs oracles", 60, oracle_equivalence),
        ("S^n x S^1 sampling", 60, sampling_sns1),
        ("Veronese projective plane", 30, veronese_plane),
        ("Gauss identities", 30, gauss_identities),
        ("conformal certification", 120, certification),
        ("optimizer targets", 300, optimizer_targets),
    ];
    let mut failures = 0;
    for (k, (title, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > Duration::from_secs(budget) => Err(format!("over budget: {d}")),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if outcome.is_err() {
            failures += 1;
        }
        println!(
            "criterion {:>2} {tag} [{:.2}s / {budget}s] {title}: {detail}",
            k + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 11 criteria pass", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
