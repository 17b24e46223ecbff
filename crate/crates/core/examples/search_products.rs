//! Seeded search for low-curvature measures on S^2 x S^1 and S^2 x S^2.
use normcurv::exact::format_rational;
use normcurv::measure::ProblemInstance;
use normcurv::optimizer::{minimize_s, SearchConfig};

fn main() -> normcurv::Result<()> {
    let cfg = SearchConfig::default();
    for factors in [vec![2, 1], vec![2, 2]] {
        let instance = ProblemInstance::new(factors)?;
        let start = std::time::Instant::now();
        let out = minimize_s(&instance, &cfg, None)?;
        println!(
            "{instance}: s* = {} (isotropic: {}, {:.1?})",
            format_rational(&out.certificate.s_star),
            out.isotropic,
            start.elapsed()
        );
        for atom in out.measure.atoms() {
            println!("  {:?} -> {}", atom.l, format_rational(&atom.weight));
        }
    }
    Ok(())
}
