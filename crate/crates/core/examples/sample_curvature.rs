//! Samples |A(u,u)| for explicit maps and compares with the exact s*.
use normcurv::immersion::{build_sns1_optimal, build_veronese, estimate_normal_curvature, FiniteDifference};

fn main() -> normcurv::Result<()> {
    let fd = FiniteDifference::default();
    let maps = [
        ("S^2 x S^1, optimal radii", build_sns1_optimal(2)?, 1.5f64),
        ("S^3 x S^1, optimal radii", build_sns1_optimal(3)?, 1.5),
        ("Veronese RP^2", build_veronese(2, 2)?, 4.0 / 3.0),
    ];
    for (name, f, s) in maps {
        let stats = estimate_normal_curvature(&f, 5000, 1, &fd)?;
        println!(
            "{name} in R^{}: max {:.12} (sqrt s* = {:.12}), stddev {:.1e}, closed-form gap {:.1e}",
            f.ambient_dim(),
            stats.max,
            s.sqrt(),
            stats.stddev,
            stats.closed_form_gap
        );
    }
    Ok(())
}
