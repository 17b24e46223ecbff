//! Eigenspace dimension and the constants rho, lambda for small spheres.
use normcurv::exact::format_rational;
use normcurv::spectral::{eigen_dimension, lambda_iso, rho, SpectralParams};

fn main() -> normcurv::Result<()> {
    println!("{:>3} {:>3} {:>8} {:>10} {:>10}", "n", "l", "D", "rho", "lambda");
    for n in 1..=4 {
        for l in 0..=4 {
            let p = SpectralParams::new(n, l)?;
            println!(
                "{n:>3} {l:>3} {:>8} {:>10} {:>10}",
                eigen_dimension(p),
                format_rational(&rho(p)),
                format_rational(&lambda_iso(p))
            );
        }
    }
    Ok(())
}
