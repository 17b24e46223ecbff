//! Recovers isotropic weights for fixed supports by solving B(s) = 0.
use normcurv::exact::format_rational;
use normcurv::measure::ProblemInstance;
use normcurv::optimizer::{solve_isotropic_system, IsotropicWeights};

fn main() -> normcurv::Result<()> {
    let cases: [(Vec<u32>, Vec<Vec<u32>>); 3] = [
        (vec![2, 1], vec![vec![1, 1], vec![0, 2]]),
        (
            vec![3, 2, 1],
            vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1], vec![0, 0, 2]],
        ),
        (vec![2, 2], vec![vec![1, 1], vec![2, 0], vec![0, 2]]),
    ];
    for (factors, support) in cases {
        let instance = ProblemInstance::new(factors)?;
        match solve_isotropic_system(&instance, &support) {
            Ok(sol) => match &sol.weights {
                IsotropicWeights::Exact { weights, s } => println!(
                    "{instance}: s = {}, weights {:?}",
                    format_rational(s),
                    weights.iter().map(format_rational).collect::<Vec<_>>()
                ),
                IsotropicWeights::Numeric { weights, s, residual } => {
                    println!("{instance}: s ~ {s:.12}, weights {weights:?} (residual {residual:.1e})")
                }
            },
            Err(e) => println!("{instance}: {e}"),
        }
    }
    Ok(())
}
