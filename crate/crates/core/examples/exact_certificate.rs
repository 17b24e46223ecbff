//! Exact s* of the two-atom measure on S^3 x S^2 and the checks behind it.
use normcurv::copositivity::{critical_s, is_isotropic};
use normcurv::exact::{format_rational, q};
use normcurv::measure::{ambient_dimension, curvature_data, VeroneseMeasure};

fn main() -> normcurv::Result<()> {
    let mu = VeroneseMeasure::from_pairs(&[3, 2], &[(&[1, 1], q(3, 5)), (&[0, 2], q(2, 5))])?;
    let data = curvature_data(&mu);
    let cert = critical_s(&data)?;
    println!("measure on {}: N = {}", mu.instance(), ambient_dimension(&mu));
    println!("G = {:?}", data.g.iter().map(format_rational).collect::<Vec<_>>());
    for row in &data.a {
        println!("A   {:?}", row.iter().map(format_rational).collect::<Vec<_>>());
    }
    println!(
        "s* = {}  attained at U = {:?}",
        format_rational(&cert.s_star),
        cert.u_star.iter().map(format_rational).collect::<Vec<_>>()
    );
    println!("certificate re-check: {:?}", cert.verify(&data));
    println!("B(s*) = 0: {}", is_isotropic(&data, &cert.s_star));
    Ok(())
}
