//! Checks the weighted 4-design on the circle of radius 5 and folds it into
//! an isotropic measure on the flat torus.
use normcurv::copositivity::critical_s;
use normcurv::exact::format_rational;
use normcurv::measure::{curvature_data, ProblemInstance};
use normcurv::optimizer::{check_design_moments, design_from_json, design_to_measure};

fn main() -> normcurv::Result<()> {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/pythagorean_design.json"))?;
    let design = design_from_json(&text)?;
    let report = check_design_moments(&design);
    for id in &report.identities {
        println!(
            "{:?}: expected {}, holds {}",
            id.kind,
            format_rational(&id.expected),
            id.holds
        );
    }
    let mu = design_to_measure(&design, &ProblemInstance::new(vec![1; design.dimension()])?)?;
    for atom in mu.atoms() {
        println!("atom {:?} weight {}", atom.l, format_rational(&atom.weight));
    }
    println!("s* = {}", format_rational(&critical_s(&curvature_data(&mu))?.s_star));
    Ok(())
}
