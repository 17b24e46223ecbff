//! Sampled conformal curvature conditions on the optimal S^3 x S^1 map.
use normcurv::certifier::{certify, CertifyConfig, Condition};
use normcurv::immersion::build_sns1_optimal;

fn main() -> normcurv::Result<()> {
    let f = build_sns1_optimal(3)?;
    for cond in [
        Condition::Sec,
        Condition::Angle,
        Condition::Offdiag,
        Condition::Pic2,
        Condition::Biricci,
    ] {
        let mut cfg = CertifyConfig::new(cond);
        cfg.samples = 500;
        let r = certify(&f, &cfg)?;
        println!(
            "{:<8} c = {:.6} measured c_f = {:.9} min value {:+.3e} min margin {:+.3e} passed {:?}",
            cond.name(),
            r.c,
            r.measured_cf,
            r.min_value,
            r.min_margin,
            r.passed
        );
    }
    Ok(())
}
