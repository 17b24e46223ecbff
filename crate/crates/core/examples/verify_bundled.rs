//! Runs the bundled-data verification and prints the text report.
use normcurv::cli::{cmd_verify_paper, VerifyOptions};
use normcurv::report::Format;

fn main() -> normcurv::Result<()> {
    let report = cmd_verify_paper(&VerifyOptions::default())?;
    print!("{}", report.render(Format::Text));
    std::process::exit(if report.passed() { 0 } else { 1 });
}
