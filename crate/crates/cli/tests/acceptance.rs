//! One line per acceptance criterion; exits nonzero if any fails.
//! Tolerances and runtime limits are pinned in `twincurve_cli::verify`.

use twincurve::Budgets;
use twincurve_cli::verify;

fn main() {
    let report = verify::run_all(&[], &Budgets::default());
    for c in &report.criteria {
        println!("{}", c.line());
    }
    println!("acceptance: {} passed, {} failed", report.passed, report.failed);
    if report.failed > 0 {
        std::process::exit(1);
    }
}
