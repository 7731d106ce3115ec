//! Acceptance suite: every criterion at its stated tolerance and runtime
//! budget. Run with `cargo test -p surfsym --test acceptance -- --nocapture`
//! to see the per-criterion lines.

use surfsym::criteria::{self, AcceptanceConfig};

#[test]
fn acceptance_criteria() {
    let cfg = AcceptanceConfig::default();
    let runs = criteria::run_all(&cfg);
    for run in &runs {
        println!("{}", run.summary_line());
        for check in &run.report.checks {
            println!(
                "    [{}] {} = {:e} ({} {:e})",
                if check.passed { "ok" } else { "!!" },
                check.name,
                check.value,
                check.relation,
                check.limit
            );
        }
    }
    assert_eq!(runs.len(), 9);
    let failed: Vec<_> = runs.iter().filter(|r| !r.passed()).map(|r| r.summary_line()).collect();
    assert!(failed.is_empty(), "failing criteria:\n{}", failed.join("\n"));
}

#[test]
fn criteria_use_the_stated_tolerances() {
    let cfg = AcceptanceConfig::default();
    assert_eq!(cfg.flat_tol, 1e-10);
    assert_eq!(cfg.rank_tol, 1e-8);
    assert_eq!(cfg.pairing_tol, 1e-8);
    assert_eq!(criteria::DESCENT_TOL, 1e-10);
    assert_eq!(criteria::NONDEGENERACY_TOL, 1e-6);
    assert_eq!(criteria::PULLBACK_TOL, 1e-6);
    assert_eq!(criteria::CLOSEDNESS_TOL, 1e-4);
    assert_eq!(criteria::CLOSEDNESS_STEPS, [2e-3, 1e-3]);
    assert_eq!(surfsym_core::tol::RIEMANN_RELATION_TOL, 1e-6);
    assert_eq!(surfsym_core::tol::QUADRATURE_DRIFT_TOL, 1e-8);
    let limits: Vec<u64> = criteria::CRITERIA.iter().map(|c| c.2).collect();
    assert_eq!(limits, [10, 30, 60, 30, 5, 30, 30, 300, 10]);
}
