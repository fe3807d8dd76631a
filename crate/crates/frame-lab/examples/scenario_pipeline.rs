//! Driving the full scenario pipeline from code.
//!
//! Everything the `frame-lab` binary does is available as a library call:
//! parse a TOML scenario, run it (gauge fixing plus verification checks,
//! report.json / history.csv / fields/*.csv written to the output
//! directory), and run a convergence study over several resolutions.
//!
//!     cargo run --example scenario_pipeline

use frame_lab::lab::{convergence_study, run_scenario, ScenarioConfig};

fn main() -> frame_lab::Result<()> {
    let toml = r#"
route = "both"
checks = ["ricci", "weingarten", "tau", "invariance", "apriori"]
seed = 7
output_dir = "target/scenario_pipeline_out"

[twist]
kind = "radial_bump"
a = 0.8

[surface]
name = "clifford_patch"
a = 1.2

[grid]
n_r = 32
n_theta = 64

[descent]
el_tolerance = 1e-4
max_iterations = 150
"#;
    let cfg = ScenarioConfig::from_toml(toml)?;
    let report = run_scenario(&cfg)?;
    println!(
        "initial total torsion {:.4}, mesh parameter {:.4}",
        report.total_torsion_initial, report.mesh_parameter
    );
    for (route, s) in &report.routes {
        println!(
            "  {route:<8} T = {:.3e}, {} iterations, converged {}",
            s.total_torsion, s.iterations, s.converged
        );
    }
    for (name, c) in &report.checks {
        println!(
            "  check {name:<12} residual {:.3e}  {}",
            c.residual,
            if c.passed { "pass" } else { "FAIL" }
        );
    }
    println!(
        "report written to {}/report.json\n",
        cfg.resolved_output_dir().display()
    );

    let study = convergence_study(&cfg, &[(16, 32), (32, 64), (64, 128)])?;
    println!("convergence on {}:", study.surface);
    for row in &study.rows {
        println!(
            "  {:>3}x{:<3}  T = {:.6e}  ricci residual {:.3e}",
            row.n_r, row.n_theta, row.total_torsion, row.ricci_residual
        );
    }
    println!("ricci orders: {:?}", study.ricci_orders);
    Ok(())
}
