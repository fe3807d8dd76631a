//! Thin command-line front end over the library's scenario runner.
//!
//! Exit codes: 0 on success with all checks passing, 1 on hard errors
//! (bad config, solver failure), 2 when the run completed but a verification
//! check failed.

use clap::{Parser, Subcommand};
use frame_lab::lab::{convergence_study, parse_levels, run_scenario, ScenarioConfig};
use frame_lab::surface::{surface_catalog, SurfaceParams};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "frame-lab",
    about = "Construct and verify normal Coulomb frames on the unit disc"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config; writes report.json, history.csv and fields/ CSVs
    Run {
        /// path to a TOML scenario config
        config: PathBuf,
    },
    /// Re-run a scenario at several resolutions and tabulate convergence
    Study {
        /// path to a TOML scenario config
        config: PathBuf,
        /// comma-separated resolutions, e.g. 16x32,32x64,64x128
        #[arg(long)]
        levels: String,
    },
    /// List the built-in surfaces
    Catalog,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> frame_lab::Result<bool> {
    match cli.command {
        Command::Run { config } => {
            let cfg = ScenarioConfig::from_file(&config)?;
            let report = run_scenario(&cfg)?;
            println!(
                "surface {:<28} grid {}x{}  T_init {:.6e}",
                cfg.surface.name, cfg.grid.n_r, cfg.grid.n_theta, report.total_torsion_initial
            );
            for (route, s) in &report.routes {
                println!(
                    "  {route:<8} T {:.6e}  EL ({:.3e}, {:.3e})  iters {}  converged {}",
                    s.total_torsion, s.el_interior, s.el_boundary, s.iterations, s.converged
                );
            }
            if let Some(d) = report.route_agreement {
                println!("  route agreement: max torsion difference {d:.3e}");
            }
            for (name, c) in &report.checks {
                println!(
                    "  check {name:<12} residual {:.3e} (tolerance {:.3e})  {}",
                    c.residual,
                    c.tolerance,
                    if c.passed { "pass" } else { "FAIL" }
                );
            }
            println!(
                "wrote {} ({:.2}s)",
                cfg.resolved_output_dir().join("report.json").display(),
                report.wall_time_seconds
            );
            Ok(report.all_checks_passed)
        }
        Command::Study { config, levels } => {
            let cfg = ScenarioConfig::from_file(&config)?;
            let levels = parse_levels(&levels)?;
            let study = convergence_study(&cfg, &levels)?;
            println!("surface {}", study.surface);
            println!(
                "{:>6} {:>7} {:>12} {:>14} {:>14} {:>14} {:>14}",
                "n_r", "n_theta", "h", "T", "T error", "ricci res", "weingarten res"
            );
            for row in &study.rows {
                println!(
                    "{:>6} {:>7} {:>12.4e} {:>14.6e} {:>14} {:>14.4e} {:>14.4e}",
                    row.n_r,
                    row.n_theta,
                    row.mesh_parameter,
                    row.total_torsion,
                    row.torsion_error
                        .map(|e| format!("{e:.4e}"))
                        .unwrap_or_else(|| "-".to_string()),
                    row.ricci_residual,
                    row.weingarten_residual
                );
            }
            let fmt_orders = |o: &[f64]| {
                o.iter()
                    .map(|x| {
                        if x.is_nan() {
                            "-".to_string()
                        } else {
                            format!("{x:.2}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            println!("torsion orders: {}", fmt_orders(&study.torsion_orders));
            println!("ricci orders:   {}", fmt_orders(&study.ricci_orders));
            Ok(true)
        }
        Command::Catalog => {
            let params = SurfaceParams::default();
            for name in [
                "plane",
                "holomorphic_graph",
                "holomorphic_graph_embedded",
                "clifford_patch",
                "scaled_graph",
            ] {
                let spec = surface_catalog(name, &params)?;
                println!(
                    "{:<28} ambient R^{}  codim {}  minimal T {}",
                    spec.name,
                    spec.ambient,
                    spec.codim,
                    spec.known_total_torsion
                        .map(|t| format!("{t:.6}"))
                        .unwrap_or_else(|| "unknown".to_string())
                );
            }
            Ok(true)
        }
    }
}
