//! Scenario orchestration: configuration files, the
//! sample -> seed -> twist -> gauge-fix -> verify pipeline, machine-readable
//! reports, CSV field dumps, and convergence studies.

#[cfg(test)]
mod tests;

use crate::error::{Error, Result};
use crate::gauge::{
    apply_rotation, apriori_report, coulomb_via_neumann, exp_so,
    minimize_total_torsion, smooth_random_rotation_field, tau_potential, total_torsion,
    AprioriReport, CoulombResult, DescentOptions, RotationField,
};
use crate::grid::{build_polar_grid, DiscGrid};
use crate::surface::{
    curvature_from_ricci, curvature_from_torsion, initial_frame, sample_surface,
    second_fundamental, surface_catalog, torsion_of_frame, weingarten_residual,
    NormalFrameField, SurfaceJet, SurfaceParams, SurfaceSpec,
};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Report schema version, bumped on any structural change.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Environment variable overriding the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "FRAME_LAB_OUT";

pub const KNOWN_CHECKS: &[&str] = &["ricci", "weingarten", "tau", "invariance", "apriori"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteChoice {
    Neumann,
    Descent,
    Both,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub name: String,
    #[serde(default)]
    pub codim: Option<usize>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_r: usize,
    pub n_theta: usize,
}

/// Closed-form pre-twist of the seed frame: a rotation angle field applied in
/// the (N_1, N_2)-plane before gauge fixing.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "kind")]
pub enum TwistConfig {
    /// angle = a
    Constant { a: f64 },
    /// angle = a u + b v
    Linear { a: f64, b: f64 },
    /// angle = a (1 - r^2)
    RadialBump { a: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DescentConfig {
    pub max_iterations: usize,
    pub initial_step: f64,
    pub armijo_slope: f64,
    pub step_shrink: f64,
    pub el_tolerance: f64,
    pub decrease_tolerance: f64,
    pub random_init: bool,
    pub init_amplitude: f64,
}

impl Default for DescentConfig {
    fn default() -> Self {
        let d = DescentOptions::default();
        Self {
            max_iterations: d.max_iterations,
            initial_step: d.initial_step,
            armijo_slope: d.armijo_slope,
            step_shrink: d.step_shrink,
            el_tolerance: d.el_tolerance,
            decrease_tolerance: d.decrease_tolerance,
            random_init: false,
            init_amplitude: d.init_amplitude,
        }
    }
}

/// Check tolerances. The EL bound is absolute; the others are factors
/// multiplying h^2 (h = mesh parameter), which is the discretization order of
/// every residual involved.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    pub el: f64,
    pub ricci_factor: f64,
    pub weingarten_factor: f64,
    pub tau_factor: f64,
    pub invariance_factor: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            el: 1e-3,
            ricci_factor: 5.0,
            weingarten_factor: 5.0,
            tau_factor: 10.0,
            invariance_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub surface: SurfaceConfig,
    pub grid: GridConfig,
    pub route: RouteChoice,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub twist: Option<TwistConfig>,
    #[serde(default)]
    pub descent: DescentConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_seed() -> u64 {
    0
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.checks {
            if !KNOWN_CHECKS.contains(&c.as_str()) {
                return Err(Error::InvalidConfig(format!(
                    "unknown check '{c}'; known: {}",
                    KNOWN_CHECKS.join(", ")
                )));
            }
        }
        let spec = self.surface_spec()?;
        if self.route != RouteChoice::Descent && spec.codim != 2 {
            return Err(Error::InvalidConfig(format!(
                "route 'neumann' requires codimension 2, surface '{}' has codimension {}",
                spec.name, spec.codim
            )));
        }
        Ok(())
    }

    pub fn surface_spec(&self) -> Result<SurfaceSpec> {
        let params = SurfaceParams {
            codim: self.surface.codim,
            a: self.surface.a,
            lambda: self.surface.lambda,
        };
        surface_catalog(&self.surface.name, &params)
    }

    /// Output directory: environment override, then config, then "out".
    pub fn resolved_output_dir(&self) -> PathBuf {
        if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
            return PathBuf::from(dir);
        }
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("out"))
    }

    fn descent_options(&self) -> DescentOptions {
        DescentOptions {
            max_iterations: self.descent.max_iterations,
            initial_step: self.descent.initial_step,
            armijo_slope: self.descent.armijo_slope,
            step_shrink: self.descent.step_shrink,
            el_tolerance: self.descent.el_tolerance,
            decrease_tolerance: self.descent.decrease_tolerance,
            init_seed: self.descent.random_init.then_some(self.seed),
            init_amplitude: self.descent.init_amplitude,
        }
    }
}

/// Evaluates a twist spec as a nodal angle field.
pub fn twist_angles(twist: &TwistConfig, grid: &DiscGrid) -> Vec<f64> {
    grid.nodes()
        .iter()
        .map(|&(u, v)| match *twist {
            TwistConfig::Constant { a } => a,
            TwistConfig::Linear { a, b } => a * u + b * v,
            TwistConfig::RadialBump { a } => a * (1.0 - u * u - v * v),
        })
        .collect()
}

/// Rotation in the (N_1, N_2)-plane by a nodal angle field, any codimension.
pub fn plane_rotation_field(codim: usize, angles: &[f64]) -> RotationField {
    let rotations = angles
        .iter()
        .map(|&x| {
            let mut a = DMatrix::zeros(codim, codim);
            a[(0, 1)] = -x;
            a[(1, 0)] = x;
            exp_so(&a)
        })
        .collect();
    RotationField { codim, rotations }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RouteSummary {
    pub total_torsion: f64,
    pub el_interior: f64,
    pub el_boundary: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: ScenarioConfig,
    pub mesh_parameter: f64,
    pub conformality_residual: f64,
    pub total_torsion_initial: f64,
    pub routes: BTreeMap<String, RouteSummary>,
    /// max node-wise torsion difference between the two routes, when both ran
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route_agreement: Option<f64>,
    pub checks: BTreeMap<String, CheckOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub apriori: Option<AprioriReport>,
    pub all_checks_passed: bool,
    pub wall_time_seconds: f64,
}

fn summarize(r: &CoulombResult) -> RouteSummary {
    RouteSummary {
        total_torsion: r.total_torsion,
        el_interior: r.el_interior,
        el_boundary: r.el_boundary,
        iterations: r.iterations,
        converged: r.converged,
    }
}

/// Runs the full pipeline described by `cfg`, writes report.json,
/// history.csv and fields/*.csv into the output directory, and returns the
/// report. Given the same config and seed the numeric fields are
/// reproducible bit for bit.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunReport> {
    let start = std::time::Instant::now();
    cfg.validate()?;
    let spec = cfg.surface_spec()?;
    let grid = build_polar_grid(cfg.grid.n_r, cfg.grid.n_theta)?;
    let h = grid.mesh_parameter();
    let jet = sample_surface(&spec, &grid)?;
    let seeded = initial_frame(&spec, &jet, &grid)?;

    let start_frame = match &cfg.twist {
        Some(t) => {
            let angles = twist_angles(t, &grid);
            apply_rotation(&seeded, &plane_rotation_field(seeded.codim, &angles))
        }
        None => seeded,
    };
    let t_init = total_torsion(&torsion_of_frame(&start_frame, &grid), &grid);

    let mut routes = BTreeMap::new();
    let mut neumann = None;
    let mut descent = None;
    if cfg.route != RouteChoice::Descent {
        let r = coulomb_via_neumann(&start_frame, &grid)?;
        routes.insert("neumann".to_string(), summarize(&r));
        neumann = Some(r);
    }
    if cfg.route != RouteChoice::Neumann {
        let r = minimize_total_torsion(&start_frame, &grid, &cfg.descent_options())?;
        routes.insert("descent".to_string(), summarize(&r));
        descent = Some(r);
    }
    let route_agreement = match (&neumann, &descent) {
        (Some(a), Some(b)) => Some(a.torsion.max_difference(&b.torsion)),
        _ => None,
    };
    // checks run on the descent result when available (it exists for every
    // codimension), otherwise the Neumann result
    let result = descent.as_ref().or(neumann.as_ref()).unwrap();

    let curvature = curvature_from_torsion(&result.torsion, &jet.w, &grid);
    let mut checks = BTreeMap::new();
    let mut apriori = None;
    for name in &cfg.checks {
        let outcome = match name.as_str() {
            "ricci" => check_ricci(&jet, &result.frame, &curvature, h, cfg),
            "weingarten" => check_weingarten(&jet, result, &grid, h, cfg),
            "tau" => check_tau(result, &curvature, &grid, h, cfg)?,
            "invariance" => check_invariance(&jet, result, &grid, h, cfg),
            "apriori" => {
                let rep = apriori_report(result, &curvature);
                let outcome = CheckOutcome {
                    residual: rep.lhs,
                    tolerance: 1.0,
                    passed: rep.condition_met,
                    details: BTreeMap::from([
                        ("gamma".to_string(), rep.gamma),
                        ("s0".to_string(), rep.s0),
                        ("sup_t".to_string(), rep.sup_t),
                    ]),
                };
                apriori = Some(rep);
                outcome
            }
            _ => unreachable!("validated above"),
        };
        checks.insert(name.clone(), outcome);
    }
    let all_checks_passed = checks.values().all(|c| c.passed);

    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: cfg.clone(),
        mesh_parameter: h,
        conformality_residual: jet.conformality_residual,
        total_torsion_initial: t_init,
        routes,
        route_agreement,
        checks,
        apriori,
        all_checks_passed,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };

    write_outputs(cfg, &grid, &jet, result, &curvature, &report)?;
    Ok(report)
}

fn check_ricci(
    jet: &SurfaceJet,
    frame: &NormalFrameField,
    curvature: &crate::surface::NormalCurvatureField,
    h: f64,
    cfg: &ScenarioConfig,
) -> CheckOutcome {
    let l = second_fundamental(jet, frame);
    let ricci = curvature_from_ricci(&l, jet);
    let residual = curvature.max_difference(&ricci);
    let tolerance = cfg.tolerances.ricci_factor * h * h;
    CheckOutcome {
        residual,
        tolerance,
        passed: residual <= tolerance,
        details: BTreeMap::new(),
    }
}

fn check_weingarten(
    jet: &SurfaceJet,
    result: &CoulombResult,
    grid: &DiscGrid,
    h: f64,
    cfg: &ScenarioConfig,
) -> CheckOutcome {
    let l = second_fundamental(jet, &result.frame);
    let residual = weingarten_residual(jet, &result.frame, &result.torsion, &l, grid);
    let tolerance = cfg.tolerances.weingarten_factor * h * h;
    CheckOutcome {
        residual,
        tolerance,
        passed: residual <= tolerance,
        details: BTreeMap::new(),
    }
}

fn check_tau(
    result: &CoulombResult,
    curvature: &crate::surface::NormalCurvatureField,
    grid: &DiscGrid,
    h: f64,
    cfg: &ScenarioConfig,
) -> Result<CheckOutcome> {
    let tp = tau_potential(&result.torsion, curvature, grid)?;
    let residual = tp.residual_gradient.max(tp.residual_poisson);
    let tolerance = cfg.tolerances.tau_factor * h * h;
    Ok(CheckOutcome {
        residual,
        tolerance,
        passed: residual <= tolerance && tp.residual_boundary == 0.0,
        details: BTreeMap::from([
            ("residual_gradient".to_string(), tp.residual_gradient),
            ("residual_poisson".to_string(), tp.residual_poisson),
            ("residual_boundary".to_string(), tp.residual_boundary),
        ]),
    })
}

/// Rotation covariance: conjugate the curvature by a seeded smooth random
/// rotation field and compare against the recomputed curvature.
fn check_invariance(
    jet: &SurfaceJet,
    result: &CoulombResult,
    grid: &DiscGrid,
    h: f64,
    cfg: &ScenarioConfig,
) -> CheckOutcome {
    let s = curvature_from_torsion(&result.torsion, &jet.w, grid);
    let rot = smooth_random_rotation_field(result.frame.codim, grid, cfg.seed, 0.9);
    let rotated = apply_rotation(&result.frame, &rot);
    let s2 = curvature_from_torsion(&torsion_of_frame(&rotated, grid), &jet.w, grid);
    let mut conj_diff = 0.0f64;
    let mut len_diff = 0.0f64;
    for p in 0..grid.n_nodes() {
        let conj = &rot.rotations[p] * &s.s12[p] * rot.rotations[p].transpose();
        conj_diff = conj_diff.max((&s2.s12[p] - conj).abs().max());
        len_diff = len_diff.max((s2.length[p] - s.length[p]).abs());
    }
    let residual = conj_diff.max(len_diff);
    let tolerance = cfg.tolerances.invariance_factor * h * h;
    CheckOutcome {
        residual,
        tolerance,
        passed: residual <= tolerance,
        details: BTreeMap::from([
            ("conjugation".to_string(), conj_diff),
            ("length".to_string(), len_diff),
        ]),
    }
}

fn write_outputs(
    cfg: &ScenarioConfig,
    grid: &DiscGrid,
    jet: &SurfaceJet,
    result: &CoulombResult,
    curvature: &crate::surface::NormalCurvatureField,
    report: &RunReport,
) -> Result<()> {
    let dir = cfg.resolved_output_dir();
    let fields = dir.join("fields");
    std::fs::create_dir_all(&fields)?;

    let json = serde_json::to_string_pretty(report)
        .map_err(|e| Error::InvalidConfig(format!("report serialization: {e}")))?;
    std::fs::write(dir.join("report.json"), json)?;

    let mut hist = std::fs::File::create(dir.join("history.csv"))?;
    writeln!(
        hist,
        "iteration,total_torsion,el_interior,el_boundary,gradient_norm,step"
    )?;
    for r in &result.history {
        writeln!(
            hist,
            "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            r.iteration, r.total_torsion, r.el_interior, r.el_boundary, r.gradient_norm, r.step
        )?;
    }

    write_field(&fields.join("w.csv"), grid, &jet.w)?;
    write_field(&fields.join("curvature_length.csv"), grid, &curvature.length)?;
    let n = result.torsion.codim;
    for s in 0..n {
        for t in (s + 1)..n {
            for (label, mats) in [("t1", &result.torsion.t1), ("t2", &result.torsion.t2)] {
                let values: Vec<f64> = mats.iter().map(|m| m[(s, t)]).collect();
                let name = format!("torsion_{label}_{}{}.csv", s + 1, t + 1);
                write_field(&fields.join(name), grid, &values)?;
            }
        }
    }
    Ok(())
}

fn write_field(path: &Path, grid: &DiscGrid, values: &[f64]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "node_index,r,theta,u,v,value")?;
    for (p, &(u, v)) in grid.nodes().iter().enumerate() {
        writeln!(
            f,
            "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            p,
            grid.radius(p),
            grid.theta(p),
            u,
            v,
            values[p]
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyRow {
    pub n_r: usize,
    pub n_theta: usize,
    pub mesh_parameter: f64,
    pub total_torsion: f64,
    /// |T - T_reference| when the catalog knows the minimal total torsion
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion_error: Option<f64>,
    pub ricci_residual: f64,
    pub weingarten_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyReport {
    pub schema_version: u32,
    pub surface: String,
    pub rows: Vec<StudyRow>,
    /// log2 of successive error ratios against the analytic value (per gap)
    pub torsion_orders: Vec<f64>,
    pub ricci_orders: Vec<f64>,
}

/// Runs the scenario at each level and tabulates residuals and observed
/// convergence orders. Levels must at least double the resolution.
pub fn convergence_study(cfg: &ScenarioConfig, levels: &[(usize, usize)]) -> Result<StudyReport> {
    if levels.len() < 2 {
        return Err(Error::InvalidConfig(
            "convergence study needs at least two levels".to_string(),
        ));
    }
    let spec = cfg.surface_spec()?;
    let reference = spec.known_total_torsion;
    let mut rows = Vec::new();
    for &(n_r, n_theta) in levels {
        let grid = build_polar_grid(n_r, n_theta)?;
        let jet = sample_surface(&spec, &grid)?;
        let seeded = initial_frame(&spec, &jet, &grid)?;
        let frame = match &cfg.twist {
            Some(t) => {
                let angles = twist_angles(t, &grid);
                apply_rotation(&seeded, &plane_rotation_field(seeded.codim, &angles))
            }
            None => seeded,
        };
        let result = if cfg.route == RouteChoice::Neumann && spec.codim == 2 {
            coulomb_via_neumann(&frame, &grid)?
        } else {
            minimize_total_torsion(&frame, &grid, &cfg.descent_options())?
        };
        let curvature = curvature_from_torsion(&result.torsion, &jet.w, &grid);
        let l = second_fundamental(&jet, &result.frame);
        let ricci = curvature_from_ricci(&l, &jet);
        rows.push(StudyRow {
            n_r,
            n_theta,
            mesh_parameter: grid.mesh_parameter(),
            total_torsion: result.total_torsion,
            torsion_error: reference.map(|x| (result.total_torsion - x).abs()),
            ricci_residual: curvature.max_difference(&ricci),
            weingarten_residual: weingarten_residual(
                &jet,
                &result.frame,
                &result.torsion,
                &l,
                &grid,
            ),
        });
    }
    let orders = |errs: Vec<f64>| -> Vec<f64> {
        errs.windows(2)
            .map(|w| {
                if w[0].abs() < 1e-12 || w[1].abs() < 1e-12 {
                    f64::NAN
                } else {
                    (w[0] / w[1]).log2()
                }
            })
            .collect()
    };
    let torsion_errs: Vec<f64> = rows
        .iter()
        .map(|r| r.torsion_error.unwrap_or(f64::NAN))
        .collect();
    let ricci_errs: Vec<f64> = rows.iter().map(|r| r.ricci_residual).collect();
    Ok(StudyReport {
        schema_version: REPORT_SCHEMA_VERSION,
        surface: spec.name,
        rows,
        torsion_orders: orders(torsion_errs),
        ricci_orders: orders(ricci_errs),
    })
}

/// Parses "16x32,32x64" into resolution pairs.
pub fn parse_levels(text: &str) -> Result<Vec<(usize, usize)>> {
    text.split(',')
        .map(|part| {
            let (a, b) = part
                .trim()
                .split_once('x')
                .ok_or_else(|| Error::InvalidConfig(format!("bad level '{part}'")))?;
            let n_r = a
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad level '{part}'")))?;
            let n_theta = b
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad level '{part}'")))?;
            Ok((n_r, n_theta))
        })
        .collect()
}
