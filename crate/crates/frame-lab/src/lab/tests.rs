use super::*;
use std::sync::Mutex;

/// Guards FRAME_LAB_OUT: the override test mutates process environment, which
/// would redirect concurrently running scenario tests.
static ENV_LOCK: Mutex<()> = Mutex::new(());

fn plane_toml(route: &str, extra: &str) -> String {
    format!(
        r#"
route = "{route}"
{extra}

[surface]
name = "plane"

[grid]
n_r = 16
n_theta = 32
"#
    )
}

#[test]
fn config_parses_with_defaults() {
    let cfg = ScenarioConfig::from_toml(&plane_toml("neumann", "")).unwrap();
    assert_eq!(cfg.route, RouteChoice::Neumann);
    assert!(cfg.checks.is_empty());
    assert!(cfg.twist.is_none());
    assert_eq!(cfg.descent.max_iterations, 200);
    assert_eq!(cfg.seed, 0);
    assert_eq!(cfg.tolerances.el, 1e-3);
}

#[test]
fn config_rejects_unknown_check() {
    let err = ScenarioConfig::from_toml(&plane_toml("neumann", r#"checks = ["bogus"]"#))
        .unwrap_err()
        .to_string();
    assert!(err.contains("unknown check 'bogus'"), "{err}");
}

#[test]
fn config_rejects_unknown_key() {
    let err = ScenarioConfig::from_toml(&plane_toml("neumann", "mystery = 3"))
        .unwrap_err()
        .to_string();
    assert!(err.contains("mystery"), "{err}");
}

#[test]
fn neumann_route_needs_codimension_two() {
    let text = r#"
route = "neumann"

[surface]
name = "holomorphic_graph_embedded"

[grid]
n_r = 16
n_theta = 32
"#;
    let err = ScenarioConfig::from_toml(text).unwrap_err().to_string();
    assert!(err.contains("codimension 2"), "{err}");
    // descent is fine for codimension 3
    let text = text.replace("\"neumann\"", "\"descent\"");
    ScenarioConfig::from_toml(&text).unwrap();
}

#[test]
fn twist_fields_evaluate() {
    let grid = build_polar_grid(8, 16).unwrap();
    let lin = twist_angles(&TwistConfig::Linear { a: 2.0, b: -1.0 }, &grid);
    let p = grid.n_nodes() - 1; // a boundary node
    let (u, v) = grid.nodes()[p];
    assert!((lin[p] - (2.0 * u - v)).abs() < 1e-15);
    let bump = twist_angles(&TwistConfig::RadialBump { a: 3.0 }, &grid);
    assert!((bump[0] - 3.0).abs() < 1e-15); // center, r = 0
    assert!(bump[p].abs() < 1e-13); // boundary, r = 1
}

#[test]
fn plane_rotation_field_matches_so2() {
    let grid = build_polar_grid(8, 16).unwrap();
    let angles = twist_angles(&TwistConfig::Linear { a: 1.0, b: 0.0 }, &grid);
    let r = plane_rotation_field(2, &angles);
    for (p, m) in r.rotations.iter().enumerate().step_by(17) {
        let (u, _) = grid.nodes()[p];
        assert!((m[(0, 0)] - u.cos()).abs() < 1e-14);
        assert!((m[(1, 0)] - u.sin()).abs() < 1e-14);
    }
    // codimension 3: rotation confined to the leading 2x2 block
    let r3 = plane_rotation_field(3, &angles);
    let m = &r3.rotations[grid.n_nodes() / 2];
    assert!((m[(2, 2)] - 1.0).abs() < 1e-14);
    assert!(m[(0, 2)].abs() < 1e-14 && m[(2, 1)].abs() < 1e-14);
}

#[test]
fn parse_levels_roundtrip() {
    assert_eq!(
        parse_levels("16x32, 32x64,64x128").unwrap(),
        vec![(16, 32), (32, 64), (64, 128)]
    );
    assert!(parse_levels("16-32").is_err());
    assert!(parse_levels("ax32").is_err());
}

#[test]
fn run_scenario_writes_reports_and_fields() {
    let _guard = ENV_LOCK.lock().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let extra = format!(
        r#"checks = ["ricci", "weingarten", "tau", "invariance", "apriori"]
output_dir = "{}"

[twist]
kind = "linear"
a = 1.0
b = 0.0
"#,
        dir.path().display()
    );
    let cfg = ScenarioConfig::from_toml(&plane_toml("both", &extra)).unwrap();
    let report = run_scenario(&cfg).unwrap();

    assert!((report.total_torsion_initial - 2.0 * std::f64::consts::PI).abs() < 0.05);
    assert!(report.routes["neumann"].total_torsion < 1e-4);
    assert!(report.routes["descent"].total_torsion < 1e-4);
    assert!(report.route_agreement.unwrap() < 0.05);
    assert!(report.all_checks_passed, "checks: {:?}", report.checks);
    assert!(report.apriori.is_some());
    // n = 2: the smallness lhs vanishes identically
    assert_eq!(report.apriori.unwrap().lhs, 0.0);

    let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(parsed["schema_version"], 1);
    assert_eq!(parsed["config"]["surface"]["name"], "plane");
    let hist = std::fs::read_to_string(dir.path().join("history.csv")).unwrap();
    assert!(hist.starts_with("iteration,total_torsion,el_interior,el_boundary"));
    assert!(hist.lines().count() >= 2);
    for name in ["w.csv", "curvature_length.csv", "torsion_t1_12.csv"] {
        let text = std::fs::read_to_string(dir.path().join("fields").join(name)).unwrap();
        assert!(text.starts_with("node_index,r,theta,u,v,value"));
        assert_eq!(text.lines().count(), 1 + 1 + 16 * 32); // header + nodes
    }
}

#[test]
fn run_scenario_is_deterministic() {
    let _guard = ENV_LOCK.lock().unwrap();
    let run = |dir: &std::path::Path| {
        let extra = format!(
            r#"checks = ["invariance"]
seed = 7
output_dir = "{}"

[descent]
random_init = true
max_iterations = 5
"#,
            dir.display()
        );
        let cfg = ScenarioConfig::from_toml(&plane_toml("descent", &extra)).unwrap();
        run_scenario(&cfg).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.join("report.json")).unwrap(),
        )
        .unwrap();
        // wall time is the only field allowed to differ
        v.as_object_mut().unwrap().remove("wall_time_seconds");
        let obj = v.as_object_mut().unwrap();
        obj.get_mut("config")
            .and_then(|c| c.as_object_mut())
            .map(|c| c.remove("output_dir"));
        (v, std::fs::read_to_string(dir.join("history.csv")).unwrap())
    };
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let (r1, h1) = run(d1.path());
    let (r2, h2) = run(d2.path());
    assert_eq!(r1, r2);
    assert_eq!(h1, h2);
}

#[test]
fn output_dir_env_override_wins() {
    let _guard = ENV_LOCK.lock().unwrap();
    let cfg = ScenarioConfig::from_toml(&plane_toml(
        "neumann",
        r#"output_dir = "configured""#,
    ))
    .unwrap();
    assert_eq!(cfg.resolved_output_dir(), PathBuf::from("configured"));
    std::env::set_var(OUTPUT_DIR_ENV, "/tmp/override");
    assert_eq!(cfg.resolved_output_dir(), PathBuf::from("/tmp/override"));
    std::env::remove_var(OUTPUT_DIR_ENV);
}

#[test]
fn convergence_study_graph_orders() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        r#"
route = "neumann"
output_dir = "{}"

[surface]
name = "holomorphic_graph"

[grid]
n_r = 16
n_theta = 32
"#,
        dir.path().display()
    );
    let cfg = ScenarioConfig::from_toml(&text).unwrap();
    let study = convergence_study(&cfg, &[(8, 16), (16, 32), (32, 64)]).unwrap();
    assert_eq!(study.rows.len(), 3);
    assert_eq!(study.torsion_orders.len(), 2);
    // total torsion converges at second order to the closed-form value
    for order in &study.torsion_orders {
        assert!(*order > 1.6, "orders: {:?}", study.torsion_orders);
    }
    let exact = 2.0 * std::f64::consts::PI * (2.0f64.ln() - 0.5);
    assert!(study.rows[2].torsion_error.unwrap() < 1e-3 * exact);
}

#[test]
fn convergence_study_needs_two_levels() {
    let cfg = ScenarioConfig::from_toml(&plane_toml("neumann", "")).unwrap();
    assert!(convergence_study(&cfg, &[(8, 16)]).is_err());
}
