//! End-to-end acceptance criteria, one test per criterion. Each test prints
//! a single verdict line (visible with `cargo test -- --nocapture`).

use frame_lab::{
    apply_rotation, apriori_report, build_polar_grid, coulomb_via_neumann, curvature_from_ricci,
    curvature_from_torsion, el_residual, initial_frame, minimize_total_torsion, sample_surface,
    second_fundamental, smooth_random_rotation_field, surface_catalog, tau_potential,
    torsion_gradient, torsion_of_frame, total_torsion, DescentOptions, DiscGrid, LieAlgebraField,
    NormalFrameField, RotationField, SurfaceParams,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const T_GRAPH: f64 = 1.2135790737995349; // 2 pi (ln 2 - 1/2)

fn verdict(criterion: &str, pass: bool) {
    println!(
        "acceptance {criterion}: {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion failed: {criterion}");
}

fn surface_frame(name: &str, n_r: usize, n_theta: usize) -> (DiscGrid, frame_lab::SurfaceJet, NormalFrameField) {
    let grid = build_polar_grid(n_r, n_theta).unwrap();
    let spec = surface_catalog(name, &SurfaceParams::default()).unwrap();
    let jet = sample_surface(&spec, &grid).unwrap();
    let frame = initial_frame(&spec, &jet, &grid).unwrap();
    (grid, jet, frame)
}

fn twisted_plane(grid: &DiscGrid, phi: impl Fn(f64, f64) -> f64) -> NormalFrameField {
    let spec = surface_catalog("plane", &SurfaceParams::default()).unwrap();
    let jet = sample_surface(&spec, grid).unwrap();
    let flat = initial_frame(&spec, &jet, grid).unwrap();
    let rotations = grid
        .nodes()
        .iter()
        .map(|&(u, v)| {
            let x = phi(u, v);
            DMatrix::from_row_slice(2, 2, &[x.cos(), x.sin(), -x.sin(), x.cos()])
        })
        .collect();
    apply_rotation(&flat, &RotationField { codim: 2, rotations })
}

/// Criterion 1: on the twisted plane both gauge-fixing routes remove the
/// torsion and agree node-wise.
#[test]
fn c01_two_routes_agree_on_twisted_plane() {
    let grid = build_polar_grid(64, 128).unwrap();
    let frame = twisted_plane(&grid, |u, _| u);
    let t_init = total_torsion(&torsion_of_frame(&frame, &grid), &grid);
    let neumann = coulomb_via_neumann(&frame, &grid).unwrap();
    let opts = DescentOptions {
        el_tolerance: 1e-5,
        max_iterations: 150,
        ..DescentOptions::default()
    };
    let descent = minimize_total_torsion(&frame, &grid, &opts).unwrap();
    let diff = neumann.torsion.max_difference(&descent.torsion);
    let pass = (t_init - 2.0 * PI).abs() <= 0.01 * 2.0 * PI
        && neumann.total_torsion <= 1e-3
        && descent.total_torsion <= 1e-3
        && diff <= 5e-3;
    println!(
        "  T_init {t_init:.6}, neumann {:.3e}, descent {:.3e}, route diff {diff:.3e}",
        neumann.total_torsion, descent.total_torsion
    );
    verdict("01 two-route agreement (twisted plane)", pass);
}

/// Criterion 2: the holomorphic graph seed frame is already Coulomb; its
/// torsion matches the closed form and the total torsion converges to
/// 2 pi (ln 2 - 1/2).
#[test]
fn c02_graph_torsion_oracle() {
    let (grid, _, frame) = surface_frame("holomorphic_graph", 64, 128);
    let torsion = torsion_of_frame(&frame, &grid);
    let mut oracle_err = 0.0f64;
    for (p, &(u, v)) in grid.nodes().iter().enumerate() {
        let w = 1.0 + u * u + v * v;
        oracle_err = oracle_err
            .max((torsion.t1[p][(0, 1)] - v / w).abs())
            .max((torsion.t2[p][(0, 1)] + u / w).abs());
    }
    let (el_i, el_b) = el_residual(&torsion, &grid);
    let tt = total_torsion(&torsion, &grid);
    // the divergence of this torsion field is a discrete structural zero
    // (first angular harmonic per ring), hence the round-off-level floor
    let pass = oracle_err <= 1e-10
        && el_i <= 1e-10
        && el_b <= 1e-10
        && (tt - T_GRAPH).abs() <= 0.01 * T_GRAPH;
    println!("  oracle err {oracle_err:.3e}, EL ({el_i:.3e}, {el_b:.3e}), T {tt:.8}");
    verdict("02 graph torsion closed form", pass);
}

/// Criterion 3: curvature from torsion derivatives agrees with curvature from
/// the Ricci identity at second order, with the exact origin value on the
/// graph.
#[test]
fn c03_curvature_cross_check() {
    let mut pass = true;
    for name in ["holomorphic_graph", "clifford_patch", "scaled_graph"] {
        let mut errs = Vec::new();
        for (n_r, n_theta) in [(16, 32), (32, 64), (64, 128)] {
            let (grid, jet, frame) = surface_frame(name, n_r, n_theta);
            let s_t = curvature_from_torsion(&torsion_of_frame(&frame, &grid), &jet.w, &grid);
            let s_r = curvature_from_ricci(&second_fundamental(&jet, &frame), &jet);
            errs.push(s_t.max_difference(&s_r));
        }
        for w in errs.windows(2) {
            if w[0] > 1e-12 && w[1] > 1e-12 {
                let order = (w[0] / w[1]).log2();
                pass &= order >= 1.8;
                println!("  {name}: {:.3e} -> {:.3e}, order {order:.2}", w[0], w[1]);
            } else {
                // flat-bundle surfaces difference to round-off at every level
                pass &= w[1] <= 1e-10;
                println!("  {name}: residual at round-off ({:.3e})", w[1]);
            }
        }
    }
    let (grid, jet, frame) = surface_frame("holomorphic_graph", 64, 128);
    let s = curvature_from_torsion(&torsion_of_frame(&frame, &grid), &jet.w, &grid);
    let origin = s.s12[grid.center()][(0, 1)];
    pass &= (origin - 2.0).abs() <= 1e-2;
    println!("  graph S_12 at origin: {origin:.6} (exact 2)");
    verdict("03 curvature two-route cross-check", pass);
}

/// Criterion 4: normal curvature transforms covariantly (conjugation) and its
/// length invariantly under random smooth rotations of the frame.
#[test]
fn c04_rotation_covariance() {
    let mut pass = true;
    for name in ["holomorphic_graph", "holomorphic_graph_embedded"] {
        let (grid, jet, frame) = surface_frame(name, 32, 64);
        let h = grid.mesh_parameter();
        let s = curvature_from_torsion(&torsion_of_frame(&frame, &grid), &jet.w, &grid);
        let mut worst = 0.0f64;
        for seed in 0..5u64 {
            let rot = smooth_random_rotation_field(frame.codim, &grid, seed, 0.7);
            let rotated = apply_rotation(&frame, &rot);
            let s2 = curvature_from_torsion(&torsion_of_frame(&rotated, &grid), &jet.w, &grid);
            for p in 0..grid.n_nodes() {
                let conj = &rot.rotations[p] * &s.s12[p] * rot.rotations[p].transpose();
                worst = worst
                    .max((&s2.s12[p] - conj).abs().max())
                    .max((s2.length[p] - s.length[p]).abs());
            }
        }
        pass &= worst <= 10.0 * h * h;
        println!("  {name}: worst covariance defect {worst:.3e} (bound {:.3e})", 10.0 * h * h);
    }
    verdict("04 rotation covariance of curvature", pass);
}

/// Criterion 5: the Clifford patch admits a flat normal bundle; descent from
/// a twisted start drives the total torsion to (near) zero.
#[test]
fn c05_clifford_flat_minimum() {
    let grid = build_polar_grid(32, 64).unwrap();
    let spec = surface_catalog("clifford_patch", &SurfaceParams::default()).unwrap();
    let jet = sample_surface(&spec, &grid).unwrap();
    let seeded = initial_frame(&spec, &jet, &grid).unwrap();
    let rotations = grid
        .nodes()
        .iter()
        .map(|&(u, v)| {
            let x = 0.8 * (1.0 - u * u - v * v) + 0.3 * u;
            DMatrix::from_row_slice(2, 2, &[x.cos(), x.sin(), -x.sin(), x.cos()])
        })
        .collect();
    let frame = apply_rotation(&seeded, &RotationField { codim: 2, rotations });
    let opts = DescentOptions {
        el_tolerance: 1e-4,
        max_iterations: 300,
        ..DescentOptions::default()
    };
    let res = minimize_total_torsion(&frame, &grid, &opts).unwrap();
    let max_t = res.torsion.max_abs_entry();
    let pass = res.total_torsion <= 1e-6 && max_t <= 1e-3;
    println!(
        "  T {:.3e}, max |T| {max_t:.3e}, {} iterations, converged {}",
        res.total_torsion, res.iterations, res.converged
    );
    verdict("05 clifford flat-bundle minimum", pass);
}

/// Criterion 6: codimension-three descent from a random start converges to
/// the known minimum with monotone history and small residuals.
#[test]
fn c06_codim3_descent_converges() {
    let (grid, _, frame) = surface_frame("holomorphic_graph_embedded", 64, 128);
    let opts = DescentOptions {
        max_iterations: 500,
        el_tolerance: 1e-3,
        init_seed: Some(42),
        init_amplitude: 0.5,
        ..DescentOptions::default()
    };
    let res = minimize_total_torsion(&frame, &grid, &opts).unwrap();
    let monotone = res
        .history
        .windows(2)
        .all(|w| w[1].total_torsion <= w[0].total_torsion + 1e-12);
    let rel = (res.total_torsion - T_GRAPH).abs() / T_GRAPH;
    let pass = res.converged
        && monotone
        && res.el_interior <= 1e-3
        && res.el_boundary <= 1e-3
        && rel <= 0.02;
    println!(
        "  T {:.8} (rel err {rel:.2e}), EL ({:.3e}, {:.3e}), {} iterations, monotone {monotone}",
        res.total_torsion, res.el_interior, res.el_boundary, res.iterations
    );
    verdict("06 codimension-3 descent", pass);
}

/// Criterion 7: the analytic torsion gradient matches forward finite
/// differences of the functional along random directions.
#[test]
fn c07_gradient_matches_finite_differences() {
    let grid = build_polar_grid(32, 64).unwrap();
    let frame = twisted_plane(&grid, |u, v| 2.0 * u * u + 0.8 * v);
    let base = total_torsion(&torsion_of_frame(&frame, &grid), &grid);
    let grad = torsion_gradient(&frame, &grid);
    let gnorm = grad.norm(&grid);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let eps = 1e-5;
    let mut worst = 0.0f64;
    let mut accepted = 0;
    let mut draws = 0;
    while accepted < 10 && draws < 100 {
        draws += 1;
        let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-0.08..0.08)).collect();
        let mats: Vec<DMatrix<f64>> = grid
            .nodes()
            .iter()
            .map(|&(u, v)| {
                let x = c[0]
                    + c[1] * u
                    + c[2] * v
                    + c[3] * u * v
                    + c[4] * (u + 0.3 * v).exp()
                    + c[5] * (1.3 * u - 0.7 * v).sin();
                DMatrix::from_row_slice(2, 2, &[0.0, -x, x, 0.0])
            })
            .collect();
        let a = LieAlgebraField { codim: 2, mats };
        let predicted = grad.inner(&a, &grid);
        // directions nearly orthogonal to the gradient make a relative
        // comparison ill-posed (the finite-difference bias dominates); redraw
        if predicted.abs() < 0.05 * gnorm * a.norm(&grid) {
            continue;
        }
        accepted += 1;
        let perturbed = apply_rotation(&frame, &RotationField::exp(&a.scale(eps)));
        let observed = (total_torsion(&torsion_of_frame(&perturbed, &grid), &grid) - base) / eps;
        worst = worst.max((observed - predicted).abs() / predicted.abs());
    }
    let pass = accepted == 10 && worst <= 1e-4;
    println!("  worst relative error over {accepted} directions: {worst:.3e}");
    verdict("07 gradient vs finite differences", pass);
}

/// Criterion 8: the Coulomb torsion of the graph is the rotated gradient of a
/// stream potential with closed form (1/2) ln((1+r^2)/2), vanishing on the
/// boundary by construction.
#[test]
fn c08_tau_potential_oracle() {
    let (grid, jet, frame) = surface_frame("holomorphic_graph", 64, 128);
    let res = coulomb_via_neumann(&frame, &grid).unwrap();
    let s = curvature_from_torsion(&res.torsion, &jet.w, &grid);
    let tp = tau_potential(&res.torsion, &s, &grid).unwrap();
    let h2 = grid.mesh_parameter().powi(2);
    let mut oracle_err = 0.0f64;
    for (p, &(u, v)) in grid.nodes().iter().enumerate() {
        let exact = 0.5 * ((1.0 + u * u + v * v) / 2.0).ln();
        oracle_err = oracle_err.max((tp.tau[p][(0, 1)] - exact).abs());
    }
    let pass = tp.residual_boundary == 0.0
        && tp.residual_gradient <= 10.0 * h2
        && tp.residual_poisson <= 10.0 * h2
        && oracle_err <= 10.0 * h2;
    println!(
        "  oracle err {oracle_err:.3e}, residuals grad {:.3e} / poisson {:.3e} / boundary {:.1e}",
        tp.residual_gradient, tp.residual_poisson, tp.residual_boundary
    );
    verdict("08 tau potential closed form", pass);
}

/// Criterion 9: the smallness report reproduces the reference values: exactly
/// zero for codimension two, 0.3544 for the embedded graph (condition met).
#[test]
fn c09_apriori_report_values() {
    let (grid, jet, frame) = surface_frame("holomorphic_graph", 48, 96);
    let res = coulomb_via_neumann(&frame, &grid).unwrap();
    let s = curvature_from_torsion(&res.torsion, &jet.w, &grid);
    let rep2 = apriori_report(&res, &s);

    let (grid, jet, frame) = surface_frame("holomorphic_graph_embedded", 48, 96);
    let opts = DescentOptions {
        max_iterations: 400,
        el_tolerance: 1e-3,
        ..DescentOptions::default()
    };
    let res = minimize_total_torsion(&frame, &grid, &opts).unwrap();
    let s = curvature_from_torsion(&res.torsion, &jet.w, &grid);
    let rep3 = apriori_report(&res, &s);

    let gamma3 = 3.0f64.sqrt() / 4.0;
    let pass = rep2.lhs == 0.0
        && (rep3.gamma - gamma3).abs() <= 1e-12
        && (rep3.lhs - 0.35440).abs() <= 0.05 * 0.35440
        && rep3.condition_met;
    println!(
        "  n=2 lhs {:.1e}; n=3 gamma {:.6}, S_0 {:.5}, lhs {:.5}, met {}",
        rep2.lhs, rep3.gamma, rep3.s0, rep3.lhs, rep3.condition_met
    );
    verdict("09 smallness report", pass);
}

/// Criterion 10: the underlying machinery (Cartesian partials, Dirichlet and
/// Neumann Poisson solves) converges at second order on manufactured
/// solutions.
#[test]
fn c10_solver_convergence_orders() {
    let levels = [(16usize, 32usize), (32, 64), (64, 128)];
    let mut pass = true;

    let mut errs = Vec::new();
    for &(n_r, n_theta) in &levels {
        let grid = build_polar_grid(n_r, n_theta).unwrap();
        let f: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&(u, v)| (1.3 * u + 0.7 * v).sin() * (0.3 * u).exp())
            .collect();
        let (du, dv) = grid.cartesian_partials(&f);
        let mut e = 0.0f64;
        for (p, &(u, v)) in grid.nodes().iter().enumerate() {
            let ex = (0.3 * u).exp();
            let s = (1.3 * u + 0.7 * v).sin();
            let c = (1.3 * u + 0.7 * v).cos();
            e = e.max((du[p] - ex * (1.3 * c + 0.3 * s)).abs());
            e = e.max((dv[p] - ex * 0.7 * c).abs());
        }
        errs.push(e);
    }
    let order_partials = (errs[0] / errs[2]).log2() / 2.0;
    pass &= order_partials >= 1.9;
    println!("  partials order {order_partials:.2} ({:.3e} -> {:.3e})", errs[0], errs[2]);

    let mut errs = Vec::new();
    for &(n_r, n_theta) in &levels {
        let grid = build_polar_grid(n_r, n_theta).unwrap();
        // phi = (1 - r^2) e^u, Delta phi = e^u (1 - r^2 - 4u - 4)
        let rhs: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&(u, v)| u.exp() * (1.0 - u * u - v * v - 4.0 * u - 4.0))
            .collect();
        let phi = grid.solve_poisson_dirichlet(&rhs).unwrap();
        let e = grid
            .nodes()
            .iter()
            .zip(&phi)
            .map(|(&(u, v), &x)| (x - (1.0 - u * u - v * v) * u.exp()).abs())
            .fold(0.0, f64::max);
        errs.push(e);
    }
    let order_dirichlet = (errs[0] / errs[2]).log2() / 2.0;
    pass &= order_dirichlet >= 1.9;
    println!("  dirichlet order {order_dirichlet:.2} ({:.3e} -> {:.3e})", errs[0], errs[2]);

    let mut errs = Vec::new();
    for &(n_r, n_theta) in &levels {
        let grid = build_polar_grid(n_r, n_theta).unwrap();
        // phi = e^u sin v is harmonic; flux g = e^u (u sin v + v cos v) on r = 1
        let f = vec![0.0; grid.n_nodes()];
        let g: Vec<f64> = grid
            .boundary_nodes()
            .iter()
            .map(|&p| {
                let (u, v) = grid.node(p);
                u.exp() * (u * v.sin() + v * v.cos())
            })
            .collect();
        let phi = grid.solve_poisson_neumann(&f, &g).unwrap();
        let exact: Vec<f64> = grid.nodes().iter().map(|&(u, v)| u.exp() * v.sin()).collect();
        let mean = grid.integrate_disc(&exact) / PI;
        let e = exact
            .iter()
            .zip(&phi)
            .map(|(ex, x)| (x - (ex - mean)).abs())
            .fold(0.0, f64::max);
        errs.push(e);
    }
    let order_neumann = (errs[0] / errs[2]).log2() / 2.0;
    pass &= order_neumann >= 1.9;
    println!("  neumann order {order_neumann:.2} ({:.3e} -> {:.3e})", errs[0], errs[2]);

    verdict("10 solver convergence orders", pass);
}
