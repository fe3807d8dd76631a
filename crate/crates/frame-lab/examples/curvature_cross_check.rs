//! Normal curvature two ways: torsion route vs Ricci route.
//!
//! The curvature of the normal bundle can be computed either from derivatives
//! of the torsion coefficients (S = curl T - [T_1, T_2]) or purely
//! algebraically from the second fundamental form (the Ricci equation). The
//! two discretizations share nothing but the surface, so their agreement at
//! second order is a strong consistency check. At the origin of the
//! holomorphic graph the closed-form value is S_{1,12} = 2.
//!
//!     cargo run --example curvature_cross_check

use frame_lab::{
    build_polar_grid, curvature_from_ricci, curvature_from_torsion, initial_frame, sample_surface,
    second_fundamental, surface_catalog, torsion_of_frame, SurfaceParams,
};

fn main() -> frame_lab::Result<()> {
    for name in ["holomorphic_graph", "clifford_patch", "scaled_graph"] {
        let spec = surface_catalog(name, &SurfaceParams::default())?;
        println!("{name}:");
        let mut prev: Option<f64> = None;
        for (n_r, n_theta) in [(16, 32), (32, 64), (64, 128)] {
            let grid = build_polar_grid(n_r, n_theta)?;
            let jet = sample_surface(&spec, &grid)?;
            let frame = initial_frame(&spec, &jet, &grid)?;
            let torsion = torsion_of_frame(&frame, &grid);
            let s_torsion = curvature_from_torsion(&torsion, &jet.w, &grid);
            let l = second_fundamental(&jet, &frame);
            let s_ricci = curvature_from_ricci(&l, &jet);
            let diff = s_torsion.max_difference(&s_ricci);
            let order = prev
                .filter(|p| *p > 1e-12 && diff > 1e-12)
                .map(|p| format!("{:.2}", (p / diff).log2()))
                .unwrap_or_else(|| "   -".to_string());
            println!("  {n_r:>3}x{n_theta:<3}  max difference {diff:.4e}  order {order}");
            prev = Some(diff);
        }
    }

    // origin value of the graph, both routes
    let grid = build_polar_grid(64, 128)?;
    let spec = surface_catalog("holomorphic_graph", &SurfaceParams::default())?;
    let jet = sample_surface(&spec, &grid)?;
    let frame = initial_frame(&spec, &jet, &grid)?;
    let s = curvature_from_torsion(&torsion_of_frame(&frame, &grid), &jet.w, &grid);
    let r = curvature_from_ricci(&second_fundamental(&jet, &frame), &jet);
    println!(
        "\ngraph at origin: S_12 = {:.6} (torsion route), {:.6} (Ricci route), exact 2",
        s.s12[0][(0, 1)],
        r.s12[0][(0, 1)]
    );
    Ok(())
}
