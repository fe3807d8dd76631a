//! The torsion stream function tau.
//!
//! In Coulomb gauge the torsion of a codimension-two immersion is a rotated
//! gradient: T_1 = tau_v, T_2 = -tau_u for a scalar potential tau vanishing
//! on the boundary and solving Delta tau = -S_12 (the normal curvature acts
//! as vorticity). For the holomorphic graph tau has the closed form
//! tau = (1/2) ln((1 + r^2)/2).
//!
//!     cargo run --example tau_potential

use frame_lab::{
    build_polar_grid, coulomb_via_neumann, curvature_from_torsion, initial_frame, sample_surface,
    surface_catalog, tau_potential, SurfaceParams,
};

fn main() -> frame_lab::Result<()> {
    let grid = build_polar_grid(64, 128)?;
    let spec = surface_catalog("holomorphic_graph", &SurfaceParams::default())?;
    let jet = sample_surface(&spec, &grid)?;
    let frame = initial_frame(&spec, &jet, &grid)?;
    let result = coulomb_via_neumann(&frame, &grid)?;
    let s = curvature_from_torsion(&result.torsion, &jet.w, &grid);

    let tp = tau_potential(&result.torsion, &s, &grid)?;
    println!("residuals of the reconstruction:");
    println!("  |grad tau - rotated torsion|  {:.3e}", tp.residual_gradient);
    println!("  |Delta tau + commutator - S|  {:.3e}", tp.residual_poisson);
    println!("  boundary value                {:.3e}", tp.residual_boundary);

    let mut max_err = 0.0f64;
    for (p, &(u, v)) in grid.nodes().iter().enumerate() {
        let r2 = u * u + v * v;
        let exact = 0.5 * ((1.0 + r2) / 2.0).ln();
        max_err = max_err.max((tp.tau[p][(0, 1)] - exact).abs());
    }
    println!("max error vs closed form tau = (1/2) ln((1+r^2)/2): {max_err:.3e}");
    Ok(())
}
