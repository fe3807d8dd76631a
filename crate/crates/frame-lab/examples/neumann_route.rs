//! One-shot Coulomb gauge for codimension two via a Neumann problem.
//!
//! In codimension two the rotation freedom is a single angle field and the
//! Coulomb condition becomes a linear Neumann problem for it: one Poisson
//! solve replaces the whole descent loop. The holomorphic graph
//! (u, v, Re(w^2)/sqrt(2), Im(w^2)/sqrt(2)) has closed-form Coulomb torsion
//! T_1 = v/(1+r^2), T_2 = -u/(1+r^2) and minimal total torsion
//! 2 pi (ln 2 - 1/2); we verify both.
//!
//!     cargo run --example neumann_route

use frame_lab::{
    build_polar_grid, coulomb_via_neumann, initial_frame, sample_surface, surface_catalog,
    SurfaceParams,
};
use std::f64::consts::PI;

fn main() -> frame_lab::Result<()> {
    let grid = build_polar_grid(64, 128)?;
    let spec = surface_catalog("holomorphic_graph", &SurfaceParams::default())?;
    let jet = sample_surface(&spec, &grid)?;
    let frame = initial_frame(&spec, &jet, &grid)?;

    let result = coulomb_via_neumann(&frame, &grid)?;
    let exact = 2.0 * PI * (2.0f64.ln() - 0.5);
    println!("total torsion: {:.8}", result.total_torsion);
    println!("closed form:   {exact:.8}");
    println!(
        "relative error: {:.3e}",
        (result.total_torsion - exact).abs() / exact
    );

    let mut max_err = 0.0f64;
    for (p, &(u, v)) in grid.nodes().iter().enumerate() {
        let w = 1.0 + u * u + v * v;
        let e1 = (result.torsion.t1[p][(0, 1)] - v / w).abs();
        let e2 = (result.torsion.t2[p][(0, 1)] + u / w).abs();
        max_err = max_err.max(e1.max(e2));
    }
    println!("max node-wise torsion error vs closed form: {max_err:.3e}");
    println!(
        "divergence residual: interior {:.3e}, boundary flux {:.3e}",
        result.el_interior, result.el_boundary
    );
    Ok(())
}
