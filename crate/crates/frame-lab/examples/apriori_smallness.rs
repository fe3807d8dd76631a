//! The smallness condition behind pointwise torsion bounds.
//!
//! For codimension n >= 3 a Coulomb frame obeys pointwise torsion estimates
//! provided the quantity
//!
//!     lhs = (sqrt(n-2)/4) * ((n-2)/(2 pi) * T_min + gamma(n) * S_0)
//!
//! stays below 1, where T_min is the minimal total torsion, S_0 the sup of
//! the normal curvature and gamma(n) = min(sqrt(n(n-1)/2)/4, sqrt(2)). This
//! example evaluates the report for the embedded holomorphic graph (n = 3)
//! and for a codimension-two surface, where the condition is vacuous.
//!
//!     cargo run --release --example apriori_smallness

use frame_lab::{
    apriori_report, build_polar_grid, coulomb_via_neumann, curvature_from_torsion, initial_frame,
    minimize_total_torsion, sample_surface, surface_catalog, DescentOptions, SurfaceParams,
};

fn main() -> frame_lab::Result<()> {
    let grid = build_polar_grid(48, 96)?;

    let spec = surface_catalog("holomorphic_graph_embedded", &SurfaceParams::default())?;
    let jet = sample_surface(&spec, &grid)?;
    let frame = initial_frame(&spec, &jet, &grid)?;
    let opts = DescentOptions {
        max_iterations: 400,
        el_tolerance: 1e-3,
        ..DescentOptions::default()
    };
    let result = minimize_total_torsion(&frame, &grid, &opts)?;
    let s = curvature_from_torsion(&result.torsion, &jet.w, &grid);
    let report = apriori_report(&result, &s);
    println!("embedded holomorphic graph (n = {}):", report.n);
    println!("  minimal total torsion  {:.6}", report.total_torsion_min);
    println!("  S_0 = sup |S_12|       {:.6}", report.s0);
    println!("  gamma(n)               {:.6}", report.gamma);
    println!("  lhs                    {:.6}", report.lhs);
    println!("  condition met          {}", report.condition_met);
    println!("  sup |T_i|              {:.6}", report.sup_t);

    let spec = surface_catalog("holomorphic_graph", &SurfaceParams::default())?;
    let jet = sample_surface(&spec, &grid)?;
    let frame = initial_frame(&spec, &jet, &grid)?;
    let result = coulomb_via_neumann(&frame, &grid)?;
    let s = curvature_from_torsion(&result.torsion, &jet.w, &grid);
    let report = apriori_report(&result, &s);
    println!("\ncodimension two graph (n = {}):", report.n);
    println!(
        "  lhs = {:.6} (vacuous: the sqrt(n-2) prefactor vanishes)",
        report.lhs
    );
    Ok(())
}
