//! Construction and verification of normal Coulomb frames for conformally
//! parametrized immersions of the unit disc into R^(n+2).
//!
//! The crate discretizes the disc on a polar grid ([`grid`]), samples
//! analytic surfaces with their normal frames and torsion/curvature tensors
//! ([`surface`]), and fixes the Coulomb gauge in the normal bundle either by
//! an exact Neumann solve (codimension 2) or by gradient descent over
//! SO(n)-valued rotation fields ([`gauge`]). The [`lab`] module wires these
//! into configurable scenarios with machine-readable reports; see the
//! `examples/` directory for one runnable program per capability.

pub mod error;
pub mod gauge;
pub mod grid;
pub mod lab;
pub mod surface;

pub use error::{Error, Result};
pub use gauge::{
    apply_rotation, apriori_report, coulomb_via_neumann, el_residual, exp_so,
    minimize_total_torsion, smooth_random_rotation_field, tau_potential, torsion_gradient,
    total_torsion, transform_torsion, AprioriReport, CoulombResult, DescentOptions,
    HistoryRecord, LieAlgebraField, RotationField, Route, TauPotential,
};
pub use grid::{build_polar_grid, DiscGrid, ScalarField};
pub use lab::{
    convergence_study, parse_levels, run_scenario, RouteChoice, RunReport, ScenarioConfig,
    StudyReport,
};
pub use surface::{
    curvature_from_ricci, curvature_from_torsion, initial_frame, sample_surface,
    second_fundamental, seed_normal_frame, surface_catalog, torsion_of_frame,
    weingarten_residual, NormalCurvatureField, NormalFrameField, SecondFundamentalField,
    SurfaceJet, SurfaceParams, SurfaceSpec, TorsionField,
};
