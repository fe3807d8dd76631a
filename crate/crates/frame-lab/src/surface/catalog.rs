//! Analytic surface catalog.
//!
//! Each entry supplies closed-form jets, a valid frame initialization (seed
//! vectors, or an analytic frame where constant seeds degenerate), and, where
//! known, the minimal total torsion for use in convergence studies.

use crate::error::{Error, Result};
use crate::surface::PointJet;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Numeric parameters accepted by catalog entries; unknown entries ignore
/// the fields they do not use.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SurfaceParams {
    /// codimension for the plane (>= 1)
    pub codim: Option<usize>,
    /// frequency of the Clifford patch (> 0)
    pub a: Option<f64>,
    /// height scale of the scaled graph
    pub lambda: Option<f64>,
}

impl Default for SurfaceParams {
    fn default() -> Self {
        Self {
            codim: None,
            a: None,
            lambda: None,
        }
    }
}

/// How the initial normal frame is produced.
#[derive(Clone)]
pub enum FrameInit {
    /// Constant seed vectors, projected and orthonormalized per node.
    Seeds(Vec<DVector<f64>>),
    /// Closed-form frame (columns N_1..N_n) evaluated per node.
    Analytic(Arc<dyn Fn(f64, f64) -> DMatrix<f64> + Send + Sync>),
}

impl fmt::Debug for FrameInit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameInit::Seeds(s) => write!(f, "Seeds({} vectors)", s.len()),
            FrameInit::Analytic(_) => write!(f, "Analytic"),
        }
    }
}

/// An analytic surface description: closed-form jets plus frame seeds.
#[derive(Clone)]
pub struct SurfaceSpec {
    pub name: String,
    pub ambient: usize,
    pub codim: usize,
    pub frame_init: FrameInit,
    /// Minimal total torsion over the gauge orbit, where known in closed
    /// form (used as the reference value of convergence studies).
    pub known_total_torsion: Option<f64>,
    jet_fn: Arc<dyn Fn(f64, f64) -> PointJet + Send + Sync>,
}

impl fmt::Debug for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceSpec")
            .field("name", &self.name)
            .field("ambient", &self.ambient)
            .field("codim", &self.codim)
            .field("frame_init", &self.frame_init)
            .finish()
    }
}

impl SurfaceSpec {
    /// A surface outside the catalog, from a user-supplied jet closure.
    pub fn custom(
        name: impl Into<String>,
        ambient: usize,
        codim: usize,
        frame_init: FrameInit,
        jet_fn: Arc<dyn Fn(f64, f64) -> PointJet + Send + Sync>,
    ) -> Self {
        Self {
            name: name.into(),
            ambient,
            codim,
            frame_init,
            known_total_torsion: None,
            jet_fn,
        }
    }

    pub fn jet(&self, u: f64, v: f64) -> PointJet {
        (self.jet_fn)(u, v)
    }
}

pub const CATALOG_NAMES: &[&str] = &[
    "plane",
    "holomorphic_graph",
    "holomorphic_graph_embedded",
    "clifford_patch",
    "scaled_graph",
];

/// Looks up a catalog surface by name.
pub fn surface_catalog(name: &str, params: &SurfaceParams) -> Result<SurfaceSpec> {
    match name {
        "plane" => plane(params.codim.unwrap_or(2)),
        "holomorphic_graph" => Ok(holomorphic_graph(false)),
        "holomorphic_graph_embedded" => Ok(holomorphic_graph(true)),
        "clifford_patch" => clifford_patch(params.a.unwrap_or(1.0)),
        "scaled_graph" => Ok(scaled_graph(params.lambda.unwrap_or(1.0))),
        _ => Err(Error::UnknownSurface {
            name: name.to_string(),
            available: CATALOG_NAMES.join(", "),
        }),
    }
}

fn basis(dim: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(dim);
    e[i] = 1.0;
    e
}

/// The flat plane (u, v, 0, ..., 0) in R^(n+2).
fn plane(codim: usize) -> Result<SurfaceSpec> {
    if codim < 1 {
        return Err(Error::InvalidConfig(
            "plane requires codim >= 1".to_string(),
        ));
    }
    let dim = codim + 2;
    let jet_fn = Arc::new(move |u: f64, v: f64| {
        let mut x = DVector::zeros(dim);
        x[0] = u;
        x[1] = v;
        PointJet {
            x,
            x_u: basis(dim, 0),
            x_v: basis(dim, 1),
            x_uu: DVector::zeros(dim),
            x_uv: DVector::zeros(dim),
            x_vv: DVector::zeros(dim),
        }
    });
    let seeds = (2..dim).map(|i| basis(dim, i)).collect();
    Ok(SurfaceSpec {
        name: "plane".to_string(),
        ambient: dim,
        codim,
        frame_init: FrameInit::Seeds(seeds),
        known_total_torsion: Some(0.0),
        jet_fn,
    })
}

/// The holomorphic graph (u, v, (u^2 - v^2)/2, uv), conformal with
/// W = 1 + u^2 + v^2; optionally embedded in R^5 with a trivial extra
/// normal direction (codimension 3).
fn holomorphic_graph(embedded: bool) -> SurfaceSpec {
    let dim = if embedded { 5 } else { 4 };
    let jet_fn = Arc::new(move |u: f64, v: f64| {
        let mut x = DVector::zeros(dim);
        x[0] = u;
        x[1] = v;
        x[2] = 0.5 * (u * u - v * v);
        x[3] = u * v;
        let mut x_u = DVector::zeros(dim);
        x_u[0] = 1.0;
        x_u[2] = u;
        x_u[3] = v;
        let mut x_v = DVector::zeros(dim);
        x_v[1] = 1.0;
        x_v[2] = -v;
        x_v[3] = u;
        let mut x_uu = DVector::zeros(dim);
        x_uu[2] = 1.0;
        let mut x_uv = DVector::zeros(dim);
        x_uv[3] = 1.0;
        let mut x_vv = DVector::zeros(dim);
        x_vv[2] = -1.0;
        PointJet {
            x,
            x_u,
            x_v,
            x_uu,
            x_uv,
            x_vv,
        }
    });
    let seeds = (2..dim).map(|i| basis(dim, i)).collect();
    SurfaceSpec {
        name: if embedded {
            "holomorphic_graph_embedded".to_string()
        } else {
            "holomorphic_graph".to_string()
        },
        ambient: dim,
        codim: dim - 2,
        frame_init: FrameInit::Seeds(seeds),
        // integral of 2 r^2 / (1 + r^2)^2 over the disc
        known_total_torsion: Some(2.0 * PI * (std::f64::consts::LN_2 - 0.5)),
        jet_fn,
    }
}

/// Clifford-torus patch (cos au, sin au, cos av, sin av) / (a sqrt 2);
/// conformal with W = 1/2 for any a > 0, flat normal bundle, and an analytic
/// parallel frame (constant seeds degenerate on this surface).
fn clifford_patch(a: f64) -> Result<SurfaceSpec> {
    if !(a > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "clifford_patch requires a > 0, got {a}"
        )));
    }
    let s2 = 2.0f64.sqrt();
    let jet_fn = Arc::new(move |u: f64, v: f64| {
        let (cu, su) = ((a * u).cos(), (a * u).sin());
        let (cv, sv) = ((a * v).cos(), (a * v).sin());
        let x = DVector::from_vec(vec![cu, su, cv, sv]) / (a * s2);
        let x_u = DVector::from_vec(vec![-su, cu, 0.0, 0.0]) / s2;
        let x_v = DVector::from_vec(vec![0.0, 0.0, -sv, cv]) / s2;
        let x_uu = DVector::from_vec(vec![-cu, -su, 0.0, 0.0]) * (a / s2);
        let x_uv = DVector::zeros(4);
        let x_vv = DVector::from_vec(vec![0.0, 0.0, -cv, -sv]) * (a / s2);
        PointJet {
            x,
            x_u,
            x_v,
            x_uu,
            x_uv,
            x_vv,
        }
    });
    let frame = Arc::new(move |u: f64, v: f64| {
        let (cu, su) = ((a * u).cos(), (a * u).sin());
        let (cv, sv) = ((a * v).cos(), (a * v).sin());
        DMatrix::from_columns(&[
            DVector::from_vec(vec![cu, su, -cv, -sv]) / s2,
            DVector::from_vec(vec![cu, su, cv, sv]) / s2,
        ])
    });
    Ok(SurfaceSpec {
        name: "clifford_patch".to_string(),
        ambient: 4,
        codim: 2,
        frame_init: FrameInit::Analytic(frame),
        known_total_torsion: Some(0.0),
        jet_fn,
    })
}

/// The scaled graph (u, v, l(u^2 - v^2)/2, l uv); conformal for every l with
/// W = 1 + l^2 (u^2 + v^2). Varying l sweeps the normal curvature scale.
fn scaled_graph(lambda: f64) -> SurfaceSpec {
    let dim = 4;
    let l = lambda;
    let jet_fn = Arc::new(move |u: f64, v: f64| {
        let mut x = DVector::zeros(dim);
        x[0] = u;
        x[1] = v;
        x[2] = 0.5 * l * (u * u - v * v);
        x[3] = l * u * v;
        let mut x_u = DVector::zeros(dim);
        x_u[0] = 1.0;
        x_u[2] = l * u;
        x_u[3] = l * v;
        let mut x_v = DVector::zeros(dim);
        x_v[1] = 1.0;
        x_v[2] = -l * v;
        x_v[3] = l * u;
        let mut x_uu = DVector::zeros(dim);
        x_uu[2] = l;
        let mut x_uv = DVector::zeros(dim);
        x_uv[3] = l;
        let mut x_vv = DVector::zeros(dim);
        x_vv[2] = -l;
        PointJet {
            x,
            x_u,
            x_v,
            x_uu,
            x_uv,
            x_vv,
        }
    });
    let seeds = (2..dim).map(|i| basis(dim, i)).collect();
    SurfaceSpec {
        name: "scaled_graph".to_string(),
        ambient: dim,
        codim: 2,
        frame_init: FrameInit::Seeds(seeds),
        known_total_torsion: None,
        jet_fn,
    }
}
