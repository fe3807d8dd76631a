//! Surface jets on the disc, normal frames, torsion coefficients and the
//! normal curvature tensor.
//!
//! Everything here is codimension-generic: a surface X: B -> R^(n+2) carries
//! an n-dimensional normal space per node, spanned by an oriented orthonormal
//! frame (N_1, ..., N_n). The torsion coefficients are the connection
//! coefficients T_{s,i}^t = <dN_s/du^i, N_t> of that bundle; their curl plus
//! commutator is the normal curvature tensor, which can be cross-checked
//! algebraically through the second fundamental form.

pub mod catalog;


use crate::error::{Error, Result};
use crate::grid::{apply_stencil_matrix, DiscGrid, ScalarField};
use nalgebra::{DMatrix, DVector, Matrix2};

pub use catalog::{surface_catalog, FrameInit, SurfaceParams, SurfaceSpec};

/// Position and first/second partials of the immersion at one node.
#[derive(Debug, Clone)]
pub struct PointJet {
    pub x: DVector<f64>,
    pub x_u: DVector<f64>,
    pub x_v: DVector<f64>,
    pub x_uu: DVector<f64>,
    pub x_uv: DVector<f64>,
    pub x_vv: DVector<f64>,
}

/// Per-node jets of a conformally parametrized surface.
#[derive(Debug, Clone)]
pub struct SurfaceJet {
    /// codimension n
    pub codim: usize,
    /// ambient dimension n + 2
    pub ambient: usize,
    pub jets: Vec<PointJet>,
    /// conformal factor W = g11 = g22 per node
    pub w: ScalarField,
    pub conformality_residual: f64,
}

/// Orthonormal oriented basis of the normal space, one (n+2) x n matrix of
/// column vectors per node.
#[derive(Debug, Clone)]
pub struct NormalFrameField {
    pub codim: usize,
    pub ambient: usize,
    pub frames: Vec<DMatrix<f64>>,
}

/// Skew torsion coefficient matrices (T_1, T_2) per node.
#[derive(Debug, Clone)]
pub struct TorsionField {
    pub codim: usize,
    pub t1: Vec<DMatrix<f64>>,
    pub t2: Vec<DMatrix<f64>>,
}

/// Second fundamental form coefficients L_s = (<N_s, X_{u^i u^j}>)_{ij},
/// one symmetric 2x2 matrix per normal direction per node.
#[derive(Debug, Clone)]
pub struct SecondFundamentalField {
    pub codim: usize,
    pub l: Vec<Vec<Matrix2<f64>>>,
}

/// Normal curvature tensor S_12 per node together with its Frobenius length
/// and the components of the normal curvature vector.
#[derive(Debug, Clone)]
pub struct NormalCurvatureField {
    pub codim: usize,
    pub s12: Vec<DMatrix<f64>>,
    /// |S_12| (Frobenius) per node
    pub length: ScalarField,
    /// 2 S_{s,12}^t / W for s < t, per node
    pub vector_components: Vec<Vec<f64>>,
}

const CONFORMALITY_LIMIT: f64 = 1e-6;
const SEED_PIVOT_LIMIT: f64 = 1e-6;

/// Evaluates the analytic jets of `spec` at every node and validates
/// conformality.
pub fn sample_surface(spec: &SurfaceSpec, grid: &DiscGrid) -> Result<SurfaceJet> {
    let mut jets = Vec::with_capacity(grid.n_nodes());
    let mut w = Vec::with_capacity(grid.n_nodes());
    let mut residual = 0.0f64;
    for &(u, v) in grid.nodes() {
        let jet = spec.jet(u, v);
        let g11 = jet.x_u.dot(&jet.x_u);
        let g22 = jet.x_v.dot(&jet.x_v);
        let g12 = jet.x_u.dot(&jet.x_v);
        let wp = 0.5 * (g11 + g22);
        residual = residual.max(((g11 - g22).abs().max(g12.abs())) / wp);
        w.push(wp);
        jets.push(jet);
    }
    if residual > CONFORMALITY_LIMIT {
        return Err(Error::NotConformal {
            residual,
            limit: CONFORMALITY_LIMIT,
        });
    }
    Ok(SurfaceJet {
        codim: spec.codim,
        ambient: spec.ambient,
        jets,
        w,
        conformality_residual: residual,
    })
}

/// Builds a normal frame by projecting constant seed vectors onto the normal
/// space and Gram-Schmidt orthonormalizing in seed order (no pivoting, so the
/// result is as smooth as the surface). The orientation
/// det(X_u, X_v, N_1, ..., N_n) > 0 is enforced by flipping N_n only.
pub fn seed_normal_frame(
    jet: &SurfaceJet,
    seeds: &[DVector<f64>],
    grid: &DiscGrid,
) -> Result<NormalFrameField> {
    assert_eq!(seeds.len(), jet.codim, "need one seed per codimension");
    let n = jet.codim;
    let mut frames = Vec::with_capacity(jet.jets.len());
    for (p, pj) in jet.jets.iter().enumerate() {
        let e1 = pj.x_u.normalize();
        let mut e2 = &pj.x_v - pj.x_v.dot(&e1) * &e1;
        e2.normalize_mut();
        let mut frame = DMatrix::zeros(jet.ambient, n);
        for (s, seed) in seeds.iter().enumerate() {
            let mut y = seed - seed.dot(&e1) * &e1 - seed.dot(&e2) * &e2;
            for t in 0..s {
                let prev = frame.column(t);
                let coeff = y.dot(&prev.into_owned());
                y -= coeff * frame.column(t).into_owned();
            }
            let pivot = y.norm();
            if pivot < SEED_PIVOT_LIMIT {
                let (u, v) = grid.node(p);
                return Err(Error::SeedPivotBreakdown {
                    node: p,
                    u,
                    v,
                    pivot,
                    limit: SEED_PIVOT_LIMIT,
                });
            }
            frame.set_column(s, &(y / pivot));
        }
        fix_orientation(pj, &mut frame);
        frames.push(frame);
    }
    Ok(NormalFrameField {
        codim: n,
        ambient: jet.ambient,
        frames,
    })
}

/// Builds the initial frame for a catalog surface: seeds where provided,
/// otherwise the closed-form frame shipped with the surface.
pub fn initial_frame(spec: &SurfaceSpec, jet: &SurfaceJet, grid: &DiscGrid) -> Result<NormalFrameField> {
    match &spec.frame_init {
        FrameInit::Seeds(seeds) => seed_normal_frame(jet, seeds, grid),
        FrameInit::Analytic(f) => {
            let mut frames = Vec::with_capacity(grid.n_nodes());
            for (p, &(u, v)) in grid.nodes().iter().enumerate() {
                let mut frame = f(u, v);
                fix_orientation(&jet.jets[p], &mut frame);
                frames.push(frame);
            }
            Ok(NormalFrameField {
                codim: jet.codim,
                ambient: jet.ambient,
                frames,
            })
        }
    }
}

fn fix_orientation(pj: &PointJet, frame: &mut DMatrix<f64>) {
    let dim = pj.x_u.len();
    let n = frame.ncols();
    let mut full = DMatrix::zeros(dim, dim);
    full.set_column(0, &pj.x_u);
    full.set_column(1, &pj.x_v);
    for s in 0..n {
        full.set_column(2 + s, &frame.column(s).into_owned());
    }
    if full.determinant() < 0.0 {
        let flipped = -frame.column(n - 1);
        frame.set_column(n - 1, &flipped);
    }
}

impl NormalFrameField {
    /// Largest deviation from orthonormality max |<N_s,N_t> - delta| over
    /// all nodes.
    pub fn orthonormality_residual(&self) -> f64 {
        let eye = DMatrix::identity(self.codim, self.codim);
        self.frames
            .iter()
            .map(|f| (f.transpose() * f - &eye).abs().max())
            .fold(0.0, f64::max)
    }

    /// Largest |<N_s, X_{u^i}>| over all nodes and indices.
    pub fn tangency_residual(&self, jet: &SurfaceJet) -> f64 {
        self.frames
            .iter()
            .zip(&jet.jets)
            .map(|(f, pj)| {
                let a = (f.transpose() * &pj.x_u).abs().max();
                let b = (f.transpose() * &pj.x_v).abs().max();
                a.max(b)
            })
            .fold(0.0, f64::max)
    }

    /// Smallest orientation determinant det(X_u, X_v, N_1, ..., N_n).
    pub fn min_orientation_det(&self, jet: &SurfaceJet) -> f64 {
        self.frames
            .iter()
            .zip(&jet.jets)
            .map(|(f, pj)| {
                let dim = self.ambient;
                let mut full = DMatrix::zeros(dim, dim);
                full.set_column(0, &pj.x_u);
                full.set_column(1, &pj.x_v);
                for s in 0..self.codim {
                    full.set_column(2 + s, &f.column(s).into_owned());
                }
                full.determinant()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Torsion coefficients of a frame by finite differences,
/// T_{s,i}^t = <dN_s/du^i, N_t>, antisymmetrized in s <-> t so skew-symmetry
/// holds exactly in floating point.
pub fn torsion_of_frame(frame: &NormalFrameField, grid: &DiscGrid) -> TorsionField {
    let du = apply_stencil_matrix(grid.d_u(), &frame.frames);
    let dv = apply_stencil_matrix(grid.d_v(), &frame.frames);
    let t1 = torsion_from_derivative(&frame.frames, &du);
    let t2 = torsion_from_derivative(&frame.frames, &dv);
    TorsionField {
        codim: frame.codim,
        t1,
        t2,
    }
}

fn torsion_from_derivative(frames: &[DMatrix<f64>], d: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
    frames
        .iter()
        .zip(d)
        .map(|(n, dn)| {
            let raw = dn.transpose() * n; // raw[s][t] = <dN_s, N_t>
            0.5 * (&raw - raw.transpose())
        })
        .collect()
}

/// Coefficients of the second fundamental form L_{s,ij} = <N_s, X_{u^i u^j}>.
pub fn second_fundamental(jet: &SurfaceJet, frame: &NormalFrameField) -> SecondFundamentalField {
    let l = jet
        .jets
        .iter()
        .zip(&frame.frames)
        .map(|(pj, f)| {
            (0..frame.codim)
                .map(|s| {
                    let ns = f.column(s);
                    let luu = ns.dot(&pj.x_uu);
                    let luv = ns.dot(&pj.x_uv);
                    let lvv = ns.dot(&pj.x_vv);
                    Matrix2::new(luu, luv, luv, lvv)
                })
                .collect()
        })
        .collect();
    SecondFundamentalField {
        codim: frame.codim,
        l,
    }
}

/// Normal curvature tensor from the torsion field:
/// S_12 = d(T_1)/dv - d(T_2)/du + (T_1 T_2 - T_2 T_1).
pub fn curvature_from_torsion(
    t: &TorsionField,
    w: &[f64],
    grid: &DiscGrid,
) -> NormalCurvatureField {
    let dv_t1 = apply_stencil_matrix(grid.d_v(), &t.t1);
    let du_t2 = apply_stencil_matrix(grid.d_u(), &t.t2);
    let s12: Vec<DMatrix<f64>> = (0..grid.n_nodes())
        .map(|p| &dv_t1[p] - &du_t2[p] + &t.t1[p] * &t.t2[p] - &t.t2[p] * &t.t1[p])
        .collect();
    NormalCurvatureField::new(t.codim, s12, w)
}

/// Normal curvature tensor from the Ricci integrability conditions:
/// S_{s,12}^t = sum_k (L_{s,1k} L_{t,2k} - L_{s,2k} L_{t,1k}) / W.
/// Purely algebraic; no differentiation enters.
pub fn curvature_from_ricci(
    l: &SecondFundamentalField,
    jet: &SurfaceJet,
) -> NormalCurvatureField {
    let n = l.codim;
    let s12: Vec<DMatrix<f64>> = l
        .l
        .iter()
        .zip(&jet.w)
        .map(|(lp, &wp)| {
            DMatrix::from_fn(n, n, |s, t| {
                let mut acc = 0.0;
                for k in 0..2 {
                    acc += lp[s][(0, k)] * lp[t][(1, k)] - lp[s][(1, k)] * lp[t][(0, k)];
                }
                acc / wp
            })
        })
        .collect();
    NormalCurvatureField::new(n, s12, &jet.w)
}

impl NormalCurvatureField {
    fn new(codim: usize, s12: Vec<DMatrix<f64>>, w: &[f64]) -> Self {
        let length = s12.iter().map(|m| m.norm()).collect();
        let vector_components = s12
            .iter()
            .zip(w)
            .map(|(m, &wp)| {
                let mut comps = Vec::with_capacity(codim * (codim - 1) / 2);
                for s in 0..codim {
                    for t in (s + 1)..codim {
                        comps.push(2.0 * m[(s, t)] / wp);
                    }
                }
                comps
            })
            .collect();
        Self {
            codim,
            s12,
            length,
            vector_components,
        }
    }

    /// Squared length of the normal curvature vector per node.
    pub fn vector_length_squared(&self) -> ScalarField {
        self.vector_components
            .iter()
            .map(|c| c.iter().map(|x| x * x).sum::<f64>())
            .collect()
    }

    pub fn max_length(&self) -> f64 {
        self.length.iter().copied().fold(0.0, f64::max)
    }

    /// Max node-wise Frobenius difference to another curvature field.
    pub fn max_difference(&self, other: &NormalCurvatureField) -> f64 {
        self.s12
            .iter()
            .zip(&other.s12)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl TorsionField {
    pub fn zero(codim: usize, grid: &DiscGrid) -> Self {
        let z = vec![DMatrix::zeros(codim, codim); grid.n_nodes()];
        Self {
            codim,
            t1: z.clone(),
            t2: z,
        }
    }

    /// sup over nodes and i of |T_i| (Frobenius).
    pub fn sup_norm(&self) -> f64 {
        self.t1
            .iter()
            .chain(&self.t2)
            .map(|m| m.norm())
            .fold(0.0, f64::max)
    }

    /// Largest single coefficient |T_{s,i}^t|.
    pub fn max_abs_entry(&self) -> f64 {
        self.t1
            .iter()
            .chain(&self.t2)
            .map(|m| m.abs().max())
            .fold(0.0, f64::max)
    }

    /// Max node-wise entry difference to another torsion field.
    pub fn max_difference(&self, other: &TorsionField) -> f64 {
        let d1 = self
            .t1
            .iter()
            .zip(&other.t1)
            .map(|(a, b)| (a - b).abs().max())
            .fold(0.0, f64::max);
        let d2 = self
            .t2
            .iter()
            .zip(&other.t2)
            .map(|(a, b)| (a - b).abs().max())
            .fold(0.0, f64::max);
        d1.max(d2)
    }
}

/// Max-norm defect of the Weingarten equations
/// dN_s/du^i + sum_j L_{s,ij} g^{jk} X_{u^k} - sum_t T_{s,i}^t N_t = 0,
/// with the frame derivative taken by finite differences.
pub fn weingarten_residual(
    jet: &SurfaceJet,
    frame: &NormalFrameField,
    t: &TorsionField,
    l: &SecondFundamentalField,
    grid: &DiscGrid,
) -> f64 {
    let du = apply_stencil_matrix(grid.d_u(), &frame.frames);
    let dv = apply_stencil_matrix(grid.d_v(), &frame.frames);
    let mut worst = 0.0f64;
    for p in 0..grid.n_nodes() {
        let pj = &jet.jets[p];
        let wp = jet.w[p];
        let f = &frame.frames[p];
        for (i, (dn, ti)) in [(&du[p], &t.t1[p]), (&dv[p], &t.t2[p])].iter().enumerate() {
            for s in 0..frame.codim {
                let mut res = dn.column(s).into_owned();
                // + L_{s,ij} g^{jk} X_{u^k} with g^{jk} = delta_{jk} / W
                res += l.l[p][s][(i, 0)] / wp * &pj.x_u + l.l[p][s][(i, 1)] / wp * &pj.x_v;
                // - T_{s,i}^t N_t
                for tt in 0..frame.codim {
                    res -= ti[(s, tt)] * f.column(tt).into_owned();
                }
                worst = worst.max(res.norm());
            }
        }
    }
    worst
}
