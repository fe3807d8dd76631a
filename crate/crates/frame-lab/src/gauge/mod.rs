//! Coulomb-gauge machinery for normal frames.
//!
//! A rotation field R: B -> SO(n) acts on a normal frame by N_s = sum_t
//! R_s^t N~_t and shifts the torsion by T_i = (d_i R) R^T + R T~_i R^T. The
//! total torsion 𝒯 = ∫∫ (|T_1|^2 + |T_2|^2) is minimized over this orbit:
//! exactly through one scalar Neumann solve when n = 2, and by descent over
//! SO(n)-valued fields in general. A tau-potential reconstruction and the
//! a-priori smallness report close the verification chain.


use crate::error::{Error, Result};
use crate::grid::{apply_stencil_matrix, DiscGrid, ScalarField};
use crate::surface::{NormalCurvatureField, NormalFrameField, TorsionField};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// SO(n)-valued field over the grid nodes.
#[derive(Debug, Clone)]
pub struct RotationField {
    pub codim: usize,
    pub rotations: Vec<DMatrix<f64>>,
}

/// so(n)-valued field (skew matrices): variations and descent directions.
#[derive(Debug, Clone)]
pub struct LieAlgebraField {
    pub codim: usize,
    pub mats: Vec<DMatrix<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Neumann,
    Descent,
}

/// One accepted descent step (or the state at entry for iteration 0).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HistoryRecord {
    pub iteration: usize,
    pub total_torsion: f64,
    pub el_interior: f64,
    pub el_boundary: f64,
    pub gradient_norm: f64,
    pub step: f64,
}

/// Outcome of a gauge-fixing run.
#[derive(Debug, Clone)]
pub struct CoulombResult {
    pub frame: NormalFrameField,
    /// cumulative rotation relative to the input frame
    pub rotation: RotationField,
    pub torsion: TorsionField,
    pub total_torsion: f64,
    pub el_interior: f64,
    pub el_boundary: f64,
    pub iterations: usize,
    pub route: Route,
    pub converged: bool,
    pub history: Vec<HistoryRecord>,
}

/// Skew potential with grad tau = (-T_2, T_1), zero on the boundary.
#[derive(Debug, Clone)]
pub struct TauPotential {
    pub tau: Vec<DMatrix<f64>>,
    /// max |(tau_u + T_2, tau_v - T_1)| over nodes and entries
    pub residual_gradient: f64,
    /// max |tau| on the boundary ring (zero by construction)
    pub residual_boundary: f64,
    /// max |Δtau + (tau_u tau_v - tau_v tau_u) - S_12| at interior nodes
    pub residual_poisson: f64,
}

/// Smallness-condition report: lhs = (sqrt(n-2)/4)((n-2)/(2 pi) 𝒯 + γ(n) S_0).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AprioriReport {
    pub n: usize,
    pub total_torsion_min: f64,
    /// sup |S_12| (Frobenius) over nodes
    pub s0: f64,
    pub gamma: f64,
    pub lhs: f64,
    pub condition_met: bool,
    /// max_i sup |T_i| (Frobenius), reported alongside; the pointwise bound
    /// constant itself comes from prior work and is not computed here
    pub sup_t: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct DescentOptions {
    pub max_iterations: usize,
    /// initial trial step of each line search (1.0 = full preconditioned step)
    pub initial_step: f64,
    /// Armijo slope factor in (0, 1)
    pub armijo_slope: f64,
    /// backtracking shrink factor in (0, 1)
    pub step_shrink: f64,
    /// stop when both EL residuals fall below this
    pub el_tolerance: f64,
    /// stop when the relative decrease of 𝒯 falls below this
    pub decrease_tolerance: f64,
    /// start from a seeded smooth random rotation instead of the identity
    pub init_seed: Option<u64>,
    /// amplitude of the random initialization (radians at the center)
    pub init_amplitude: f64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            initial_step: 1.0,
            armijo_slope: 1e-4,
            step_shrink: 0.5,
            el_tolerance: 1e-3,
            decrease_tolerance: 1e-11,
            init_seed: None,
            init_amplitude: 0.5,
        }
    }
}

impl RotationField {
    pub fn identity(codim: usize, grid: &DiscGrid) -> Self {
        Self {
            codim,
            rotations: vec![DMatrix::identity(codim, codim); grid.n_nodes()],
        }
    }

    pub fn constant(r: DMatrix<f64>, grid: &DiscGrid) -> Self {
        Self {
            codim: r.nrows(),
            rotations: vec![r; grid.n_nodes()],
        }
    }

    /// SO(2) field from a nodal angle field, R = [[cos, sin], [-sin, cos]].
    pub fn so2_from_angle(phi: &[f64]) -> Self {
        let rotations = phi
            .iter()
            .map(|&a| {
                let (s, c) = a.sin_cos();
                DMatrix::from_row_slice(2, 2, &[c, s, -s, c])
            })
            .collect();
        Self {
            codim: 2,
            rotations,
        }
    }

    /// Node-wise exponential of a Lie-algebra field.
    pub fn exp(a: &LieAlgebraField) -> Self {
        Self {
            codim: a.codim,
            rotations: a.mats.iter().map(exp_so).collect(),
        }
    }

    /// max |R Rᵀ - I| over nodes (entrywise).
    pub fn orthogonality_residual(&self) -> f64 {
        let eye = DMatrix::identity(self.codim, self.codim);
        self.rotations
            .iter()
            .map(|r| (r * r.transpose() - &eye).abs().max())
            .fold(0.0, f64::max)
    }

    pub fn min_det(&self) -> f64 {
        self.rotations
            .iter()
            .map(|r| r.clone().lu().determinant())
            .fold(f64::INFINITY, f64::min)
    }

    /// self ∘ other node-wise (apply `other` first).
    pub fn compose(&self, other: &RotationField) -> Self {
        let rotations = self
            .rotations
            .iter()
            .zip(&other.rotations)
            .map(|(a, b)| a * b)
            .collect();
        Self {
            codim: self.codim,
            rotations,
        }
    }
}

impl LieAlgebraField {
    pub fn zero(codim: usize, grid: &DiscGrid) -> Self {
        Self {
            codim,
            mats: vec![DMatrix::zeros(codim, codim); grid.n_nodes()],
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            codim: self.codim,
            mats: self.mats.iter().map(|m| m * s).collect(),
        }
    }

    /// Cell-weighted inner product sum_p w_p <A_p, B_p>_F.
    pub fn inner(&self, other: &LieAlgebraField, grid: &DiscGrid) -> f64 {
        let w = grid.cell_weights();
        self.mats
            .iter()
            .zip(&other.mats)
            .zip(w)
            .map(|((a, b), &wp)| wp * a.dot(b))
            .sum()
    }

    pub fn norm(&self, grid: &DiscGrid) -> f64 {
        self.inner(self, grid).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.mats.iter().map(|m| m.abs().max()).fold(0.0, f64::max)
    }
}

/// Matrix exponential of a skew matrix; closed forms for n <= 3, scaling and
/// squaring with a [6/6] Padé approximant above.
pub fn exp_so(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    debug_assert!((a + a.transpose()).abs().max() < 1e-12, "input not skew");
    match n {
        0 | 1 => DMatrix::identity(n, n),
        2 => {
            let t = a[(1, 0)];
            let (s, c) = t.sin_cos();
            DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
        }
        3 => {
            // Rodrigues with series fallback near zero angle
            let (x, y, z) = (a[(2, 1)], a[(0, 2)], a[(1, 0)]);
            let t = (x * x + y * y + z * z).sqrt();
            let (c1, c2) = if t < 1e-4 {
                (1.0 - t * t / 6.0, 0.5 - t * t / 24.0)
            } else {
                (t.sin() / t, (1.0 - t.cos()) / (t * t))
            };
            let eye = DMatrix::identity(3, 3);
            eye + c1 * a + c2 * (a * a)
        }
        _ => exp_pade(a),
    }
}

fn exp_pade(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.abs().max() * n as f64;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let b = a / 2f64.powi(squarings as i32);

    // [6/6] Padé: p(x) = sum c_k x^k, exp ≈ p(B) p(-B)^{-1}
    let mut c = [0.0f64; 7];
    c[0] = 1.0;
    for k in 0..6 {
        c[k + 1] = c[k] * (6 - k) as f64 / ((12 - k) * (k + 1)) as f64;
    }
    let eye = DMatrix::identity(n, n);
    let mut pow = eye.clone();
    let mut p = &eye * c[0];
    let mut q = &eye * c[0];
    for (k, &ck) in c.iter().enumerate().skip(1) {
        pow = &pow * &b;
        p += ck * &pow;
        if k % 2 == 0 {
            q += ck * &pow;
        } else {
            q -= ck * &pow;
        }
    }
    let mut r = q.lu().solve(&p).expect("Padé denominator is invertible");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// Rotates a frame node-wise: N_s = sum_t R_s^t N~_t (columns mix by Rᵀ).
pub fn apply_rotation(frame: &NormalFrameField, r: &RotationField) -> NormalFrameField {
    assert_eq!(frame.codim, r.codim, "dimension mismatch");
    let frames = frame
        .frames
        .iter()
        .zip(&r.rotations)
        .map(|(f, rp)| f * rp.transpose())
        .collect();
    NormalFrameField {
        codim: frame.codim,
        ambient: frame.ambient,
        frames,
    }
}

/// Transforms a torsion field by a rotation field:
/// T_i = skew((d_i R) Rᵀ) + R T~_i Rᵀ.
pub fn transform_torsion(t: &TorsionField, r: &RotationField, grid: &DiscGrid) -> TorsionField {
    assert_eq!(t.codim, r.codim, "dimension mismatch");
    let du = apply_stencil_matrix(grid.d_u(), &r.rotations);
    let dv = apply_stencil_matrix(grid.d_v(), &r.rotations);
    let one = |d: &[DMatrix<f64>], ti: &[DMatrix<f64>]| -> Vec<DMatrix<f64>> {
        (0..grid.n_nodes())
            .map(|p| {
                let rp = &r.rotations[p];
                let raw = &d[p] * rp.transpose();
                0.5 * (&raw - raw.transpose()) + rp * &ti[p] * rp.transpose()
            })
            .collect()
    };
    TorsionField {
        codim: t.codim,
        t1: one(&du, &t.t1),
        t2: one(&dv, &t.t2),
    }
}

/// 𝒯 = ∫∫ (|T_1|^2 + |T_2|^2) du dv (Frobenius norms; the ordered-pair sum
/// of the coefficients, i.e. twice the sum over s < t).
pub fn total_torsion(t: &TorsionField, grid: &DiscGrid) -> f64 {
    let integrand: ScalarField = t
        .t1
        .iter()
        .zip(&t.t2)
        .map(|(a, b)| a.norm_squared() + b.norm_squared())
        .collect();
    grid.integrate_disc(&integrand)
}

/// Euler-Lagrange residuals of the Coulomb system: max |d_u T_1 + d_v T_2|
/// over non-boundary nodes and max |nu_1 T_1 + nu_2 T_2| over the boundary
/// ring (entrywise max over all index pairs).
pub fn el_residual(t: &TorsionField, grid: &DiscGrid) -> (f64, f64) {
    let du_t1 = apply_stencil_matrix(grid.d_u(), &t.t1);
    let dv_t2 = apply_stencil_matrix(grid.d_v(), &t.t2);
    let mut interior = 0.0f64;
    for p in 0..grid.n_nodes() {
        if !grid.is_boundary(p) {
            interior = interior.max((&du_t1[p] + &dv_t2[p]).abs().max());
        }
    }
    let mut boundary = 0.0f64;
    for (i, &p) in grid.boundary_nodes().iter().enumerate() {
        let (nu1, nu2) = grid.boundary_normals()[i];
        boundary = boundary.max((nu1 * &t.t1[p] + nu2 * &t.t2[p]).abs().max());
    }
    (interior, boundary)
}

/// Discrete gradient of 𝒯 with respect to node-wise so(n) perturbations
/// N -> exp(eps A) N, represented against the cell-weighted inner product:
/// d/d eps 𝒯 = sum_p w_cell(p) <G_p, A_p>_F exactly (up to round-off).
///
/// This is the exact transpose of the discrete chain
/// frame -> torsion -> quadrature, which is why it takes the frame rather
/// than the torsion: the inter-node frame products enter the adjoint. On
/// smooth fields it is -2 div(T_1, T_2) + boundary flux terms up to O(h^2).
pub fn torsion_gradient(frame: &NormalFrameField, grid: &DiscGrid) -> LieAlgebraField {
    let n = frame.codim;
    let wq = grid.quad_weights();
    let wc = grid.cell_weights();
    let mut gamma = vec![DMatrix::zeros(n, n); grid.n_nodes()];

    for (op, _) in [(grid.d_u(), 0), (grid.d_v(), 1)] {
        let d = apply_stencil_matrix(op, &frame.frames);
        // raw_p = (D F)_pᵀ F_p; T_p = skew(raw_p)
        let raw: Vec<DMatrix<f64>> = d
            .iter()
            .zip(&frame.frames)
            .map(|(dp, fp)| dp.transpose() * fp)
            .collect();
        let t: Vec<DMatrix<f64>> = raw.iter().map(|r| 0.5 * (r - r.transpose())).collect();
        for p in 0..grid.n_nodes() {
            let tp_t = t[p].transpose();
            // coupling term: Gamma_q += 2 w_p d_pq (F_qᵀ F_p) T_pᵀ
            for (q, a) in op.row(p) {
                let c_pq = frame.frames[q].transpose() * &frame.frames[p];
                gamma[q] += 2.0 * wq[p] * a * c_pq * &tp_t;
            }
            // diagonal term: Gamma_p -= 2 w_p T_pᵀ raw_p
            gamma[p] -= 2.0 * wq[p] * &tp_t * &raw[p];
        }
    }

    let mats = gamma
        .iter()
        .zip(wc)
        .map(|(g, &w)| {
            let gt = g.transpose();
            (0.5 / w) * (&gt - gt.transpose())
        })
        .collect();
    LieAlgebraField { codim: n, mats }
}

/// Exact Coulomb gauge for codimension 2 through one scalar Neumann solve:
/// Delta phi = -div(t~_1, t~_2), d phi/d nu = -<t~, nu>, then rotation by the
/// angle phi. The load is assembled in weak form (through the derivative
/// transposes), so the divergence-theorem compatibility holds exactly.
pub fn coulomb_via_neumann(
    frame: &NormalFrameField,
    grid: &DiscGrid,
) -> Result<CoulombResult> {
    if frame.codim != 2 {
        return Err(Error::NeumannRequiresCodimTwo(frame.codim));
    }
    let t0 = torsion_of_frame_local(frame, grid);
    let t1s: ScalarField = t0.t1.iter().map(|m| m[(0, 1)]).collect();
    let t2s: ScalarField = t0.t2.iter().map(|m| m[(0, 1)]).collect();
    // Delta phi = -div(t~_1, t~_2) in B, d phi/d nu = -t~ . nu on the boundary
    let (du, _) = grid.cartesian_partials(&t1s);
    let (_, dv) = grid.cartesian_partials(&t2s);
    let mut f: ScalarField = du.iter().zip(&dv).map(|(a, b)| -(a + b)).collect();
    let g: Vec<f64> = grid
        .boundary_nodes()
        .iter()
        .zip(grid.boundary_normals())
        .map(|(&p, &(nu1, nu2))| -(t1s[p] * nu1 + t2s[p] * nu2))
        .collect();
    // The continuous data are compatible by the divergence theorem; the
    // discrete defect is pure truncation error. Absorb it as a constant shift
    // of f so the singular system stays consistent to round-off.
    let defect = grid.integrate_disc(&f) - grid.integrate_boundary(&g);
    for x in f.iter_mut() {
        *x -= defect / std::f64::consts::PI;
    }
    let phi = grid.solve_poisson_neumann(&f, &g)?;

    let rotation = RotationField::so2_from_angle(&phi);
    let rotated = apply_rotation(frame, &rotation);
    let torsion = torsion_of_frame_local(&rotated, grid);
    let tt = total_torsion(&torsion, grid);
    let (el_i, el_b) = el_residual(&torsion, grid);
    Ok(CoulombResult {
        frame: rotated,
        rotation,
        torsion,
        total_torsion: tt,
        el_interior: el_i,
        el_boundary: el_b,
        iterations: 1,
        route: Route::Neumann,
        converged: true,
        history: Vec::new(),
    })
}

/// Smooth random rotation field: a random constant so(n) element modulated by
/// the radial bump (1 - r^2), scaled so the largest angle is `amplitude`.
pub fn smooth_random_rotation_field(
    codim: usize,
    grid: &DiscGrid,
    seed: u64,
    amplitude: f64,
) -> RotationField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a0 = DMatrix::zeros(codim, codim);
    for s in 0..codim {
        for t in (s + 1)..codim {
            let x: f64 = rng.gen_range(-1.0..1.0);
            a0[(s, t)] = x;
            a0[(t, s)] = -x;
        }
    }
    let peak = a0.abs().max().max(1e-30);
    a0 *= amplitude / peak;
    let mats = grid
        .nodes()
        .iter()
        .map(|&(u, v)| {
            let bump = 1.0 - (u * u + v * v);
            &a0 * bump
        })
        .collect();
    RotationField::exp(&LieAlgebraField { codim, mats })
}

/// Gauge descent: left-multiplicative updates R <- exp(s P) R with an
/// H^1-preconditioned direction (entrywise Neumann solves of the gradient)
/// and Armijo backtracking on 𝒯. The 𝒯 sequence over accepted steps is
/// nonincreasing by construction.
pub fn minimize_total_torsion(
    frame: &NormalFrameField,
    grid: &DiscGrid,
    opts: &DescentOptions,
) -> Result<CoulombResult> {
    assert!(opts.armijo_slope > 0.0 && opts.armijo_slope < 1.0);
    assert!(opts.step_shrink > 0.0 && opts.step_shrink < 1.0);
    let n = frame.codim;

    let mut rotation = match opts.init_seed {
        Some(seed) => smooth_random_rotation_field(n, grid, seed, opts.init_amplitude),
        None => RotationField::identity(n, grid),
    };
    let mut current = apply_rotation(frame, &rotation);

    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    let mut torsion = torsion_of_frame_local(&current, grid);
    let mut energy = total_torsion(&torsion, grid);
    let (mut el_i, mut el_b) = el_residual(&torsion, grid);

    for iter in 0..opts.max_iterations {
        let grad = torsion_gradient(&current, grid);
        let grad_norm = grad.norm(grid);
        history.push(HistoryRecord {
            iteration: iter,
            total_torsion: energy,
            el_interior: el_i,
            el_boundary: el_b,
            gradient_norm: grad_norm,
            step: 0.0,
        });
        if el_i <= opts.el_tolerance && el_b <= opts.el_tolerance {
            converged = true;
            break;
        }
        if n < 2 || grad_norm == 0.0 {
            converged = true;
            break;
        }

        let direction = precondition(&grad, grid)?;
        let slope = grad.inner(&direction, grid);
        if slope >= 0.0 {
            // preconditioner failed to produce descent; fall back to -G
            break;
        }

        let mut step = opts.initial_step;
        let mut accepted = false;
        while step > 1e-14 {
            let r_step = RotationField::exp(&direction.scale(step));
            let trial_frame = apply_rotation(&current, &r_step);
            let trial_torsion = torsion_of_frame_local(&trial_frame, grid);
            let trial_energy = total_torsion(&trial_torsion, grid);
            if trial_energy <= energy + opts.armijo_slope * step * slope {
                let rel_drop = (energy - trial_energy) / energy.max(1e-300);
                current = trial_frame;
                rotation = r_step.compose(&rotation);
                torsion = trial_torsion;
                let prev_energy = energy;
                energy = trial_energy;
                (el_i, el_b) = el_residual(&torsion, grid);
                history.last_mut().unwrap().step = step;
                iterations = iter + 1;
                accepted = true;
                if rel_drop < opts.decrease_tolerance && prev_energy.is_finite() {
                    converged = el_i <= opts.el_tolerance && el_b <= opts.el_tolerance;
                    // stagnation: record the final state and stop
                    history.push(HistoryRecord {
                        iteration: iter + 1,
                        total_torsion: energy,
                        el_interior: el_i,
                        el_boundary: el_b,
                        gradient_norm: grad_norm,
                        step: 0.0,
                    });
                    return Ok(finish(
                        current, rotation, torsion, energy, el_i, el_b, iterations, converged,
                        history,
                    ));
                }
                break;
            }
            step *= opts.step_shrink;
        }
        if !accepted {
            break;
        }
    }

    if !converged {
        converged = el_i <= opts.el_tolerance && el_b <= opts.el_tolerance;
    }
    history.push(HistoryRecord {
        iteration: iterations,
        total_torsion: energy,
        el_interior: el_i,
        el_boundary: el_b,
        gradient_norm: 0.0,
        step: 0.0,
    });
    Ok(finish(
        current, rotation, torsion, energy, el_i, el_b, iterations, converged, history,
    ))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    frame: NormalFrameField,
    rotation: RotationField,
    torsion: TorsionField,
    total_torsion: f64,
    el_interior: f64,
    el_boundary: f64,
    iterations: usize,
    converged: bool,
    history: Vec<HistoryRecord>,
) -> CoulombResult {
    CoulombResult {
        frame,
        rotation,
        torsion,
        total_torsion,
        el_interior,
        el_boundary,
        iterations,
        route: Route::Descent,
        converged,
        history,
    }
}

/// H^1 (Sobolev) preconditioner: each independent gradient entry g is mapped
/// to the solution of Delta p = g / 2 with natural boundary conditions, which
/// turns the descent into near-Newton steps for the quadratic part of 𝒯.
fn precondition(grad: &LieAlgebraField, grid: &DiscGrid) -> Result<LieAlgebraField> {
    let n = grad.codim;
    let wc = grid.cell_weights();
    let mut mats = vec![DMatrix::zeros(n, n); grid.n_nodes()];
    for s in 0..n {
        for t in (s + 1)..n {
            let load: ScalarField = grad
                .mats
                .iter()
                .zip(wc)
                .map(|(m, &w)| -0.5 * w * m[(s, t)])
                .collect();
            let p = grid.solve_neumann_from_load(&load)?;
            for (mp, &pv) in mats.iter_mut().zip(&p) {
                mp[(s, t)] = pv;
                mp[(t, s)] = -pv;
            }
        }
    }
    Ok(LieAlgebraField { codim: n, mats })
}

/// Skew potential of a Coulomb torsion field: solves
/// Delta tau = d_v T_1 - d_u T_2 entrywise with zero Dirichlet data and
/// reports how well grad tau = (-T_2, T_1) and the curvature identity hold.
pub fn tau_potential(
    t: &TorsionField,
    s: &NormalCurvatureField,
    grid: &DiscGrid,
) -> Result<TauPotential> {
    let n = t.codim;
    let dv_t1 = apply_stencil_matrix(grid.d_v(), &t.t1);
    let du_t2 = apply_stencil_matrix(grid.d_u(), &t.t2);
    let mut tau = vec![DMatrix::zeros(n, n); grid.n_nodes()];
    for a in 0..n {
        for b in (a + 1)..n {
            let rhs: ScalarField = (0..grid.n_nodes())
                .map(|p| dv_t1[p][(a, b)] - du_t2[p][(a, b)])
                .collect();
            let sol = grid.solve_poisson_dirichlet(&rhs)?;
            for (tp, &v) in tau.iter_mut().zip(&sol) {
                tp[(a, b)] = v;
                tp[(b, a)] = -v;
            }
        }
    }

    let tau_u = apply_stencil_matrix(grid.d_u(), &tau);
    let tau_v = apply_stencil_matrix(grid.d_v(), &tau);
    let mut res_grad = 0.0f64;
    for p in 0..grid.n_nodes() {
        res_grad = res_grad.max((&tau_u[p] + &t.t2[p]).abs().max());
        res_grad = res_grad.max((&tau_v[p] - &t.t1[p]).abs().max());
    }
    let res_boundary = grid
        .boundary_nodes()
        .iter()
        .map(|&p| tau[p].abs().max())
        .fold(0.0, f64::max);

    // nonlinear identity: Delta tau + (tau_u tau_v - tau_v tau_u) = S_12
    let mut res_poisson = 0.0f64;
    for a in 0..n {
        for b in (a + 1)..n {
            let entry: ScalarField = tau.iter().map(|m| m[(a, b)]).collect();
            let lap = grid.apply_laplacian(&entry);
            for p in 0..grid.n_nodes() {
                if grid.is_boundary(p) {
                    continue;
                }
                let comm = &tau_u[p] * &tau_v[p] - &tau_v[p] * &tau_u[p];
                let r = lap[p] + comm[(a, b)] - s.s12[p][(a, b)];
                res_poisson = res_poisson.max(r.abs());
            }
        }
    }

    Ok(TauPotential {
        tau,
        residual_gradient: res_grad,
        residual_boundary: res_boundary,
        residual_poisson: res_poisson,
    })
}

/// Smallness-condition report with gamma(n) = min{ sqrt(n(n-1)/2)/4, sqrt 2 }.
pub fn apriori_report(result: &CoulombResult, s: &NormalCurvatureField) -> AprioriReport {
    let n = result.torsion.codim;
    let gamma = gamma_constant(n);
    let s0 = s.max_length();
    let tt = result.total_torsion;
    let lhs = ((n as f64 - 2.0).max(0.0).sqrt() / 4.0)
        * ((n as f64 - 2.0) / (2.0 * std::f64::consts::PI) * tt + gamma * s0);
    AprioriReport {
        n,
        total_torsion_min: tt,
        s0,
        gamma,
        lhs,
        condition_met: lhs < 1.0,
        sup_t: result.torsion.sup_norm(),
    }
}

pub fn gamma_constant(n: usize) -> f64 {
    let nf = n as f64;
    (0.25 * (nf * (nf - 1.0) / 2.0).sqrt()).min(2f64.sqrt())
}

// thin alias so this module reads independently of the surface module's name
use crate::surface::torsion_of_frame as torsion_of_frame_local;
