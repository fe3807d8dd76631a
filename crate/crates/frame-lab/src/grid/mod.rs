//! Polar discretization of the closed unit disc.
//!
//! Nodes sit at radii `r_j = j/n_r` (j = 0..=n_r) and angles
//! `theta_k = 2*pi*k/n_theta`, with a single shared node at the center. The
//! outermost ring is the boundary. Cartesian derivative stencils, disc and
//! boundary quadrature, and scalar Poisson solvers (Dirichlet and Neumann)
//! live here; everything downstream treats the grid as an immutable value.

mod poisson;
mod sparse;

pub use poisson::NEUMANN_COMPAT_RELTOL;
pub use sparse::{Csr, Triplets};

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// One value per grid node.
pub type ScalarField = Vec<f64>;

#[derive(Debug, Clone)]
pub struct DiscGrid {
    n_r: usize,
    n_theta: usize,
    h_r: f64,
    h_theta: f64,
    /// (u, v) per node; node 0 is the center.
    nodes: Vec<(f64, f64)>,
    radii: Vec<f64>,
    thetas: Vec<f64>,
    /// Trapezoid weights for the disc integral (the center carries weight 0).
    quad_weights: Vec<f64>,
    /// Finite-volume cell areas; positive everywhere. Used as the inner
    /// product weight of the solvers and the descent gradient.
    cell_weights: Vec<f64>,
    boundary_nodes: Vec<usize>,
    boundary_normals: Vec<(f64, f64)>,
    boundary_arc_weights: Vec<f64>,
    d_u: Csr,
    d_v: Csr,
    d_u_t: Csr,
    d_v_t: Csr,
}

/// Builds the polar grid; rejects resolutions too coarse for the second-order
/// stencils and odd sector counts (the theta stencil assumes an even split).
pub fn build_polar_grid(n_r: usize, n_theta: usize) -> Result<DiscGrid> {
    if n_theta % 2 != 0 {
        return Err(Error::OddSectorCount(n_theta));
    }
    if n_r < 8 || n_theta < 16 {
        return Err(Error::GridTooCoarse { n_r, n_theta });
    }

    let h_r = 1.0 / n_r as f64;
    let h_theta = 2.0 * PI / n_theta as f64;
    let n_nodes = 1 + n_r * n_theta;

    let mut nodes = Vec::with_capacity(n_nodes);
    let mut radii = Vec::with_capacity(n_nodes);
    let mut thetas = Vec::with_capacity(n_nodes);
    nodes.push((0.0, 0.0));
    radii.push(0.0);
    thetas.push(0.0);
    for j in 1..=n_r {
        let r = j as f64 * h_r;
        for k in 0..n_theta {
            let th = k as f64 * h_theta;
            nodes.push((r * th.cos(), r * th.sin()));
            radii.push(r);
            thetas.push(th);
        }
    }

    let mut quad_weights = vec![0.0; n_nodes];
    let mut cell_weights = vec![0.0; n_nodes];
    cell_weights[0] = PI * h_r * h_r / 4.0;
    for j in 1..=n_r {
        let r = j as f64 * h_r;
        let wr = if j == n_r { 0.5 * h_r } else { h_r };
        for k in 0..n_theta {
            let p = node_index(n_theta, j, k);
            quad_weights[p] = r * wr * h_theta;
            cell_weights[p] = r * wr * h_theta;
        }
    }

    let boundary_nodes: Vec<usize> = (0..n_theta).map(|k| node_index(n_theta, n_r, k)).collect();
    let boundary_normals: Vec<(f64, f64)> = (0..n_theta)
        .map(|k| {
            let th = k as f64 * h_theta;
            (th.cos(), th.sin())
        })
        .collect();
    let boundary_arc_weights = vec![h_theta; n_theta];

    let (d_u, d_v) = build_partials(n_r, n_theta, h_r, h_theta);
    let d_u_t = d_u.transpose();
    let d_v_t = d_v.transpose();

    Ok(DiscGrid {
        n_r,
        n_theta,
        h_r,
        h_theta,
        nodes,
        radii,
        thetas,
        quad_weights,
        cell_weights,
        boundary_nodes,
        boundary_normals,
        boundary_arc_weights,
        d_u,
        d_v,
        d_u_t,
        d_v_t,
    })
}

#[inline]
fn node_index(n_theta: usize, j: usize, k: usize) -> usize {
    debug_assert!(j >= 1);
    1 + (j - 1) * n_theta + (k % n_theta)
}

/// Assembles the Cartesian derivative stencils D_u, D_v as sparse operators.
///
/// Interior rings use central differences in r and theta and the chain rule
/// f_u = cos(th) f_r - sin(th)/r f_th. The boundary ring takes a one-sided
/// second-order radial stencil; the center fits a linear function to the
/// first ring.
fn build_partials(n_r: usize, n_theta: usize, h_r: f64, h_theta: f64) -> (Csr, Csr) {
    let n_nodes = 1 + n_r * n_theta;
    let mut tu = Triplets::new(n_nodes, n_nodes);
    let mut tv = Triplets::new(n_nodes, n_nodes);

    // center: f_u = (2 / (n_theta r_1)) sum_k f(r_1, th_k) cos th_k
    let c0 = 2.0 / (n_theta as f64 * h_r);
    for k in 0..n_theta {
        let th = k as f64 * h_theta;
        let q = node_index(n_theta, 1, k);
        tu.push(0, q, c0 * th.cos());
        tv.push(0, q, c0 * th.sin());
    }

    for j in 1..=n_r {
        let r = j as f64 * h_r;
        for k in 0..n_theta {
            let p = node_index(n_theta, j, k);
            let th = k as f64 * h_theta;
            let (ct, st) = (th.cos(), th.sin());

            // radial stencil -> (node, coeff) pairs for f_r
            let radial: Vec<(usize, f64)> = if j < n_r {
                let inner = if j == 1 { 0 } else { node_index(n_theta, j - 1, k) };
                vec![
                    (node_index(n_theta, j + 1, k), 0.5 / h_r),
                    (inner, -0.5 / h_r),
                ]
            } else {
                vec![
                    (p, 1.5 / h_r),
                    (node_index(n_theta, j - 1, k), -2.0 / h_r),
                    (node_index(n_theta, j - 2, k), 0.5 / h_r),
                ]
            };
            // angular stencil for f_theta (periodic); the 2 sin(h) denominator
            // keeps the stencil second order and exact on first harmonics, so
            // linear Cartesian fields differentiate exactly
            let c_th = 0.5 / h_theta.sin();
            let angular = [
                (node_index(n_theta, j, (k + 1) % n_theta), c_th),
                (node_index(n_theta, j, (k + n_theta - 1) % n_theta), -c_th),
            ];

            for &(q, c) in &radial {
                tu.push(p, q, ct * c);
                tv.push(p, q, st * c);
            }
            for &(q, c) in &angular {
                tu.push(p, q, -st / r * c);
                tv.push(p, q, ct / r * c);
            }
        }
    }
    (tu.to_csr(), tv.to_csr())
}

impl DiscGrid {
    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn h_r(&self) -> f64 {
        self.h_r
    }

    pub fn h_theta(&self) -> f64 {
        self.h_theta
    }

    /// h = max(1/n_r, 2*pi/n_theta), the mesh parameter of the error bounds.
    pub fn mesh_parameter(&self) -> f64 {
        self.h_r.max(self.h_theta)
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn node(&self, p: usize) -> (f64, f64) {
        self.nodes[p]
    }

    pub fn radius(&self, p: usize) -> f64 {
        self.radii[p]
    }

    pub fn theta(&self, p: usize) -> f64 {
        self.thetas[p]
    }

    /// Index of the node at ring `j >= 1`, sector `k`.
    pub fn index(&self, j: usize, k: usize) -> usize {
        node_index(self.n_theta, j, k)
    }

    pub fn center(&self) -> usize {
        0
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    pub fn cell_weights(&self) -> &[f64] {
        &self.cell_weights
    }

    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary_nodes
    }

    pub fn is_boundary(&self, p: usize) -> bool {
        p >= self.n_nodes() - self.n_theta
    }

    /// Outward unit normal per boundary node, aligned with `boundary_nodes`.
    pub fn boundary_normals(&self) -> &[(f64, f64)] {
        &self.boundary_normals
    }

    pub fn boundary_arc_weights(&self) -> &[f64] {
        &self.boundary_arc_weights
    }

    pub fn d_u(&self) -> &Csr {
        &self.d_u
    }

    pub fn d_v(&self) -> &Csr {
        &self.d_v
    }

    pub fn d_u_transpose(&self) -> &Csr {
        &self.d_u_t
    }

    pub fn d_v_transpose(&self) -> &Csr {
        &self.d_v_t
    }

    /// Cartesian partials (f_u, f_v) of a nodal scalar field.
    pub fn cartesian_partials(&self, f: &[f64]) -> (ScalarField, ScalarField) {
        assert_eq!(f.len(), self.n_nodes(), "field/grid size mismatch");
        (self.d_u.mul(f), self.d_v.mul(f))
    }

    /// ∫∫_B f du dv by the polar trapezoid rule.
    pub fn integrate_disc(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.n_nodes(), "field/grid size mismatch");
        f.iter()
            .zip(&self.quad_weights)
            .map(|(fi, wi)| fi * wi)
            .sum()
    }

    /// ∮_{∂B} f ds for a field given on the boundary ring (length n_theta,
    /// ordered by sector).
    pub fn integrate_boundary(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.n_theta, "boundary field size mismatch");
        f.iter()
            .zip(&self.boundary_arc_weights)
            .map(|(fi, wi)| fi * wi)
            .sum()
    }

    /// Restricts a nodal field to the boundary ring.
    pub fn boundary_values(&self, f: &[f64]) -> Vec<f64> {
        self.boundary_nodes.iter().map(|&p| f[p]).collect()
    }
}

/// Applies a nodal stencil operator to a field of equally sized matrices.
pub fn apply_stencil_matrix(
    op: &Csr,
    field: &[nalgebra::DMatrix<f64>],
) -> Vec<nalgebra::DMatrix<f64>> {
    assert_eq!(op.n_cols(), field.len());
    let shape = field[0].shape();
    let mut out = Vec::with_capacity(op.n_rows());
    for p in 0..op.n_rows() {
        let mut acc = nalgebra::DMatrix::zeros(shape.0, shape.1);
        for (q, a) in op.row(p) {
            acc += a * &field[q];
        }
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests;
