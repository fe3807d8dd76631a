//! Scalar Poisson solvers on the polar grid.
//!
//! Both solvers use the conservative five-point polar Laplacian. Multiplying
//! each row by its finite-volume cell area makes the system symmetric, so a
//! Jacobi-preconditioned conjugate-gradient iteration applies. The Neumann
//! system is singular with the constants as null space; the right-hand side
//! is projected onto the range and the solution normalized to zero mean.

use super::sparse::{Csr, Triplets};
use super::{DiscGrid, ScalarField};
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Relative tolerance for the Neumann compatibility defect |∫∫f - ∮g|.
pub const NEUMANN_COMPAT_RELTOL: f64 = 1e-6;

const CG_RELTOL: f64 = 1e-12;

impl DiscGrid {
    /// Solves Δφ = rhs in B with φ = 0 on ∂B.
    pub fn solve_poisson_dirichlet(&self, rhs: &[f64]) -> Result<ScalarField> {
        assert_eq!(rhs.len(), self.n_nodes(), "field/grid size mismatch");
        let n_int = self.n_nodes() - self.n_theta();
        let m = self.assemble_weighted_laplacian(true);
        let b: Vec<f64> = (0..n_int)
            .map(|p| -self.cell_weights()[p] * rhs[p])
            .collect();
        let x = cg(&m, &b, false)?;
        let mut phi = vec![0.0; self.n_nodes()];
        phi[..n_int].copy_from_slice(&x);
        Ok(phi)
    }

    /// Solves Δφ = f in B with ∂φ/∂ν = g on ∂B (g given per boundary
    /// sector), normalized to ∫∫ φ = 0.
    ///
    /// The data must satisfy the divergence-theorem compatibility
    /// ∫∫ f = ∮ g up to a small defect, which is then absorbed by a constant
    /// shift of f; a larger defect is a hard error.
    pub fn solve_poisson_neumann(&self, f: &[f64], g: &[f64]) -> Result<ScalarField> {
        assert_eq!(f.len(), self.n_nodes(), "field/grid size mismatch");
        assert_eq!(g.len(), self.n_theta(), "boundary field size mismatch");
        let defect = self.integrate_disc(f) - self.integrate_boundary(g);
        let l1: f64 = self.integrate_disc(&f.iter().map(|x| x.abs()).collect::<Vec<_>>())
            + self.integrate_boundary(&g.iter().map(|x| x.abs()).collect::<Vec<_>>());
        let tolerance = NEUMANN_COMPAT_RELTOL * l1 + 1e-12;
        if defect.abs() > tolerance {
            return Err(Error::NeumannIncompatible {
                defect: defect.abs(),
                tolerance,
            });
        }
        self.neumann_solve_unchecked(f, g)
    }

    /// Neumann solve without the compatibility gate: any defect is projected
    /// out. Used internally where the right-hand side is consistent by
    /// construction up to round-off.
    pub(crate) fn neumann_solve_unchecked(&self, f: &[f64], g: &[f64]) -> Result<ScalarField> {
        let m = self.assemble_weighted_laplacian(false);
        let n = self.n_nodes();
        let mut b: Vec<f64> = (0..n).map(|p| -self.cell_weights()[p] * f[p]).collect();
        for (i, &p) in self.boundary_nodes().iter().enumerate() {
            // boundary flux enters the half-cell balance as 2 g / h_r
            b[p] += self.cell_weights()[p] * 2.0 * g[i] / self.h_r();
        }
        project_constants(&mut b);
        let mut phi = cg(&m, &b, true)?;
        let mean = self.integrate_disc(&phi) / PI;
        for x in phi.iter_mut() {
            *x -= mean;
        }
        Ok(phi)
    }

    /// Solves the Neumann problem from a pre-assembled weak-form load vector
    /// b_p = Σ (test-function pairing at node p), normalized to ∫∫ φ = 0.
    ///
    /// Use when the data enter through derivative transposes (e.g. loads of
    /// the form -D_uᵀ(w t₁) - D_vᵀ(w t₂)): such loads annihilate constants
    /// exactly, so no compatibility defect can arise; any round-off component
    /// along the constants is projected out.
    pub fn solve_neumann_from_load(&self, load: &[f64]) -> Result<ScalarField> {
        assert_eq!(load.len(), self.n_nodes(), "field/grid size mismatch");
        let m = self.assemble_weighted_laplacian(false);
        let mut b = load.to_vec();
        project_constants(&mut b);
        let mut phi = cg(&m, &b, true)?;
        let mean = self.integrate_disc(&phi) / PI;
        for x in phi.iter_mut() {
            *x -= mean;
        }
        Ok(phi)
    }

    /// Applies the discrete Laplacian at every non-boundary node (boundary
    /// entries of the result are zero).
    pub fn apply_laplacian(&self, phi: &[f64]) -> ScalarField {
        assert_eq!(phi.len(), self.n_nodes(), "field/grid size mismatch");
        let mut out = vec![0.0; self.n_nodes()];
        let n_theta = self.n_theta();
        let h_r = self.h_r();
        let h_theta = self.h_theta();
        // center
        let mean: f64 = (0..n_theta).map(|k| phi[self.index(1, k)]).sum::<f64>() / n_theta as f64;
        out[0] = 4.0 * (mean - phi[0]) / (h_r * h_r);
        for j in 1..self.n_r() {
            let r = j as f64 * h_r;
            let (r_out, r_in) = (r + 0.5 * h_r, r - 0.5 * h_r);
            for k in 0..n_theta {
                let p = self.index(j, k);
                let inner = if j == 1 { 0 } else { self.index(j - 1, k) };
                let radial = (r_out * (phi[self.index(j + 1, k)] - phi[p])
                    - r_in * (phi[p] - phi[inner]))
                    / (r * h_r * h_r);
                let angular = (phi[self.index(j, (k + 1) % n_theta)] - 2.0 * phi[p]
                    + phi[self.index(j, (k + n_theta - 1) % n_theta)])
                    / (r * r * h_theta * h_theta);
                out[p] = radial + angular;
            }
        }
        out
    }

    /// Weighted operator M = -W_cell * L. With Dirichlet rows the boundary
    /// ring is eliminated; otherwise the boundary carries the half-cell
    /// Neumann closure (flux data handled by the caller).
    fn assemble_weighted_laplacian(&self, dirichlet: bool) -> Csr {
        let n_theta = self.n_theta();
        let n_r = self.n_r();
        let h_r = self.h_r();
        let h_theta = self.h_theta();
        let n = if dirichlet {
            self.n_nodes() - n_theta
        } else {
            self.n_nodes()
        };
        let mut t = Triplets::new(n, n);
        let w = self.cell_weights();

        // center row
        let wc = w[0];
        t.push(0, 0, wc * 4.0 / (h_r * h_r));
        for k in 0..n_theta {
            t.push(0, self.index(1, k), -wc * 4.0 / (n_theta as f64 * h_r * h_r));
        }

        let inner_rings = if dirichlet { n_r - 1 } else { n_r };
        for j in 1..=inner_rings {
            let r = j as f64 * h_r;
            for k in 0..n_theta {
                let p = self.index(j, k);
                let wp = w[p];
                if j < n_r {
                    let (r_out, r_in) = (r + 0.5 * h_r, r - 0.5 * h_r);
                    let inner = if j == 1 { 0 } else { self.index(j - 1, k) };
                    let a_out = r_out / (r * h_r * h_r);
                    let a_in = r_in / (r * h_r * h_r);
                    t.push(p, p, wp * (a_out + a_in));
                    t.push(p, inner, -wp * a_in);
                    // with Dirichlet rows the boundary ring is eliminated
                    if !(dirichlet && j + 1 == n_r) {
                        t.push(p, self.index(j + 1, k), -wp * a_out);
                    }
                    let a_th = 1.0 / (r * r * h_theta * h_theta);
                    t.push(p, p, wp * 2.0 * a_th);
                    t.push(p, self.index(j, (k + 1) % n_theta), -wp * a_th);
                    t.push(p, self.index(j, (k + n_theta - 1) % n_theta), -wp * a_th);
                } else {
                    // Neumann boundary half cell: flux through the inner face
                    // only; the outer-face flux is the prescribed data.
                    let r_in = r - 0.5 * h_r;
                    let a_in = 2.0 * r_in / (r * h_r * h_r);
                    t.push(p, p, wp * a_in);
                    t.push(p, self.index(j - 1, k), -wp * a_in);
                    let a_th = 1.0 / (r * r * h_theta * h_theta);
                    t.push(p, p, wp * 2.0 * a_th);
                    t.push(p, self.index(j, (k + 1) % n_theta), -wp * a_th);
                    t.push(p, self.index(j, (k + n_theta - 1) % n_theta), -wp * a_th);
                }
            }
        }
        t.to_csr()
    }
}

fn project_constants(x: &mut [f64]) {
    let mean: f64 = x.iter().sum::<f64>() / x.len() as f64;
    for v in x.iter_mut() {
        *v -= mean;
    }
}

/// Jacobi-preconditioned CG. With `deflate` the iteration stays orthogonal to
/// the constant null vector.
fn cg(m: &Csr, b: &[f64], deflate: bool) -> Result<Vec<f64>> {
    let n = b.len();
    let diag = m.diagonal();
    let precond = |r: &[f64]| -> Vec<f64> {
        r.iter()
            .zip(&diag)
            .map(|(ri, di)| if *di != 0.0 { ri / di } else { *ri })
            .collect()
    };
    let b_norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if b_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    if deflate {
        project_constants(&mut r);
    }
    let mut z = precond(&r);
    if deflate {
        project_constants(&mut z);
    }
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let max_iter = 100 * n.max(100);
    let mut ap = vec![0.0; n];
    for _ in 0..max_iter {
        m.mul_into(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if deflate {
            project_constants(&mut r);
        }
        let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r_norm <= CG_RELTOL * b_norm {
            return Ok(x);
        }
        z = precond(&r);
        if deflate {
            project_constants(&mut z);
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    // accept a slightly looser residual before declaring failure
    if r_norm <= 1e-10 * b_norm {
        return Ok(x);
    }
    Err(Error::SolverStalled {
        residual: r_norm / b_norm,
        iterations: max_iter,
    })
}
