use thiserror::Error;

/// Errors produced by grid construction, surface sampling and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid too coarse: need n_r >= 8 and n_theta >= 16, got {n_r} x {n_theta}")]
    GridTooCoarse { n_r: usize, n_theta: usize },

    #[error("n_theta must be even, got {0}")]
    OddSectorCount(usize),

    #[error("surface is not conformally parametrized: residual {residual:.3e} exceeds {limit:.1e}")]
    NotConformal { residual: f64, limit: f64 },

    #[error("seed frame degenerates at node {node} (u={u:.4}, v={v:.4}): Gram-Schmidt pivot {pivot:.3e} below {limit:.1e}")]
    SeedPivotBreakdown {
        node: usize,
        u: f64,
        v: f64,
        pivot: f64,
        limit: f64,
    },

    #[error("Neumann compatibility violated: |∫∫f - ∮g| = {defect:.3e} exceeds tolerance {tolerance:.3e}")]
    NeumannIncompatible { defect: f64, tolerance: f64 },

    #[error("linear solver stalled: relative residual {residual:.3e} after {iterations} iterations")]
    SolverStalled { residual: f64, iterations: usize },

    #[error("Neumann route requires codimension 2, surface has n = {0}")]
    NeumannRequiresCodimTwo(usize),

    #[error("unknown surface '{name}'; available: {available}")]
    UnknownSurface { name: String, available: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
