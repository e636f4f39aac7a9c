//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the simulator library.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates its documented constraints.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An input value is outside the domain of the operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The Gram matrix HH^H is numerically singular; carries the condition
    /// estimate that tripped the cap.
    #[error("singular channel: condition estimate {cond:.3e} exceeds cap {cap:.1e}")]
    SingularChannel { cond: f64, cap: f64 },

    /// A lattice generator does not have full column rank.
    #[error("degenerate lattice: generator is rank deficient (pivot {pivot:.3e})")]
    DegenerateLattice { pivot: f64 },

    /// A lattice search exceeded its node budget.
    #[error("search budget exceeded after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },

    /// Adaptive quadrature failed to converge; carries the partial estimate.
    #[error("quadrature did not converge (partial estimate {partial:.6e})")]
    QuadratureFailure { partial: f64 },

    /// A closed-form evaluation produced a value outside its feasible range.
    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    /// File output failed; carries the path for context.
    #[error("i/o error writing {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// JSON (de)serialization failed.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
