//! Linear support vector machines trained by solving a QUBO.
//!
//! The dual weights `αᵢ ∈ [0, C]` are approximated with `k` bits each, the
//! equality constraint `αᵀy = 0` becomes a quadratic penalty, and the
//! resulting unconstrained binary problem is handed to a tabu search (or an
//! exhaustive solver for small instances). A classical SMO solver on the
//! same dual provides the full-precision reference.
//!
//! ```
//! use qubosvm::{make_encoding, train, SvmDataset, TrainConfig};
//!
//! let data = SvmDataset::new(
//!     "pair",
//!     vec![vec![1.0, 0.0], vec![-1.0, 0.0]],
//!     vec![1, -1],
//!     "two points",
//! )?;
//! let enc = make_encoding(2, 1.0)?;
//! let model = train(&data, &enc, &TrainConfig::default())?;
//! assert_eq!(model.predict(&[2.0, 0.5])?, 1);
//! # Ok::<(), qubosvm::Error>(())
//! ```

pub mod baseline;
pub mod data;
pub mod encoding;
mod error;
pub mod experiment;
pub mod model;
pub mod qubo;
pub mod tabu;

pub use baseline::{dual_objective, smo_train, SmoConfig, SmoFit};
pub use data::{load_dataset, make_folds, FoldPlan, SvmDataset};
pub use encoding::{
    build_qubo, constraint_residual, decode_alpha, make_encoding, train, train_with_stats, PrecisionEncoding,
    QuboSolver, QuboSvmProblem, TrainConfig, TrainStats,
};
pub use error::{Error, Result};
pub use experiment::{emit_plot, emit_results, read_results, run_grid, ExperimentRecord, GridConfig};
pub use model::TrainedModel;
pub use qubo::{brute_force_solve, BinaryVector, IsingModel, QuboInstance, SolverReport};
pub use tabu::{multistart_best, tabu_solve, TabuConfig};

/// The guide's code listings, compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/qubo.md")]
    mod qubo {}
    #[doc = include_str!("../../../book/src/tabu.md")]
    mod tabu {}
    #[doc = include_str!("../../../book/src/encoding.md")]
    mod encoding {}
    #[doc = include_str!("../../../book/src/baseline.md")]
    mod baseline {}
    #[doc = include_str!("../../../book/src/datasets.md")]
    mod datasets {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
