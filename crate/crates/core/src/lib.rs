//! Core-periphery networks: planted block-model generators, belief
//! propagation coreness, spectral and random-walk centralities, and the
//! localization and recovery metrics used to compare them.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bp;
pub mod centrality;
pub mod error;
pub mod evaluation;
pub mod experiments;
pub mod generators;
pub mod graph;

pub use bp::{fit_sbm, run_bp, BpConfig, BpMode, BpState, FitConfig, FitResult, Marginals};
pub use centrality::{CentralityScores, Method, SolverConfig};
pub use error::{Error, Result};
pub use experiments::{run_experiment, EvaluationReport, ExperimentConfig, ExperimentKind};
pub use generators::{BlockModelParams, DegreeCorrections};
pub use graph::{Graph, Group, Labeling};
