//! Analysis-by-synthesis (ABS) recovery of cosparse signals.
//!
//! A signal `x` is cosparse with respect to an analysis operator `Omega` when
//! `Omega x` has many zeros. Exact recovery of such a signal from
//! measurements `y = M x` is equivalent to a synthesis sparse recovery
//! problem over an augmented system (see [`abs`]), so any synthesis solver in
//! [`solvers`] can be used for it. The [`experiment`] module runs
//! phase-transition grids over compression ratio and relative cosparsity.

pub mod abs;
pub mod error;
pub mod experiment;
pub mod instance_io;
pub mod model;
pub mod numerics;
pub mod solvers;

pub use abs::{
    abs_recover, build_augmented_system, cosupport_of, recover, synthesis_recover, AugmentedSystem,
    SolverReport,
};
pub use error::{Error, Result};
pub use model::{AnalysisOperator, Cosupport, CosparseInstance, RngSeed};
pub use numerics::{Matrix, Vector};
pub use solvers::{SolverConfig, SolverKind, SolverStatus};
