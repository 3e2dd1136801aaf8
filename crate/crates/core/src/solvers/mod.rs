//! Sparse recovery solvers.
//!
//! The synthesis solvers ([`omp`], [`tst`], [`basis_pursuit`],
//! [`oracle_synthesis`]) work on any system `a gamma = y` and are what the
//! analysis-by-synthesis pipeline plugs in. [`gap`] and [`oracle_analysis`]
//! work directly in the analysis domain and serve as baseline and reference.
//!
//! All solvers are deterministic: ties in a selection step go to the lowest
//! column index.

mod bp;
mod gap;
mod omp;
mod oracle;
mod tst;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Matrix, Vector};

pub use bp::{basis_pursuit, BpOutcome, BpTolerances};
pub use gap::{gap, GapOutcome};
pub use omp::{omp, OmpOutcome, OmpStop};
pub use oracle::{
    oracle_analysis, oracle_synthesis, AnalysisOracleSolution, SynthesisOracleSolution,
    ENUMERATION_GUARD, ORACLE_FEASIBILITY_TOL,
};
pub use tst::{tst, TstParams};

/// Residual threshold for OMP-eps.
pub const DEFAULT_EPS_RESIDUAL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SolverKind {
    OmpK,
    OmpEps,
    Tst,
    Bp,
    GapBaseline,
    OracleSynthesis,
    OracleAnalysis,
}

impl SolverKind {
    pub const ALL: [SolverKind; 7] = [
        SolverKind::OmpK,
        SolverKind::OmpEps,
        SolverKind::Tst,
        SolverKind::Bp,
        SolverKind::GapBaseline,
        SolverKind::OracleSynthesis,
        SolverKind::OracleAnalysis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::OmpK => "omp-k",
            SolverKind::OmpEps => "omp-eps",
            SolverKind::Tst => "tst",
            SolverKind::Bp => "bp",
            SolverKind::GapBaseline => "gap",
            SolverKind::OracleSynthesis => "oracle-synthesis",
            SolverKind::OracleAnalysis => "oracle-analysis",
        }
    }

    /// Synthesis solvers act on `a gamma = y`; the others need the operator.
    pub fn is_synthesis(self) -> bool {
        !matches!(self, SolverKind::GapBaseline | SolverKind::OracleAnalysis)
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown solver `{s}`")))
    }
}

/// How a solver run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverStatus {
    Converged,
    /// Hit the iteration cap; the best iterate is returned.
    MaxIterations,
    /// A greedy step could not make progress (repeated or dependent
    /// selection, non-improving cycle).
    Stagnated,
    /// A linear system inside the solver became numerically singular.
    IllConditioned,
}

impl SolverStatus {
    pub fn is_converged(self) -> bool {
        self == SolverStatus::Converged
    }
}

/// Solver selection plus all its knobs. `k` is the target sparsity for OMP-k
/// and TST, the search bound for the synthesis oracle, and the target
/// cosparsity for GAP; it may be left `None` and filled in per instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub k: Option<usize>,
    pub eps_residual: f64,
    pub max_iterations: Option<usize>,
    pub tst: TstParams,
    pub bp: BpTolerances,
}

impl SolverConfig {
    pub fn new(kind: SolverKind) -> Self {
        Self {
            kind,
            k: None,
            eps_residual: DEFAULT_EPS_RESIDUAL,
            max_iterations: None,
            tst: TstParams::default(),
            bp: BpTolerances::default(),
        }
    }

    pub fn omp_k(k: usize) -> Self {
        Self::new(SolverKind::OmpK).with_k(k)
    }

    pub fn omp_eps() -> Self {
        Self::new(SolverKind::OmpEps)
    }

    pub fn tst(k: usize) -> Self {
        Self::new(SolverKind::Tst).with_k(k)
    }

    pub fn bp() -> Self {
        Self::new(SolverKind::Bp)
    }

    pub fn gap(target_l: usize) -> Self {
        Self::new(SolverKind::GapBaseline).with_k(target_l)
    }

    pub fn oracle_synthesis(k_max: usize) -> Self {
        Self::new(SolverKind::OracleSynthesis).with_k(k_max)
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = Some(n);
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            SolverKind::OmpK | SolverKind::Tst if self.k.is_none() => Err(Error::InvalidParameter(
                format!("{} needs a target sparsity k", self.kind),
            )),
            SolverKind::OmpEps if !(self.eps_residual > 0.0) => Err(Error::InvalidParameter(
                "omp-eps needs a positive residual threshold".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Result of a synthesis solve of `a gamma = y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisOutcome {
    pub gamma: Vector,
    pub iterations: usize,
    pub status: SolverStatus,
}

/// Runs the configured synthesis solver on `a gamma = y`.
pub fn solve_synthesis(cfg: &SolverConfig, a: &Matrix, y: &Vector) -> Result<SynthesisOutcome> {
    cfg.validate()?;
    if a.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "system has {} rows, measurements have length {}",
            a.nrows(),
            y.len()
        )));
    }
    match cfg.kind {
        SolverKind::OmpK | SolverKind::OmpEps => {
            let stop = if cfg.kind == SolverKind::OmpK {
                OmpStop::Atoms(cfg.k.expect("validated"))
            } else {
                OmpStop::Residual(cfg.eps_residual)
            };
            let out = omp(a, y, stop, cfg.max_iterations)?;
            Ok(SynthesisOutcome {
                gamma: out.gamma,
                iterations: out.iterations,
                status: out.status,
            })
        }
        SolverKind::Tst => {
            let out = tst(a, y, cfg.k.expect("validated"), &cfg.tst, cfg.max_iterations)?;
            Ok(out)
        }
        SolverKind::Bp => {
            let out = basis_pursuit(a, y, &cfg.bp)?;
            Ok(SynthesisOutcome {
                gamma: out.gamma,
                iterations: out.iterations,
                status: out.status,
            })
        }
        SolverKind::OracleSynthesis => {
            let k_max = cfg.k.unwrap_or(a.ncols());
            let sol = oracle_synthesis(a, y, k_max)?;
            let status = if sol.unique {
                SolverStatus::Converged
            } else {
                SolverStatus::Stagnated
            };
            match sol.gamma {
                Some(gamma) => Ok(SynthesisOutcome {
                    gamma,
                    iterations: sol.supports_tested,
                    status,
                }),
                None => Ok(SynthesisOutcome {
                    gamma: Vector::zeros(a.ncols()),
                    iterations: sol.supports_tested,
                    status: SolverStatus::MaxIterations,
                }),
            }
        }
        SolverKind::GapBaseline | SolverKind::OracleAnalysis => Err(Error::InvalidParameter(
            format!("{} is an analysis-domain solver", cfg.kind),
        )),
    }
}

/// Indices of the `count` largest entries of `scores`, ties broken by lower
/// index, returned sorted ascending.
pub(crate) fn top_indices(scores: &[f64], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]).then(i.cmp(&j)));
    order.truncate(count);
    order.sort_unstable();
    order
}

/// Index of the largest score; the lowest index wins on ties.
pub(crate) fn argmax(scores: impl IntoIterator<Item = (usize, f64)>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores {
        match best {
            Some((_, b)) if s <= b => {}
            _ => best = Some((i, s)),
        }
    }
    best
}

/// Euclidean norms of the columns; zero columns map to zero.
pub(crate) fn column_norms(a: &Matrix) -> Vec<f64> {
    a.column_iter().map(|c| c.norm()).collect()
}
