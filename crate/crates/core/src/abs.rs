//! Analysis-by-synthesis recovery.
//!
//! Exact analysis recovery
//!
//! ```text
//! x^ = argmin_x ||Omega x||_0  s.t.  y = M x
//! ```
//!
//! has the same solution as the synthesis problem
//!
//! ```text
//! x^ = D argmin_g ||g||_0  s.t.  [y; 0] = [M D; P_D] g
//! ```
//!
//! where `D = pinv(Omega)` and the rows of `P_D` span the nullspace of `D`.
//! Substituting `g = Omega x` turns the analysis objective into a synthesis
//! one; the lower block keeps `g` inside the column span of `Omega`, which is
//! the only thing that distinguishes the two problems. Any synthesis solver
//! can therefore be run on the stacked system, and its output mapped back
//! with `D`.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::model::{AnalysisOperator, Cosupport};
use crate::numerics::{self, Matrix, Vector};
use crate::solvers::{self, SolverConfig, SolverKind, SolverStatus};

/// The stacked constraint system `[M D; P_D] g = [y; 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedSystem {
    pub a_tilde: Matrix,
    pub y_tilde: Vector,
    /// Number of measurement rows; the subspace block starts here.
    pub m_rows: usize,
}

impl AugmentedSystem {
    pub fn measurement_block(&self) -> nalgebra::DMatrixView<'_, f64> {
        self.a_tilde.rows(0, self.m_rows)
    }

    pub fn subspace_block(&self) -> nalgebra::DMatrixView<'_, f64> {
        self.a_tilde.rows(self.m_rows, self.a_tilde.nrows() - self.m_rows)
    }

    pub fn residual_norm(&self, gamma: &Vector) -> f64 {
        numerics::residual_norm(&self.a_tilde, gamma, &self.y_tilde)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub solver: SolverKind,
    /// Analysis coefficients, length `N`.
    pub gamma_hat: Vector,
    /// Recovered signal `D gamma_hat`, length `d`.
    pub x_hat: Vector,
    pub iterations: usize,
    /// `||y~ - A~ gamma_hat||` at exit.
    pub residual_norm: f64,
    pub elapsed: Duration,
    pub status: SolverStatus,
}

fn check_shapes(op: &AnalysisOperator, m_mat: &Matrix, y: &Vector) -> Result<()> {
    if m_mat.ncols() != op.dim() {
        return Err(Error::DimensionMismatch(format!(
            "measurement matrix has {} columns, operator dimension is {}",
            m_mat.ncols(),
            op.dim()
        )));
    }
    if m_mat.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "measurement matrix has {} rows, measurements have length {}",
            m_mat.nrows(),
            y.len()
        )));
    }
    numerics::ensure_finite_matrix(m_mat, "measurement matrix")?;
    numerics::ensure_finite_vector(y, "measurements")
}

pub fn build_augmented_system(
    op: &AnalysisOperator,
    m_mat: &Matrix,
    y: &Vector,
) -> Result<AugmentedSystem> {
    check_shapes(op, m_mat, y)?;
    let m = m_mat.nrows();
    let n = op.n_rows();
    let subspace = op.dict_nullspace();
    let extra = subspace.nrows();

    let mut a_tilde = Matrix::zeros(m + extra, n);
    a_tilde.rows_mut(0, m).copy_from(&(m_mat * op.dict()));
    a_tilde.rows_mut(m, extra).copy_from(subspace);
    let mut y_tilde = Vector::zeros(m + extra);
    y_tilde.rows_mut(0, m).copy_from(y);
    Ok(AugmentedSystem {
        a_tilde,
        y_tilde,
        m_rows: m,
    })
}

/// Recovers the signal by running a synthesis solver on the augmented
/// system. Solver trouble (iteration cap, stagnation) shows up in
/// `status`; only contract violations are errors.
pub fn abs_recover(
    op: &AnalysisOperator,
    m_mat: &Matrix,
    y: &Vector,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    if !cfg.kind.is_synthesis() {
        return Err(Error::InvalidParameter(format!(
            "{} is not a synthesis solver",
            cfg.kind
        )));
    }
    let start = Instant::now();
    let system = build_augmented_system(op, m_mat, y)?;
    let out = solvers::solve_synthesis(cfg, &system.a_tilde, &system.y_tilde)?;
    let x_hat = op.dict() * &out.gamma;
    let elapsed = start.elapsed();
    Ok(SolverReport {
        solver: cfg.kind,
        residual_norm: system.residual_norm(&out.gamma),
        gamma_hat: out.gamma,
        x_hat,
        iterations: out.iterations,
        elapsed,
        status: out.status,
    })
}

/// Plain synthesis recovery `x = D argmin ||g||_0 s.t. y = M D g`, without
/// the subspace block.
pub fn synthesis_recover(
    dict: &Matrix,
    m_mat: &Matrix,
    y: &Vector,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    if !cfg.kind.is_synthesis() {
        return Err(Error::InvalidParameter(format!(
            "{} is not a synthesis solver",
            cfg.kind
        )));
    }
    if m_mat.ncols() != dict.nrows() || m_mat.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "dictionary {}x{}, measurement matrix {}x{}, measurements {}",
            dict.nrows(),
            dict.ncols(),
            m_mat.nrows(),
            m_mat.ncols(),
            y.len()
        )));
    }
    let start = Instant::now();
    let a = m_mat * dict;
    let out = solvers::solve_synthesis(cfg, &a, y)?;
    let x_hat = dict * &out.gamma;
    let elapsed = start.elapsed();
    Ok(SolverReport {
        solver: cfg.kind,
        residual_norm: numerics::residual_norm(&a, &out.gamma, y),
        gamma_hat: out.gamma,
        x_hat,
        iterations: out.iterations,
        elapsed,
        status: out.status,
    })
}

/// Runs any configured solver: synthesis solvers through the augmented
/// system, GAP and the analysis oracle directly on the analysis problem.
///
/// For the analysis-domain solvers `gamma_hat = Omega x_hat`; since
/// `D Omega = I` and `P_D Omega = 0`, `residual_norm` is then `||y - M x_hat||`,
/// the same quantity the synthesis path reports.
pub fn recover(
    op: &AnalysisOperator,
    m_mat: &Matrix,
    y: &Vector,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    match cfg.kind {
        kind if kind.is_synthesis() => abs_recover(op, m_mat, y, cfg),
        SolverKind::GapBaseline => {
            check_shapes(op, m_mat, y)?;
            let start = Instant::now();
            let out = solvers::gap(op, m_mat, y, cfg.k)?;
            let elapsed = start.elapsed();
            Ok(analysis_report(op, m_mat, y, cfg.kind, out.x, out.iterations, elapsed, out.status))
        }
        SolverKind::OracleAnalysis => {
            check_shapes(op, m_mat, y)?;
            let start = Instant::now();
            let sol = solvers::oracle_analysis(op, m_mat, y, cfg.k.unwrap_or(0))?;
            let elapsed = start.elapsed();
            let status = match (&sol.x, sol.unique) {
                (Some(_), true) => SolverStatus::Converged,
                (Some(_), false) => SolverStatus::Stagnated,
                (None, _) => SolverStatus::MaxIterations,
            };
            let x = sol.x.unwrap_or_else(|| Vector::zeros(op.dim()));
            Ok(analysis_report(op, m_mat, y, cfg.kind, x, sol.cosupports_tested, elapsed, status))
        }
        _ => unreachable!("synthesis kinds handled above"),
    }
}

#[allow(clippy::too_many_arguments)]
fn analysis_report(
    op: &AnalysisOperator,
    m_mat: &Matrix,
    y: &Vector,
    solver: SolverKind,
    x_hat: Vector,
    iterations: usize,
    elapsed: Duration,
    status: SolverStatus,
) -> SolverReport {
    SolverReport {
        solver,
        gamma_hat: op.analyze(&x_hat),
        residual_norm: numerics::residual_norm(m_mat, &x_hat, y),
        x_hat,
        iterations,
        elapsed,
        status,
    }
}

/// Rows of the operator that are orthogonal to `x`: `|(Omega x)_j| <= tol ||x||`.
pub fn cosupport_of(op: &AnalysisOperator, x: &Vector, tol: f64) -> Result<Cosupport> {
    if x.len() != op.dim() {
        return Err(Error::DimensionMismatch(format!(
            "signal has length {}, operator dimension is {}",
            x.len(),
            op.dim()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("cosupport tolerance must be positive".into()));
    }
    let cutoff = tol * x.norm();
    let analysis = op.analyze(x);
    let indices = (0..op.n_rows()).filter(|&j| analysis[j].abs() <= cutoff).collect();
    Cosupport::new(indices, op.n_rows())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        generate_measurement_matrix, generate_tight_frame, make_instance, make_instance_with_dims,
        RngSeed,
    };

    #[test]
    fn square_operator_has_no_subspace_block() {
        let op = generate_tight_frame(6, 6, RngSeed(1)).unwrap();
        let m = generate_measurement_matrix(4, 6, RngSeed(2)).unwrap();
        let y = Vector::from_element(4, 0.3);
        let sys = build_augmented_system(&op, &m, &y).unwrap();
        assert_eq!(sys.a_tilde, &m * op.dict());
        assert_eq!(sys.y_tilde, y);
        assert_eq!(sys.subspace_block().nrows(), 0);
    }

    #[test]
    fn full_scale_dimensions() {
        let op = generate_tight_frame(240, 200, RngSeed(3)).unwrap();
        let m = generate_measurement_matrix(100, 200, RngSeed(4)).unwrap();
        let y = Vector::from_element(100, 1.0);
        let sys = build_augmented_system(&op, &m, &y).unwrap();
        assert_eq!(sys.a_tilde.shape(), (140, 240));
        assert_eq!(sys.y_tilde.len(), 140);
        assert!(sys.y_tilde.rows(100, 40).iter().all(|v| *v == 0.0));
        assert!((sys.subspace_block() * op.dict().transpose()).amax() <= 1e-10);
    }

    #[test]
    fn analysis_coefficients_are_feasible() {
        let op = generate_tight_frame(30, 24, RngSeed(5)).unwrap();
        let inst = make_instance(&op, 0.5, 0.5, RngSeed(6)).unwrap();
        let sys = build_augmented_system(&op, &inst.m_mat, &inst.y).unwrap();
        let gamma = op.analyze(&inst.x);
        assert!((&sys.a_tilde * gamma - &sys.y_tilde).amax() <= 1e-8);
    }

    #[test]
    fn shape_errors() {
        let op = generate_tight_frame(6, 5, RngSeed(1)).unwrap();
        let m = Matrix::zeros(3, 4);
        assert!(build_augmented_system(&op, &m, &Vector::zeros(3)).is_err());
        let m = Matrix::zeros(3, 5);
        assert!(build_augmented_system(&op, &m, &Vector::zeros(2)).is_err());
    }

    #[test]
    fn zero_measurements_give_zero_signal() {
        let op = generate_tight_frame(12, 10, RngSeed(7)).unwrap();
        let m = generate_measurement_matrix(5, 10, RngSeed(8)).unwrap();
        let report = abs_recover(&op, &m, &Vector::zeros(5), &SolverConfig::omp_eps()).unwrap();
        assert_eq!(report.gamma_hat, Vector::zeros(12));
        assert_eq!(report.x_hat, Vector::zeros(10));
        assert_eq!(report.iterations, 0);
    }

    #[test]
    fn rejects_analysis_solver() {
        let op = generate_tight_frame(6, 5, RngSeed(1)).unwrap();
        let m = generate_measurement_matrix(3, 5, RngSeed(2)).unwrap();
        let y = Vector::zeros(3);
        assert!(abs_recover(&op, &m, &y, &SolverConfig::gap(2)).is_err());
    }

    #[test]
    fn gap_through_recover_reports_measurement_residual() {
        let op = generate_tight_frame(24, 20, RngSeed(9)).unwrap();
        let inst = make_instance_with_dims(&op, 14, 18, RngSeed(10)).unwrap();
        let report = recover(&op, &inst.m_mat, &inst.y, &SolverConfig::gap(18)).unwrap();
        assert!(report.residual_norm < 1e-10);
        let sys = build_augmented_system(&op, &inst.m_mat, &inst.y).unwrap();
        assert!((sys.residual_norm(&report.gamma_hat) - report.residual_norm).abs() < 1e-12);
    }

    #[test]
    fn cosupport_examples() {
        let op = generate_tight_frame(14, 10, RngSeed(11)).unwrap();
        let all = cosupport_of(&op, &Vector::zeros(10), 1e-8).unwrap();
        assert_eq!(all.l(), 14);

        let inst = make_instance_with_dims(&op, 8, 7, RngSeed(12)).unwrap();
        assert_eq!(cosupport_of(&op, &inst.x, 1e-8).unwrap(), inst.cosupport);

        let dense = Vector::from_fn(10, |i, _| 1.0 + i as f64 * 0.1);
        assert_eq!(cosupport_of(&op, &dense, 1e-8).unwrap().l(), 0);
        assert!(cosupport_of(&op, &dense, 0.0).is_err());
    }
}
