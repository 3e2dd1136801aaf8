use crate::error::{Error, Result};
use crate::numerics::{Matrix, Vector};

use super::{argmax, column_norms, SolverStatus};

/// Relative size below which a newly selected column counts as linearly
/// dependent on the already selected ones.
const DEPENDENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmpStop {
    /// OMP-k: stop after this many atoms.
    Atoms(usize),
    /// OMP-eps: stop once the residual norm drops below this value.
    Residual(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmpOutcome {
    pub gamma: Vector,
    /// Selected columns in selection order.
    pub support: Vec<usize>,
    pub iterations: usize,
    /// Residual norm before the first selection and after each one.
    pub residual_history: Vec<f64>,
    pub status: SolverStatus,
}

/// Orthogonal matching pursuit.
///
/// Each step picks the column with the largest normalized correlation
/// `|a_j^T r| / ||a_j||` and projects `y` onto the span of all picked columns.
/// The projection is maintained through an incrementally grown QR
/// factorization (Gram-Schmidt with one reorthogonalization pass), so every
/// residual is orthogonal to the selected columns. Zero columns are never
/// selected.
///
/// `max_iterations` defaults to `min(rows, cols)`.
pub fn omp(a: &Matrix, y: &Vector, stop: OmpStop, max_iterations: Option<usize>) -> Result<OmpOutcome> {
    let (rows, cols) = a.shape();
    if rows != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "omp: matrix has {rows} rows, measurements have length {}",
            y.len()
        )));
    }
    let atom_cap = match stop {
        OmpStop::Atoms(k) => k,
        OmpStop::Residual(eps) if eps > 0.0 => usize::MAX,
        OmpStop::Residual(_) => {
            return Err(Error::InvalidParameter("omp residual threshold must be positive".into()))
        }
    };
    let max_iterations = max_iterations.unwrap_or(rows.min(cols)).min(atom_cap);

    let norms = column_norms(a);
    let y_norm = y.norm();
    let mut selected = vec![false; cols];
    let mut support: Vec<usize> = Vec::new();
    let mut q_cols: Vec<Vector> = Vec::new();
    // Column j of R stored as r_cols[j][0..=j].
    let mut r_cols: Vec<Vec<f64>> = Vec::new();
    let mut qty: Vec<f64> = Vec::new();
    let mut residual = y.clone();
    let mut residual_history = vec![y_norm];
    let mut status = SolverStatus::Converged;

    loop {
        let res_norm = *residual_history.last().expect("nonempty");
        match stop {
            OmpStop::Residual(eps) if res_norm < eps => break,
            _ if res_norm <= f64::EPSILON * y_norm || res_norm == 0.0 => break,
            _ => {}
        }
        if support.len() >= max_iterations {
            if support.len() < atom_cap && matches!(stop, OmpStop::Residual(_)) {
                status = SolverStatus::MaxIterations;
            }
            break;
        }

        let correlations = a.tr_mul(&residual);
        let best = argmax(
            (0..cols)
                .filter(|&j| norms[j] > 0.0)
                .map(|j| (j, correlations[j].abs() / norms[j])),
        );
        let Some((j, _)) = best else {
            status = SolverStatus::Stagnated;
            break;
        };
        if selected[j] {
            status = SolverStatus::Stagnated;
            break;
        }

        let mut v = a.column(j).into_owned();
        let mut r_col = vec![0.0; q_cols.len() + 1];
        for _ in 0..2 {
            for (i, q) in q_cols.iter().enumerate() {
                let c = q.dot(&v);
                v.axpy(-c, q, 1.0);
                r_col[i] += c;
            }
        }
        let v_norm = v.norm();
        if v_norm <= DEPENDENCE_TOL * norms[j] {
            status = SolverStatus::Stagnated;
            break;
        }
        r_col[q_cols.len()] = v_norm;
        let q = v / v_norm;
        let coef = q.dot(&residual);
        residual.axpy(-coef, &q, 1.0);
        qty.push(q.dot(y));
        q_cols.push(q);
        r_cols.push(r_col);
        selected[j] = true;
        support.push(j);
        residual_history.push(residual.norm());
    }

    // Back substitution R c = Q^T y.
    let k = support.len();
    let mut coeffs = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = qty[i];
        for (jj, c) in coeffs.iter().enumerate().take(k).skip(i + 1) {
            s -= r_cols[jj][i] * c;
        }
        coeffs[i] = s / r_cols[i][i];
    }
    let mut gamma = Vector::zeros(cols);
    for (&j, &c) in support.iter().zip(&coeffs) {
        gamma[j] = c;
    }
    Ok(OmpOutcome {
        gamma,
        iterations: k,
        support,
        residual_history,
        status,
    })
}
