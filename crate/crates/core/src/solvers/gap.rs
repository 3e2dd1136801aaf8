use crate::error::{Error, Result};
use crate::model::AnalysisOperator;
use crate::numerics::{self, Matrix, Vector};

use super::{argmax, SolverStatus};

/// Relative size of `||Omega_Lambda x||` at which the cosupport estimate is
/// considered exact.
const COSUPPORT_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GapOutcome {
    pub x: Vector,
    /// Final cosupport estimate, sorted.
    pub cosupport: Vec<usize>,
    pub iterations: usize,
    /// Size of the cosupport estimate at every solve, starting from `N`.
    pub cosupport_sizes: Vec<usize>,
    pub status: SolverStatus,
}

/// Greedy analysis pursuit for `min ||Omega x||_0 s.t. m_mat x = y`.
///
/// Starts from the full cosupport estimate and repeatedly solves
/// `min ||Omega_Lambda x||_2 s.t. m_mat x = y`, then drops the row of
/// `Lambda` with the largest `|(Omega x)_j|`. The constrained solve is done
/// over the affine solution set `x = x0 + Z z`, with `x0` the minimum-norm
/// solution and `Z` an orthonormal basis of the nullspace of `m_mat`.
///
/// Stops when `|Lambda|` reaches `target_l` (if given) or when
/// `||Omega_Lambda x|| <= 1e-9 ||x||`.
pub fn gap(
    op: &AnalysisOperator,
    m_mat: &Matrix,
    y: &Vector,
    target_l: Option<usize>,
) -> Result<GapOutcome> {
    let (n_rows, dim) = (op.n_rows(), op.dim());
    if m_mat.ncols() != dim || m_mat.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "gap: operator dimension {dim}, measurement matrix {}x{}, measurements {}",
            m_mat.nrows(),
            m_mat.ncols(),
            y.len()
        )));
    }
    let floor = target_l.unwrap_or(0).min(n_rows);

    let x0 = numerics::least_squares(m_mat, y)?;
    let free = numerics::nullspace_basis(m_mat)?.transpose();
    let omega = op.omega();
    let omega_x0 = omega * &x0;
    let omega_free = omega * &free;

    let mut cosupport: Vec<usize> = (0..n_rows).collect();
    let mut cosupport_sizes = Vec::new();
    let mut iterations = 0;
    let mut x = x0.clone();
    let mut status = SolverStatus::Converged;

    loop {
        cosupport_sizes.push(cosupport.len());
        x = if free.ncols() == 0 || cosupport.is_empty() {
            x0.clone()
        } else {
            let lhs = numerics::select_rows(&omega_free, &cosupport);
            let rhs = Vector::from_iterator(cosupport.len(), cosupport.iter().map(|&j| -omega_x0[j]));
            match numerics::least_squares(&lhs, &rhs) {
                Ok(z) => &x0 + &free * z,
                Err(Error::SvdNoConvergence { .. }) => {
                    status = SolverStatus::IllConditioned;
                    break;
                }
                Err(e) => return Err(e),
            }
        };
        let analysis = omega * &x;
        let on_cosupport = cosupport.iter().map(|&j| analysis[j].powi(2)).sum::<f64>().sqrt();
        if on_cosupport <= COSUPPORT_RESIDUAL_TOL * x.norm() || cosupport.len() <= floor {
            break;
        }
        let (pos, _) = argmax(cosupport.iter().enumerate().map(|(p, &j)| (p, analysis[j].abs())))
            .expect("cosupport is nonempty");
        cosupport.remove(pos);
        iterations += 1;
    }

    Ok(GapOutcome {
        x,
        cosupport,
        iterations,
        cosupport_sizes,
        status,
    })
}
