//! Exhaustive l0 solvers. They enumerate every support (synthesis) or every
//! cosupport (analysis) level by level and are only meant for problems small
//! enough to enumerate; they serve as ground truth for the other solvers.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::model::AnalysisOperator;
use crate::numerics::{self, Matrix, Vector};

/// Largest number of subsets a single enumeration level may contain.
pub const ENUMERATION_GUARD: u128 = 10_000_000;

/// Feasibility threshold, relative to `1 + ||y||`, for a candidate solution.
pub const ORACLE_FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisOracleSolution {
    /// Sparsest feasible vector, `None` if nothing up to `k_max` is feasible.
    pub gamma: Option<Vector>,
    pub sparsity: Option<usize>,
    /// Exactly one support of minimal size is feasible.
    pub unique: bool,
    pub feasible_supports: usize,
    pub supports_tested: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOracleSolution {
    /// Most cosparse feasible signal, `None` if no level down to `l_min` is
    /// feasible.
    pub x: Option<Vector>,
    pub cosparsity: Option<usize>,
    /// Exactly one cosupport of maximal size is feasible and pins `x` down.
    pub unique: bool,
    pub feasible_cosupports: usize,
    pub cosupports_tested: usize,
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn check_guard(n: usize, levels: impl Iterator<Item = usize>) -> Result<()> {
    for k in levels {
        let combinations = binomial(n, k);
        if combinations > ENUMERATION_GUARD {
            return Err(Error::EnumerationGuard {
                combinations,
                guard: ENUMERATION_GUARD,
            });
        }
    }
    Ok(())
}

/// `min ||gamma||_0 s.t. a gamma = y` by enumerating supports of size
/// `0, 1, ..., k_max`. A minimal solution never needs more than `rank(a)`
/// atoms, so the search stops at `min(k_max, rows, cols)`.
pub fn oracle_synthesis(a: &Matrix, y: &Vector, k_max: usize) -> Result<SynthesisOracleSolution> {
    let (rows, cols) = a.shape();
    if rows != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "oracle: matrix has {rows} rows, measurements have length {}",
            y.len()
        )));
    }
    let k_max = k_max.min(rows).min(cols);
    check_guard(cols, 0..=k_max)?;
    let tol = ORACLE_FEASIBILITY_TOL * (1.0 + y.norm());

    let mut tested = 0;
    for k in 0..=k_max {
        let mut found: Option<Vector> = None;
        let mut feasible = 0;
        for support in (0..cols).combinations(k) {
            tested += 1;
            let a_s = numerics::select_columns(a, &support);
            let coeffs = numerics::least_squares(&a_s, y)?;
            if (&a_s * &coeffs - y).norm() > tol {
                continue;
            }
            feasible += 1;
            if found.is_none() {
                let mut gamma = Vector::zeros(cols);
                for (&j, &c) in support.iter().zip(coeffs.iter()) {
                    gamma[j] = c;
                }
                found = Some(gamma);
            }
        }
        if let Some(gamma) = found {
            return Ok(SynthesisOracleSolution {
                gamma: Some(gamma),
                sparsity: Some(k),
                unique: feasible == 1,
                feasible_supports: feasible,
                supports_tested: tested,
            });
        }
    }
    Ok(SynthesisOracleSolution {
        gamma: None,
        sparsity: None,
        unique: false,
        feasible_supports: 0,
        supports_tested: tested,
    })
}

/// `min ||Omega x||_0 s.t. m_mat x = y` by enumerating cosupports from size
/// `N` down to `l_min`. For each candidate `Lambda` the stacked system
/// `[Omega_Lambda; M] x = [0; y]` is solved in the least-squares sense and
/// accepted when its residual vanishes.
pub fn oracle_analysis(
    op: &AnalysisOperator,
    m_mat: &Matrix,
    y: &Vector,
    l_min: usize,
) -> Result<AnalysisOracleSolution> {
    let (n_rows, dim) = (op.n_rows(), op.dim());
    let m = m_mat.nrows();
    if m_mat.ncols() != dim || m != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "oracle: operator dimension {dim}, measurement matrix {m}x{}, measurements {}",
            m_mat.ncols(),
            y.len()
        )));
    }
    let l_min = l_min.min(n_rows);
    check_guard(n_rows, l_min..=n_rows)?;
    let tol = ORACLE_FEASIBILITY_TOL * (1.0 + y.norm());

    let mut rhs_full = Vector::zeros(n_rows + m);
    rhs_full.rows_mut(n_rows, m).copy_from(y);
    let mut tested = 0;
    for l in (l_min..=n_rows).rev() {
        let mut found: Option<(Vector, bool)> = None;
        let mut feasible = 0;
        for cosupport in (0..n_rows).combinations(l) {
            tested += 1;
            let mut stacked = Matrix::zeros(l + m, dim);
            for (i, &j) in cosupport.iter().enumerate() {
                stacked.row_mut(i).copy_from(&op.omega().row(j));
            }
            stacked.rows_mut(l, m).copy_from(m_mat);
            let rhs = rhs_full.rows(n_rows - l, l + m).into_owned();
            let x = numerics::least_squares(&stacked, &rhs)?;
            if (&stacked * &x - &rhs).norm() > tol {
                continue;
            }
            feasible += 1;
            if found.is_none() {
                let determined = numerics::svd(&stacked)?.numerical_rank == dim;
                found = Some((x, determined));
            }
        }
        if let Some((x, determined)) = found {
            return Ok(AnalysisOracleSolution {
                x: Some(x),
                cosparsity: Some(l),
                unique: feasible == 1 && determined,
                feasible_cosupports: feasible,
                cosupports_tested: tested,
            });
        }
    }
    Ok(AnalysisOracleSolution {
        x: None,
        cosparsity: None,
        unique: false,
        feasible_cosupports: 0,
        cosupports_tested: tested,
    })
}
