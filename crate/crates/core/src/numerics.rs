//! Dense linear algebra used throughout the crate: SVD with numerical rank,
//! Moore-Penrose pseudo-inverse, orthonormal nullspace bases and minimum-norm
//! least squares.
//!
//! Every routine is a pure function of its inputs. Non-finite inputs are
//! rejected up front so that no NaN or infinity can leak into a solver.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Tunables for the decompositions in this module.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LinalgConfig {
    /// Relative rank cutoff. `None` selects `max(rows, cols) * f64::EPSILON`.
    pub rank_rtol: Option<f64>,
}

impl LinalgConfig {
    /// Absolute cutoff below which a singular value counts as zero.
    pub fn rank_threshold(&self, rows: usize, cols: usize, largest: f64) -> f64 {
        let rtol = self
            .rank_rtol
            .unwrap_or(rows.max(cols) as f64 * f64::EPSILON);
        rtol * largest
    }
}

#[derive(Debug, Clone)]
pub struct SvdResult {
    /// `rows x min(rows, cols)`, orthonormal columns.
    pub u: Matrix,
    /// Nonincreasing, nonnegative.
    pub singular_values: Vector,
    /// `cols x min(rows, cols)`, orthonormal columns.
    pub v: Matrix,
    pub numerical_rank: usize,
    /// The cutoff used to decide `numerical_rank`.
    pub rank_threshold: f64,
}

pub(crate) fn ensure_finite_matrix(a: &Matrix, what: &'static str) -> Result<()> {
    if a.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what })
    }
}

pub(crate) fn ensure_finite_vector(v: &Vector, what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what })
    }
}

pub fn svd(a: &Matrix) -> Result<SvdResult> {
    svd_with(a, &LinalgConfig::default())
}

pub fn svd_with(a: &Matrix, cfg: &LinalgConfig) -> Result<SvdResult> {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidParameter("svd of an empty matrix".into()));
    }
    ensure_finite_matrix(a, "svd input")?;
    let (u, singular_values, v) = decompose(a, false)?;
    let largest = singular_values.iter().copied().fold(0.0, f64::max);
    let rank_threshold = cfg.rank_threshold(rows, cols, largest);
    let numerical_rank = singular_values.iter().filter(|&&s| s > rank_threshold).count();
    Ok(SvdResult {
        u,
        singular_values,
        v,
        numerical_rank,
        rank_threshold,
    })
}

/// SVD through faer, which stays accurate on exactly rank-deficient input.
/// `full` returns square `u` and `v`; otherwise both have `min(rows, cols)`
/// columns.
fn decompose(a: &Matrix, full: bool) -> Result<(Matrix, Vector, Matrix)> {
    let (rows, cols) = a.shape();
    let f = faer::Mat::<f64>::from_fn(rows, cols, |i, j| a[(i, j)]);
    let svd = if full { f.svd() } else { f.thin_svd() }
        .map_err(|_| Error::SvdNoConvergence { rows, cols })?;
    let (fu, fs, fv) = (svd.U(), svd.S(), svd.V());
    let s = fs.column_vector();
    let mut order: Vec<usize> = (0..s.nrows()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let singular_values = Vector::from_iterator(order.len(), order.iter().map(|&q| s[q]));
    let permuted = |m: faer::MatRef<'_, f64>| {
        let k = m.ncols();
        Matrix::from_fn(m.nrows(), k, |i, q| {
            // Columns past the singular values (full mode) keep their order.
            let src = if q < order.len() { order[q] } else { q };
            m[(i, src)]
        })
    };
    Ok((permuted(fu), singular_values, permuted(fv)))
}

pub fn pseudo_inverse(a: &Matrix) -> Result<Matrix> {
    pseudo_inverse_with(a, &LinalgConfig::default())
}

/// Moore-Penrose pseudo-inverse `V diag(1/s) U^T`, with singular values at or
/// below the rank threshold zeroed instead of inverted.
pub fn pseudo_inverse_with(a: &Matrix, cfg: &LinalgConfig) -> Result<Matrix> {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Ok(Matrix::zeros(cols, rows));
    }
    let svd = svd_with(a, cfg)?;
    let r = svd.numerical_rank;
    let mut v_scaled = svd.v.columns(0, r).into_owned();
    for (j, mut col) in v_scaled.column_iter_mut().enumerate() {
        col /= svd.singular_values[j];
    }
    Ok(v_scaled * svd.u.columns(0, r).transpose())
}

pub fn nullspace_basis(a: &Matrix) -> Result<Matrix> {
    nullspace_basis_with(a, &LinalgConfig::default())
}

/// Orthonormal basis of `{z : a z = 0}`, one basis vector per row.
///
/// For a `rows x cols` input of numerical rank `r` the result is
/// `(cols - r) x cols`: the trailing block of the full set of right singular
/// vectors.
pub fn nullspace_basis_with(a: &Matrix, cfg: &LinalgConfig) -> Result<Matrix> {
    let (rows, cols) = a.shape();
    if cols == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    if rows == 0 {
        return Ok(Matrix::identity(cols, cols));
    }
    ensure_finite_matrix(a, "nullspace input")?;
    let (_, singular_values, v) = decompose(a, true)?;
    let largest = singular_values.iter().copied().fold(0.0, f64::max);
    let threshold = cfg.rank_threshold(rows, cols, largest);
    let rank = singular_values.iter().filter(|&&s| s > threshold).count();
    Ok(v.columns(rank, cols - rank).transpose())
}

pub fn least_squares(a: &Matrix, b: &Vector) -> Result<Vector> {
    least_squares_with(a, b, &LinalgConfig::default())
}

/// Minimum-norm minimizer of `||a z - b||_2`.
///
/// Well-conditioned tall systems go through Householder QR; anything wide,
/// rank deficient or badly conditioned goes through the SVD.
pub fn least_squares_with(a: &Matrix, b: &Vector, cfg: &LinalgConfig) -> Result<Vector> {
    let (rows, cols) = a.shape();
    if rows != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "least squares: matrix has {rows} rows, right-hand side has {}",
            b.len()
        )));
    }
    if cols == 0 {
        return Ok(Vector::zeros(0));
    }
    if rows == 0 {
        return Ok(Vector::zeros(cols));
    }
    ensure_finite_vector(b, "least squares right-hand side")?;
    if rows >= cols {
        ensure_finite_matrix(a, "least squares matrix")?;
        if let Some(z) = qr_solve(a, b) {
            return Ok(z);
        }
    }
    let svd = svd_with(a, cfg)?;
    let r = svd.numerical_rank;
    let mut coeffs = svd.u.columns(0, r).tr_mul(b);
    for (c, s) in coeffs.iter_mut().zip(svd.singular_values.iter()) {
        *c /= s;
    }
    Ok(svd.v.columns(0, r) * coeffs)
}

/// Ratio of smallest to largest `|R_ii|` below which QR hands over to the SVD.
const QR_CONDITION_CUTOFF: f64 = 1e-8;

fn qr_solve(a: &Matrix, b: &Vector) -> Option<Vector> {
    let cols = a.ncols();
    let qr = a.clone().qr();
    let r = qr.r();
    let diag = r.diagonal().map(f64::abs);
    let largest = diag.max();
    if largest == 0.0 || diag.min() <= QR_CONDITION_CUTOFF * largest {
        return None;
    }
    let mut rhs = b.clone();
    qr.q_tr_mul(&mut rhs);
    let rhs = rhs.rows(0, cols).into_owned();
    r.solve_upper_triangular(&rhs)
}

/// Euclidean norm of `a z - b`.
pub fn residual_norm(a: &Matrix, z: &Vector, b: &Vector) -> f64 {
    (a * z - b).norm()
}

/// Copy of the listed columns of `a`, in the order given.
pub fn select_columns(a: &Matrix, columns: &[usize]) -> Matrix {
    Matrix::from_fn(a.nrows(), columns.len(), |i, j| a[(i, columns[j])])
}

/// Copy of the listed rows of `a`, in the order given.
pub fn select_rows(a: &Matrix, rows: &[usize]) -> Matrix {
    Matrix::from_fn(rows.len(), a.ncols(), |i, j| a[(rows[i], j)])
}
