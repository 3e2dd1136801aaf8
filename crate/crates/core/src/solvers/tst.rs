use crate::error::{Error, Result};
use crate::numerics::{self, Matrix, Vector};

use super::{column_norms, top_indices, SolverStatus, SynthesisOutcome};

const DEFAULT_MAX_ITERATIONS: usize = 100;

/// Two-stage thresholding parameters. `alpha` is the number of entries added
/// from the proxy in stage one and `beta` the number kept in stage two; both
/// default to the target sparsity, which makes the iteration subspace pursuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TstParams {
    pub alpha: Option<usize>,
    pub beta: Option<usize>,
    pub kappa: f64,
}

impl Default for TstParams {
    fn default() -> Self {
        Self {
            alpha: None,
            beta: None,
            kappa: 1.0,
        }
    }
}

/// Two-stage thresholding for `a gamma = y` with target sparsity `k`.
///
/// Thresholding is done on the column-normalized system so that column scale
/// does not bias the selection. The iterate with the smallest residual seen
/// (the zero vector included) is returned.
pub fn tst(
    a: &Matrix,
    y: &Vector,
    k: usize,
    params: &TstParams,
    max_iterations: Option<usize>,
) -> Result<SynthesisOutcome> {
    let (rows, cols) = a.shape();
    if rows != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "tst: matrix has {rows} rows, measurements have length {}",
            y.len()
        )));
    }
    if k == 0 || k > cols {
        return Err(Error::InvalidParameter(format!(
            "tst sparsity must satisfy 1 <= k <= {cols}, got {k}"
        )));
    }
    let alpha = params.alpha.unwrap_or(k).min(cols);
    let beta = params.beta.unwrap_or(k).min(cols);
    let max_iterations = max_iterations.unwrap_or(DEFAULT_MAX_ITERATIONS);

    let norms = column_norms(a);
    let mut a_unit = a.clone();
    for (mut col, &n) in a_unit.column_iter_mut().zip(&norms) {
        if n > 0.0 {
            col /= n;
        }
    }

    let y_norm = y.norm();
    let mut best = (Vector::zeros(cols), y_norm);
    if y_norm == 0.0 {
        return Ok(SynthesisOutcome {
            gamma: best.0,
            iterations: 0,
            status: SolverStatus::Converged,
        });
    }

    let score = |v: &Vector| -> Vec<f64> {
        v.iter()
            .zip(&norms)
            .map(|(x, &n)| if n > 0.0 { x.abs() } else { -1.0 })
            .collect()
    };

    let mut gamma = Vector::zeros(cols);
    let mut support: Vec<usize> = Vec::new();
    let mut residual = y.clone();
    let mut status = SolverStatus::MaxIterations;
    let mut iterations = 0;

    while iterations < max_iterations {
        iterations += 1;
        let proxy = &gamma + a_unit.tr_mul(&residual) * params.kappa;
        let mut union = top_indices(&score(&proxy), alpha);
        union.extend_from_slice(&support);
        union.sort_unstable();
        union.dedup();

        let wide = numerics::least_squares(&numerics::select_columns(&a_unit, &union), y)?;
        let mut wide_full = Vector::zeros(cols);
        for (&j, &c) in union.iter().zip(wide.iter()) {
            wide_full[j] = c;
        }
        let next_support = top_indices(&score(&wide_full), beta);
        let coeffs = numerics::least_squares(&numerics::select_columns(&a_unit, &next_support), y)?;
        let mut next = Vector::zeros(cols);
        for (&j, &c) in next_support.iter().zip(coeffs.iter()) {
            next[j] = c;
        }
        let next_residual = y - &a_unit * &next;
        let next_norm = next_residual.norm();

        let improved = next_norm < best.1;
        if improved {
            best = (next.clone(), next_norm);
        }
        if next_norm <= f64::EPSILON * y_norm || next_support == support {
            status = SolverStatus::Converged;
            break;
        }
        if !improved {
            status = SolverStatus::Stagnated;
            break;
        }
        gamma = next;
        support = next_support;
        residual = next_residual;
    }

    let mut out = best.0;
    for (c, &n) in out.iter_mut().zip(&norms) {
        if n > 0.0 {
            *c /= n;
        }
    }
    Ok(SynthesisOutcome {
        gamma: out,
        iterations,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RngSeed;
    use rand::seq::index;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn identity_full_sparsity_one_iteration() {
        let y = Vector::from_vec(vec![0.5, -2.0, 3.0]);
        let out = tst(&Matrix::identity(3, 3), &y, 3, &TstParams::default(), None).unwrap();
        assert!((out.gamma - &y).amax() < 1e-15);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn zero_measurements() {
        let a = Matrix::from_fn(4, 6, |i, j| (i * 6 + j) as f64 + 1.0);
        let out = tst(&a, &Vector::zeros(4), 2, &TstParams::default(), None).unwrap();
        assert_eq!(out.gamma, Vector::zeros(6));
    }

    #[test]
    fn rejects_bad_sparsity() {
        let a = Matrix::identity(3, 3);
        assert!(tst(&a, &Vector::zeros(3), 0, &TstParams::default(), None).is_err());
        assert!(tst(&a, &Vector::zeros(3), 4, &TstParams::default(), None).is_err());
    }

    #[test]
    fn planted_recovery_on_most_seeds() {
        let mut recovered = 0;
        let trials = 20;
        for seed in 0..trials {
            let mut rng = RngSeed(100 + seed).rng();
            let a = Matrix::from_fn(30, 60, |_, _| StandardNormal.sample(&mut rng));
            let mut g0 = Vector::zeros(60);
            for j in index::sample(&mut rng, 60, 4) {
                let v: f64 = StandardNormal.sample(&mut rng);
                g0[j] = v.signum() * (1.0 + v.abs());
            }
            let y = &a * &g0;
            let out = tst(&a, &y, 4, &TstParams::default(), None).unwrap();
            assert!(out.gamma.iter().filter(|v| **v != 0.0).count() <= 4);
            assert!((&y - &a * &out.gamma).norm() <= y.norm());
            if (out.gamma - g0).amax() < 1e-6 {
                recovered += 1;
            }
        }
        assert!(recovered * 2 > trials, "recovered {recovered}/{trials}");
    }
}
