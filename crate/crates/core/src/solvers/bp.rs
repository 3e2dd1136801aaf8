//! Basis pursuit, `min ||gamma||_1 s.t. a gamma = y`, solved as a linear
//! program with a Mehrotra predictor-corrector primal-dual interior-point
//! method.
//!
//! The equality constraints are first replaced by an equivalent set with
//! orthonormal rows (`V_r^T gamma = S_r^-1 U_r^T y` from the SVD of `a`),
//! which drops dependent rows, detects infeasible right-hand sides and keeps
//! the Newton normal equations as well conditioned as the LP allows.
//!
//! With `gamma = u - v`, `u, v >= 0`, the LP is
//!
//! ```text
//! min 1^T (u, v)   s.t.  [A, -A] (u, v) = b,  (u, v) >= 0
//! ```
//!
//! whose normal matrix collapses to `A (D_u + D_v) A^T`.

use nalgebra::Cholesky;

use crate::error::{Error, Result};
use crate::numerics::{self, Matrix, Vector};

use super::SolverStatus;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpTolerances {
    /// Relative duality gap `s^T z / (1 + |c^T z|)` required at exit.
    pub duality_gap: f64,
    /// Relative primal and dual infeasibility required at exit.
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Relative distance of `y` from the range of `a` above which the
    /// constraints are declared infeasible.
    pub feasibility: f64,
}

impl Default for BpTolerances {
    fn default() -> Self {
        Self {
            duality_gap: 1e-10,
            newton_tol: 1e-10,
            max_newton: 100,
            feasibility: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BpOutcome {
    pub gamma: Vector,
    pub iterations: usize,
    pub status: SolverStatus,
    /// Relative duality gap of the returned LP iterate.
    pub duality_gap: f64,
    /// Dual objective `b^T lambda`: a lower bound on the optimal l1 norm when
    /// the dual iterate is feasible.
    pub dual_objective: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

struct Iterate {
    z: Vector,
    lambda: Vector,
    s: Vector,
}

/// `[A, -A] v` for `v = (v_u, v_v)`.
fn apply_b(a: &Matrix, v: &Vector) -> Vector {
    let n = a.ncols();
    a * (v.rows(0, n) - v.rows(n, n))
}

/// `[A, -A]^T w`.
fn apply_bt(a: &Matrix, w: &Vector) -> Vector {
    let n = a.ncols();
    let t = a.tr_mul(w);
    let mut out = Vector::zeros(2 * n);
    out.rows_mut(0, n).copy_from(&t);
    out.rows_mut(n, n).copy_from(&(-t));
    out
}

fn max_step(x: &Vector, dx: &Vector) -> f64 {
    x.iter()
        .zip(dx.iter())
        .filter(|(_, d)| **d < 0.0)
        .map(|(v, d)| -v / d)
        .fold(1.0, f64::min)
}

pub fn basis_pursuit(a: &Matrix, y: &Vector, tol: &BpTolerances) -> Result<BpOutcome> {
    let (rows, cols) = a.shape();
    if rows != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "basis pursuit: matrix has {rows} rows, measurements have length {}",
            y.len()
        )));
    }
    numerics::ensure_finite_vector(y, "basis pursuit measurements")?;
    let y_norm = y.norm();
    let zero = |status| BpOutcome {
        gamma: Vector::zeros(cols),
        iterations: 0,
        status,
        duality_gap: 0.0,
        dual_objective: 0.0,
        primal_infeasibility: 0.0,
        dual_infeasibility: 0.0,
    };
    if y_norm == 0.0 || rows == 0 || cols == 0 {
        return Ok(zero(SolverStatus::Converged));
    }

    let svd = numerics::svd(a)?;
    let r = svd.numerical_rank;
    if r == 0 {
        return Err(Error::Infeasible { residual: 1.0 });
    }
    let u_r = svd.u.columns(0, r);
    let proj = u_r.tr_mul(y);
    let off_range = (y - &u_r * &proj).norm() / y_norm;
    if off_range > tol.feasibility {
        return Err(Error::Infeasible { residual: off_range });
    }
    let a_orth = svd.v.columns(0, r).transpose();
    let b = Vector::from_fn(r, |i, _| proj[i] / svd.singular_values[i]);
    let n2 = 2 * cols;
    let c = Vector::from_element(n2, 1.0);
    let b_norm = b.norm();
    let c_norm = c.norm();

    // Mehrotra's starting point. A has orthonormal rows, so B B^T = 2 I.
    let mut it = {
        let mut z = apply_bt(&a_orth, &b) * 0.5;
        let lambda = Vector::zeros(r);
        let mut s = c.clone();
        let dz = (-1.5 * z.min()).max(0.0);
        z.add_scalar_mut(dz);
        let zs = z.dot(&s);
        let dz_hat = 0.5 * zs / s.sum();
        let ds_hat = 0.5 * zs / z.sum();
        z.add_scalar_mut(dz_hat);
        s.add_scalar_mut(ds_hat);
        Iterate { z, lambda, s }
    };

    let measure = |it: &Iterate| {
        let rp = &b - apply_b(&a_orth, &it.z);
        let rd = &c - apply_bt(&a_orth, &it.lambda) - &it.s;
        let primal = c.dot(&it.z);
        let gap = it.z.dot(&it.s) / (1.0 + primal.abs());
        (rp, rd, gap, primal)
    };

    let mut status = SolverStatus::MaxIterations;
    let mut iterations = 0;
    loop {
        let (rp, rd, gap, _) = measure(&it);
        let p_inf = rp.norm() / (1.0 + b_norm);
        let d_inf = rd.norm() / (1.0 + c_norm);
        if p_inf < tol.newton_tol && d_inf < tol.newton_tol && gap < tol.duality_gap {
            status = SolverStatus::Converged;
            break;
        }
        if iterations >= tol.max_newton {
            break;
        }
        iterations += 1;

        let mu = it.z.dot(&it.s) / n2 as f64;
        let d = it.z.component_div(&it.s);
        let d_sum = d.rows(0, cols) + d.rows(cols, cols);
        let mut scaled = a_orth.clone();
        for (mut col, w) in scaled.column_iter_mut().zip(d_sum.iter()) {
            col *= *w;
        }
        let mut normal = &scaled * a_orth.transpose();
        let chol = match Cholesky::new(normal.clone()) {
            Some(ch) => ch,
            None => {
                let shift = 1e-14 * normal.diagonal().max().max(1.0);
                for i in 0..r {
                    normal[(i, i)] += shift;
                }
                match Cholesky::new(normal) {
                    Some(ch) => ch,
                    None => {
                        status = SolverStatus::IllConditioned;
                        break;
                    }
                }
            }
        };

        // Solve for the step given the complementarity target r_c.
        let solve = |rc: &Vector| {
            let s_inv_rc = rc.component_div(&it.s);
            let rhs = &rp - apply_b(&a_orth, &s_inv_rc) + apply_b(&a_orth, &d.component_mul(&rd));
            let dlambda = chol.solve(&rhs);
            let ds = &rd - apply_bt(&a_orth, &dlambda);
            let dz = s_inv_rc - d.component_mul(&ds);
            (dz, dlambda, ds)
        };

        let zs = it.z.component_mul(&it.s);
        let (dz_aff, _, ds_aff) = solve(&(-&zs));
        let ap_aff = max_step(&it.z, &dz_aff);
        let ad_aff = max_step(&it.s, &ds_aff);
        let mu_aff = (&it.z + &dz_aff * ap_aff).dot(&(&it.s + &ds_aff * ad_aff)) / n2 as f64;
        let sigma = (mu_aff / mu).powi(3).min(1.0);

        let rc = Vector::from_element(n2, sigma * mu) - zs - dz_aff.component_mul(&ds_aff);
        let (dz, dlambda, ds) = solve(&rc);
        let eta = (1.0 - mu).clamp(0.9, 0.999_999);
        let ap = (eta * max_step(&it.z, &dz)).min(1.0);
        let ad = (eta * max_step(&it.s, &ds)).min(1.0);
        if !(ap > 0.0 && ad > 0.0) || !dz.iter().chain(dlambda.iter()).all(|v| v.is_finite()) {
            status = SolverStatus::IllConditioned;
            break;
        }
        it.z += dz * ap;
        it.lambda += dlambda * ad;
        it.s += ds * ad;
    }

    let (rp, rd, gap, primal) = measure(&it);
    let dual_objective = b.dot(&it.lambda);
    let mut gamma = it.z.rows(0, cols) - it.z.rows(cols, cols);
    polish(&a_orth, &b, &mut gamma, primal, gap);

    Ok(BpOutcome {
        gamma,
        iterations,
        status,
        duality_gap: gap,
        dual_objective,
        primal_infeasibility: rp.norm() / (1.0 + b_norm),
        dual_infeasibility: rd.norm() / (1.0 + c_norm),
    })
}

/// Snaps an interior-point solution onto its apparent support: the
/// coefficients that are negligible next to the largest one are dropped and
/// the rest refit exactly. The refit is kept only when it is feasible and no
/// worse in l1 norm than the LP optimum allows.
fn polish(a: &Matrix, b: &Vector, gamma: &mut Vector, l1_bound: f64, gap: f64) {
    let peak = gamma.amax();
    if peak == 0.0 {
        return;
    }
    let support: Vec<usize> = (0..gamma.len())
        .filter(|&j| gamma[j].abs() > 1e-9 * peak)
        .collect();
    if support.is_empty() || support.len() > a.nrows() {
        return;
    }
    let a_s = numerics::select_columns(a, &support);
    let Ok(coeffs) = numerics::least_squares(&a_s, b) else {
        return;
    };
    if (&a_s * &coeffs - b).norm() > 1e-12 * (1.0 + b.norm()) {
        return;
    }
    let l1 = coeffs.iter().map(|v| v.abs()).sum::<f64>();
    if l1 > l1_bound + gap * (1.0 + l1_bound) {
        return;
    }
    gamma.fill(0.0);
    for (&j, &c) in support.iter().zip(coeffs.iter()) {
        gamma[j] = c;
    }
}
