//! Levenberg–Marquardt least squares with a finite-difference Jacobian.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Iteration cap.
pub const MAX_ITERATIONS: usize = 200;
/// Converged when every parameter moves by less than this fraction.
pub const RELATIVE_STEP_TOLERANCE: f64 = 1e-8;

/// Outcome of a converged fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LmSolution {
    pub params: Vec<f64>,
    /// `√diag(s² (JᵀJ)⁻¹)` with `s² = ‖r‖² / (m − p)`.
    pub std_errors: Vec<f64>,
    pub residuals: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

fn cost(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

fn jacobian<F>(f: &F, p: &[f64], r0: &[f64]) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let m = r0.len();
    let mut jac = DMatrix::zeros(m, p.len());
    for j in 0..p.len() {
        let h = 1e-6 * p[j].abs().max(1e-3);
        let mut up = p.to_vec();
        up[j] += h;
        let mut down = p.to_vec();
        down[j] -= h;
        let column: Vec<f64> = match (f(&up), f(&down)) {
            (Some(a), Some(b)) => a.iter().zip(&b).map(|(a, b)| (a - b) / (2.0 * h)).collect(),
            (Some(a), None) => a.iter().zip(r0).map(|(a, b)| (a - b) / h).collect(),
            (None, Some(b)) => r0.iter().zip(&b).map(|(a, b)| (a - b) / h).collect(),
            (None, None) => {
                return Err(Error::DegenerateData(format!("model undefined around parameter {j}")));
            }
        };
        jac.set_column(j, &DVector::from_vec(column));
    }
    Ok(jac)
}

/// Minimises `‖f(p)‖²` from `start`. `f` returns `None` for parameters
/// outside the model's domain; such steps are rejected.
pub fn levenberg_marquardt<F>(f: F, start: &[f64]) -> Result<LmSolution>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let mut p = start.to_vec();
    let mut r = f(&p).ok_or_else(|| Error::DegenerateData("initial guess lies outside the model domain".into()))?;
    let (m, n) = (r.len(), p.len());
    if m < n {
        return Err(Error::DegenerateData(format!("{m} residuals cannot determine {n} parameters")));
    }
    let mut c = cost(&r);
    let mut lambda = 1e-3;
    for iteration in 1..=MAX_ITERATIONS {
        let jac = jacobian(&f, &p, &r)?;
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * DVector::from_column_slice(&r);
        if grad.iter().all(|g| *g == 0.0) {
            return finish(&f, p, r, iteration);
        }
        let mut accepted = false;
        let mut last_step_small = false;
        // inner loop: raise the damping until a step lowers the cost
        for _ in 0..60 {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-300);
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = chol.solve(&(-&grad));
            let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            last_step_small = p
                .iter()
                .zip(step.iter())
                .all(|(pi, si)| si.abs() <= RELATIVE_STEP_TOLERANCE * pi.abs().max(1e-12));
            match f(&trial) {
                Some(rt) if cost(&rt) <= c => {
                    p = trial;
                    c = cost(&rt);
                    r = rt;
                    lambda = (lambda / 10.0).max(1e-12);
                    accepted = true;
                    break;
                }
                _ => {
                    if last_step_small {
                        break;
                    }
                    lambda *= 10.0;
                }
            }
        }
        if last_step_small || !accepted && lambda > 1e20 {
            return finish(&f, p, r, iteration);
        }
    }
    Err(Error::NoConvergence { iterations: MAX_ITERATIONS })
}

fn finish<F>(f: &F, params: Vec<f64>, residuals: Vec<f64>, iterations: usize) -> Result<LmSolution>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let (m, n) = (residuals.len(), params.len());
    let jac = jacobian(f, &params, &residuals)?;
    let jtj = jac.transpose() * &jac;
    let rss = cost(&residuals);
    let s2 = if m > n { rss / (m - n) as f64 } else { 0.0 };
    let std_errors = match jtj.try_inverse() {
        Some(inv) => (0..n).map(|k| (s2 * inv[(k, k)]).max(0.0).sqrt()).collect(),
        None => vec![f64::INFINITY; n],
    };
    Ok(LmSolution { params, std_errors, residual_norm: rss.sqrt(), residuals, iterations })
}
