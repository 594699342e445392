//! Levenberg-Marquardt root solver for small (possibly overdetermined)
//! algebraic systems, with a central finite-difference Jacobian.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub max_iter: usize,
    /// Stop when the sup-norm of the residual drops below this.
    pub residual_tol: f64,
    /// Stop when the step is below `step_tol * (1 + |x|)` in sup-norm.
    pub step_tol: f64,
    /// Maximum number of damping increases per iteration.
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iter: 100,
            residual_tol: 1e-13,
            step_tol: 1e-14,
            max_halvings: 30,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual_norm: f64,
    pub converged: bool,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn jacobian<F>(f: &F, x: &[f64], rows: usize) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let mut jac = DMatrix::zeros(rows, n);
    let mut xp = x.to_vec();
    for j in 0..n {
        let h = 1e-6 * x[j].abs().max(1.0);
        xp[j] = x[j] + h;
        let fp = f(&xp)?;
        xp[j] = x[j] - h;
        let fm = f(&xp)?;
        xp[j] = x[j];
        for i in 0..rows {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Minimizes `|f(x)|_2` from `x0` by Levenberg-Marquardt steps with
/// Marquardt scaling; converged means the residual vanished to
/// `residual_tol` or the iteration stalled with a tiny step and residual.
pub fn gauss_newton<F>(f: F, x0: &[f64], opts: &NewtonOptions) -> Result<NewtonOutcome>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut x = x0.to_vec();
    let mut r = f(&x)?;
    let rows = r.len();
    let n = x.len();
    if rows < n {
        return Err(Error::Usage(format!(
            "underdetermined system: {rows} equations, {n} unknowns"
        )));
    }
    let mut mu = 1e-6;
    for it in 0..opts.max_iter {
        let norm = sup(&r);
        if norm <= opts.residual_tol {
            return Ok(NewtonOutcome {
                x,
                iterations: it,
                residual_norm: norm,
                converged: true,
            });
        }
        let jac = jacobian(&f, &x, rows)?;
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &rv;
        let base = l2(&r);
        let mut accepted = None;
        let mut last_step = 0.0;
        for _ in 0..=opts.max_halvings {
            let delta = if mu <= 1e-12 {
                jac.clone()
                    .svd(true, true)
                    .solve(&(-&rv), 1e-14)
                    .map_err(|e| Error::Numeric(e.to_string()))?
            } else {
                let mut a = jtj.clone();
                for i in 0..n {
                    a[(i, i)] += mu * jtj[(i, i)].max(1e-12);
                }
                match a.cholesky() {
                    Some(ch) => ch.solve(&(-&g)),
                    None => {
                        mu *= 10.0;
                        continue;
                    }
                }
            };
            last_step = sup(delta.as_slice());
            let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(xi, di)| xi + di).collect();
            if let Ok(rt) = f(&trial) {
                if rt.iter().all(|v| v.is_finite()) && l2(&rt) < base {
                    accepted = Some((trial, rt));
                    mu = (mu / 10.0).max(1e-15);
                    break;
                }
            }
            mu = if mu < 1e-12 { 1e-6 } else { mu * 10.0 };
        }
        match accepted {
            Some((xn, rn)) => {
                x = xn;
                r = rn;
            }
            None => {
                // No decrease possible: at a least-squares minimum to roundoff.
                let converged = norm <= 1e3 * opts.residual_tol.max(1e-13);
                return Ok(NewtonOutcome {
                    x,
                    iterations: it,
                    residual_norm: norm,
                    converged,
                });
            }
        }
        if last_step <= opts.step_tol * (1.0 + sup(&x)) {
            let norm = sup(&r);
            return Ok(NewtonOutcome {
                x,
                iterations: it + 1,
                residual_norm: norm,
                converged: norm <= 1e-9,
            });
        }
    }
    let norm = sup(&r);
    Ok(NewtonOutcome {
        x,
        iterations: opts.max_iter,
        residual_norm: norm,
        converged: norm <= opts.residual_tol,
    })
}
