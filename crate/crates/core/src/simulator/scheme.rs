//! Spatial discretization: pressures, the implicit-Euler residual, its
//! analytic Jacobian, the discrete energy and masses.
//!
//! Unknowns are interleaved as `(h1_0, h_0, h1_1, h_1, ...)`. Nodes carry
//! trapezoid weights `w_i` (`dx/2` at the ends). The discrete energy is
//! `sum_intervals dx [sigma/2 (D h1)^2 + 1/2 (D (h1+h))^2] + sum_i w_i phi_eps`,
//! whose gradient divided by `w_i` is the nodal pressure with ghost
//! reflection at the ends; fluxes between nodes use the arithmetic mean of
//! the nodal mobilities.

use super::banded::BandMatrix;
use super::{SimParams, SimState};
use crate::error::{Error, Result};

/// Bandwidth of the interleaved Jacobian (two blocks of two unknowns).
pub const BAND: usize = 5;

type M2 = [[f64; 2]; 2];

/// Mobility matrix `Q(h1, h)`.
pub fn mobility(mu: f64, h1: f64, h: f64) -> Result<M2> {
    if !(h1 > 0.0 && h > 0.0) {
        return Err(Error::Domain(format!(
            "mobility needs positive heights, got h1={h1}, h={h}"
        )));
    }
    let off = h1 * h1 * h / 2.0 / mu;
    Ok([
        [h1.powi(3) / 3.0 / mu, off],
        [off, h.powi(3) / 3.0 + h1 * h * h / mu],
    ])
}

/// Partial derivatives of `Q` with respect to `h1` and `h`.
fn mobility_derivs(mu: f64, h1: f64, h: f64) -> (M2, M2) {
    let d1 = [[h1 * h1 / mu, h1 * h / mu], [h1 * h / mu, h * h / mu]];
    let d = [
        [0.0, h1 * h1 / 2.0 / mu],
        [h1 * h1 / 2.0 / mu, h * h + 2.0 * h1 * h / mu],
    ];
    (d1, d)
}

fn mv(m: &M2, v: [f64; 2]) -> [f64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

fn second_difference(u: &[f64], i: usize, dx2: f64) -> f64 {
    let n = u.len();
    let left = if i == 0 { u[1] } else { u[i - 1] };
    let right = if i + 1 == n { u[n - 2] } else { u[i + 1] };
    (left - 2.0 * u[i] + right) / dx2
}

/// Nodal pressures `p1 = -(sigma+1) D2 h1 - D2 h + Pi(h1)` and
/// `p2 = -D2 h1 - D2 h + Pi(h)`, with ghost reflection at both ends.
pub fn pressures(state: &SimState, params: &SimParams) -> Result<(Vec<f64>, Vec<f64>)> {
    pressure_arrays(&state.h1, &state.h, params)
}

pub(crate) fn pressure_arrays(
    h1: &[f64],
    h: &[f64],
    params: &SimParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let dx2 = params.dx().powi(2);
    let sg = params.sigma;
    let pot = &params.potential;
    let mut p1 = Vec::with_capacity(h1.len());
    let mut p2 = Vec::with_capacity(h1.len());
    for i in 0..h1.len() {
        let (a, b) = (second_difference(h1, i, dx2), second_difference(h, i, dx2));
        p1.push(-(sg + 1.0) * a - b + pot.pi_eps(h1[i])?);
        p2.push(-a - b + pot.pi_eps(h[i])?);
    }
    Ok((p1, p2))
}

/// Fluxes at the `N - 1` half nodes.
fn fluxes(
    h1: &[f64],
    h: &[f64],
    p1: &[f64],
    p2: &[f64],
    params: &SimParams,
) -> Result<Vec<[f64; 2]>> {
    let dx = params.dx();
    let q: Vec<M2> = h1
        .iter()
        .zip(h)
        .map(|(&a, &b)| mobility(params.mu, a, b))
        .collect::<Result<_>>()?;
    Ok((0..h1.len() - 1)
        .map(|i| {
            let qm = avg(&q[i], &q[i + 1]);
            mv(&qm, [(p1[i + 1] - p1[i]) / dx, (p2[i + 1] - p2[i]) / dx])
        })
        .collect())
}

fn avg(a: &M2, b: &M2) -> M2 {
    [
        [0.5 * (a[0][0] + b[0][0]), 0.5 * (a[0][1] + b[0][1])],
        [0.5 * (a[1][0] + b[1][0]), 0.5 * (a[1][1] + b[1][1])],
    ]
}

/// Discrete flux divergence at every node, interleaved.
fn divergence(h1: &[f64], h: &[f64], params: &SimParams) -> Result<Vec<f64>> {
    let n = h1.len();
    let (p1, p2) = pressure_arrays(h1, h, params)?;
    let f = fluxes(h1, h, &p1, &p2, params)?;
    let dx = params.dx();
    let mut out = vec![0.0; 2 * n];
    for i in 0..n {
        let right = if i + 1 < n { f[i] } else { [0.0, 0.0] };
        let left = if i > 0 { f[i - 1] } else { [0.0, 0.0] };
        let w = weight(i, n, dx);
        out[2 * i] = (right[0] - left[0]) / w;
        out[2 * i + 1] = (right[1] - left[1]) / w;
    }
    Ok(out)
}

pub(crate) fn weight(i: usize, n: usize, dx: f64) -> f64 {
    if i == 0 || i + 1 == n {
        0.5 * dx
    } else {
        dx
    }
}

/// Implicit-Euler residual `(u_new - u_old)/dt - div(Q D p(u_new))`,
/// interleaved as `(h1_0, h_0, h1_1, ...)`.
pub fn residual(new: &SimState, old: &SimState, dt: f64, params: &SimParams) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return Err(Error::Usage(format!("dt must be positive, got {dt}")));
    }
    check_same_grid(new, old)?;
    let div = divergence(&new.h1, &new.h, params)?;
    Ok((0..new.len())
        .flat_map(|i| {
            [
                (new.h1[i] - old.h1[i]) / dt - div[2 * i],
                (new.h[i] - old.h[i]) / dt - div[2 * i + 1],
            ]
        })
        .collect())
}

fn check_same_grid(a: &SimState, b: &SimState) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Usage(format!(
            "states have {} and {} nodes",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// Analytic Jacobian of [`residual`] with respect to the interleaved new state.
pub fn residual_jacobian(new: &SimState, dt: f64, params: &SimParams) -> Result<BandMatrix> {
    let mut jac = neg_divergence_jacobian(new, params)?;
    for k in 0..2 * new.len() {
        jac.add(k, k, 1.0 / dt);
    }
    Ok(jac)
}

/// Jacobian of `-div(Q D p(u))`.
pub(crate) fn neg_divergence_jacobian(state: &SimState, params: &SimParams) -> Result<BandMatrix> {
    let (h1, h) = (&state.h1, &state.h);
    let n = h1.len();
    let dx = params.dx();
    let dx2 = dx * dx;
    let sg = params.sigma;
    let pot = &params.potential;
    let (p1, p2) = pressure_arrays(h1, h, params)?;
    let q: Vec<M2> = (0..n)
        .map(|i| mobility(params.mu, h1[i], h[i]))
        .collect::<Result<_>>()?;
    let dq: Vec<(M2, M2)> = (0..n)
        .map(|i| mobility_derivs(params.mu, h1[i], h[i]))
        .collect();
    let dpi: Vec<[f64; 2]> = (0..n)
        .map(|i| Ok([pot.pi_eps_deriv(h1[i])?, pot.pi_eps_deriv(h[i])?]))
        .collect::<Result<_>>()?;
    let kmat: M2 = [[sg + 1.0, 1.0], [1.0, 1.0]];

    // dp_j / du_k as a 2x2 block, for |j - k| <= 1.
    let dp = |j: usize, k: usize| -> M2 {
        let scale = if j == k {
            -2.0
        } else if (j == 0 && k == 1) || (j + 1 == n && k + 2 == n) {
            2.0
        } else {
            1.0
        };
        let mut m = [[0.0; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] = -kmat[r][c] * scale / dx2;
            }
        }
        if j == k {
            m[0][0] += dpi[j][0];
            m[1][1] += dpi[j][1];
        }
        m
    };

    let mut jac = BandMatrix::zeros(2 * n, BAND, BAND);
    // Flux F_{i+1/2} enters node i with +1/w_i and node i+1 with -1/w_{i+1};
    // the residual carries -div, hence the signs below.
    for i in 0..n - 1 {
        let qm = avg(&q[i], &q[i + 1]);
        let g = [(p1[i + 1] - p1[i]) / dx, (p2[i + 1] - p2[i]) / dx];
        let lo = i.saturating_sub(1);
        let hi = (i + 2).min(n - 1);
        for k in lo..=hi {
            // dF/du_k
            let mut df = [[0.0; 2]; 2];
            if k == i || k == i + 1 {
                let (d1, d) = dq[k];
                let (a, b) = (mv(&d1, g), mv(&d, g));
                for r in 0..2 {
                    df[r][0] += 0.5 * a[r];
                    df[r][1] += 0.5 * b[r];
                }
            }
            let mut ddp = [[0.0; 2]; 2];
            if k + 1 > i && k <= i + 2 {
                let m = dp(i + 1, k);
                for r in 0..2 {
                    for c in 0..2 {
                        ddp[r][c] += m[r][c];
                    }
                }
            }
            if k + 1 >= i && k <= i + 1 {
                let m = dp(i, k);
                for r in 0..2 {
                    for c in 0..2 {
                        ddp[r][c] -= m[r][c];
                    }
                }
            }
            for r in 0..2 {
                for c in 0..2 {
                    df[r][c] += (qm[r][0] * ddp[0][c] + qm[r][1] * ddp[1][c]) / dx;
                }
            }
            let (wi, wn) = (weight(i, n, dx), weight(i + 1, n, dx));
            for r in 0..2 {
                for c in 0..2 {
                    if df[r][c] != 0.0 {
                        jac.add(2 * i + r, 2 * k + c, -df[r][c] / wi);
                        jac.add(2 * (i + 1) + r, 2 * k + c, df[r][c] / wn);
                    }
                }
            }
        }
    }
    Ok(jac)
}

/// Discrete energy.
pub fn energy(state: &SimState, params: &SimParams) -> Result<f64> {
    let (h1, h) = (&state.h1, &state.h);
    let n = h1.len();
    let dx = params.dx();
    let sg = params.sigma;
    let mut e = 0.0;
    for i in 0..n - 1 {
        let d1 = (h1[i + 1] - h1[i]) / dx;
        let ds = (h1[i + 1] + h[i + 1] - h1[i] - h[i]) / dx;
        e += dx * (0.5 * sg * d1 * d1 + 0.5 * ds * ds);
    }
    for i in 0..n {
        e += weight(i, n, dx) * params.potential.phi_eps(h1[i], h[i])?;
    }
    Ok(e)
}

/// Trapezoid masses `(M1, M)`.
pub fn masses(state: &SimState, params: &SimParams) -> (f64, f64) {
    let n = state.len();
    let dx = params.dx();
    (0..n).fold((0.0, 0.0), |(a, b), i| {
        let w = weight(i, n, dx);
        (a + w * state.h1[i], b + w * state.h[i])
    })
}

/// Residual scaled by `dt` (height units) and its Jacobian.
pub(crate) fn scaled_system(
    u: &SimState,
    old: &SimState,
    dt: f64,
    params: &SimParams,
) -> Result<(Vec<f64>, BandMatrix)> {
    let div = divergence(&u.h1, &u.h, params)?;
    let r: Vec<f64> = (0..u.len())
        .flat_map(|i| {
            [
                u.h1[i] - old.h1[i] - dt * div[2 * i],
                u.h[i] - old.h[i] - dt * div[2 * i + 1],
            ]
        })
        .collect();
    let mut jac = BandMatrix::zeros(2 * u.len(), BAND, BAND);
    let nd = neg_divergence_jacobian(u, params)?;
    for k in 0..2 * u.len() {
        for j in k.saturating_sub(BAND)..=(k + BAND).min(2 * u.len() - 1) {
            let v = nd.get(k, j);
            if v != 0.0 {
                jac.add(k, j, dt * v);
            }
        }
        jac.add(k, k, 1.0);
    }
    Ok((r, jac))
}
