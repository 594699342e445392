//! Sampling of leading-order solutions on a grid, with optional contact-line
//! mollification, and the integral pressure identities.

use std::fmt::Write as _;

use super::{LeadingOrderSolution, Shape};
use crate::blocks::{
    cl_inner_profile, utf_floor, BulkPiece, ClType, InnerProfile, Layer, UtfFloor,
};
use crate::error::{Error, Result};
use crate::potential::PotentialParams;

/// Half width of the mollified contact-line neighborhood, in units of eps.
pub const MOLLIFY_HALF_WIDTH: f64 = 10.0;

/// Grid nodes per unit length per `1/eps` needed to resolve contact lines.
pub const NODES_PER_EPS: f64 = 16.0;

/// Layer heights sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub x: Vec<f64>,
    pub h1: Vec<f64>,
    pub h: Vec<f64>,
    /// Set when the grid is too coarse to resolve the mollified contact lines.
    pub resolution_warning: bool,
}

impl Profile {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn layer(&self, layer: Layer) -> &[f64] {
        match layer {
            Layer::H1 => &self.h1,
            Layer::H => &self.h,
        }
    }

    /// Trapezoid integral of a layer.
    pub fn mass(&self, layer: Layer) -> f64 {
        trapezoid(&self.x, self.layer(layer))
    }

    /// Image under `x -> x0 + x1 - x` (reflection about the interval center).
    pub fn mirrored(&self) -> Profile {
        let (x0, x1) = (self.x[0], *self.x.last().unwrap());
        Profile {
            x: self.x.iter().rev().map(|x| x0 + x1 - x).collect(),
            h1: self.h1.iter().rev().copied().collect(),
            h: self.h.iter().rev().copied().collect(),
            resolution_warning: self.resolution_warning,
        }
    }

    /// CSV with header `x,h1,h`, shortest round-trip number formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.len() * 64);
        out.push_str("x,h1,h\n");
        for i in 0..self.len() {
            let _ = writeln!(out, "{},{},{}", self.x[i], self.h1[i], self.h[i]);
        }
        out
    }

    /// Parses CSV whose first three columns are `x,h1,h`; extra columns are
    /// ignored so that simulator snapshots can be read back.
    pub fn from_csv(text: &str) -> Result<Profile> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            pos: 0,
            msg: "empty profile CSV".into(),
        })?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 3 || cols[0] != "x" || cols[1] != "h1" || cols[2] != "h" {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("expected header starting with x,h1,h, got '{header}'"),
            });
        }
        let (mut x, mut h1, mut h) = (Vec::new(), Vec::new(), Vec::new());
        for (ln, line) in lines {
            let mut it = line.split(',').map(str::trim);
            let mut next = |name: &str| -> Result<f64> {
                let tok = it.next().ok_or_else(|| Error::Parse {
                    pos: ln,
                    msg: format!("missing {name}"),
                })?;
                tok.parse::<f64>().map_err(|e| Error::Parse {
                    pos: ln,
                    msg: format!("bad {name} '{tok}': {e}"),
                })
            };
            x.push(next("x")?);
            h1.push(next("h1")?);
            h.push(next("h")?);
        }
        if x.len() < 2 {
            return Err(Error::Parse {
                pos: 0,
                msg: "profile needs at least two rows".into(),
            });
        }
        Ok(Profile {
            x,
            h1,
            h,
            resolution_warning: false,
        })
    }
}

pub(crate) fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum()
}

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// UTF floors of a solution; an undetermined pressure contributes nothing.
pub(crate) fn solution_floors(sol: &LeadingOrderSolution, p: &PotentialParams) -> UtfFloor {
    utf_floor(
        sol.lambda1_0.unwrap_or(0.0),
        sol.lambda2_0.unwrap_or(0.0),
        p,
    )
}

fn base_value(sol: &LeadingOrderSolution, layer: Layer, x: f64, floor: f64) -> f64 {
    match sol.segment_at(layer, x).shape {
        Shape::Bulk(piece) => piece.eval(x).max(floor),
        Shape::Utf => floor,
    }
}

/// Bulk piece of `layer` that ends at the contact line `x_cl`.
fn adjacent_bulk(sol: &LeadingOrderSolution, layer: Layer, x_cl: f64) -> Option<BulkPiece> {
    let tol = 1e-12 * (1.0 + x_cl.abs());
    sol.pieces(layer).iter().find_map(|s| match s.shape {
        Shape::Bulk(p) if (s.x_from - x_cl).abs() <= tol || (s.x_to - x_cl).abs() <= tol => Some(p),
        _ => None,
    })
}

/// Samples `grid_points` uniform nodes on `[-L, 0]`.
///
/// Without mollification the profile is the leading-order one with thin
/// films at their floor heights. With mollification every contact line is
/// replaced, within `MOLLIFY_HALF_WIDTH * eps`, by the inner profile driven
/// by the adjacent bulk parabola, and the companion layer is corrected so
/// that the combination that stays smooth across the line does so.
pub fn sample_profile(
    sol: &LeadingOrderSolution,
    p: &PotentialParams,
    grid_points: usize,
    mollify: bool,
) -> Result<Profile> {
    if grid_points < 2 {
        return Err(Error::Usage(format!(
            "need at least 2 grid points, got {grid_points}"
        )));
    }
    let len = sol.spec.length;
    let dx = len / (grid_points - 1) as f64;
    let x: Vec<f64> = (0..grid_points)
        .map(|i| {
            if i + 1 == grid_points {
                0.0
            } else {
                -len + i as f64 * dx
            }
        })
        .collect();
    let (h1, h) = sample_at(sol, p, &x, mollify)?;
    let warning = mollify && ((grid_points - 1) as f64) < NODES_PER_EPS * len / p.eps;
    Ok(Profile {
        x,
        h1,
        h,
        resolution_warning: warning,
    })
}

/// Samples `(h1, h)` of `sol` at arbitrary nodes of `[-L, 0]`.
pub(crate) fn sample_at(
    sol: &LeadingOrderSolution,
    p: &PotentialParams,
    x: &[f64],
    mollify: bool,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let sigma = sol.spec.sigma;
    let floors = solution_floors(sol, p);
    let mut h1: Vec<f64> = x
        .iter()
        .map(|&xi| base_value(sol, Layer::H1, xi, floors.h1_floor))
        .collect();
    let mut h: Vec<f64> = x
        .iter()
        .map(|&xi| base_value(sol, Layer::H, xi, floors.h_floor))
        .collect();
    if mollify {
        let width = MOLLIFY_HALF_WIDTH * p.eps;
        let mut inner: Vec<(ClType, InnerProfile)> = Vec::new();
        for cl in &sol.cls {
            let prof = match inner.iter().find(|(t, _)| *t == cl.cl_type) {
                Some((_, prof)) => prof.clone(),
                None => {
                    let prof = cl_inner_profile(cl.cl_type, sigma, p, MOLLIFY_HALF_WIDTH)?;
                    inner.push((cl.cl_type, prof.clone()));
                    prof
                }
            };
            let vanishing = cl.cl_type.vanishing_layer();
            let Some(piece) = adjacent_bulk(sol, vanishing, cl.position) else {
                continue;
            };
            for i in 0..x.len() {
                let d = (x[i] - cl.position).abs();
                if d >= width {
                    continue;
                }
                let w = 1.0 - smoothstep((d - 0.5 * width) / (0.5 * width));
                let target = p.eps * prof.height_at_far(piece.eval(x[i]) / p.eps);
                let (own, other) = match vanishing {
                    Layer::H1 => (&mut h1, &mut h),
                    Layer::H => (&mut h, &mut h1),
                };
                let delta = w * (target - own[i]);
                own[i] += delta;
                match cl.cl_type {
                    ClType::I => other[i] -= delta,
                    ClType::II => other[i] -= delta / (sigma + 1.0),
                    ClType::III | ClType::IV => {}
                }
            }
        }
    }
    if let Some(i) = (0..x.len()).find(|&i| !(h1[i] > 0.0 && h[i] > 0.0)) {
        return Err(Error::Numeric(format!(
            "sampled profile is not positive at x={} (h1={}, h={})",
            x[i], h1[i], h[i]
        )));
    }
    Ok((h1, h))
}

/// Integral pressure identities evaluated on a constructed solution.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaRelation {
    /// Boundary identity `lambda1 [h(0)-h(-L)] + lambda2 [h1(0)-h1(-L)]`
    /// minus the potential differences, at leading-order boundary heights.
    /// `None` when a pressure is undetermined.
    pub boundary_residual: Option<f64>,
    /// Interval average of `Pi(h)`, the sampled estimate of `lambda1`.
    pub lambda1_average: f64,
    /// Interval average of `Pi(h1)`, the sampled estimate of `lambda2`.
    pub lambda2_average: f64,
    pub lambda1_0: Option<f64>,
    pub lambda2_0: Option<f64>,
}

impl LambdaRelation {
    /// Relative deviation of the averages from the leading-order pressures.
    pub fn average_errors(&self) -> (Option<f64>, Option<f64>) {
        let rel = |avg: f64, l: Option<f64>| l.map(|l| (avg - l).abs() / l.abs().max(1e-12));
        (
            rel(self.lambda1_average, self.lambda1_0),
            rel(self.lambda2_average, self.lambda2_0),
        )
    }
}

/// Evaluates the boundary pressure identity and the interval averages of the
/// disjoining pressure on a mollified sampling of `sol`.
pub fn lambda_relation_check(
    sol: &LeadingOrderSolution,
    p: &PotentialParams,
) -> Result<LambdaRelation> {
    let len = sol.spec.length;
    let floors = solution_floors(sol, p);
    let at = |layer: Layer, x: f64| base_value(sol, layer, x, floors.for_layer(layer));
    let boundary_residual = match (sol.lambda1_0, sol.lambda2_0) {
        (Some(l1), Some(l2)) => {
            let (h0, hl) = (at(Layer::H, 0.0), at(Layer::H, -len));
            let (h10, h1l) = (at(Layer::H1, 0.0), at(Layer::H1, -len));
            let lhs = l1 * (h0 - hl) + l2 * (h10 - h1l);
            let ph = |v: f64| p.phi(v / p.eps);
            let rhs = ph(h0)? + ph(h10)? - ph(hl)? - ph(h1l)?;
            Some(lhs - rhs)
        }
        _ => None,
    };
    let n = ((NODES_PER_EPS * len / p.eps).ceil() as usize + 1).max(2001);
    let prof = sample_profile(sol, p, n, true)?;
    let pi_h: Vec<f64> = prof.h.iter().map(|&v| p.pi_eps(v)).collect::<Result<_>>()?;
    let pi_h1: Vec<f64> = prof
        .h1
        .iter()
        .map(|&v| p.pi_eps(v))
        .collect::<Result<_>>()?;
    Ok(LambdaRelation {
        boundary_residual,
        lambda1_average: trapezoid(&prof.x, &pi_h) / len,
        lambda2_average: trapezoid(&prof.x, &pi_h1) / len,
        lambda1_0: sol.lambda1_0,
        lambda2_0: sol.lambda2_0,
    })
}
