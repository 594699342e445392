//! Existence-domain diagrams in the `(h_max, h1_max)` plane: membership,
//! boundary polylines, the symmetric points and the reflection symmetry.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::composites::{
    existence_report, maxima_from_params, params_from_maxima, two_side_shift_range, CompositeKind,
    CompositeSpec,
};
use crate::error::{Error, Result};

/// Diagram solution ids, 1..=11.
pub const SOLUTION_IDS: std::ops::RangeInclusive<u8> = 1..=11;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramConfig {
    pub sigma: f64,
    pub length: f64,
    pub well_depth: f64,
    pub h_max_range: (f64, f64),
    pub h1_max_range: (f64, f64),
    /// Samples per axis.
    pub resolution: usize,
}

impl DiagramConfig {
    /// Square window `[0, 2.5 L sqrt(|phi(1)|/2)]` on both axes.
    pub fn new(sigma: f64, length: f64, well_depth: f64) -> Self {
        let top = 2.5 * length * (well_depth / 2.0).sqrt();
        DiagramConfig {
            sigma,
            length,
            well_depth,
            h_max_range: (0.0, top),
            h1_max_range: (0.0, top),
            resolution: 200,
        }
    }

    pub fn with_resolution(mut self, resolution: usize) -> Self {
        self.resolution = resolution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.sigma) || !positive(self.length) || !positive(self.well_depth) {
            return Err(Error::Usage(
                "sigma, L and well depth must be positive".into(),
            ));
        }
        for (name, (lo, hi)) in [("h_max", self.h_max_range), ("h1_max", self.h1_max_range)] {
            if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
                return Err(Error::Usage(format!(
                    "{name} range must satisfy 0 <= lo < hi, got ({lo}, {hi})"
                )));
            }
        }
        if self.resolution < 2 {
            return Err(Error::Usage(format!(
                "resolution must be at least 2, got {}",
                self.resolution
            )));
        }
        Ok(())
    }

    /// Cell-centered grid coordinates of one axis.
    fn axis(&self, range: (f64, f64)) -> Vec<f64> {
        let d = (range.1 - range.0) / self.resolution as f64;
        (0..self.resolution)
            .map(|i| range.0 + (i as f64 + 0.5) * d)
            .collect()
    }

    fn cell(&self) -> (f64, f64) {
        let n = self.resolution as f64;
        (
            (self.h_max_range.1 - self.h_max_range.0) / n,
            (self.h1_max_range.1 - self.h1_max_range.0) / n,
        )
    }

    fn contains(&self, h_max: f64, h1_max: f64) -> bool {
        let (a, b) = (self.h_max_range, self.h1_max_range);
        h_max >= a.0 && h_max <= a.1 && h1_max >= b.0 && h1_max <= b.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Line,
    Parabola,
    Parametric,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Line => "line",
            CurveKind::Parabola => "parabola",
            CurveKind::Parametric => "parametric",
        }
    }
}

/// One active boundary segment of an existence domain.
#[derive(Debug, Clone, PartialEq)]
pub struct EdBoundary {
    pub solution_id: u8,
    pub segment: usize,
    /// `(h_max, h1_max)` points ordered along the curve.
    pub points: Vec<(f64, f64)>,
    pub curve_kind: CurveKind,
}

/// Whether `(h_max, h1_max)` lies in the open existence domain of `kind`.
///
/// Maxima are mapped to parameterization heights first. The two-side
/// solution exists when its shift interval is nonempty; it is tested at the
/// interval midpoint.
pub fn ed_membership(kind: CompositeKind, h_max: f64, h1_max: f64, cfg: &DiagramConfig) -> bool {
    if !(h_max > 0.0 && h1_max > 0.0) {
        return false;
    }
    let Some((a, b)) = params_from_maxima(kind, cfg.sigma, h1_max, h_max) else {
        return false;
    };
    let mut spec = CompositeSpec::new(kind, cfg.sigma, cfg.length, cfg.well_depth, a, b);
    if kind == CompositeKind::TwoSideSessileZigZag {
        let (lo, hi) = two_side_shift_range(&spec);
        if !(lo < hi) {
            return false;
        }
        spec = spec.with_shift(0.5 * (lo + hi));
    }
    existence_report(&spec)
        .map(|r| r.all_satisfied())
        .unwrap_or(false)
}

/// Bit `id - 1` is set for every solution id whose domain contains the point.
pub fn membership_mask(h_max: f64, h1_max: f64, cfg: &DiagramConfig) -> u16 {
    SOLUTION_IDS.fold(0u16, |m, id| {
        let kind = CompositeKind::from_solution_id(id).expect("ids 1..=11 are valid");
        if ed_membership(kind, h_max, h1_max, cfg) {
            m | (1 << (id - 1))
        } else {
            m
        }
    })
}

/// Point I on the `h1_max` axis and point II on the `h_max` axis, as
/// `(h_max, h1_max)`.
pub fn symmetric_points(cfg: &DiagramConfig) -> ((f64, f64), (f64, f64)) {
    let t = cfg.length * (cfg.well_depth / 2.0).sqrt();
    ((0.0, t / (cfg.sigma + 1.0).sqrt()), (t, 0.0))
}

/// Reflection fixing the line `h = sqrt(sigma+1) h1` along the direction
/// `(1, -1/sqrt(sigma+1))`.
pub fn reflect(sigma: f64, h_max: f64, h1_max: f64) -> (f64, f64) {
    let s = (sigma + 1.0).sqrt();
    // p = alpha (s, 1) + beta (1, -1/s)
    let alpha = (h_max / s + h1_max) / 2.0;
    let beta = (h_max - s * h1_max) / 2.0;
    (alpha * s - beta, alpha + beta / s)
}

/// Partner of a solution id under the reflection.
pub fn paired_id(id: u8) -> u8 {
    match id {
        1 => 2,
        2 => 1,
        3 => 4,
        4 => 3,
        6 => 7,
        7 => 6,
        10 => 11,
        11 => 10,
        other => other,
    }
}

fn map_mask(mask: u16) -> u16 {
    SOLUTION_IDS.fold(0u16, |m, id| {
        if mask & (1 << (id - 1)) != 0 {
            m | (1 << (paired_id(id) - 1))
        } else {
            m
        }
    })
}

/// Outcome of the reflection symmetry scan.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub sigma: f64,
    pub resolution: usize,
    /// Grid points whose image lies inside the window.
    pub compared: usize,
    /// Point-solution pairs skipped because either side is within one cell
    /// of that solution's boundary.
    pub boundary_skipped: usize,
    /// Point-solution pairs whose membership differs from the paired
    /// solution's membership at the image point.
    pub violations: usize,
    /// Violations per solution id 1..=11.
    pub per_solution: [usize; 11],
}

impl SymmetryReport {
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "sigma={}", self.sigma);
        let _ = writeln!(out, "resolution={}", self.resolution);
        let _ = writeln!(out, "compared={}", self.compared);
        let _ = writeln!(out, "boundary_skipped={}", self.boundary_skipped);
        let _ = writeln!(out, "violations={}", self.violations);
        for (i, v) in self.per_solution.iter().enumerate() {
            let _ = writeln!(out, "violations_{}={}", i + 1, v);
        }
        out
    }
}

/// Bits that are constant over the point and its four cell neighbors.
fn stable_bits(h: f64, h1: f64, cell: (f64, f64), cfg: &DiagramConfig) -> (u16, u16) {
    let center = membership_mask(h, h1, cfg);
    let mut unstable = 0u16;
    for (dh, dh1) in [(cell.0, 0.0), (-cell.0, 0.0), (0.0, cell.1), (0.0, -cell.1)] {
        unstable |= center ^ membership_mask(h + dh, h1 + dh1, cfg);
    }
    (center, !unstable)
}

/// Compares the membership at every grid point with the paired membership
/// at its reflection; pairs within one cell of a boundary are excluded.
pub fn reflect_check(cfg: &DiagramConfig) -> Result<SymmetryReport> {
    cfg.validate()?;
    if cfg.resolution < 50 {
        return Err(Error::Usage(format!(
            "reflect_check needs resolution >= 50, got {}",
            cfg.resolution
        )));
    }
    let (hs, h1s) = (cfg.axis(cfg.h_max_range), cfg.axis(cfg.h1_max_range));
    let cell = cfg.cell();
    let points: Vec<(f64, f64)> = h1s
        .iter()
        .flat_map(|&h1| hs.iter().map(move |&h| (h, h1)))
        .collect();
    let rows: Vec<Option<(usize, [usize; 11])>> = points
        .par_iter()
        .map(|&(h, h1)| {
            let (rh, rh1) = reflect(cfg.sigma, h, h1);
            if !cfg.contains(rh, rh1) || rh <= 0.0 || rh1 <= 0.0 {
                return None;
            }
            let (m, stable) = stable_bits(h, h1, cell, cfg);
            let (rm, rstable) = stable_bits(rh, rh1, cell, cfg);
            let (mapped, mapped_stable) = (map_mask(m), map_mask(stable));
            let mut skipped = 0;
            let mut viol = [0usize; 11];
            for id in SOLUTION_IDS {
                let bit = 1u16 << (id - 1);
                if mapped_stable & rstable & bit == 0 {
                    skipped += 1;
                } else if (mapped ^ rm) & bit != 0 {
                    viol[id as usize - 1] += 1;
                }
            }
            Some((skipped, viol))
        })
        .collect();
    let mut report = SymmetryReport {
        sigma: cfg.sigma,
        resolution: cfg.resolution,
        compared: 0,
        boundary_skipped: 0,
        violations: 0,
        per_solution: [0; 11],
    };
    for (skipped, viol) in rows.into_iter().flatten() {
        report.compared += 1;
        report.boundary_skipped += skipped;
        for (acc, v) in report.per_solution.iter_mut().zip(viol) {
            *acc += v;
        }
    }
    report.violations = report.per_solution.iter().sum();
    Ok(report)
}

/// A closed-form curve that contains part of a domain boundary.
struct Candidate {
    id: u8,
    kind: CurveKind,
    points: Vec<(f64, f64)>,
}

const CURVE_SAMPLES: usize = 2000;

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

fn logspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    linspace(a.ln(), b.ln(), n).map(f64::exp)
}

/// Ray `h = ratio * h1` from the origin across the window.
fn ray(id: u8, ratio: f64, cfg: &DiagramConfig) -> Option<Candidate> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return None;
    }
    let t_end = (cfg.h_max_range.1 / ratio).min(cfg.h1_max_range.1);
    Some(Candidate {
        id,
        kind: CurveKind::Line,
        points: linspace(0.0, t_end, CURVE_SAMPLES)
            .map(|t| (ratio * t, t))
            .collect(),
    })
}

fn vertical(id: u8, h: f64, cfg: &DiagramConfig) -> Candidate {
    let (lo, hi) = cfg.h1_max_range;
    Candidate {
        id,
        kind: CurveKind::Line,
        points: linspace(lo, hi, CURVE_SAMPLES).map(|t| (h, t)).collect(),
    }
}

fn horizontal(id: u8, h1: f64, cfg: &DiagramConfig) -> Candidate {
    let (lo, hi) = cfg.h_max_range;
    Candidate {
        id,
        kind: CurveKind::Line,
        points: linspace(lo, hi, CURVE_SAMPLES).map(|t| (t, h1)).collect(),
    }
}

/// Line through two points, extended across the window along `h_max`.
fn line_h1_of_h(id: u8, f: impl Fn(f64) -> f64, cfg: &DiagramConfig) -> Candidate {
    let (lo, hi) = cfg.h_max_range;
    Candidate {
        id,
        kind: CurveKind::Line,
        points: linspace(lo, hi, CURVE_SAMPLES).map(|h| (h, f(h))).collect(),
    }
}

fn candidates(cfg: &DiagramConfig) -> Vec<Candidate> {
    let (sg, l, phi) = (cfg.sigma, cfg.length, cfg.well_depth);
    let s = (sg + 1.0).sqrt();
    let t = l * (phi / 2.0).sqrt();
    let t_up = l * ((sg + 1.0) * phi / 2.0).sqrt();
    let t_zz = l * (sg * phi / 2.0).sqrt();
    let (point_i, point_ii) = (t / s, t);
    let mut out = Vec::new();
    let (hlo, hhi) = cfg.h_max_range;
    let (h1lo, h1hi) = cfg.h1_max_range;

    // Stripes and drop lines.
    out.extend(ray(1, sg + 1.0, cfg));
    out.push(vertical(1, t_up / sg.sqrt(), cfg));
    out.extend(ray(2, 1.0, cfg));
    out.push(horizontal(2, t / sg.sqrt(), cfg));
    out.push(horizontal(3, point_i, cfg));
    out.push(vertical(4, point_ii, cfg));

    // Pentagon lines.
    out.push(line_h1_of_h(5, |h| (t_zz / (s + 1.0) - h) / s, cfg));
    out.push(line_h1_of_h(5, |h| (t_zz + h) / (sg + 1.0), cfg));
    out.push(line_h1_of_h(5, |h| h - t_zz / s, cfg));

    // Sessile lens: parabola plus the singular-merge ray, and the extra line
    // for sigma > 1.
    let parabola6: Vec<(f64, f64)> = linspace(hlo, hhi, CURVE_SAMPLES)
        .map(|h| (h, (t_up * t_up - sg * h * h) / ((sg + 1.0) * t_up)))
        .collect();
    out.push(Candidate {
        id: 6,
        kind: CurveKind::Parabola,
        points: parabola6,
    });
    if sg < 1.0 {
        out.extend(ray(6, (1.0 + sg) / (1.0 - sg), cfg));
    } else if sg > 1.0 {
        out.push(line_h1_of_h(6, |h| (t_up - h) / (sg + 1.0), cfg));
        out.extend(ray(6, (1.0 + sg) / (sg.sqrt() - 1.0), cfg));
        out.extend(ray(6, (1.0 + sg) / (sg - 1.0), cfg));
    }

    // Sessile internal drop, mirrored roles.
    let parabola7: Vec<(f64, f64)> = linspace(h1lo, h1hi, CURVE_SAMPLES)
        .map(|h1| ((t * t - sg * h1 * h1) / t, h1))
        .collect();
    out.push(Candidate {
        id: 7,
        kind: CurveKind::Parabola,
        points: parabola7,
    });
    if sg < 1.0 {
        out.extend(ray(7, 1.0 - sg, cfg));
    } else if sg > 1.0 {
        let pts = linspace(h1lo, h1hi, CURVE_SAMPLES)
            .map(|h1| (t - h1, h1))
            .collect();
        out.push(Candidate {
            id: 7,
            kind: CurveKind::Line,
            points: pts,
        });
        out.extend(ray(7, sg.sqrt() - 1.0, cfg));
        out.extend(ray(7, sg - 1.0, cfg));
    }

    // Two drops: hypotenuse between the drop lines' base points.
    out.push(line_h1_of_h(8, |h| point_i * (1.0 - h / point_ii), cfg));

    // Two-side sessile zigzag: parametric in hbar.
    let pts9: Vec<(f64, f64)> = logspace(1e-2, 1e2, 4 * CURVE_SAMPLES)
        .filter_map(|hb| {
            let g = hb - sg - 1.0;
            let bracket = hb
                + s
                + (-s * (sg * hb * hb + g * g).sqrt() + hb * (sg + (hb - 1.0).powi(2)).sqrt()) / g;
            let a = t / bracket;
            (a.is_finite() && a > 0.0).then(|| {
                let (m1, m) =
                    maxima_from_params(CompositeKind::TwoSideSessileZigZag, sg, a, hb * a);
                (m, m1)
            })
        })
        .collect();
    out.push(Candidate {
        id: 9,
        kind: CurveKind::Parametric,
        points: pts9,
    });

    // h1-sessile zigzag: curve in (h1_max, h_m) plus the ray hbar = sigma + 1.
    let pts10: Vec<(f64, f64)> = linspace(0.0, t, 4 * CURVE_SAMPLES)
        .skip(1)
        .filter_map(|a| {
            let b = (t * t - (sg + 1.0) * a * a) / (2.0 * (t - a));
            (b.is_finite() && b > 0.0).then(|| {
                let (m1, m) = maxima_from_params(CompositeKind::H1SessileZigZag, sg, a, b);
                (m, m1)
            })
        })
        .collect();
    out.push(Candidate {
        id: 10,
        kind: CurveKind::Parametric,
        points: pts10,
    });
    out.extend(ray(10, sg + 1.0, cfg));

    // h-sessile zigzag: curve in (h_max, h1_m) plus the ray hbar = 1.
    let pts11: Vec<(f64, f64)> = linspace(0.0, t_up, 4 * CURVE_SAMPLES)
        .skip(1)
        .filter_map(|b| {
            let a = (t_up * t_up - (sg + 1.0) * b * b) / (2.0 * (sg + 1.0) * (t_up - b));
            (a.is_finite() && a > 0.0).then(|| {
                let (m1, m) = maxima_from_params(CompositeKind::HSessileZigZag, sg, a, b);
                (m, m1)
            })
        })
        .collect();
    out.push(Candidate {
        id: 11,
        kind: CurveKind::Parametric,
        points: pts11,
    });
    out.extend(ray(11, 1.0, cfg));

    out
}

/// Whether membership of `id` flips across the curve at `points[i]`.
fn is_active(id: u8, points: &[(f64, f64)], i: usize, probe: f64, cfg: &DiagramConfig) -> bool {
    let (p, q) = (
        points[i.saturating_sub(1)],
        points[(i + 1).min(points.len() - 1)],
    );
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    let norm = dx.hypot(dy);
    if norm == 0.0 {
        return false;
    }
    let (nx, ny) = (-dy / norm * probe, dx / norm * probe);
    let (x, y) = points[i];
    let kind = CompositeKind::from_solution_id(id).expect("valid id");
    ed_membership(kind, x + nx, y + ny, cfg) != ed_membership(kind, x - nx, y - ny, cfg)
}

/// Boundary polylines of every domain, clipped to the window and to the
/// parts of each closed-form curve across which membership actually flips.
pub fn ed_boundaries(cfg: &DiagramConfig) -> Result<Vec<EdBoundary>> {
    cfg.validate()?;
    let scale =
        (cfg.h_max_range.1 - cfg.h_max_range.0).max(cfg.h1_max_range.1 - cfg.h1_max_range.0);
    let probe = 1e-6 * scale;
    let mut out: Vec<EdBoundary> = Vec::new();
    let per_curve: Vec<Vec<EdBoundary>> = candidates(cfg)
        .into_par_iter()
        .map(|cand| {
            let active: Vec<bool> = (0..cand.points.len())
                .map(|i| {
                    let (x, y) = cand.points[i];
                    x > 0.0
                        && y > 0.0
                        && cfg.contains(x, y)
                        && is_active(cand.id, &cand.points, i, probe, cfg)
                })
                .collect();
            let mut segs = Vec::new();
            let mut cur: Vec<(f64, f64)> = Vec::new();
            for (i, &on) in active.iter().enumerate() {
                if on {
                    cur.push(cand.points[i]);
                } else if !cur.is_empty() {
                    segs.push(std::mem::take(&mut cur));
                }
            }
            if !cur.is_empty() {
                segs.push(cur);
            }
            segs.into_iter()
                .filter(|s| s.len() >= 2)
                .map(|points| EdBoundary {
                    solution_id: cand.id,
                    segment: 0,
                    points,
                    curve_kind: cand.kind,
                })
                .collect()
        })
        .collect();
    for b in per_curve.into_iter().flatten() {
        let segment = out
            .iter()
            .filter(|o| o.solution_id == b.solution_id)
            .count();
        out.push(EdBoundary { segment, ..b });
    }
    out.sort_by_key(|b| (b.solution_id, b.segment));
    Ok(out)
}

/// Membership CSV `h_max,h1_max,solution_id,member` over the grid.
pub fn membership_csv(cfg: &DiagramConfig) -> Result<String> {
    cfg.validate()?;
    let (hs, h1s) = (cfg.axis(cfg.h_max_range), cfg.axis(cfg.h1_max_range));
    let points: Vec<(f64, f64)> = h1s
        .iter()
        .flat_map(|&h1| hs.iter().map(move |&h| (h, h1)))
        .collect();
    let masks: Vec<u16> = points
        .par_iter()
        .map(|&(h, h1)| membership_mask(h, h1, cfg))
        .collect();
    let mut out = String::from("h_max,h1_max,solution_id,member\n");
    for (&(h, h1), mask) in points.iter().zip(masks) {
        for id in SOLUTION_IDS {
            let _ = writeln!(
                out,
                "{h},{h1},{id},{}",
                u8::from(mask & (1 << (id - 1)) != 0)
            );
        }
    }
    Ok(out)
}

/// Boundary CSV `solution_id,segment,idx,h_max,h1_max`.
pub fn boundaries_csv(boundaries: &[EdBoundary]) -> String {
    let mut out = String::from("solution_id,segment,idx,h_max,h1_max\n");
    for b in boundaries {
        for (idx, (h, h1)) in b.points.iter().enumerate() {
            let _ = writeln!(out, "{},{},{idx},{h},{h1}", b.solution_id, b.segment);
        }
    }
    out
}

#[cfg(test)]
mod tests;
