//! Matching systems of every composite, written in vertex form exactly as the
//! leading-order matching conditions at each contact line. They are the
//! independent oracle for the closed forms.

use super::{CompositeKind, CompositeSpec, LeadingOrderSolution};
use crate::error::{Error, Result};

/// Unknown names of the matching system of `kind`, in vector order.
///
/// Vertex positions and offsets follow the naming of the solution constants:
/// `x_c, C` (upper layer, both layers thick), `x_c1, C1` (lower layer, both
/// thick), `xt_c, Ct` (upper layer over a thin lower film), `xt_c1, Ct1`
/// (lower layer under a thin upper film); `C2..C5` are values and slopes at
/// contact lines.
pub fn unknown_names(kind: CompositeKind) -> &'static [&'static str] {
    match kind {
        CompositeKind::Lens => &["lambda1", "lambda2", "s", "C1", "C4", "C5"],
        CompositeKind::InternalDrop => &["lambda1", "lambda2", "s", "C", "C2", "C3"],
        CompositeKind::H1Drop => &["lambda2", "s"],
        CompositeKind::HDrop => &["lambda1", "s"],
        CompositeKind::ZigZag => &[
            "lambda1", "lambda2", "s", "s1", "x_c", "x_c1", "C", "C1", "C2", "C3", "C4", "C5",
        ],
        CompositeKind::SessileLens => {
            &["lambda1", "lambda2", "s", "s1", "xt_c1", "C4", "C5", "Ct1"]
        }
        CompositeKind::SessileInternalDrop => {
            &["lambda1", "lambda2", "s", "s1", "xt_c", "C2", "C3", "Ct0"]
        }
        CompositeKind::TwoDrops => &["lambda1", "lambda2", "s", "s1"],
        CompositeKind::TwoSideSessileZigZag => &[
            "lambda1", "lambda2", "s", "s1", "s2", "s3", "x_c", "x_c1", "xt_c1", "C", "C1", "C4",
            "C5", "C2", "C3",
        ],
        CompositeKind::H1SessileZigZag => &[
            "lambda1", "lambda2", "s", "s1", "s2", "x_c", "x_c1", "xt_c", "C", "C1", "C4", "C5",
            "C2", "C3",
        ],
        CompositeKind::HSessileZigZag => &[
            "lambda1", "lambda2", "s", "s1", "s2", "x_c", "x_c1", "xt_c1", "C", "C1", "C4", "C5",
            "C2", "C3",
        ],
        CompositeKind::LensOnZigZag => &[
            "lambda1",
            "lambda2",
            "s",
            "s1",
            "s2",
            "x_c",
            "x_c1",
            "C",
            "C1",
            "C2",
            "C3",
            "C4_zz",
            "C5_zz",
            "h1_lens_top",
            "h_lens_top",
            "C4",
            "C5",
        ],
    }
}

/// Unknown vector of the matching system taken from a constructed solution.
///
/// Fails when an unknown is undefined, e.g. a vertex position of a straight
/// bulk segment at a critical height ratio.
pub fn closed_form_unknowns(sol: &LeadingOrderSolution) -> Result<Vec<f64>> {
    unknown_names(sol.spec.kind)
        .iter()
        .map(|&name| {
            let v = match name {
                "lambda1" => sol.lambda1_0,
                "lambda2" => sol.lambda2_0,
                _ => sol.constant(name),
            };
            v.ok_or_else(|| {
                Error::Numeric(format!(
                    "unknown '{name}' is undefined for this {}",
                    sol.spec.kind
                ))
            })
        })
        .collect()
}

struct Sys {
    sg: f64,
    len: f64,
    a: f64,
    b: f64,
    k1: f64,
    k2: f64,
    k3: f64,
    k4: f64,
    k5: f64,
    phi: f64,
}

impl Sys {
    /// Curvature of the lower layer where both layers are thick.
    fn ca(&self, l1: f64, l2: f64) -> f64 {
        (l1 - l2) / (2.0 * self.sg)
    }
    /// Curvature of the upper layer where both layers are thick.
    fn cb(&self, l1: f64, l2: f64) -> f64 {
        (l2 - (self.sg + 1.0) * l1) / (2.0 * self.sg)
    }
    /// Curvature of the lower layer under a thin upper film.
    fn c2(&self, l2: f64) -> f64 {
        -l2 / (2.0 * (self.sg + 1.0))
    }
    /// Curvature of the upper layer over a thin lower film.
    fn c3(&self, l1: f64) -> f64 {
        -l1 / 2.0
    }
}

/// Residual of the matching system of `kind` at `unknowns`, with the model
/// parameters taken from `spec` (its `kind` and `inverted` fields are ignored).
///
/// The three-contact-line sessile zigzags append the leading-order pressure
/// relation that closes their systems; the two-side sessile zigzag holds its
/// shift fixed.
pub fn matching_residual(
    kind: CompositeKind,
    unknowns: &[f64],
    spec: &CompositeSpec,
) -> Result<Vec<f64>> {
    let names = unknown_names(kind);
    if unknowns.len() != names.len() {
        return Err(Error::Usage(format!(
            "{kind} matching system has {} unknowns, got {}",
            names.len(),
            unknowns.len()
        )));
    }
    let (sg, phi) = (spec.sigma, spec.well_depth);
    let sys = Sys {
        sg,
        len: spec.length,
        a: spec.h1_m,
        b: spec.h_m,
        k1: (2.0 * phi / sg).sqrt(),
        k2: (2.0 * (sg + 1.0) * phi / sg).sqrt(),
        k3: (2.0 * phi / (sg * (sg + 1.0))).sqrt(),
        k4: (2.0 * phi / (sg + 1.0)).sqrt(),
        k5: (2.0 * phi).sqrt(),
        phi,
    };
    let u = unknowns;
    let r = match kind {
        CompositeKind::Lens => lens(&sys, u),
        CompositeKind::InternalDrop => internal_drop(&sys, u),
        CompositeKind::H1Drop => {
            let (l2, s) = (u[0], u[1]);
            let d = sys.len - s;
            vec![sys.c2(l2) * d * d + sys.a, 2.0 * sys.c2(l2) * d + sys.k4]
        }
        CompositeKind::HDrop => {
            let (l1, s) = (u[0], u[1]);
            let d = sys.len - s;
            vec![sys.c3(l1) * d * d + sys.b, 2.0 * sys.c3(l1) * d + sys.k5]
        }
        CompositeKind::ZigZag => zigzag(&sys, u),
        CompositeKind::SessileLens => sessile_lens(&sys, u),
        CompositeKind::SessileInternalDrop => sessile_internal_drop(&sys, u),
        CompositeKind::TwoDrops => {
            let (l1, l2, s, s1) = (u[0], u[1], u[2], u[3]);
            let d = sys.len - s1;
            vec![
                sys.c3(l1) * d * d + sys.b,
                2.0 * sys.c3(l1) * d + sys.k5,
                sys.c2(l2) * s * s + sys.a,
                -2.0 * sys.c2(l2) * s - sys.k4,
            ]
        }
        CompositeKind::TwoSideSessileZigZag => {
            let shift = spec.shift.ok_or_else(|| {
                Error::Usage("two_side_sessile_zigzag residual needs a shift".into())
            })?;
            two_side(&sys, u, shift)
        }
        CompositeKind::H1SessileZigZag => h1_sessile(&sys, u),
        CompositeKind::HSessileZigZag => h_sessile(&sys, u),
        CompositeKind::LensOnZigZag => lens_on_zigzag(&sys, u),
    };
    Ok(r)
}

fn lens(p: &Sys, u: &[f64]) -> Vec<f64> {
    let (l1, l2, s, c1, c4, c5) = (u[0], u[1], u[2], u[3], u[4], u[5]);
    let d = p.len - s;
    let (a, b) = (p.ca(l1, l2), p.cb(l1, l2));
    vec![
        p.c2(l2) * d * d + p.a - c4,
        2.0 * p.c2(l2) * d - c5,
        a * s * s + c1 - c4,
        b * s * s + p.b,
        2.0 * a * (-s) + p.k3 - c5,
        2.0 * b * (-s) - p.k2,
    ]
}

fn internal_drop(p: &Sys, u: &[f64]) -> Vec<f64> {
    let (l1, l2, s, c, c2, c3) = (u[0], u[1], u[2], u[3], u[4], u[5]);
    let d = p.len - s;
    let (a, b) = (p.ca(l1, l2), p.cb(l1, l2));
    vec![
        p.c3(l1) * d * d + p.b - c2,
        2.0 * p.c3(l1) * d - c3,
        a * s * s + p.a,
        b * s * s + c - c2,
        2.0 * a * (-s) - p.k1,
        2.0 * b * (-s) + p.k1 - c3,
    ]
}

/// Residual rows of a type I line at `-s1` with the lower layer vanishing
/// towards `-x` (thin lower film on the left, type III upper bulk centered at
/// `xt_c` with offset `ct`).
#[allow(clippy::too_many_arguments)]
fn type_i_rising(
    p: &Sys,
    l1: f64,
    l2: f64,
    s1: f64,
    xc: f64,
    xc1: f64,
    c: f64,
    c1: f64,
    c2: f64,
    c3: f64,
) -> [f64; 4] {
    let (a, b) = (p.ca(l1, l2), p.cb(l1, l2));
    [
        a * (s1 + xc1).powi(2) + c1,
        b * (s1 + xc).powi(2) + c - c2,
        2.0 * a * (-s1 - xc1) - p.k1,
        2.0 * b * (-s1 - xc) + p.k1 - c3,
    ]
}

/// Type I line at `-s1` with the thin lower film on the right.
#[allow(clippy::too_many_arguments)]
fn type_i_falling(
    p: &Sys,
    l1: f64,
    l2: f64,
    s1: f64,
    xc: f64,
    xc1: f64,
    c: f64,
    c1: f64,
    c2: f64,
    c3: f64,
) -> [f64; 4] {
    let (a, b) = (p.ca(l1, l2), p.cb(l1, l2));
    [
        a * (s1 + xc1).powi(2) + c1,
        b * (s1 + xc).powi(2) + c - c2,
        2.0 * a * (-s1 - xc1) + p.k1,
        2.0 * b * (-s1 - xc) - p.k1 - c3,
    ]
}

/// Type II line at `-s` with the thin upper film on the right.
#[allow(clippy::too_many_arguments)]
fn type_ii_falling(
    p: &Sys,
    l1: f64,
    l2: f64,
    s: f64,
    xc: f64,
    xc1: f64,
    c: f64,
    c1: f64,
    c4: f64,
    c5: f64,
) -> [f64; 4] {
    let (a, b) = (p.ca(l1, l2), p.cb(l1, l2));
    [
        a * (s + xc1).powi(2) + c1 - c4,
        b * (s + xc).powi(2) + c,
        2.0 * a * (-s - xc1) - p.k3 - c5,
        2.0 * b * (-s - xc) + p.k2,
    ]
}

/// Type II line at `-s` with the thin upper film on the left.
#[allow(clippy::too_many_arguments)]
fn type_ii_rising(
    p: &Sys,
    l1: f64,
    l2: f64,
    s: f64,
    xc: f64,
    xc1: f64,
    c: f64,
    c1: f64,
    c4: f64,
    c5: f64,
) -> [f64; 4] {
    let (a, b) = (p.ca(l1, l2), p.cb(l1, l2));
    [
        a * (s + xc1).powi(2) + c1 - c4,
        b * (s + xc).powi(2) + c,
        2.0 * a * (-s - xc1) + p.k3 - c5,
        2.0 * b * (-s - xc) - p.k2,
    ]
}

/// Value and slope of a type II lower bulk centered at `xt` with offset `ct`,
/// matched at `x = -s` to `(value, slope)`.
fn type_ii_match(p: &Sys, l2: f64, s: f64, xt: f64, ct: f64, value: f64, slope: f64) -> [f64; 2] {
    [
        p.c2(l2) * (s + xt).powi(2) + ct - value,
        2.0 * p.c2(l2) * (-s - xt) - slope,
    ]
}

/// Same for a type III upper bulk.
fn type_iii_match(p: &Sys, l1: f64, s: f64, xt: f64, ct: f64, value: f64, slope: f64) -> [f64; 2] {
    [
        p.c3(l1) * (s + xt).powi(2) + ct - value,
        2.0 * p.c3(l1) * (-s - xt) - slope,
    ]
}

fn zigzag(p: &Sys, u: &[f64]) -> Vec<f64> {
    let (l1, l2, s, s1, xc, xc1, c, c1, c2, c3, c4, c5) = (
        u[0], u[1], u[2], u[3], u[4], u[5], u[6], u[7], u[8], u[9], u[10], u[11],
    );
    let mut r = Vec::with_capacity(12);
    r.extend(type_iii_match(p, l1, s1, -p.len, p.b, c2, c3));
    r.extend(type_i_rising(p, l1, l2, s1, xc, xc1, c, c1, c2, c3));
    r.extend(type_ii_falling(p, l1, l2, s, xc, xc1, c, c1, c4, c5));
    r.extend(type_ii_match(p, l2, s, 0.0, p.a, c4, c5));
    r
}

fn sessile_lens(p: &Sys, u: &[f64]) -> Vec<f64> {
    let (l1, l2, s, s1, xt1, c4, c5, ct1) = (u[0], u[1], u[2], u[3], u[4], u[5], u[6], u[7]);
    let mut r = Vec::with_capacity(8);
    r.extend(type_ii_falling(
        p, l1, l2, s1, -p.len, -p.len, p.b, p.a, c4, c5,
    ));
    r.extend(type_ii_match(p, l2, s1, xt1, ct1, c4, c5));
    r.extend(type_ii_match(p, l2, s, xt1, ct1, 0.0, -p.k4));
    r
}

fn sessile_internal_drop(p: &Sys, u: &[f64]) -> Vec<f64> {
    let (l1, l2, s, s1, xt, c2, c3, ct0) = (u[0], u[1], u[2], u[3], u[4], u[5], u[6], u[7]);
    let mut r = Vec::with_capacity(8);
    r.extend(type_i_falling(
        p, l1, l2, s1, -p.len, -p.len, p.b, p.a, c2, c3,
    ));
    r.extend(type_iii_match(p, l1, s1, xt, ct0, c2, c3));
    r.extend(type_iii_match(p, l1, s, xt, ct0, 0.0, -p.k5));
    r
}

fn two_side(p: &Sys, u: &[f64], shift: f64) -> Vec<f64> {
    let (l1, l2, s, s1, s2, s3, xc, xc1, xt1, c, c1, c4, c5, c2, c3) = (
        u[0], u[1], u[2], u[3], u[4], u[5], u[6], u[7], u[8], u[9], u[10], u[11], u[12], u[13],
        u[14],
    );
    let mut r = Vec::with_capacity(16);
    r.extend(type_ii_match(p, l2, s3, xt1, p.a, 0.0, p.k4));
    r.extend(type_ii_match(p, l2, s2, xt1, p.a, c4, c5));
    r.extend(type_ii_rising(p, l1, l2, s2, xc, xc1, c, c1, c4, c5));
    r.extend(type_i_falling(p, l1, l2, s1, xc, xc1, c, c1, c2, c3));
    r.extend(type_iii_match(p, l1, s1, shift, p.b, c2, c3));
    r.extend(type_iii_match(p, l1, s, shift, p.b, 0.0, -p.k5));
    r
}

fn h1_sessile(p: &Sys, u: &[f64]) -> Vec<f64> {
    let (l1, l2, s, s1, s2, xc, xc1, xt, c, c1, c4, c5, c2, c3) = (
        u[0], u[1], u[2], u[3], u[4], u[5], u[6], u[7], u[8], u[9], u[10], u[11], u[12], u[13],
    );
    let mut r = Vec::with_capacity(15);
    r.extend(type_ii_match(p, l2, s2, -p.len, p.a, c4, c5));
    r.extend(type_ii_rising(p, l1, l2, s2, xc, xc1, c, c1, c4, c5));
    r.extend(type_i_falling(p, l1, l2, s1, xc, xc1, c, c1, c2, c3));
    r.extend(type_iii_match(p, l1, s1, xt, p.b, c2, c3));
    r.extend(type_iii_match(p, l1, s, xt, p.b, 0.0, -p.k5));
    r.push(l2 * p.a - p.phi);
    r
}

fn h_sessile(p: &Sys, u: &[f64]) -> Vec<f64> {
    let (l1, l2, s, s1, s2, xc, xc1, xt1, c, c1, c4, c5, c2, c3) = (
        u[0], u[1], u[2], u[3], u[4], u[5], u[6], u[7], u[8], u[9], u[10], u[11], u[12], u[13],
    );
    let mut r = Vec::with_capacity(15);
    r.extend(type_iii_match(p, l1, s2, -p.len, p.b, c2, c3));
    r.extend(type_i_rising(p, l1, l2, s2, xc, xc1, c, c1, c2, c3));
    r.extend(type_ii_falling(p, l1, l2, s1, xc, xc1, c, c1, c4, c5));
    r.extend(type_ii_match(p, l2, s1, xt1, p.a, c4, c5));
    r.extend(type_ii_match(p, l2, s, xt1, p.a, 0.0, -p.k4));
    r.push(l1 * p.b - p.phi);
    r
}

fn lens_on_zigzag(p: &Sys, u: &[f64]) -> Vec<f64> {
    let (l1, l2, s, s1, s2) = (u[0], u[1], u[2], u[3], u[4]);
    let (xc, xc1, c, c1, c2, c3, c4z, c5z) = (u[5], u[6], u[7], u[8], u[9], u[10], u[11], u[12]);
    let (h1_top, h_top, c4, c5) = (u[13], u[14], u[15], u[16]);
    let mut r = Vec::with_capacity(18);
    r.extend(type_iii_match(p, l1, s2, -p.len, p.b, c2, c3));
    r.extend(type_i_rising(p, l1, l2, s2, xc, xc1, c, c1, c2, c3));
    r.extend(type_ii_falling(p, l1, l2, s1, xc, xc1, c, c1, c4z, c5z));
    r.extend(type_ii_match(p, l2, s1, 0.0, p.a, c4z, c5z));
    r.extend(type_ii_match(p, l2, s, 0.0, p.a, c4, c5));
    r.extend(type_ii_rising(
        p, l1, l2, s, 0.0, 0.0, h_top, h1_top, c4, c5,
    ));
    r
}
