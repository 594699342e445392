//! Per-kind closed forms in standard orientation on `(-L, 0)`.
//!
//! Positions `s, s1, s2, s3` are distances from the right end, so contact
//! lines sit at `x = -s` etc. Bulk pieces next to a contact line are anchored
//! there, which keeps the straight-segment limits regular.

use std::collections::BTreeMap;

use super::maxima::{c2_ratio, c4_ratio};
use super::{CompositeKind, CompositeSpec, Segment, SolutionFlag};
use crate::blocks::{BulkKind, BulkPiece, ClDescriptor, ClType, Layer, Orientation};
use crate::error::{ConstraintReport, Error, Result};

/// Relative distance to a critical ratio inside which the exact limiting
/// formulas are used.
pub(crate) const LIMIT_GUARD: f64 = 1e-9;

pub(crate) struct Raw {
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub cls: Vec<ClDescriptor>,
    pub h1: Vec<Segment>,
    pub h: Vec<Segment>,
    pub constants: BTreeMap<String, f64>,
    pub flags: Vec<SolutionFlag>,
    pub report: ConstraintReport,
}

/// Shared parameters and contact-angle magnitudes.
#[derive(Clone, Copy)]
pub(crate) struct Ctx {
    pub sigma: f64,
    pub len: f64,
    pub phi: f64,
    pub a: f64,
    pub b: f64,
    /// Lower-layer slope at a type I contact line.
    pub k1: f64,
    /// Upper-layer slope at a type II contact line.
    pub k2: f64,
    /// Upper-layer slope at a type IV contact line.
    pub k5: f64,
}

impl Ctx {
    pub fn new(spec: &CompositeSpec) -> Self {
        let (s, phi) = (spec.sigma, spec.well_depth);
        Ctx {
            sigma: s,
            len: spec.length,
            phi,
            a: spec.h1_m,
            b: spec.h_m,
            k1: (2.0 * phi / s).sqrt(),
            k2: (2.0 * (s + 1.0) * phi / s).sqrt(),
            k5: (2.0 * phi).sqrt(),
        }
    }

    pub fn hbar(&self) -> f64 {
        self.b / self.a
    }

    pub fn coeff(&self, kind: BulkKind, l1: f64, l2: f64) -> f64 {
        kind.coeff(l1, l2, self.sigma)
    }
}

pub(crate) fn near(value: f64, target: f64) -> bool {
    (value - target).abs() <= LIMIT_GUARD * target.abs().max(1.0)
}

struct Builder {
    raw: Raw,
}

impl Builder {
    fn new(lambda1: Option<f64>, lambda2: Option<f64>) -> Self {
        Builder {
            raw: Raw {
                lambda1,
                lambda2,
                cls: Vec::new(),
                h1: Vec::new(),
                h: Vec::new(),
                constants: BTreeMap::new(),
                flags: Vec::new(),
                report: ConstraintReport::default(),
            },
        }
    }

    fn seg(&mut self, layer: Layer, from: f64, to: f64, piece: Option<BulkPiece>) {
        let seg = match piece {
            Some(p) => Segment::bulk(from, to, p),
            None => Segment::utf(from, to),
        };
        match layer {
            Layer::H1 => self.raw.h1.push(seg),
            Layer::H => self.raw.h.push(seg),
        }
    }

    fn cl(&mut self, cl_type: ClType, position: f64, orientation: Orientation) {
        self.raw.cls.push(ClDescriptor {
            cl_type,
            position,
            orientation,
            slope_jump: 0.0,
        });
    }

    fn c(&mut self, name: &str, value: f64) {
        self.raw.constants.insert(name.to_string(), value);
    }

    /// Records vertex form constants of a piece when it has a vertex.
    fn vertex(&mut self, center_name: &str, offset_name: &str, piece: &BulkPiece) {
        if let (Some(c), Some(o)) = (piece.center(), piece.offset()) {
            self.c(center_name, c);
            self.c(offset_name, o);
        }
    }

    fn margin(&mut self, id: &str, margin: f64) {
        self.raw.report.push(id, margin);
    }

    fn flag(&mut self, f: SolutionFlag) {
        self.raw.flags.push(f);
    }

    fn finish(mut self) -> Result<Raw> {
        self.raw
            .cls
            .sort_by(|a, b| a.position.total_cmp(&b.position));
        let finite = self.raw.constants.values().all(|v| v.is_finite())
            && self.raw.lambda1.is_none_or(f64::is_finite)
            && self.raw.lambda2.is_none_or(f64::is_finite);
        if !finite {
            return Err(Error::Numeric(
                "closed form produced a non-finite value".into(),
            ));
        }
        Ok(self.raw)
    }
}

pub(crate) fn layout(spec: &CompositeSpec) -> Result<Raw> {
    let c = Ctx::new(spec);
    match spec.kind {
        CompositeKind::Lens => lens(&c),
        CompositeKind::InternalDrop => internal_drop(&c),
        CompositeKind::H1Drop => h1_drop(&c),
        CompositeKind::HDrop => h_drop(&c),
        CompositeKind::ZigZag => zigzag(&c),
        CompositeKind::SessileLens => sessile_lens(&c),
        CompositeKind::SessileInternalDrop => sessile_internal_drop(&c),
        CompositeKind::TwoDrops => two_drops(&c),
        CompositeKind::TwoSideSessileZigZag => two_side(&c, spec.shift.unwrap_or(f64::NAN)),
        CompositeKind::H1SessileZigZag => h1_sessile(&c),
        CompositeKind::HSessileZigZag => h_sessile(&c),
        CompositeKind::LensOnZigZag => lens_on_zigzag(&c),
    }
}

fn lens(c: &Ctx) -> Result<Raw> {
    let (sg, l) = (c.sigma, c.len);
    let l1 = c.phi / c.b;
    let l2 = 0.0;
    let s = c.b * (2.0 * sg / ((sg + 1.0) * c.phi)).sqrt();
    let c1 = c.a - c.b / (sg + 1.0);
    let mut bd = Builder::new(Some(l1), Some(l2));
    let left = BulkPiece::centered(
        BulkKind::TypeIIH1,
        c.coeff(BulkKind::TypeIIH1, l1, l2),
        -l,
        c.a,
    );
    let h1_top = BulkPiece::centered(
        BulkKind::TypeIH1,
        c.coeff(BulkKind::TypeIH1, l1, l2),
        0.0,
        c1,
    );
    let h_top = BulkPiece::centered(
        BulkKind::TypeIH,
        c.coeff(BulkKind::TypeIH, l1, l2),
        0.0,
        c.b,
    );
    bd.seg(Layer::H1, -l, -s, Some(left));
    bd.seg(Layer::H1, -s, 0.0, Some(h1_top));
    bd.seg(Layer::H, -l, -s, None);
    bd.seg(Layer::H, -s, 0.0, Some(h_top));
    bd.cl(ClType::II, -s, Orientation::Rising);
    for (k, v) in [
        ("s", s),
        ("C", c.b),
        ("C1", c1),
        ("C4", c.a),
        ("C5", 0.0),
        ("Ct1", c.a),
    ] {
        bd.c(k, v);
    }
    bd.c("x_c", 0.0);
    bd.c("x_c1", 0.0);
    bd.c("xt_c1", -l);
    bd.flag(SolutionFlag::FlatBulk(Layer::H1));
    bd.margin("length_exceeds_radius", l - s);
    bd.margin("lower_layer_under_lens", c1);
    bd.finish()
}

fn internal_drop(c: &Ctx) -> Result<Raw> {
    let (sg, l) = (c.sigma, c.len);
    let l1 = 0.0;
    let l2 = c.phi / c.a;
    let s = c.a * (2.0 * sg / c.phi).sqrt();
    let cc = c.b - c.a;
    let mut bd = Builder::new(Some(l1), Some(l2));
    bd.seg(Layer::H1, -l, -s, None);
    bd.seg(
        Layer::H1,
        -s,
        0.0,
        Some(BulkPiece::centered(
            BulkKind::TypeIH1,
            c.coeff(BulkKind::TypeIH1, l1, l2),
            0.0,
            c.a,
        )),
    );
    bd.seg(
        Layer::H,
        -l,
        -s,
        Some(BulkPiece::centered(
            BulkKind::TypeIIIH,
            c.coeff(BulkKind::TypeIIIH, l1, l2),
            -l,
            c.b,
        )),
    );
    bd.seg(
        Layer::H,
        -s,
        0.0,
        Some(BulkPiece::centered(
            BulkKind::TypeIH,
            c.coeff(BulkKind::TypeIH, l1, l2),
            0.0,
            cc,
        )),
    );
    bd.cl(ClType::I, -s, Orientation::Rising);
    for (k, v) in [
        ("s", s),
        ("C", cc),
        ("C1", c.a),
        ("C2", c.b),
        ("C3", 0.0),
        ("Ct", c.b),
    ] {
        bd.c(k, v);
    }
    bd.c("x_c", 0.0);
    bd.c("x_c1", 0.0);
    bd.c("xt_c", -l);
    bd.flag(SolutionFlag::FlatBulk(Layer::H));
    bd.margin("length_exceeds_radius", l - s);
    bd.margin("upper_layer_over_drop", cc);
    bd.finish()
}

fn h1_drop(c: &Ctx) -> Result<Raw> {
    let (sg, l) = (c.sigma, c.len);
    let l2 = c.phi / c.a;
    let s = l - c.a * (2.0 * (sg + 1.0) / c.phi).sqrt();
    let mut bd = Builder::new(None, Some(l2));
    bd.seg(
        Layer::H1,
        -l,
        -s,
        Some(BulkPiece::centered(
            BulkKind::TypeIIH1,
            c.coeff(BulkKind::TypeIIH1, 0.0, l2),
            -l,
            c.a,
        )),
    );
    bd.seg(Layer::H1, -s, 0.0, None);
    bd.seg(Layer::H, -l, 0.0, None);
    bd.cl(ClType::III, -s, Orientation::Falling);
    bd.c("s", s);
    bd.c("Ct1", c.a);
    bd.c("xt_c1", -l);
    bd.margin("drop_fits", s);
    bd.finish()
}

fn h_drop(c: &Ctx) -> Result<Raw> {
    let l = c.len;
    let l1 = c.phi / c.b;
    let s = l - c.b * (2.0 / c.phi).sqrt();
    let mut bd = Builder::new(Some(l1), None);
    bd.seg(Layer::H1, -l, 0.0, None);
    bd.seg(
        Layer::H,
        -l,
        -s,
        Some(BulkPiece::centered(
            BulkKind::TypeIIIH,
            c.coeff(BulkKind::TypeIIIH, l1, 0.0),
            -l,
            c.b,
        )),
    );
    bd.seg(Layer::H, -s, 0.0, None);
    bd.cl(ClType::IV, -s, Orientation::Falling);
    bd.c("s", s);
    bd.c("Ct", c.b);
    bd.c("xt_c", -l);
    bd.margin("drop_fits", s);
    bd.finish()
}

/// Pressures of the zigzag: positive root of
/// `L^2 x^2 - 2 a (hb-1)(hb-sigma-1) x - 2 sigma phi hb = 0` and `lambda1 = lambda2 / hb`.
pub(crate) fn zigzag_pressures(c: &Ctx) -> (f64, f64, Option<Layer>) {
    let (sg, l, hb) = (c.sigma, c.len, c.hbar());
    if near(hb, 1.0) {
        let v = (2.0 * sg * c.phi).sqrt() / l;
        return (v, v, Some(Layer::H1));
    }
    if near(hb, sg + 1.0) {
        let l1 = (2.0 * sg * c.phi / (sg + 1.0)).sqrt() / l;
        return (l1, (sg + 1.0) * l1, Some(Layer::H));
    }
    let bq = 2.0 * c.a * (hb - 1.0) * (hb - sg - 1.0);
    let cq = 2.0 * sg * c.phi * hb;
    let disc = (bq * bq + 4.0 * l * l * cq).sqrt();
    let l2 = if bq >= 0.0 {
        (bq + disc) / (2.0 * l * l)
    } else {
        2.0 * cq / (disc - bq)
    };
    (l2 / hb, l2, None)
}

/// Contact-line distances `(s1, s)` of the zigzag: type I line at `-s1`,
/// type II line at `-s`.
pub(crate) fn zigzag_positions(c: &Ctx, l1: f64, l2: f64) -> (f64, f64) {
    let sg = c.sigma;
    let bcoef = (l2 - (sg + 1.0) * l1) / (2.0 * sg);
    // y = lambda1 (L - s1) solves p y^2 + 2 k1 y - q = 0.
    let p = 1.0 + 2.0 * bcoef / l1;
    let q = c.k2 * c.k2 - c.k1 * c.k1 + 4.0 * bcoef * c.b;
    let y = q / (c.k1 + (c.k1 * c.k1 + p * q).sqrt());
    let s1 = c.len - y / l1;
    let c2 = c.b - l1 * (c.len - s1).powi(2) / 2.0;
    let c3 = -y;
    let d = 2.0 * c2 / (c.k1 + c.k2 - c3);
    (s1, s1 - d)
}

fn zigzag(c: &Ctx) -> Result<Raw> {
    let (l1, l2, linear) = zigzag_pressures(c);
    let (s1, s) = zigzag_positions(c, l1, l2);
    let mut bd = Builder::new(Some(l1), Some(l2));
    zigzag_part(c, &mut bd, l1, l2, s1, s, linear);
    bd.seg(
        Layer::H1,
        -s,
        0.0,
        Some(type_ii_centered(c, l1, l2, 0.0, c.a)),
    );
    bd.seg(Layer::H, -s, 0.0, None);
    zigzag_margins(c, &mut bd);
    bd.finish()
}

fn type_ii_centered(c: &Ctx, l1: f64, l2: f64, center: f64, offset: f64) -> BulkPiece {
    BulkPiece::centered(
        BulkKind::TypeIIH1,
        c.coeff(BulkKind::TypeIIH1, l1, l2),
        center,
        offset,
    )
}

fn type_iii_centered(c: &Ctx, l1: f64, l2: f64, center: f64, offset: f64) -> BulkPiece {
    BulkPiece::centered(
        BulkKind::TypeIIIH,
        c.coeff(BulkKind::TypeIIIH, l1, l2),
        center,
        offset,
    )
}

/// Internal-drop-like left part `(-L, -s)` of the zigzag with the type II
/// line at `-s`; the caller supplies everything right of `-s`.
fn zigzag_part(
    c: &Ctx,
    bd: &mut Builder,
    l1: f64,
    l2: f64,
    s1: f64,
    s: f64,
    linear: Option<Layer>,
) {
    let (sg, l) = (c.sigma, c.len);
    let c2 = c.b - l1 * (l - s1).powi(2) / 2.0;
    let c3 = -l1 * (l - s1);
    let a_coef = c.coeff(BulkKind::TypeIH1, l1, l2);
    let b_coef = c.coeff(BulkKind::TypeIH, l1, l2);
    let h1_mid = BulkPiece::anchored(BulkKind::TypeIH1, a_coef, -s1, 0.0, c.k1);
    let h_mid = BulkPiece::anchored(BulkKind::TypeIH, b_coef, -s1, c2, c3 - c.k1);
    bd.seg(Layer::H1, -l, -s1, None);
    bd.seg(Layer::H1, -s1, -s, Some(h1_mid));
    bd.seg(
        Layer::H,
        -l,
        -s1,
        Some(type_iii_centered(c, l1, l2, -l, c.b)),
    );
    bd.seg(Layer::H, -s1, -s, Some(h_mid));
    bd.cl(ClType::I, -s1, Orientation::Rising);
    bd.cl(ClType::II, -s, Orientation::Falling);
    let c4 = c.a - l2 * s * s / (2.0 * (sg + 1.0));
    let c5 = l2 * s / (sg + 1.0);
    for (k, v) in [
        ("s", s),
        ("s1", s1),
        ("C2", c2),
        ("C3", c3),
        ("C4", c4),
        ("C5", c5),
        ("Ct", c.b),
        ("Ct1", c.a),
    ] {
        bd.c(k, v);
    }
    bd.vertex("x_c1", "C1", &h1_mid);
    bd.vertex("x_c", "C", &h_mid);
    if let Some(layer) = linear {
        bd.flag(SolutionFlag::LinearBulk(layer));
    }
}

/// The three length bounds of the zigzag, each tied to one contact-line merge.
fn zigzag_margins(c: &Ctx, bd: &mut Builder) {
    let (sg, l, hb) = (c.sigma, c.len, c.hbar());
    let f = 2f64.sqrt() * c.a / (sg * c.phi).sqrt();
    let r = (sg + 1.0).sqrt();
    bd.margin("merge_s1_reaches_L", l - f * (sg + 1.0 - hb));
    bd.margin("merge_s_reaches_0", l - f * r * (hb - 1.0));
    bd.margin("merge_s1_meets_s", f * (r + 1.0) * (hb + r) - l);
}

fn sessile_lens(c: &Ctx) -> Result<Raw> {
    let (sg, l, hb) = (c.sigma, c.len, c.hbar());
    let q = (sg + 1.0) * c.a + c.b;
    let l2 = (sg + 1.0) * c.phi / q;
    let mut l1 = ((sg + 1.0) * c.a + 2.0 * c.b) / q * c.phi / c.b;
    let mut bd_flags = Vec::new();
    if sg > 1.0 && near(hb, (sg + 1.0) / (sg - 1.0)) {
        l1 = l2;
        bd_flags.push(SolutionFlag::FlatBulk(Layer::H1));
    }
    let s1 = l - c.b * (2.0 * sg / ((sg + 1.0) * c.phi)).sqrt();
    let s = l - q * (2.0 / ((sg + 1.0) * c.phi)).sqrt();
    let ct1 = c.phi / l2;
    let mut bd = Builder::new(Some(l1), Some(l2));
    let h1_left = BulkPiece::centered(
        BulkKind::TypeIH1,
        c.coeff(BulkKind::TypeIH1, l1, l2),
        -l,
        c.a,
    );
    let h_left = BulkPiece::centered(BulkKind::TypeIH, c.coeff(BulkKind::TypeIH, l1, l2), -l, c.b);
    let h1_mid = type_ii_centered(c, l1, l2, -l, ct1);
    bd.seg(Layer::H1, -l, -s1, Some(h1_left));
    bd.seg(Layer::H1, -s1, -s, Some(h1_mid));
    bd.seg(Layer::H1, -s, 0.0, None);
    bd.seg(Layer::H, -l, -s1, Some(h_left));
    bd.seg(Layer::H, -s1, 0.0, None);
    bd.cl(ClType::II, -s1, Orientation::Falling);
    bd.cl(ClType::III, -s, Orientation::Falling);
    let c4 = h1_mid.eval(-s1);
    let c5 = h1_mid.deriv(-s1);
    for (k, v) in [
        ("s", s),
        ("s1", s1),
        ("C4", c4),
        ("C5", c5),
        ("Ct1", ct1),
        ("xt_c1", -l),
    ] {
        bd.c(k, v);
    }
    bd.c("x_c", -l);
    bd.c("x_c1", -l);
    bd.c("C", c.b);
    bd.c("C1", c.a);
    for f in bd_flags {
        bd.flag(f);
    }
    bd.margin("length_fits_chain", s);
    if sg > 1.0 {
        bd.margin("hbar_below_merge", (sg + 1.0) / (sg.sqrt() - 1.0) - hb);
    }
    bd.finish()
}

fn sessile_internal_drop(c: &Ctx) -> Result<Raw> {
    let (sg, l, hb) = (c.sigma, c.len, c.hbar());
    let l1 = c.phi / (c.a + c.b);
    let mut l2 = (c.b + 2.0 * c.a) / (c.a + c.b) * c.phi / c.a;
    let mut flags = Vec::new();
    if sg > 1.0 && near(hb, sg - 1.0) {
        l2 = (sg + 1.0) * l1;
        flags.push(SolutionFlag::FlatBulk(Layer::H));
    }
    let s1 = l - c.a * (2.0 * sg / c.phi).sqrt();
    let s = l - (c.a + c.b) * (2.0 / c.phi).sqrt();
    let ct0 = c.phi / l1;
    let mut bd = Builder::new(Some(l1), Some(l2));
    let h1_left = BulkPiece::centered(
        BulkKind::TypeIH1,
        c.coeff(BulkKind::TypeIH1, l1, l2),
        -l,
        c.a,
    );
    let h_left = BulkPiece::centered(BulkKind::TypeIH, c.coeff(BulkKind::TypeIH, l1, l2), -l, c.b);
    let h_mid = type_iii_centered(c, l1, l2, -l, ct0);
    bd.seg(Layer::H1, -l, -s1, Some(h1_left));
    bd.seg(Layer::H1, -s1, 0.0, None);
    bd.seg(Layer::H, -l, -s1, Some(h_left));
    bd.seg(Layer::H, -s1, -s, Some(h_mid));
    bd.seg(Layer::H, -s, 0.0, None);
    bd.cl(ClType::I, -s1, Orientation::Falling);
    bd.cl(ClType::IV, -s, Orientation::Falling);
    let c2 = h_mid.eval(-s1);
    let c3 = h_mid.deriv(-s1);
    for (k, v) in [
        ("s", s),
        ("s1", s1),
        ("C2", c2),
        ("C3", c3),
        ("Ct0", ct0),
        ("xt_c", -l),
    ] {
        bd.c(k, v);
    }
    bd.c("x_c", -l);
    bd.c("x_c1", -l);
    bd.c("C", c.b);
    bd.c("C1", c.a);
    for f in flags {
        bd.flag(f);
    }
    bd.margin("length_fits_chain", s);
    if sg > 1.0 {
        bd.margin("hbar_above_merge", hb - (sg.sqrt() - 1.0));
    }
    bd.finish()
}

fn two_drops(c: &Ctx) -> Result<Raw> {
    let (sg, l) = (c.sigma, c.len);
    let l1 = c.phi / c.b;
    let l2 = c.phi / c.a;
    let s1 = l - (2.0 / c.phi).sqrt() * c.b;
    let s = (2.0 * (sg + 1.0) / c.phi).sqrt() * c.a;
    let mut bd = Builder::new(Some(l1), Some(l2));
    bd.seg(
        Layer::H,
        -l,
        -s1,
        Some(type_iii_centered(c, l1, l2, -l, c.b)),
    );
    bd.seg(Layer::H, -s1, 0.0, None);
    bd.seg(Layer::H1, -l, -s, None);
    bd.seg(
        Layer::H1,
        -s,
        0.0,
        Some(type_ii_centered(c, l1, l2, 0.0, c.a)),
    );
    bd.cl(ClType::IV, -s1, Orientation::Falling);
    bd.cl(ClType::III, -s, Orientation::Rising);
    for (k, v) in [
        ("s", s),
        ("s1", s1),
        ("Ct", c.b),
        ("Ct1", c.a),
        ("xt_c", -l),
        ("xt_c1", 0.0),
    ] {
        bd.c(k, v);
    }
    bd.margin("drops_separated", s1 - s);
    bd.finish()
}

/// Constants shared by the sessile zigzags: `(C2, C3, C4, C5)` with the sign
/// convention of the solutions whose type I line faces right.
pub(crate) fn sessile_constants(c: &Ctx, l1: f64, l2: f64) -> (f64, f64, f64, f64) {
    let (sg, hb) = (c.sigma, c.hbar());
    let c4 = c4_ratio(sg, hb) * c.b;
    let c2 = c2_ratio(sg, hb) * c.b;
    let c5 = c4 * (l2 - (sg + 1.0) * l1) / (2.0 * sg * (sg + 1.0) * c.phi).sqrt();
    let c3 = c2 * (l2 - l1) / (2.0 * sg * c.phi).sqrt();
    (c2, c3, c4, c5)
}

/// Middle type I bulk of the sessile zigzags whose type I line at `-s1` faces
/// right (lower layer vanishing towards `+x`). Returns the distance `s2 - s1`.
fn middle_falling(c: &Ctx, bd: &mut Builder, l1: f64, l2: f64, s1: f64, c2: f64, c3: f64) -> f64 {
    let d = 2.0 * c2 / (c.k1 + c.k2 + c3);
    let s2 = s1 + d;
    let a_coef = c.coeff(BulkKind::TypeIH1, l1, l2);
    let b_coef = c.coeff(BulkKind::TypeIH, l1, l2);
    let h1_mid = BulkPiece::anchored(BulkKind::TypeIH1, a_coef, -s1, 0.0, -c.k1);
    let h_mid = BulkPiece::anchored(BulkKind::TypeIH, b_coef, -s1, c2, c.k1 + c3);
    bd.seg(Layer::H1, -s2, -s1, Some(h1_mid));
    bd.seg(Layer::H, -s2, -s1, Some(h_mid));
    bd.vertex("x_c1", "C1", &h1_mid);
    bd.vertex("x_c", "C", &h_mid);
    d
}

fn linear_flags(c: &Ctx, bd: &mut Builder) {
    let hb = c.hbar();
    if near(hb, 1.0) {
        bd.flag(SolutionFlag::LinearBulk(Layer::H1));
    }
    if near(hb, c.sigma + 1.0) {
        bd.flag(SolutionFlag::LinearBulk(Layer::H));
    }
}

/// Pressures of the sessile zigzags, snapped to the exact critical ratios
/// inside the guard band.
fn sessile_pressures(c: &Ctx) -> (f64, f64) {
    let (sg, hb) = (c.sigma, c.hbar());
    let l1 = c.phi / c.b;
    let mut l2 = c.phi / c.a;
    if near(hb, 1.0) {
        l2 = l1;
    } else if near(hb, sg + 1.0) {
        l2 = (sg + 1.0) * l1;
    }
    (l1, l2)
}

/// Lower-layer contact line of the two-side solution and the right-hand end
/// of the one-sided variant: positions of the type III line from the type II
/// line at `-s2`.
fn two_side(c: &Ctx, shift: f64) -> Result<Raw> {
    let (sg, l) = (c.sigma, c.len);
    let (l1, l2) = sessile_pressures(c);
    let (c2, c3, c4, c5) = sessile_constants(c, l1, l2);
    let s = -c.k5 / l1 - shift;
    let s1 = c3 / l1 - shift;
    let mut bd = Builder::new(Some(l1), Some(l2));
    let d = middle_falling(c, &mut bd, l1, l2, s1, c2, c3);
    let s2 = s1 + d;
    let xt_c1 = (sg + 1.0) * c5 / l2 - s2;
    let s3 = (2.0 * (sg + 1.0) * c.phi).sqrt() / l2 - xt_c1;
    bd.seg(Layer::H1, -l, -s3, None);
    bd.seg(
        Layer::H1,
        -s3,
        -s2,
        Some(type_ii_centered(c, l1, l2, xt_c1, c.a)),
    );
    bd.seg(Layer::H1, -s1, 0.0, None);
    bd.seg(Layer::H, -l, -s2, None);
    bd.seg(
        Layer::H,
        -s1,
        -s,
        Some(type_iii_centered(c, l1, l2, shift, c.b)),
    );
    bd.seg(Layer::H, -s, 0.0, None);
    sort_segments(&mut bd);
    bd.cl(ClType::III, -s3, Orientation::Rising);
    bd.cl(ClType::II, -s2, Orientation::Rising);
    bd.cl(ClType::I, -s1, Orientation::Falling);
    bd.cl(ClType::IV, -s, Orientation::Falling);
    for (k, v) in [
        ("s", s),
        ("s1", s1),
        ("s2", s2),
        ("s3", s3),
        ("C2", c2),
        ("C3", c3),
        ("C4", c4),
        ("C5", c5),
        ("Ct", c.b),
        ("Ct1", c.a),
        ("xt_c", shift),
        ("xt_c1", xt_c1),
    ] {
        bd.c(k, v);
    }
    linear_flags(c, &mut bd);
    bd.margin("length_exceeds_s3", l - s3);
    bd.margin("shift_keeps_s_positive", -c.k5 / l1 - shift);
    bd.finish()
}

/// Admissible open interval of the free shift of the two-side solution.
pub(crate) fn two_side_shift_range(c: &Ctx) -> (f64, f64) {
    // Every position is affine in the shift with unit slope.
    let raw = two_side(c, 0.0);
    let s3_at_zero = raw
        .ok()
        .and_then(|r| r.constants.get("s3").copied())
        .unwrap_or(f64::NAN);
    let (l1, _) = sessile_pressures(c);
    (s3_at_zero - c.len, -c.k5 / l1)
}

fn h1_sessile(c: &Ctx) -> Result<Raw> {
    let (sg, l, hb) = (c.sigma, c.len, c.hbar());
    let (l1, l2) = sessile_pressures(c);
    let (c2, c3, c4, c5) = sessile_constants(c, l1, l2);
    let s2 = (sg + 1.0) * c5 / l2 + l;
    let d = 2.0 * c2 / (c.k1 + c.k2 + c3);
    let s1 = s2 - d;
    let xt_c = c3 / l1 - s1;
    let s = -c.k5 / l1 - xt_c;
    let mut bd = Builder::new(Some(l1), Some(l2));
    middle_falling(c, &mut bd, l1, l2, s1, c2, c3);
    bd.seg(
        Layer::H1,
        -l,
        -s2,
        Some(type_ii_centered(c, l1, l2, -l, c.a)),
    );
    bd.seg(Layer::H1, -s1, 0.0, None);
    bd.seg(Layer::H, -l, -s2, None);
    bd.seg(
        Layer::H,
        -s1,
        -s,
        Some(type_iii_centered(c, l1, l2, xt_c, c.b)),
    );
    bd.seg(Layer::H, -s, 0.0, None);
    sort_segments(&mut bd);
    bd.cl(ClType::II, -s2, Orientation::Rising);
    bd.cl(ClType::I, -s1, Orientation::Falling);
    bd.cl(ClType::IV, -s, Orientation::Falling);
    for (k, v) in [
        ("s", s),
        ("s1", s1),
        ("s2", s2),
        ("C2", c2),
        ("C3", c3),
        ("C4", c4),
        ("C5", c5),
        ("Ct", c.b),
        ("Ct1", c.a),
        ("xt_c", xt_c),
        ("xt_c1", -l),
    ] {
        bd.c(k, v);
    }
    linear_flags(c, &mut bd);
    bd.margin("hbar_below_sigma_plus_one", sg + 1.0 - hb);
    bd.margin(
        "length_above_minimum",
        l - h1_sessile_min_length(c, l1, l2, c2),
    );
    bd.finish()
}

/// Smallest interval length of the lower-layer sessile zigzag.
pub(crate) fn h1_sessile_min_length(c: &Ctx, l1: f64, l2: f64, c2: f64) -> f64 {
    let sg = c.sigma;
    (2.0 * c.phi * (sg * l1 + sg.sqrt() * l2) + c2 * (l1 - l2).powi(2))
        / ((2.0 * sg * c.phi).sqrt() * l1 * l2)
}

fn h_sessile(c: &Ctx) -> Result<Raw> {
    let (sg, l, hb) = (c.sigma, c.len, c.hbar());
    let (l1, l2) = sessile_pressures(c);
    let (c2, c3, c4, c5) = sessile_constants(c, l1, l2);
    let (c3, c5) = (-c3, -c5);
    let s2 = c3 / l1 + l;
    let d = 2.0 * c2 / (c.k1 + c.k2 - c3);
    let s1 = s2 - d;
    let xt_c1 = (sg + 1.0) * c5 / l2 - s1;
    let s = -(2.0 * (sg + 1.0) * c.phi).sqrt() / l2 - xt_c1;
    let a_coef = c.coeff(BulkKind::TypeIH1, l1, l2);
    let b_coef = c.coeff(BulkKind::TypeIH, l1, l2);
    let h1_mid = BulkPiece::anchored(BulkKind::TypeIH1, a_coef, -s2, 0.0, c.k1);
    let h_mid = BulkPiece::anchored(BulkKind::TypeIH, b_coef, -s2, c2, c3 - c.k1);
    let mut bd = Builder::new(Some(l1), Some(l2));
    bd.seg(
        Layer::H,
        -l,
        -s2,
        Some(type_iii_centered(c, l1, l2, -l, c.b)),
    );
    bd.seg(Layer::H, -s2, -s1, Some(h_mid));
    bd.seg(Layer::H, -s1, 0.0, None);
    bd.seg(Layer::H1, -l, -s2, None);
    bd.seg(Layer::H1, -s2, -s1, Some(h1_mid));
    bd.seg(
        Layer::H1,
        -s1,
        -s,
        Some(type_ii_centered(c, l1, l2, xt_c1, c.a)),
    );
    bd.seg(Layer::H1, -s, 0.0, None);
    bd.cl(ClType::I, -s2, Orientation::Rising);
    bd.cl(ClType::II, -s1, Orientation::Falling);
    bd.cl(ClType::III, -s, Orientation::Falling);
    bd.vertex("x_c1", "C1", &h1_mid);
    bd.vertex("x_c", "C", &h_mid);
    for (k, v) in [
        ("s", s),
        ("s1", s1),
        ("s2", s2),
        ("C2", c2),
        ("C3", c3),
        ("C4", c4),
        ("C5", c5),
        ("Ct", c.b),
        ("Ct1", c.a),
        ("xt_c", -l),
        ("xt_c1", xt_c1),
    ] {
        bd.c(k, v);
    }
    linear_flags(c, &mut bd);
    bd.margin("hbar_above_one", hb - 1.0);
    bd.margin(
        "length_above_minimum",
        l - h_sessile_min_length(c, l1, l2, c4),
    );
    bd.finish()
}

/// Smallest interval length of the upper-layer sessile zigzag.
pub(crate) fn h_sessile_min_length(c: &Ctx, l1: f64, l2: f64, c4: f64) -> f64 {
    let sg = c.sigma;
    let num = 2.0 * c.phi * sg.sqrt() * ((sg + 1.0) * l1 + sg.sqrt() * l2)
        + c4 * (l2 - (sg + 1.0) * l1).powi(2);
    num / ((2.0 * sg * (sg + 1.0) * c.phi).sqrt() * l1 * l2)
}

fn lens_on_zigzag(c: &Ctx) -> Result<Raw> {
    let sg = c.sigma;
    let (l1, l2, linear) = zigzag_pressures(c);
    let (s2, s1) = zigzag_positions(c, l1, l2);
    let gap = l2 - (sg + 1.0) * l1;
    let s = -(2.0 * (sg + 1.0) * sg * c.phi).sqrt() / gap;
    let h_top = -(sg + 1.0) * c.phi / gap;
    let h1_top = c.a + c.phi / gap;
    let mut bd = Builder::new(Some(l1), Some(l2));
    // The zigzag helper names its two lines s1 and s; rename afterwards.
    zigzag_part(c, &mut bd, l1, l2, s2, s1, linear);
    for (from, to) in [("s1", "s2"), ("s", "s1"), ("C4", "C4_zz"), ("C5", "C5_zz")] {
        let v = bd.raw.constants.remove(from).unwrap();
        bd.c(to, v);
    }
    bd.seg(
        Layer::H1,
        -s1,
        -s,
        Some(type_ii_centered(c, l1, l2, 0.0, c.a)),
    );
    bd.seg(
        Layer::H1,
        -s,
        0.0,
        Some(BulkPiece::centered(
            BulkKind::TypeIH1,
            c.coeff(BulkKind::TypeIH1, l1, l2),
            0.0,
            h1_top,
        )),
    );
    bd.seg(Layer::H, -s1, -s, None);
    bd.seg(
        Layer::H,
        -s,
        0.0,
        Some(BulkPiece::centered(
            BulkKind::TypeIH,
            c.coeff(BulkKind::TypeIH, l1, l2),
            0.0,
            h_top,
        )),
    );
    bd.cl(ClType::II, -s, Orientation::Rising);
    bd.c("s", s);
    bd.c("h_lens_top", h_top);
    bd.c("h1_lens_top", h1_top);
    bd.c("C4", c.a - l2 * s * s / (2.0 * (sg + 1.0)));
    bd.c("C5", l2 * s / (sg + 1.0));
    zigzag_margins(c, &mut bd);
    bd.margin("lens_radius_positive", sg + 1.0 - c.hbar());
    bd.margin("lens_inside_zigzag", s1 - s);
    bd.margin("lower_layer_under_lens", h1_top);
    bd.finish()
}

fn sort_segments(bd: &mut Builder) {
    bd.raw.h1.sort_by(|a, b| a.x_from.total_cmp(&b.x_from));
    bd.raw.h.sort_by(|a, b| a.x_from.total_cmp(&b.x_from));
}
