//! Closed-form leading-order composite stationary solutions, their existence
//! domains, the matching-system oracle, profile sampling and chain notation.

mod chain;
mod closed_form;
mod maxima;
mod oracle;
mod profile;
mod residual;
mod verify;

use std::collections::BTreeMap;
use std::fmt;

use crate::blocks::{BulkPiece, ClDescriptor, Layer};
use crate::error::{ConstraintReport, Error, Result};

pub use chain::{
    assemble_chain, chain_composite, parse_chain, BlockOrientation, ChainBlock, ChainExpr,
    ChainHeights,
};
pub use maxima::{maxima_from_params, params_from_maxima};
pub use oracle::{gauss_newton, NewtonOptions, NewtonOutcome};
pub use profile::{lambda_relation_check, sample_profile, LambdaRelation, Profile};
pub use residual::{closed_form_unknowns, matching_residual, unknown_names};
pub use verify::{
    oracle_check, sample_interior_spec, OracleCheck, LIMIT_BAND, MIN_GAP_FRACTION, MIN_MARGIN,
};

/// The composite solution families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CompositeKind {
    Lens,
    InternalDrop,
    H1Drop,
    HDrop,
    ZigZag,
    SessileLens,
    SessileInternalDrop,
    TwoDrops,
    TwoSideSessileZigZag,
    H1SessileZigZag,
    HSessileZigZag,
    LensOnZigZag,
}

impl CompositeKind {
    pub const ALL: [CompositeKind; 12] = [
        CompositeKind::Lens,
        CompositeKind::InternalDrop,
        CompositeKind::H1Drop,
        CompositeKind::HDrop,
        CompositeKind::ZigZag,
        CompositeKind::SessileLens,
        CompositeKind::SessileInternalDrop,
        CompositeKind::TwoDrops,
        CompositeKind::TwoSideSessileZigZag,
        CompositeKind::H1SessileZigZag,
        CompositeKind::HSessileZigZag,
        CompositeKind::LensOnZigZag,
    ];

    /// Diagram numbering 1..=11; the lens-on-zigzag has none.
    pub fn solution_id(self) -> Option<u8> {
        let id = match self {
            CompositeKind::Lens => 1,
            CompositeKind::InternalDrop => 2,
            CompositeKind::H1Drop => 3,
            CompositeKind::HDrop => 4,
            CompositeKind::ZigZag => 5,
            CompositeKind::SessileLens => 6,
            CompositeKind::SessileInternalDrop => 7,
            CompositeKind::TwoDrops => 8,
            CompositeKind::TwoSideSessileZigZag => 9,
            CompositeKind::H1SessileZigZag => 10,
            CompositeKind::HSessileZigZag => 11,
            CompositeKind::LensOnZigZag => return None,
        };
        Some(id)
    }

    pub fn from_solution_id(id: u8) -> Option<Self> {
        CompositeKind::ALL
            .into_iter()
            .find(|k| k.solution_id() == Some(id))
    }

    pub fn name(self) -> &'static str {
        match self {
            CompositeKind::Lens => "lens",
            CompositeKind::InternalDrop => "internal_drop",
            CompositeKind::H1Drop => "h1_drop",
            CompositeKind::HDrop => "h_drop",
            CompositeKind::ZigZag => "zigzag",
            CompositeKind::SessileLens => "sessile_lens",
            CompositeKind::SessileInternalDrop => "sessile_internal_drop",
            CompositeKind::TwoDrops => "two_drops",
            CompositeKind::TwoSideSessileZigZag => "two_side_sessile_zigzag",
            CompositeKind::H1SessileZigZag => "h1_sessile_zigzag",
            CompositeKind::HSessileZigZag => "h_sessile_zigzag",
            CompositeKind::LensOnZigZag => "lens_on_zigzag",
        }
    }

    /// Accepts the canonical name, with or without underscores or dashes.
    pub fn parse(text: &str) -> Result<Self> {
        let squash = |s: &str| s.to_ascii_lowercase().replace(['_', '-'], "");
        let key = squash(text.trim());
        CompositeKind::ALL
            .into_iter()
            .find(|k| squash(k.name()) == key)
            .ok_or_else(|| Error::Usage(format!("unknown solution kind '{text}'")))
    }

    pub fn is_one_cl(self) -> bool {
        matches!(
            self,
            CompositeKind::Lens
                | CompositeKind::InternalDrop
                | CompositeKind::H1Drop
                | CompositeKind::HDrop
        )
    }

    /// Whether the construction reads `h1_m` and `h_m` respectively.
    pub(crate) fn uses_heights(self) -> (bool, bool) {
        match self {
            CompositeKind::H1Drop => (true, false),
            CompositeKind::HDrop => (false, true),
            _ => (true, true),
        }
    }
}

impl fmt::Display for CompositeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Model parameters of one composite solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeSpec {
    pub kind: CompositeKind,
    pub sigma: f64,
    /// Interval length; the solution lives on `(-length, 0)`.
    pub length: f64,
    pub well_depth: f64,
    pub h1_m: f64,
    pub h_m: f64,
    /// Free shift of the two-side sessile zigzag; absent for every other kind.
    pub shift: Option<f64>,
    pub inverted: bool,
}

impl CompositeSpec {
    pub fn new(
        kind: CompositeKind,
        sigma: f64,
        length: f64,
        well_depth: f64,
        h1_m: f64,
        h_m: f64,
    ) -> Self {
        CompositeSpec {
            kind,
            sigma,
            length,
            well_depth,
            h1_m,
            h_m,
            shift: None,
            inverted: false,
        }
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = Some(shift);
        self
    }

    pub fn inverted(mut self, inverted: bool) -> Self {
        self.inverted = inverted;
        self
    }

    /// `h_m / h1_m`.
    pub fn hbar(&self) -> f64 {
        self.h_m / self.h1_m
    }

    fn validate(&self) -> Result<()> {
        let finite = [
            self.sigma,
            self.length,
            self.well_depth,
            self.h1_m,
            self.h_m,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain("non-finite model parameter".into()));
        }
        if !(self.sigma > 0.0) || !(self.length > 0.0) || !(self.well_depth > 0.0) {
            return Err(Error::Domain(format!(
                "sigma, length and well depth must be positive (got {}, {}, {})",
                self.sigma, self.length, self.well_depth
            )));
        }
        let (uses_h1, uses_h) = self.kind.uses_heights();
        if (uses_h1 && !(self.h1_m > 0.0)) || (uses_h && !(self.h_m > 0.0)) {
            return Err(Error::Domain(format!(
                "height parameters must be positive for {} (got h1_m={}, h_m={})",
                self.kind, self.h1_m, self.h_m
            )));
        }
        let wants_shift = self.kind == CompositeKind::TwoSideSessileZigZag;
        match (wants_shift, self.shift) {
            (true, None) => Err(Error::Usage("two_side_sessile_zigzag needs a shift".into())),
            (false, Some(_)) => Err(Error::Usage(format!("{} takes no shift", self.kind))),
            (_, Some(s)) if !s.is_finite() => Err(Error::Domain("non-finite shift".into())),
            _ => Ok(()),
        }
    }
}

/// Shape of a layer on one sub-interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Bulk(BulkPiece),
    /// Ultra-thin film, zero height at leading order.
    Utf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub x_from: f64,
    pub x_to: f64,
    pub shape: Shape,
}

impl Segment {
    pub fn bulk(x_from: f64, x_to: f64, piece: BulkPiece) -> Self {
        Segment {
            x_from,
            x_to,
            shape: Shape::Bulk(piece),
        }
    }

    pub fn utf(x_from: f64, x_to: f64) -> Self {
        Segment {
            x_from,
            x_to,
            shape: Shape::Utf,
        }
    }

    /// Leading-order height (zero on a thin film).
    pub fn eval(&self, x: f64) -> f64 {
        match self.shape {
            Shape::Bulk(p) => p.eval(x),
            Shape::Utf => 0.0,
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match self.shape {
            Shape::Bulk(p) => p.deriv(x),
            Shape::Utf => 0.0,
        }
    }

    pub fn max(&self) -> f64 {
        match self.shape {
            Shape::Bulk(p) => p.max_on(self.x_from, self.x_to),
            Shape::Utf => 0.0,
        }
    }

    fn mirrored(&self, len: f64) -> Self {
        let shape = match self.shape {
            Shape::Bulk(p) => Shape::Bulk(p.mirrored(len)),
            Shape::Utf => Shape::Utf,
        };
        Segment {
            x_from: -len - self.x_to,
            x_to: -len - self.x_from,
            shape,
        }
    }
}

/// Special degenerate configurations reached exactly at critical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionFlag {
    /// A bulk piece of this layer is constant (zero curvature).
    FlatBulk(Layer),
    /// A bulk piece of this layer is a straight, non-constant segment.
    LinearBulk(Layer),
}

/// Fully resolved leading-order profile of a composite solution.
#[derive(Debug, Clone)]
pub struct LeadingOrderSolution {
    pub spec: CompositeSpec,
    pub lambda1_0: Option<f64>,
    pub lambda2_0: Option<f64>,
    /// Contact lines ordered by increasing `x`.
    pub cls: Vec<ClDescriptor>,
    pub h1_pieces: Vec<Segment>,
    pub h_pieces: Vec<Segment>,
    /// Realized `(max h1, max h)` over the interval.
    pub maxima: (f64, f64),
    /// Matching constants and contact-line distances by name.
    pub constants: BTreeMap<String, f64>,
    pub flags: Vec<SolutionFlag>,
    pub report: ConstraintReport,
}

impl LeadingOrderSolution {
    pub fn pieces(&self, layer: Layer) -> &[Segment] {
        match layer {
            Layer::H1 => &self.h1_pieces,
            Layer::H => &self.h_pieces,
        }
    }

    /// Contact-line positions ordered by increasing `x`.
    pub fn cl_positions(&self) -> Vec<f64> {
        self.cls.iter().map(|c| c.position).collect()
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }

    /// Segment of `layer` containing `x`; the left segment wins at a junction.
    pub fn segment_at(&self, layer: Layer, x: f64) -> &Segment {
        let segs = self.pieces(layer);
        segs.iter()
            .find(|s| x <= s.x_to)
            .unwrap_or_else(|| segs.last().unwrap())
    }

    /// Leading-order height of `layer` at `x`.
    pub fn eval(&self, layer: Layer, x: f64) -> f64 {
        self.segment_at(layer, x).eval(x)
    }

    /// Largest value mismatch of either layer across interior segment junctions.
    pub fn continuity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for segs in [&self.h1_pieces, &self.h_pieces] {
            for w in segs.windows(2) {
                let x = w[0].x_to;
                worst = worst.max((w[0].eval(x) - w[1].eval(x)).abs());
            }
        }
        worst
    }
}

/// Open interval of admissible shifts of the two-side sessile zigzag with
/// the spec's other parameters.
pub fn two_side_shift_range(spec: &CompositeSpec) -> (f64, f64) {
    closed_form::two_side_shift_range(&closed_form::Ctx::new(spec))
}

/// Existence report of a spec: every named inequality with its signed margin.
pub fn existence_report(spec: &CompositeSpec) -> Result<ConstraintReport> {
    spec.validate()?;
    Ok(closed_form::layout(spec)?.report)
}

/// Constructs the leading-order solution, rejecting specs outside the
/// existence domain.
pub fn build(spec: &CompositeSpec) -> Result<LeadingOrderSolution> {
    let sol = build_unchecked(spec)?;
    if !sol.report.all_satisfied() {
        return Err(Error::ConstraintViolation { report: sol.report });
    }
    Ok(sol)
}

/// One-contact-line solutions only.
pub fn build_one_cl(spec: &CompositeSpec) -> Result<LeadingOrderSolution> {
    if !spec.kind.is_one_cl() {
        return Err(Error::Usage(format!(
            "{} is not a one-contact-line solution",
            spec.kind
        )));
    }
    build(spec)
}

/// Evaluates the closed form without enforcing the existence constraints.
/// Used to probe constraint boundaries, where the layout degenerates.
pub fn build_unchecked(spec: &CompositeSpec) -> Result<LeadingOrderSolution> {
    spec.validate()?;
    let raw = closed_form::layout(spec)?;
    let mut sol = LeadingOrderSolution {
        spec: *spec,
        lambda1_0: raw.lambda1,
        lambda2_0: raw.lambda2,
        cls: raw.cls,
        h1_pieces: raw.h1,
        h_pieces: raw.h,
        maxima: (0.0, 0.0),
        constants: raw.constants,
        flags: raw.flags,
        report: raw.report,
    };
    fill_slope_jumps(&mut sol);
    if spec.inverted {
        let len = spec.length;
        sol.h1_pieces = sol
            .h1_pieces
            .iter()
            .rev()
            .map(|s| s.mirrored(len))
            .collect();
        sol.h_pieces = sol.h_pieces.iter().rev().map(|s| s.mirrored(len)).collect();
        sol.cls = sol.cls.iter().rev().map(|c| c.mirrored(len)).collect();
    }
    sol.maxima = (layer_max(&sol.h1_pieces), layer_max(&sol.h_pieces));
    Ok(sol)
}

fn layer_max(segs: &[Segment]) -> f64 {
    segs.iter().map(Segment::max).fold(0.0, f64::max)
}

fn fill_slope_jumps(sol: &mut LeadingOrderSolution) {
    for i in 0..sol.cls.len() {
        let cl = sol.cls[i];
        let companion = match cl.cl_type.vanishing_layer() {
            Layer::H1 => &sol.h_pieces,
            Layer::H => &sol.h1_pieces,
        };
        let x = cl.position;
        let left = companion
            .iter()
            .find(|s| (s.x_to - x).abs() <= 1e-12 * (1.0 + x.abs()));
        let right = companion
            .iter()
            .find(|s| (s.x_from - x).abs() <= 1e-12 * (1.0 + x.abs()));
        let jump = match (left, right) {
            (Some(l), Some(r)) => r.deriv(x) - l.deriv(x),
            _ => 0.0,
        };
        sol.cls[i].slope_jump = jump;
    }
}

#[cfg(test)]
mod tests;
