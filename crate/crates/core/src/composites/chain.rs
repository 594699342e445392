//! Chain notation for composite solutions: a parenthesized sequence of
//! one-contact-line blocks (`0` lens, `1` internal drop, `2` lower-layer drop,
//! `3` upper-layer drop), each optionally marked `-` (mirrored) or `+`
//! (explicitly standard). A standard block has its feature at the left end of
//! its sub-interval; a mirrored one at the right end.

use std::fmt;

use super::profile::{sample_at, NODES_PER_EPS};
use super::{build, two_side_shift_range, CompositeKind, CompositeSpec, Profile};
use crate::error::{Error, Result};
use crate::potential::PotentialParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockOrientation {
    Standard,
    Inverted,
}

impl BlockOrientation {
    pub fn flipped(self) -> Self {
        match self {
            BlockOrientation::Standard => BlockOrientation::Inverted,
            BlockOrientation::Inverted => BlockOrientation::Standard,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChainBlock {
    pub digit: u8,
    pub orientation: BlockOrientation,
    /// Whether a standard block was written with an explicit `+`.
    pub explicit_plus: bool,
}

impl ChainBlock {
    fn same_shape(&self, other: &ChainBlock) -> bool {
        self.digit == other.digit && self.orientation == other.orientation
    }

    /// One-contact-line kind of the block.
    pub fn kind(&self) -> CompositeKind {
        match self.digit {
            0 => CompositeKind::Lens,
            1 => CompositeKind::InternalDrop,
            2 => CompositeKind::H1Drop,
            _ => CompositeKind::HDrop,
        }
    }

    /// Whether the block is the mirror image of the as-built solution, whose
    /// lens and internal drop are centered at the right end and whose drops
    /// are centered at the left end.
    fn needs_inversion(&self) -> bool {
        let built_right = matches!(self.digit, 0 | 1);
        let want_right = self.orientation == BlockOrientation::Inverted;
        built_right != want_right
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainExpr {
    pub blocks: Vec<ChainBlock>,
}

impl ChainExpr {
    /// Image under reflection of the interval: order reversed, every block
    /// mirrored.
    pub fn mirrored(&self) -> ChainExpr {
        ChainExpr {
            blocks: self
                .blocks
                .iter()
                .rev()
                .map(|b| ChainBlock {
                    digit: b.digit,
                    orientation: b.orientation.flipped(),
                    explicit_plus: false,
                })
                .collect(),
        }
    }

    /// Equality up to the explicit `+` markers.
    pub fn same_shape(&self, other: &ChainExpr) -> bool {
        self.blocks.len() == other.blocks.len()
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| a.same_shape(b))
    }

    /// Whether the chain equals its mirror image.
    pub fn is_symmetric(&self) -> bool {
        self.same_shape(&self.mirrored())
    }
}

impl fmt::Display for ChainExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for b in &self.blocks {
            write!(f, "{}", b.digit)?;
            match (b.orientation, b.explicit_plus) {
                (BlockOrientation::Inverted, _) => f.write_str("-")?,
                (BlockOrientation::Standard, true) => f.write_str("+")?,
                _ => {}
            }
        }
        f.write_str(")")
    }
}

/// Parses `'(' (digit ['-' | '+'])+ ')'` with digits `0..=3`; surrounding
/// whitespace and quotes are ignored. Errors carry the byte position.
pub fn parse_chain(text: &str) -> Result<ChainExpr> {
    let trimmed = text.trim().trim_matches(|c| c == '"' || c == '\'');
    let offset = text.find(trimmed).unwrap_or(0);
    let err = |pos: usize, msg: &str| Error::Parse {
        pos: offset + pos,
        msg: msg.to_string(),
    };
    let bytes = trimmed.as_bytes();
    if bytes.first() != Some(&b'(') {
        return Err(err(0, "chain must start with '('"));
    }
    let mut blocks: Vec<ChainBlock> = Vec::new();
    let mut i = 1;
    loop {
        match bytes.get(i) {
            None => return Err(err(i, "missing closing ')'")),
            Some(b')') => {
                if blocks.is_empty() {
                    return Err(err(i, "chain has no blocks"));
                }
                if i + 1 != bytes.len() {
                    return Err(err(i + 1, "trailing characters after ')'"));
                }
                return Ok(ChainExpr { blocks });
            }
            Some(c @ b'0'..=b'3') => {
                let mut block = ChainBlock {
                    digit: c - b'0',
                    orientation: BlockOrientation::Standard,
                    explicit_plus: false,
                };
                match bytes.get(i + 1) {
                    Some(b'-') => {
                        block.orientation = BlockOrientation::Inverted;
                        i += 1;
                    }
                    Some(b'+') => {
                        block.explicit_plus = true;
                        i += 1;
                    }
                    _ => {}
                }
                blocks.push(block);
                i += 1;
            }
            Some(c) if c.is_ascii_digit() => {
                return Err(err(i, "block digit must be 0, 1, 2 or 3"))
            }
            Some(_) => return Err(err(i, "expected a block digit or ')'")),
        }
    }
}

const KNOWN_CHAINS: [(&str, CompositeKind); 13] = [
    ("(0-)", CompositeKind::Lens),
    ("(1-)", CompositeKind::InternalDrop),
    ("(2)", CompositeKind::H1Drop),
    ("(3)", CompositeKind::HDrop),
    ("(1-0)", CompositeKind::ZigZag),
    ("(02)", CompositeKind::SessileLens),
    ("(13)", CompositeKind::SessileInternalDrop),
    ("(32-)", CompositeKind::TwoDrops),
    ("(2-0-13)", CompositeKind::TwoSideSessileZigZag),
    ("(0-13)", CompositeKind::H1SessileZigZag),
    ("(1-02)", CompositeKind::HSessileZigZag),
    ("(1-00-)", CompositeKind::LensOnZigZag),
    ("(1-0+0-)", CompositeKind::LensOnZigZag),
];

/// Composite kind realized by a chain, with `true` when the chain is the
/// mirror image of the as-built solution.
pub fn chain_composite(chain: &ChainExpr) -> Option<(CompositeKind, bool)> {
    let mirrored = chain.mirrored();
    KNOWN_CHAINS.iter().find_map(|(text, kind)| {
        let known = parse_chain(text).expect("known chains parse");
        if chain.same_shape(&known) {
            Some((*kind, false))
        } else if mirrored.same_shape(&known) {
            Some((*kind, true))
        } else {
            None
        }
    })
}

/// Height parameters for chain assembly.
#[derive(Debug, Clone, PartialEq)]
pub enum ChainHeights {
    /// Same `(h1_m, h_m)` for every block or for the realized composite.
    Uniform { h1_m: f64, h_m: f64 },
    /// One `(h1_m, h_m)` pair per block; forces block-wise concatenation.
    PerBlock(Vec<(f64, f64)>),
}

/// Footprint of a one-contact-line block: extent from its feature center to
/// its contact line (lens, internal drop) or to the far end of the drop.
fn footprint(kind: CompositeKind, sigma: f64, phi: f64, h1_m: f64, h_m: f64) -> f64 {
    match kind {
        CompositeKind::Lens => h_m * (2.0 * sigma / ((sigma + 1.0) * phi)).sqrt(),
        CompositeKind::InternalDrop => h1_m * (2.0 * sigma / phi).sqrt(),
        CompositeKind::H1Drop => h1_m * (2.0 * (sigma + 1.0) / phi).sqrt(),
        _ => h_m * (2.0 / phi).sqrt(),
    }
}

fn composite_spec(
    kind: CompositeKind,
    sigma: f64,
    length: f64,
    phi: f64,
    h1_m: f64,
    h_m: f64,
) -> CompositeSpec {
    let mut spec = CompositeSpec::new(kind, sigma, length, phi, h1_m, h_m);
    if kind == CompositeKind::TwoSideSessileZigZag {
        let (lo, hi) = two_side_shift_range(&spec);
        spec = spec.with_shift(0.5 * (lo + hi));
    }
    spec
}

/// Samples the initial profile described by `chain` on `grid_points` nodes of
/// `[-length, 0]`.
///
/// Chains naming one of the composite solutions are built from its closed
/// form. Mirror-symmetric chains of even length are built as the composite of
/// their right half on `[-length/2, 0]` and reflected. Any other chain is a
/// concatenation of one-contact-line blocks, each on a sub-interval of its
/// footprint plus an equal share of the slack.
pub fn assemble_chain(
    chain: &ChainExpr,
    p: &PotentialParams,
    sigma: f64,
    length: f64,
    heights: &ChainHeights,
    grid_points: usize,
    mollify: bool,
) -> Result<Profile> {
    if grid_points < 2 {
        return Err(Error::Usage(format!(
            "need at least 2 grid points, got {grid_points}"
        )));
    }
    if !(length > 0.0 && sigma > 0.0) {
        return Err(Error::Domain(format!(
            "length and sigma must be positive, got {length}, {sigma}"
        )));
    }
    let phi = p.well_depth();
    let dx = length / (grid_points - 1) as f64;
    let x: Vec<f64> = (0..grid_points)
        .map(|i| {
            if i + 1 == grid_points {
                0.0
            } else {
                -length + i as f64 * dx
            }
        })
        .collect();
    let warning = mollify && ((grid_points - 1) as f64) < NODES_PER_EPS * length / p.eps;

    if let ChainHeights::Uniform { h1_m, h_m } = *heights {
        if let Some((kind, inverted)) = chain_composite(chain) {
            let spec = composite_spec(kind, sigma, length, phi, h1_m, h_m).inverted(inverted);
            let sol = build(&spec)?;
            let (h1, h) = sample_at(&sol, p, &x, mollify)?;
            return Ok(Profile {
                x,
                h1,
                h,
                resolution_warning: warning,
            });
        }
        let n = chain.blocks.len();
        if n.is_multiple_of(2) && chain.is_symmetric() {
            let half = ChainExpr {
                blocks: chain.blocks[n / 2..].to_vec(),
            };
            if let Some((kind, inverted)) = chain_composite(&half) {
                let spec =
                    composite_spec(kind, sigma, 0.5 * length, phi, h1_m, h_m).inverted(inverted);
                let sol = build(&spec)?;
                let first_right = x.iter().position(|&xi| xi >= -0.5 * length).unwrap();
                let (r1, r) = sample_at(&sol, p, &x[first_right..], mollify)?;
                let mut h1 = vec![0.0; grid_points];
                let mut h = vec![0.0; grid_points];
                for (k, i) in (first_right..grid_points).enumerate() {
                    h1[i] = r1[k];
                    h[i] = r[k];
                }
                for i in 0..first_right {
                    h1[i] = h1[grid_points - 1 - i];
                    h[i] = h[grid_points - 1 - i];
                }
                // With an odd node count the middle node is sampled once and
                // both halves read it; with an even count both halves mirror.
                for i in 0..grid_points / 2 {
                    let j = grid_points - 1 - i;
                    h1[i] = h1[j];
                    h[i] = h[j];
                }
                return Ok(Profile {
                    x,
                    h1,
                    h,
                    resolution_warning: warning,
                });
            }
        }
    }
    concatenate(chain, p, sigma, length, heights, &x, mollify, warning)
}

#[allow(clippy::too_many_arguments)]
fn concatenate(
    chain: &ChainExpr,
    p: &PotentialParams,
    sigma: f64,
    length: f64,
    heights: &ChainHeights,
    x: &[f64],
    mollify: bool,
    warning: bool,
) -> Result<Profile> {
    let phi = p.well_depth();
    let n = chain.blocks.len();
    let per_block: Vec<(f64, f64)> = match heights {
        ChainHeights::Uniform { h1_m, h_m } => vec![(*h1_m, *h_m); n],
        ChainHeights::PerBlock(v) => {
            if v.len() != n {
                return Err(Error::Usage(format!(
                    "chain has {n} blocks but {} height pairs were given",
                    v.len()
                )));
            }
            v.clone()
        }
    };
    let feet: Vec<f64> = chain
        .blocks
        .iter()
        .zip(&per_block)
        .map(|(b, (a, hm))| footprint(b.kind(), sigma, phi, *a, *hm))
        .collect();
    let total: f64 = feet.iter().sum();
    if !(total < length) {
        let list: Vec<String> = chain
            .blocks
            .iter()
            .zip(&feet)
            .map(|(b, w)| format!("{}:{w}", b.digit))
            .collect();
        return Err(Error::Layout(format!(
            "block footprints sum to {total} >= length {length}; widths [{}]",
            list.join(", ")
        )));
    }
    let share = (length - total) / n as f64;
    let mut h1 = vec![0.0; x.len()];
    let mut h = vec![0.0; x.len()];
    let mut left = -length;
    for (k, block) in chain.blocks.iter().enumerate() {
        let width = feet[k] + share;
        let right = if k + 1 == n { 0.0 } else { left + width };
        let (a, hm) = per_block[k];
        let spec = CompositeSpec::new(block.kind(), sigma, width, phi, a, hm)
            .inverted(block.needs_inversion());
        let sol = build(&spec)?;
        let idx: Vec<usize> = (0..x.len())
            .filter(|&i| x[i] >= left - 1e-12 && (x[i] < right || (k + 1 == n && x[i] <= right)))
            .collect();
        // Local coordinate of the block solution on [-width, 0].
        let local: Vec<f64> = idx
            .iter()
            .map(|&i| (x[i] - right).clamp(-width, 0.0))
            .collect();
        let (b1, b) = sample_at(&sol, p, &local, mollify)?;
        for (j, &i) in idx.iter().enumerate() {
            h1[i] = b1[j];
            h[i] = b[j];
        }
        left = right;
    }
    Ok(Profile {
        x: x.to_vec(),
        h1,
        h,
        resolution_warning: warning,
    })
}
