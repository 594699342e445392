//! Leading-order composite solutions, existence diagrams and an implicit
//! simulator for two-layer thin liquid films on a solid substrate.

// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops mirror the banded stencil formulas.
#![allow(clippy::needless_range_loop)]

pub mod blocks;
pub mod composites;
pub mod diagrams;
pub mod error;
pub mod potential;
pub mod simulator;

pub use blocks::{ClDescriptor, ClType, Layer, Orientation};
pub use composites::{
    build, build_one_cl, CompositeKind, CompositeSpec, LeadingOrderSolution, Profile,
};
pub use diagrams::{DiagramConfig, EdBoundary};
pub use error::{Constraint, ConstraintReport, Error, Result};
pub use potential::PotentialParams;
pub use simulator::{Diagnostics, SimParams, SimState};
