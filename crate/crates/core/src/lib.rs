//! Finite causal orders and the algebra of causal sets.
//!
//! - [`order`]: causalities, diamonds, completeness/convergence predicates,
//!   the crossing property and order reversal.
//! - [`algebra`]: Δ/∇ classification, causal unions and law checks.
//! - [`reconstruction`]: ribbons, congruence classes and recovery of the
//!   order from the set algebra alone.
//! - [`measure`]: causal measures and formal entropy.
//! - [`minkowski`]: sprinkling flat spacetime and horizon entropy.
//! - [`cli`]: the `causal` command line.

pub mod algebra;
pub mod cli;
pub mod fixtures;
pub mod io;
pub mod measure;
pub mod minkowski;
pub mod order;
pub mod pointset;
pub mod reconstruction;
pub mod report;

pub use algebra::{classify, CausalAlgebra, CausalClass, Caps, CollectionKind, UnionKind};
pub use order::{validate_causality, Causality, Crossing, Direction, OrderError, ReversalMap};
pub use pointset::PointSet;
pub use report::{LawEntry, LawReport, Verdict};
