//! No-signaling boxes with three dichotomic settings per party, amended by a
//! joint Bell-type measurement.
//!
//! Adding the ideal Bell measurement forces every local state into the unit
//! ball of moments (the Bloch ball). Noisy and non-maximally entangled
//! variants interpolate between that ball and the unrestricted cube. The
//! crate provides:
//!
//! - [`model`]: box tables, the 15-number compact view, validation;
//! - [`bell`]: the joint-measurement families and their outcome operators;
//! - [`geometry`]: ball and cuboid feasibility, grid scans, CSV regions;
//! - [`correlations`]: CHSH, membership levels, exact LP, Level-3 sampler;
//! - [`quantum`]: a two-qubit Born-rule oracle;
//! - [`simplex`]: the dense tableau solver behind the LP.

#![allow(clippy::needless_range_loop)]

pub mod bell;
pub mod boxfile;
pub mod correlations;
mod error;
pub mod geometry;
pub mod model;
pub mod quantum;
pub mod simplex;

pub use bell::{
    bell_probs, family_probs, noisy_bell_probs, operator_set, outcome_value, p4_product,
    positivity_report, BellOutcome, BellProbabilities, MeasurementFamily, OperatorSet,
    PositivityReport,
};
pub use correlations::{
    chsh_value, lp_max_chsh, membership, sample_level3, ChshSpec, LpOutcome, LpProblem,
    MembershipLevel, MembershipReport, SampleRun,
};
pub use error::{Error, Result};
pub use geometry::{
    ball_contains, ball_equivalence_check, cuboid_feasible, scan_lh_region, scan_local_region,
    scan_local_slice, tightness_check, BallSpec, CuboidSpec, FeasibilityRegion,
};
pub use model::{
    compact_from_box, correlator, expand, local_from_moments, moments_from_local, product_box,
    validate_joint_box, CompactState, Constraint, JointBox, LocalState, MomentVector, Party,
    Setting, Sign, ValidationReport, Violation, DEFAULT_TOL, IDENTITY_TOL,
};
