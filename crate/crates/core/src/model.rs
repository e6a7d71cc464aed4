//! Elementary and bipartite boxes.
//!
//! A [`JointBox`] is the canonical representation: nine blocks, one per setting
//! pair `(x_A, x_B)`, each holding `p(++), p(+-), p(-+), p(--)`. The
//! [`CompactState`] is a 15-number view of the same object (the nine `++`
//! probabilities plus the six one-party marginals) from which the full table
//! is recovered by [`CompactState::expand`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bell::BellOutcome;
use crate::error::{Error, Result};

/// Tolerance for exact algebraic identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Default tolerance for membership predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

/// One of the three dichotomic local measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Setting {
    X,
    Y,
    Z,
}

impl Setting {
    pub const ALL: [Setting; 3] = [Setting::X, Setting::Y, Setting::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_char(c: char) -> Option<Setting> {
        match c.to_ascii_uppercase() {
            'X' => Some(Setting::X),
            'Y' => Some(Setting::Y),
            'Z' => Some(Setting::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Setting::X => "X",
            Setting::Y => "Y",
            Setting::Z => "Z",
        };
        f.write_str(c)
    }
}

/// Measurement outcome `+` or `-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

/// Entry of a 2x2 outcome block, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Entry {
    PP,
    PM,
    MP,
    MM,
}

impl Entry {
    pub const ALL: [Entry; 4] = [Entry::PP, Entry::PM, Entry::MP, Entry::MM];

    pub fn new(a: Sign, b: Sign) -> Entry {
        match (a, b) {
            (Sign::Plus, Sign::Plus) => Entry::PP,
            (Sign::Plus, Sign::Minus) => Entry::PM,
            (Sign::Minus, Sign::Plus) => Entry::MP,
            (Sign::Minus, Sign::Minus) => Entry::MM,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// JSON key used in the box file format.
    pub fn key(self) -> &'static str {
        match self {
            Entry::PP => "pp",
            Entry::PM => "pm",
            Entry::MP => "mp",
            Entry::MM => "mm",
        }
    }
}

fn check_probability(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::ProbabilityOutOfRange { name, value })
    }
}

/// Outcome-`+` probabilities of the X, Y, Z measurements of one elementary system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalState {
    p: [f64; 3],
}

impl LocalState {
    pub fn new(p_x: f64, p_y: f64, p_z: f64) -> Result<Self> {
        Ok(LocalState {
            p: [
                check_probability("p_x", p_x)?,
                check_probability("p_y", p_y)?,
                check_probability("p_z", p_z)?,
            ],
        })
    }

    pub fn maximally_mixed() -> Self {
        LocalState { p: [0.5; 3] }
    }

    pub fn probabilities(&self) -> [f64; 3] {
        self.p
    }

    pub fn prob(&self, setting: Setting) -> f64 {
        self.p[setting.index()]
    }

    /// Probability of `outcome` for `setting`.
    pub fn outcome_prob(&self, setting: Setting, outcome: Sign) -> f64 {
        match outcome {
            Sign::Plus => self.prob(setting),
            Sign::Minus => 1.0 - self.prob(setting),
        }
    }

    pub fn moments(&self) -> MomentVector {
        MomentVector {
            m: self.p.map(|p| 2.0 * p - 1.0),
        }
    }
}

/// Mean values `m = 2p - 1` of the three local observables.
///
/// The implicit fourth component is 1; see [`MomentVector::extended`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    m: [f64; 3],
}

impl MomentVector {
    pub fn new(m_x: f64, m_y: f64, m_z: f64) -> Result<Self> {
        for (name, v) in [("m_x", m_x), ("m_y", m_y), ("m_z", m_z)] {
            if !(v.is_finite() && (-1.0..=1.0).contains(&v)) {
                return Err(Error::MomentOutOfRange { name, value: v });
            }
        }
        Ok(MomentVector { m: [m_x, m_y, m_z] })
    }

    /// Builds a moment vector without the `[-1, 1]` range check.
    ///
    /// Operator evaluation is bilinear and well defined for any real vector,
    /// which the geometry scans and tests rely on.
    pub fn unchecked(m: [f64; 3]) -> Self {
        MomentVector { m }
    }

    pub fn zero() -> Self {
        MomentVector { m: [0.0; 3] }
    }

    pub fn components(&self) -> [f64; 3] {
        self.m
    }

    pub fn extended(&self) -> [f64; 4] {
        [self.m[0], self.m[1], self.m[2], 1.0]
    }

    pub fn norm_sq(&self) -> f64 {
        self.m.iter().map(|v| v * v).sum()
    }

    pub fn dot(&self, other: &MomentVector) -> f64 {
        self.m.iter().zip(other.m.iter()).map(|(a, b)| a * b).sum()
    }

    /// Inverse of [`LocalState::moments`]; fails when a component leaves `[-1, 1]`.
    pub fn to_local(&self) -> Result<LocalState> {
        LocalState::new(
            (self.m[0] + 1.0) / 2.0,
            (self.m[1] + 1.0) / 2.0,
            (self.m[2] + 1.0) / 2.0,
        )
    }
}

pub fn moments_from_local(state: &LocalState) -> MomentVector {
    state.moments()
}

pub fn local_from_moments(m: &MomentVector) -> Result<LocalState> {
    m.to_local()
}

/// Full conditional probability table `p(ab | x_A x_B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointBox {
    blocks: [[f64; 4]; 9],
}

fn block_index(x_a: Setting, x_b: Setting) -> usize {
    3 * x_a.index() + x_b.index()
}

impl JointBox {
    /// Blocks are indexed `3 * x_A + x_B` with entries `[pp, pm, mp, mm]`.
    pub fn from_blocks(blocks: [[f64; 4]; 9]) -> Self {
        JointBox { blocks }
    }

    pub fn uniform() -> Self {
        JointBox {
            blocks: [[0.25; 4]; 9],
        }
    }

    /// Box with uniform marginals and correlators `E(x_A x_B) = corr[x_A][x_B]`.
    pub fn from_correlators(corr: [[f64; 3]; 3]) -> Self {
        let mut blocks = [[0.0; 4]; 9];
        for a in Setting::ALL {
            for b in Setting::ALL {
                let e = corr[a.index()][b.index()];
                let same = (1.0 + e) / 4.0;
                let diff = (1.0 - e) / 4.0;
                blocks[block_index(a, b)] = [same, diff, diff, same];
            }
        }
        JointBox { blocks }
    }

    pub fn blocks(&self) -> &[[f64; 4]; 9] {
        &self.blocks
    }

    pub fn block(&self, x_a: Setting, x_b: Setting) -> [f64; 4] {
        self.blocks[block_index(x_a, x_b)]
    }

    pub fn block_mut(&mut self, x_a: Setting, x_b: Setting) -> &mut [f64; 4] {
        &mut self.blocks[block_index(x_a, x_b)]
    }

    pub fn prob(&self, a: Sign, b: Sign, x_a: Setting, x_b: Setting) -> f64 {
        self.block(x_a, x_b)[Entry::new(a, b).index()]
    }

    /// `p(+ | x_A)` read from the block with B-setting `x_b`.
    pub fn marginal_a(&self, x_a: Setting, x_b: Setting) -> f64 {
        let blk = self.block(x_a, x_b);
        blk[0] + blk[1]
    }

    /// `p(+ | x_B)` read from the block with A-setting `x_a`.
    pub fn marginal_b(&self, x_a: Setting, x_b: Setting) -> f64 {
        let blk = self.block(x_a, x_b);
        blk[0] + blk[2]
    }

    /// Equal-outcome probability `p(++|WW) + p(--|WW)`.
    pub fn parity_even(&self, w: Setting) -> f64 {
        let blk = self.block(w, w);
        blk[0] + blk[3]
    }

    /// `E(x_A x_B) = p(++) + p(--) - p(+-) - p(-+)`.
    pub fn correlator(&self, x_a: Setting, x_b: Setting) -> f64 {
        let [pp, pm, mp, mm] = self.block(x_a, x_b);
        pp + mm - pm - mp
    }

    /// Moment vector of party A, with marginals read against B-setting X.
    pub fn local_moments_a(&self) -> MomentVector {
        MomentVector::unchecked(Setting::ALL.map(|x| 2.0 * self.marginal_a(x, Setting::X) - 1.0))
    }

    /// Moment vector of party B, with marginals read against A-setting X.
    pub fn local_moments_b(&self) -> MomentVector {
        MomentVector::unchecked(Setting::ALL.map(|y| 2.0 * self.marginal_b(Setting::X, y) - 1.0))
    }

    /// Extended moment matrix `M[i][j] = <m^A_i m^B_j>` with index 3 standing
    /// for the constant component.
    pub fn moment_matrix(&self) -> [[f64; 4]; 4] {
        let mut mm = [[0.0; 4]; 4];
        for a in Setting::ALL {
            for b in Setting::ALL {
                mm[a.index()][b.index()] = self.correlator(a, b);
            }
        }
        let ma = self.local_moments_a().components();
        let mb = self.local_moments_b().components();
        for i in 0..3 {
            mm[i][3] = ma[i];
            mm[3][i] = mb[i];
        }
        mm[3][3] = 1.0;
        mm
    }

    /// Convex combination `sum_i w_i box_i`. Weights are used as given.
    pub fn mixture(parts: &[(f64, JointBox)]) -> JointBox {
        let mut blocks = [[0.0; 4]; 9];
        for (w, b) in parts {
            for (dst, src) in blocks.iter_mut().zip(b.blocks.iter()) {
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d += w * s;
                }
            }
        }
        JointBox { blocks }
    }

    pub fn max_abs_diff(&self, other: &JointBox) -> f64 {
        self.blocks
            .iter()
            .flatten()
            .zip(other.blocks.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        validate_joint_box(self, tol)
    }
}

pub fn product_box(alice: &LocalState, bob: &LocalState) -> JointBox {
    let mut blocks = [[0.0; 4]; 9];
    for x_a in Setting::ALL {
        for x_b in Setting::ALL {
            let blk = &mut blocks[block_index(x_a, x_b)];
            for a in Sign::BOTH {
                for b in Sign::BOTH {
                    blk[Entry::new(a, b).index()] =
                        alice.outcome_prob(x_a, a) * bob.outcome_prob(x_b, b);
                }
            }
        }
    }
    JointBox { blocks }
}

pub fn correlator(b: &JointBox, x_a: Setting, x_b: Setting) -> f64 {
    b.correlator(x_a, x_b)
}

/// A constraint of the amended theory that a box may violate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum Constraint {
    Positivity {
        x_a: Setting,
        x_b: Setting,
        entry: Entry,
    },
    Normalization {
        x_a: Setting,
        x_b: Setting,
    },
    /// A-marginal of `x_a` differs between B-settings `x_b` and `x_b_other`.
    NonSignalingA {
        x_a: Setting,
        x_b: Setting,
        x_b_other: Setting,
    },
    NonSignalingB {
        x_b: Setting,
        x_a: Setting,
        x_a_other: Setting,
    },
    BellPositivity {
        outcome: BellOutcome,
    },
    LocalBall {
        party: Party,
    },
    /// State of `party` conditioned on the other party measuring `setting`
    /// with result `outcome`.
    SteeredBall {
        party: Party,
        setting: Setting,
        outcome: Sign,
    },
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Positivity { x_a, x_b, entry } => {
                write!(f, "positivity of p({}|{x_a}{x_b})", entry.key())
            }
            Constraint::Normalization { x_a, x_b } => {
                write!(f, "normalization of block {x_a}{x_b}")
            }
            Constraint::NonSignalingA {
                x_a,
                x_b,
                x_b_other,
            } => write!(
                f,
                "no-signaling: p(+|{x_a}_A) differs between B settings {x_b} and {x_b_other}"
            ),
            Constraint::NonSignalingB {
                x_b,
                x_a,
                x_a_other,
            } => write!(
                f,
                "no-signaling: p(+|{x_b}_B) differs between A settings {x_a} and {x_a_other}"
            ),
            Constraint::BellPositivity { outcome } => {
                write!(f, "positivity of joint outcome {outcome}")
            }
            Constraint::LocalBall { party } => write!(f, "local state of {party:?} inside ball"),
            Constraint::SteeredBall {
                party,
                setting,
                outcome,
            } => write!(
                f,
                "state of {party:?} steered by {setting}={outcome} inside ball"
            ),
        }
    }
}

/// A violated constraint and by how much.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    #[serde(flatten)]
    pub constraint: Constraint,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.violations
            .iter()
            .map(|v| v.magnitude)
            .fold(0.0, f64::max)
    }

    pub fn summary(&self) -> String {
        self.violations
            .iter()
            .map(|v| format!("{} (by {:.3e})", v.constraint, v.magnitude))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Checks positivity, normalization and the 12 independent no-signaling
/// equalities (two per setting per party).
pub fn validate_joint_box(b: &JointBox, tol: f64) -> ValidationReport {
    let mut violations = Vec::new();
    for x_a in Setting::ALL {
        for x_b in Setting::ALL {
            let blk = b.block(x_a, x_b);
            for entry in Entry::ALL {
                let v = blk[entry.index()];
                if !v.is_finite() || v < -tol || v > 1.0 + tol {
                    violations.push(Violation {
                        constraint: Constraint::Positivity { x_a, x_b, entry },
                        magnitude: if v < 0.0 { -v } else { (v - 1.0).abs() },
                    });
                }
            }
            let dev = (blk.iter().sum::<f64>() - 1.0).abs();
            if dev.is_nan() || dev > tol {
                violations.push(Violation {
                    constraint: Constraint::Normalization { x_a, x_b },
                    magnitude: dev,
                });
            }
        }
    }
    for x in Setting::ALL {
        let ref_a = b.marginal_a(x, Setting::X);
        let ref_b = b.marginal_b(Setting::X, x);
        for other in [Setting::Y, Setting::Z] {
            let dev = (b.marginal_a(x, other) - ref_a).abs();
            if dev.is_nan() || dev > tol {
                violations.push(Violation {
                    constraint: Constraint::NonSignalingA {
                        x_a: x,
                        x_b: Setting::X,
                        x_b_other: other,
                    },
                    magnitude: dev,
                });
            }
            let dev = (b.marginal_b(other, x) - ref_b).abs();
            if dev.is_nan() || dev > tol {
                violations.push(Violation {
                    constraint: Constraint::NonSignalingB {
                        x_b: x,
                        x_a: Setting::X,
                        x_a_other: other,
                    },
                    magnitude: dev,
                });
            }
        }
    }
    ValidationReport { violations }
}

/// The 15-parameter view: nine `p(++|x_A x_B)` and six marginals.
///
/// Off-diagonal entries are stored row-major over `(x_A, x_B)` with the
/// diagonal skipped: XY, XZ, YX, YZ, ZX, ZY.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompactState {
    pub diag: [f64; 3],
    pub off_diag: [f64; 6],
    pub marg_a: [f64; 3],
    pub marg_b: [f64; 3],
}

pub const COMPACT_LEN: usize = 15;

const OFF_DIAG_PAIRS: [(Setting, Setting); 6] = [
    (Setting::X, Setting::Y),
    (Setting::X, Setting::Z),
    (Setting::Y, Setting::X),
    (Setting::Y, Setting::Z),
    (Setting::Z, Setting::X),
    (Setting::Z, Setting::Y),
];

impl CompactState {
    pub fn from_array(v: [f64; COMPACT_LEN]) -> Self {
        CompactState {
            diag: [v[0], v[1], v[2]],
            off_diag: [v[3], v[4], v[5], v[6], v[7], v[8]],
            marg_a: [v[9], v[10], v[11]],
            marg_b: [v[12], v[13], v[14]],
        }
    }

    pub fn to_array(&self) -> [f64; COMPACT_LEN] {
        let mut v = [0.0; COMPACT_LEN];
        v[..3].copy_from_slice(&self.diag);
        v[3..9].copy_from_slice(&self.off_diag);
        v[9..12].copy_from_slice(&self.marg_a);
        v[12..].copy_from_slice(&self.marg_b);
        v
    }

    /// Position of `p(++|x_A x_B)` in [`CompactState::to_array`] order.
    pub fn pp_index(x_a: Setting, x_b: Setting) -> usize {
        if x_a == x_b {
            x_a.index()
        } else {
            3 + OFF_DIAG_PAIRS
                .iter()
                .position(|&p| p == (x_a, x_b))
                .expect("off-diagonal pair")
        }
    }

    pub fn pp(&self, x_a: Setting, x_b: Setting) -> f64 {
        self.to_array()[Self::pp_index(x_a, x_b)]
    }

    /// Reads the 15 numbers off a table without validating it.
    pub fn read_off(b: &JointBox) -> Self {
        let mut v = [0.0; COMPACT_LEN];
        for x_a in Setting::ALL {
            for x_b in Setting::ALL {
                v[Self::pp_index(x_a, x_b)] = b.block(x_a, x_b)[0];
            }
        }
        for x in Setting::ALL {
            v[9 + x.index()] = b.marginal_a(x, Setting::X);
            v[12 + x.index()] = b.marginal_b(Setting::X, x);
        }
        Self::from_array(v)
    }

    /// Reconstructs the full table. Entries may come out negative; positivity
    /// is what [`validate_joint_box`] checks.
    pub fn expand(&self) -> JointBox {
        let mut blocks = [[0.0; 4]; 9];
        for x_a in Setting::ALL {
            for x_b in Setting::ALL {
                let pp = self.pp(x_a, x_b);
                let ma = self.marg_a[x_a.index()];
                let mb = self.marg_b[x_b.index()];
                blocks[block_index(x_a, x_b)] = [pp, ma - pp, mb - pp, 1.0 - ma - mb + pp];
            }
        }
        JointBox { blocks }
    }
}

/// Validating conversion; the box must pass [`validate_joint_box`] at `tol`.
pub fn compact_from_box(b: &JointBox, tol: f64) -> Result<CompactState> {
    let report = validate_joint_box(b, tol);
    if !report.is_valid() {
        return Err(Error::InvalidBox(report.summary()));
    }
    Ok(CompactState::read_off(b))
}

pub fn expand(state: &CompactState) -> JointBox {
    state.expand()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ls(x: f64, y: f64, z: f64) -> LocalState {
        LocalState::new(x, y, z).unwrap()
    }

    #[test]
    fn uniform_box_is_valid() {
        assert!(validate_joint_box(&JointBox::uniform(), IDENTITY_TOL).is_valid());
    }

    #[test]
    fn signaling_violation_magnitude() {
        let mut b = JointBox::uniform();
        *b.block_mut(Setting::X, Setting::X) = [0.6, 0.4, 0.0, 0.0];
        let report = validate_joint_box(&b, IDENTITY_TOL);
        let ns: Vec<_> = report
            .violations
            .iter()
            .filter(|v| {
                matches!(
                    v.constraint,
                    Constraint::NonSignalingA {
                        x_a: Setting::X,
                        ..
                    }
                )
            })
            .collect();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!((v.magnitude - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn local_state_rejects_out_of_range() {
        assert!(LocalState::new(1.2, 0.5, 0.5).is_err());
        assert!(LocalState::new(0.5, -0.1, 0.5).is_err());
        assert!(LocalState::new(0.5, 0.5, f64::NAN).is_err());
    }

    #[test]
    fn product_of_mixed_states_is_uniform() {
        let m = LocalState::maximally_mixed();
        assert_eq!(product_box(&m, &m), JointBox::uniform());
    }

    #[test]
    fn product_with_deterministic_factors() {
        let b = product_box(&ls(1.0, 0.0, 0.5), &ls(0.0, 1.0, 0.5));
        let xx = b.block(Setting::X, Setting::X);
        assert_eq!(xx[0], 0.0);
        assert_eq!(xx[1], 1.0);
        assert_eq!(b.block(Setting::Z, Setting::Z)[0], 0.25);
        assert!(validate_joint_box(&b, IDENTITY_TOL).is_valid());
    }

    #[test]
    fn compact_of_uniform_box() {
        let c = compact_from_box(&JointBox::uniform(), IDENTITY_TOL).unwrap();
        assert_eq!(c.diag, [0.25; 3]);
        assert_eq!(c.off_diag, [0.25; 6]);
        assert_eq!(c.marg_a, [0.5; 3]);
        assert_eq!(c.marg_b, [0.5; 3]);
        assert_eq!(c.expand(), JointBox::uniform());
    }

    #[test]
    fn compact_reads_product_marginals() {
        let b = product_box(&ls(1.0, 0.0, 0.5), &ls(0.0, 1.0, 0.5));
        let c = compact_from_box(&b, IDENTITY_TOL).unwrap();
        assert_eq!(c.marg_a, [1.0, 0.0, 0.5]);
        assert_eq!(c.marg_b, [0.0, 1.0, 0.5]);
    }

    #[test]
    fn compact_rejects_invalid_box() {
        let mut b = JointBox::uniform();
        *b.block_mut(Setting::X, Setting::X) = [0.6, 0.4, 0.0, 0.0];
        assert!(matches!(
            compact_from_box(&b, IDENTITY_TOL),
            Err(Error::InvalidBox(_))
        ));
    }

    #[test]
    fn expand_perfect_correlation_block() {
        let mut c = CompactState::read_off(&JointBox::uniform());
        c.diag[0] = 0.5;
        let xx = c.expand().block(Setting::X, Setting::X);
        assert_eq!(xx, [0.5, 0.0, 0.0, 0.5]);
        assert_eq!(c.expand().correlator(Setting::X, Setting::X), 1.0);
    }

    #[test]
    fn expand_flags_negative_entry() {
        let mut c = CompactState::read_off(&JointBox::uniform());
        c.diag[0] = 0.6;
        let b = c.expand();
        assert!((b.block(Setting::X, Setting::X)[1] + 0.1).abs() < 1e-15);
        let report = validate_joint_box(&b, DEFAULT_TOL);
        assert!(report.violations.iter().any(|v| matches!(
            v.constraint,
            Constraint::Positivity {
                x_a: Setting::X,
                x_b: Setting::X,
                entry: Entry::PM
            }
        )));
    }

    #[test]
    fn moments_examples() {
        assert_eq!(
            LocalState::maximally_mixed().moments().components(),
            [0.0; 3]
        );
        assert_eq!(ls(1.0, 0.0, 0.5).moments().components(), [1.0, -1.0, 0.0]);
        assert!(MomentVector::new(1.5, 0.0, 0.0).is_err());
        assert!(MomentVector::unchecked([1.5, 0.0, 0.0]).to_local().is_err());
    }

    #[test]
    fn uniform_correlators_vanish() {
        let u = JointBox::uniform();
        for a in Setting::ALL {
            for b in Setting::ALL {
                assert_eq!(u.correlator(a, b), 0.0);
            }
        }
    }

    #[test]
    fn off_diag_order_is_row_major() {
        let idx: Vec<usize> = OFF_DIAG_PAIRS
            .iter()
            .map(|&(a, b)| CompactState::pp_index(a, b))
            .collect();
        assert_eq!(idx, vec![3, 4, 5, 6, 7, 8]);
        assert_eq!(CompactState::pp_index(Setting::Z, Setting::Z), 2);
    }
}
