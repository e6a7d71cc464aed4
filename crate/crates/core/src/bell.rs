//! Joint (Bell-type) measurements attached to a no-signaling box.
//!
//! The ideal measurement is fixed by the parity relations
//!
//! ```text
//! p1 + p3 = p(++|XX) + p(--|XX)
//! p2 + p3 = p(++|YY) + p(--|YY)
//! p1 + p2 = p(++|ZZ) + p(--|ZZ)
//! ```
//!
//! together with normalization. Outcomes are labeled `k = 1..4` as
//! `phi+, phi-, psi+, psi-`.
//!
//! On product states every family is a bilinear form `<m_A| T_k |m_B>` in the
//! extended moment vectors `(m_x, m_y, m_z, 1)`; for a general box the same
//! operators are contracted with the box's moment matrix.

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{JointBox, LocalState, MomentVector, Setting};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
    ];

    /// Zero-based position; `k - 1` in the 1..4 labeling.
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (k, name) = match self {
            BellOutcome::PhiPlus => (1, "phi+"),
            BellOutcome::PhiMinus => (2, "phi-"),
            BellOutcome::PsiPlus => (3, "psi+"),
            BellOutcome::PsiMinus => (4, "psi-"),
        };
        write!(f, "k={k} ({name})")
    }
}

/// Probabilities of the four joint outcomes. Components may be negative:
/// that is how a box signals it is outside the amended state space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellProbabilities(pub [f64; 4]);

impl BellProbabilities {
    pub fn get(&self, k: BellOutcome) -> f64 {
        self.0[k.index()]
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_diff(&self, other: &BellProbabilities) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Which joint measurement amends the box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasurementFamily {
    IdealBell,
    /// Bell POVM mixed with white noise, `0 <= lambda < 1`.
    NoisyBell {
        lambda: f64,
    },
    /// Non-maximally entangled basis with `a = sin(pi/4 + alpha)`,
    /// `b = cos(pi/4 + alpha)`, `0 <= alpha <= pi/4`.
    NonMax {
        alpha: f64,
    },
}

impl MeasurementFamily {
    pub fn noisy(lambda: f64) -> Result<Self> {
        if lambda.is_finite() && (0.0..1.0).contains(&lambda) {
            Ok(MeasurementFamily::NoisyBell { lambda })
        } else {
            Err(Error::NoiseOutOfRange(lambda))
        }
    }

    pub fn nonmax(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && (0.0..=FRAC_PI_4).contains(&alpha) {
            Ok(MeasurementFamily::NonMax { alpha })
        } else {
            Err(Error::AngleOutOfRange(alpha))
        }
    }

    /// Radius of the local state space in canonical moments, when it is a ball.
    pub fn ball_radius(&self) -> Option<f64> {
        match *self {
            MeasurementFamily::IdealBell => Some(1.0),
            MeasurementFamily::NoisyBell { lambda } => Some(1.0 / (1.0 - lambda).sqrt()),
            MeasurementFamily::NonMax { .. } => None,
        }
    }

    pub fn operators(&self) -> OperatorSet {
        operator_set(self)
    }
}

/// The four 4x4 operators `T_1..T_4` acting on extended moment vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorSet {
    pub t: [[[f64; 4]; 4]; 4],
}

const IDEAL_SIGNS: [[f64; 3]; 4] = [
    [1.0, -1.0, 1.0],
    [-1.0, 1.0, 1.0],
    [1.0, 1.0, -1.0],
    [-1.0, -1.0, -1.0],
];

fn ideal_operators() -> [[[f64; 4]; 4]; 4] {
    let mut t = [[[0.0; 4]; 4]; 4];
    for (k, signs) in IDEAL_SIGNS.iter().enumerate() {
        for i in 0..3 {
            t[k][i][i] = 0.25 * signs[i];
        }
        t[k][3][3] = 0.25;
    }
    t
}

pub fn operator_set(family: &MeasurementFamily) -> OperatorSet {
    let t = match *family {
        MeasurementFamily::IdealBell => ideal_operators(),
        MeasurementFamily::NoisyBell { lambda } => {
            let mut t = ideal_operators();
            for tk in t.iter_mut() {
                for row in tk.iter_mut() {
                    for v in row.iter_mut() {
                        *v *= 1.0 - lambda;
                    }
                }
                tk[3][3] += lambda / 4.0;
            }
            t
        }
        MeasurementFamily::NonMax { alpha } => {
            // 2ab = cos 2alpha and a^2 - b^2 = sin 2alpha. Entry [i][3] couples
            // m^A_i to the constant, [3][j] the constant to m^B_j. The
            // off-diagonal signs are those of the orthonormal basis
            // a|00>+b|11>, b|00>-a|11>, a|01>+b|10>, b|01>-a|10>.
            let c = (2.0 * alpha).cos();
            let s = (2.0 * alpha).sin();
            let q = 0.25;
            [
                [
                    [q * c, 0.0, 0.0, 0.0],
                    [0.0, -q * c, 0.0, 0.0],
                    [0.0, 0.0, q, q * s],
                    [0.0, 0.0, q * s, q],
                ],
                [
                    [-q * c, 0.0, 0.0, 0.0],
                    [0.0, q * c, 0.0, 0.0],
                    [0.0, 0.0, q, -q * s],
                    [0.0, 0.0, -q * s, q],
                ],
                [
                    [q * c, 0.0, 0.0, 0.0],
                    [0.0, q * c, 0.0, 0.0],
                    [0.0, 0.0, -q, q * s],
                    [0.0, 0.0, -q * s, q],
                ],
                [
                    [-q * c, 0.0, 0.0, 0.0],
                    [0.0, -q * c, 0.0, 0.0],
                    [0.0, 0.0, -q, -q * s],
                    [0.0, 0.0, q * s, q],
                ],
            ]
        }
    };
    OperatorSet { t }
}

impl OperatorSet {
    pub fn operator(&self, k: BellOutcome) -> &[[f64; 4]; 4] {
        &self.t[k.index()]
    }

    pub fn sum(&self) -> [[f64; 4]; 4] {
        let mut s = [[0.0; 4]; 4];
        for tk in &self.t {
            for i in 0..4 {
                for j in 0..4 {
                    s[i][j] += tk[i][j];
                }
            }
        }
        s
    }

    /// `<m_a| T_k |m_b>` with extended vectors.
    pub fn outcome_value(&self, k: BellOutcome, m_a: &MomentVector, m_b: &MomentVector) -> f64 {
        let a = m_a.extended();
        let b = m_b.extended();
        let tk = self.operator(k);
        let mut v = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                v += a[i] * tk[i][j] * b[j];
            }
        }
        v
    }

    pub fn outcome_values(&self, m_a: &MomentVector, m_b: &MomentVector) -> [f64; 4] {
        BellOutcome::ALL.map(|k| self.outcome_value(k, m_a, m_b))
    }

    /// Contracts each operator with a box moment matrix.
    pub fn apply(&self, b: &JointBox) -> BellProbabilities {
        let mm = b.moment_matrix();
        BellProbabilities(BellOutcome::ALL.map(|k| {
            let tk = self.operator(k);
            let mut v = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    v += tk[i][j] * mm[i][j];
                }
            }
            v
        }))
    }
}

pub fn outcome_value(
    ops: &OperatorSet,
    k: BellOutcome,
    m_a: &MomentVector,
    m_b: &MomentVector,
) -> f64 {
    ops.outcome_value(k, m_a, m_b)
}

/// Closed-form solution of the three parity relations plus normalization.
pub fn bell_probs(b: &JointBox) -> BellProbabilities {
    let cxx = b.parity_even(Setting::X);
    let cyy = b.parity_even(Setting::Y);
    let czz = b.parity_even(Setting::Z);
    BellProbabilities([
        (cxx - cyy + czz) / 2.0,
        (-cxx + cyy + czz) / 2.0,
        (cxx + cyy - czz) / 2.0,
        1.0 - (cxx + cyy + czz) / 2.0,
    ])
}

pub fn noisy_bell_probs(b: &JointBox, lambda: f64) -> Result<BellProbabilities> {
    MeasurementFamily::noisy(lambda)?;
    Ok(BellProbabilities(
        bell_probs(b).0.map(|p| (1.0 - lambda) * p + lambda / 4.0),
    ))
}

/// Joint-outcome probabilities of `family` on an arbitrary box.
pub fn family_probs(b: &JointBox, family: &MeasurementFamily) -> BellProbabilities {
    match *family {
        MeasurementFamily::IdealBell => bell_probs(b),
        MeasurementFamily::NoisyBell { lambda } => {
            BellProbabilities(bell_probs(b).0.map(|p| (1.0 - lambda) * p + lambda / 4.0))
        }
        MeasurementFamily::NonMax { .. } => operator_set(family).apply(b),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositivityReport {
    pub values: [f64; 4],
    pub min: f64,
    pub pass: bool,
}

pub fn positivity_report(
    family: &MeasurementFamily,
    m_a: &MomentVector,
    m_b: &MomentVector,
    tol: f64,
) -> PositivityReport {
    let values = operator_set(family).outcome_values(m_a, m_b);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    PositivityReport {
        values,
        min,
        pass: min >= -tol,
    }
}

/// `p(4|Bell)` of the product of `p` with itself:
/// `p_X + p_Y + p_Z - p_X^2 - p_Y^2 - p_Z^2 - 1/2`.
pub fn p4_product(p: &LocalState) -> f64 {
    let [x, y, z] = p.probabilities();
    x + y + z - x * x - y * y - z * z - 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{product_box, LocalState};

    fn box_with_parities(cxx: f64, cyy: f64, czz: f64) -> JointBox {
        let mut b = JointBox::uniform();
        for (w, c) in [(Setting::X, cxx), (Setting::Y, cyy), (Setting::Z, czz)] {
            *b.block_mut(w, w) = [c / 2.0, (1.0 - c) / 2.0, (1.0 - c) / 2.0, c / 2.0];
        }
        b
    }

    #[test]
    fn uniform_box_gives_uniform_outcomes() {
        assert_eq!(bell_probs(&JointBox::uniform()).0, [0.25; 4]);
    }

    #[test]
    fn all_even_parities_are_excluded() {
        let p = bell_probs(&box_with_parities(1.0, 1.0, 1.0));
        assert_eq!(p.0, [0.5, 0.5, 0.5, -0.5]);
    }

    #[test]
    fn singlet_and_phi_plus_statistics() {
        assert_eq!(
            bell_probs(&box_with_parities(0.0, 0.0, 0.0)).0,
            [0.0, 0.0, 0.0, 1.0]
        );
        assert_eq!(
            bell_probs(&box_with_parities(1.0, 0.0, 1.0)).0,
            [1.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn parity_relations_hold() {
        let b = box_with_parities(0.3, 0.8, 0.55);
        let p = bell_probs(&b).0;
        assert!((p[0] + p[2] - 0.3).abs() < 1e-15);
        assert!((p[1] + p[2] - 0.8).abs() < 1e-15);
        assert!((p[0] + p[1] - 0.55).abs() < 1e-15);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn noisy_limits() {
        let b = box_with_parities(1.0, 1.0, 1.0);
        assert_eq!(noisy_bell_probs(&b, 0.0).unwrap(), bell_probs(&b));
        let near_one = noisy_bell_probs(&b, 1.0 - 1e-12).unwrap();
        assert!(near_one.0.iter().all(|p| (p - 0.25).abs() < 1e-11));
        // all-even corner sits exactly on the boundary at lambda = 2/3
        let p = noisy_bell_probs(&b, 2.0 / 3.0).unwrap();
        assert!(p.get(BellOutcome::PsiMinus).abs() < 1e-15);
        assert!(noisy_bell_probs(&b, 1.0).is_err());
        assert!(noisy_bell_probs(&b, -0.1).is_err());
    }

    #[test]
    fn ideal_psi_minus_operator() {
        let ops = operator_set(&MeasurementFamily::IdealBell);
        let t4 = ops.operator(BellOutcome::PsiMinus);
        for i in 0..4 {
            for j in 0..4 {
                let want = match (i, j) {
                    (3, 3) => 0.25,
                    (i, j) if i == j => -0.25,
                    _ => 0.0,
                };
                assert_eq!(t4[i][j], want);
            }
        }
    }

    #[test]
    fn product_basis_has_no_xy_coupling() {
        let ops = operator_set(&MeasurementFamily::nonmax(FRAC_PI_4).unwrap());
        for tk in &ops.t {
            assert!(tk[0][0].abs() < 1e-15 && tk[1][1].abs() < 1e-15);
        }
    }

    #[test]
    fn operator_sets_are_normalized() {
        for family in [
            MeasurementFamily::IdealBell,
            MeasurementFamily::noisy(0.37).unwrap(),
            MeasurementFamily::nonmax(0.3).unwrap(),
            MeasurementFamily::nonmax(FRAC_PI_4).unwrap(),
        ] {
            let s = operator_set(&family).sum();
            for i in 0..4 {
                for j in 0..4 {
                    let want = if (i, j) == (3, 3) { 1.0 } else { 0.0 };
                    assert!((s[i][j] - want).abs() < 1e-15, "{family:?} [{i}][{j}]");
                }
            }
        }
    }

    #[test]
    fn outcome_values_on_examples() {
        let ops = operator_set(&MeasurementFamily::IdealBell);
        let z = MomentVector::zero();
        assert_eq!(ops.outcome_value(BellOutcome::PsiMinus, &z, &z), 0.25);
        let d = 1.0 / 3f64.sqrt();
        let s = MomentVector::unchecked([d, d, d]);
        assert!(ops.outcome_value(BellOutcome::PsiMinus, &s, &s).abs() < 1e-15);
        let corner = MomentVector::unchecked([1.0, 1.0, 1.0]);
        assert_eq!(
            ops.outcome_value(BellOutcome::PsiMinus, &corner, &corner),
            -0.5
        );
    }

    #[test]
    fn positivity_report_examples() {
        let z = MomentVector::zero();
        let r = positivity_report(&MeasurementFamily::IdealBell, &z, &z, 1e-9);
        assert!(r.pass);
        assert_eq!(r.min, 0.25);

        let a = MomentVector::unchecked([1.0, 0.0, 0.0]);
        let b = MomentVector::unchecked([-1.0, 0.0, 0.0]);
        let r = positivity_report(&MeasurementFamily::IdealBell, &a, &b, 1e-9);
        assert_eq!(r.values, [0.0, 0.5, 0.0, 0.5]);
        assert!(r.pass);

        let corner = MomentVector::unchecked([1.0, 1.0, 1.0]);
        let fam = MeasurementFamily::nonmax(std::f64::consts::PI / 8.0).unwrap();
        let r = positivity_report(&fam, &corner, &corner, 1e-9);
        assert!(!r.pass);
    }

    #[test]
    fn p4_product_examples() {
        assert_eq!(p4_product(&LocalState::maximally_mixed()), 0.25);
        assert_eq!(p4_product(&LocalState::new(1.0, 1.0, 1.0).unwrap()), -0.5);
        assert_eq!(p4_product(&LocalState::new(1.0, 0.5, 0.5).unwrap()), 0.0);
    }

    #[test]
    fn family_range_checks() {
        assert!(MeasurementFamily::noisy(1.0).is_err());
        assert!(MeasurementFamily::nonmax(-0.01).is_err());
        assert!(MeasurementFamily::nonmax(FRAC_PI_4 + 1e-9).is_err());
        let rho = MeasurementFamily::noisy(0.5)
            .unwrap()
            .ball_radius()
            .unwrap();
        assert!((rho - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(MeasurementFamily::nonmax(0.1).unwrap().ball_radius(), None);
    }

    #[test]
    fn product_box_agrees_with_operators() {
        let a = LocalState::new(0.9, 0.2, 0.4).unwrap();
        let b = LocalState::new(0.3, 0.6, 0.95).unwrap();
        let bx = product_box(&a, &b);
        let ops = operator_set(&MeasurementFamily::IdealBell);
        let via_ops = ops.outcome_values(&a.moments(), &b.moments());
        assert!(bell_probs(&bx).max_abs_diff(&BellProbabilities(via_ops)) < 1e-15);
    }
}
