//! Nested membership levels of the amended theory.
//!
//! 1. no-signaling box;
//! 2. plus non-negative joint-measurement outcomes;
//! 3. plus every local and steered state inside the family's ball.

use std::fmt;

use serde::Serialize;

use crate::bell::{family_probs, BellOutcome, BellProbabilities, MeasurementFamily};
use crate::error::{Error, Result};
use crate::model::{
    validate_joint_box, Constraint, JointBox, MomentVector, Party, Setting, Sign, Violation,
};

/// Outcomes rarer than this impose no steering constraint.
pub const STEERING_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum MembershipLevel {
    NoSignaling = 1,
    BellPositive = 2,
    LocallyQuantum = 3,
}

impl MembershipLevel {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(MembershipLevel::NoSignaling),
            2 => Ok(MembershipLevel::BellPositive),
            3 => Ok(MembershipLevel::LocallyQuantum),
            _ => Err(Error::Unsupported(format!("membership level {n}"))),
        }
    }

    pub fn number(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for MembershipLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "level {}", self.number())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub level: MembershipLevel,
    pub passed: bool,
    pub bell_probabilities: BellProbabilities,
    pub violations: Vec<Violation>,
}

/// Conditional state of `party` given the other side measured `setting` and
/// saw `outcome`. `None` when that outcome has probability below
/// [`STEERING_EPS`].
pub fn steered_moments(
    b: &JointBox,
    party: Party,
    setting: Setting,
    outcome: Sign,
) -> Option<MomentVector> {
    let p_plus = match party {
        Party::A => b.marginal_b(Setting::X, setting),
        Party::B => b.marginal_a(setting, Setting::X),
    };
    let p_cond = match outcome {
        Sign::Plus => p_plus,
        Sign::Minus => 1.0 - p_plus,
    };
    if p_cond <= STEERING_EPS {
        return None;
    }
    let m = Setting::ALL.map(|x| {
        let (plus, minus) = match party {
            Party::A => (
                b.prob(Sign::Plus, outcome, x, setting),
                b.prob(Sign::Minus, outcome, x, setting),
            ),
            Party::B => (
                b.prob(outcome, Sign::Plus, setting, x),
                b.prob(outcome, Sign::Minus, setting, x),
            ),
        };
        (plus - minus) / p_cond
    });
    Some(MomentVector::unchecked(m))
}

fn ball_excess(m: &MomentVector, radius: f64, tol: f64) -> Option<f64> {
    let norm_sq = m.norm_sq();
    let clip = m
        .components()
        .iter()
        .map(|v| v.abs() - 1.0)
        .fold(f64::NEG_INFINITY, f64::max);
    if norm_sq > radius * radius + tol || clip > tol {
        Some((norm_sq.sqrt() - radius).max(clip))
    } else {
        None
    }
}

/// Local-quantumness violations against a ball of `radius`.
pub fn steering_violations(b: &JointBox, radius: f64, tol: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    for (party, m) in [
        (Party::A, b.local_moments_a()),
        (Party::B, b.local_moments_b()),
    ] {
        if let Some(excess) = ball_excess(&m, radius, tol) {
            out.push(Violation {
                constraint: Constraint::LocalBall { party },
                magnitude: excess,
            });
        }
    }
    for party in [Party::A, Party::B] {
        for setting in Setting::ALL {
            for outcome in Sign::BOTH {
                if let Some(m) = steered_moments(b, party, setting, outcome) {
                    if let Some(excess) = ball_excess(&m, radius, tol) {
                        out.push(Violation {
                            constraint: Constraint::SteeredBall {
                                party,
                                setting,
                                outcome,
                            },
                            magnitude: excess,
                        });
                    }
                }
            }
        }
    }
    out
}

pub fn membership(
    b: &JointBox,
    level: MembershipLevel,
    family: &MeasurementFamily,
    tol: f64,
) -> Result<MembershipReport> {
    let radius = if level == MembershipLevel::LocallyQuantum {
        Some(family.ball_radius().ok_or_else(|| {
            Error::Unsupported(format!(
                "level 3 needs a ball-shaped local state space; {family:?} has none"
            ))
        })?)
    } else {
        None
    };

    let mut violations = validate_joint_box(b, tol).violations;
    let probs = family_probs(b, family);
    if level >= MembershipLevel::BellPositive {
        for k in BellOutcome::ALL {
            let p = probs.get(k);
            if p < -tol {
                violations.push(Violation {
                    constraint: Constraint::BellPositivity { outcome: k },
                    magnitude: -p,
                });
            }
        }
    }
    if let Some(r) = radius {
        violations.extend(steering_violations(b, r, tol));
    }
    Ok(MembershipReport {
        level,
        passed: violations.is_empty(),
        bell_probabilities: probs,
        violations,
    })
}
