//! Exact linear optimization over the Level-1 and Level-2 polytopes.
//!
//! Variables are the 15 [`CompactState`] coordinates. Every constraint row
//! and objective is read off the affine maps `expand` and
//! [`family_probs`] by evaluating them at the origin and the unit vectors,
//! so rows agree with the reconstruction identities by construction.

use serde::Serialize;

use crate::bell::{family_probs, BellOutcome, MeasurementFamily};
use crate::correlations::chsh::{chsh_value, ChshSpec};
use crate::correlations::membership::MembershipLevel;
use crate::error::{Error, Result};
use crate::model::{CompactState, Entry, JointBox, Setting, COMPACT_LEN};
use crate::simplex::LinearProgram;

/// Coefficients and offset of an affine functional of the compact coordinates.
pub fn affine_form<F>(f: F) -> (Vec<f64>, f64)
where
    F: Fn(&CompactState) -> f64,
{
    let at = |v: [f64; COMPACT_LEN]| f(&CompactState::from_array(v));
    let offset = at([0.0; COMPACT_LEN]);
    let coeffs = (0..COMPACT_LEN)
        .map(|i| {
            let mut e = [0.0; COMPACT_LEN];
            e[i] = 1.0;
            at(e) - offset
        })
        .collect();
    (coeffs, offset)
}

#[derive(Debug, Clone)]
pub struct LpProblem {
    level: MembershipLevel,
    family: MeasurementFamily,
    lp: LinearProgram,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LpOutcome {
    pub value: f64,
    pub witness: CompactState,
}

impl LpProblem {
    pub fn new(level: MembershipLevel, family: MeasurementFamily) -> Result<Self> {
        if level == MembershipLevel::LocallyQuantum {
            return Err(Error::Unsupported(
                "level 3 is not a polytope; use the sampler".into(),
            ));
        }
        let mut lp = LinearProgram::new(COMPACT_LEN);
        for x_a in Setting::ALL {
            for x_b in Setting::ALL {
                for entry in Entry::ALL {
                    let (c, off) = affine_form(|s| s.expand().block(x_a, x_b)[entry.index()]);
                    lp.add_ge(c, -off)?;
                }
            }
        }
        if level == MembershipLevel::BellPositive {
            for k in BellOutcome::ALL {
                let (c, off) = affine_form(|s| family_probs(&s.expand(), &family).get(k));
                lp.add_ge(c, -off)?;
            }
        }
        for i in 0..COMPACT_LEN {
            let mut c = vec![0.0; COMPACT_LEN];
            c[i] = 1.0;
            lp.add_le(c, 1.0)?;
        }
        Ok(LpProblem { level, family, lp })
    }

    pub fn level(&self) -> MembershipLevel {
        self.level
    }

    pub fn family(&self) -> &MeasurementFamily {
        &self.family
    }

    /// Pins all six marginals to `value`.
    pub fn fix_marginals(&mut self, value: f64) -> Result<()> {
        for i in 9..COMPACT_LEN {
            let mut c = vec![0.0; COMPACT_LEN];
            c[i] = 1.0;
            self.lp.add_eq(c, value)?;
        }
        Ok(())
    }

    /// Rows `g . x <= h` of the polytope, bounds included.
    pub fn constraints(&self) -> Vec<(Vec<f64>, f64)> {
        let mut rows: Vec<(Vec<f64>, f64)> = self
            .lp
            .constraints()
            .map(|(g, h)| (g.to_vec(), h))
            .collect();
        for i in 0..COMPACT_LEN {
            let mut c = vec![0.0; COMPACT_LEN];
            c[i] = -1.0;
            rows.push((c, 0.0));
        }
        rows
    }

    /// Maximizes an objective that must be affine in the box entries.
    pub fn maximize<F>(&self, objective: F) -> Result<LpOutcome>
    where
        F: Fn(&JointBox) -> f64,
    {
        let (c, off) = affine_form(|s| objective(&s.expand()));
        let mut lp = self.lp.clone();
        lp.set_objective(c, off)?;
        let sol = lp.maximize()?;
        let mut x = [0.0; COMPACT_LEN];
        x.copy_from_slice(&sol.x);
        let witness = CompactState::from_array(x);
        Ok(LpOutcome {
            value: objective(&witness.expand()),
            witness,
        })
    }
}

/// Maximal CHSH value over the Level-1 or Level-2 set for the ideal family.
pub fn lp_max_chsh(spec: &ChshSpec, level: MembershipLevel) -> Result<LpOutcome> {
    spec.check()?;
    LpProblem::new(level, MeasurementFamily::IdealBell)?.maximize(|b| chsh_value(b, spec))
}
