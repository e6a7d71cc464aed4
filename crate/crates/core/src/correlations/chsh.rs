use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{JointBox, Setting};

/// CHSH setting choice: `E(a1 b1) + E(a1 b2) + E(a2 b1) - E(a2 b2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ChshSpec {
    pub a1: Setting,
    pub a2: Setting,
    pub b1: Setting,
    pub b2: Setting,
}

impl ChshSpec {
    pub fn new(a1: Setting, a2: Setting, b1: Setting, b2: Setting) -> Result<Self> {
        let spec = ChshSpec { a1, a2, b1, b2 };
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<()> {
        if self.a1 == self.a2 || self.b1 == self.b2 {
            Err(Error::DegenerateChsh)
        } else {
            Ok(())
        }
    }

    /// All 36 ordered choices with `a1 != a2` and `b1 != b2`.
    pub fn all() -> Vec<ChshSpec> {
        let pairs: Vec<(Setting, Setting)> = Setting::ALL
            .iter()
            .flat_map(|&s| {
                Setting::ALL
                    .iter()
                    .filter(move |&&t| t != s)
                    .map(move |&t| (s, t))
            })
            .collect();
        pairs
            .iter()
            .flat_map(|&(a1, a2)| {
                pairs
                    .iter()
                    .map(move |&(b1, b2)| ChshSpec { a1, a2, b1, b2 })
            })
            .collect()
    }
}

impl fmt::Display for ChshSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{},{})", self.a1, self.a2, self.b1, self.b2)
    }
}

pub fn chsh_value(b: &JointBox, spec: &ChshSpec) -> f64 {
    b.correlator(spec.a1, spec.b1) + b.correlator(spec.a1, spec.b2) + b.correlator(spec.a2, spec.b1)
        - b.correlator(spec.a2, spec.b2)
}

/// Largest CHSH value of `b` over all 36 setting choices.
pub fn max_chsh(b: &JointBox) -> (f64, ChshSpec) {
    ChshSpec::all()
        .into_iter()
        .map(|s| (chsh_value(b, &s), s))
        .fold((f64::NEG_INFINITY, ChshSpec::all()[0]), |acc, x| {
            if x.0 > acc.0 {
                x
            } else {
                acc
            }
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Setting::*;

    #[test]
    fn thirty_six_specs() {
        let all = ChshSpec::all();
        assert_eq!(all.len(), 36);
        assert!(all.iter().all(|s| s.check().is_ok()));
        assert!(ChshSpec::new(X, X, Y, Z).is_err());
    }

    #[test]
    fn deterministic_correlated_box_reaches_two() {
        let b = JointBox::from_correlators([[1.0; 3]; 3]);
        for s in ChshSpec::all() {
            assert_eq!(chsh_value(&b, &s), 2.0);
        }
    }

    #[test]
    fn pr_type_box_reaches_four() {
        let b = JointBox::from_correlators([[1.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, -1.0]]);
        assert_eq!(chsh_value(&b, &ChshSpec::new(X, Z, X, Z).unwrap()), 4.0);
        assert_eq!(max_chsh(&b).0, 4.0);
    }
}
