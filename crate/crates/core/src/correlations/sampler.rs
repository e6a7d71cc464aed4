//! Hit-and-run walk over the Level-3 set.
//!
//! Chords are cut exactly against the Level-2 polytope by a ratio test; the
//! point on the chord is then drawn by shrinkage toward the current point
//! until it passes the steering test. The Level-3 set is convex (each steered
//! state condition is a second-order cone in the box entries), so the
//! accepted segment always contains the current point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bell::MeasurementFamily;
use crate::correlations::lp::LpProblem;
use crate::correlations::membership::{steering_violations, MembershipLevel};
use crate::error::{Error, Result};
use crate::model::{CompactState, JointBox, COMPACT_LEN};

pub const LOW_ACCEPTANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub warmup: usize,
    pub thinning: usize,
    /// Shrinkage attempts per step before the walker stays put.
    pub max_shrink: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            warmup: 1000,
            thinning: 10,
            max_shrink: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SampleRun {
    pub boxes: Vec<JointBox>,
    pub proposals: u64,
    pub accepted: u64,
}

impl SampleRun {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }

    pub fn low_acceptance(&self) -> bool {
        self.acceptance_rate() < LOW_ACCEPTANCE
    }

    /// Coordinate-wise mean of the emitted boxes.
    pub fn mean_box(&self) -> JointBox {
        let w = 1.0 / self.boxes.len().max(1) as f64;
        let parts: Vec<(f64, JointBox)> = self.boxes.iter().map(|b| (w, *b)).collect();
        JointBox::mixture(&parts)
    }
}

pub struct Level3Walker {
    rows: Vec<(Vec<f64>, f64)>,
    radius: f64,
    x: [f64; COMPACT_LEN],
    rng: ChaCha8Rng,
    config: SamplerConfig,
    proposals: u64,
    accepted: u64,
}

impl Level3Walker {
    pub fn new(family: MeasurementFamily, seed: u64, config: SamplerConfig) -> Result<Self> {
        let radius = family
            .ball_radius()
            .ok_or_else(|| Error::Unsupported(format!("{family:?} has no ball radius")))?;
        let rows = LpProblem::new(MembershipLevel::BellPositive, family)?.constraints();
        Ok(Level3Walker {
            rows,
            radius,
            x: CompactState::read_off(&JointBox::uniform()).to_array(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            config,
            proposals: 0,
            accepted: 0,
        })
    }

    pub fn current(&self) -> JointBox {
        CompactState::from_array(self.x).expand()
    }

    fn chord(&self, d: &[f64; COMPACT_LEN]) -> (f64, f64) {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (g, h) in &self.rows {
            let gd: f64 = g.iter().zip(d).map(|(a, b)| a * b).sum();
            let gx: f64 = g.iter().zip(&self.x).map(|(a, b)| a * b).sum();
            let slack = (h - gx).max(0.0);
            if gd > 1e-15 {
                hi = hi.min(slack / gd);
            } else if gd < -1e-15 {
                lo = lo.max(slack / gd);
            }
        }
        (lo, hi)
    }

    fn is_level3(&self, x: &[f64; COMPACT_LEN]) -> bool {
        let b = CompactState::from_array(*x).expand();
        steering_violations(&b, self.radius, 0.0).is_empty()
    }

    /// One hit-and-run step. Returns whether the walker moved.
    pub fn step(&mut self) -> bool {
        let mut d = [0.0; COMPACT_LEN];
        for v in d.iter_mut() {
            *v = self.rng.sample(StandardNormal);
        }
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return false;
        }
        for v in d.iter_mut() {
            *v /= norm;
        }
        let (mut lo, mut hi) = self.chord(&d);
        if !(lo.is_finite() && hi.is_finite()) {
            return false;
        }
        for _ in 0..self.config.max_shrink {
            let t = self.rng.random_range(lo..=hi);
            let mut y = self.x;
            for (yi, di) in y.iter_mut().zip(&d) {
                *yi += t * di;
            }
            self.proposals += 1;
            if self.is_level3(&y) {
                self.accepted += 1;
                self.x = y;
                return true;
            }
            if t < 0.0 {
                lo = t;
            } else {
                hi = t;
            }
        }
        false
    }

    pub fn run(mut self, trials: usize) -> SampleRun {
        for _ in 0..self.config.warmup {
            self.step();
        }
        self.proposals = 0;
        self.accepted = 0;
        let mut boxes = Vec::with_capacity(trials);
        for _ in 0..trials {
            for _ in 0..self.config.thinning.max(1) {
                self.step();
            }
            boxes.push(self.current());
        }
        SampleRun {
            boxes,
            proposals: self.proposals,
            accepted: self.accepted,
        }
    }
}

pub fn sample_level3(family: MeasurementFamily, trials: usize, seed: u64) -> Result<SampleRun> {
    Ok(Level3Walker::new(family, seed, SamplerConfig::default())?.run(trials))
}

/// Splits `trials` over `workers` independent walkers seeded `seed + w`.
/// Output is ordered by worker, then step.
pub fn sample_level3_workers(
    family: MeasurementFamily,
    trials: usize,
    seed: u64,
    workers: usize,
) -> Result<SampleRun> {
    let workers = workers.max(1);
    let runs = (0..workers)
        .into_par_iter()
        .map(|w| {
            let share = trials / workers + usize::from(w < trials % workers);
            Ok(Level3Walker::new(family, seed + w as u64, SamplerConfig::default())?.run(share))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = SampleRun {
        boxes: Vec::with_capacity(trials),
        proposals: 0,
        accepted: 0,
    };
    for r in runs {
        out.boxes.extend(r.boxes);
        out.proposals += r.proposals;
        out.accepted += r.accepted;
    }
    Ok(out)
}
