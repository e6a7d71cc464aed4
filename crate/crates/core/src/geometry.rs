//! Local state-space geometry.
//!
//! For the ideal and noisy Bell measurements the local state space is a ball
//! of radius `rho` in canonical moments, intersected with the cube
//! `[-1, 1]^3`. For the non-maximally entangled family it is bounded from the
//! inside by cuboids with vertices `(+-l, +-l, +-h)`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{operator_set, p4_product, BellOutcome, MeasurementFamily};
use crate::error::{Error, Result};
use crate::model::{LocalState, MomentVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallSpec {
    pub radius: f64,
    pub clipped: bool,
}

impl BallSpec {
    pub fn unit() -> Self {
        BallSpec {
            radius: 1.0,
            clipped: true,
        }
    }

    pub fn for_noise(lambda: f64) -> Result<Self> {
        let family = MeasurementFamily::noisy(lambda)?;
        Self::for_family(&family)
    }

    pub fn for_family(family: &MeasurementFamily) -> Result<Self> {
        family
            .ball_radius()
            .map(|radius| BallSpec {
                radius,
                clipped: true,
            })
            .ok_or_else(|| {
                Error::Unsupported(format!("{family:?} has no ball-shaped local state space"))
            })
    }
}

pub fn ball_contains(spec: &BallSpec, m: &MomentVector, tol: f64) -> bool {
    let inside = m.norm_sq() <= spec.radius * spec.radius + tol;
    if spec.clipped {
        inside && m.components().iter().all(|v| v.abs() <= 1.0 + tol)
    } else {
        inside
    }
}

/// Inner cuboid with vertices `(+-l, +-l, +-h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CuboidSpec {
    pub l: f64,
    pub h: f64,
}

impl CuboidSpec {
    pub fn new(l: f64, h: f64) -> Result<Self> {
        for (name, v) in [("l", l), ("h", h)] {
            if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                return Err(Error::MomentOutOfRange { name, value: v });
            }
        }
        Ok(CuboidSpec { l, h })
    }

    pub fn vertices(&self) -> [MomentVector; 8] {
        let mut out = [MomentVector::zero(); 8];
        let mut n = 0;
        for sx in [1.0, -1.0] {
            for sy in [1.0, -1.0] {
                for sz in [1.0, -1.0] {
                    out[n] = MomentVector::unchecked([sx * self.l, sy * self.l, sz * self.h]);
                    n += 1;
                }
            }
        }
        out
    }
}

/// Every ordered vertex pair must give non-negative outcome values; outcome
/// values are bilinear, so this covers the whole cuboid on both sides.
pub fn cuboid_feasible(family: &MeasurementFamily, spec: &CuboidSpec, tol: f64) -> bool {
    let ops = operator_set(family);
    let verts = spec.vertices();
    verts.iter().all(|va| {
        verts.iter().all(|vb| {
            BellOutcome::ALL
                .iter()
                .all(|&k| ops.outcome_value(k, va, vb) >= -tol)
        })
    })
}

/// Lattice `i / (n - 1)`, `i = 0..n`, on `[0, 1]`.
pub fn unit_lattice(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidGrid(n));
    }
    let d = (n - 1) as f64;
    Ok((0..n).map(|i| i as f64 / d).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub coords: Vec<f64>,
}

/// Boolean samples on a rectangular grid. Values are stored in lexicographic
/// index order, first axis slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityRegion {
    pub axes: Vec<Axis>,
    pub params: Vec<(String, String)>,
    pub values: Vec<bool>,
}

impl FeasibilityRegion {
    fn from_fn<F>(axes: Vec<Axis>, params: Vec<(String, String)>, f: F) -> Self
    where
        F: Fn(&[f64]) -> bool + Sync,
    {
        let dims: Vec<usize> = axes.iter().map(|a| a.coords.len()).collect();
        let total: usize = dims.iter().product();
        let values = (0..total)
            .into_par_iter()
            .map(|flat| {
                let point = point_at(&axes, &dims, flat);
                f(&point)
            })
            .collect();
        FeasibilityRegion {
            axes,
            params,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn feasible_count(&self) -> usize {
        self.values.iter().filter(|v| **v).count()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.coords.len()).collect()
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        point_at(&self.axes, &self.dims(), flat)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<f64>, bool)> + '_ {
        let dims = self.dims();
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (point_at(&self.axes, &dims, i), v))
    }

    /// Grid points feasible in `inner` but not in `self`. Both regions must
    /// share the same axes.
    pub fn missing_from(&self, inner: &FeasibilityRegion) -> Result<Vec<Vec<f64>>> {
        if self.axes != inner.axes {
            return Err(Error::RegionFormat("regions use different grids".into()));
        }
        Ok(inner
            .values
            .iter()
            .zip(&self.values)
            .enumerate()
            .filter(|(_, (&i, &o))| i && !o)
            .map(|(flat, _)| self.point(flat))
            .collect())
    }

    pub fn to_csv(&self) -> String {
        let names: Vec<&str> = self.axes.iter().map(|a| a.name.as_str()).collect();
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        let mut out = format!(
            "# axes: {}; params: {}\n",
            names.join(","),
            params.join(",")
        );
        for (point, v) in self.iter() {
            for c in &point {
                write!(out, "{c},").unwrap();
            }
            out.push_str(if v { "1\n" } else { "0\n" });
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::RegionFormat("empty file".into()))?;
        let rest = header
            .strip_prefix("# axes: ")
            .ok_or_else(|| Error::RegionFormat(format!("bad header: {header}")))?;
        let (names, params) = rest
            .split_once("; params: ")
            .ok_or_else(|| Error::RegionFormat(format!("bad header: {header}")))?;
        let names: Vec<String> = names.split(',').map(str::to_owned).collect();
        let params = params
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|kv| {
                kv.split_once('=')
                    .map(|(k, v)| (k.to_owned(), v.to_owned()))
                    .ok_or_else(|| Error::RegionFormat(format!("bad param: {kv}")))
            })
            .collect::<Result<Vec<_>>>()?;

        let d = names.len();
        let mut points: Vec<Vec<f64>> = Vec::new();
        let mut values = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != d + 1 {
                return Err(Error::RegionFormat(format!("bad row: {line}")));
            }
            let coords = fields[..d]
                .iter()
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::RegionFormat(format!("{e}: {line}")))?;
            let v = match fields[d] {
                "0" => false,
                "1" => true,
                other => return Err(Error::RegionFormat(format!("bad flag {other}"))),
            };
            points.push(coords);
            values.push(v);
        }

        // Recover each axis from the distinct coordinates in row order.
        let mut axes = Vec::with_capacity(d);
        for (k, name) in names.into_iter().enumerate() {
            let mut coords: Vec<f64> = Vec::new();
            for p in &points {
                if !coords.contains(&p[k]) {
                    coords.push(p[k]);
                }
            }
            if coords.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::RegionFormat(format!("axis {name} not increasing")));
            }
            axes.push(Axis { name, coords });
        }
        let region = FeasibilityRegion {
            axes,
            params,
            values,
        };
        if region.dims().iter().product::<usize>() != region.values.len()
            || region.iter().zip(&points).any(|((p, _), q)| &p != q)
        {
            return Err(Error::RegionFormat("rows do not form a full grid".into()));
        }
        Ok(region)
    }
}

fn point_at(axes: &[Axis], dims: &[usize], mut flat: usize) -> Vec<f64> {
    let mut idx = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        idx[k] = flat % dims[k];
        flat /= dims[k];
    }
    idx.iter().zip(axes).map(|(&i, a)| a.coords[i]).collect()
}

fn to_moments(p: &[f64]) -> MomentVector {
    MomentVector::unchecked([2.0 * p[0] - 1.0, 2.0 * p[1] - 1.0, 2.0 * p[2] - 1.0])
}

/// Local state space for the noisy Bell measurement on a `grid_n^3` lattice
/// over `(p_X, p_Y, p_Z)`.
pub fn scan_local_region(lambda: f64, grid_n: usize, tol: f64) -> Result<FeasibilityRegion> {
    let spec = BallSpec::for_noise(lambda)?;
    let g = unit_lattice(grid_n)?;
    let axes = ["p_x", "p_y", "p_z"]
        .iter()
        .map(|n| Axis {
            name: (*n).to_owned(),
            coords: g.clone(),
        })
        .collect();
    let params = vec![
        ("lambda".to_owned(), lambda.to_string()),
        ("rho".to_owned(), spec.radius.to_string()),
        ("grid".to_owned(), grid_n.to_string()),
    ];
    Ok(FeasibilityRegion::from_fn(axes, params, |p| {
        ball_contains(&spec, &to_moments(p), tol)
    }))
}

/// Two-dimensional slice of [`scan_local_region`] at fixed `p_Z = p_z`.
pub fn scan_local_slice(
    lambda: f64,
    grid_n: usize,
    p_z: f64,
    tol: f64,
) -> Result<FeasibilityRegion> {
    let spec = BallSpec::for_noise(lambda)?;
    if !(p_z.is_finite() && (0.0..=1.0).contains(&p_z)) {
        return Err(Error::ProbabilityOutOfRange {
            name: "p_z",
            value: p_z,
        });
    }
    let g = unit_lattice(grid_n)?;
    let axes = ["p_x", "p_y"]
        .iter()
        .map(|n| Axis {
            name: (*n).to_owned(),
            coords: g.clone(),
        })
        .collect();
    let params = vec![
        ("lambda".to_owned(), lambda.to_string()),
        ("rho".to_owned(), spec.radius.to_string()),
        ("grid".to_owned(), grid_n.to_string()),
        ("p_z".to_owned(), p_z.to_string()),
    ];
    Ok(FeasibilityRegion::from_fn(axes, params, |p| {
        ball_contains(&spec, &to_moments(&[p[0], p[1], p_z]), tol)
    }))
}

/// Allowed cuboid half-widths for the non-maximally entangled family, on a
/// `grid_n^2` lattice. Column order is `h, l`.
pub fn scan_lh_region(alpha: f64, grid_n: usize, tol: f64) -> Result<FeasibilityRegion> {
    let family = MeasurementFamily::nonmax(alpha)?;
    let g = unit_lattice(grid_n)?;
    let axes = vec![
        Axis {
            name: "h".to_owned(),
            coords: g.clone(),
        },
        Axis {
            name: "l".to_owned(),
            coords: g,
        },
    ];
    let params = vec![
        ("alpha".to_owned(), alpha.to_string()),
        ("grid".to_owned(), grid_n.to_string()),
    ];
    Ok(FeasibilityRegion::from_fn(axes, params, |p| {
        cuboid_feasible(&family, &CuboidSpec { l: p[1], h: p[0] }, tol)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallEquivalenceReport {
    pub points: usize,
    /// Points where the sign of `p(4|Bell)` and the ball predicate differ.
    pub disagreements: usize,
    /// Disagreements with `|p4| > tol`, i.e. not explained by the boundary.
    pub disagreements_beyond_tol: usize,
    pub max_abs_p4_at_disagreement: f64,
}

impl BallEquivalenceReport {
    pub fn passed(&self) -> bool {
        self.disagreements_beyond_tol == 0
    }
}

/// Compares `p4_product(p) >= 0` with unit-ball membership of `m = 2p - 1`
/// over a `grid_n^3` lattice on `[0, 1]^3`.
pub fn ball_equivalence_check(grid_n: usize, tol: f64) -> Result<BallEquivalenceReport> {
    let g = unit_lattice(grid_n)?;
    let spec = BallSpec::unit();
    let n = g.len();
    let (disagreements, beyond, max_p4) = (0..n * n * n)
        .into_par_iter()
        .map(|flat| {
            let p = [g[flat / (n * n)], g[(flat / n) % n], g[flat % n]];
            let state = LocalState::new(p[0], p[1], p[2]).expect("lattice inside [0,1]");
            let p4 = p4_product(&state);
            let by_sign = p4 >= 0.0;
            let by_ball = ball_contains(&spec, &state.moments(), tol);
            if by_sign == by_ball {
                (0usize, 0usize, 0.0f64)
            } else {
                (1, usize::from(p4.abs() > tol), p4.abs())
            }
        })
        .reduce(|| (0, 0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2.max(b.2)));
    Ok(BallEquivalenceReport {
        points: n * n * n,
        disagreements,
        disagreements_beyond_tol: beyond,
        max_abs_p4_at_disagreement: max_p4,
    })
}

/// Uniform sample from the (clipped) ball: Gaussian direction, radius scaled
/// by `u^(1/3)`, rejected if it leaves the cube.
pub fn sample_ball<R: Rng + ?Sized>(spec: &BallSpec, rng: &mut R) -> MomentVector {
    loop {
        let d: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        if norm == 0.0 {
            continue;
        }
        let r = spec.radius * rng.random::<f64>().cbrt();
        let m = d.map(|v| v / norm * r);
        if !spec.clipped || m.iter().all(|v| v.abs() <= 1.0) {
            return MomentVector::unchecked(m);
        }
    }
}

/// Minimum outcome value over `trials` independent pairs drawn from the
/// family's ball.
pub fn tightness_check(family: &MeasurementFamily, trials: usize, seed: u64) -> Result<f64> {
    let spec = BallSpec::for_family(family)?;
    let ops = operator_set(family);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min = f64::INFINITY;
    for _ in 0..trials {
        let a = sample_ball(&spec, &mut rng);
        let b = sample_ball(&spec, &mut rng);
        for v in ops.outcome_values(&a, &b) {
            min = min.min(v);
        }
    }
    Ok(min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn mv(x: f64, y: f64, z: f64) -> MomentVector {
        MomentVector::unchecked([x, y, z])
    }

    #[test]
    fn unit_ball_membership() {
        let s = BallSpec::unit();
        assert!(ball_contains(&s, &mv(0.0, 0.0, 0.0), 0.0));
        assert!(ball_contains(&s, &mv(1.0, 0.0, 0.0), 0.0));
        assert!(!ball_contains(&s, &mv(1.0, 1.0, 0.0), 1e-9));
    }

    #[test]
    fn clipping_applies_to_large_radius() {
        let s = BallSpec {
            radius: 2.0,
            clipped: true,
        };
        assert!(!ball_contains(&s, &mv(1.5, 0.0, 0.0), 1e-9));
        let s = BallSpec {
            radius: 2.0,
            clipped: false,
        };
        assert!(ball_contains(&s, &mv(1.5, 0.0, 0.0), 1e-9));
    }

    #[test]
    fn equivalence_small_grid() {
        let r = ball_equivalence_check(21, 1e-9).unwrap();
        assert_eq!(r.points, 21 * 21 * 21);
        assert!(r.passed(), "{r:?}");
        assert!(ball_equivalence_check(1, 1e-9).is_err());
    }

    #[test]
    fn tightness_boundary_pairs() {
        let ops = operator_set(&MeasurementFamily::IdealBell);
        let d = 1.0 / 3f64.sqrt();
        let m = mv(d, -d, d);
        assert!(ops.outcome_value(BellOutcome::PsiMinus, &m, &m).abs() < 1e-15);
        // antipodal along X: outcomes with a + on the XX coupling vanish
        let a = mv(1.0, 0.0, 0.0);
        let b = mv(-1.0, 0.0, 0.0);
        assert_eq!(ops.outcome_value(BellOutcome::PhiPlus, &a, &b), 0.0);
        assert_eq!(ops.outcome_value(BellOutcome::PsiPlus, &a, &b), 0.0);
    }

    #[test]
    fn tightness_small_runs() {
        assert!(tightness_check(&MeasurementFamily::IdealBell, 2000, 3).unwrap() >= -1e-12);
        let noisy = MeasurementFamily::noisy(0.5).unwrap();
        assert!(tightness_check(&noisy, 2000, 4).unwrap() >= -1e-12);
        assert!(tightness_check(&MeasurementFamily::nonmax(0.1).unwrap(), 10, 0).is_err());
    }

    #[test]
    fn local_region_examples() {
        let r = scan_local_region(0.0, 3, 1e-9).unwrap();
        let lookup =
            |r: &FeasibilityRegion, p: [f64; 3]| r.iter().find(|(q, _)| q[..] == p[..]).unwrap().1;
        assert!(lookup(&r, [0.5, 0.5, 0.5]));
        assert!(!lookup(&r, [1.0, 1.0, 1.0]));
        let r = scan_local_region(0.5, 3, 1e-9).unwrap();
        assert!(lookup(&r, [1.0, 1.0, 0.5]));
        assert!(!lookup(&r, [1.0, 1.0, 1.0]));
        let r = scan_local_region(2.0 / 3.0, 5, 1e-9).unwrap();
        assert_eq!(r.feasible_count(), r.len());
        assert!(scan_local_region(1.0, 5, 1e-9).is_err());
    }

    #[test]
    fn slice_matches_full_scan() {
        let full = scan_local_region(0.25, 11, 1e-9).unwrap();
        let slice = scan_local_slice(0.25, 11, 0.3, 1e-9).unwrap();
        for (p, v) in slice.iter() {
            let (_, w) = full
                .iter()
                .find(|(q, _)| q[0] == p[0] && q[1] == p[1] && q[2] == 0.3)
                .unwrap();
            assert_eq!(v, w);
        }
    }

    #[test]
    fn cuboid_examples_at_bell_basis() {
        let f = MeasurementFamily::IdealBell;
        let t = 1.0 / 3f64.sqrt();
        assert!(cuboid_feasible(
            &f,
            &CuboidSpec::new(t - 1e-6, t - 1e-6).unwrap(),
            1e-9
        ));
        assert!(!cuboid_feasible(
            &f,
            &CuboidSpec::new(t + 1e-6, t + 1e-6).unwrap(),
            1e-9
        ));
        assert!(cuboid_feasible(
            &f,
            &CuboidSpec::new(0.0, 1.0).unwrap(),
            1e-9
        ));
        assert!(!cuboid_feasible(
            &f,
            &CuboidSpec::new(1.0, 1.0).unwrap(),
            1e-9
        ));
        let nm0 = MeasurementFamily::nonmax(0.0).unwrap();
        assert!(cuboid_feasible(
            &nm0,
            &CuboidSpec::new(0.7, 0.0).unwrap(),
            1e-9
        ));
        assert!(!cuboid_feasible(
            &nm0,
            &CuboidSpec::new(0.1, 1.0).unwrap(),
            1e-9
        ));
    }

    #[test]
    fn product_basis_is_unrestricted() {
        let r = scan_lh_region(FRAC_PI_4, 21, 1e-9).unwrap();
        assert_eq!(r.feasible_count(), r.len());
    }

    #[test]
    fn cuboid_feasibility_is_monotone_in_size() {
        let r = scan_lh_region(0.3, 31, 1e-9).unwrap();
        let n = 31;
        for i in 0..n {
            for j in 0..n {
                if r.values[i * n + j] {
                    if i > 0 {
                        assert!(r.values[(i - 1) * n + j]);
                    }
                    if j > 0 {
                        assert!(r.values[i * n + j - 1]);
                    }
                }
            }
        }
    }

    #[test]
    fn csv_header_and_rows() {
        let r = scan_lh_region(0.0, 3, 1e-9).unwrap();
        let csv = r.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "# axes: h,l; params: alpha=0,grid=3");
        assert_eq!(lines.next().unwrap(), "0,0,1");
        assert_eq!(lines.next().unwrap(), "0,0.5,1");
        assert_eq!(csv.lines().count(), 10);
        assert_eq!(FeasibilityRegion::from_csv(&csv).unwrap(), r);
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!(FeasibilityRegion::from_csv("").is_err());
        assert!(FeasibilityRegion::from_csv("x,y\n").is_err());
        assert!(FeasibilityRegion::from_csv("# axes: h,l; params: \n0,0,2\n").is_err());
        assert!(FeasibilityRegion::from_csv("# axes: h,l; params: \n0,0,1\n1,1,1\n").is_err());
    }

    #[test]
    fn grid_must_have_two_points() {
        assert!(matches!(unit_lattice(1), Err(Error::InvalidGrid(1))));
        assert_eq!(unit_lattice(101).unwrap()[70], 0.7);
    }
}
