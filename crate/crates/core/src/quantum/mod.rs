//! Two-qubit Born-rule reference used to cross-check the box model.
//!
//! Pauli eigenprojectors are `P^{W,+-} = (I +- sigma_W) / 2`, so
//! `P^{Z,+} = |0><0|` and the X, Y eigenvectors carry the usual phases.

mod jacobi;
mod matrix;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub use jacobi::{hermitian_eigen, HermitianEigen, JACOBI_TOL};
pub use matrix::{Mat2, Mat4, C};

use crate::bell::{BellOutcome, BellProbabilities};
use crate::correlations::ChshSpec;
use crate::error::{Error, Result};
use crate::model::{JointBox, Setting, Sign};
use matrix::{identity2, I, ONE, ZERO};

pub fn pauli(w: Setting) -> Mat2 {
    match w {
        Setting::X => [[ZERO, ONE], [ONE, ZERO]],
        Setting::Y => [[ZERO, -I], [I, ZERO]],
        Setting::Z => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

pub fn pauli_projector(w: Setting, outcome: Sign) -> Mat2 {
    let s = pauli(w);
    let id = identity2();
    let sign = C::new(outcome.value(), 0.0);
    let half = C::new(0.5, 0.0);
    let mut p = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            p[i][j] = half * (id[i][j] + sign * s[i][j]);
        }
    }
    p
}

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Mat4);

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positive semidefiniteness.
    pub fn new(m: Mat4) -> Result<Self> {
        let herm = m.hermiticity_defect();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (defect {herm:.3e})"
            )));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let min_eig = hermitian_eigen(&m).values[3];
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(DensityMatrix(m))
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Mat4::identity().scale(C::new(0.25, 0.0)))
    }

    pub fn pure(v: &[C; 4]) -> Result<Self> {
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidDensityMatrix("zero vector".into()));
        }
        let u = v.map(|z| z / norm);
        Ok(DensityMatrix(Mat4::outer(&u)))
    }

    pub fn product(a: &Mat2, b: &Mat2) -> Result<Self> {
        DensityMatrix::new(Mat4::kron(a, b))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// Born-rule probability `tr(rho E)`.
    pub fn prob(&self, effect: &Mat4) -> f64 {
        (self.0 * *effect).trace().re
    }
}

/// Single-qubit state `(I + m . sigma) / 2`.
pub fn qubit_state(m: [f64; 3]) -> Mat2 {
    let half = C::new(0.5, 0.0);
    let id = identity2();
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut v = id[i][j];
            for (w, mw) in Setting::ALL.iter().zip(m) {
                v += C::new(mw, 0.0) * pauli(*w)[i][j];
            }
            out[i][j] = half * v;
        }
    }
    out
}

/// Orthonormal basis `a|00> + b|11>`, `b|00> - a|11>`, `a|01> + b|10>`,
/// `b|01> - a|10>` in outcome order `phi+, phi-, psi+, psi-`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellBasis {
    pub a: f64,
    pub b: f64,
    vectors: [[C; 4]; 4],
}

impl BellBasis {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let defect = (a * a + b * b - 1.0).abs();
        if defect.is_nan() || defect > 1e-12 {
            return Err(Error::Unsupported(format!(
                "basis coefficients must satisfy a^2 + b^2 = 1, got ({a}, {b})"
            )));
        }
        let (ca, cb) = (C::new(a, 0.0), C::new(b, 0.0));
        let vectors = [
            [ca, ZERO, ZERO, cb],
            [cb, ZERO, ZERO, -ca],
            [ZERO, ca, cb, ZERO],
            [ZERO, cb, -ca, ZERO],
        ];
        Ok(BellBasis { a, b, vectors })
    }

    pub fn standard() -> Self {
        Self::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2).expect("normalized")
    }

    /// `a = sin(pi/4 + alpha)`, `b = cos(pi/4 + alpha)`.
    pub fn nonmax(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && (0.0..=FRAC_PI_4).contains(&alpha)) {
            return Err(Error::AngleOutOfRange(alpha));
        }
        Self::new((FRAC_PI_4 + alpha).sin(), (FRAC_PI_4 + alpha).cos())
    }

    pub fn vector(&self, k: BellOutcome) -> &[C; 4] {
        &self.vectors[k.index()]
    }

    pub fn projector(&self, k: BellOutcome) -> Mat4 {
        Mat4::outer(self.vector(k))
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let ip: C = self.vectors[i]
                    .iter()
                    .zip(&self.vectors[j])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let want = if i == j { ONE } else { ZERO };
                worst = worst.max((ip - want).norm());
            }
        }
        worst
    }
}

pub fn box_from_state(rho: &DensityMatrix) -> JointBox {
    let mut b = JointBox::uniform();
    for x_a in Setting::ALL {
        for x_b in Setting::ALL {
            let blk = b.block_mut(x_a, x_b);
            for (slot, (a, bo)) in [
                (Sign::Plus, Sign::Plus),
                (Sign::Plus, Sign::Minus),
                (Sign::Minus, Sign::Plus),
                (Sign::Minus, Sign::Minus),
            ]
            .into_iter()
            .enumerate()
            {
                let effect = Mat4::kron(&pauli_projector(x_a, a), &pauli_projector(x_b, bo));
                blk[slot] = rho.prob(&effect);
            }
        }
    }
    b
}

pub fn bell_probs_quantum(rho: &DensityMatrix, basis: &BellBasis) -> BellProbabilities {
    BellProbabilities(BellOutcome::ALL.map(|k| rho.0.expectation(basis.vector(k)).re))
}

/// Even-parity projector `P^{W,+} (x) P^{W,+} + P^{W,-} (x) P^{W,-}`.
pub fn parity_even_projector(w: Setting) -> Mat4 {
    Mat4::kron(
        &pauli_projector(w, Sign::Plus),
        &pauli_projector(w, Sign::Plus),
    ) + Mat4::kron(
        &pauli_projector(w, Sign::Minus),
        &pauli_projector(w, Sign::Minus),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ProjectorIdentityReport {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ProjectorIdentityReport {
    pub fn max(&self) -> f64 {
        self.x.max(self.y).max(self.z)
    }
}

/// Max entrywise deviation of
/// `phi+ + psi+ = XX-even`, `phi- + psi+ = YY-even`, `phi+ + phi- = ZZ-even`.
pub fn projector_identity_check() -> ProjectorIdentityReport {
    let basis = BellBasis::standard();
    let p = |k| basis.projector(k);
    use BellOutcome::*;
    ProjectorIdentityReport {
        x: (p(PhiPlus) + p(PsiPlus)).max_abs_diff(&parity_even_projector(Setting::X)),
        y: (p(PhiMinus) + p(PsiPlus)).max_abs_diff(&parity_even_projector(Setting::Y)),
        z: (p(PhiPlus) + p(PhiMinus)).max_abs_diff(&parity_even_projector(Setting::Z)),
    }
}

/// `A1 B1 + A1 B2 + A2 B1 - A2 B2` with Pauli observables.
pub fn chsh_operator(spec: &ChshSpec) -> Mat4 {
    let k = |a, b| Mat4::kron(&pauli(a), &pauli(b));
    k(spec.a1, spec.b1) + k(spec.a1, spec.b2) + k(spec.a2, spec.b1) - k(spec.a2, spec.b2)
}

#[derive(Debug, Clone, Copy)]
pub struct ChshOptimum {
    pub value: f64,
    pub state: DensityMatrix,
}

/// Top eigenvalue of the CHSH operator and the projector onto its eigenvector.
pub fn chsh_operator_max(spec: &ChshSpec) -> Result<ChshOptimum> {
    spec.check()?;
    let eig = hermitian_eigen(&chsh_operator(spec));
    Ok(ChshOptimum {
        value: eig.values[0],
        state: DensityMatrix::pure(&eig.vector(0))?,
    })
}

/// `rho = G G^dagger / tr(G G^dagger)` with `G` a 4 x rank complex Gaussian.
pub fn random_state(seed: u64, rank: usize) -> Result<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_state_with(&mut rng, rank)
}

pub fn random_state_with<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> Result<DensityMatrix> {
    if !(1..=4).contains(&rank) {
        return Err(Error::Unsupported(format!(
            "rank must be 1..=4, got {rank}"
        )));
    }
    let mut g = Mat4::zero();
    for i in 0..4 {
        for j in 0..rank {
            g.0[i][j] = C::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
    }
    let ggd = g * g.adjoint();
    let tr = ggd.trace().re;
    let mut rho = ggd.scale(C::new(1.0 / tr, 0.0));
    // exact Hermitian symmetry after rounding
    rho = (rho + rho.adjoint()).scale(C::new(0.5, 0.0));
    DensityMatrix::new(rho)
}
