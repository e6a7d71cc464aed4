//! Cyclic Jacobi eigen-solver for 4x4 Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq = r e^{i phi}` with
//! a diagonal unitary, then applies the real symmetric Jacobi rotation that
//! zeroes the now-real pivot.

use super::matrix::{Mat4, C};

pub const JACOBI_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, Copy)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: [f64; 4],
    /// Unitary whose columns are the matching eigenvectors.
    pub vectors: Mat4,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> [C; 4] {
        self.vectors.column(k)
    }
}

fn off_diagonal_norm(a: &Mat4) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                s += a.0[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn frobenius(a: &Mat4) -> f64 {
    a.0.iter()
        .flatten()
        .map(|v| v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Eigen-decomposition of a Hermitian matrix. Only the Hermitian part of the
/// input is used.
pub fn hermitian_eigen(m: &Mat4) -> HermitianEigen {
    let mut a = (*m + m.adjoint()).scale(C::new(0.5, 0.0));
    let mut v = Mat4::identity();
    let scale = frobenius(&a).max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                let apq = a.0[p][q];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / r;
                let app = a.0[p][p].re;
                let aqq = a.0[q][q].re;
                let theta = 0.5 * (2.0 * r).atan2(aqq - app);
                let (s, c) = theta.sin_cos();

                // rot = diag phase on q, then real rotation in the (p, q) plane
                let mut rot = Mat4::identity();
                rot.0[p][p] = C::new(c, 0.0);
                rot.0[p][q] = C::new(s, 0.0);
                rot.0[q][p] = -phase.conj() * s;
                rot.0[q][q] = phase.conj() * c;

                a = rot.adjoint() * a * rot;
                a.0[p][q] = C::new(0.0, 0.0);
                a.0[q][p] = C::new(0.0, 0.0);
                v = v * rot;
            }
        }
    }

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| a.0[j][j].re.total_cmp(&a.0[i][i].re));
    let mut values = [0.0; 4];
    let mut vectors = Mat4::zero();
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = a.0[src][src].re;
        for i in 0..4 {
            vectors.0[i][dst] = v.0[i][src];
        }
    }
    HermitianEigen { values, vectors }
}
