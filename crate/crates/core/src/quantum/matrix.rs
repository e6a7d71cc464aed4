use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

pub type C = Complex64;

pub const ZERO: C = C::new(0.0, 0.0);
pub const ONE: C = C::new(1.0, 0.0);
pub const I: C = C::new(0.0, 1.0);

/// Dense complex 2x2 matrix (single-qubit operator).
pub type Mat2 = [[C; 2]; 2];

pub fn identity2() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

/// Dense complex 4x4 matrix, row-major, on `C^2 (x) C^2` with basis
/// `|00>, |01>, |10>, |11>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4(pub [[C; 4]; 4]);

impl Mat4 {
    pub fn zero() -> Self {
        Mat4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn kron(a: &Mat2, b: &Mat2) -> Self {
        let mut m = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m.0[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                    }
                }
            }
        }
        m
    }

    /// `|v><v|`
    pub fn outer(v: &[C; 4]) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, s: C) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        m
    }

    /// `<v| M |v>`
    pub fn expectation(&self, v: &[C; 4]) -> C {
        let mut acc = ZERO;
        for i in 0..4 {
            for j in 0..4 {
                acc += v[i].conj() * self.0[i][j] * v[j];
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn column(&self, j: usize) -> [C; 4] {
        [self.0[0][j], self.0[1][j], self.0[2][j], self.0[3][j]]
    }
}

impl Index<(usize, usize)> for Mat4 {
    type Output = C;
    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.0[i][j]
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(self, rhs: Mat4) -> Mat4 {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

impl Sub for Mat4 {
    type Output = Mat4;
    fn sub(self, rhs: Mat4) -> Mat4 {
        let mut m = self;
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] -= rhs.0[i][j];
            }
        }
        m
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut m = Mat4::zero();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..4 {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}
