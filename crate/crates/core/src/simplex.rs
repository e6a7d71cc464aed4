//! Dense two-phase tableau simplex with Bland's rule.
//!
//! Solves `maximize c.x + c0` subject to `A x <= b`, `x >= 0`. Rows with a
//! negative right-hand side get an artificial variable and are driven
//! feasible in phase one.

use thiserror::Error;

pub const PIVOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("problem is infeasible")]
    Infeasible,
    #[error("problem is unbounded")]
    Unbounded,
    #[error("constraint row has {got} coefficients, expected {expected}")]
    Dimension { expected: usize, got: usize },
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    num_vars: usize,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    objective: Vec<f64>,
    objective_offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            rows: Vec::new(),
            rhs: Vec::new(),
            objective: vec![0.0; num_vars],
            objective_offset: 0.0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn constraints(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.rows
            .iter()
            .map(Vec::as_slice)
            .zip(self.rhs.iter().copied())
    }

    /// Adds `coeffs . x <= rhs`.
    pub fn add_le(&mut self, coeffs: Vec<f64>, rhs: f64) -> Result<(), LpError> {
        if coeffs.len() != self.num_vars {
            return Err(LpError::Dimension {
                expected: self.num_vars,
                got: coeffs.len(),
            });
        }
        self.rows.push(coeffs);
        self.rhs.push(rhs);
        Ok(())
    }

    pub fn add_ge(&mut self, coeffs: Vec<f64>, rhs: f64) -> Result<(), LpError> {
        self.add_le(coeffs.into_iter().map(|c| -c).collect(), -rhs)
    }

    pub fn add_eq(&mut self, coeffs: Vec<f64>, rhs: f64) -> Result<(), LpError> {
        self.add_le(coeffs.clone(), rhs)?;
        self.add_ge(coeffs, rhs)
    }

    pub fn set_objective(&mut self, coeffs: Vec<f64>, offset: f64) -> Result<(), LpError> {
        if coeffs.len() != self.num_vars {
            return Err(LpError::Dimension {
                expected: self.num_vars,
                got: coeffs.len(),
            });
        }
        self.objective = coeffs;
        self.objective_offset = offset;
        Ok(())
    }

    pub fn maximize(&self) -> Result<LpSolution, LpError> {
        Tableau::build(self).solve(self)
    }
}

/// Row-major tableau. The last column holds the right-hand side; the
/// objective row stores `z_j - c_j`, so a negative entry means the column
/// improves the (maximization) objective.
struct Tableau {
    m: usize,
    cols: usize,
    data: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    num_vars: usize,
    first_artificial: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let m = lp.rows.len();
        let n = lp.num_vars;
        let artificial_rows: Vec<usize> = (0..m).filter(|&i| lp.rhs[i] < 0.0).collect();
        let first_artificial = n + m;
        let cols = first_artificial + artificial_rows.len();
        let mut data = vec![vec![0.0; cols + 1]; m];
        let mut basis = vec![0; m];
        for i in 0..m {
            let sign = if lp.rhs[i] < 0.0 { -1.0 } else { 1.0 };
            for j in 0..n {
                data[i][j] = sign * lp.rows[i][j];
            }
            data[i][n + i] = sign;
            data[i][cols] = sign * lp.rhs[i];
            basis[i] = n + i;
        }
        for (a, &i) in artificial_rows.iter().enumerate() {
            data[i][first_artificial + a] = 1.0;
            basis[i] = first_artificial + a;
        }
        Tableau {
            m,
            cols,
            data,
            obj: vec![0.0; cols + 1],
            basis,
            num_vars: n,
            first_artificial,
        }
    }

    /// Sets the objective row for maximizing `costs . x` over all columns and
    /// prices out the current basis.
    fn load_objective(&mut self, costs: &[f64]) {
        self.obj = vec![0.0; self.cols + 1];
        for (j, &c) in costs.iter().enumerate() {
            self.obj[j] = -c;
        }
        for i in 0..self.m {
            let cb = costs[self.basis[i]];
            if cb != 0.0 {
                for j in 0..=self.cols {
                    self.obj[j] += cb * self.data[i][j];
                }
            }
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.data[row][col];
        for v in self.data[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.data[row].clone();
        for i in 0..self.m {
            if i != row {
                let f = self.data[i][col];
                if f != 0.0 {
                    for (v, pr) in self.data[i].iter_mut().zip(pivot_row.iter()) {
                        *v -= f * pr;
                    }
                }
            }
        }
        let f = self.obj[col];
        if f != 0.0 {
            for (v, pr) in self.obj.iter_mut().zip(pivot_row.iter()) {
                *v -= f * pr;
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule iterations over columns `< active_cols`.
    fn run(&mut self, active_cols: usize) -> Result<(), LpError> {
        loop {
            let Some(col) = (0..active_cols).find(|&j| self.obj[j] < -PIVOT_TOL) else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.data[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.data[i][self.cols] / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - PIVOT_TOL
                                || (ratio <= br + PIVOT_TOL && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return Err(LpError::Unbounded),
            }
        }
    }

    fn solve(mut self, lp: &LinearProgram) -> Result<LpSolution, LpError> {
        if self.cols > self.first_artificial {
            let mut costs = vec![0.0; self.cols];
            for c in costs[self.first_artificial..].iter_mut() {
                *c = -1.0;
            }
            self.load_objective(&costs);
            self.run(self.cols)?;
            if self.obj[self.cols] < -PIVOT_TOL {
                return Err(LpError::Infeasible);
            }
            // Drive artificials still basic at zero out of the basis.
            for i in 0..self.m {
                if self.basis[i] >= self.first_artificial {
                    if let Some(col) =
                        (0..self.first_artificial).find(|&j| self.data[i][j].abs() > PIVOT_TOL)
                    {
                        self.pivot(i, col);
                    }
                }
            }
        }

        let mut costs = vec![0.0; self.cols];
        costs[..self.num_vars].copy_from_slice(&lp.objective);
        self.load_objective(&costs);
        self.run(self.first_artificial)?;

        let mut x = vec![0.0; self.num_vars];
        for i in 0..self.m {
            if self.basis[i] < self.num_vars {
                x[self.basis[i]] = self.data[i][self.cols];
            }
        }
        let value =
            lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum::<f64>() + lp.objective_offset;
        Ok(LpSolution { value, x })
    }
}
