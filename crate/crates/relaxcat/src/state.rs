//! Fixed-size conserved-state vectors and the tiny dense linear algebra
//! the cell-local implicit solves need.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

/// Conserved state at one cell: `D` components (2 for the relaxation
/// system, 3 for the kinetic and gas-dynamics models).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVec<const D: usize>(pub [f64; D]);

impl<const D: usize> StateVec<D> {
    pub const ZERO: Self = StateVec([0.0; D]);

    pub fn nan() -> Self {
        StateVec([f64::NAN; D])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// Max-norm of the components.
    pub fn abs_max(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = [0.0; D];
        for (o, x) in out.iter_mut().zip(self.0.iter()) {
            *o = f(*x);
        }
        StateVec(out)
    }
}

impl<const D: usize> Default for StateVec<D> {
    fn default() -> Self {
        Self::ZERO
    }
}

impl<const D: usize> Index<usize> for StateVec<D> {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<const D: usize> IndexMut<usize> for StateVec<D> {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl<const D: usize> Add for StateVec<D> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0.iter()) {
            *o += r;
        }
        StateVec(out)
    }
}

impl<const D: usize> AddAssign for StateVec<D> {
    fn add_assign(&mut self, rhs: Self) {
        for (o, r) in self.0.iter_mut().zip(rhs.0.iter()) {
            *o += r;
        }
    }
}

impl<const D: usize> Sub for StateVec<D> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0.iter()) {
            *o -= r;
        }
        StateVec(out)
    }
}

impl<const D: usize> SubAssign for StateVec<D> {
    fn sub_assign(&mut self, rhs: Self) {
        for (o, r) in self.0.iter_mut().zip(rhs.0.iter()) {
            *o -= r;
        }
    }
}

impl<const D: usize> Neg for StateVec<D> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|x| -x)
    }
}

impl<const D: usize> Mul<f64> for StateVec<D> {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.map(|x| x * s)
    }
}

impl<const D: usize> Mul<StateVec<D>> for f64 {
    type Output = StateVec<D>;
    fn mul(self, v: StateVec<D>) -> StateVec<D> {
        v * self
    }
}

/// Small dense `D x D` matrix, row major. Used for source Jacobians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat<const D: usize>(pub [[f64; D]; D]);

impl<const D: usize> Mat<D> {
    pub const ZERO: Self = Mat([[0.0; D]; D]);

    pub fn identity() -> Self {
        let mut m = Self::ZERO;
        for i in 0..D {
            m.0[i][i] = 1.0;
        }
        m
    }

    pub fn matvec(&self, v: &StateVec<D>) -> StateVec<D> {
        let mut out = [0.0; D];
        for (o, row) in out.iter_mut().zip(self.0.iter()) {
            *o = row.iter().zip(v.0.iter()).map(|(a, b)| a * b).sum();
        }
        StateVec(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        m
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut m = *self;
        for (row, rrow) in m.0.iter_mut().zip(rhs.0.iter()) {
            for (x, r) in row.iter_mut().zip(rrow.iter()) {
                *x += r;
            }
        }
        m
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut out = Self::ZERO;
        for i in 0..D {
            for j in 0..D {
                let mut s = 0.0;
                for k in 0..D {
                    s += self.0[i][k] * rhs.0[k][j];
                }
                out.0[i][j] = s;
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

/// Solve `A x = b` by Gaussian elimination with scaled partial pivoting.
/// Returns `None` when a pivot degenerates (singular system).
///
/// Pivots are ranked relative to their row magnitudes. Stiff implicit
/// systems mix unit rows with rows of size `1/eps`; ranking by absolute
/// value would swap those rows and destroy the decoupled components
/// through cancellation in the back substitution.
pub fn solve_linear<const D: usize>(a: &Mat<D>, b: &StateVec<D>) -> Option<StateVec<D>> {
    let mut m = a.0;
    let mut rhs = b.0;
    let mut scale = [0.0_f64; D];
    for (s, row) in scale.iter_mut().zip(m.iter()) {
        *s = row.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        if *s < 1e-300 {
            return None;
        }
    }
    for col in 0..D {
        let mut pivot = col;
        let mut best = m[col][col].abs() / scale[col];
        for row in col + 1..D {
            let ratio = m[row][col].abs() / scale[row];
            if ratio > best {
                best = ratio;
                pivot = row;
            }
        }
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            scale.swap(pivot, col);
            m.swap(pivot, col);
            rhs.swap(pivot, col);
        }
        for row in col + 1..D {
            let f = m[row][col] / m[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..D {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0; D];
    for col in (0..D).rev() {
        let mut s = rhs[col];
        for k in col + 1..D {
            s -= m[col][k] * x[k];
        }
        x[col] = s / m[col][col];
    }
    Some(StateVec(x))
}
