//! Pentadiagonal operators on radial grids and their direct solves.

use std::ops::{Add, Div, Mul, Sub};

use num_complex::Complex64;

/// Scalars the banded routines work over (`f64` and `Complex64`).
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn from_real(x: f64) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}

/// Row-stored matrix with offsets `-2..=2`.
#[derive(Debug, Clone)]
pub struct Band {
    rows: Vec<[f64; 5]>,
}

impl Band {
    /// Builds the matrix from a per-row stencil over offsets `-2..=2`.
    ///
    /// Ghost nodes are folded back: `u_{-1-i} = u_i` (even about the origin)
    /// and `u_{n+i} = -u_{n-1-i}` (homogeneous Dirichlet at the outer face).
    pub fn from_stencil(n: usize, stencil: impl Fn(usize) -> [f64; 5]) -> Band {
        let mut rows = vec![[0.0; 5]; n];
        for (j, row) in rows.iter_mut().enumerate() {
            let s = stencil(j);
            for (k, &c) in s.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let i = j as isize + k as isize - 2;
                let (target, sign) = if i < 0 {
                    (-i - 1, 1.0)
                } else if i >= n as isize {
                    (2 * n as isize - 1 - i, -1.0)
                } else {
                    (i, 1.0)
                };
                let slot = (target - j as isize + 2) as usize;
                row[slot] += sign * c;
            }
        }
        Band { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, j: usize) -> &[f64; 5] {
        &self.rows[j]
    }

    pub fn apply<T: Scalar>(&self, u: &[T]) -> Vec<T> {
        let n = self.rows.len();
        assert_eq!(u.len(), n);
        let mut out = vec![T::zero(); n];
        for (j, (row, o)) in self.rows.iter().zip(out.iter_mut()).enumerate() {
            let mut acc = T::zero();
            for (k, &c) in row.iter().enumerate() {
                let i = j as isize + k as isize - 2;
                if c != 0.0 && i >= 0 && (i as usize) < n {
                    acc = acc + u[i as usize] * c;
                }
            }
            *o = acc;
        }
        out
    }

    /// Factors `alpha·I + beta·A`.
    pub fn factor_shifted<T: Scalar>(&self, alpha: T, beta: T) -> BandLu<T> {
        let n = self.rows.len();
        let mut a: Vec<[T; 5]> = self
            .rows
            .iter()
            .map(|row| {
                let mut r = [T::zero(); 5];
                for k in 0..5 {
                    r[k] = beta * row[k];
                }
                r[2] = r[2] + alpha;
                r
            })
            .collect();
        // Gaussian elimination without pivoting; multipliers stored in the
        // sub-diagonal slots.
        for k in 0..n {
            let pivot = a[k][2];
            for i in (k + 1)..(k + 3).min(n) {
                let li = k + 2 - i;
                let f = a[i][li] / pivot;
                a[i][li] = f;
                for j in (k + 1)..(k + 3).min(n) {
                    let dst = j + 2 - i;
                    let src = j + 2 - k;
                    a[i][dst] = a[i][dst] - f * a[k][src];
                }
            }
        }
        BandLu { a }
    }
}

/// LU factors of a pentadiagonal matrix.
#[derive(Debug, Clone)]
pub struct BandLu<T> {
    a: Vec<[T; 5]>,
}

impl<T: Scalar> BandLu<T> {
    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        let n = self.a.len();
        assert_eq!(rhs.len(), n);
        let mut x = rhs.to_vec();
        for i in 0..n {
            let mut acc = x[i];
            for k in i.saturating_sub(2)..i {
                acc = acc - self.a[i][k + 2 - i] * x[k];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..(i + 3).min(n) {
                acc = acc - self.a[i][j + 2 - i] * x[j];
            }
            x[i] = acc / self.a[i][2];
        }
        x
    }
}
