//! Fixed-size dense real matrices.
//!
//! Everything in the simulator is at most 4x4, so matrices are stack arrays
//! indexed `[row][col]` and sized by const generics.

use std::ops::{Index, IndexMut, Mul};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix<const R: usize, const C: usize>(pub [[f64; C]; R]);

pub type Mat2 = Matrix<2, 2>;
pub type Mat4 = Matrix<4, 4>;

impl<const R: usize, const C: usize> Default for Matrix<R, C> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const R: usize, const C: usize> Matrix<R, C> {
    pub const fn zeros() -> Self {
        Matrix([[0.0; C]; R])
    }

    pub fn from_rows(rows: [[f64; C]; R]) -> Self {
        Matrix(rows)
    }

    pub fn transpose(&self) -> Matrix<C, R> {
        let mut t = Matrix::<C, R>::zeros();
        for i in 0..R {
            for j in 0..C {
                t.0[j][i] = self.0[i][j];
            }
        }
        t
    }

    pub fn column(&self, j: usize) -> [f64; R] {
        let mut c = [0.0; R];
        for (i, row) in self.0.iter().enumerate() {
            c[i] = row[j];
        }
        c
    }

    /// Gathers the listed columns into a new matrix.
    pub fn select_columns<const K: usize>(&self, cols: [usize; K]) -> Result<Matrix<R, K>> {
        let mut out = Matrix::<R, K>::zeros();
        for (k, &j) in cols.iter().enumerate() {
            if j >= C {
                return Err(Error::IndexOutOfRange { index: j, len: C });
            }
            for i in 0..R {
                out.0[i][k] = self.0[i][j];
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[f64; C]) -> [f64; R] {
        let mut y = [0.0; R];
        for (yi, row) in y.iter_mut().zip(self.0.iter()) {
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        y
    }

    /// `selfᵀ · self`.
    pub fn gram(&self) -> Matrix<C, C> {
        let mut g = Matrix::<C, C>::zeros();
        for i in 0..C {
            for j in i..C {
                let v: f64 = (0..R).map(|r| self.0[r][i] * self.0[r][j]).sum();
                g.0[i][j] = v;
                g.0[j][i] = v;
            }
        }
        g
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.0.iter().flatten().map(|v| v * v).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl<const N: usize> Matrix<N, N> {
    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = 1.0;
        }
        m
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let scale = self.0.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::Singular);
        }
        let tol = scale * 1e-12;
        let mut a = self.0;
        let mut inv = Self::identity().0;
        for col in 0..N {
            let pivot = (col..N)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap_or(col);
            if a[pivot][col].abs() <= tol {
                return Err(Error::Singular);
            }
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col];
            for j in 0..N {
                a[col][j] /= p;
                inv[col][j] /= p;
            }
            for row in 0..N {
                if row != col {
                    let f = a[row][col];
                    if f != 0.0 {
                        for j in 0..N {
                            a[row][j] -= f * a[col][j];
                            inv[row][j] -= f * inv[col][j];
                        }
                    }
                }
            }
        }
        Ok(Matrix(inv))
    }
}

impl Mat2 {
    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }
}

impl<const R: usize, const K: usize, const C: usize> Mul<Matrix<K, C>> for Matrix<R, K> {
    type Output = Matrix<R, C>;

    fn mul(self, rhs: Matrix<K, C>) -> Matrix<R, C> {
        let mut out = Matrix::<R, C>::zeros();
        for i in 0..R {
            for j in 0..C {
                out.0[i][j] = (0..K).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        out
    }
}

impl<const R: usize, const C: usize> Index<(usize, usize)> for Matrix<R, C> {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl<const R: usize, const C: usize> IndexMut<(usize, usize)> for Matrix<R, C> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

pub fn dot<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq<const N: usize>(a: &[f64; N]) -> f64 {
    dot(a, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_permuted_matrix_needs_pivoting() {
        let m = Mat2::from_rows([[0.0, 2.0], [3.0, 0.0]]);
        let inv = m.inverse().unwrap();
        assert!((m * inv).max_abs_diff(&Mat2::identity()) < 1e-15);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = Mat2::from_rows([[1.0, 2.0], [2.0, 4.0]]);
        assert!(matches!(m.inverse(), Err(Error::Singular)));
        assert!(matches!(Mat4::zeros().inverse(), Err(Error::Singular)));
    }

    #[test]
    fn inverse_4x4_round_trip() {
        let m = Mat4::from_rows([
            [2.0, 1.0, 0.0, 0.5],
            [1.0, 3.0, 0.2, 0.0],
            [0.0, 0.2, 1.5, 0.1],
            [0.5, 0.0, 0.1, 1.0],
        ]);
        let inv = m.inverse().unwrap();
        assert!((m * inv).max_abs_diff(&Mat4::identity()) < 1e-13);
    }

    #[test]
    fn select_columns_checks_bounds() {
        let m = Mat2::identity();
        assert!(m.select_columns([1]).is_ok());
        assert!(matches!(
            m.select_columns([2]),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
    }
}
