use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DabError, Result};

/// Row-major dense matrix with complex entries. Real matrices carry zero
/// imaginary parts.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self::from_fn(rows, cols, |i, j| Complex64::new(f(i, j), 0.0))
    }

    /// Builds a real matrix from row-major values.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(DabError::Dimension(format!("{} values for a {rows}x{cols} matrix", values.len())));
        }
        Ok(Self::from_real_fn(rows, cols, |i, j| values[i * cols + j]))
    }

    pub fn from_complex(rows: usize, cols: usize, values: &[Complex64]) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(DabError::Dimension(format!("{} values for a {rows}x{cols} matrix", values.len())));
        }
        Ok(Self { rows, cols, data: values.to_vec() })
    }

    pub fn from_rows<const C: usize>(rows: &[[f64; C]]) -> Self {
        Self::from_real_fn(rows.len(), C, |i, j| rows[i][j])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Real parts in row-major order.
    pub fn real_parts(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.re).collect()
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(perm[i], j)])
    }

    pub fn permute_cols(&self, perm: &[usize]) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, perm[j])])
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != rhs.rows {
            return Err(DabError::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, rhs.rows, rhs.cols)));
        }
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    fn lu(&self) -> Result<(Vec<Complex64>, Vec<usize>, f64)> {
        if !self.is_square() {
            return Err(DabError::Dimension(format!("LU of a {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (piv, big) =
                (k..n).map(|i| (i, a[i * n + k].norm())).fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if big <= scale * 1e-15 * n as f64 {
                return Err(DabError::Singular(format!("zero pivot in column {k}")));
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
                sign = -sign;
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                for j in k + 1..n {
                    let akj = a[k * n + j];
                    a[i * n + j] -= f * akj;
                }
            }
        }
        Ok((a, perm, sign))
    }

    /// Solves `self * x = b` by LU with partial pivoting.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.rows;
        if b.len() != n {
            return Err(DabError::Dimension(format!("rhs of length {} for a {n}x{n} system", b.len())));
        }
        let (lu, perm, _) = self.lu()?;
        let mut x: Vec<Complex64> = perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = lu[i * n + j];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = lu[i * n + j];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= lu[i * n + i];
        }
        Ok(x)
    }

    pub fn determinant(&self) -> Result<Complex64> {
        match self.lu() {
            Ok((lu, _, sign)) => {
                let n = self.rows;
                Ok((0..n).map(|i| lu[i * n + i]).product::<Complex64>() * sign)
            }
            Err(DabError::Singular(_)) => Ok(Complex64::new(0.0, 0.0)),
            Err(e) => Err(e),
        }
    }

    pub fn inverse(&self) -> Result<DenseMatrix> {
        let n = self.rows;
        let mut out = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.solve(&e)?;
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul<&DenseMatrix> for &DenseMatrix {
    type Output = DenseMatrix;

    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.matmul(rhs).expect("matrix dimensions must agree")
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                if z.im == 0.0 {
                    write!(f, "{:>12.5e} ", z.re)?;
                } else {
                    write!(f, "{:>12.5e}{:+.5e}j ", z.re, z.im)?;
                }
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solve_round_trip() {
        let m = DenseMatrix::from_complex(
            3,
            3,
            &[
                c(2.0, 1.0),
                c(0.0, -1.0),
                c(1.0, 0.0),
                c(1.0, 0.0),
                c(3.0, 0.0),
                c(0.0, 2.0),
                c(0.0, 0.5),
                c(1.0, 1.0),
                c(4.0, 0.0),
            ],
        )
        .unwrap();
        let b = [c(1.0, 0.0), c(0.0, 1.0), c(-2.0, 3.0)];
        let x = m.solve(&b).unwrap();
        for i in 0..3 {
            let r: Complex64 = (0..3).map(|j| m[(i, j)] * x[j]).sum();
            assert!((r - b[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn determinant_of_triangular() {
        let m = DenseMatrix::from_rows(&[[2.0, 5.0, 1.0], [0.0, 3.0, 7.0], [0.0, 0.0, -4.0]]);
        assert!((m.determinant().unwrap() - c(-24.0, 0.0)).norm() < 1e-12);
        let singular = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        assert_eq!(singular.determinant().unwrap(), c(0.0, 0.0));
        assert!(singular.solve(&[c(1.0, 0.0), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn inverse_times_self_is_identity() {
        let m = DenseMatrix::from_rows(&[[4.0, 1.0], [2.0, 3.0]]);
        let p = &m * &m.inverse().unwrap();
        let id = DenseMatrix::identity(2);
        for (a, b) in p.entries().iter().zip(id.entries()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn dimension_errors() {
        assert!(DenseMatrix::from_real(2, 2, &[1.0; 3]).is_err());
        let a = DenseMatrix::zeros(2, 3);
        assert!(a.matmul(&a).is_err());
    }
}
