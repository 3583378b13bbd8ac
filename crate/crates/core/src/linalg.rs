//! Dense row-major matrices at desk scale, plus the vector kernels the rest
//! of the crate leans on. Solves are direct (LU with partial pivoting);
//! symmetric eigenvalues come from cyclic Jacobi sweeps. Nothing here is
//! tuned for large n — operator catalogs in this crate live in R^2..R^300.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::math;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: &[&[f64]]) -> Result<Matrix, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if r == 0 || c == 0 {
            return Err(Error::bad_param("matrix", "empty matrix"));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, found: row.len() });
            }
            data.extend_from_slice(row);
        }
        if !all_finite(&data) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Matrix, Error> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        if !all_finite(&data) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
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

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            out.push(dot(self.row(i), x));
        }
        out
    }

    /// `self^T x` without materializing the transpose.
    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.at(i, j) * xi;
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.at(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.at(i, j) + a * other.at(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn symmetric_part(&self) -> Matrix {
        debug_assert!(self.is_square());
        let n = self.rows;
        let mut s = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                s.set(i, j, 0.5 * (self.at(i, j) + self.at(j, i)));
            }
        }
        s
    }

    /// `I + s * self` (square only).
    pub fn identity_plus_scaled(&self, s: f64) -> Matrix {
        debug_assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        for v in m.data.iter_mut() {
            *v *= s;
        }
        for i in 0..n {
            let v = m.at(i, i) + 1.0;
            m.set(i, i, v);
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(math::abs(*v)))
    }

    /// Max absolute asymmetry |m_ij - m_ji|.
    pub fn asymmetry(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max(math::abs(self.at(i, j) - self.at(j, i)));
            }
        }
        worst
    }
}

/// LU factorization with partial pivoting of a square matrix.
#[derive(Clone, Debug)]
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    piv: Vec<usize>,
}

impl LuFactors {
    pub fn factor(m: &Matrix) -> Result<LuFactors, Error> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.rows, found: m.cols });
        }
        let n = m.rows;
        let mut lu = m.data.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let scale = m.max_abs().max(1.0);
        for k in 0..n {
            // pivot search
            let mut p = k;
            let mut best = math::abs(lu[k * n + k]);
            for i in (k + 1)..n {
                let v = math::abs(lu[i * n + k]);
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= 1e-13 * scale {
                return Err(Error::SingularMatrix);
            }
            if p != k {
                piv.swap(k, p);
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in (k + 1)..n {
                    lu[i * n + j] -= factor * lu[k * n + j];
                }
            }
        }
        Ok(LuFactors { n, lu, piv })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        debug_assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        // forward substitution (unit lower triangle)
        for i in 1..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        // back substitution
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }
}

pub fn solve(m: &Matrix, b: &[f64]) -> Result<Vec<f64>, Error> {
    Ok(LuFactors::factor(m)?.solve(b))
}

pub fn inverse(m: &Matrix) -> Result<Matrix, Error> {
    let f = LuFactors::factor(m)?;
    let n = m.rows;
    let mut inv = Matrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = f.solve(&e);
        e[j] = 0.0;
        for i in 0..n {
            inv.set(i, j, col[i]);
        }
    }
    Ok(inv)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(m: &Matrix) -> Vec<f64> {
    debug_assert!(m.is_square());
    let n = m.rows;
    let mut a = m.clone();
    if n == 1 {
        return vec![a.at(0, 0)];
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a.at(i, j) * a.at(i, j);
            }
        }
        if math::sqrt(off) <= 1e-15 * a.max_abs().max(1.0) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.at(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.at(p, p);
                let aqq = a.at(q, q);
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + math::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + math::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let akp = a.at(k, p);
                    let akq = a.at(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.at(p, k);
                    let aqk = a.at(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    (0..n).map(|i| a.at(i, i)).collect()
}

pub fn smallest_symmetric_eigenvalue(m: &Matrix) -> f64 {
    symmetric_eigenvalues(m).into_iter().fold(f64::INFINITY, f64::min)
}

// --- vector kernels ---

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(s: f64, a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| s * x).collect()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for i in 0..y.len() {
        y[i] += alpha * x[i];
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    math::sqrt(dist_sq(a, b))
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for i in 0..a.len() {
        let d = a[i] - b[i];
        s += d * d;
    }
    s
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(math::abs(*v)))
}
