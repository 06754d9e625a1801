//! Dense linear algebra over the prime fields `F_p`.
//!
//! Matrices are small (a few dozen rows at most) so everything is stored
//! row-major in a flat `Vec<u32>` and reduced eagerly.  Entries are always
//! kept in the canonical range `0..p`.

use serde::{Deserialize, Serialize};

/// A dense matrix over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

/// Multiplicative inverse modulo a prime, by Fermat.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    assert!(!a.is_multiple_of(p), "zero has no inverse");
    pow_mod(a, p - 2, p)
}

pub fn pow_mod(a: u32, mut e: u32, p: u32) -> u32 {
    let mut acc: u64 = 1;
    let mut base = (a % p) as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Simple primality test used to validate `FinVec(p)` descriptors.
pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Matrix { rows, cols, data }
    }

    /// Column vector from a slice.
    pub fn column(v: &[u32]) -> Self {
        Matrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn col(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &Matrix, p: u32) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = ((out.data[idx] as u64 + a * other.get(k, j) as u64) % p as u64) as u32;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[u32], p: u32) -> Vec<u32> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s: u64 = 0;
                for (k, &x) in v.iter().enumerate() {
                    s += self.get(i, k) as u64 * x as u64;
                }
                (s % p as u64) as u32
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix, p: u32) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| (a + b) % p).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix, p: u32) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| (a + p - b) % p).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    /// Kronecker product with the row-major convention `e_i ⊗ e_j ↦ e_{i·n+j}`.
    pub fn kron(&self, other: &Matrix, p: u32) -> Matrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Matrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j) as u64;
                if a == 0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let v = (a * other.get(k, l) as u64 % p as u64) as u32;
                        out.set(i * other.rows + k, j * other.cols + l, v);
                    }
                }
            }
        }
        out
    }

    /// Stack matrices with equal column counts on top of each other.
    pub fn vstack(parts: &[Matrix], cols: usize) -> Matrix {
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for m in parts {
            assert_eq!(m.cols, cols);
            data.extend_from_slice(&m.data);
        }
        Matrix { rows, cols, data }
    }

    /// Place matrices with equal row counts side by side.
    pub fn hstack(parts: &[Matrix], rows: usize) -> Matrix {
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut off = 0;
        for m in parts {
            assert_eq!(m.rows, rows);
            for r in 0..rows {
                for c in 0..m.cols {
                    out.set(r, off + c, m.get(r, c));
                }
            }
            off += m.cols;
        }
        out
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self, p: u32) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| m.get(r, col) != 0) else { continue };
            if pr != row {
                for c in 0..m.cols {
                    let t = m.get(pr, c);
                    m.set(pr, c, m.get(row, c));
                    m.set(row, c, t);
                }
            }
            let inv = inv_mod(m.get(row, col), p) as u64;
            for c in 0..m.cols {
                m.set(row, c, (m.get(row, c) as u64 * inv % p as u64) as u32);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, col) as u64;
                if f == 0 {
                    continue;
                }
                for c in 0..m.cols {
                    let v = (m.get(r, c) as u64 + (p as u64 - f) * m.get(row, c) as u64) % p as u64;
                    m.set(r, c, v as u32);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, p: u32) -> usize {
        self.rref(p).1.len()
    }

    /// A basis of the right nullspace, returned as the columns of a matrix
    /// (shape `cols × nullity`).  Basis vectors are the standard ones
    /// attached to the free columns, so the result is canonical.
    pub fn nullspace(&self, p: u32) -> Matrix {
        let (r, pivots) = self.rref(p);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            out.set(f, k, 1);
            for (i, &pc) in pivots.iter().enumerate() {
                let v = r.get(i, f);
                out.set(pc, k, (p - v) % p);
            }
        }
        out
    }

    /// Solve `self · x = b`; returns one solution if any exists.
    pub fn solve(&self, b: &[u32], p: u32) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows);
        let aug = Matrix::hstack(&[self.clone(), Matrix::column(b)], self.rows);
        let (r, pivots) = aug.rref(p);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(i, self.cols);
        }
        Some(x)
    }

    /// Solve `X · self = b` for a matrix `X` (shape `b.rows × self.rows`).
    pub fn solve_left(&self, b: &Matrix, p: u32) -> Option<Matrix> {
        let at = self.transpose();
        let bt = b.transpose();
        let mut cols = Vec::with_capacity(bt.cols);
        for c in 0..bt.cols {
            cols.push(at.solve(&bt.col(c), p)?);
        }
        let mut xt = Matrix::zeros(self.rows, b.rows);
        for (c, v) in cols.iter().enumerate() {
            for (r, &e) in v.iter().enumerate() {
                xt.set(r, c, e);
            }
        }
        Some(xt.transpose())
    }

    pub fn inverse(&self, p: u32) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Matrix::zeros(0, 0));
        }
        let aug = Matrix::hstack(&[self.clone(), Matrix::identity(n)], n);
        let (r, pivots) = aug.rref(p);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j));
            }
        }
        Some(out)
    }

    /// The nonzero rows of the reduced echelon form: a canonical basis of
    /// the row space.
    pub fn row_space(&self, p: u32) -> Matrix {
        let (r, pivots) = self.rref(p);
        Matrix { rows: pivots.len(), cols: self.cols, data: r.data[..pivots.len() * self.cols].to_vec() }
    }
}

/// Number of vectors in `F_p^dim`, or `None` on overflow past `cap`.
pub fn vector_count(p: u32, dim: usize, cap: usize) -> Option<usize> {
    let mut n: usize = 1;
    for _ in 0..dim {
        n = n.checked_mul(p as usize)?;
        if n > cap {
            return None;
        }
    }
    Some(n)
}

/// Encode a vector as an integer with `v[0]` most significant.
pub fn encode_vector(v: &[u32], p: u32) -> usize {
    v.iter().fold(0usize, |acc, &x| acc * p as usize + x as usize)
}

pub fn decode_vector(mut code: usize, dim: usize, p: u32) -> Vec<u32> {
    let mut v = vec![0; dim];
    for i in (0..dim).rev() {
        v[i] = (code % p as usize) as u32;
        code /= p as usize;
    }
    v
}

/// Every vector of `F_p^dim` in lexicographic order.
pub fn all_vectors(dim: usize, p: u32) -> Vec<Vec<u32>> {
    let n = (p as usize).pow(dim as u32);
    (0..n).map(|c| decode_vector(c, dim, p)).collect()
}

/// Every `rows × cols` matrix, ordered by the row-major entry list read as
/// a base-`p` numeral.
pub fn all_matrices(rows: usize, cols: usize, p: u32) -> Vec<Matrix> {
    all_vectors(rows * cols, p).into_iter().map(|d| Matrix::from_rows(rows, cols, d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip_over_f5() {
        let m = Matrix::from_rows(2, 2, vec![1, 2, 3, 4]);
        let inv = m.inverse(5).unwrap();
        assert_eq!(m.mul(&inv, 5), Matrix::identity(2));
    }

    #[test]
    fn nullspace_of_difference_of_projections() {
        // [[1, 0]] - [[0, 1]] over F_2 has kernel spanned by (1, 1).
        let a = Matrix::from_rows(1, 2, vec![1, 0]).sub(&Matrix::from_rows(1, 2, vec![0, 1]), 2);
        let k = a.nullspace(2);
        assert_eq!(k.cols, 1);
        assert_eq!(k.col(0), vec![1, 1]);
    }

    #[test]
    fn kron_follows_row_major_convention() {
        let a = Matrix::column(&[1, 0]);
        let b = Matrix::column(&[0, 1, 0]);
        assert_eq!(a.kron(&b, 2).col(0), vec![0, 1, 0, 0, 0, 0]);
    }

    #[test]
    fn vector_codes_round_trip() {
        for c in 0..27 {
            assert_eq!(encode_vector(&decode_vector(c, 3, 3), 3), c);
        }
        assert_eq!(decode_vector(1, 2, 2), vec![0, 1]);
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        assert!(Matrix::from_rows(2, 2, vec![1, 1, 1, 1]).inverse(2).is_none());
    }
}
