//! Small dense matrices over a [`Ring`], plus exact rank routines.

use std::fmt;

use crate::ring::{Ring, F2};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<R: Ring> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Ring> Matrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![R::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, R::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> R {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: R) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add_at(&mut self, r: usize, c: usize, v: R) {
        let i = r * self.cols + c;
        self.data[i] = self.data[i] + v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// `self * rhs`, i.e. apply `rhs` first.
    pub fn mul(&self, rhs: &Matrix<R>) -> Matrix<R> {
        assert_eq!(self.cols, rhs.rows, "matrix shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.add_at(i, j, a * b);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix<R>) -> Matrix<R> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: R) -> Matrix<R> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| *x * s).collect() }
    }

    pub fn map<S: Ring>(&self, f: impl Fn(R) -> S) -> Matrix<S> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| f(*x)).collect() }
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| (0..self.cols).map(|c| self.get(r, c).to_i64()).collect()).collect()
    }
}

impl<R: Ring> fmt::Debug for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format!("{}", self.get(r, c))).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Rank over F2 by elimination on packed rows.
pub fn rank_f2(m: &Matrix<F2>) -> usize {
    let words = m.cols().div_ceil(64).max(1);
    let mut rows: Vec<Vec<u64>> = (0..m.rows())
        .map(|r| {
            let mut v = vec![0u64; words];
            for c in 0..m.cols() {
                if m.get(r, c).0 {
                    v[c / 64] |= 1 << (c % 64);
                }
            }
            v
        })
        .collect();
    let mut rank = 0;
    for c in 0..m.cols() {
        let (w, bit) = (c / 64, 1u64 << (c % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] & bit != 0 {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over Q of an integer matrix (fraction-free elimination in i128).
pub fn rank_q(rows_in: &[Vec<i64>]) -> usize {
    let mut rows: Vec<Vec<i128>> = rows_in.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for r in rank + 1..rows.len() {
            let f = rows[r][c];
            if f == 0 {
                continue;
            }
            for k in 0..ncols {
                rows[r][k] = rows[r][k] * pivot[c] - pivot[k] * f;
            }
            let g = rows[r].iter().fold(0i128, |g, &x| gcd(g, x));
            if g > 1 {
                for x in rows[r].iter_mut() {
                    *x /= g;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranks() {
        let mut m = Matrix::<F2>::zeros(3, 3);
        m.set(0, 0, F2::ONE);
        m.set(1, 0, F2::ONE);
        m.set(2, 1, F2::ONE);
        assert_eq!(rank_f2(&m), 2);
        assert_eq!(rank_q(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank_q(&[vec![1, 1], vec![1, -1]]), 2);
        assert_eq!(rank_q(&[]), 0);
    }

    #[test]
    fn product_applies_right_first() {
        let mut a = MatrixZ::zeros(1, 2);
        a.set(0, 1, 3);
        let mut b = MatrixZ::zeros(2, 1);
        b.set(1, 0, 2);
        assert_eq!(a.mul(&b).get(0, 0), 6);
    }

    use crate::MatrixZ;
}
