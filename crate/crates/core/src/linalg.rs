//! Dense matrices over an exact field.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{fmt_q, Q};

/// Exact field operations. Constants are produced from an existing element
/// because some fields (cyclotomic ones) carry their modulus at runtime.
pub trait Field: Clone + PartialEq + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn vanishes(&self) -> bool;
}

impl Field for Q {
    fn zero_like(&self) -> Self {
        Q::zero()
    }
    fn one_like(&self) -> Self {
        Q::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn filled(rows: usize, cols: usize, value: F) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// Identity of size `n`; `unit` supplies the field context.
    pub fn identity(n: usize, unit: &F) -> Self {
        let mut m = Self::filled(n, n, unit.zero_like());
        for i in 0..n {
            m.set(i, i, unit.one_like());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// All-zero matrix; `unit` supplies the field context.
    pub fn zeros(rows: usize, cols: usize, unit: &F) -> Self {
        Self::filled(rows, cols, unit.zero_like())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let unit = self.data.first().or(o.data.first()).expect("empty product needs mul_in").clone();
        self.mul_in(o, &unit)
    }

    /// Product that also works when a factor has no entries.
    pub fn mul_in(&self, o: &Self, unit: &F) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        let zero = unit.zero_like();
        let mut out = Self::filled(self.rows, o.cols, zero.clone());
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.vanishes() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.vanishes() {
                        continue;
                    }
                    let idx = i * o.cols + j;
                    out.data[idx] = out.data[idx].add(&a.mul(b));
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, s: &F) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.mul(s)).collect(),
        }
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = v[0].zero_like();
                for (a, x) in self.row(i).iter().zip(v) {
                    acc = acc.add(&a.mul(x));
                }
                acc
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.vanishes())
    }

    pub fn pow(&self, e: u32) -> Self {
        assert_eq!(self.rows, self.cols);
        let mut out = Self::identity(self.rows, self.sample());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Rank by Gaussian elimination. The field is exact, so any nonzero pivot
    /// will do.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(p) = (rank..m.rows).find(|&r| !m.get(r, col).vanishes()) else {
                continue;
            };
            m.swap_rows(rank, p);
            let inv = m.get(rank, col).inv().expect("nonzero pivot");
            for r in 0..m.rows {
                if r == rank || m.get(r, col).vanishes() {
                    continue;
                }
                let f = m.get(r, col).mul(&inv);
                for c in col..m.cols {
                    let v = m.get(r, c).sub(&f.mul(m.get(rank, c)));
                    m.set(r, c, v);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    /// Inverse by Gauss-Jordan; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let mut a = self.clone();
        let mut b = Self::identity(n, self.sample());
        for col in 0..n {
            let p = (col..n).find(|&r| !a.get(r, col).vanishes())?;
            a.swap_rows(col, p);
            b.swap_rows(col, p);
            let inv = a.get(col, col).inv()?;
            for c in 0..n {
                a.set(col, c, a.get(col, c).mul(&inv));
                b.set(col, c, b.get(col, c).mul(&inv));
            }
            for r in 0..n {
                if r == col || a.get(r, col).vanishes() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for c in 0..n {
                    let va = a.get(r, c).sub(&f.mul(a.get(col, c)));
                    a.set(r, c, va);
                    let vb = b.get(r, c).sub(&f.mul(b.get(col, c)));
                    b.set(r, c, vb);
                }
            }
        }
        Some(b)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn sample(&self) -> &F {
        self.data.first().expect("matrix has no entries to supply a field context")
    }
}

/// Rational matrix rendered with `p/q` strings, for JSON output.
#[derive(Clone, Debug, Serialize)]
pub struct QMatrixJson(pub Vec<Vec<String>>);

impl From<&Matrix<Q>> for QMatrixJson {
    fn from(m: &Matrix<Q>) -> Self {
        QMatrixJson(
            (0..m.rows())
                .map(|i| m.row(i).iter().map(fmt_q).collect())
                .collect(),
        )
    }
}

/// Integer matrix as a rational one.
pub fn q_matrix(rows: &[Vec<i64>]) -> Matrix<Q> {
    Matrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| crate::arith::qi(x)).collect())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qi};

    #[test]
    fn rank_and_inverse() {
        let m = q_matrix(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(m.rank(), 1);
        assert!(m.inverse().is_none());
        let m = q_matrix(&[vec![2, 1], vec![1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2, &qi(1)));
        assert_eq!(*inv.get(0, 0), qi(1));
        assert_eq!(*inv.get(0, 1), qi(-1));
        let h = Matrix::from_rows(vec![vec![q(1, 2), q(1, 3)], vec![q(1, 3), q(1, 4)]]);
        assert_eq!(h.rank(), 2);
    }

    #[test]
    fn nilpotent_powers() {
        let j = q_matrix(&[vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]]);
        assert_eq!(j.pow(1).rank(), 2);
        assert_eq!(j.pow(2).rank(), 1);
        assert!(j.pow(3).is_zero());
    }
}
