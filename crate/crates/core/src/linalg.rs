//! Exact dense linear algebra over `Q`: row reduction, kernels, images and
//! subspace lattice operations.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, Q};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(fmt_q).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data = rows.into_iter().flatten().collect();
        Self { rows: r, cols: c, data }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Q::from_integer(x.into())).collect())
                .collect(),
        )
    }

    /// The matrix whose columns are the given vectors.
    pub fn from_columns(n: usize, cols: &[Vec<Q>]) -> Self {
        let mut m = Self::zero(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                m.set(i, j, c[i].clone());
            }
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &Q {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Q> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(c, r, self.get(r, c).clone());
            }
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut m = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = m.get(i, j) + a * b;
                        m.set(i, j, v);
                    }
                }
            }
        }
        m
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { data, ..*self }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { data, ..*self }
    }

    pub fn scale(&self, c: &Q) -> Self {
        let data = self.data.iter().map(|a| a * c).collect();
        Self { data, ..*self }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::identity(self.rows);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).recip();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m.get(i, j) - &f * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{v : Av = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let (m, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); self.cols];
                v[f] = Q::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -m.get(r, f).clone();
                }
                v
            })
            .collect()
    }

    /// Basis of the column space.
    pub fn image(&self) -> Vec<Vec<Q>> {
        Subspace::span(self.rows, &(0..self.cols).map(|c| self.column(c)).collect::<Vec<_>>()).basis
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Precondition("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Self::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Q::one());
        }
        let (r, pivots) = aug.rref();
        if n > 0 && (pivots.len() < n || pivots[n - 1] != n - 1) {
            return Err(Error::Singular("matrix is not invertible".into()));
        }
        let mut inv = Self::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    /// A solution `x` of `Ax = b`, if one exists.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        let mut aug = Self::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    pub fn is_nilpotent(&self) -> bool {
        self.is_square() && self.pow(self.rows as u32).is_zero()
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            dim: self.rows,
            entries: (0..self.rows)
                .map(|r| self.row(r).iter().map(fmt_q).collect())
                .collect(),
        }
    }

    pub fn from_json(j: &MatrixJson) -> Result<Self> {
        if j.entries.len() != j.dim || j.entries.iter().any(|r| r.len() != j.dim) {
            return Err(Error::Parse(format!("expected a {0}x{0} matrix", j.dim)));
        }
        let rows = j
            .entries
            .iter()
            .map(|r| r.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if j.dim == 0 {
            return Ok(Self::zero(0, 0));
        }
        Ok(Self::from_rows(rows))
    }
}

/// `{"dim": n, "entries": [["num/den", ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<String>>,
}

/// A subspace of `Q^n`, stored as its reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub ambient: usize,
    pub basis: Vec<Vec<Q>>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Self { ambient: n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        let id = Matrix::identity(n);
        Self {
            ambient: n,
            basis: (0..n).map(|r| id.row(r).to_vec()).collect(),
        }
    }

    pub fn span(n: usize, vectors: &[Vec<Q>]) -> Self {
        if vectors.is_empty() || n == 0 {
            return Self::zero(n);
        }
        let (m, pivots) = Matrix::from_rows(vectors.to_vec()).rref();
        let basis = (0..pivots.len()).map(|r| m.row(r).to_vec()).collect();
        Self { ambient: n, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        if v.iter().all(|x| x.is_zero()) {
            return true;
        }
        let mut vs = self.basis.clone();
        vs.push(v.to_vec());
        Subspace::span(self.ambient, &vs).dim() == self.dim()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        self.sum(other).dim() == self.dim()
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, &vs)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::zero(self.ambient);
        }
        // solve Σ a_i u_i = Σ b_j w_j
        let n = self.ambient;
        let mut cols: Vec<Vec<Q>> = self.basis.clone();
        cols.extend(other.basis.iter().map(|w| w.iter().map(|x| -x).collect()));
        let m = Matrix::from_columns(n, &cols);
        let vecs: Vec<Vec<Q>> = m
            .kernel()
            .into_iter()
            .map(|k| {
                let mut v = vec![Q::zero(); n];
                for (i, u) in self.basis.iter().enumerate() {
                    for t in 0..n {
                        v[t] += &k[i] * &u[t];
                    }
                }
                v
            })
            .collect();
        Subspace::span(n, &vecs)
    }

    /// Image under a linear map.
    pub fn map(&self, a: &Matrix) -> Subspace {
        let vs: Vec<Vec<Q>> = self.basis.iter().map(|v| a.apply(v)).collect();
        Subspace::span(a.rows, &vs)
    }

    /// `{v : ⟨v, w⟩ = 0 for all w}`.
    pub fn annihilator(&self) -> Subspace {
        if self.dim() == 0 {
            return Subspace::full(self.ambient);
        }
        Subspace::span(self.ambient, &Matrix::from_rows(self.basis.clone()).kernel())
    }

    /// Vectors of `self` completing a basis of `smaller` to one of `self`.
    pub fn complement_in(&self, smaller: &Subspace) -> Vec<Vec<Q>> {
        let mut cur = smaller.clone();
        let mut out = Vec::new();
        for v in &self.basis {
            if !cur.contains(v) {
                cur = cur.sum(&Subspace::span(self.ambient, &[v.clone()]));
                out.push(v.clone());
            }
        }
        out
    }
}

pub fn kernel_space(a: &Matrix) -> Subspace {
    Subspace::span(a.cols, &a.kernel())
}

pub fn image_space(a: &Matrix) -> Subspace {
    Subspace::span(a.rows, &a.image())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    #[test]
    fn rref_kernel_image() {
        let a = Matrix::from_i64(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let k = a.kernel();
        assert_eq!(k.len(), 1);
        assert!(a.apply(&k[0]).iter().all(|x| x.is_zero()));
        assert_eq!(a.image().len(), 2);
    }

    #[test]
    fn inverse_and_solve() {
        let a = Matrix::from_i64(&[vec![2, 1], vec![1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        assert_eq!(a.solve(&[qi(3), qi(2)]).unwrap(), vec![qi(1), qi(1)]);
        assert!(Matrix::from_i64(&[vec![1, 1], vec![1, 1]]).inverse().is_err());
        assert!(Matrix::from_i64(&[vec![1, 1], vec![1, 1]]).solve(&[qi(1), qi(0)]).is_none());
    }

    #[test]
    fn lattice_operations() {
        let e = |i: usize| {
            let mut v = vec![qi(0); 3];
            v[i] = qi(1);
            v
        };
        let a = Subspace::span(3, &[e(0), e(1)]);
        let b = Subspace::span(3, &[e(1), e(2)]);
        assert_eq!(a.intersect(&b), Subspace::span(3, &[e(1)]));
        assert_eq!(a.sum(&b), Subspace::full(3));
        assert_eq!(a.annihilator(), Subspace::span(3, &[e(2)]));
        assert_eq!(a.complement_in(&Subspace::span(3, &[e(1)])).len(), 1);
    }

    #[test]
    fn json_round_trip() {
        let a = Matrix::from_rows(vec![vec![qi(1), Q::new(1.into(), 2.into())], vec![qi(0), qi(-3)]]);
        let j = a.to_json();
        assert_eq!(j.entries[0][1], "1/2");
        assert_eq!(Matrix::from_json(&j).unwrap(), a);
    }
}
