//! Dense rational matrices and exact linear solving.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::Rational;
use crate::error::{Error, Result};

/// Row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl std::fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.row_vecs()).finish()
    }
}

/// Outcome of [`solve_linear`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Rational>),
    NoSolution,
    /// Rank is below the number of unknowns. `particular` solves the system and
    /// every combination of `kernel` vectors may be added to it.
    Underdetermined {
        particular: Vec<Rational>,
        kernel: Vec<Vec<Rational>>,
    },
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from rows; every row must have the same length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { expected: cols, found: bad.len() });
        }
        let n = rows.len();
        Ok(RationalMatrix { rows: n, cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Rational::from(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| super::rational::dot(self.row(i), v)).collect()
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s = (0..self.cols).map(|k| self.get(i, k) * other.get(k, j)).sum();
                out.set(i, j, s);
            }
        }
        out
    }

    /// The bilinear form `xᵀ M y`.
    pub fn bilinear(&self, x: &[Rational], y: &[Rational]) -> Rational {
        super::rational::dot(x, &self.mul_vec(y))
    }

    /// Leading `k×k` principal submatrix.
    pub fn leading_minor_matrix(&self, k: usize) -> RationalMatrix {
        let rows = (0..k).map(|i| self.row(i)[..k].to_vec()).collect();
        RationalMatrix::from_rows(rows).expect("rectangular by construction")
    }

    pub fn determinant(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let mut a = self.row_vecs();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            let pivot = a[col][col].clone();
            det *= &pivot;
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let factor = &a[r][col] / &pivot;
                for c in col..n {
                    let delta = &factor * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
        Ok(det)
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut a = self.row_vecs();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(p, r);
            let inv = a[r][c].recip();
            for x in a[r].iter_mut() {
                *x *= &inv;
            }
            for i in 0..self.rows {
                if i != r && !a[i][c].is_zero() {
                    let factor = a[i][c].clone();
                    for j in 0..self.cols {
                        let delta = &factor * &a[r][j];
                        a[i][j] -= delta;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let m = RationalMatrix { rows: self.rows, cols: self.cols, data: a.into_iter().flatten().collect() };
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of the right kernel `{x : M x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(i, f);
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Result<RationalMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rational::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let rows = (0..n).map(|i| r.row(i)[n..].to_vec()).collect();
        RationalMatrix::from_rows(rows)
    }
}

/// Solves `A x = b` exactly, reporting inconsistency and rank deficiency.
pub fn solve_linear(a: &RationalMatrix, b: &[Rational]) -> Result<Solution> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: b.len() });
    }
    let n = a.cols();
    let mut aug = RationalMatrix::zeros(a.rows(), n + 1);
    for i in 0..a.rows() {
        for j in 0..n {
            aug.set(i, j, a.get(i, j).clone());
        }
        aug.set(i, n, b[i].clone());
    }
    let (r, pivots) = aug.rref();
    if pivots.last() == Some(&n) {
        return Ok(Solution::NoSolution);
    }
    let mut particular = vec![Rational::zero(); n];
    for (i, &p) in pivots.iter().enumerate() {
        particular[p] = r.get(i, n).clone();
    }
    if pivots.len() == n {
        Ok(Solution::Unique(particular))
    } else {
        Ok(Solution::Underdetermined { particular, kernel: a.kernel() })
    }
}

/// The unique solution of `A x = b`, or [`Error::Singular`] otherwise.
pub fn solve_unique(a: &RationalMatrix, b: &[Rational]) -> Result<Vec<Rational>> {
    match solve_linear(a, b)? {
        Solution::Unique(x) => Ok(x),
        _ => Err(Error::Singular),
    }
}

/// Sylvester's criterion applied to `−Q`: the leading minors of `Q` alternate
/// in sign starting negative.
pub fn is_negative_definite(q: &RationalMatrix) -> Result<bool> {
    if !q.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    for k in 1..=q.rows() {
        let minor = q.leading_minor_matrix(k).determinant()?;
        let expected_sign = if k % 2 == 1 { -1 } else { 1 };
        if minor.signum() != expected_sign {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Signature `(positive, negative, zero)` of a symmetric form, by congruence diagonalization.
pub fn inertia(q: &RationalMatrix) -> Result<(usize, usize, usize)> {
    if !q.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = q.rows();
    let mut a = q.row_vecs();
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        if a[i][i].is_zero() {
            if let Some(j) = (i + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(i, j);
                for row in a.iter_mut() {
                    row.swap(i, j);
                }
            } else if let Some(j) = (i + 1..n).find(|&j| !a[i][j].is_zero()) {
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[i][c] += v;
                }
                for row in a.iter_mut() {
                    let v = row[j].clone();
                    row[i] += v;
                }
            }
        }
        let pivot = a[i][i].clone();
        diag.push(pivot.signum());
        if pivot.is_zero() {
            continue;
        }
        for r in i + 1..n {
            if a[r][i].is_zero() {
                continue;
            }
            let f = &a[r][i] / &pivot;
            for c in 0..n {
                let v = &f * &a[i][c];
                a[r][c] -= v;
            }
            for row in a.iter_mut() {
                let v = &f * &row[i];
                row[r] -= v;
            }
        }
    }
    let pos = diag.iter().filter(|&&s| s > 0).count();
    let neg = diag.iter().filter(|&&s| s < 0).count();
    Ok((pos, neg, n - pos - neg))
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.row_vecs().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Rational>>::deserialize(deserializer)?;
        RationalMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}
