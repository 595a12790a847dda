//! Integer vectors and lattice algorithms (Hermite normal form, integer kernels).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::rational::Rational;
use crate::error::{Error, Result};

/// A point of `Z^d`. The ambient rank is the coordinate count.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(pub Vec<i64>);

impl std::fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        LatticeVector(v)
    }
}

impl LatticeVector {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticeVector(coords)
    }

    pub fn zero(rank: usize) -> Self {
        LatticeVector(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// gcd of the coordinates (0 for the zero vector).
    pub fn content(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &x| g.gcd(&x))
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    pub fn dot(&self, other: &LatticeVector) -> i64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn neg(&self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|x| -x).collect())
    }

    pub fn to_rationals(&self) -> Vec<Rational> {
        self.0.iter().map(|&x| Rational::from(x)).collect()
    }
}

/// Divides `v` by the gcd of its coordinates.
pub fn primitivize(v: &LatticeVector) -> Result<LatticeVector> {
    let g = v.content();
    if g == 0 {
        return Err(Error::ZeroVector);
    }
    Ok(LatticeVector(v.0.iter().map(|x| x / g).collect()))
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub fn primitive_on_ray(v: &[Rational]) -> Result<LatticeVector> {
    let den = super::rational::common_denominator(v);
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    let coords = ints
        .iter()
        .map(|x| (x / &g).to_i64().ok_or_else(|| Error::Internal("coordinate overflow".into())))
        .collect::<Result<Vec<_>>>()?;
    Ok(LatticeVector(coords))
}

pub(crate) fn to_big(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub(crate) fn from_big(rows: &[Vec<BigInt>]) -> Result<Vec<Vec<i64>>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|x| x.to_i64().ok_or_else(|| Error::Internal("lattice entry overflow".into())))
                .collect()
        })
        .collect()
}

/// Row-style Hermite normal form with the unimodular transform `U` (`U·A = H`).
///
/// Pivots are positive, entries above a pivot lie in `[0, pivot)`, and zero rows
/// are moved to the bottom.
pub fn hnf_with_transform(a: &[Vec<BigInt>], cols: usize) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let m = a.len();
    let mut h: Vec<Vec<BigInt>> = a.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut r = 0;
    for c in 0..cols {
        if r == m {
            break;
        }
        // Euclid on column c among rows r..m until only row r is nonzero.
        loop {
            let nz: Vec<usize> = (r..m).filter(|&i| !h[i][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| h[i][c].abs()).unwrap();
            h.swap(r, p);
            u.swap(r, p);
            let mut done = true;
            for i in r + 1..m {
                if h[i][c].is_zero() {
                    continue;
                }
                let qt = h[i][c].div_floor(&h[r][c]);
                sub_row_multiple(&mut h, i, r, &qt);
                sub_row_multiple(&mut u, i, r, &qt);
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            negate_row(&mut h, r);
            negate_row(&mut u, r);
        }
        for i in 0..r {
            let qt = h[i][c].div_floor(&h[r][c]);
            if !qt.is_zero() {
                sub_row_multiple(&mut h, i, r, &qt);
                sub_row_multiple(&mut u, i, r, &qt);
            }
        }
        r += 1;
    }
    (h, u)
}

fn sub_row_multiple(rows: &mut [Vec<BigInt>], target: usize, source: usize, factor: &BigInt) {
    let src = rows[source].clone();
    for (t, s) in rows[target].iter_mut().zip(src) {
        *t -= factor * s;
    }
}

fn negate_row(rows: &mut [Vec<BigInt>], i: usize) {
    for x in rows[i].iter_mut() {
        *x = -&*x;
    }
}

/// Nonzero rows of the Hermite normal form of the row lattice of `rows`.
pub fn hnf(rows: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let cols = rows.first().map_or(0, Vec::len);
    let (h, _) = hnf_with_transform(&to_big(rows), cols);
    let nonzero: Vec<Vec<BigInt>> = h.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    from_big(&nonzero)
}

/// A Z-basis (in Hermite normal form) of `{x ∈ Z^n : A x = 0}` for `A` with `n` columns.
pub fn integer_kernel(a: &[Vec<i64>], n: usize) -> Result<Vec<Vec<i64>>> {
    if let Some(bad) = a.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
    }
    // Rows of U with zero image under U·Aᵀ span the kernel.
    let at: Vec<Vec<BigInt>> = (0..n).map(|j| a.iter().map(|r| BigInt::from(r[j])).collect()).collect();
    let (h, u) = hnf_with_transform(&at, a.len());
    let basis: Vec<Vec<BigInt>> = h
        .iter()
        .zip(u)
        .filter(|(hr, _)| hr.iter().all(Zero::is_zero))
        .map(|(_, ur)| ur)
        .collect();
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    hnf(&from_big(&basis)?)
}

/// Determinant of a square integer matrix by Bareiss elimination.
pub fn det_bigint(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn det_i64(m: &[Vec<i64>]) -> BigInt {
    det_bigint(&to_big(m))
}

/// gcd of all maximal (`r×r`) minors of an `r×n` integer matrix with `r ≤ n`.
///
/// Equals 1 exactly when the rows extend to a basis of `Z^n`.
pub fn maximal_minor_gcd(rows: &[Vec<i64>]) -> BigInt {
    let r = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let mut g = BigInt::zero();
    for cols in combinations(n, r) {
        let sub: Vec<Vec<i64>> = rows.iter().map(|row| cols.iter().map(|&c| row[c]).collect()).collect();
        g = g.gcd(&det_i64(&sub));
        if g.is_one() {
            break;
        }
    }
    g
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Rank of an integer matrix over Q.
pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
    hnf(rows).map(|h| h.len()).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitivize_examples() {
        let p = |v: Vec<i64>| primitivize(&LatticeVector(v)).unwrap().0;
        assert_eq!(p(vec![2, 4]), vec![1, 2]);
        assert_eq!(p(vec![1, 0]), vec![1, 0]);
        assert_eq!(p(vec![-3, 6, 9]), vec![-1, 2, 3]);
        assert_eq!(primitivize(&LatticeVector(vec![0, 0])), Err(Error::ZeroVector));
    }

    #[test]
    fn hnf_of_simple_lattice() {
        let h = hnf(&[vec![2, 1], vec![0, 3], vec![4, 2]]).unwrap();
        assert_eq!(h, vec![vec![2, 1], vec![0, 3]]);
        let h = hnf(&[vec![-1, 2], vec![1, 0]]).unwrap();
        assert_eq!(h, vec![vec![1, 0], vec![0, 2]]);
    }

    #[test]
    fn kernel_is_saturated() {
        // rays of F1 in rank 2: relations (1,0)+(-1,1)-(0,1)... kernel of the 2×4 ray matrix
        let a = vec![vec![1, 0, -1, 0], vec![0, 1, 1, -1]];
        let k = integer_kernel(&a, 4).unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(v[0] - v[2], 0);
            assert_eq!(v[1] + v[2] - v[3], 0);
        }
        assert_eq!(maximal_minor_gcd(&k), BigInt::one());
        let k = integer_kernel(&[vec![2, 4]], 2).unwrap();
        assert_eq!(k, vec![vec![2, -1]]);
    }

    #[test]
    fn determinants_and_minors() {
        assert_eq!(det_i64(&[vec![1, 0], vec![1, 2]]), BigInt::from(2));
        assert_eq!(det_i64(&[vec![0, 1], vec![1, 0]]), BigInt::from(-1));
        assert_eq!(det_i64(&[vec![2, 0, 1], vec![1, 3, 2], vec![1, 1, 1]]), BigInt::from(0));
        assert_eq!(maximal_minor_gcd(&[vec![1, 0, 0], vec![0, 2, 3]]), BigInt::one());
        assert_eq!(maximal_minor_gcd(&[vec![2, 4, 6]]), BigInt::from(2));
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn primitive_on_rational_ray() {
        let v = [Rational::new(1, 2), Rational::new(-3, 4)];
        assert_eq!(primitive_on_ray(&v).unwrap().0, vec![2, -3]);
    }
}
