use serde::{Deserialize, Serialize};

use crate::arith::lattice::{integer_kernel, maximal_minor_gcd, rank_i64, LatticeVector};
use crate::arith::lp;
use crate::arith::matrix::RationalMatrix;
use crate::arith::polytope::{Inequality, RationalPolytope};
use crate::arith::rational::Rational;
use crate::error::{Error, Result};

/// A rational polyhedral cone given by primitive ray generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cone {
    rank: usize,
    rays: Vec<LatticeVector>,
}

/// Result of the terminal test: `certificate` is a non-ray lattice point with `m ≤ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TerminalReport {
    pub terminal: bool,
    pub certificate: Option<LatticeVector>,
    /// The value `m(certificate)`.
    pub level: Option<Rational>,
}

impl Cone {
    pub fn new(rank: usize, rays: Vec<LatticeVector>) -> Result<Self> {
        for r in &rays {
            if r.rank() != rank {
                return Err(Error::DimensionMismatch { expected: rank, found: r.rank() });
            }
            if r.is_zero() {
                return Err(Error::InvalidCone("zero ray".into()));
            }
            if !r.is_primitive() {
                return Err(Error::InvalidCone(format!("ray {r:?} is not primitive")));
            }
        }
        for (i, a) in rays.iter().enumerate() {
            for b in &rays[..i] {
                if rank_i64(&[a.0.clone(), b.0.clone()]) < 2 {
                    return Err(Error::InvalidCone(format!("rays {b:?} and {a:?} are proportional")));
                }
            }
        }
        let cone = Cone { rank, rays };
        if !cone.is_strongly_convex() {
            return Err(Error::InvalidCone("cone contains a line".into()));
        }
        Ok(cone)
    }

    pub fn from_i64(rays: &[&[i64]]) -> Result<Self> {
        let rank = rays.first().map_or(0, |r| r.len());
        Cone::new(rank, rays.iter().map(|r| LatticeVector(r.to_vec())).collect())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub(crate) fn rational_rays(&self) -> Vec<Vec<Rational>> {
        self.rays.iter().map(LatticeVector::to_rationals).collect()
    }

    fn ray_rows(&self) -> Vec<Vec<i64>> {
        self.rays.iter().map(|r| r.0.clone()).collect()
    }

    /// No nonzero non-negative combination of the rays vanishes.
    pub fn is_strongly_convex(&self) -> bool {
        if self.rays.is_empty() {
            return true;
        }
        // Σλ r = 0, Σλ = 1, λ ≥ 0 must be infeasible.
        let mut a: Vec<Vec<Rational>> =
            (0..self.rank).map(|i| self.rays.iter().map(|r| Rational::from(r.0[i])).collect()).collect();
        a.push(vec![Rational::one(); self.rays.len()]);
        let mut b = vec![Rational::zero(); self.rank];
        b.push(Rational::one());
        lp::feasible_point(&a, &b, self.rays.len()).is_none()
    }

    pub fn dim(&self) -> usize {
        rank_i64(&self.ray_rows())
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim() == self.rank
    }

    pub fn check_simplicial(&self) -> bool {
        self.dim() == self.rays.len()
    }

    /// Simplicial, and the rays extend to a basis of the lattice.
    pub fn check_regular(&self) -> bool {
        self.check_simplicial() && (self.rays.is_empty() || maximal_minor_gcd(&self.ray_rows()) == 1.into())
    }

    /// Index of the sublattice spanned by the rays inside the lattice points of their span.
    pub fn multiplicity(&self) -> num_bigint::BigInt {
        if self.rays.is_empty() {
            return 1.into();
        }
        maximal_minor_gcd(&self.ray_rows())
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        lp::in_cone(&self.rational_rays(), x)
    }

    /// Coordinates of `x` in the ray basis of a simplicial cone, if `x` lies in the span.
    pub fn ray_coordinates(&self, x: &[Rational]) -> Result<Option<Vec<Rational>>> {
        if !self.check_simplicial() {
            return Err(Error::NonSimplicial);
        }
        let k = self.rays.len();
        let cols: Vec<Vec<Rational>> = (0..self.rank)
            .map(|i| self.rays.iter().map(|r| Rational::from(r.0[i])).collect())
            .collect();
        let a = RationalMatrix::from_rows(cols)?;
        match crate::arith::matrix::solve_linear(&a, x)? {
            crate::arith::matrix::Solution::Unique(c) => Ok(Some(c)),
            crate::arith::matrix::Solution::NoSolution => Ok(None),
            crate::arith::matrix::Solution::Underdetermined { .. } if k == 0 => Ok(None),
            _ => Err(Error::Internal("simplicial rays are dependent".into())),
        }
    }

    /// `m(x) = Σ c_i` where `x = Σ c_i P_i`: the functional equal to 1 on every ray.
    pub fn height(&self, x: &[Rational]) -> Result<Option<Rational>> {
        Ok(self.ray_coordinates(x)?.map(|c| c.into_iter().sum()))
    }

    /// `{x ∈ span : c_i(x) ≥ 0, Σ c_i(x) ≤ h}` as a polytope in the ambient space.
    pub fn height_polytope(&self, h: &Rational) -> Result<RationalPolytope> {
        if !self.check_simplicial() {
            return Err(Error::NonSimplicial);
        }
        let d = self.rank;
        let r = RationalMatrix::from_rows(self.rational_rays())?; // k×d
        let gram = r.mul(&r.transpose());
        let left_inverse = gram.inverse()?.mul(&r); // k×d: c = L x on the span
        let mut ineqs = Vec::new();
        for i in 0..left_inverse.rows() {
            ineqs.push(Inequality::new(left_inverse.row(i).iter().map(|x| -x).collect(), Rational::zero()));
        }
        let total: Vec<Rational> =
            (0..d).map(|j| (0..left_inverse.rows()).map(|i| left_inverse.get(i, j)).sum()).collect();
        ineqs.push(Inequality::new(total, h.clone()));
        for n in integer_kernel(&self.ray_rows(), d)? {
            let n: Vec<Rational> = n.into_iter().map(Rational::from).collect();
            ineqs.push(Inequality::new(n.iter().map(|x| -x).collect(), Rational::zero()));
            ineqs.push(Inequality::new(n, Rational::zero()));
        }
        RationalPolytope::new(d, ineqs)
    }

    /// Lattice points `v ≠ 0` of the cone with `m(v) ≤ h`, excluding the rays, ordered by `(m, v)`.
    pub fn low_points(&self, h: &Rational) -> Result<Vec<(LatticeVector, Rational)>> {
        let poly = self.height_polytope(h)?;
        let mut out = Vec::new();
        for v in poly.lattice_points()? {
            if v.is_zero() || self.rays.contains(&v) {
                continue;
            }
            let m = self.height(&v.to_rationals())?.ok_or_else(|| Error::Internal("point off span".into()))?;
            out.push((v, m));
        }
        out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        Ok(out)
    }

    /// Terminal iff no lattice point other than 0 and the rays has `m ≤ 1`.
    pub fn check_terminal(&self) -> Result<TerminalReport> {
        let low = self.low_points(&Rational::one())?;
        Ok(match low.into_iter().next() {
            None => TerminalReport { terminal: true, certificate: None, level: None },
            Some((v, m)) => TerminalReport { terminal: false, certificate: Some(v), level: Some(m) },
        })
    }

    /// `d(v) = m(v) − 1` for primitive non-ray lattice points `v` with `m(v) ≤ height_bound`.
    pub fn toric_discrepancies(&self, height_bound: i64) -> Result<Vec<(LatticeVector, Rational)>> {
        let out: Vec<(LatticeVector, Rational)> = self
            .low_points(&Rational::from(height_bound))?
            .into_iter()
            .filter(|(v, _)| v.is_primitive())
            .map(|(v, m)| (v, m - Rational::one()))
            .collect();
        if let Some((v, d)) = out.iter().find(|(_, d)| *d <= -Rational::one()) {
            return Err(Error::Internal(format!("discrepancy {d} at {v:?} is not > -1")));
        }
        Ok(out)
    }

    /// Whether `r` is an extreme ray, i.e. not in the cone of the remaining generators.
    pub fn is_extreme(&self, i: usize) -> bool {
        let others: Vec<Vec<Rational>> =
            self.rays.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, r)| r.to_rationals()).collect();
        !lp::in_cone(&others, &self.rays[i].to_rationals())
    }

    /// The rays lying on a supporting hyperplane of every facet (full-dimensional cones).
    pub fn facets(&self) -> Result<Vec<Vec<usize>>> {
        let d = self.rank;
        if d == 0 {
            return Ok(Vec::new());
        }
        let mut facets: Vec<Vec<usize>> = Vec::new();
        for subset in crate::arith::lattice::combinations(self.rays.len(), d.saturating_sub(1)) {
            let rows: Vec<Vec<i64>> = subset.iter().map(|&i| self.rays[i].0.clone()).collect();
            if rank_i64(&rows) != d - 1 {
                continue;
            }
            let normal = integer_kernel(&rows, d)?;
            let n = LatticeVector(normal[0].clone());
            let signs: Vec<i64> = self.rays.iter().map(|r| r.dot(&n).signum()).collect();
            if signs.iter().all(|&s| s >= 0) || signs.iter().all(|&s| s <= 0) {
                let facet: Vec<usize> = (0..self.rays.len()).filter(|&i| signs[i] == 0).collect();
                if !facets.contains(&facet) {
                    facets.push(facet);
                }
            }
        }
        facets.sort();
        Ok(facets)
    }
}
