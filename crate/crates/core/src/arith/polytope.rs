//! Rational polytopes in H-representation with a lazily computed vertex list.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::lattice::{combinations, LatticeVector};
use super::lp;
use super::matrix::{solve_linear, RationalMatrix, Solution};
use super::rational::{common_denominator, dot, Rational};
use crate::error::{Error, Result};

/// The half-space `normal · x ≤ bound`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Inequality {
    pub normal: Vec<Rational>,
    pub bound: Rational,
}

impl Inequality {
    pub fn new(normal: Vec<Rational>, bound: Rational) -> Self {
        Inequality { normal, bound }
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        dot(&self.normal, x) <= self.bound
    }

    pub fn is_tight(&self, x: &[Rational]) -> bool {
        dot(&self.normal, x) == self.bound
    }
}

#[derive(Debug, Clone, Default)]
pub struct RationalPolytope {
    dim: usize,
    inequalities: Vec<Inequality>,
    vertices: OnceLock<Option<Vec<Vec<Rational>>>>,
}

impl PartialEq for RationalPolytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.inequalities == other.inequalities
    }
}

impl Eq for RationalPolytope {}

impl RationalPolytope {
    pub fn new(dim: usize, inequalities: Vec<Inequality>) -> Result<Self> {
        if let Some(bad) = inequalities.iter().find(|h| h.normal.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: bad.normal.len() });
        }
        Ok(RationalPolytope { dim, inequalities, vertices: OnceLock::new() })
    }

    /// The box `lo ≤ x_i ≤ hi` in every coordinate.
    pub fn cube(dim: usize, lo: Rational, hi: Rational) -> Self {
        let mut ineqs = Vec::new();
        for i in 0..dim {
            let mut e = vec![Rational::zero(); dim];
            e[i] = Rational::one();
            ineqs.push(Inequality::new(e.iter().map(|x| -x).collect(), -lo.clone()));
            ineqs.push(Inequality::new(e, hi.clone()));
        }
        RationalPolytope::new(dim, ineqs).expect("consistent dimensions")
    }

    pub fn dim_ambient(&self) -> usize {
        self.dim
    }

    pub fn inequalities(&self) -> &[Inequality] {
        &self.inequalities
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.inequalities.iter().all(|h| h.holds(x))
    }

    pub fn contains_lattice(&self, v: &[i64]) -> bool {
        let x: Vec<Rational> = v.iter().map(|&c| Rational::from(c)).collect();
        self.contains(&x)
    }

    /// A feasible point, found by LP on `x = x⁺ − x⁻` with slacks.
    pub fn interior_witness(&self) -> Option<Vec<Rational>> {
        let d = self.dim;
        let m = self.inequalities.len();
        if m == 0 {
            return Some(vec![Rational::zero(); d]);
        }
        let a: Vec<Vec<Rational>> = self
            .inequalities
            .iter()
            .enumerate()
            .map(|(i, h)| {
                let mut row: Vec<Rational> = h.normal.clone();
                row.extend(h.normal.iter().map(|x| -x));
                row.extend((0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                row
            })
            .collect();
        let b: Vec<Rational> = self.inequalities.iter().map(|h| h.bound.clone()).collect();
        let sol = lp::feasible_point(&a, &b, 2 * d + m)?;
        Some((0..d).map(|i| &sol[i] - &sol[d + i]).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.interior_witness().is_none()
    }

    /// Bounded iff empty or the outer normals positively span the ambient space.
    pub fn is_bounded(&self) -> bool {
        if self.dim == 0 {
            return true;
        }
        let normals: Vec<Vec<Rational>> = self.inequalities.iter().map(|h| h.normal.clone()).collect();
        lp::positively_spans(&normals, self.dim) || self.is_empty()
    }

    /// Vertices in lexicographic order; an empty polytope has none.
    pub fn vertices(&self) -> Result<&[Vec<Rational>]> {
        self.vertices
            .get_or_init(|| self.compute_vertices())
            .as_deref()
            .ok_or(Error::Unbounded)
    }

    fn compute_vertices(&self) -> Option<Vec<Vec<Rational>>> {
        if !self.is_bounded() {
            return None;
        }
        let d = self.dim;
        if d == 0 {
            let feasible = self.inequalities.iter().all(|h| !h.bound.is_negative());
            return Some(if feasible { vec![Vec::new()] } else { Vec::new() });
        }
        let mut out: Vec<Vec<Rational>> = Vec::new();
        for subset in combinations(self.inequalities.len(), d) {
            let rows: Vec<Vec<Rational>> = subset.iter().map(|&i| self.inequalities[i].normal.clone()).collect();
            let b: Vec<Rational> = subset.iter().map(|&i| self.inequalities[i].bound.clone()).collect();
            let a = RationalMatrix::from_rows(rows).expect("rectangular");
            if let Ok(Solution::Unique(x)) = solve_linear(&a, &b) {
                if self.contains(&x) {
                    out.push(x);
                }
            }
        }
        out.sort();
        out.dedup();
        Some(out)
    }

    /// Dimension of the affine hull, `None` when empty.
    pub fn dimension(&self) -> Result<Option<usize>> {
        let verts = self.vertices()?;
        let Some(first) = verts.first() else { return Ok(None) };
        if verts.len() == 1 {
            return Ok(Some(0));
        }
        let diffs: Vec<Vec<Rational>> =
            verts[1..].iter().map(|v| v.iter().zip(first).map(|(a, b)| a - b).collect()).collect();
        Ok(Some(RationalMatrix::from_rows(diffs).expect("rectangular").rank()))
    }

    /// Integer points in lexicographic order, by scanning the vertex bounding box.
    pub fn lattice_points(&self) -> Result<Vec<LatticeVector>> {
        let mut out = Vec::new();
        self.scan_lattice(|v| out.push(LatticeVector(v.to_vec())))?;
        Ok(out)
    }

    pub fn count_lattice_points(&self) -> Result<u64> {
        let mut n = 0u64;
        self.scan_lattice(|_| n += 1)?;
        Ok(n)
    }

    /// Inequalities cleared of denominators.
    fn integer_rows(&self) -> Result<Vec<(Vec<i128>, i128)>> {
        let overflow = || Error::Internal("inequality coefficients exceed i128".into());
        self.inequalities
            .iter()
            .map(|h| {
                let den = Rational::from(common_denominator(h.normal.iter().chain(std::iter::once(&h.bound))));
                let scale = |x: &Rational| (x * &den).numer().to_i128().ok_or_else(overflow);
                Ok((h.normal.iter().map(scale).collect::<Result<Vec<i128>>>()?, scale(&h.bound)?))
            })
            .collect()
    }

    fn scan_lattice(&self, mut visit: impl FnMut(&[i64])) -> Result<()> {
        let verts = self.vertices()?;
        if verts.is_empty() {
            return Ok(());
        }
        let d = self.dim;
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        for i in 0..d {
            let min = verts.iter().map(|v| &v[i]).min().unwrap();
            let max = verts.iter().map(|v| &v[i]).max().unwrap();
            lo.push(to_i64(min.ceil())?);
            hi.push(to_i64(max.floor())?);
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Ok(());
        }
        let rows = self.integer_rows()?;
        let mut cur = lo.clone();
        loop {
            if rows.iter().all(|(a, b)| a.iter().zip(&cur).map(|(x, &y)| x * y as i128).sum::<i128>() <= *b) {
                visit(&cur);
            }
            // odometer, last coordinate fastest
            let mut i = d;
            loop {
                if i == 0 {
                    return Ok(());
                }
                i -= 1;
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    for j in i + 1..d {
                        cur[j] = lo[j];
                    }
                    break;
                }
            }
        }
    }

    /// Whether `other` has the same point set (checked on vertices, both bounded).
    pub fn same_set(&self, other: &RationalPolytope) -> Result<bool> {
        Ok(self.vertices()? == other.vertices()?)
    }
}

fn to_i64(x: BigInt) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::Internal("bounding box exceeds i64".into()))
}

#[derive(Serialize)]
struct PolytopeJson<'a> {
    dim: usize,
    inequalities: &'a [Inequality],
    #[serde(skip_serializing_if = "Option::is_none")]
    vertices: Option<&'a [Vec<Rational>]>,
}

impl Serialize for RationalPolytope {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PolytopeJson { dim: self.dim, inequalities: &self.inequalities, vertices: self.vertices().ok() }
            .serialize(serializer)
    }
}

#[derive(Deserialize)]
struct PolytopeInput {
    dim: usize,
    inequalities: Vec<Inequality>,
}

impl<'de> Deserialize<'de> for RationalPolytope {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let p = PolytopeInput::deserialize(deserializer)?;
        RationalPolytope::new(p.dim, p.inequalities).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::q;

    fn ineq(a: &[i64], b: i64) -> Inequality {
        Inequality::new(a.iter().map(|&x| Rational::from(x)).collect(), Rational::from(b))
    }

    fn simplex(scale: i64) -> RationalPolytope {
        RationalPolytope::new(2, vec![ineq(&[-1, 0], 0), ineq(&[0, -1], 0), ineq(&[1, 1], scale)]).unwrap()
    }

    #[test]
    fn simplex_points() {
        assert_eq!(simplex(1).lattice_points().unwrap().len(), 3);
        assert_eq!(simplex(2).lattice_points().unwrap().len(), 6);
        assert_eq!(simplex(1).dimension().unwrap(), Some(2));
    }

    #[test]
    fn empty_interval() {
        let p = RationalPolytope::new(1, vec![ineq(&[-1], -1), ineq(&[1], 0)]).unwrap();
        assert!(p.is_empty());
        assert!(p.lattice_points().unwrap().is_empty());
        assert_eq!(p.dimension().unwrap(), None);
    }

    #[test]
    fn unbounded_rejected() {
        let p = RationalPolytope::new(2, vec![ineq(&[-1, 0], 0), ineq(&[0, -1], 0)]).unwrap();
        assert!(!p.is_bounded());
        assert_eq!(p.lattice_points(), Err(Error::Unbounded));
    }

    #[test]
    fn rational_vertices_and_degenerate_dimension() {
        let p = RationalPolytope::new(1, vec![ineq(&[-1], 0), Inequality::new(vec![q(6, 1)], q(5, 1))]).unwrap();
        assert_eq!(p.vertices().unwrap(), &[vec![q(0, 1)], vec![q(5, 6)]]);
        // a segment in the plane
        let seg = RationalPolytope::new(
            2,
            vec![ineq(&[0, 1], 0), ineq(&[0, -1], 0), ineq(&[1, 0], 3), ineq(&[-1, 0], 0)],
        )
        .unwrap();
        assert_eq!(seg.dimension().unwrap(), Some(1));
        assert_eq!(seg.lattice_points().unwrap().len(), 4);
    }

    #[test]
    fn serde_round_trip() {
        let p = simplex(2);
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"vertices\""));
        let back: RationalPolytope = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
