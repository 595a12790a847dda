use serde::Serialize;

use super::cone::Cone;
use super::fan::Fan;
use crate::arith::lattice::LatticeVector;
use crate::arith::polytope::{Inequality, RationalPolytope};
use crate::arith::rational::Rational;
use crate::arith::matrix::RationalMatrix;
use crate::error::{Error, Result};

/// Exceptional chain of the minimal resolution of a 2-dimensional cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceResolution {
    /// New rays, ordered from the first boundary ray towards the second.
    pub rays: Vec<LatticeVector>,
    /// `E_i² = −b_i`, read off from `v_{i−1} + v_{i+1} = b_i v_i`.
    pub self_intersections: Vec<i64>,
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.signum() * a, a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

fn det2(u: &[i64], w: &[i64]) -> i64 {
    u[0] * w[1] - u[1] * w[0]
}

/// Hirzebruch–Jung: walk from `r1` to `r2`, each step taking the lattice point `w` with
/// `det(v, w) = 1` in the cone that is closest to `r2`.
pub fn minimal_resolution_2d(c: &Cone) -> Result<SurfaceResolution> {
    if c.rank() != 2 || c.rays().len() != 2 || !c.is_full_dimensional() {
        return Err(Error::Unsupported("minimal resolution needs a full 2-dimensional cone".into()));
    }
    let (mut r1, mut r2) = (c.rays()[0].0.clone(), c.rays()[1].0.clone());
    if det2(&r1, &r2) < 0 {
        std::mem::swap(&mut r1, &mut r2);
    }
    let mut chain = vec![r1.clone()];
    let mut v = r1;
    while det2(&v, &r2) > 1 {
        // solve det(v, w0) = v0 w1 − v1 w0 = 1
        let (g, s, t) = ext_gcd(v[0], v[1]);
        debug_assert_eq!(g, 1);
        let w0 = [-t, s];
        // w = w0 + k v with det(w, r2) ≥ 0, minimal k
        let num = -det2(&w0, &r2);
        let den = det2(&v, &r2);
        let k = num.div_euclid(den) + i64::from(num.rem_euclid(den) != 0);
        let w = vec![w0[0] + k * v[0], w0[1] + k * v[1]];
        chain.push(w.clone());
        v = w;
    }
    chain.push(r2);
    let mut self_intersections = Vec::new();
    for i in 1..chain.len() - 1 {
        let s0 = chain[i - 1][0] + chain[i + 1][0];
        let s1 = chain[i - 1][1] + chain[i + 1][1];
        let b = if chain[i][0] != 0 { s0 / chain[i][0] } else { s1 / chain[i][1] };
        if s0 != b * chain[i][0] || s1 != b * chain[i][1] {
            return Err(Error::Internal("Hirzebruch-Jung chain is not a relation".into()));
        }
        self_intersections.push(-b);
    }
    let rays = chain[1..chain.len() - 1].iter().cloned().map(LatticeVector).collect();
    Ok(SurfaceResolution { rays, self_intersections })
}

/// Nonzero lattice points `Σ c_i r_i` with `0 ≤ c_i < 1` of a full-dimensional simplicial cone,
/// ordered by `(Σ c_i, point)`.
pub fn parallelepiped_points(c: &Cone) -> Result<Vec<LatticeVector>> {
    if !c.check_simplicial() || !c.is_full_dimensional() {
        return Err(Error::NonSimplicial);
    }
    let d = c.rank();
    let r = RationalMatrix::from_rows(c.rational_rays())?;
    let inv = r.transpose().inverse()?; // coordinates c = (Rᵀ)⁻¹ x
    let mut ineqs = Vec::new();
    for i in 0..d {
        ineqs.push(Inequality::new(inv.row(i).iter().map(|x| -x).collect(), Rational::zero()));
        ineqs.push(Inequality::new(inv.row(i).to_vec(), Rational::one()));
    }
    let box_ = RationalPolytope::new(d, ineqs)?;
    let mut pts: Vec<(Rational, LatticeVector)> = Vec::new();
    for v in box_.lattice_points()? {
        let coords = inv.mul_vec(&v.to_rationals());
        if v.is_zero() || coords.iter().any(|x| *x == Rational::one()) {
            continue;
        }
        pts.push((coords.into_iter().sum(), v));
    }
    pts.sort();
    Ok(pts.into_iter().map(|(_, v)| v).collect())
}

/// A regular refinement by star subdivisions: Hirzebruch–Jung chains in rank 2 (the minimal
/// resolution), lowest-height parallelepiped points otherwise.
pub fn resolve_fan(f: &Fan) -> Result<Fan> {
    if !f.is_simplicial() {
        return Err(Error::NonSimplicial);
    }
    let mut cur = f.clone();
    if f.rank() == 2 {
        for ci in 0..f.cones().len() {
            let cone = f.cone(ci);
            if cone.is_full_dimensional() && !cone.check_regular() {
                for v in minimal_resolution_2d(&cone)?.rays {
                    cur = cur.star_subdivision(&v)?;
                }
            }
        }
        return Ok(cur);
    }
    for _ in 0..10_000 {
        let Some(ci) = (0..cur.cones().len()).find(|&i| !cur.cone(i).check_regular()) else {
            return Ok(cur);
        };
        let cone = cur.cone(ci);
        let v = parallelepiped_points(&cone)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Internal("singular cone with empty parallelepiped".into()))?;
        cur = cur.star_subdivision(&v)?;
    }
    Err(Error::Internal("resolution did not terminate".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_n_chains() {
        for n in 1..6i64 {
            let c = Cone::from_i64(&[&[1, 0], &[-n, n + 1]]).unwrap();
            let r = minimal_resolution_2d(&c).unwrap();
            assert_eq!(r.self_intersections, vec![-2; n as usize], "A_{n}");
        }
    }

    #[test]
    fn single_curve_cones() {
        for a in 2..7i64 {
            let c = Cone::from_i64(&[&[1, 0], &[-1, a]]).unwrap();
            let r = minimal_resolution_2d(&c).unwrap();
            assert_eq!(r.rays, vec![LatticeVector(vec![0, 1])]);
            assert_eq!(r.self_intersections, vec![-a]);
        }
    }

    #[test]
    fn one_over_five_two_three() {
        // 1/5(1,2): 5/2 = [3, 2]
        let c = Cone::from_i64(&[&[1, 0], &[-2, 5]]).unwrap();
        let r = minimal_resolution_2d(&c).unwrap();
        assert_eq!(r.self_intersections, vec![-3, -2]);
    }

    #[test]
    fn resolves_weighted_projective_space() {
        let f = Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -3]], &[&[0, 1], &[1, 2], &[0, 2]]).unwrap();
        let g = resolve_fan(&f).unwrap();
        assert!(g.is_regular());
        assert!(g.is_complete());
        let h = Fan::from_i64(
            3,
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -2]],
            &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]],
        )
        .unwrap();
        let g = resolve_fan(&h).unwrap();
        assert!(g.is_regular() && g.is_complete());
    }

    #[test]
    fn parallelepiped_of_a1() {
        let c = Cone::from_i64(&[&[1, 0], &[-1, 2]]).unwrap();
        assert_eq!(parallelepiped_points(&c).unwrap(), vec![LatticeVector(vec![0, 1])]);
    }
}
