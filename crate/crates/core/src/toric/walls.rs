use std::collections::BTreeMap;

use serde::Serialize;

use super::divisor::ToricDivisor;
use super::fan::Fan;
use crate::arith::lattice::{integer_kernel, primitive_on_ray, LatticeVector};
use crate::arith::lp;
use crate::arith::rational::{dot, Rational};
use crate::error::{Error, Result};

/// The torus-invariant curve of a wall `τ = σ ∩ σ'` of a complete simplicial fan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WallCurve {
    /// Ray indices spanning the wall.
    pub wall: Vec<usize>,
    /// The two maximal cones meeting along the wall.
    pub cones: [usize; 2],
    /// The rays of those cones not on the wall.
    pub opposite: [usize; 2],
    /// Integer relation among the `d+1` rays, positive on both opposite rays.
    pub relation: Vec<i64>,
    /// `D_ρ · C` for every ray `ρ`.
    pub intersections: Vec<Rational>,
}

impl WallCurve {
    pub fn dot(&self, d: &ToricDivisor) -> Rational {
        dot(d.coeffs(), &self.intersections)
    }

    /// The primitive integer vector on the ray of this curve's class.
    pub fn primitive_class(&self) -> LatticeVector {
        primitive_on_ray(&self.intersections).expect("wall classes are nonzero")
    }
}

pub fn wall_curves(f: &Fan) -> Result<Vec<WallCurve>> {
    f.require_complete_simplicial()?;
    let n = f.rays().len();
    let d = f.rank();
    let mut out = Vec::new();
    for (wall, cones) in f.walls()? {
        let [c0, c1] = [cones[0], cones[1]];
        let a = *f.cones()[c0].iter().find(|r| !wall.contains(r)).expect("cone has an opposite ray");
        let b = *f.cones()[c1].iter().find(|r| !wall.contains(r)).expect("cone has an opposite ray");
        let mut involved = wall.clone();
        involved.push(a);
        involved.push(b);
        let columns: Vec<Vec<i64>> = (0..d).map(|k| involved.iter().map(|&r| f.ray(r).0[k]).collect()).collect();
        let kernel = integer_kernel(&columns, involved.len())?;
        if kernel.len() != 1 {
            return Err(Error::Internal(format!("wall {wall:?} has a {}-dimensional relation space", kernel.len())));
        }
        let mut rel = kernel[0].clone();
        let (ia, ib) = (involved.len() - 2, involved.len() - 1);
        if rel[ia] < 0 {
            rel.iter_mut().for_each(|x| *x = -*x);
        }
        if rel[ia] <= 0 || rel[ib] <= 0 {
            return Err(Error::Internal(format!("wall {wall:?} relation is not positive on opposite rays")));
        }
        let mut relation = vec![0i64; n];
        for (k, &r) in involved.iter().enumerate() {
            relation[r] = rel[k];
        }
        // D_a · C = mult(wall) / mult(σ); the whole vector is proportional to the relation.
        let wall_mult = f_cone_mult(f, &wall);
        let sigma_mult = f_cone_mult(f, &f.cones()[c0]);
        let da = Rational::from_bigints(wall_mult, sigma_mult);
        let scale = &da / Rational::from(relation[a]);
        let intersections: Vec<Rational> = relation.iter().map(|&x| Rational::from(x) * &scale).collect();
        let check = Rational::from_bigints(f_cone_mult(f, &wall), f_cone_mult(f, &f.cones()[c1]));
        if intersections[b] != check {
            return Err(Error::Internal(format!("wall {wall:?}: inconsistent multiplicities")));
        }
        out.push(WallCurve { wall, cones: [c0, c1], opposite: [a, b], relation, intersections });
    }
    Ok(out)
}

fn f_cone_mult(f: &Fan, rays: &[usize]) -> num_bigint::BigInt {
    super::cone::Cone::new(f.rank(), rays.iter().map(|&r| f.ray(r).clone()).collect())
        .expect("faces of valid cones are valid")
        .multiplicity()
}

/// An extremal ray of the cone spanned by wall-curve classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MoriRay {
    /// Primitive integer vector on the ray, in `(D_ρ · C)_ρ` coordinates.
    pub direction: LatticeVector,
    /// The class of the representative wall curve.
    pub class: Vec<Rational>,
    /// Index (into `wall_curves`) of the smallest wall curve on the ray.
    pub representative: usize,
    /// Every wall curve whose class lies on the ray.
    pub walls: Vec<usize>,
}

impl MoriRay {
    pub fn dot(&self, d: &ToricDivisor) -> Rational {
        dot(d.coeffs(), &self.class)
    }
}

/// Groups wall curves by proportionality and keeps the groups that span extreme rays.
pub fn toric_mori_rays(f: &Fan) -> Result<Vec<MoriRay>> {
    let walls = wall_curves(f)?;
    mori_rays_from_walls(&walls)
}

pub fn mori_rays_from_walls(walls: &[WallCurve]) -> Result<Vec<MoriRay>> {
    let mut groups: BTreeMap<LatticeVector, Vec<usize>> = BTreeMap::new();
    for (i, w) in walls.iter().enumerate() {
        groups.entry(w.primitive_class()).or_default().push(i);
    }
    let directions: Vec<LatticeVector> = groups.keys().cloned().collect();
    let mut out = Vec::new();
    for (k, (dir, members)) in groups.into_iter().enumerate() {
        let others: Vec<Vec<Rational>> =
            directions.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, v)| v.to_rationals()).collect();
        if lp::in_cone(&others, &dir.to_rationals()) {
            continue;
        }
        let scale = |i: usize| {
            let w = &walls[i];
            let j = dir.0.iter().position(|&x| x != 0).expect("nonzero direction");
            &w.intersections[j] / Rational::from(dir.0[j])
        };
        let representative = *members.iter().min_by(|&&x, &&y| scale(x).cmp(&scale(y)).then(x.cmp(&y))).unwrap();
        out.push(MoriRay { direction: dir, class: walls[representative].intersections.clone(), representative, walls: members });
    }
    Ok(out)
}

/// `D · C ≥ 0` for every wall curve.
pub fn is_nef(f: &Fan, d: &ToricDivisor) -> Result<bool> {
    d.check_len(f)?;
    Ok(wall_curves(f)?.iter().all(|w| !w.dot(d).is_negative()))
}

pub fn is_ample(f: &Fan, d: &ToricDivisor) -> Result<bool> {
    d.check_len(f)?;
    Ok(wall_curves(f)?.iter().all(|w| w.dot(d).is_positive()))
}
