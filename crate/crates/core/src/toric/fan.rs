use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::cone::Cone;
use crate::arith::lattice::LatticeVector;
use crate::arith::lp;
use crate::arith::rational::Rational;
use crate::error::{Error, Result};

/// Ambient ranks above this are rejected.
pub const MAX_RANK: usize = 4;

/// A fan given by its maximal cones, each a sorted list of ray indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Fan {
    rank: usize,
    rays: Vec<LatticeVector>,
    #[serde(rename = "max_cones")]
    cones: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FanJson {
    rank: usize,
    rays: Vec<LatticeVector>,
    max_cones: Vec<Vec<usize>>,
}

impl<'de> Deserialize<'de> for Fan {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let j = FanJson::deserialize(deserializer)?;
        Fan::new(j.rank, j.rays, j.max_cones).map_err(serde::de::Error::custom)
    }
}

impl Fan {
    /// Validates rays, cones, and the common-face condition between every pair of cones.
    pub fn new(rank: usize, rays: Vec<LatticeVector>, cones: Vec<Vec<usize>>) -> Result<Self> {
        let fan = Fan::new_unchecked(rank, rays, cones)?;
        fan.check_common_faces()?;
        Ok(fan)
    }

    /// Checks each cone on its own but skips the pairwise intersection test.
    pub(crate) fn new_unchecked(rank: usize, rays: Vec<LatticeVector>, cones: Vec<Vec<usize>>) -> Result<Self> {
        if rank > MAX_RANK {
            return Err(Error::InvalidFan(format!("rank {rank} exceeds the supported maximum {MAX_RANK}")));
        }
        for (i, r) in rays.iter().enumerate() {
            if r.rank() != rank {
                return Err(Error::DimensionMismatch { expected: rank, found: r.rank() });
            }
            if !r.is_primitive() {
                return Err(Error::InvalidFan(format!("ray {i} = {r:?} is not primitive")));
            }
            if rays[..i].contains(r) {
                return Err(Error::InvalidFan(format!("ray {i} = {r:?} is repeated")));
            }
        }
        if cones.is_empty() {
            return Err(Error::InvalidFan("no maximal cones".into()));
        }
        let mut sorted = Vec::with_capacity(cones.len());
        for c in cones {
            let mut c = c;
            c.sort_unstable();
            c.dedup();
            if let Some(&bad) = c.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::InvalidFan(format!("cone refers to missing ray {bad}")));
            }
            Cone::new(rank, c.iter().map(|&i| rays[i].clone()).collect())
                .map_err(|e| Error::InvalidFan(format!("cone {c:?}: {e}")))?;
            if sorted.contains(&c) {
                return Err(Error::InvalidFan(format!("cone {c:?} is repeated")));
            }
            sorted.push(c);
        }
        if let Some(unused) = (0..rays.len()).find(|i| !sorted.iter().any(|c| c.contains(i))) {
            return Err(Error::InvalidFan(format!("ray {unused} lies in no cone")));
        }
        Ok(Fan { rank, rays, cones: sorted })
    }

    pub fn from_i64(rank: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Result<Self> {
        Fan::new(
            rank,
            rays.iter().map(|r| LatticeVector(r.to_vec())).collect(),
            cones.iter().map(|c| c.to_vec()).collect(),
        )
    }

    /// Two cones meet in the cone on their shared rays.
    fn check_common_faces(&self) -> Result<()> {
        for i in 0..self.cones.len() {
            for j in 0..i {
                if !self.meet_in_common_face(i, j) {
                    return Err(Error::InvalidFan(format!(
                        "cones {:?} and {:?} do not meet in a common face",
                        self.cones[j], self.cones[i]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Infeasibility of `Σλσ − Σμτ = 0`, `λ, μ ≥ 0`, with unit total weight off the shared rays.
    fn meet_in_common_face(&self, i: usize, j: usize) -> bool {
        let (s, t) = (&self.cones[i], &self.cones[j]);
        let n = s.len() + t.len();
        let mut a: Vec<Vec<Rational>> = (0..self.rank)
            .map(|k| {
                s.iter()
                    .map(|&r| Rational::from(self.rays[r].0[k]))
                    .chain(t.iter().map(|&r| -Rational::from(self.rays[r].0[k])))
                    .collect()
            })
            .collect();
        let off_shared: Vec<Rational> = s
            .iter()
            .chain(t.iter())
            .map(|r| if s.contains(r) && t.contains(r) { Rational::zero() } else { Rational::one() })
            .collect();
        if off_shared.iter().all(Rational::is_zero) {
            return true;
        }
        a.push(off_shared);
        let mut b = vec![Rational::zero(); self.rank];
        b.push(Rational::one());
        lp::feasible_point(&a, &b, n).is_none()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &LatticeVector {
        &self.rays[i]
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn cone(&self, i: usize) -> Cone {
        Cone::new(self.rank, self.cones[i].iter().map(|&r| self.rays[r].clone()).collect())
            .expect("validated on construction")
    }

    pub fn is_simplicial(&self) -> bool {
        (0..self.cones.len()).all(|i| self.cone(i).check_simplicial())
    }

    pub fn is_regular(&self) -> bool {
        (0..self.cones.len()).all(|i| self.cone(i).check_regular())
    }

    /// Facets of the maximal cones (as global ray sets) with the cones containing them.
    pub fn walls(&self) -> Result<BTreeMap<Vec<usize>, Vec<usize>>> {
        let mut walls: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (ci, c) in self.cones.iter().enumerate() {
            for facet in self.cone(ci).facets()? {
                let global: Vec<usize> = facet.iter().map(|&k| c[k]).collect();
                walls.entry(global).or_default().push(ci);
            }
        }
        Ok(walls)
    }

    /// Every maximal cone is full-dimensional and every wall lies in exactly two of them.
    pub fn is_complete(&self) -> bool {
        if self.rank == 0 {
            return true;
        }
        if !(0..self.cones.len()).all(|i| self.cone(i).is_full_dimensional()) {
            return false;
        }
        self.walls().map(|w| w.values().all(|cs| cs.len() == 2)).unwrap_or(false)
    }

    pub fn require_complete_simplicial(&self) -> Result<()> {
        if !self.is_simplicial() {
            return Err(Error::NonSimplicial);
        }
        if !self.is_complete() {
            return Err(Error::NotComplete);
        }
        Ok(())
    }

    /// `#rays − rank`, the Picard number of a complete simplicial fan.
    pub fn picard_number(&self) -> i64 {
        self.rays.len() as i64 - self.rank as i64
    }

    /// Indices of the maximal cones containing `v`.
    pub fn cones_containing(&self, v: &[Rational]) -> Vec<usize> {
        (0..self.cones.len()).filter(|&i| self.cone(i).contains(v)).collect()
    }

    /// Replaces each cone containing `v` by the joins of `v` with its faces missing `v`.
    pub fn star_subdivision(&self, v: &LatticeVector) -> Result<Fan> {
        if v.rank() != self.rank {
            return Err(Error::DimensionMismatch { expected: self.rank, found: v.rank() });
        }
        let v = crate::arith::lattice::primitivize(v)?;
        if self.rays.contains(&v) {
            return Ok(self.clone());
        }
        let vq = v.to_rationals();
        let containing = self.cones_containing(&vq);
        if containing.is_empty() {
            return Err(Error::NotInSupport(v.0.clone()));
        }
        let new_index = self.rays.len();
        let mut rays = self.rays.clone();
        rays.push(v.clone());
        let mut cones = Vec::new();
        for (ci, c) in self.cones.iter().enumerate() {
            if !containing.contains(&ci) {
                cones.push(c.clone());
                continue;
            }
            let coords = self.cone(ci).ray_coordinates(&vq)?.ok_or(Error::Internal("point off span".into()))?;
            for (j, cj) in coords.iter().enumerate() {
                if cj.is_positive() {
                    let mut nc: Vec<usize> = c.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &r)| r).collect();
                    nc.push(new_index);
                    cones.push(nc);
                }
            }
        }
        Fan::new(self.rank, rays, cones)
    }

    pub fn canonical(&self) -> super::divisor::ToricDivisor {
        super::divisor::ToricDivisor::canonical(self)
    }

    /// Drops ray `i` (no cone may still use it) and renumbers the rest.
    pub(crate) fn without_ray(rays: &[LatticeVector], cones: &[Vec<usize>], removed: &[usize]) -> (Vec<LatticeVector>, Vec<Vec<usize>>) {
        let keep: Vec<usize> = (0..rays.len()).filter(|i| !removed.contains(i)).collect();
        let new_rays = keep.iter().map(|&i| rays[i].clone()).collect();
        let remap = |old: usize| keep.iter().position(|&k| k == old).expect("kept ray");
        let new_cones = cones.iter().map(|c| c.iter().map(|&r| remap(r)).collect()).collect();
        (new_rays, new_cones)
    }
}

/// The fans used throughout the tests and fixtures.
pub mod standard {
    use super::Fan;

    pub fn p2() -> Fan {
        Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]]).unwrap()
    }

    /// Hirzebruch surface `F_a`: rays (1,0), (0,1), (−1,a), (0,−1).
    pub fn hirzebruch(a: i64) -> Fan {
        Fan::from_i64(2, &[&[1, 0], &[0, 1], &[-1, a], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]]).unwrap()
    }

    pub fn p1xp1() -> Fan {
        hirzebruch(0)
    }

    pub fn p1() -> Fan {
        Fan::from_i64(1, &[&[1], &[-1]], &[&[0], &[1]]).unwrap()
    }

    pub fn point() -> Fan {
        Fan::new(0, Vec::new(), vec![Vec::new()]).unwrap()
    }

    pub fn p3() -> Fan {
        Fan::from_i64(
            3,
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]],
            &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]],
        )
        .unwrap()
    }
}
