use serde::{Deserialize, Serialize};

use super::fan::Fan;
use super::walls::{toric_mori_rays, wall_curves, MoriRay};
use crate::arith::lattice::{integer_kernel, primitivize, rank_i64, LatticeVector};
use crate::arith::lp;
use crate::arith::rational::Rational;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContractionType {
    Divisorial,
    Small,
    Fibration,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToricContraction {
    pub kind: ContractionType,
    /// Target fan. For `Small` this is the non-simplicial fan of the flipping contraction,
    /// returned for inspection only; for `Fibration` it is the base.
    pub fan: Fan,
    /// The ray removed by a divisorial contraction (index in the source fan).
    pub removed_ray: Option<usize>,
    /// Integer projection `N → N'` onto the base lattice of a fibration.
    pub projection: Option<Vec<Vec<i64>>>,
    /// Maximal cones of the source merged together, as lists of source cone indices.
    pub merged: Vec<Vec<usize>>,
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut j = i;
    while parent[j] != r {
        let next = parent[j];
        parent[j] = r;
        j = next;
    }
    r
}

/// Contracts `ray`: removes every wall on it and merges the adjacent maximal cones.
pub fn toric_contract(f: &Fan, ray: &MoriRay) -> Result<ToricContraction> {
    let rays = toric_mori_rays(f)?;
    let Some(ray) = rays.iter().find(|r| r.direction == ray.direction) else {
        return Err(Error::NotExtremal);
    };
    let walls = wall_curves(f)?;
    let n_cones = f.cones().len();
    let mut parent: Vec<usize> = (0..n_cones).collect();
    for &w in &ray.walls {
        let [a, b] = walls[w].cones;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for c in 0..n_cones {
        let r = find(&mut parent, c);
        match roots.iter().position(|&x| x == r) {
            Some(k) => groups[k].push(c),
            None => {
                roots.push(r);
                groups.push(vec![c]);
            }
        }
    }
    let group_rays: Vec<Vec<usize>> = groups
        .iter()
        .map(|g| {
            let mut rs: Vec<usize> = g.iter().flat_map(|&c| f.cones()[c].iter().copied()).collect();
            rs.sort_unstable();
            rs.dedup();
            rs
        })
        .collect();
    let merged: Vec<Vec<usize>> = groups.iter().filter(|g| g.len() > 1).cloned().collect();

    let lineality: Vec<Vec<usize>> = group_rays.iter().map(|rs| lineality_rays(f, rs)).collect();
    if lineality.iter().any(|l| !l.is_empty()) {
        return fibration(f, &group_rays, &lineality, merged);
    }

    let mut new_cones: Vec<Vec<usize>> = Vec::new();
    for rs in &group_rays {
        let gens: Vec<Vec<Rational>> = rs.iter().map(|&r| f.ray(r).to_rationals()).collect();
        let extreme: Vec<usize> = rs
            .iter()
            .enumerate()
            .filter(|&(k, _)| {
                let others: Vec<Vec<Rational>> =
                    gens.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, g)| g.clone()).collect();
                !lp::in_cone(&others, &gens[k])
            })
            .map(|(_, &r)| r)
            .collect();
        if !new_cones.contains(&extreme) {
            new_cones.push(extreme);
        }
    }
    let removed: Vec<usize> = (0..f.rays().len()).filter(|r| !new_cones.iter().any(|c| c.contains(r))).collect();
    match removed.len() {
        1 => {
            let (rays, cones) = Fan::without_ray(f.rays(), &new_cones, &removed);
            let fan = Fan::new(f.rank(), rays, cones).map_err(|e| Error::BadContraction(e.to_string()))?;
            Ok(ToricContraction {
                kind: ContractionType::Divisorial,
                fan,
                removed_ray: Some(removed[0]),
                projection: None,
                merged,
            })
        }
        0 => {
            let fan = Fan::new_unchecked(f.rank(), f.rays().to_vec(), new_cones)
                .map_err(|e| Error::BadContraction(e.to_string()))?;
            Ok(ToricContraction { kind: ContractionType::Small, fan, removed_ray: None, projection: None, merged })
        }
        k => Err(Error::BadContraction(format!("{k} rays would disappear: {removed:?}"))),
    }
}

/// Rays `r` of the group with `−r` in the cone it spans: generators of its lineality space.
fn lineality_rays(f: &Fan, rs: &[usize]) -> Vec<usize> {
    let gens: Vec<Vec<Rational>> = rs.iter().map(|&r| f.ray(r).to_rationals()).collect();
    rs.iter()
        .filter(|&&r| lp::in_cone(&gens, &f.ray(r).neg().to_rationals()))
        .copied()
        .collect()
}

fn fibration(
    f: &Fan,
    group_rays: &[Vec<usize>],
    lineality: &[Vec<usize>],
    merged: Vec<Vec<usize>>,
) -> Result<ToricContraction> {
    let rows_of = |l: &[usize]| -> Vec<Vec<i64>> { l.iter().map(|&r| f.ray(r).0.clone()).collect() };
    let first = rows_of(&lineality[0]);
    let dim_l = rank_i64(&first);
    for l in lineality {
        let rows = rows_of(l);
        let mut both = first.clone();
        both.extend(rows.iter().cloned());
        if rank_i64(&rows) != dim_l || rank_i64(&both) != dim_l {
            return Err(Error::BadContraction("merged cones have different lineality spaces".into()));
        }
    }
    // Rows of P form a basis of M ∩ L^⊥, so x ↦ P x is the quotient map N → N/(N ∩ L).
    let projection = integer_kernel(&first, f.rank())?;
    let project = |v: &LatticeVector| -> Vec<i64> { projection.iter().map(|u| LatticeVector(u.clone()).dot(v)).collect() };
    let mut base_rays: Vec<LatticeVector> = Vec::new();
    let mut images: Vec<Vec<LatticeVector>> = Vec::new();
    for rs in group_rays {
        let mut imgs: Vec<LatticeVector> = Vec::new();
        for &r in rs {
            let p = LatticeVector(project(f.ray(r)));
            if p.is_zero() {
                continue;
            }
            let p = primitivize(&p)?;
            if !imgs.contains(&p) {
                imgs.push(p);
            }
        }
        let gens: Vec<Vec<Rational>> = imgs.iter().map(LatticeVector::to_rationals).collect();
        let extreme: Vec<LatticeVector> = imgs
            .iter()
            .enumerate()
            .filter(|&(k, _)| {
                let others: Vec<Vec<Rational>> =
                    gens.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, g)| g.clone()).collect();
                !lp::in_cone(&others, &gens[k])
            })
            .map(|(_, v)| v.clone())
            .collect();
        for v in &extreme {
            if !base_rays.contains(v) {
                base_rays.push(v.clone());
            }
        }
        images.push(extreme);
    }
    base_rays.sort();
    let mut cones: Vec<Vec<usize>> = Vec::new();
    for img in images {
        let mut c: Vec<usize> = img.iter().map(|v| base_rays.iter().position(|b| b == v).unwrap()).collect();
        c.sort_unstable();
        if !cones.contains(&c) {
            cones.push(c);
        }
    }
    let base = Fan::new(projection.len(), base_rays, cones).map_err(|e| Error::BadContraction(e.to_string()))?;
    Ok(ToricContraction {
        kind: ContractionType::Fibration,
        fan: base,
        removed_ray: None,
        projection: Some(projection),
        merged,
    })
}
