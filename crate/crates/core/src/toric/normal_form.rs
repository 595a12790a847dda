//! Canonical form of a fan up to `GL(d, Z)` and relabelling of rays.
//!
//! For each ordering of the rays, take the row Hermite form of the `d × n` ray
//! matrix (invariant under left multiplication by unimodular matrices) together
//! with the relabelled cone list; the minimum over orderings is the normal form.

use serde::Serialize;

use super::fan::Fan;
use crate::arith::lattice::hnf;
use crate::error::{Error, Result};

/// Fans with more rays are refused: the search is over all `n!` orderings.
pub const MAX_NORMAL_FORM_RAYS: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NormalForm {
    pub rank: usize,
    pub matrix: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
}

pub fn normal_form(f: &Fan) -> Result<NormalForm> {
    let n = f.rays().len();
    if n > MAX_NORMAL_FORM_RAYS {
        return Err(Error::Unsupported(format!("normal form of a fan with {n} rays")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<NormalForm> = None;
    loop {
        // perm[k] = old index of the ray placed at position k
        let columns: Vec<Vec<i64>> = (0..f.rank()).map(|i| perm.iter().map(|&r| f.ray(r).0[i]).collect()).collect();
        let matrix = hnf(&columns)?;
        let keep = match &best {
            None => true,
            Some(b) => matrix <= b.matrix,
        };
        if keep {
            let mut inverse = vec![0; n];
            for (k, &r) in perm.iter().enumerate() {
                inverse[r] = k;
            }
            let mut cones: Vec<Vec<usize>> = f
                .cones()
                .iter()
                .map(|c| {
                    let mut m: Vec<usize> = c.iter().map(|&r| inverse[r]).collect();
                    m.sort_unstable();
                    m
                })
                .collect();
            cones.sort();
            let cand = NormalForm { rank: f.rank(), matrix, cones };
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(best.expect("at least one ordering"))
}

pub fn is_isomorphic(a: &Fan, b: &Fan) -> Result<bool> {
    if a.rank() != b.rank() || a.rays().len() != b.rays().len() || a.cones().len() != b.cones().len() {
        return Ok(false);
    }
    Ok(normal_form(a)? == normal_form(b)?)
}

/// Advances to the next permutation in lexicographic order; false after the last one.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).expect("exists by choice of i");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}
