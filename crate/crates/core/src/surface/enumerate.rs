//! Classes `D = dH − Σ m_i E_i` on `P²` blown up at `k` points with `D² = K·D = −1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::toric::normal_form::next_permutation;

/// One orbit under permuting the points: multiplicities sorted non-increasing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct MinusOneOrbit {
    pub degree: i64,
    pub multiplicities: Vec<i64>,
}

impl MinusOneOrbit {
    /// Number of distinct permutations of the multiplicities.
    pub fn size(&self) -> u128 {
        let k = self.multiplicities.len();
        let mut size: u128 = (1..=k as u128).product();
        let mut i = 0;
        while i < k {
            let j = (i..k).find(|&j| self.multiplicities[j] != self.multiplicities[i]).unwrap_or(k);
            size /= (1..=(j - i) as u128).product::<u128>();
            i = j;
        }
        size
    }

    /// All classes in the orbit as coordinates `(d, −m_1, …, −m_k)`.
    pub fn classes(&self) -> Vec<Vec<i64>> {
        let mut m = self.multiplicities.clone();
        m.sort_unstable();
        let mut out = Vec::new();
        loop {
            let mut c = vec![self.degree];
            c.extend(m.iter().map(|x| -x));
            out.push(c);
            if !next_permutation(&mut m) {
                return out;
            }
        }
    }
}

fn search(pos: usize, k: usize, max: i64, s: i64, q: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if pos == k {
        if s == 0 && q == 0 {
            out.push(cur.clone());
        }
        return;
    }
    let rest = (k - pos - 1) as i64;
    for m in (0..=max.min(s)).rev() {
        let (s2, q2) = (s - m, q - m * m);
        // remaining entries are integers in [0, m]: Σx² ≥ Σx, Σx ≤ rest·m, Σx² ≤ m·Σx, (Σx)² ≤ rest·Σx²
        if q2 < s2 || s2 > rest * m || q2 > s2 * m || s2 * s2 > rest * q2 {
            continue;
        }
        cur.push(m);
        search(pos + 1, k, m, s2, q2, cur, out);
        cur.pop();
    }
}

/// Orbits of (−1)-classes with `0 ≤ d ≤ degree_bound`, ordered by degree.
pub fn minus_one_orbits(k: usize, degree_bound: i64) -> Result<Vec<MinusOneOrbit>> {
    if k > 9 {
        return Err(Error::Unsupported(format!("(−1)-class search on {k} > 9 points")));
    }
    let mut out = Vec::new();
    if k == 0 {
        return Ok(out);
    }
    let mut e = vec![0; k];
    e[k - 1] = -1;
    out.push(MinusOneOrbit { degree: 0, multiplicities: e });
    for d in 1..=degree_bound {
        let mut found = Vec::new();
        search(0, k, d, 3 * d - 1, d * d + 1, &mut Vec::with_capacity(k), &mut found);
        out.extend(found.into_iter().map(|m| MinusOneOrbit { degree: d, multiplicities: m }));
    }
    Ok(out)
}

pub fn count_minus_one_classes(k: usize, degree_bound: i64) -> Result<u128> {
    Ok(minus_one_orbits(k, degree_bound)?.iter().map(MinusOneOrbit::size).sum())
}

/// Every (−1)-class up to the bound, as `(d, −m_1, …, −m_k)`, sorted lexicographically.
pub fn enumerate_minus_one_classes(k: usize, degree_bound: i64) -> Result<Vec<Vec<i64>>> {
    let mut out: Vec<Vec<i64>> = minus_one_orbits(k, degree_bound)?.iter().flat_map(MinusOneOrbit::classes).collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(c: &[i64]) {
        let d = c[0];
        let sq = d * d - c[1..].iter().map(|m| m * m).sum::<i64>();
        let kd = -3 * d - c[1..].iter().sum::<i64>();
        assert_eq!((sq, kd), (-1, -1), "{c:?}");
    }

    #[test]
    fn cubic_surface_lines() {
        let lines = enumerate_minus_one_classes(6, 5).unwrap();
        assert_eq!(lines.len(), 27);
        lines.iter().for_each(|c| check(c));
    }

    #[test]
    fn small_counts() {
        assert!(enumerate_minus_one_classes(0, 5).unwrap().is_empty());
        assert_eq!(enumerate_minus_one_classes(1, 5).unwrap(), vec![vec![0, 1]]);
        assert_eq!(enumerate_minus_one_classes(2, 5).unwrap().len(), 3);
        assert_eq!(count_minus_one_classes(7, 10).unwrap(), 56);
        assert_eq!(count_minus_one_classes(8, 10).unwrap(), 240);
        assert!(enumerate_minus_one_classes(10, 1).is_err());
    }

    #[test]
    fn orbit_sizes_match_expansion() {
        for o in minus_one_orbits(8, 6).unwrap() {
            assert_eq!(o.classes().len() as u128, o.size());
        }
    }

    #[test]
    fn nine_points_keep_growing() {
        let a = count_minus_one_classes(9, 3).unwrap();
        let b = count_minus_one_classes(9, 6).unwrap();
        assert!(a < b);
    }
}
