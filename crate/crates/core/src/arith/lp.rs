//! Exact two-phase simplex over rationals (Bland's rule, so it always terminates).
//!
//! Problems are in equality form `A x = b, x ≥ 0`. The sizes seen here are tiny
//! (tens of columns), so a dense tableau is fine.

use super::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// `m` constraint rows; last column is the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost · x` over the columns in `0..active`, starting from the current basis.
    /// Returns false when unbounded.
    fn minimize(&mut self, cost: &[Rational], active: usize) -> bool {
        let rhs = self.width - 1;
        loop {
            // reduced cost c_j − c_B · column_j
            let entering = (0..active).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let z: Rational = self.rows.iter().zip(&self.basis).map(|(row, &b)| &cost[b] * &row[j]).sum();
                (&cost[j] - z).is_negative()
            });
            let Some(c) = entering else { return true };
            let mut best: Option<(Rational, usize, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[rhs] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((r, _, b)) => ratio < *r || (ratio == *r && self.basis[i] < *b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match best {
                None => return false,
                Some((_, r, _)) => self.pivot(r, c),
            }
        }
    }

    fn solution(&self, n: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < n {
                x[b] = row[self.width - 1].clone();
            }
        }
        x
    }
}

/// Builds a feasible basis for `A x = b, x ≥ 0`, or `None` when infeasible.
fn phase_one(a: &[Vec<Rational>], b: &[Rational], n: usize) -> Option<Tableau> {
    let m = a.len();
    let width = n + m + 1;
    let mut rows = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut t: Vec<Rational> = row.iter().map(|x| if flip { -x } else { x.clone() }).collect();
        t.resize(width, Rational::zero());
        t[n + i] = Rational::one();
        t[width - 1] = if flip { -bi } else { bi.clone() };
        rows.push(t);
    }
    let mut tab = Tableau { rows, basis: (n..n + m).collect(), width };
    let mut cost = vec![Rational::zero(); n + m];
    for c in cost.iter_mut().skip(n) {
        *c = Rational::one();
    }
    tab.minimize(&cost, n + m);
    let artificial_sum: Rational =
        tab.rows.iter().zip(&tab.basis).filter(|(_, &bv)| bv >= n).map(|(r, _)| &r[width - 1]).sum();
    if !artificial_sum.is_zero() {
        return None;
    }
    // Drive remaining (zero-valued) artificials out; drop redundant rows.
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.rows[i][j].is_zero()) {
                Some(j) => tab.pivot(i, j),
                None => {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    Some(tab)
}

/// A point of `{x : A x = b, x ≥ 0}` if one exists.
pub fn feasible_point(a: &[Vec<Rational>], b: &[Rational], n: usize) -> Option<Vec<Rational>> {
    phase_one(a, b, n).map(|t| t.solution(n))
}

/// Maximizes `c · x` subject to `A x = b, x ≥ 0`.
pub fn maximize(c: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> LpOutcome {
    let n = c.len();
    let Some(mut tab) = phase_one(a, b, n) else {
        return LpOutcome::Infeasible;
    };
    let m = a.len();
    let mut cost: Vec<Rational> = c.iter().map(|x| -x).collect();
    cost.resize(n + m, Rational::zero());
    if !tab.minimize(&cost, n) {
        return LpOutcome::Unbounded;
    }
    let x = tab.solution(n);
    let value = super::rational::dot(c, &x);
    LpOutcome::Optimal { x, value }
}

/// Whether `target` is a non-negative combination of `generators`; returns the coefficients.
pub fn cone_combination(generators: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let d = target.len();
    let a: Vec<Vec<Rational>> = (0..d).map(|i| generators.iter().map(|g| g[i].clone()).collect()).collect();
    feasible_point(&a, target, generators.len())
}

pub fn in_cone(generators: &[Vec<Rational>], target: &[Rational]) -> bool {
    if target.iter().all(Rational::is_zero) {
        return true;
    }
    cone_combination(generators, target).is_some()
}

/// Whether the cone spanned by `vectors` is all of `R^d`.
pub fn positively_spans(vectors: &[Vec<Rational>], d: usize) -> bool {
    (0..d).all(|i| {
        [Rational::one(), -Rational::one()].into_iter().all(|s| {
            let mut e = vec![Rational::zero(); d];
            e[i] = s;
            in_cone(vectors, &e)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::q;

    fn r(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from(x)).collect()
    }

    #[test]
    fn simple_maximum() {
        // max x + y, x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = vec![r(&[1, 2, 1, 0]), r(&[3, 1, 0, 1])];
        match maximize(&r(&[1, 1, 0, 0]), &a, &r(&[4, 6])) {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, q(14, 5));
                assert_eq!(&x[..2], &[q(8, 5), q(6, 5)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        assert_eq!(maximize(&r(&[1]), &[r(&[1])], &r(&[-1])), LpOutcome::Infeasible);
        assert_eq!(maximize(&r(&[1, 0]), &[r(&[1, -1])], &r(&[0])), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows() {
        let a = vec![r(&[1, 1]), r(&[2, 2])];
        assert!(feasible_point(&a, &r(&[1, 2]), 2).is_some());
        assert!(feasible_point(&a, &r(&[1, 3]), 2).is_none());
    }

    #[test]
    fn cone_membership() {
        let gens = vec![r(&[1, 0]), r(&[1, 2])];
        assert!(in_cone(&gens, &r(&[2, 1])));
        assert!(!in_cone(&gens, &r(&[0, 1])));
        assert!(!positively_spans(&gens, 2));
        let p2 = vec![r(&[1, 0]), r(&[0, 1]), r(&[-1, -1])];
        assert!(positively_spans(&p2, 2));
    }
}
