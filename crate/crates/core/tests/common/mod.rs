//! Independent oracles for the integration suites; they share only `Rational` with the engine.
//! Seeded input generators live in `gen`.

#![allow(dead_code)]

pub mod gen;

use std::path::PathBuf;

use mmp_core::arith::{q, Rational};

pub fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn det(a: &[i64], b: &[i64]) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

fn half(v: &[i64]) -> u8 {
    u8::from(!(v[1] > 0 || (v[1] == 0 && v[0] > 0)))
}

/// Counterclockwise order of 2D rays, as a permutation of indices.
pub fn angular_order(rays: &[Vec<i64>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..rays.len()).collect();
    idx.sort_by(|&i, &j| {
        let (a, b) = (&rays[i], &rays[j]);
        half(a).cmp(&half(b)).then_with(|| 0.cmp(&det(a, b)))
    });
    idx
}

/// Intersection matrix `D_i · D_j` of a smooth complete toric surface from its rays alone:
/// neighbours meet once, `D_i² = −b_i` where `u_{i−1} + u_{i+1} = b_i u_i`.
pub fn toric_surface_gram(rays: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = rays.len();
    let ord = angular_order(rays);
    let mut g = vec![vec![0; n]; n];
    for k in 0..n {
        let (p, c, x) = (ord[(k + n - 1) % n], ord[k], ord[(k + 1) % n]);
        assert_eq!(det(&rays[p], &rays[c]), 1, "oracle needs a smooth fan");
        let s: Vec<i64> = (0..2).map(|t| rays[p][t] + rays[x][t]).collect();
        // s = b u_c
        let t = if rays[c][0] != 0 { 0 } else { 1 };
        let b = s[t] / rays[c][t];
        assert_eq!(s, rays[c].iter().map(|v| b * v).collect::<Vec<_>>());
        g[c][c] = -b;
        g[c][x] += 1;
        g[x][c] += 1;
    }
    g
}

pub fn f_a_rays(a: i64) -> Vec<Vec<i64>> {
    vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]]
}

pub fn p2_rays() -> Vec<Vec<i64>> {
    vec![vec![1, 0], vec![0, 1], vec![-1, -1]]
}

/// `D · D_j` for every `j`.
pub fn toric_degrees(gram: &[Vec<i64>], d: &[Rational]) -> Vec<Rational> {
    (0..gram.len())
        .map(|j| d.iter().zip(gram).fold(Rational::zero(), |acc, (c, row)| acc + c.clone() * Rational::from(row[j])))
        .collect()
}

/// Generators of the Mori cone of `P²` blown up at `k ≤ 3` general points, in `(H, E_1, …)`
/// coordinates: the `E_i` and the lines through pairs of points (`H − E_1` when `k = 1`, `H` when
/// `k = 0`).
pub fn blowup_cone_generators(k: usize) -> Vec<Vec<i64>> {
    assert!(k <= 3);
    let unit = |i: usize| (0..=k).map(|j| i64::from(i == j)).collect::<Vec<i64>>();
    match k {
        0 => vec![vec![1]],
        1 => vec![unit(1), vec![1, -1]],
        _ => {
            let mut out: Vec<Vec<i64>> = (1..=k).map(unit).collect();
            for i in 1..=k {
                for j in i + 1..=k {
                    let mut c = unit(0);
                    c[i] = -1;
                    c[j] = -1;
                    out.push(c);
                }
            }
            out
        }
    }
}

/// Diagonal form `H² = 1, E_i² = −1`.
pub fn blowup_dot(a: &[Rational], b: &[i64]) -> Rational {
    a.iter().zip(b).enumerate().fold(Rational::zero(), |acc, (i, (x, &y))| {
        let s = if i == 0 { 1 } else { -1 };
        acc + x.clone() * Rational::from(s * y)
    })
}

pub fn axpy(t: &Rational, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
    x.iter().zip(y).map(|(a, b)| t.clone() * a.clone() + b.clone()).collect()
}

/// The unique fraction with denominator at most `n` in `[lo, hi)`, if any; correct whenever
/// `hi − lo < 1/n²`.
pub fn bounded_fraction_in(lo: &Rational, hi: &Rational, n: i64) -> Option<Rational> {
    for den in 1..=n {
        let d = Rational::from(den);
        let num = (lo.clone() * d.clone()).ceil();
        let cand = Rational::from_bigints(num, den.into());
        if cand < *hi {
            return Some(cand);
        }
    }
    None
}

/// `max{t ≥ 0 : t·K + H nef}` by bisection on exact rationals, then snapped to the unique fraction
/// of denominator `≤ n` in the final bracket. Only the nef predicate is queried.
pub fn bisection_threshold(nef: impl Fn(&Rational) -> bool, n: i64) -> Rational {
    assert!(nef(&Rational::zero()), "H must be nef");
    let (mut lo, mut hi) = (Rational::zero(), Rational::one());
    while nef(&hi) {
        lo = hi.clone();
        hi = hi * Rational::from(2);
    }
    let width = q(1, n * n);
    while hi.clone() - lo.clone() >= width {
        let mid = (lo.clone() + hi.clone()) / Rational::from(2);
        if nef(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    bounded_fraction_in(&lo, &hi, n).expect("threshold has a bounded denominator")
}

/// Lattice points of `{u : ⟨u, v_i⟩ ≥ −a_i}` in a box, by direct scan.
pub fn naive_polygon_count(rays: &[Vec<i64>], a: &[i64], r: i64) -> u64 {
    let mut n = 0;
    for x in -r..=r {
        for y in -r..=r {
            if rays.iter().zip(a).all(|(v, &ai)| x * v[0] + y * v[1] >= -ai) {
                n += 1;
            }
        }
    }
    n
}

/// Integer classes `(d, m_1..m_k)` with `d ≤ bound`, `d² − Σ m_i² = −1`, `3d − Σ m_i = 1`, by
/// exhaustive search (`m_i = −(E-coefficient)`).
pub fn brute_force_minus_one(k: usize, bound: i64) -> usize {
    fn rec(k: usize, i: usize, d: i64, s2: i64, s1: i64, count: &mut usize) {
        if i == k {
            if d * d - s2 == -1 && 3 * d - s1 == 1 {
                *count += 1;
            }
            return;
        }
        for m in -1..=d.max(0) {
            rec(k, i + 1, d, s2 + m * m, s1 + m, count);
        }
    }
    let mut count = 0;
    for d in 0..=bound {
        rec(k, 0, d, 0, 0, &mut count);
    }
    count
}

/// Gram matrix of a tree of (−2)-curves given by its edges.
pub fn minus_two_tree(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<i64>> {
    let mut g = vec![vec![0; n]; n];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = -2;
    }
    for &(a, b) in edges {
        g[a][b] = 1;
        g[b][a] = 1;
    }
    g
}

pub fn chain_edges(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (i - 1, i)).collect()
}

/// Three arms of lengths `p, q, r` glued at node 0.
pub fn star_edges(arms: &[usize]) -> (usize, Vec<(usize, usize)>) {
    let mut edges = Vec::new();
    let mut next = 1;
    for &len in arms {
        let mut prev = 0;
        for _ in 0..len {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
    }
    (next, edges)
}
