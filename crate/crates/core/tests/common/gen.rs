//! Seeded random inputs shared by the suites.

use mmp_core::arith::Rational;
use mmp_core::singularities::ResolutionData;
use rand::Rng;

use super::{toric_degrees, toric_surface_gram};

/// Negative-definite configuration with off-diagonal entries in `{0, 1}`, `E_i² ≤ −2`, and
/// `K·E_i = 2g_i − 2 − E_i² ≥ 0`; genus 1 with probability `elliptic`.
pub fn minimal_configuration(rng: &mut impl Rng, max_n: usize, elliptic: f64) -> ResolutionData {
    loop {
        let n = rng.random_range(1..=max_n);
        let mut g = vec![vec![0i64; n]; n];
        let mut k = vec![0i64; n];
        for i in 0..n {
            let b = rng.random_range(2..=5);
            g[i][i] = -b;
            let genus = i64::from(rng.random_bool(elliptic));
            k[i] = 2 * genus - 2 + b;
            for j in 0..i {
                if rng.random_bool(0.35) {
                    g[i][j] = 1;
                    g[j][i] = 1;
                }
            }
        }
        if let Ok(r) = ResolutionData::new(g, k, vec![]) {
            return r;
        }
    }
}

/// A divisor positive on every `D_j` of the smooth toric surface with these rays.
pub fn ample_toric(rng: &mut impl Rng, rays: &[Vec<i64>]) -> Vec<Rational> {
    let g = toric_surface_gram(rays);
    loop {
        let d: Vec<Rational> = (0..rays.len()).map(|_| Rational::from(rng.random_range(0..=4i64))).collect();
        if toric_degrees(&g, &d).iter().all(Rational::is_positive) {
            return d;
        }
    }
}

/// `aH − Σ b_i E_i` with `b_i ≥ 1` and `a ≥ 5·max b + 1`.
pub fn scaling_class(rng: &mut impl Rng, k: usize) -> Vec<Rational> {
    let b: Vec<i64> = (0..k).map(|_| rng.random_range(1..=4)).collect();
    let a = 5 * b.iter().copied().max().unwrap_or(0) + 1 + rng.random_range(0..=3);
    std::iter::once(a).chain(b.iter().map(|x| -x)).map(Rational::from).collect()
}
