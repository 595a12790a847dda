use std::collections::HashSet;

use serde::Serialize;

use super::kappa::level_points;
use crate::arith::rational::Rational;
use crate::error::{Error, Result};
use crate::toric::{Fan, ToricDivisor};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelProfile {
    pub level: u64,
    pub points: usize,
    pub generators: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorProfile {
    pub levels: Vec<LevelProfile>,
    /// Highest level carrying a minimal generator, within the sampled range.
    pub max_generator_level: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruncationReport {
    pub index: u64,
    pub bound: u64,
    pub full: GeneratorProfile,
    /// Levels counted in the truncated grading: level `k` is original level `kI`.
    pub truncation: GeneratorProfile,
    /// Truncation generators sit no higher than the full ring's generators.
    pub consistent: bool,
}

/// Minimal generators of the graded semigroup `{(k, u) : u ∈ P_{⌊kD⌋}}` for `1 ≤ k ≤ bound`.
fn profile(f: &Fan, d: &ToricDivisor, bound: u64) -> Result<GeneratorProfile> {
    let mut levels: Vec<HashSet<Vec<i64>>> = vec![HashSet::new()];
    let mut out = Vec::new();
    let mut max_generator_level = None;
    for k in 1..=bound {
        let pts: HashSet<Vec<i64>> = level_points(f, d, k)?.into_iter().map(|v| v.0).collect();
        let mut generators = 0;
        for u in &pts {
            let decomposable = (1..=k / 2).any(|a| {
                levels[a as usize].iter().any(|v| {
                    let w: Vec<i64> = u.iter().zip(v).map(|(x, y)| x - y).collect();
                    levels[(k - a) as usize].contains(&w)
                })
            });
            if !decomposable {
                generators += 1;
            }
        }
        if generators > 0 {
            max_generator_level = Some(k);
        }
        out.push(LevelProfile { level: k, points: pts.len(), generators });
        levels.push(pts);
    }
    Ok(GeneratorProfile { levels: out, max_generator_level })
}

/// Generator degree profiles of the section ring of `D` and of its `I`-th truncation, from the
/// levels up to `bound`. Reports; does not decide finite generation.
pub fn truncation_probe(f: &Fan, d: &ToricDivisor, index: u64, bound: u64) -> Result<TruncationReport> {
    if !f.is_complete() {
        return Err(Error::NotComplete);
    }
    d.check_len(f)?;
    if index == 0 || bound == 0 {
        return Err(Error::Precondition("index and bound must be positive".into()));
    }
    let full = profile(f, d, bound)?;
    let truncation = profile(f, &d.scale(&Rational::from(index as i64)), bound / index)?;
    let consistent = match (truncation.max_generator_level, full.max_generator_level) {
        (Some(t), Some(g)) => t <= g,
        (Some(_), None) => false,
        (None, _) => true,
    };
    Ok(TruncationReport { index, bound, full, truncation, consistent })
}
