use std::fmt;

use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::arith::lattice::LatticeVector;
use crate::arith::rational::{common_denominator, Rational};
use crate::error::{Error, Result};
use crate::toric::walls::is_nef;
use crate::toric::{divisor_polytope, Fan, ToricDivisor};

pub const DEFAULT_SAMPLES: usize = 12;

/// `−∞` or a non-negative integer; `NegInfinity` sorts first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kappa {
    NegInfinity,
    Finite(usize),
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kappa::NegInfinity => write!(f, "-inf"),
            Kappa::Finite(k) => write!(f, "{k}"),
        }
    }
}

impl Serialize for Kappa {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Kappa::NegInfinity => s.serialize_str("-inf"),
            Kappa::Finite(k) => s.serialize_u64(*k as u64),
        }
    }
}

fn require_complete(f: &Fan) -> Result<()> {
    if !f.is_complete() {
        return Err(Error::NotComplete);
    }
    Ok(())
}

/// `h⁰(⌊mD⌋)`, the number of lattice points of `P_{⌊mD⌋}`.
pub fn section_count(f: &Fan, d: &ToricDivisor, m: u64) -> Result<u64> {
    require_complete(f)?;
    let md = d.scale(&Rational::from(m as i64)).floor();
    divisor_polytope(f, &md)?.count_lattice_points()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Sample {
    pub m: u64,
    pub h0: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KappaReport {
    /// `None` when the difference table does not stabilize within the samples.
    pub kappa: Option<Kappa>,
    /// Samples are taken at `m = period · k`, `k = 1..M`.
    pub period: u64,
    pub samples: Vec<Sample>,
    /// Dimension of `P_D` when `D` is nef; `None` when that route does not apply.
    pub polytope_dimension: Option<Kappa>,
    pub nef: Option<bool>,
}

/// Smallest `r` whose `r`-th differences are constant (and nonzero for `r = 0`) over at least two
/// entries.
pub fn growth_degree(values: &[u64]) -> Option<Kappa> {
    if values.iter().all(|&v| v == 0) {
        return Some(Kappa::NegInfinity);
    }
    let mut row: Vec<i128> = values.iter().map(|&v| v as i128).collect();
    let mut r = 0;
    while row.len() >= 2 {
        if row.iter().all(|&x| x == row[0]) && row[0] != 0 {
            return Some(Kappa::Finite(r));
        }
        row = row.windows(2).map(|w| w[1] - w[0]).collect();
        r += 1;
    }
    None
}

fn dimension_kappa(f: &Fan, d: &ToricDivisor) -> Result<Kappa> {
    Ok(match divisor_polytope(f, d)?.dimension()? {
        Some(k) => Kappa::Finite(k),
        None => Kappa::NegInfinity,
    })
}

/// `m` along which `h⁰(⌊mD⌋)` is a polynomial in the multiple: `P_{mD} = m·P_D` once `mD` is
/// integral, and is a lattice polytope once the vertices are cleared too.
fn period(f: &Fan, d: &ToricDivisor) -> Result<u64> {
    let q = common_denominator(d.coeffs());
    let qd = d.scale(&Rational::from(q.clone()));
    let poly = divisor_polytope(f, &qd)?;
    let p = common_denominator(poly.vertices()?.iter().flatten());
    (q * p).to_u64().ok_or_else(|| Error::Internal("sampling period overflows".into()))
}

/// Kodaira dimension by growth of `h⁰`, cross-checked against `dim P_D` for nef `D`.
pub fn kodaira_dimension(f: &Fan, d: &ToricDivisor) -> Result<KappaReport> {
    kodaira_dimension_with(f, d, DEFAULT_SAMPLES)
}

pub fn kodaira_dimension_with(f: &Fan, d: &ToricDivisor, samples: usize) -> Result<KappaReport> {
    require_complete(f)?;
    d.check_len(f)?;
    let period = period(f, d)?;
    let samples: Vec<Sample> = (1..=samples as u64)
        .map(|k| Ok(Sample { m: k * period, h0: section_count(f, d, k * period)? }))
        .collect::<Result<_>>()?;
    let kappa = growth_degree(&samples.iter().map(|s| s.h0).collect::<Vec<_>>());
    let nef = is_nef(f, d).ok();
    let polytope_dimension = if nef == Some(true) { Some(dimension_kappa(f, d)?) } else { None };
    if let (Some(a), Some(b)) = (kappa, polytope_dimension) {
        if a != b {
            return Err(Error::Internal(format!("growth degree {a} but dim P_D = {b} for nef D")));
        }
    }
    Ok(KappaReport { kappa, period, samples, polytope_dimension, nef })
}

/// `κ(D)` or an error when undetermined at the sample bound.
pub fn kappa(f: &Fan, d: &ToricDivisor) -> Result<Kappa> {
    kodaira_dimension(f, d)?
        .kappa
        .ok_or_else(|| Error::Precondition(format!("undetermined at bound {DEFAULT_SAMPLES}")))
}

pub fn check_kappa_scaling(f: &Fan, d: &ToricDivisor, a: u64) -> Result<bool> {
    if a == 0 {
        return Err(Error::Precondition("scaling factor must be positive".into()));
    }
    Ok(kappa(f, d)? == kappa(f, &d.scale(&Rational::from(a as i64)))?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BigReport {
    pub is_big: bool,
    /// Some `ε > 0` with `D − εL` still big.
    pub epsilon: Option<Rational>,
}

pub const EPSILON_HALVINGS: u32 = 10;

/// Bigness by `dim P_D = dim X`; for big `D` and given `L`, the largest `ε = 2^{−k}`, `k ≤ 10`,
/// keeping `D − εL` big.
pub fn big_check(f: &Fan, d: &ToricDivisor, l: Option<&ToricDivisor>) -> Result<BigReport> {
    require_complete(f)?;
    let full = Kappa::Finite(f.rank());
    let is_big = dimension_kappa(f, d)? == full;
    let mut epsilon = None;
    if let (true, Some(l)) = (is_big, l) {
        l.check_len(f)?;
        let mut eps = Rational::one();
        for _ in 0..=EPSILON_HALVINGS {
            if dimension_kappa(f, &d.sub(&l.scale(&eps)))? == full {
                epsilon = Some(eps);
                break;
            }
            eps = eps / Rational::from(2);
        }
    }
    Ok(BigReport { is_big, epsilon })
}

/// Lattice points of `P_{⌊mD⌋}`.
pub(crate) fn level_points(f: &Fan, d: &ToricDivisor, m: u64) -> Result<Vec<LatticeVector>> {
    let md = d.scale(&Rational::from(m as i64)).floor();
    divisor_polytope(f, &md)?.lattice_points()
}

/// `m,h0` rows.
pub fn samples_csv(samples: &[Sample]) -> String {
    let mut s = String::from("m,h0\n");
    for x in samples {
        s.push_str(&format!("{},{}\n", x.m, x.h0));
    }
    s
}
