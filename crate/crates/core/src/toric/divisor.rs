use serde::{Deserialize, Serialize};

use super::fan::Fan;
use crate::arith::polytope::{Inequality, RationalPolytope};
use crate::arith::rational::Rational;
use crate::error::{Error, Result};

/// A torus-invariant ℚ-divisor: one coefficient per ray.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ToricDivisor(pub Vec<Rational>);

impl ToricDivisor {
    pub fn zero(n: usize) -> Self {
        ToricDivisor(vec![Rational::zero(); n])
    }

    /// `K = −Σ D_ρ`.
    pub fn canonical(f: &Fan) -> Self {
        ToricDivisor(vec![-Rational::one(); f.rays().len()])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        ToricDivisor(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    /// The prime divisor `D_i` among `n` rays.
    pub fn prime(n: usize, i: usize) -> Self {
        let mut d = Self::zero(n);
        d.0[i] = Rational::one();
        d
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }

    pub fn scale(&self, t: &Rational) -> Self {
        ToricDivisor(self.0.iter().map(|c| c * t).collect())
    }

    pub fn add(&self, other: &ToricDivisor) -> Self {
        ToricDivisor(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &ToricDivisor) -> Self {
        ToricDivisor(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Coefficientwise round-down.
    pub fn floor(&self) -> Self {
        ToricDivisor(self.0.iter().map(|c| Rational::from(c.floor())).collect())
    }

    pub fn check_len(&self, f: &Fan) -> Result<()> {
        if self.0.len() != f.rays().len() {
            return Err(Error::DimensionMismatch { expected: f.rays().len(), found: self.0.len() });
        }
        Ok(())
    }
}

/// `P_D = {u : ⟨u, v_ρ⟩ ≥ −a_ρ}` for `D = Σ a_ρ D_ρ`.
pub fn divisor_polytope(f: &Fan, d: &ToricDivisor) -> Result<RationalPolytope> {
    d.check_len(f)?;
    let ineqs = f
        .rays()
        .iter()
        .zip(d.coeffs())
        .map(|(r, a)| Inequality::new(r.0.iter().map(|&x| Rational::from(-x)).collect(), a.clone()))
        .collect();
    RationalPolytope::new(f.rank(), ineqs)
}
