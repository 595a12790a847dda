use serde::{Deserialize, Deserializer, Serialize};

use crate::arith::lattice::LatticeVector;
use crate::arith::rational::{dot, Rational};
use crate::error::{Error, Result};
use crate::surface::SurfaceModel;
use crate::toric::{toric_mori_rays, Fan, ToricDivisor};

/// A pair `(X, B)` on one of the two backends.
///
/// Divisors passed to the engine are plain coefficient vectors: one entry per ray on the toric
/// side, coordinates in the Picard basis on the surface side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pair {
    Toric { fan: Fan, boundary: ToricDivisor },
    /// The boundary lives on the stored curves.
    Surface { model: SurfaceModel },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawPair {
    Toric {
        fan: Fan,
        #[serde(default)]
        boundary: Option<ToricDivisor>,
    },
    Surface {
        model: SurfaceModel,
    },
}

impl<'de> Deserialize<'de> for Pair {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RawPair::deserialize(d)? {
            RawPair::Toric { fan, boundary } => Pair::toric(fan, boundary).map_err(serde::de::Error::custom),
            RawPair::Surface { model } => Ok(Pair::Surface { model }),
        }
    }
}

/// An extremal ray from the certified source, with the numbers the engine needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertifiedRay {
    pub index: usize,
    pub direction: LatticeVector,
    /// Toric: `(D_ρ · C)_ρ` of the representative wall curve. Surface: coordinates of the
    /// representative curve.
    pub class: Vec<Rational>,
    /// Wall index or curve index of the representative.
    pub representative: usize,
}

impl Pair {
    pub fn toric(fan: Fan, boundary: Option<ToricDivisor>) -> Result<Self> {
        fan.require_complete_simplicial()?;
        let n = fan.rays().len();
        let boundary = boundary.unwrap_or_else(|| ToricDivisor::zero(n));
        boundary.check_len(&fan)?;
        if boundary.coeffs().iter().any(|b| b.is_negative() || *b > Rational::one()) {
            return Err(Error::InvalidFan("boundary coefficients must lie in [0,1]".into()));
        }
        Ok(Pair::Toric { fan, boundary })
    }

    pub fn surface(model: SurfaceModel) -> Self {
        Pair::Surface { model }
    }

    pub fn backend(&self) -> &'static str {
        match self {
            Pair::Toric { .. } => "toric",
            Pair::Surface { .. } => "surface",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Pair::Toric { fan, .. } => fan.rank(),
            Pair::Surface { .. } => 2,
        }
    }

    pub fn rho(&self) -> usize {
        match self {
            Pair::Toric { fan, .. } => fan.picard_number() as usize,
            Pair::Surface { model } => model.rho(),
        }
    }

    /// Length of divisor vectors on this backend.
    pub fn divisor_len(&self) -> usize {
        match self {
            Pair::Toric { fan, .. } => fan.rays().len(),
            Pair::Surface { model } => model.rho(),
        }
    }

    pub fn check_divisor(&self, d: &[Rational]) -> Result<()> {
        if d.len() != self.divisor_len() {
            return Err(Error::DimensionMismatch { expected: self.divisor_len(), found: d.len() });
        }
        Ok(())
    }

    pub fn canonical(&self) -> Vec<Rational> {
        match self {
            Pair::Toric { fan, .. } => fan.canonical().0,
            Pair::Surface { model } => model.canonical().to_vec(),
        }
    }

    /// `K + B`.
    pub fn log_canonical(&self) -> Vec<Rational> {
        match self {
            Pair::Toric { fan, boundary } => fan.canonical().add(boundary).0,
            Pair::Surface { model } => model.log_canonical(),
        }
    }

    /// `−K`, the divisor behind `--C anticanonical`.
    pub fn anticanonical(&self) -> Vec<Rational> {
        self.canonical().into_iter().map(|x| -x).collect()
    }

    pub fn rays(&self) -> Result<Vec<CertifiedRay>> {
        match self {
            Pair::Toric { fan, .. } => Ok(toric_mori_rays(fan)?
                .into_iter()
                .enumerate()
                .map(|(index, r)| CertifiedRay {
                    index,
                    direction: r.direction,
                    class: r.class,
                    representative: r.representative,
                })
                .collect()),
            Pair::Surface { model } => Ok(model
                .extremal_rays()?
                .into_iter()
                .enumerate()
                .map(|(index, r)| CertifiedRay {
                    index,
                    direction: r.direction,
                    class: r.class,
                    representative: r.representative,
                })
                .collect()),
        }
    }

    /// `D · R` against the representative curve of the ray.
    pub fn dot(&self, d: &[Rational], ray: &CertifiedRay) -> Rational {
        match self {
            Pair::Toric { .. } => dot(d, &ray.class),
            Pair::Surface { model } => model.dot(d, &ray.class),
        }
    }
}
