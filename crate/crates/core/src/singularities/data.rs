use serde::{Deserialize, Deserializer, Serialize};

use crate::arith::matrix::{is_negative_definite, RationalMatrix};
use crate::error::{Error, Result};
use crate::toric::cone::Cone;
use crate::toric::resolve::minimal_resolution_2d;

/// A divisor on `X` seen through the resolution: `f*C = C' + Σ a_i E_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryData {
    pub name: String,
    pub mults: Vec<i64>,
    /// Whether the strict transform `C'` is a component of the boundary on `Y`.
    pub strict_coeff_slot: bool,
}

/// Exceptional curves `E_1..E_n` of `f: Y → X` with their numerical data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolutionData {
    gram: Vec<Vec<i64>>,
    #[serde(rename = "K_dot_E")]
    k_dot_e: Vec<i64>,
    boundaries: Vec<BoundaryData>,
}

#[derive(Deserialize)]
struct RawResolution {
    gram: Vec<Vec<i64>>,
    #[serde(rename = "K_dot_E")]
    k_dot_e: Vec<i64>,
    #[serde(default)]
    boundaries: Vec<BoundaryData>,
}

impl<'de> Deserialize<'de> for ResolutionData {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawResolution::deserialize(d)?;
        ResolutionData::new(raw.gram, raw.k_dot_e, raw.boundaries).map_err(serde::de::Error::custom)
    }
}

impl ResolutionData {
    pub fn new(gram: Vec<Vec<i64>>, k_dot_e: Vec<i64>, boundaries: Vec<BoundaryData>) -> Result<Self> {
        let n = gram.len();
        if n == 0 {
            return Err(Error::InvalidResolution("no exceptional curves".into()));
        }
        if gram.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidResolution("intersection matrix is not square".into()));
        }
        if k_dot_e.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: k_dot_e.len() });
        }
        let q = RationalMatrix::from_i64_rows(&gram)?;
        if !q.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if !is_negative_definite(&q)? {
            return Err(Error::InvalidResolution("intersection matrix is not negative definite".into()));
        }
        for i in 0..n {
            let two_pa_minus_two = gram[i][i] + k_dot_e[i];
            if two_pa_minus_two % 2 != 0 || two_pa_minus_two < -2 {
                return Err(Error::InvalidResolution(format!(
                    "E_{i}: E² = {}, K·E = {} violate adjunction",
                    gram[i][i], k_dot_e[i]
                )));
            }
        }
        for b in &boundaries {
            if b.mults.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: b.mults.len() });
            }
            if b.mults.iter().any(|&a| a < 0) {
                return Err(Error::InvalidResolution(format!("negative multiplicity in {}", b.name)));
            }
        }
        Ok(ResolutionData { gram, k_dot_e, boundaries })
    }

    /// One curve with `E² = −a`, rational (`K·E = a − 2`), no boundary.
    pub fn single_curve(a: i64) -> Result<Self> {
        Self::new(vec![vec![-a]], vec![a - 2], vec![])
    }

    /// A chain of smooth rational curves with the given self-intersections.
    pub fn chain(self_intersections: &[i64]) -> Result<Self> {
        let n = self_intersections.len();
        let mut gram = vec![vec![0; n]; n];
        for i in 0..n {
            gram[i][i] = self_intersections[i];
            if i + 1 < n {
                gram[i][i + 1] = 1;
                gram[i + 1][i] = 1;
            }
        }
        let k = self_intersections.iter().map(|e| -2 - e).collect();
        Self::new(gram, k, vec![])
    }

    /// Minimal resolution of the toric surface singularity of a 2-dimensional cone.
    pub fn from_toric(c: &Cone) -> Result<Self> {
        if c.check_regular() {
            return Err(Error::Precondition("cone is regular, nothing to resolve".into()));
        }
        Self::chain(&minimal_resolution_2d(c)?.self_intersections)
    }

    pub fn with_boundary(mut self, b: BoundaryData) -> Result<Self> {
        let mut bs = std::mem::take(&mut self.boundaries);
        bs.push(b);
        Self::new(self.gram, self.k_dot_e, bs)
    }

    pub fn len(&self) -> usize {
        self.gram.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn k_dot_e(&self) -> &[i64] {
        &self.k_dot_e
    }

    pub fn boundaries(&self) -> &[BoundaryData] {
        &self.boundaries
    }

    pub(crate) fn matrix(&self) -> RationalMatrix {
        RationalMatrix::from_i64_rows(&self.gram).expect("validated on construction")
    }

    /// `p_a(E_i)` from `2p_a − 2 = E² + K·E`.
    pub fn genus(&self, i: usize) -> i64 {
        (self.gram[i][i] + self.k_dot_e[i]) / 2 + 1
    }

    /// Minimal means no smooth rational `(−1)`-curve among the `E_i`, equivalently `K·E_i ≥ 0`.
    pub fn is_minimal(&self) -> bool {
        self.k_dot_e.iter().all(|&k| k >= 0)
    }

    pub fn boundary_index(&self, name: &str) -> Option<usize> {
        self.boundaries.iter().position(|b| b.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ResolutionData::new(vec![], vec![], vec![]).is_err());
        assert!(ResolutionData::new(vec![vec![1]], vec![-3], vec![]).is_err());
        assert!(ResolutionData::new(vec![vec![-2]], vec![1], vec![]).is_err());
        assert!(ResolutionData::new(vec![vec![-2, 2], vec![2, -2]], vec![0, 0], vec![]).is_err());
        assert!(ResolutionData::chain(&[-2, -2, -2]).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"gram":[[-1]],"K_dot_E":[-1],"boundaries":[{"name":"C","mults":[2],"strict_coeff_slot":true}]}"#;
        let r: ResolutionData = serde_json::from_str(s).unwrap();
        assert_eq!(r.genus(0), 0);
        assert_eq!(serde_json::to_string(&r).unwrap(), s);
        assert!(serde_json::from_str::<ResolutionData>(r#"{"gram":[[0]],"K_dot_E":[-2]}"#).is_err());
    }

    #[test]
    fn toric_a_n() {
        let c = Cone::from_i64(&[&[1, 0], &[-2, 3]]).unwrap();
        let r = ResolutionData::from_toric(&c).unwrap();
        assert_eq!(r.gram(), &[vec![-2, 1], vec![1, -2]]);
        assert_eq!(r.k_dot_e(), &[0, 0]);
    }
}
