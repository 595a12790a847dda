use super::Kappa;
use crate::arith::rational::Rational;
use crate::error::{Error, Result};

/// Genus of a smooth plane curve of degree `d`.
pub fn plane_curve_genus(d: i64) -> Result<i64> {
    if d <= 0 {
        return Err(Error::Precondition(format!("degree must be positive, got {d}")));
    }
    Ok((d - 1) * (d - 2) / 2)
}

/// `K_Y = (d − n − 1)H|_Y` for a smooth hypersurface `Y ⊂ Pⁿ` of degree `d`.
pub fn hypersurface_canonical_degree(n: i64, d: i64) -> Result<i64> {
    if n < 2 || d < 1 {
        return Err(Error::Precondition(format!("need n ≥ 2 and d ≥ 1, got n = {n}, d = {d}")));
    }
    Ok(d - n - 1)
}

/// Kodaira dimension of a divisor on a smooth projective curve.
pub fn kappa_curve(deg: &Rational, torsion: bool) -> Kappa {
    if deg.is_positive() {
        Kappa::Finite(1)
    } else if deg.is_zero() && torsion {
        Kappa::Finite(0)
    } else {
        Kappa::NegInfinity
    }
}
