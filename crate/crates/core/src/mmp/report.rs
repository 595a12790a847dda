use serde::Serialize;

use super::pair::Pair;
use super::run::MMPTrace;
use super::step::ray_values;
use crate::arith::polytope::{Inequality, RationalPolytope};
use crate::arith::rational::Rational;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalityReport {
    pub lambda: Rational,
    #[serde(serialize_with = "as_string")]
    pub denominator: num_bigint::BigInt,
}

fn as_string<S: serde::Serializer>(v: &num_bigint::BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// `λ = max{t : t(K+B) + H nef}` for ample `H` and non-nef `K + B`.
pub fn rationality_report(p: &Pair, h: &[Rational]) -> Result<RationalityReport> {
    p.check_divisor(h)?;
    let rays = ray_values(p)?;
    if rays.iter().any(|r| !p.dot(h, &r.ray).is_positive()) {
        return Err(Error::Precondition("H is not ample on the certified rays".into()));
    }
    let lambda = rays
        .iter()
        .filter(|r| r.value.is_negative())
        .map(|r| p.dot(h, &r.ray) / -r.value.clone())
        .min()
        .ok_or_else(|| Error::Precondition("K+B is nef; λ is undefined".into()))?;
    Ok(RationalityReport { denominator: lambda.denom().clone(), lambda })
}

/// Every contracted ray has `−2d ≤ (K+B)·C < 0` on its stored curve.
pub fn cone_bound_check(trace: &MMPTrace, d: usize) -> bool {
    let lo = Rational::from(-2 * d as i64);
    trace.steps.iter().all(|s| s.value >= lo && s.value.is_negative())
}

/// `{t ∈ [0,1]^m : K + B + Σ t_k D_k nef}` on the certified rays.
pub fn nef_polytope(p: &Pair, divisors: &[Vec<Rational>]) -> Result<RationalPolytope> {
    for d in divisors {
        p.check_divisor(d)?;
    }
    let m = divisors.len();
    let mut ineqs = Vec::new();
    for k in 0..m {
        let mut lo = vec![Rational::zero(); m];
        lo[k] = Rational::from(-1);
        ineqs.push(Inequality::new(lo, Rational::zero()));
        let mut hi = vec![Rational::zero(); m];
        hi[k] = Rational::one();
        ineqs.push(Inequality::new(hi, Rational::one()));
    }
    for r in ray_values(p)? {
        // −Σ t_k D_k·R ≤ (K+B)·R
        let normal: Vec<Rational> = divisors.iter().map(|d| -p.dot(d, &r.ray)).collect();
        ineqs.push(Inequality::new(normal, r.value));
    }
    RationalPolytope::new(m, ineqs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::q;
    use crate::mmp::run::{run_lmmp_scaling, Strategy};
    use crate::mmp::step::StepKind;
    use crate::toric::fan::standard::*;
    use crate::toric::ToricDivisor;

    #[test]
    fn rationality_examples() {
        let f1 = Pair::toric(hirzebruch(1), None).unwrap();
        let r = rationality_report(&f1, &ToricDivisor::from_i64(&[2, 1, 0, 0]).0).unwrap();
        assert_eq!((r.lambda, r.denominator), (q(1, 2), 2.into()));
        let p2 = Pair::toric(p2(), None).unwrap();
        assert_eq!(rationality_report(&p2, &ToricDivisor::from_i64(&[1, 0, 0]).0).unwrap().lambda, q(1, 3));
        let nef = Pair::toric(self::p2(), Some(ToricDivisor::from_i64(&[1, 1, 1]))).unwrap();
        assert!(rationality_report(&nef, &ToricDivisor::from_i64(&[1, 0, 0]).0).is_err());
    }

    #[test]
    fn cone_bound() {
        let f1 = Pair::toric(hirzebruch(1), None).unwrap();
        let mut t = run_lmmp_scaling(&f1, &f1.anticanonical(), &mut Strategy::First, 64).unwrap();
        assert!(cone_bound_check(&t, 2));
        t.steps[0].value = q(-5, 1);
        assert!(!cone_bound_check(&t, 2));
        assert_eq!(t.steps[0].kind, StepKind::Fibration);
    }

    #[test]
    fn nef_polytope_of_p2() {
        // K + 3tH is nef iff t ≥ 1; with 6H the bound is t ≥ 1/2
        let p = Pair::toric(p2(), None).unwrap();
        let poly = nef_polytope(&p, &[ToricDivisor::from_i64(&[3, 0, 0]).0]).unwrap();
        let mut v = poly.vertices().unwrap().to_vec();
        v.sort();
        assert_eq!(v, vec![vec![q(1, 1)]]);
        let poly = nef_polytope(&p, &[ToricDivisor::from_i64(&[6, 0, 0]).0]).unwrap();
        let mut v = poly.vertices().unwrap().to_vec();
        v.sort();
        assert_eq!(v, vec![vec![q(1, 2)], vec![q(1, 1)]]);
    }
}
