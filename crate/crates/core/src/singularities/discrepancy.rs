use serde::{Deserialize, Serialize};

use super::data::ResolutionData;
use crate::arith::matrix::solve_unique;
use crate::arith::polytope::{Inequality, RationalPolytope};
use crate::arith::rational::Rational;
use crate::error::{Error, Result};

/// Ordered from best to worst; `Terminal < Canonical < Klt < Lc < NotLc`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SingularityClass {
    Terminal,
    Canonical,
    #[serde(rename = "KLT")]
    Klt,
    #[serde(rename = "LC")]
    Lc,
    #[serde(rename = "NotLC")]
    NotLc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrictCoefficient {
    pub name: String,
    pub coeff: Rational,
}

/// `K_Y + B_Y = f*(K_X + B)` with `B_Y = Σ t_k C'_k − Σ d_i E_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscrepancyReport {
    pub discrepancies: Vec<Rational>,
    /// Coefficients of strict transforms in `B_Y`, one per strict slot.
    pub strict: Vec<StrictCoefficient>,
    pub genera: Vec<i64>,
}

impl DiscrepancyReport {
    /// Coefficients `e_i = −d_i` of the exceptional part of `B_Y`.
    pub fn exceptional_coefficients(&self) -> Vec<Rational> {
        self.discrepancies.iter().map(|d| -d).collect()
    }
}

/// Solves `(K_Y + Σ t_k C'_k + Σ e_i E_i)·E_j = 0`. Since `C'_k·E_j = −(Q a_k)_j`,
/// this is `Q e = −K·E + Σ t_k Q a_k`.
pub fn crepant_pullback(r: &ResolutionData, coeffs: &[Rational]) -> Result<DiscrepancyReport> {
    if coeffs.len() != r.boundaries().len() {
        return Err(Error::DimensionMismatch { expected: r.boundaries().len(), found: coeffs.len() });
    }
    if coeffs.iter().any(Rational::is_negative) {
        return Err(Error::Precondition("boundary coefficients must be non-negative".into()));
    }
    let q = r.matrix();
    let n = r.len();
    let mut rhs: Vec<Rational> = r.k_dot_e().iter().map(|&k| Rational::from(-k)).collect();
    for (b, t) in r.boundaries().iter().zip(coeffs) {
        let qa = q.mul_vec(&b.mults.iter().map(|&a| Rational::from(a)).collect::<Vec<_>>());
        for j in 0..n {
            rhs[j] = &rhs[j] + &(t * &qa[j]);
        }
    }
    let e = solve_unique(&q, &rhs)?;
    let strict = r
        .boundaries()
        .iter()
        .zip(coeffs)
        .filter(|(b, _)| b.strict_coeff_slot)
        .map(|(b, t)| StrictCoefficient { name: b.name.clone(), coeff: t.clone() })
        .collect();
    Ok(DiscrepancyReport {
        discrepancies: e.into_iter().map(|x| -x).collect(),
        strict,
        genera: (0..n).map(|i| r.genus(i)).collect(),
    })
}

/// `(K_Y + B_Y)·E_j` for every `j`; zero for a correct report.
pub fn residual(r: &ResolutionData, coeffs: &[Rational], rep: &DiscrepancyReport) -> Vec<Rational> {
    let q = r.matrix();
    let e = rep.exceptional_coefficients();
    let qe = q.mul_vec(&e);
    (0..r.len())
        .map(|j| {
            let mut v = Rational::from(r.k_dot_e()[j]) + &qe[j];
            for (b, t) in r.boundaries().iter().zip(coeffs) {
                let a: Vec<Rational> = b.mults.iter().map(|&a| Rational::from(a)).collect();
                v = v - t * &q.mul_vec(&a)[j];
            }
            v
        })
        .collect()
}

pub fn classify(rep: &DiscrepancyReport) -> SingularityClass {
    let one = Rational::one();
    let e = rep.exceptional_coefficients();
    let strict_zero = rep.strict.iter().all(|s| s.coeff.is_zero());
    let all = || e.iter().chain(rep.strict.iter().map(|s| &s.coeff));
    if strict_zero && e.iter().all(Rational::is_negative) {
        SingularityClass::Terminal
    } else if strict_zero && e.iter().all(|x| !x.is_positive()) {
        SingularityClass::Canonical
    } else if all().all(|x| *x < one) {
        SingularityClass::Klt
    } else if all().all(|x| *x <= one) {
        SingularityClass::Lc
    } else {
        SingularityClass::NotLc
    }
}

/// Numerical dlt surrogate: lc, and no strict component with coefficient 1 passes through the
/// exceptional locus. Depends on the chosen resolution, so it is only a hint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DltHint {
    pub dlt: bool,
    pub caveat: &'static str,
}

pub fn dlt_hint(r: &ResolutionData, coeffs: &[Rational], rep: &DiscrepancyReport) -> DltHint {
    let lc = classify(rep) <= SingularityClass::Lc;
    let meets = r
        .boundaries()
        .iter()
        .zip(coeffs)
        .any(|(b, t)| b.strict_coeff_slot && *t == Rational::one() && b.mults.iter().any(|&a| a > 0));
    DltHint { dlt: lc && !meets, caveat: "resolution-dependent; not certified by numerical data" }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum NegativityOutcome {
    EffectiveForced,
    /// `D·E_i > 0`, so `−D` is not nef over `X`.
    PreconditionFails { curve: usize, value: Rational },
    /// A negative coefficient despite `−D` nef: the lemma would be contradicted.
    Violation { curve: usize, coeff: Rational },
}

/// Negativity lemma on the exceptional lattice: `−D` nef over `X` forces `D ≥ 0`.
pub fn negativity_check(r: &ResolutionData, d: &[Rational], check_nef: bool) -> Result<NegativityOutcome> {
    if d.len() != r.len() {
        return Err(Error::DimensionMismatch { expected: r.len(), found: d.len() });
    }
    if check_nef {
        let dq = r.matrix().mul_vec(d);
        if let Some(i) = dq.iter().position(Rational::is_positive) {
            return Ok(NegativityOutcome::PreconditionFails { curve: i, value: dq[i].clone() });
        }
    }
    Ok(match d.iter().position(Rational::is_negative) {
        Some(i) => NegativityOutcome::Violation { curve: i, coeff: d[i].clone() },
        None => NegativityOutcome::EffectiveForced,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractedCurve {
    pub discrepancy: Rational,
    pub class: SingularityClass,
}

/// Contracting a single smooth curve of genus `g` with `E² = −a`: `K·E = 2g − 2 + a`.
pub fn contracted_curve_singularity(self_intersection: i64, genus: i64) -> Result<ContractedCurve> {
    if self_intersection >= 0 {
        return Err(Error::NotContractible);
    }
    if genus < 0 {
        return Err(Error::Precondition("genus must be non-negative".into()));
    }
    let r = ResolutionData::new(vec![vec![self_intersection]], vec![2 * genus - 2 - self_intersection], vec![])?;
    let rep = crepant_pullback(&r, &[])?;
    Ok(ContractedCurve { discrepancy: rep.discrepancies[0].clone(), class: classify(&rep) })
}

/// Largest `t` with `(X, tC)` lc, where `C` is boundary `slot` and other boundaries are zero.
/// With `d_i` the discrepancies of `X` itself, `d_i − t a_i ≥ −1` and `t ≤ 1` for a strict slot.
pub fn lc_threshold(r: &ResolutionData, slot: usize) -> Result<Rational> {
    let b = r
        .boundaries()
        .get(slot)
        .ok_or_else(|| Error::Precondition(format!("no boundary slot {slot}")))?;
    let base = crepant_pullback(r, &vec![Rational::zero(); r.boundaries().len()])?;
    if base.discrepancies.iter().any(|d| *d < Rational::from(-1)) {
        return Err(Error::Precondition("X itself is not lc".into()));
    }
    let mut t: Option<Rational> = b.strict_coeff_slot.then(Rational::one);
    for (d, &a) in base.discrepancies.iter().zip(&b.mults) {
        if a > 0 {
            let bound = (d + &Rational::one()) / &Rational::from(a);
            t = Some(match t {
                Some(t) => t.min(bound),
                None => bound,
            });
        }
    }
    t.ok_or(Error::MissesResolution)
}

/// `{t : 0 ≤ t_k, t_k ≤ 1 on strict slots, Σ_k t_k a_{ik} − d_i ≤ 1}` over the chosen slots.
pub fn lc_polytope(r: &ResolutionData, slots: &[usize]) -> Result<RationalPolytope> {
    let m = slots.len();
    if let Some(&s) = slots.iter().find(|&&s| s >= r.boundaries().len()) {
        return Err(Error::Precondition(format!("no boundary slot {s}")));
    }
    let base = crepant_pullback(r, &vec![Rational::zero(); r.boundaries().len()])?;
    let mut ineqs = Vec::new();
    for k in 0..m {
        let mut e = vec![Rational::zero(); m];
        e[k] = Rational::from(-1);
        ineqs.push(Inequality::new(e, Rational::zero()));
        if r.boundaries()[slots[k]].strict_coeff_slot {
            let mut e = vec![Rational::zero(); m];
            e[k] = Rational::one();
            ineqs.push(Inequality::new(e, Rational::one()));
        }
    }
    for (i, d) in base.discrepancies.iter().enumerate() {
        let normal: Vec<Rational> = slots.iter().map(|&s| Rational::from(r.boundaries()[s].mults[i])).collect();
        if normal.iter().all(Rational::is_zero) {
            continue;
        }
        ineqs.push(Inequality::new(normal, Rational::one() + d));
    }
    RationalPolytope::new(m, ineqs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::q;
    use crate::singularities::data::BoundaryData;

    fn curve(mults: Vec<i64>) -> BoundaryData {
        BoundaryData { name: "C".into(), mults, strict_coeff_slot: true }
    }

    #[test]
    fn single_curve_discrepancies() {
        for a in 1..=6 {
            let r = ResolutionData::single_curve(a).unwrap();
            let rep = crepant_pullback(&r, &[]).unwrap();
            assert_eq!(rep.discrepancies, vec![q(a - 2, -a)]);
        }
        let class = |a| classify(&crepant_pullback(&ResolutionData::single_curve(a).unwrap(), &[]).unwrap());
        assert_eq!(class(1), SingularityClass::Terminal);
        assert_eq!(class(2), SingularityClass::Canonical);
        assert_eq!(class(3), SingularityClass::Klt);
    }

    #[test]
    fn a2_is_crepant() {
        let r = ResolutionData::chain(&[-2, -2]).unwrap();
        assert_eq!(crepant_pullback(&r, &[]).unwrap().discrepancies, vec![q(0, 1), q(0, 1)]);
    }

    #[test]
    fn nodal_and_cuspidal() {
        let nodal = ResolutionData::new(vec![vec![-1]], vec![-1], vec![curve(vec![2])]).unwrap();
        assert_eq!(lc_threshold(&nodal, 0).unwrap(), q(1, 1));
        let rep = crepant_pullback(&nodal, &[q(1, 1)]).unwrap();
        assert_eq!(classify(&rep), SingularityClass::Lc);
        assert!(!dlt_hint(&nodal, &[q(1, 1)], &rep).dlt);

        let cusp = ResolutionData::new(
            vec![vec![-3, 0, 1], vec![0, -2, 1], vec![1, 1, -1]],
            vec![1, 0, -1],
            vec![curve(vec![2, 3, 6])],
        )
        .unwrap();
        assert_eq!(crepant_pullback(&cusp, &[q(0, 1)]).unwrap().discrepancies, vec![q(1, 1), q(2, 1), q(4, 1)]);
        assert_eq!(lc_threshold(&cusp, 0).unwrap(), q(5, 6));
        let rep = crepant_pullback(&cusp, &[q(1, 1)]).unwrap();
        assert_eq!(classify(&rep), SingularityClass::NotLc);
        assert!(residual(&cusp, &[q(1, 1)], &rep).iter().all(Rational::is_zero));
    }

    #[test]
    fn smooth_curve_and_missing_divisor() {
        let r = ResolutionData::new(vec![vec![-1]], vec![-1], vec![curve(vec![1])]).unwrap();
        assert_eq!(lc_threshold(&r, 0).unwrap(), q(1, 1));
        let miss = ResolutionData::new(
            vec![vec![-1]],
            vec![-1],
            vec![BoundaryData { name: "D".into(), mults: vec![0], strict_coeff_slot: false }],
        )
        .unwrap();
        assert_eq!(lc_threshold(&miss, 0), Err(Error::MissesResolution));
    }

    #[test]
    fn contracted_curves() {
        let c = contracted_curve_singularity(-1, 0).unwrap();
        assert_eq!((c.discrepancy, c.class), (q(1, 1), SingularityClass::Terminal));
        for a in 1..5 {
            let c = contracted_curve_singularity(-a, 1).unwrap();
            assert_eq!((c.discrepancy, c.class), (q(-1, 1), SingularityClass::Lc));
            assert_eq!(contracted_curve_singularity(-a, 2).unwrap().class, SingularityClass::NotLc);
        }
        assert_eq!(contracted_curve_singularity(0, 0), Err(Error::NotContractible));
    }

    #[test]
    fn negativity() {
        let r = ResolutionData::single_curve(2).unwrap();
        assert_eq!(
            negativity_check(&r, &[q(-1, 1)], true).unwrap(),
            NegativityOutcome::PreconditionFails { curve: 0, value: q(2, 1) }
        );
        assert_eq!(negativity_check(&r, &[q(0, 1)], true).unwrap(), NegativityOutcome::EffectiveForced);
        let r = ResolutionData::chain(&[-3, -2, -4]).unwrap();
        let g = crepant_pullback(&r, &[]).unwrap().exceptional_coefficients();
        assert_eq!(negativity_check(&r, &g, true).unwrap(), NegativityOutcome::EffectiveForced);
    }

    #[test]
    fn polytopes() {
        let two = ResolutionData::new(
            vec![vec![-1]],
            vec![-1],
            vec![curve(vec![1]), BoundaryData { name: "C2".into(), mults: vec![1], strict_coeff_slot: true }],
        )
        .unwrap();
        let p = lc_polytope(&two, &[0, 1]).unwrap();
        assert!(p.same_set(&RationalPolytope::cube(2, q(0, 1), q(1, 1))).unwrap());
        let cusp = ResolutionData::new(
            vec![vec![-3, 0, 1], vec![0, -2, 1], vec![1, 1, -1]],
            vec![1, 0, -1],
            vec![curve(vec![2, 3, 6])],
        )
        .unwrap();
        let p = lc_polytope(&cusp, &[0]).unwrap();
        let mut v = p.vertices().unwrap().to_vec();
        v.sort();
        assert_eq!(v, vec![vec![q(0, 1)], vec![q(5, 6)]]);
    }
}
