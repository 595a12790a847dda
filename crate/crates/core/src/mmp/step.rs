use serde::{Deserialize, Serialize};

use super::pair::{CertifiedRay, Pair};
use crate::arith::lattice::{primitive_on_ray, LatticeVector};
use crate::arith::rational::Rational;
use crate::error::{Error, Result};
use crate::toric::{toric_contract, toric_mori_rays, ContractionType, Fan, ToricDivisor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepKind {
    Divisorial,
    Small,
    Fibration,
}

impl From<ContractionType> for StepKind {
    fn from(c: ContractionType) -> Self {
        match c {
            ContractionType::Divisorial => StepKind::Divisorial,
            ContractionType::Small => StepKind::Small,
            ContractionType::Fibration => StepKind::Fibration,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MMPStep {
    pub ray_index: usize,
    pub direction: LatticeVector,
    pub class: Vec<Rational>,
    /// `(K + B) · R` on the representative curve.
    pub value: Rational,
    pub kind: StepKind,
    pub rho_before: usize,
    pub rho_after: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Rational>,
    /// Toric fibrations: the base fan. Small contractions: the flipping contraction's fan.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_fan: Option<Fan>,
}

/// What the step produced: the next pair for a divisorial contraction, nothing otherwise.
#[derive(Debug, Clone)]
pub struct StepResult {
    pub step: MMPStep,
    pub next: Option<Pair>,
    /// Linear push-forward of divisor vectors to the next pair.
    pub push: Option<Push>,
}

#[derive(Debug, Clone)]
pub enum Push {
    /// Toric: drop the coefficient of the removed ray.
    DropRay(usize),
    /// Surface: `(n−1)×n` matrix on Picard coordinates.
    Matrix(crate::arith::matrix::RationalMatrix),
}

impl Push {
    pub fn apply(&self, d: &[Rational]) -> Vec<Rational> {
        match self {
            Push::DropRay(r) => d.iter().enumerate().filter(|&(i, _)| i != *r).map(|(_, x)| x.clone()).collect(),
            Push::Matrix(m) => m.mul_vec(d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RayValue {
    pub ray: CertifiedRay,
    pub value: Rational,
}

/// Every certified ray with its `(K + B)`-degree, in source order.
pub fn ray_values(p: &Pair) -> Result<Vec<RayValue>> {
    let kb = p.log_canonical();
    Ok(p.rays()?.into_iter().map(|ray| RayValue { value: p.dot(&kb, &ray), ray }).collect())
}

/// `(K + B)`-negative rays, most negative first.
pub fn negative_extremal_rays(p: &Pair) -> Result<Vec<RayValue>> {
    let mut out: Vec<RayValue> = ray_values(p)?.into_iter().filter(|r| r.value.is_negative()).collect();
    out.sort_by(|a, b| a.value.cmp(&b.value).then(a.ray.index.cmp(&b.ray.index)));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NefThreshold {
    pub lambda: Rational,
    /// `K + B` itself is nef, so `λ = 0`.
    pub nef: bool,
}

/// Smallest `t ≥ 0` with `K + B + tC` nef on every certified ray.
pub fn nef_threshold(p: &Pair, c: &[Rational]) -> Result<NefThreshold> {
    p.check_divisor(c)?;
    threshold_on(p, c, &ray_values(p)?)
}

/// `nef_threshold` against precomputed ray values.
pub(crate) fn threshold_on(p: &Pair, c: &[Rational], values: &[RayValue]) -> Result<NefThreshold> {
    let mut lambda = Rational::zero();
    let mut nef = true;
    for RayValue { ray: r, value: v } in values {
        if v.is_negative() {
            nef = false;
            let cr = p.dot(c, r);
            if !cr.is_positive() {
                return Err(Error::NotDominating);
            }
            lambda = lambda.max(-v.clone() / cr);
        }
    }
    for RayValue { ray: r, value } in values {
        let v = value + &lambda * &p.dot(c, r);
        if v.is_negative() {
            return Err(Error::Precondition(format!("no t ≥ 0 makes K+B+tC nef (ray {})", r.index)));
        }
    }
    Ok(NefThreshold { lambda, nef })
}

/// Contracts the ray with index `ray_index` in `p.rays()`.
pub fn mmp_step(p: &Pair, ray_index: usize) -> Result<StepResult> {
    let rays = p.rays()?;
    let ray = rays
        .get(ray_index)
        .ok_or_else(|| Error::Precondition(format!("no certified ray {ray_index}")))?
        .clone();
    let value = p.dot(&p.log_canonical(), &ray);
    if !value.is_negative() {
        return Err(Error::Precondition(format!("ray {ray_index} has (K+B)·R = {value} ≥ 0")));
    }
    let rho_before = p.rho();
    let mut step = MMPStep {
        ray_index,
        direction: ray.direction.clone(),
        class: ray.class.clone(),
        value,
        kind: StepKind::Fibration,
        rho_before,
        rho_after: rho_before,
        lambda: None,
        target_fan: None,
    };
    match p {
        Pair::Toric { fan, boundary } => {
            let mori = toric_mori_rays(fan)?;
            let c = toric_contract(fan, &mori[ray_index])?;
            step.kind = c.kind.into();
            step.rho_after = c.fan.picard_number().max(0) as usize;
            match c.kind {
                ContractionType::Divisorial => {
                    let r = c.removed_ray.expect("divisorial contraction removes a ray");
                    let push = Push::DropRay(r);
                    let next = Pair::toric(c.fan, Some(ToricDivisor(push.apply(boundary.coeffs()))))?;
                    Ok(StepResult { step, next: Some(next), push: Some(push) })
                }
                _ => {
                    step.target_fan = Some(c.fan);
                    Ok(StepResult { step, next: None, push: None })
                }
            }
        }
        Pair::Surface { model } => {
            if rho_before == 1 {
                step.rho_after = 0;
                return Ok(StepResult { step, next: None, push: None });
            }
            let e = model.curves().iter().position(|c| {
                model.is_minus_one_class(&c.coords)
                    && c.pa.is_zero()
                    && primitive_on_ray(&c.coords).is_ok_and(|d| d == ray.direction)
            });
            if let Some(i) = e {
                let (m, push) = model.castelnuovo_contraction(&model.curves()[i].coords)?;
                step.kind = StepKind::Divisorial;
                step.rho_after = m.rho();
                return Ok(StepResult { step, next: Some(Pair::surface(m)), push: Some(Push::Matrix(push)) });
            }
            if model.self_intersection(&ray.class).is_zero() {
                step.rho_after = 1;
                return Ok(StepResult { step, next: None, push: None });
            }
            Err(Error::Uncontractible(format!(
                "ray {ray_index} carries no (−1)-curve and is not a ruling"
            )))
        }
    }
}
