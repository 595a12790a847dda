use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pair::Pair;
use super::step::{mmp_step, nef_threshold, ray_values, threshold_on, MMPStep, RayValue, StepKind};
use crate::arith::lattice::LatticeVector;
use crate::arith::rational::Rational;
use crate::error::{Error, Result};

pub const TRACE_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_STEP_BUDGET: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FinalState {
    MinimalModel,
    MoriFibreSpace,
    SmallStop,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MMPTrace {
    pub schema_version: u32,
    pub backend: String,
    pub strategy: String,
    pub seed: Option<u64>,
    /// The scaling divisor `C` on the initial model; absent for a plain run.
    pub scaling: Option<Vec<Rational>>,
    pub initial: Pair,
    pub steps: Vec<MMPStepRecord>,
    pub final_state: Option<FinalState>,
    pub final_model: Pair,
}

/// `MMPStep` in the shape it takes inside a trace file (deserializable, no fan payload).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MMPStepRecord {
    pub ray_index: usize,
    pub direction: LatticeVector,
    pub class: Vec<Rational>,
    pub value: Rational,
    pub kind: StepKind,
    pub rho_before: usize,
    pub rho_after: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Rational>,
}

impl From<&MMPStep> for MMPStepRecord {
    fn from(s: &MMPStep) -> Self {
        MMPStepRecord {
            ray_index: s.ray_index,
            direction: s.direction.clone(),
            class: s.class.clone(),
            value: s.value.clone(),
            kind: s.kind,
            rho_before: s.rho_before,
            rho_after: s.rho_after,
            lambda: s.lambda.clone(),
        }
    }
}

/// A ray the run may contract next.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub ray_index: usize,
    pub direction: LatticeVector,
    pub class: Vec<Rational>,
    /// `(K + B) · R`.
    pub value: Rational,
    /// `C · R` in a scaling run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_value: Option<Rational>,
}

/// Picks the ray index to contract among the candidates (never empty).
pub trait Chooser {
    fn choose(&mut self, candidates: &[Candidate]) -> Result<usize>;
}

impl<F: FnMut(&[Candidate]) -> Result<usize>> Chooser for F {
    fn choose(&mut self, candidates: &[Candidate]) -> Result<usize> {
        self(candidates)
    }
}

#[derive(Debug, Clone)]
pub enum Strategy {
    /// Lexicographically smallest representative class.
    First,
    MostNegative,
    Random(ChaCha8Rng, u64),
    /// Fixed ray indices, consumed in order.
    Explicit(std::collections::VecDeque<usize>),
}

impl Strategy {
    pub fn random(seed: u64) -> Self {
        Strategy::Random(ChaCha8Rng::seed_from_u64(seed), seed)
    }

    pub fn explicit(choices: &[usize]) -> Self {
        Strategy::Explicit(choices.iter().copied().collect())
    }

    pub fn parse(name: &str, seed: Option<u64>) -> Result<Self> {
        match name {
            "first" => Ok(Strategy::First),
            "most-negative" => Ok(Strategy::MostNegative),
            "random" => Ok(Strategy::random(seed.unwrap_or(0))),
            _ => Err(Error::Precondition(format!("unknown strategy {name:?}"))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Strategy::First => "first",
            Strategy::MostNegative => "most-negative",
            Strategy::Random(..) => "random",
            Strategy::Explicit(_) => "explicit",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Strategy::Random(_, s) => Some(*s),
            _ => None,
        }
    }
}

fn lexicographic_first(c: &[Candidate]) -> &Candidate {
    c.iter().min_by(|a, b| a.class.cmp(&b.class).then(a.ray_index.cmp(&b.ray_index))).expect("non-empty")
}

impl Chooser for Strategy {
    fn choose(&mut self, c: &[Candidate]) -> Result<usize> {
        Ok(match self {
            Strategy::First => lexicographic_first(c).ray_index,
            Strategy::MostNegative => {
                let m = c.iter().map(|x| &x.value).min().expect("non-empty");
                let tied: Vec<Candidate> = c.iter().filter(|x| x.value == *m).cloned().collect();
                lexicographic_first(&tied).ray_index
            }
            Strategy::Random(rng, _) => c[rng.random_range(0..c.len())].ray_index,
            Strategy::Explicit(q) => q
                .pop_front()
                .ok_or_else(|| Error::Precondition("explicit choices exhausted".into()))?,
        })
    }
}

/// A run in progress: plain when `c` is `None`, with scaling otherwise.
#[derive(Debug, Clone)]
pub struct MmpRun {
    trace: MMPTrace,
    c: Option<Vec<Rational>>,
    budget: usize,
    /// Ray values of the current model.
    values: Vec<RayValue>,
}

impl MmpRun {
    pub fn plain(p: Pair, strategy: &str, seed: Option<u64>) -> Result<Self> {
        Self::start(p, None, strategy, seed)
    }

    /// Requires `K + B + C` nef.
    pub fn scaling(p: Pair, c: Vec<Rational>, strategy: &str, seed: Option<u64>) -> Result<Self> {
        p.check_divisor(&c)?;
        let t = nef_threshold(&p, &c)?;
        if t.lambda > Rational::one() {
            return Err(Error::Precondition(format!("K+B+C is not nef (threshold {})", t.lambda)));
        }
        Self::start(p, Some(c), strategy, seed)
    }

    fn start(p: Pair, c: Option<Vec<Rational>>, strategy: &str, seed: Option<u64>) -> Result<Self> {
        let trace = MMPTrace {
            schema_version: TRACE_SCHEMA_VERSION,
            backend: p.backend().into(),
            strategy: strategy.into(),
            seed,
            scaling: c.clone(),
            initial: p.clone(),
            steps: Vec::new(),
            final_state: None,
            final_model: p,
        };
        let mut run = MmpRun { trace, c, budget: DEFAULT_STEP_BUDGET, values: Vec::new() };
        run.settle()?;
        Ok(run)
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    fn settle(&mut self) -> Result<()> {
        self.values = ray_values(&self.trace.final_model)?;
        if self.values.iter().all(|r| !r.value.is_negative()) {
            self.trace.final_state = Some(FinalState::MinimalModel);
        }
        Ok(())
    }

    pub fn trace(&self) -> &MMPTrace {
        &self.trace
    }

    pub fn into_trace(self) -> MMPTrace {
        self.trace
    }

    pub fn current(&self) -> &Pair {
        &self.trace.final_model
    }

    pub fn scaling_divisor(&self) -> Option<&[Rational]> {
        self.c.as_deref()
    }

    pub fn is_finished(&self) -> bool {
        self.trace.final_state.is_some()
    }

    /// The current `λ` of a scaling run.
    pub fn lambda(&self) -> Result<Option<Rational>> {
        match &self.c {
            Some(c) => Ok(Some(threshold_on(self.current(), c, &self.values)?.lambda)),
            None => Ok(None),
        }
    }

    /// Rays eligible next: `(K+B)`-negative, and `(K+B+λC)`-trivial in a scaling run.
    pub fn candidates(&self) -> Result<Vec<Candidate>> {
        if self.is_finished() {
            return Ok(Vec::new());
        }
        let p = self.current();
        let lambda = self.lambda()?;
        let mut out = Vec::new();
        for rv in self.values.iter().cloned() {
            if !rv.value.is_negative() {
                continue;
            }
            let c_value = self.c.as_ref().map(|c| p.dot(c, &rv.ray));
            if let (Some(l), Some(cv)) = (&lambda, &c_value) {
                if !(&rv.value + &(l * cv)).is_zero() {
                    continue;
                }
            }
            out.push(Candidate {
                ray_index: rv.ray.index,
                direction: rv.ray.direction,
                class: rv.ray.class,
                value: rv.value,
                c_value,
            });
        }
        Ok(out)
    }

    /// Contracts candidate `ray_index`.
    pub fn step(&mut self, ray_index: usize) -> Result<&MMPStepRecord> {
        if self.is_finished() {
            return Err(Error::Precondition("run is finished".into()));
        }
        if self.trace.steps.len() >= self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        let cands = self.candidates()?;
        if !cands.iter().any(|c| c.ray_index == ray_index) {
            return Err(Error::Precondition(format!("ray {ray_index} is not a candidate")));
        }
        let lambda = self.lambda()?;
        if let (Some(l), Some(prev)) = (&lambda, self.trace.steps.last().and_then(|s| s.lambda.as_ref())) {
            if l > prev {
                return Err(Error::Internal(format!("scaling value increased from {prev} to {l}")));
            }
        }
        let res = mmp_step(self.current(), ray_index)?;
        let mut rec = MMPStepRecord::from(&res.step);
        rec.lambda = lambda;
        self.trace.steps.push(rec);
        match (res.step.kind, res.next, res.push) {
            (StepKind::Divisorial, Some(next), Some(push)) => {
                self.c = self.c.as_ref().map(|c| push.apply(c));
                self.trace.final_model = next;
                self.settle()?;
            }
            (StepKind::Small, ..) => self.trace.final_state = Some(FinalState::SmallStop),
            _ => self.trace.final_state = Some(FinalState::MoriFibreSpace),
        }
        Ok(self.trace.steps.last().expect("just pushed"))
    }

    /// Runs to completion, asking `chooser` whenever a choice is needed.
    pub fn run(&mut self, chooser: &mut dyn Chooser) -> Result<()> {
        while !self.is_finished() {
            let cands = self.candidates()?;
            if cands.is_empty() {
                return Err(Error::Internal("unfinished run without candidates".into()));
            }
            let i = chooser.choose(&cands)?;
            self.step(i)?;
        }
        Ok(())
    }
}

/// Error from a run together with the trace up to the failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunError {
    pub error: Error,
    pub partial: MMPTrace,
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} after {} steps", self.error, self.partial.steps.len())
    }
}

impl std::error::Error for RunError {}

fn drive(mut run: MmpRun, chooser: &mut dyn Chooser) -> std::result::Result<MMPTrace, RunError> {
    match run.run(chooser) {
        Ok(()) => Ok(run.into_trace()),
        Err(error) => Err(RunError { error, partial: run.into_trace() }),
    }
}

fn start_error(error: Error, p: &Pair) -> RunError {
    let partial = MMPTrace {
        schema_version: TRACE_SCHEMA_VERSION,
        backend: p.backend().into(),
        strategy: String::new(),
        seed: None,
        scaling: None,
        initial: p.clone(),
        steps: Vec::new(),
        final_state: None,
        final_model: p.clone(),
    };
    RunError { error, partial }
}

/// LMMP with scaling of `c`.
pub fn run_lmmp_scaling(
    p: &Pair,
    c: &[Rational],
    strategy: &mut Strategy,
    budget: usize,
) -> std::result::Result<MMPTrace, RunError> {
    let run = MmpRun::scaling(p.clone(), c.to_vec(), strategy.label(), strategy.seed())
        .map_err(|e| start_error(e, p))?
        .with_budget(budget);
    drive(run, strategy)
}

/// LMMP with scaling, choices supplied by a callback.
pub fn run_lmmp_scaling_with(
    p: &Pair,
    c: &[Rational],
    callback: &mut dyn Chooser,
    budget: usize,
) -> std::result::Result<MMPTrace, RunError> {
    let run = MmpRun::scaling(p.clone(), c.to_vec(), "interactive", None)
        .map_err(|e| start_error(e, p))?
        .with_budget(budget);
    drive(run, callback)
}

/// Plain LMMP: any `(K+B)`-negative ray may be chosen.
pub fn run_mmp(p: &Pair, strategy: &mut Strategy, budget: usize) -> std::result::Result<MMPTrace, RunError> {
    let run = MmpRun::plain(p.clone(), strategy.label(), strategy.seed())
        .map_err(|e| start_error(e, p))?
        .with_budget(budget);
    drive(run, strategy)
}

/// Re-executes the recorded choices from the initial model and checks every step and the end state.
pub fn replay(trace: &MMPTrace) -> Result<Pair> {
    Ok(MmpRun::from_trace(trace)?.current().clone())
}

impl MmpRun {
    /// Rebuilds a run by replaying `trace`; fails if any step or the end state differs.
    pub fn from_trace(trace: &MMPTrace) -> Result<Self> {
        let mut run = match &trace.scaling {
            Some(c) => MmpRun::scaling(trace.initial.clone(), c.clone(), &trace.strategy, trace.seed)?,
            None => MmpRun::plain(trace.initial.clone(), &trace.strategy, trace.seed)?,
        }
        .with_budget(usize::MAX);
        for s in &trace.steps {
            let got = run.step(s.ray_index)?.clone();
            if got != *s {
                return Err(Error::Internal(format!("replay diverged at ray {}", s.ray_index)));
            }
        }
        if run.trace() != trace {
            return Err(Error::Internal("replay reached a different end state".into()));
        }
        run.budget = DEFAULT_STEP_BUDGET.max(trace.steps.len());
        Ok(run)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::q;
    use crate::surface::SurfaceModel;
    use crate::toric::fan::standard::*;
    use crate::toric::is_isomorphic;

    fn f1() -> Pair {
        Pair::toric(hirzebruch(1), None).unwrap()
    }

    #[test]
    fn f1_first_is_one_fibration_step() {
        let p = f1();
        let t = run_lmmp_scaling(&p, &p.anticanonical(), &mut Strategy::First, 64).unwrap();
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.steps[0].kind, StepKind::Fibration);
        assert_eq!(t.final_state, Some(FinalState::MoriFibreSpace));
        assert_eq!(t.steps[0].lambda, Some(q(1, 1)));
        assert_eq!(replay(&t).unwrap(), t.final_model);
    }

    #[test]
    fn f1_section_first_goes_through_p2() {
        let p = f1();
        let mut s = Strategy::explicit(&[1, 0]);
        let t = run_lmmp_scaling(&p, &p.anticanonical(), &mut s, 64).unwrap();
        let kinds: Vec<StepKind> = t.steps.iter().map(|s| s.kind).collect();
        assert_eq!(kinds, vec![StepKind::Divisorial, StepKind::Fibration]);
        let Pair::Toric { fan, .. } = &t.final_model else { panic!() };
        assert!(is_isomorphic(fan, &p2()).unwrap());
    }

    #[test]
    fn already_nef() {
        let p = Pair::toric(p2(), Some(crate::toric::ToricDivisor::from_i64(&[1, 1, 1]))).unwrap();
        let t = run_mmp(&p, &mut Strategy::First, 64).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.final_state, Some(FinalState::MinimalModel));
    }

    #[test]
    fn three_points_scaling() {
        let p = Pair::surface(SurfaceModel::p2_blowup(3).unwrap());
        let c = SurfaceModel::class_from_i64(&[16, -3, -2, -1]);
        for strategy in [Strategy::First, Strategy::MostNegative, Strategy::random(7)] {
            let mut s = strategy;
            let t = run_lmmp_scaling(&p, &c, &mut s, 64).unwrap();
            let kinds: Vec<StepKind> = t.steps.iter().map(|s| s.kind).collect();
            assert_eq!(kinds, vec![StepKind::Divisorial, StepKind::Divisorial, StepKind::Divisorial, StepKind::Fibration]);
            let l: Vec<Rational> = t.steps.iter().map(|s| s.lambda.clone().unwrap()).collect();
            assert!(l.windows(2).all(|w| w[0] >= w[1]), "{l:?}");
            replay(&t).unwrap();
        }
    }

    #[test]
    fn budget_and_bad_choice() {
        let p = Pair::surface(SurfaceModel::p2_blowup(3).unwrap());
        let err = run_mmp(&p, &mut Strategy::First, 1).unwrap_err();
        assert_eq!(err.error, Error::BudgetExceeded(1));
        assert_eq!(err.partial.steps.len(), 1);
        let mut run = MmpRun::plain(f1(), "explicit", None).unwrap();
        assert!(run.step(7).is_err());
        run.step(0).unwrap();
        assert!(run.step(0).is_err());
    }

    #[test]
    fn interactive_callback_sees_candidates() {
        let p = f1();
        let mut seen = Vec::new();
        let mut cb = |c: &[Candidate]| -> Result<usize> {
            seen.push(c.len());
            Ok(c.last().unwrap().ray_index)
        };
        let t = run_lmmp_scaling_with(&p, &p.anticanonical(), &mut cb, 64).unwrap();
        assert_eq!(seen, vec![2, 1]);
        assert_eq!(t.steps.len(), 2);
    }
}
