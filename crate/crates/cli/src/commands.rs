use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mmp_core::arith::Rational;
use mmp_core::mmp::{
    nef_polytope, ray_values, run_lmmp_scaling, run_mmp, MMPTrace, MmpRun, Pair, RunError, Strategy,
    DEFAULT_STEP_BUDGET,
};
use mmp_core::sections::{kodaira_dimension, kodaira_dimension_with, samples_csv, section_count, truncation_probe};
use mmp_core::singularities::{
    classify, crepant_pullback, dlt_hint, du_val_type, lc_polytope, lc_threshold, DuValType, ResolutionData,
};
use mmp_core::surface::{enumerate_minus_one_classes, SurfaceModel};
use mmp_core::toric::resolve::{minimal_resolution_2d, resolve_fan};
use mmp_core::toric::{toric_contract, toric_mori_rays, Fan, ToricDivisor};
use serde::Serialize;
use serde_json::{json, Value};

use crate::input::{parse_divisor, parse_fan, parse_indices, parse_pair, parse_rationals, parse_resolution, CliError};

#[derive(Debug, Parser)]
#[command(name = "mmp", version, about = "Exact MMP engine for toric fans and rational surfaces")]
pub struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fans: checks, resolution, Mori rays, contractions.
    #[command(subcommand)]
    Toric(ToricCmd),
    /// Resolution data and Picard-lattice surfaces.
    #[command(subcommand)]
    Surface(SurfaceCmd),
    /// Full runs, plain or with scaling.
    #[command(subcommand)]
    Mmp(MmpCmd),
    /// Section counts and Kodaira dimension of toric divisors.
    #[command(subcommand)]
    Kappa(KappaCmd),
    /// lc and nef polytopes.
    #[command(subcommand)]
    Polytope(PolytopeCmd),
    /// Run the local HTTP service.
    Serve(ServeArgs),
}

/// Model file; reads stdin when absent or `-`.
#[derive(Debug, Args)]
pub struct ModelArg {
    pub model: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ToricCmd {
    /// Simplicial, regular, complete, and terminal tests.
    Check(ModelArg),
    /// Regular refinement; Hirzebruch–Jung chains of 2-dimensional cones.
    Resolve(ModelArg),
    /// Extremal rays of the Mori cone with their (K+B)-degrees.
    Mori(ModelArg),
    /// Contract the extremal ray with the given index.
    Contract {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        ray: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum SurfaceCmd {
    /// Discrepancies and singularity class from resolution data.
    Classify {
        #[command(flatten)]
        model: ModelArg,
        /// Boundary coefficients, one per boundary slot (default all zero).
        #[arg(long)]
        coeffs: Option<String>,
    },
    /// Log canonical threshold of one boundary slot.
    Lct {
        #[command(flatten)]
        model: ModelArg,
        /// Slot name or index.
        #[arg(long, default_value = "0")]
        slot: String,
    },
    /// Blow up a point on the listed curves, `index:multiplicity,...` (empty for a general point).
    Blowup {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, default_value = "")]
        on: String,
    },
    /// Castelnuovo contraction of a stored (−1)-curve.
    Contract {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        curve: usize,
    },
    /// (−1)-classes on P² blown up at k points, degree at most `bound`.
    Lines {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        bound: i64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyName {
    First,
    MostNegative,
    Random,
}

impl StrategyName {
    fn label(self) -> &'static str {
        match self {
            StrategyName::First => "first",
            StrategyName::MostNegative => "most-negative",
            StrategyName::Random => "random",
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub model: ModelArg,
    #[arg(long, value_enum, default_value = "first")]
    pub strategy: StrategyName,
    /// Explicit ray indices; overrides `--strategy` and stops when they run out.
    #[arg(long)]
    pub choices: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the trace to this file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
    pub budget: usize,
}

#[derive(Debug, Subcommand)]
pub enum MmpCmd {
    /// Plain LMMP.
    Run(RunArgs),
    /// LMMP with scaling of C.
    Scale {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long = "C", alias = "c")]
        c: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum KappaCmd {
    /// h⁰(⌊mD⌋).
    Count {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        divisor: String,
        #[arg(long)]
        m: u64,
    },
    /// Kodaira dimension with its sample table.
    Dim {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        divisor: String,
        #[arg(long)]
        samples: Option<usize>,
        /// Emit the `(m, h0)` table as CSV.
        #[arg(long)]
        csv: bool,
    },
    /// Generator profiles of the section ring and its truncation.
    Probe {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        divisor: String,
        #[arg(long)]
        index: u64,
        #[arg(long)]
        bound: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum PolytopeCmd {
    /// Boundary coefficients keeping the pair lc.
    Lc {
        #[command(flatten)]
        model: ModelArg,
        /// Comma-separated slot names or indices (default all).
        #[arg(long)]
        slots: Option<String>,
    },
    /// `t ∈ [0,1]^m` with `K + B + Σ t_k D_k` nef; divisors separated by `;`.
    Nef {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        divisors: String,
    },
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8700)]
    pub port: u16,
    /// Bind all interfaces instead of localhost.
    #[arg(long)]
    pub allow_remote: bool,
    /// Directory for session snapshots, restored on start.
    #[arg(long)]
    pub persist: Option<PathBuf>,
}

/// Rendered command output.
pub enum Output {
    Json(String),
    Text(String),
}

/// Pretty JSON with a trailing newline; the byte format shared by files, stdout, and the service.
pub fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("engine types serialize");
    s.push('\n');
    s
}

fn json<T: Serialize>(v: &T) -> Output {
    Output::Json(to_pretty(v))
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
}

impl Io<'_> {
    fn read(&mut self, m: &ModelArg) -> Result<String, CliError> {
        match &m.model {
            Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)
                .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", p.display()))),
            _ => {
                let mut s = String::new();
                self.stdin
                    .read_to_string(&mut s)
                    .map_err(|e| CliError::Validation(format!("cannot read stdin: {e}")))?;
                Ok(s)
            }
        }
    }

    fn fan(&mut self, m: &ModelArg) -> Result<(Fan, ToricDivisor), CliError> {
        match parse_pair(&self.read(m)?)? {
            Pair::Toric { fan, boundary } => Ok((fan, boundary)),
            Pair::Surface { .. } => Err(CliError::Validation("expected a fan".into())),
        }
    }

    fn surface(&mut self, m: &ModelArg) -> Result<SurfaceModel, CliError> {
        match parse_pair(&self.read(m)?)? {
            Pair::Surface { model } => Ok(model),
            Pair::Toric { .. } => Err(CliError::Validation("expected a surface model".into())),
        }
    }
}

pub fn toric_check(f: &Fan) -> Result<Value, CliError> {
    let mut cones = Vec::new();
    let mut terminal = true;
    for (i, c) in f.cones().iter().enumerate() {
        let cone = f.cone(i);
        let t = if cone.check_simplicial() { Some(cone.check_terminal()?) } else { None };
        terminal &= t.as_ref().is_some_and(|t| t.terminal);
        cones.push(json!({
            "cone": c,
            "simplicial": cone.check_simplicial(),
            "regular": cone.check_regular(),
            "multiplicity": cone.multiplicity().to_string(),
            "terminal": t,
        }));
    }
    let complete = f.is_complete();
    Ok(json!({
        "regular": f.is_regular(),
        "simplicial": f.is_simplicial(),
        "terminal": terminal,
        "complete": complete,
        "picard_number": (complete && f.is_simplicial()).then(|| f.picard_number()),
        "cones": cones,
    }))
}

/// Exceptional chain, discrepancies, and class of each singular 2-dimensional cone.
pub fn surface_singularities(f: &Fan) -> Result<Vec<Value>, CliError> {
    let mut out = Vec::new();
    if f.rank() != 2 {
        return Ok(out);
    }
    for (i, c) in f.cones().iter().enumerate() {
        let cone = f.cone(i);
        if !cone.is_full_dimensional() || cone.check_regular() {
            continue;
        }
        let chain = minimal_resolution_2d(&cone)?;
        let r = ResolutionData::chain(&chain.self_intersections)?;
        let rep = crepant_pullback(&r, &[])?;
        out.push(json!({
            "cone": c,
            "exceptional_rays": chain.rays,
            "self_intersections": chain.self_intersections,
            "discrepancies": rep.discrepancies,
            "class": classify(&rep),
            "du_val": du_val_type(&r)?,
        }));
    }
    Ok(out)
}

/// Certified rays with `(K+B)·R`, in index order.
pub fn rays_view(p: &Pair) -> Result<Value, CliError> {
    Ok(serde_json::to_value(
        ray_values(p)?
            .into_iter()
            .map(|rv| {
                json!({
                    "index": rv.ray.index,
                    "direction": rv.ray.direction,
                    "class": rv.ray.class,
                    "representative": rv.ray.representative,
                    "value": rv.value,
                })
            })
            .collect::<Vec<_>>(),
    )
    .expect("serializes"))
}

/// Picard number plus what applies to the backend: singularities and κ(K+B) for fans, K² and
/// (−1)-curves for surfaces.
pub fn pair_report(p: &Pair) -> Result<Value, CliError> {
    Ok(match p {
        Pair::Toric { fan, .. } => {
            let kb = ToricDivisor(p.log_canonical());
            let kappa = kodaira_dimension(fan, &kb)?;
            json!({
                "backend": "toric",
                "rho": p.rho(),
                "dim": p.dim(),
                "singularities": surface_singularities(fan)?,
                "kappa_log_canonical": kappa.kappa,
            })
        }
        Pair::Surface { model } => json!({
            "backend": "surface",
            "rho": p.rho(),
            "k_squared": model.k_squared(),
            "minus_one_curves": model.find_minus_one_curves(),
        }),
    })
}

fn write_file(path: &PathBuf, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| CliError::Engine(format!("cannot write {}: {e}", path.display())))
}

fn mmp_command(io: &mut Io<'_>, a: &RunArgs, c: Option<&str>) -> Result<Output, CliError> {
    let p = parse_pair(&io.read(&a.model)?)?;
    let c = c.map(|spec| parse_divisor(spec, &p)).transpose()?;
    let result: Result<MMPTrace, RunError> = match &a.choices {
        Some(list) => {
            let choices = parse_indices(list)?;
            let run = match &c {
                Some(c) => MmpRun::scaling(p.clone(), c.clone(), "explicit", None),
                None => MmpRun::plain(p.clone(), "explicit", None),
            };
            let mut run = run?.with_budget(a.budget);
            let mut err = None;
            for i in choices {
                if let Err(e) = run.step(i) {
                    err = Some(e);
                    break;
                }
            }
            match err {
                None => Ok(run.into_trace()),
                Some(error) => Err(RunError { error, partial: run.into_trace() }),
            }
        }
        None => {
            let mut s = match a.strategy {
                StrategyName::Random => Strategy::random(a.seed.unwrap_or(0)),
                other => Strategy::parse(other.label(), None)?,
            };
            match &c {
                Some(c) => run_lmmp_scaling(&p, c, &mut s, a.budget),
                None => run_mmp(&p, &mut s, a.budget),
            }
        }
    };
    match result {
        Ok(t) => {
            if let Some(path) = &a.trace {
                write_file(path, &to_pretty(&t))?;
            }
            Ok(json(&t))
        }
        Err(RunError { error, partial }) => {
            if let Some(path) = &a.trace {
                write_file(path, &to_pretty(&partial))?;
            }
            Err(error.into())
        }
    }
}

fn toric_divisor(spec: &str, fan: &Fan, boundary: &ToricDivisor) -> Result<ToricDivisor, CliError> {
    let p = Pair::toric(fan.clone(), Some(boundary.clone()))?;
    Ok(ToricDivisor(parse_divisor(spec, &p)?))
}

fn slot_index(r: &ResolutionData, slot: &str) -> Result<usize, CliError> {
    if let Some(i) = r.boundary_index(slot) {
        return Ok(i);
    }
    slot.parse::<usize>()
        .ok()
        .filter(|&i| i < r.boundaries().len())
        .ok_or_else(|| CliError::Validation(format!("no boundary slot {slot:?}")))
}

fn execute(cmd: &Command, io: &mut Io<'_>) -> Result<Output, CliError> {
    match cmd {
        Command::Toric(t) => match t {
            ToricCmd::Check(m) => Ok(json(&toric_check(&parse_fan(&io.read(m)?)?)?)),
            ToricCmd::Resolve(m) => {
                let f = parse_fan(&io.read(m)?)?;
                let resolved = resolve_fan(&f)?;
                Ok(json(&json!({
                    "fan": resolved,
                    "added_rays": resolved.rays().len() - f.rays().len(),
                    "singularities": surface_singularities(&f)?,
                })))
            }
            ToricCmd::Mori(m) => {
                let (fan, boundary) = io.fan(m)?;
                let kb = fan.canonical().add(&boundary);
                let rays: Vec<Value> = toric_mori_rays(&fan)?
                    .into_iter()
                    .enumerate()
                    .map(|(i, r)| {
                        json!({
                            "index": i,
                            "value": r.dot(&kb),
                            "direction": r.direction,
                            "class": r.class,
                            "representative": r.representative,
                            "walls": r.walls,
                        })
                    })
                    .collect();
                Ok(json(&json!({ "rays": rays })))
            }
            ToricCmd::Contract { model, ray } => {
                let (fan, _) = io.fan(model)?;
                let rays = toric_mori_rays(&fan)?;
                let r = rays
                    .get(*ray)
                    .ok_or_else(|| CliError::Validation(format!("ray {ray} out of range ({} rays)", rays.len())))?;
                Ok(json(&toric_contract(&fan, r)?))
            }
        },
        Command::Surface(s) => match s {
            SurfaceCmd::Classify { model, coeffs } => {
                let r = parse_resolution(&io.read(model)?)?;
                let coeffs = match coeffs {
                    Some(c) => parse_rationals(c)?,
                    None => vec![Rational::zero(); r.boundaries().len()],
                };
                let rep = crepant_pullback(&r, &coeffs)?;
                let du_val = if coeffs.iter().all(Rational::is_zero) { du_val_type(&r)? } else { DuValType::NotDuVal };
                Ok(json(&json!({
                    "class": classify(&rep),
                    "discrepancies": rep.discrepancies,
                    "strict": rep.strict,
                    "genera": rep.genera,
                    "du_val": du_val,
                    "dlt": dlt_hint(&r, &coeffs, &rep),
                })))
            }
            SurfaceCmd::Lct { model, slot } => {
                let r = parse_resolution(&io.read(model)?)?;
                let i = slot_index(&r, slot)?;
                Ok(json(&json!({
                    "slot": i,
                    "name": r.boundaries()[i].name,
                    "lct": lc_threshold(&r, i)?,
                })))
            }
            SurfaceCmd::Blowup { model, on } => {
                let m = io.surface(model)?;
                let mut center = Vec::new();
                for item in on.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let (i, mult) = item.split_once(':').unwrap_or((item, "1"));
                    let i = i.parse().map_err(|_| CliError::Validation(format!("bad curve index {i:?}")))?;
                    let mult = mult.parse().map_err(|_| CliError::Validation(format!("bad multiplicity {mult:?}")))?;
                    center.push((i, mult));
                }
                Ok(json(&m.blow_up(&center)?))
            }
            SurfaceCmd::Contract { model, curve } => {
                let m = io.surface(model)?;
                let c = m
                    .curves()
                    .get(*curve)
                    .ok_or_else(|| CliError::Validation(format!("no curve {curve}")))?;
                let (next, push) = m.castelnuovo_contraction(&c.coords)?;
                Ok(json(&json!({ "model": next, "pushforward": push })))
            }
            SurfaceCmd::Lines { k, bound } => Ok(json(&enumerate_minus_one_classes(*k, *bound)?)),
        },
        Command::Mmp(m) => match m {
            MmpCmd::Run(a) => mmp_command(io, a, None),
            MmpCmd::Scale { run, c } => mmp_command(io, run, Some(c)),
        },
        Command::Kappa(k) => match k {
            KappaCmd::Count { model, divisor, m } => {
                let (fan, b) = io.fan(model)?;
                let d = toric_divisor(divisor, &fan, &b)?;
                Ok(json(&json!({ "m": m, "h0": section_count(&fan, &d, *m)? })))
            }
            KappaCmd::Dim { model, divisor, samples, csv } => {
                let (fan, b) = io.fan(model)?;
                let d = toric_divisor(divisor, &fan, &b)?;
                let r = match samples {
                    Some(n) => kodaira_dimension_with(&fan, &d, *n)?,
                    None => kodaira_dimension(&fan, &d)?,
                };
                Ok(if *csv { Output::Text(samples_csv(&r.samples)) } else { json(&r) })
            }
            KappaCmd::Probe { model, divisor, index, bound } => {
                let (fan, b) = io.fan(model)?;
                let d = toric_divisor(divisor, &fan, &b)?;
                Ok(json(&truncation_probe(&fan, &d, *index, *bound)?))
            }
        },
        Command::Polytope(p) => match p {
            PolytopeCmd::Lc { model, slots } => {
                let r = parse_resolution(&io.read(model)?)?;
                let slots = match slots {
                    Some(s) => s.split(',').map(|x| slot_index(&r, x.trim())).collect::<Result<Vec<_>, _>>()?,
                    None => (0..r.boundaries().len()).collect(),
                };
                Ok(json(&lc_polytope(&r, &slots)?))
            }
            PolytopeCmd::Nef { model, divisors } => {
                let p = parse_pair(&io.read(model)?)?;
                let ds = divisors
                    .split(';')
                    .map(|d| parse_divisor(d.trim(), &p))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(json(&nef_polytope(&p, &ds)?))
            }
        },
        Command::Serve(_) => unreachable!("handled by dispatch"),
    }
}

/// Parses `args` (including the program name) and runs the command; returns the exit code.
pub fn dispatch<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Command::Serve(s) = &cli.command {
        return match crate::service::serve_blocking(s) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "{e}");
                e.exit_code()
            }
        };
    }
    let mut io = Io { stdin };
    let result = execute(&cli.command, &mut io).and_then(|out| {
        let body = match out {
            Output::Json(t) | Output::Text(t) => t,
        };
        match &cli.out {
            Some(path) => write_file(path, &body),
            None => stdout.write_all(body.as_bytes()).map_err(|e| CliError::Engine(e.to_string())),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}
