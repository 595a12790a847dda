use std::fmt;

use mmp_core::arith::Rational;
use mmp_core::mmp::Pair;
use mmp_core::singularities::ResolutionData;
use mmp_core::surface::SurfaceModel;
use mmp_core::toric::{Fan, ToricDivisor};
use mmp_core::Error;
use serde::de::DeserializeOwned;
use serde_json::Value;

/// Exit 2 for input that fails validation, exit 3 for engine errors on valid input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Validation(String),
    Engine(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Engine(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Engine(m) => write!(f, "engine error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

pub fn is_validation(e: &Error) -> bool {
    matches!(
        e,
        Error::ZeroVector
            | Error::DimensionMismatch { .. }
            | Error::NotSymmetric
            | Error::InvalidCone(_)
            | Error::InvalidFan(_)
            | Error::InvalidModel(_)
            | Error::InvalidResolution(_)
    )
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if is_validation(&e) {
            CliError::Validation(e.to_string())
        } else {
            CliError::Engine(e.to_string())
        }
    }
}

/// Any of the accepted model files.
#[derive(Debug, Clone)]
pub enum Model {
    Pair(Pair),
    Resolution(ResolutionData),
}

fn typed<T: DeserializeOwned>(v: Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        CliError::Validation(format!("at `{path}`: {}", e.into_inner()))
    })
}

/// Detects the format from its keys: `kind` (a serialized pair), `rays` (fan), `basis`
/// (surface), `K_dot_E` (resolution data).
pub fn parse_model(text: &str) -> Result<Model, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Validation(format!("malformed JSON: {e}")))?;
    let Value::Object(map) = &v else {
        return Err(CliError::Validation("model must be a JSON object".into()));
    };
    if map.contains_key("kind") {
        Ok(Model::Pair(typed(v)?))
    } else if map.contains_key("rays") {
        // a fan file may carry a boundary on its rays
        let Value::Object(mut map) = v else { unreachable!() };
        let boundary = match map.remove("boundary") {
            Some(b) => Some(typed::<ToricDivisor>(b).map_err(|e| CliError::Validation(format!("boundary: {e}")))?),
            None => None,
        };
        let fan: Fan = typed(Value::Object(map))?;
        Ok(Model::Pair(Pair::toric(fan, boundary)?))
    } else if map.contains_key("basis") {
        Ok(Model::Pair(Pair::surface(typed::<SurfaceModel>(v)?)))
    } else if map.contains_key("K_dot_E") {
        Ok(Model::Resolution(typed(v)?))
    } else {
        Err(CliError::Validation("unrecognized model: expected a fan, surface, or resolution object".into()))
    }
}

/// A fan file read without the completeness and simpliciality a pair requires.
pub fn parse_fan(text: &str) -> Result<Fan, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Validation(format!("malformed JSON: {e}")))?;
    let Value::Object(mut map) = v else {
        return Err(CliError::Validation("model must be a JSON object".into()));
    };
    map.remove("boundary");
    typed(Value::Object(map))
}

pub fn parse_pair(text: &str) -> Result<Pair, CliError> {
    match parse_model(text)? {
        Model::Pair(p) => Ok(p),
        Model::Resolution(_) => Err(CliError::Validation("expected a fan or surface model".into())),
    }
}

pub fn parse_resolution(text: &str) -> Result<ResolutionData, CliError> {
    match parse_model(text)? {
        Model::Resolution(r) => Ok(r),
        Model::Pair(_) => Err(CliError::Validation("expected resolution data".into())),
    }
}

pub fn parse_rationals(s: &str) -> Result<Vec<Rational>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.trim().parse::<Rational>().map_err(|_| CliError::Validation(format!("not a rational: {x:?}"))))
        .collect()
}

/// `anticanonical`, `canonical`, `zero`, or comma-separated coefficients.
pub fn parse_divisor(spec: &str, p: &Pair) -> Result<Vec<Rational>, CliError> {
    let d = match spec {
        "anticanonical" => p.anticanonical(),
        "canonical" => p.canonical(),
        "zero" => vec![Rational::zero(); p.divisor_len()],
        _ => parse_rationals(spec)?,
    };
    p.check_divisor(&d)?;
    Ok(d)
}

pub fn parse_indices(s: &str) -> Result<Vec<usize>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| CliError::Validation(format!("not an index: {x:?}"))))
        .collect()
}
