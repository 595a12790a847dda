//! Rational surfaces as Picard lattices.

pub mod enumerate;
pub mod model;

pub use enumerate::{count_minus_one_classes, enumerate_minus_one_classes, minus_one_orbits, MinusOneOrbit};
pub use model::{Curve, CurveFlag, ExtremalVerdict, NefVerdict, SurfaceModel, SurfaceRay};
