//! Toric varieties as fans.

pub mod cone;
pub mod contract;
pub mod divisor;
pub mod fan;
pub mod normal_form;
pub mod resolve;
pub mod walls;

pub use cone::{Cone, TerminalReport};
pub use contract::{toric_contract, ContractionType, ToricContraction};
pub use divisor::{divisor_polytope, ToricDivisor};
pub use fan::Fan;
pub use normal_form::{is_isomorphic, normal_form};
pub use walls::{toric_mori_rays, wall_curves, MoriRay, WallCurve};
