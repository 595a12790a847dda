//! Discrepancies and singularity classes of surface pairs from the numerical data of a resolution.

pub mod data;
pub mod discrepancy;
pub mod du_val;

pub use data::{BoundaryData, ResolutionData};
pub use discrepancy::{
    classify, contracted_curve_singularity, crepant_pullback, dlt_hint, lc_polytope, lc_threshold,
    negativity_check, residual, ContractedCurve, DiscrepancyReport, DltHint, NegativityOutcome,
    SingularityClass, StrictCoefficient,
};
pub use du_val::{du_val_gram, du_val_type, DuValType};
