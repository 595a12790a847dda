//! Section counts, Kodaira dimension and section-ring probes.

pub mod kappa;
pub mod probe;
pub mod rules;

pub use kappa::{
    big_check, check_kappa_scaling, growth_degree, kappa, kodaira_dimension, kodaira_dimension_with, samples_csv,
    section_count, BigReport, Kappa, KappaReport, Sample, DEFAULT_SAMPLES,
};
pub use probe::{truncation_probe, GeneratorProfile, LevelProfile, TruncationReport};
pub use rules::{hypersurface_canonical_degree, kappa_curve, plane_curve_genus};
