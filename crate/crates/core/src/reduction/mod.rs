//! Level-ray sampling, the reduction checks and dimension bookkeeping.

pub mod albert;
pub mod checks;
pub mod hnf;
pub mod report;
pub mod sampling;
pub mod strata;

pub use albert::{albert_from_samples, albert_generators, albert_reduce, refine_level_samples, AlbertRecord};
pub use checks::{
    consensus, locally_free_check, quotient_dimension, reduced_kernel_check, transversality_check,
    DimensionMode, QuotientDimension, RayContext, ReducedKernel, SAMPLE_RANK_RTOL,
};
pub use report::{gs_dimension_report, GsReport, ReductionReport};
pub use sampling::{
    ray_parameter, sample_level_ray, sample_level_ray_on_locus, sample_strict_level, SampleSet,
};
pub use strata::{
    isotropy_label, orbit_type_partition, realizable_zero_patterns, stratified_samples, IsotropyLabel, StratumRecord,
    ZERO_MODULUS,
};
