//! Linear group actions, contact moment maps and the Reeb flow.

pub mod flow;
pub mod linear;
pub mod moment;

pub use flow::{reeb_flow_level_invariance, FlowReport, REEB_STEPS};
pub use linear::{generator_field, LinearAction};
pub use moment::{
    conformal_rescale, infinitesimal_equivariance_gap, isotropy_gram, moment_differential_check,
    moment_image_annihilator, moment_map, reeb_aligned_subalgebra, symplectization_moment,
    MomentDifferential, MomentMap, MomentValue,
};
