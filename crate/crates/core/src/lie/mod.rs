//! Lie algebra data, coadjoint calculus and the linear-algebra lemmas used
//! by the reduction checks.

pub mod algebra;
pub mod bilinear;
pub mod coadjoint;
pub mod lemmas;
pub mod slice;

pub use algebra::{Catalog, DualElement, LieAlgebraData};
pub use bilinear::{bilinear_kernel, restricted_kernel, standard_symplectic, symplectic_perp};
pub use coadjoint::{
    annihilator_of, check_reduction_hypotheses, coadjoint_action, coadjoint_matrix,
    coadjoint_stabilizer, kernel_algebra, orbit_tangent, HypothesisReport,
};
pub use slice::{dual_form, slice_intersection_check, SliceReport};
