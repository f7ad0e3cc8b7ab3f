//! Exact polynomial differential forms, embedded manifolds and the contact
//! condition.

pub mod contact;
pub mod forms;
pub mod manifold;
pub mod poly;

pub use contact::{contact_check, reeb_field, ContactForm, ContactVolume, CONTACT_TOL};
pub use forms::{eval_1form, exterior_derivative, Poly1Form, Poly2Form};
pub use manifold::{EmbeddedManifold, TangentFrame, ON_MANIFOLD_TOL};
pub use poly::{parse_rational, q, qi, PolyMap, QMatrix, Rational};
