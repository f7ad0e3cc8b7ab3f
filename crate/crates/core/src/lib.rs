pub mod action;
pub mod error;
pub mod exact;
pub mod exterior;
pub mod lie;
pub mod linalg;
pub mod newton;
pub mod reduction;
pub mod scenario;

pub use error::{Error, Result};
pub use lie::{Catalog, DualElement, LieAlgebraData};
pub use scenario::{load_scenario, Scenario};
