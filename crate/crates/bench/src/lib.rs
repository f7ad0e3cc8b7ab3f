//! Shared fixtures for the benchmarks in `benches/`.

use contact_reduction::reduction::sample_level_ray;
use contact_reduction::{load_scenario, Catalog, DualElement, Scenario};

/// A registry scenario together with one point of its level ray at the
/// default `mu`.
pub struct Fixture {
    pub scenario: Scenario,
    pub mu: DualElement,
    pub point: Vec<f64>,
}

pub fn fixture(id: &str) -> Fixture {
    let scenario = load_scenario(id, &Catalog::builtin()).expect("registry scenario");
    let mu = scenario.mu(scenario.default_mu()).expect("default mu");
    let set = sample_level_ray(&scenario, &mu, 1, 0).expect("sampling runs");
    let point = set.points.first().expect("nonempty level ray").as_slice().to_vec();
    Fixture { scenario, mu, point }
}
