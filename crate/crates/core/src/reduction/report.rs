use serde::Serialize;

use super::albert::AlbertRecord;
use super::checks::QuotientDimension;
use super::strata::StratumRecord;
use crate::lie::coadjoint::mu_integral;
use crate::lie::{DualElement, HypothesisReport};
use crate::scenario::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GsReport {
    pub integral: Option<bool>,
    pub orbit_dim: usize,
    pub fiber_dim: usize,
    pub gs_total_dim: usize,
}

/// Dimension of the Guillemin-Sternberg quotient fibred over the coadjoint
/// orbit with the contact quotient as fibre. Torus scenarios test
/// integrality against the standard lattice `Z^k`.
pub fn gs_dimension_report(scn: &Scenario, mu: &DualElement, orbit_dim: usize, fiber_dim: usize) -> GsReport {
    let alg = scn.algebra();
    let integral = if alg.is_abelian() {
        let unit: Vec<_> = (0..alg.dim())
            .map(|i| nalgebra::DVector::from_fn(alg.dim(), |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
        mu_integral(alg, mu, Some(&unit))
    } else {
        mu_integral(alg, mu, None)
    };
    GsReport {
        integral,
        orbit_dim,
        fiber_dim,
        gs_total_dim: fiber_dim + orbit_dim,
    }
}

/// Everything computed for one scenario and `mu`. Optional sections are
/// `None` when the corresponding check was not requested.
#[derive(Debug, Clone, Serialize)]
pub struct ReductionReport {
    pub scenario: String,
    pub mu: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    pub checks: Vec<String>,
    pub samples_accepted: Option<usize>,
    pub hypothesis: Option<HypothesisReport>,
    pub transversality_rate: Option<f64>,
    pub locally_free_rate: Option<f64>,
    pub reduced_kernel_ok: Option<bool>,
    pub max_principal_angle: Option<f64>,
    pub quotient: Option<QuotientDimension>,
    pub quotient_dim: Option<usize>,
    pub quotient_is_contact_dimension: Option<bool>,
    pub strata: Option<Vec<StratumRecord>>,
    pub albert: Option<AlbertRecord>,
    pub gs_dims: Option<GsReport>,
    pub reeb_flow_max_deviation: Option<f64>,
    pub failures: Vec<String>,
}

impl ReductionReport {
    pub fn new(scenario: &str, mu: &DualElement, n_samples: usize, seed: u64, checks: Vec<String>) -> Self {
        Self {
            scenario: scenario.to_string(),
            mu: mu.to_vec(),
            n_samples,
            seed,
            checks,
            samples_accepted: None,
            hypothesis: None,
            transversality_rate: None,
            locally_free_rate: None,
            reduced_kernel_ok: None,
            max_principal_angle: None,
            quotient: None,
            quotient_dim: None,
            quotient_is_contact_dimension: None,
            strata: None,
            albert: None,
            gs_dims: None,
            reeb_flow_max_deviation: None,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::Catalog;
    use crate::scenario::load_scenario;

    #[test]
    fn circle_integrality() {
        let s = load_scenario("S3", &Catalog::builtin()).unwrap();
        let r = gs_dimension_report(&s, &DualElement::new(vec![1.0]), 0, 2);
        assert_eq!(r.integral, Some(true));
        assert_eq!(r.gs_total_dim, 2);
        let r = gs_dimension_report(&s, &DualElement::new(vec![2f64.sqrt()]), 0, 2);
        assert_eq!(r.integral, Some(false));
    }

    #[test]
    fn so3_adds_orbit_dimension() {
        let s = load_scenario("SO3-bookkeeping", &Catalog::builtin()).unwrap();
        let r = gs_dimension_report(&s, &DualElement::new(vec![0.0, 0.0, 1.0]), 2, 3);
        assert_eq!(r.gs_total_dim, 5);
        assert_eq!(r.integral, Some(true));
    }
}
