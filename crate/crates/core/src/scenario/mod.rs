//! Scenario registry, run configuration, report emission and the
//! acceptance suite.

pub mod config;
pub mod json;
pub mod model;
pub mod run;
pub mod suite;

pub use config::{parse_checks, parse_mu, Check, RunConfig, ScenarioSource, DEFAULT_SAMPLES};
pub use json::to_json_bytes;
pub use model::{load_scenario, registry, scenario_from_toml, DeclaredFacts, Geometry, Scenario, REGISTRY_IDS};
pub use run::{run, run_scenario};
pub use suite::{check_all, CheckAllReport, CriterionResult};
