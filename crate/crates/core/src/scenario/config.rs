//! Run configuration: TOML files and the equivalent programmatic form.
//!
//! ```toml
//! scenario = "S5-T2"          # or: scenario_file = "my_scenario.toml"
//! samples = 200
//! seed = 0
//! out = "report.json"
//!
//! [mu]
//! coords = ["2", "1"]         # exact rationals, "p/q" accepted
//!
//! [checks]
//! enabled = ["hypotheses", "transversality", "reduced_kernel"]
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::model::{load_scenario, scenario_from_toml, Scenario};
use crate::error::{Error, Result};
use crate::exterior::{parse_rational, Rational};
use crate::lie::Catalog;

pub const DEFAULT_SAMPLES: usize = 200;

/// Checks a run can request, listed in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Hypotheses,
    Transversality,
    ReducedKernel,
    Strata,
    Albert,
    Gs,
    ReebFlow,
}

impl Check {
    pub const ALL: [Check; 7] = [
        Check::Hypotheses,
        Check::Transversality,
        Check::ReducedKernel,
        Check::Strata,
        Check::Albert,
        Check::Gs,
        Check::ReebFlow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Hypotheses => "hypotheses",
            Check::Transversality => "transversality",
            Check::ReducedKernel => "reduced_kernel",
            Check::Strata => "strata",
            Check::Albert => "albert",
            Check::Gs => "gs",
            Check::ReebFlow => "reeb_flow",
        }
    }

    /// Checks that apply to `scn`: bookkeeping scenarios have no geometry to
    /// sample, and strata need a torus.
    pub fn defaults_for(scn: &Scenario) -> Vec<Check> {
        if !scn.is_numeric() {
            return vec![Check::Hypotheses, Check::Transversality, Check::Gs];
        }
        let torus = scn.weights().is_ok();
        Check::ALL.into_iter().filter(|c| torus || *c != Check::Strata).collect()
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::UnknownCheck(s.trim().to_string()))
    }
}

/// Parses a comma-separated check list; the empty string is the empty set.
pub fn parse_checks(s: &str) -> Result<Vec<Check>> {
    let mut out: Vec<Check> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// Parses comma-separated rationals such as `2,1` or `1/2,-3`.
pub fn parse_mu(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(|t| parse_rational(t.trim())).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSource {
    Registry(String),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioSource,
    /// `None` selects the scenario's default `mu`.
    pub mu: Option<Vec<Rational>>,
    pub n_samples: usize,
    pub seed: u64,
    /// `None` runs [`Check::defaults_for`] the scenario.
    pub checks: Option<Vec<Check>>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(scenario: &str) -> Self {
        Self {
            scenario: ScenarioSource::Registry(scenario.to_string()),
            mu: None,
            n_samples: DEFAULT_SAMPLES,
            seed: 0,
            checks: None,
            out: None,
        }
    }

    pub fn with_mu(mut self, mu: Vec<Rational>) -> Self {
        self.mu = Some(mu);
        self
    }

    pub fn with_checks(mut self, checks: &[Check]) -> Self {
        let mut c = checks.to_vec();
        c.sort();
        c.dedup();
        self.checks = Some(c);
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.n_samples = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Parses a TOML run file. Relative `scenario_file` paths resolve
    /// against `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let f: RunFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let scenario = match (f.scenario, f.scenario_file) {
            (Some(id), None) => ScenarioSource::Registry(id),
            (None, Some(p)) => ScenarioSource::File(base_dir.join(p)),
            _ => {
                return Err(Error::Parse(
                    "exactly one of `scenario` and `scenario_file` must be given".into(),
                ))
            }
        };
        let mu = f
            .mu
            .map(|m| m.coords.iter().map(|c| parse_rational(c)).collect::<Result<Vec<_>>>())
            .transpose()?;
        let checks = f
            .checks
            .map(|c| {
                let mut v = c.enabled.iter().map(|s| s.parse()).collect::<Result<Vec<Check>>>()?;
                v.sort();
                v.dedup();
                Ok::<_, Error>(v)
            })
            .transpose()?;
        let cfg = Self {
            scenario,
            mu,
            n_samples: f.samples.unwrap_or(DEFAULT_SAMPLES),
            seed: f.seed.unwrap_or(0),
            checks,
            out: f.out.map(|p| base_dir.join(p)),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::Parse("samples must be at least 1".into()));
        }
        Ok(())
    }

    /// The configured checks, or the scenario defaults when none are set.
    pub fn checks_for(&self, scn: &Scenario) -> Vec<Check> {
        self.checks.clone().unwrap_or_else(|| Check::defaults_for(scn))
    }

    pub fn load_scenario(&self, catalog: &Catalog) -> Result<Scenario> {
        match &self.scenario {
            ScenarioSource::Registry(id) => load_scenario(id, catalog),
            ScenarioSource::File(p) => scenario_from_toml(&std::fs::read_to_string(p)?, catalog),
        }
    }

    /// The configured `mu`, or the scenario default; length is checked
    /// against the algebra.
    pub fn mu_coords(&self, scn: &Scenario) -> Result<Vec<Rational>> {
        let mu = self.mu.clone().unwrap_or_else(|| scn.default_mu().to_vec());
        if mu.len() != scn.algebra().dim() {
            return Err(Error::DimensionMismatch {
                expected: scn.algebra().dim(),
                found: mu.len(),
            });
        }
        Ok(mu)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunFile {
    scenario: Option<String>,
    scenario_file: Option<PathBuf>,
    samples: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    mu: Option<MuSection>,
    checks: Option<ChecksSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MuSection {
    coords: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChecksSection {
    enabled: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{q, qi};

    #[test]
    fn parses_full_file() {
        let cfg = RunConfig::from_toml(
            r#"
scenario = "S5-T2"
samples = 40
seed = 3
out = "r.json"
[mu]
coords = ["2", "1/2"]
[checks]
enabled = ["reduced_kernel", "hypotheses"]
"#,
            Path::new("/tmp"),
        )
        .unwrap();
        assert_eq!(cfg.scenario, ScenarioSource::Registry("S5-T2".into()));
        assert_eq!(cfg.mu, Some(vec![qi(2), q(1, 2)]));
        assert_eq!(cfg.n_samples, 40);
        assert_eq!(cfg.checks, Some(vec![Check::Hypotheses, Check::ReducedKernel]));
        assert_eq!(cfg.out, Some(PathBuf::from("/tmp/r.json")));
    }

    #[test]
    fn defaults_and_errors() {
        let cfg = RunConfig::from_toml("scenario = \"E1\"", Path::new(".")).unwrap();
        assert_eq!((cfg.n_samples, cfg.seed), (200, 0));
        assert_eq!(cfg.checks, None);
        assert!(RunConfig::from_toml("scenario = \"E1\"\nsamples = 0", Path::new(".")).is_err());
        assert!(RunConfig::from_toml("samples = 3", Path::new(".")).is_err());
        assert!(matches!(parse_checks("albert,nope"), Err(Error::UnknownCheck(_))));
        assert_eq!(parse_checks("").unwrap(), vec![]);
        assert_eq!(parse_mu("1/3, -2").unwrap(), vec![q(1, 3), qi(-2)]);
    }

    #[test]
    fn mu_length_is_checked() {
        let cat = Catalog::builtin();
        let cfg = RunConfig::new("S5-T2").with_mu(vec![qi(1)]);
        let scn = cfg.load_scenario(&cat).unwrap();
        assert!(matches!(cfg.mu_coords(&scn), Err(Error::DimensionMismatch { .. })));
    }
}
