//! Executes the checks of a run configuration against one scenario.

use nalgebra::DVector;

use super::config::{Check, RunConfig};
use super::json::to_json_bytes;
use super::model::Scenario;
use crate::action::reeb_flow_level_invariance;
use crate::error::Result;
use crate::lie::{check_reduction_hypotheses, coadjoint_stabilizer, Catalog, DualElement};
use crate::reduction::checks::{locally_free_at, reduced_kernel_at, transversality_at};
use crate::reduction::{
    albert_reduce, gs_dimension_report, orbit_type_partition, quotient_dimension, sample_level_ray,
    stratified_samples, QuotientDimension, RayContext, ReductionReport, SampleSet,
};

/// Reeb-flow horizon and sample count used by the `reeb_flow` check.
pub const REEB_HORIZON: f64 = 1.0;
pub const REEB_SAMPLES: usize = 20;
pub const REEB_DEVIATION_TOL: f64 = 1e-6;
pub const WITNESS_TOL: f64 = 1e-10;

/// Unit lattice `Z^k` for tori, `None` otherwise (the catalog lattice is
/// used then).
fn torus_lattice(scn: &Scenario) -> Option<Vec<DVector<f64>>> {
    let k = scn.algebra().dim();
    scn.weights()
        .ok()
        .map(|_| (0..k).map(|i| DVector::from_fn(k, |j, _| if i == j { 1.0 } else { 0.0 })).collect())
}

struct Runner<'a> {
    scn: &'a Scenario,
    mu: DualElement,
    cfg: &'a RunConfig,
    report: ReductionReport,
    samples: Option<SampleSet>,
    quotient: Option<QuotientDimension>,
}

impl Runner<'_> {
    fn fail(&mut self, check: Check, msg: impl Into<String>) {
        self.report.failures.push(format!("{check}: {}", msg.into()));
    }

    fn ray_samples(&mut self) -> Result<&SampleSet> {
        if self.samples.is_none() {
            let s = sample_level_ray(self.scn, &self.mu, self.cfg.n_samples, self.cfg.seed)?;
            self.report.samples_accepted = Some(s.len());
            self.samples = Some(s);
        }
        Ok(self.samples.as_ref().expect("just sampled"))
    }

    /// Quotient dimension from ray samples (numeric) or declared data.
    fn quotient(&mut self, check: Check) -> Option<QuotientDimension> {
        if self.quotient.is_some() {
            return self.quotient.clone();
        }
        let res = if self.scn.is_numeric() {
            match self.ray_samples() {
                Ok(s) if s.is_empty() => {
                    let why = s.diagnostic.clone().unwrap_or_default();
                    self.fail(check, format!("level ray is empty ({why})"));
                    return None;
                }
                Ok(s) => {
                    let s = s.clone();
                    quotient_dimension(self.scn, &self.mu, Some(&s))
                }
                Err(e) => Err(e),
            }
        } else {
            quotient_dimension(self.scn, &self.mu, None)
        };
        match res {
            Ok(q) => {
                let odd = q.quotient_dim % 2 == 1;
                self.report.quotient_dim = Some(q.quotient_dim);
                self.report.quotient_is_contact_dimension = Some(odd);
                self.report.quotient = Some(q.clone());
                if !odd {
                    self.fail(
                        check,
                        format!("quotient dimension {} is even, so the quotient is not contact", q.quotient_dim),
                    );
                }
                self.quotient = Some(q.clone());
                Some(q)
            }
            Err(e) => {
                self.fail(check, e.to_string());
                None
            }
        }
    }

    fn hypotheses(&mut self) {
        let lattice = torus_lattice(self.scn);
        match check_reduction_hypotheses(self.scn.algebra(), &self.mu, lattice.as_deref()) {
            Ok(h) => {
                if !h.sum_condition_holds {
                    self.fail(Check::Hypotheses, "ker mu + g_mu does not span g");
                }
                self.report.hypothesis = Some(h);
            }
            Err(e) => self.fail(Check::Hypotheses, e.to_string()),
        }
    }

    fn transversality(&mut self) -> Result<()> {
        if self.scn.is_numeric() {
            let set = self.ray_samples()?.clone();
            let geo = self.scn.geometry()?;
            let ctx = RayContext::new(self.scn, &self.mu)?;
            let (mut t, mut l, mut disagree) = (0usize, 0usize, 0usize);
            for p in &set.points {
                let tr = transversality_at(geo, &geo.manifold, &ctx, p)?;
                let lf = locally_free_at(geo, &ctx, p);
                t += usize::from(tr);
                l += usize::from(lf);
                disagree += usize::from(tr != lf);
            }
            let n = set.len().max(1) as f64;
            self.report.transversality_rate = Some(t as f64 / n);
            self.report.locally_free_rate = Some(l as f64 / n);
            if disagree > 0 {
                self.fail(
                    Check::Transversality,
                    format!("transversality and local freeness disagree at {disagree} samples"),
                );
            }
            if t < set.len() {
                self.fail(
                    Check::Transversality,
                    format!("not transversal at {} of {} samples", set.len() - t, set.len()),
                );
            }
        } else if self.scn.declared().locally_free != Some(true) {
            self.fail(Check::Transversality, "local freeness is neither declared nor measurable");
        }
        self.quotient(Check::Transversality);
        Ok(())
    }

    fn reduced_kernel(&mut self) -> Result<()> {
        if !self.scn.is_numeric() {
            self.fail(Check::ReducedKernel, format!("scenario `{}` has no numeric action", self.scn.id()));
            return Ok(());
        }
        let set = self.ray_samples()?.clone();
        if set.is_empty() {
            self.fail(Check::ReducedKernel, "level ray is empty");
            return Ok(());
        }
        let geo = self.scn.geometry()?;
        let ctx = RayContext::new(self.scn, &self.mu)?;
        let mut bad = 0usize;
        let mut angle = 0.0_f64;
        for p in &set.points {
            match reduced_kernel_at(geo, &geo.manifold, &ctx, p) {
                Ok(r) => {
                    bad += usize::from(!r.ok);
                    angle = angle.max(r.principal_angle);
                }
                Err(_) => bad += 1,
            }
        }
        self.report.reduced_kernel_ok = Some(bad == 0);
        self.report.max_principal_angle = Some(angle);
        if bad > 0 {
            self.fail(
                Check::ReducedKernel,
                format!("reduced kernel differs from the orbit directions at {bad} of {} samples", set.len()),
            );
        }
        self.quotient(Check::ReducedKernel);
        Ok(())
    }

    fn strata(&mut self) {
        let res = stratified_samples(self.scn, &self.mu, self.cfg.n_samples, self.cfg.seed)
            .and_then(|set| orbit_type_partition(self.scn, &self.mu, &set).map(|s| (set, s)));
        match res {
            Ok((set, strata)) => {
                let mut seen = vec![0usize; set.len()];
                for r in &strata {
                    for &i in &r.sample_indices {
                        seen[i] += 1;
                    }
                }
                if seen.iter().any(|&c| c != 1) {
                    self.fail(Check::Strata, "stratum index sets are not a partition of the samples");
                }
                for r in strata.iter().filter(|r| !r.contact_on_stratum) {
                    let label = r.isotropy_label.to_string();
                    self.fail(Check::Strata, format!("stratum {label} is not contact"));
                }
                self.report.strata = Some(strata);
            }
            Err(e) => self.fail(Check::Strata, e.to_string()),
        }
    }

    fn albert(&mut self) {
        match albert_reduce(self.scn, &self.mu, self.cfg.n_samples, self.cfg.seed) {
            Ok(a) => {
                if let Some(w) = a.witness_residual.filter(|w| w.is_nan() || *w >= WITNESS_TOL) {
                    self.fail(Check::Albert, format!("witness point misses the level (residual {w:.3e})"));
                }
                self.report.albert = Some(a);
            }
            Err(e) => self.fail(Check::Albert, e.to_string()),
        }
    }

    fn gs(&mut self) {
        let alg = self.scn.algebra();
        let orbit_dim = alg.dim() - coadjoint_stabilizer(alg, &self.mu).dim();
        let fiber = match self.scn.declared().fiber_dim {
            Some(f) => Some(f),
            None => self.quotient(Check::Gs).map(|q| q.quotient_dim),
        };
        if let Some(fiber_dim) = fiber {
            self.report.gs_dims = Some(gs_dimension_report(self.scn, &self.mu, orbit_dim, fiber_dim));
        }
    }

    fn reeb_flow(&mut self) -> Result<()> {
        if !self.scn.is_numeric() {
            self.fail(Check::ReebFlow, format!("scenario `{}` has no numeric action", self.scn.id()));
            return Ok(());
        }
        let set = self.ray_samples()?.clone();
        let geo = self.scn.geometry()?;
        let mut worst = 0.0_f64;
        for p in set.points.iter().take(REEB_SAMPLES) {
            match reeb_flow_level_invariance(&geo.moment, &geo.form, &geo.manifold, p, REEB_HORIZON) {
                Ok(r) => worst = worst.max(r.max_deviation),
                Err(e) => {
                    self.fail(Check::ReebFlow, e.to_string());
                    return Ok(());
                }
            }
        }
        self.report.reeb_flow_max_deviation = Some(worst);
        if worst.is_nan() || worst >= REEB_DEVIATION_TOL {
            self.fail(Check::ReebFlow, format!("moment drifts by {worst:.3e} along the Reeb flow"));
        }
        Ok(())
    }
}

/// Runs the configured checks on `scn`. Configuration errors (wrong `mu`
/// length, zero `mu` for ray checks) are returned as `Err`; check failures
/// are collected in [`ReductionReport::failures`].
pub fn run_scenario(scn: &Scenario, cfg: &RunConfig) -> Result<ReductionReport> {
    cfg.validate()?;
    let coords = cfg.mu_coords(scn)?;
    let mu = scn.mu(&coords)?;
    let checks = cfg.checks_for(scn);
    let report = ReductionReport::new(
        scn.id(),
        &mu,
        cfg.n_samples,
        cfg.seed,
        checks.iter().map(|c| c.name().to_string()).collect(),
    );
    let mut r = Runner {
        scn,
        mu,
        cfg,
        report,
        samples: None,
        quotient: None,
    };
    for &check in &checks {
        match check {
            Check::Hypotheses => r.hypotheses(),
            Check::Transversality => r.transversality()?,
            Check::ReducedKernel => r.reduced_kernel()?,
            Check::Strata => r.strata(),
            Check::Albert => r.albert(),
            Check::Gs => r.gs(),
            Check::ReebFlow => r.reeb_flow()?,
        }
    }
    Ok(r.report)
}

/// Loads the scenario, runs it, and writes the JSON report when an output
/// path is configured. Returns the report and its bytes.
pub fn run(cfg: &RunConfig, catalog: &Catalog) -> Result<(ReductionReport, Vec<u8>)> {
    let scn = cfg.load_scenario(catalog)?;
    let report = run_scenario(&scn, cfg)?;
    let bytes = to_json_bytes(&report);
    if let Some(out) = &cfg.out {
        std::fs::write(out, &bytes)?;
    }
    Ok((report, bytes))
}
