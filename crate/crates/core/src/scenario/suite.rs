//! The acceptance suite behind `check-all`.

use std::collections::BTreeMap;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{Check, RunConfig};
use super::json::to_json_bytes;
use super::model::{load_scenario, Scenario};
use super::run::run_scenario;
use crate::action::{conformal_rescale, moment_differential_check, reeb_flow_level_invariance};
use crate::error::Result;
use crate::exterior::{q, qi, PolyMap, Rational};
use crate::lie::lemmas::{isotropic_kernel_suite, kernel_splitting_suite};
use crate::lie::{check_reduction_hypotheses, Catalog, DualElement};
use crate::newton::NewtonOptions;
use crate::reduction::checks::{locally_free_at, transversality_at};
use crate::reduction::sampling::seed_point;
use crate::reduction::{
    albert_reduce, orbit_type_partition, quotient_dimension, ray_parameter, realizable_zero_patterns,
    refine_level_samples, sample_level_ray, sample_level_ray_on_locus, sample_strict_level,
    stratified_samples, DimensionMode, RayContext, ReductionReport, SampleSet,
};

pub const LEMMA_INSTANCES: usize = 500;
pub const LEMMA_TOL: f64 = 1e-10;
pub const ZERO_BLOCK_TOL: f64 = 1e-6;
pub const WITNESS_TOL: f64 = 1e-10;
pub const REEB_TOL: f64 = 1e-6;
pub const HOPF_CLOSURE_TOL: f64 = 1e-8;
pub const DIFFERENTIAL_TOL: f64 = 1e-10;
pub const KERNEL_ANGLE_TOL: f64 = 1e-6;
pub const TRANS_FREE_MIN_POINTS: usize = 1000;
pub const REDUCED_KERNEL_MIN_SAMPLES: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub measurements: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckAllReport {
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
}

impl CheckAllReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    /// One `PASS`/`FAIL` line per criterion.
    pub fn summary_lines(&self) -> Vec<String> {
        self.criteria
            .iter()
            .map(|c| {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                format!("[{tag}] {:>2}. {} -- {}", c.id, c.title, c.detail)
            })
            .collect()
    }
}

struct Crit {
    id: u8,
    title: &'static str,
    passed: bool,
    detail: String,
    m: BTreeMap<String, f64>,
}

impl Crit {
    fn new(id: u8, title: &'static str) -> Self {
        Self {
            id,
            title,
            passed: true,
            detail: String::new(),
            m: BTreeMap::new(),
        }
    }

    fn measure(&mut self, key: &str, v: f64) {
        self.m.insert(key.to_string(), v);
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.passed = false;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(&what.into());
        }
    }

    fn finish(mut self, summary: impl Into<String>) -> CriterionResult {
        if self.passed {
            self.detail = summary.into();
        }
        CriterionResult {
            id: self.id,
            title: self.title.to_string(),
            passed: self.passed,
            detail: self.detail,
            measurements: self.m,
        }
    }

    fn error(mut self, e: impl std::fmt::Display) -> CriterionResult {
        self.require(false, e.to_string());
        self.finish("")
    }
}

fn mu1(v: f64) -> DualElement {
    DualElement::new(vec![v])
}

fn block_modulus(p: &DVector<f64>, j: usize) -> f64 {
    p[2 * j].hypot(p[2 * j + 1])
}

fn e1_albert(cat: &Catalog, seed: u64) -> Result<CriterionResult> {
    let mut c = Crit::new(1, "E1 Albert reduction is the circle");
    let s = load_scenario("E1", cat)?;
    let mu = mu1(1.0);
    let a = match albert_reduce(&s, &mu, 50, seed) {
        Ok(a) => a,
        Err(e) => return Ok(c.error(e)),
    };
    let dims = (a.level_dim, a.albert_orbit_dim, a.albert_quotient_dim);
    c.require(dims == (1, 0, 1), format!("dims (level, orbit, quotient) = {dims:?}, expected (1, 0, 1)"));
    let raw = sample_strict_level(&s, &mu, 50, seed)?;
    let level = refine_level_samples(&s, &mu, &raw)?;
    let worst = level
        .points
        .iter()
        .map(|p| block_modulus(p, 1).max(block_modulus(p, 2)))
        .fold(0.0, f64::max);
    c.measure("max_z2_z3_modulus", worst);
    c.measure("samples", level.len() as f64);
    c.require(!level.is_empty(), "no samples of the level");
    c.require(worst < ZERO_BLOCK_TOL, format!("|z2|,|z3| reach {worst:.3e}"));
    Ok(c.finish(format!(
        "level 1, orbit 0, quotient 1; {} samples with max |z2|,|z3| = {worst:.1e}",
        level.len()
    )))
}

fn e2_albert(cat: &Catalog, seed: u64) -> Result<CriterionResult> {
    let mut c = Crit::new(2, "E2 Albert quotient is 3-dimensional, 3-torus witness on the level");
    let s = load_scenario("E2", cat)?;
    let a = match albert_reduce(&s, &mu1(1.0), 50, seed) {
        Ok(a) => a,
        Err(e) => return Ok(c.error(e)),
    };
    c.require(a.level_dim == 4, format!("level_dim {}", a.level_dim));
    c.require(a.albert_quotient_dim == 3, format!("quotient dim {}", a.albert_quotient_dim));
    let w = a.witness_residual.unwrap_or(f64::INFINITY);
    c.measure("witness_residual", w);
    c.require(w < WITNESS_TOL, format!("witness residual {w:.3e}"));
    Ok(c.finish(format!(
        "level 4, orbit {}, quotient 3; witness residual {w:.1e}",
        a.albert_orbit_dim
    )))
}

fn sl2_example(cat: &Catalog) -> Result<CriterionResult> {
    let mut c = Crit::new(3, "SL(2,R) example: k_mu = g_mu, sum condition fails, quotient 4");
    let s = load_scenario("SL2-bookkeeping", cat)?;
    let mu = s.mu(s.default_mu())?;
    let h = check_reduction_hypotheses(s.algebra(), &mu, None)?;
    c.require(
        h.dim_stabilizer == 1 && h.dim_kernel_algebra == 1 && h.kernel_equals_stabilizer,
        format!("dim g_mu = {}, dim k_mu = {}", h.dim_stabilizer, h.dim_kernel_algebra),
    );
    c.require(!h.sum_condition_holds, "ker mu + g_mu spans g");
    let qd = quotient_dimension(&s, &mu, None)?;
    c.require(qd.mode == DimensionMode::Bookkeeping, "not in bookkeeping mode");
    c.require(qd.quotient_dim == 4, format!("quotient dim {}", qd.quotient_dim));
    c.require(qd.quotient_dim % 2 == 0, "quotient dimension is odd");
    c.measure("quotient_dim", qd.quotient_dim as f64);
    Ok(c.finish("dim k_mu = dim g_mu = 1, ker mu + g_mu != g, quotient 7 - 2 - 1 = 4 (even, not contact)"))
}

fn count_agreement(scn: &Scenario, mu: &DualElement, set: &SampleSet) -> Result<(usize, usize, usize)> {
    let geo = scn.geometry()?;
    let ctx = RayContext::new(scn, mu)?;
    let (mut n, mut disagree, mut failing) = (0, 0, 0);
    for p in &set.points {
        let t = transversality_at(geo, &geo.manifold, &ctx, p)?;
        let l = locally_free_at(geo, &ctx, p);
        n += 1;
        disagree += usize::from(t != l);
        failing += usize::from(!t);
    }
    Ok((n, disagree, failing))
}

fn trans_free(cat: &Catalog, seed: u64) -> Result<CriterionResult> {
    let mut c = Crit::new(4, "transversality agrees with local freeness");
    let mut total = 0;
    let mut disagree = 0;
    let mut pairs = Vec::new();
    for id in ["E1", "E2", "S3", "S5-T2", "S5-T3", "R3-darboux"] {
        let s = load_scenario(id, cat)?;
        pairs.push((s.clone(), s.default_mu().to_vec()));
    }
    pairs.push((load_scenario("S5-T2", cat)?, vec![qi(1), qi(0)]));
    for (s, coords) in &pairs {
        let mu = s.mu(coords)?;
        let set = sample_level_ray(s, &mu, 200, seed)?;
        let (n, d, _) = count_agreement(s, &mu, &set)?;
        total += n;
        disagree += d;
    }
    let s = load_scenario("S5-T2", cat)?;
    let mu = s.mu(&[qi(1), qi(0)])?;
    let locus = sample_level_ray_on_locus(&s, &mu, &[1, 2], 50, seed)?;
    let (n, d, failing) = count_agreement(&s, &mu, &locus)?;
    total += n;
    disagree += d;
    c.measure("points", total as f64);
    c.measure("disagreements", disagree as f64);
    c.measure("failure_locus_points", n as f64);
    c.measure("failure_locus_non_transversal", failing as f64);
    c.require(total >= TRANS_FREE_MIN_POINTS, format!("only {total} points"));
    c.require(disagree == 0, format!("{disagree} disagreements"));
    c.require(n > 0 && failing == n, format!("failure locus: {failing} of {n} points non-transversal"));
    Ok(c.finish(format!(
        "{total} points, 0 disagreements; all {n} points of the S5-T2 (1,0) locus z2 = z3 = 0 fail both"
    )))
}

fn reeb_invariance(cat: &Catalog, seed: u64) -> Result<CriterionResult> {
    let mut c = Crit::new(5, "Reeb flow preserves the moment; Hopf orbit closes");
    let s = load_scenario("E2", cat)?;
    let geo = s.geometry()?;
    let set = sample_level_ray(&s, &mu1(1.0), 20, seed)?;
    let mut worst = 0.0_f64;
    for p in &set.points {
        match reeb_flow_level_invariance(&geo.moment, &geo.form, &geo.manifold, p, 1.0) {
            Ok(r) => worst = worst.max(r.max_deviation),
            Err(e) => return Ok(c.error(e)),
        }
    }
    c.require(set.len() == 20, format!("only {} E2 seeds", set.len()));
    c.measure("e2_max_deviation", worst);
    c.require(worst < REEB_TOL, format!("E2 deviation {worst:.3e}"));
    let h = load_scenario("S3", cat)?;
    let hg = h.geometry()?;
    let start = sample_level_ray(&h, &mu1(1.0), 1, seed)?;
    let Some(p) = start.points.first() else {
        return Ok(c.error("no S3 sample"));
    };
    let r = match reeb_flow_level_invariance(&hg.moment, &hg.form, &hg.manifold, p, 2.0 * std::f64::consts::PI) {
        Ok(r) => r,
        Err(e) => return Ok(c.error(e)),
    };
    c.measure("hopf_return_distance", r.return_distance);
    c.require(r.return_distance < HOPF_CLOSURE_TOL, format!("Hopf return distance {:.3e}", r.return_distance));
    Ok(c.finish(format!(
        "E2 max deviation {worst:.1e} over 20 seeds; Hopf return distance {:.1e}",
        r.return_distance
    )))
}

fn moment_differential(cat: &Catalog, seed: u64) -> Result<CriterionResult> {
    let mut c = Crit::new(6, "d<Phi, A> = d alpha(., A_M) at random triples");
    let mut worst = 0.0_f64;
    let mut triples = 0;
    for (k, id) in ["E1", "E2", "S3", "S5-T2", "S5-T3", "R3-darboux"].iter().enumerate() {
        let s = load_scenario(id, cat)?;
        let geo = s.geometry()?;
        let n = geo.manifold.ambient_dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        for i in 0..100u64 {
            let x0 = seed_point(seed, (k as u64) << 32 | i, n, geo.bounding_radius);
            let proj = geo.manifold.project(&x0, NewtonOptions::SAMPLING);
            let x = proj.point;
            let frame = geo.manifold.tangent_frame(x.as_slice())?;
            let coeffs = DVector::from_fn(frame.dim(), |_, _| rng.random_range(-1.0..1.0));
            let v = &frame.basis * coeffs;
            let a = rng.random_range(0..geo.action.num_generators());
            let d = moment_differential_check(&geo.action, &geo.form, &x, &v, a)?;
            worst = worst.max(d.gap);
            triples += 1;
        }
    }
    c.measure("max_gap", worst);
    c.measure("triples", triples as f64);
    c.require(worst < DIFFERENTIAL_TOL, format!("max gap {worst:.3e}"));
    Ok(c.finish(format!("{triples} triples over 6 scenarios, max gap {worst:.1e}")))
}

fn reduced_kernel_s5t2(cat: &Catalog, seed: u64) -> Result<CriterionResult> {
    let mut c = Crit::new(7, "S5-T2 at (2,1): reduced kernel = orbit directions, quotient 3");
    let s = load_scenario("S5-T2", cat)?;
    let cfg = RunConfig::new("S5-T2")
        .with_mu(vec![qi(2), qi(1)])
        .with_samples(60)
        .with_seed(seed)
        .with_checks(&[Check::Transversality, Check::ReducedKernel]);
    let r = run_scenario(&s, &cfg)?;
    let n = r.samples_accepted.unwrap_or(0);
    let angle = r.max_principal_angle.unwrap_or(f64::INFINITY);
    c.measure("samples", n as f64);
    c.measure("max_principal_angle", angle);
    c.require(n >= REDUCED_KERNEL_MIN_SAMPLES, format!("only {n} samples"));
    c.require(r.reduced_kernel_ok == Some(true), "reduced kernel check failed");
    c.require(angle < KERNEL_ANGLE_TOL, format!("principal angle {angle:.3e}"));
    c.require(r.quotient_dim == Some(3), format!("quotient dim {:?}", r.quotient_dim));
    c.require(r.failures.is_empty(), r.failures.join("; "));
    Ok(c.finish(format!("{n} samples, max principal angle {angle:.1e}, quotient 3 (odd)")))
}

/// Dimensions of a report, for comparing two runs.
fn dimensions(r: &ReductionReport) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(q) = &r.quotient {
        out.push(format!("quotient {} {} {}", q.level_ray_dim, q.orbit_dim, q.quotient_dim));
    }
    for s in r.strata.iter().flatten() {
        out.push(format!(
            "stratum {} {} {} {} {}",
            s.isotropy_label, s.stratum_dim, s.orbit_dim, s.quotient_dim, s.contact_on_stratum
        ));
    }
    if let Some(a) = &r.albert {
        out.push(format!("albert {} {} {}", a.level_dim, a.albert_orbit_dim, a.albert_quotient_dim));
    }
    out.push(format!("rates {:?} {:?}", r.transversality_rate, r.locally_free_rate));
    out
}

fn conformal(cat: &Catalog, seed: u64) -> Result<CriterionResult> {
    let mut c = Crit::new(8, "conformal rescaling by 1 + |z|^2/4 leaves the reduction unchanged");
    let s = load_scenario("E2", cat)?;
    let geo = s.geometry()?;
    let n = geo.manifold.ambient_dim();
    let mut f = PolyMap::constant(n, qi(1));
    for i in 0..n {
        let xi = PolyMap::var(n, i);
        f = &f + &(&xi * &xi).scale(q(1, 4));
    }
    let mu = mu1(1.0);
    let base = sample_level_ray(&s, &mu, 100, seed)?;
    let mut points = base.points.clone();
    for i in 0..100u64 {
        let x0 = seed_point(seed, (1 << 50) + i, n, geo.bounding_radius);
        points.push(geo.manifold.project(&x0, NewtonOptions::SAMPLING).point);
    }
    let rescaled = conformal_rescale(geo.form.alpha(), &f, &points)?;
    let t = s.with_form(rescaled)?;
    let tgeo = t.geometry()?;
    let other = sample_level_ray(&t, &mu, 100, seed)?;
    points.extend(other.points.iter().cloned());
    let mut mismatched = 0;
    let mut members = 0;
    for p in &points {
        let a = ray_parameter(&geo.moment.eval(p.as_slice()), &mu, 1e-9).is_some();
        let b = ray_parameter(&tgeo.moment.eval(p.as_slice()), &mu, 1e-9).is_some();
        mismatched += usize::from(a != b);
        members += usize::from(a);
    }
    c.measure("test_points", points.len() as f64);
    c.measure("members", members as f64);
    c.measure("membership_mismatches", mismatched as f64);
    c.require(mismatched == 0, format!("{mismatched} membership mismatches"));
    c.require(members > 0 && members < points.len(), "test points do not exercise both outcomes");
    let cfg = RunConfig::new("E2")
        .with_samples(50)
        .with_seed(seed)
        .with_checks(&[Check::Transversality, Check::ReducedKernel, Check::Strata, Check::Albert]);
    let r1 = run_scenario(&s, &cfg)?;
    let r2 = run_scenario(&t, &cfg)?;
    let (d1, d2) = (dimensions(&r1), dimensions(&r2));
    c.require(d1 == d2, format!("dimensions differ: {d1:?} vs {d2:?}"));
    c.require(r1.failures.is_empty(), format!("alpha run: {}", r1.failures.join("; ")));
    c.require(r2.failures.is_empty(), format!("f alpha run: {}", r2.failures.join("; ")));
    Ok(c.finish(format!(
        "{} test points ({members} on the ray), 0 mismatches; {} dimension records identical",
        points.len(),
        d1.len()
    )))
}

fn lemma_suites(seed: u64) -> CriterionResult {
    let mut c = Crit::new(9, "kernel-splitting and isotropic-kernel lemma suites");
    let a = kernel_splitting_suite(LEMMA_INSTANCES, seed);
    let b = isotropic_kernel_suite(LEMMA_INSTANCES, seed);
    c.measure("kernel_splitting_max_residual", a.max_residual);
    c.measure("isotropic_kernel_max_residual", b.max_residual);
    c.require(a.passed(LEMMA_TOL), format!("kernel splitting: {a:?}"));
    c.require(b.passed(LEMMA_TOL), format!("isotropic kernel: {b:?}"));
    c.finish(format!(
        "{LEMMA_INSTANCES} + {LEMMA_INSTANCES} instances, max residuals {:.1e} / {:.1e}",
        a.max_residual, b.max_residual
    ))
}

fn orbit_types(cat: &Catalog, seed: u64) -> Result<CriterionResult> {
    let mut c = Crit::new(10, "T3 on S5 at (1,1,1): strata match realizable zero patterns");
    let s = load_scenario("S5-T3", cat)?;
    let coords: Vec<Rational> = vec![qi(1), qi(1), qi(1)];
    let mu = s.mu(&coords)?;
    let expected = realizable_zero_patterns(s.weights()?, &coords);
    let set = stratified_samples(&s, &mu, 30, seed)?;
    let strata = match orbit_type_partition(&s, &mu, &set) {
        Ok(x) => x,
        Err(e) => return Ok(c.error(e)),
    };
    let mut seen = vec![0usize; set.len()];
    for r in &strata {
        for &i in &r.sample_indices {
            seen[i] += 1;
        }
    }
    c.measure("strata", strata.len() as f64);
    c.measure("realizable_patterns", expected.len() as f64);
    c.require(
        strata.len() == expected.len(),
        format!("{} strata, {} realizable patterns", strata.len(), expected.len()),
    );
    let found: Vec<_> = strata.iter().map(|r| r.isotropy_label.zero_blocks.clone()).collect();
    c.require(found.iter().all(|z| expected.contains(z)), format!("unexpected patterns {found:?}"));
    c.require(strata.iter().all(|r| r.contact_on_stratum), "a stratum is not contact");
    c.require(seen.iter().all(|&k| k == 1), "index sets are not a partition");
    Ok(c.finish(format!(
        "{} stratum = {} realizable pattern(s); contact; {} samples partitioned",
        strata.len(),
        expected.len(),
        set.len()
    )))
}

fn numbered(id: u8, title: &'static str, r: Result<CriterionResult>) -> CriterionResult {
    r.unwrap_or_else(|e| Crit::new(id, title).error(e))
}

/// Criteria 1-10.
fn content_criteria(cat: &Catalog, seed: u64) -> Vec<CriterionResult> {
    vec![
        numbered(1, "E1 Albert reduction is the circle", e1_albert(cat, seed)),
        numbered(2, "E2 Albert quotient", e2_albert(cat, seed)),
        numbered(3, "SL(2,R) example", sl2_example(cat)),
        numbered(4, "transversality agrees with local freeness", trans_free(cat, seed)),
        numbered(5, "Reeb flow invariance", reeb_invariance(cat, seed)),
        numbered(6, "moment differential", moment_differential(cat, seed)),
        numbered(7, "reduced kernel on S5-T2", reduced_kernel_s5t2(cat, seed)),
        numbered(8, "conformal invariance", conformal(cat, seed)),
        lemma_suites(seed),
        numbered(10, "orbit-type partition", orbit_types(cat, seed)),
    ]
}

/// Runs the acceptance suite. Criterion 11 re-runs criteria 1-10 on a
/// single-thread pool and compares the serialized results byte for byte
/// with the run on the ambient pool.
pub fn check_all(cat: &Catalog, seed: u64) -> CheckAllReport {
    let mut criteria = content_criteria(cat, seed);
    let mut c = Crit::new(11, "byte-identical results across thread counts");
    let threads = rayon::current_num_threads();
    match rayon::ThreadPoolBuilder::new().num_threads(1).build() {
        Ok(pool) => {
            let serial = pool.install(|| content_criteria(cat, seed));
            let same = to_json_bytes(&serial) == to_json_bytes(&criteria);
            c.require(same, format!("results differ between 1 and {threads} threads"));
        }
        Err(e) => c.require(false, e.to_string()),
    }
    criteria.push(c.finish("criteria 1-10 serialize identically on 1 thread and on the default pool"));
    CheckAllReport { seed, criteria }
}

