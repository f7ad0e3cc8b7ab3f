//! Newton sampling of the level ray `Phi = s mu` (`s > 0`) and of strict
//! levels `Phi = mu`.
//!
//! Seed `i` of a run draws from `ChaCha8Rng::seed_from_u64(seed)` on stream
//! `i`, so every seed is reproducible on its own and results do not depend
//! on how the work is split across threads. Accepted points are deduplicated
//! in seed order.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exterior::{EmbeddedManifold, ON_MANIFOLD_TOL};
use crate::lie::DualElement;
use crate::linalg;
use crate::newton::{self, NewtonOptions};
use crate::scenario::{Geometry, Scenario};

/// Joint residual required to accept a Newton solution.
pub const ACCEPT_RESIDUAL: f64 = 1e-10;
/// Smallest admissible ray parameter.
pub const MIN_RAY_PARAMETER: f64 = 1e-9;
/// Accepted points closer than this are merged.
pub const DEDUP_RADIUS: f64 = 1e-6;

fn serialize_points<S: Serializer>(points: &[DVector<f64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).collect();
    v.serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleSet {
    pub scenario: String,
    pub mu: Vec<f64>,
    #[serde(serialize_with = "serialize_points")]
    pub points: Vec<DVector<f64>>,
    /// `s` with `Phi(x) = s mu`; all ones for strict-level samples.
    pub ray_parameters: Vec<f64>,
    pub seeds_tried: usize,
    pub diagnostic: Option<String>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Concatenates sample sets of the same scenario and `mu` in order.
    pub fn merged(sets: &[SampleSet]) -> Option<SampleSet> {
        let first = sets.first()?;
        let mut out = SampleSet {
            scenario: first.scenario.clone(),
            mu: first.mu.clone(),
            points: Vec::new(),
            ray_parameters: Vec::new(),
            seeds_tried: 0,
            diagnostic: None,
        };
        for s in sets {
            out.points.extend(s.points.iter().cloned());
            out.ray_parameters.extend(s.ray_parameters.iter().copied());
            out.seeds_tried += s.seeds_tried;
        }
        Some(out)
    }
}

/// Uniform point on the sphere of the given radius, from seed stream `index`.
pub fn seed_point(seed: u64, index: u64, dim: usize, radius: f64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let v: DVector<f64> = DVector::from_fn(dim, |_, _| StandardNormal.sample(&mut rng));
        let n = v.norm();
        if n > 1e-12 {
            return v * (radius / n);
        }
    }
}

/// `Some(s)` when `Phi(x) = s mu` with `s > 0` to the given tolerance.
pub fn ray_parameter(phi: &DualElement, mu: &DualElement, tol: f64) -> Option<f64> {
    let m = mu.coords();
    let s = phi.coords().dot(m) / m.norm_squared();
    let resid = (phi.coords() - m * s).amax();
    (s > MIN_RAY_PARAMETER && resid < tol).then_some(s)
}

struct Candidate {
    point: DVector<f64>,
    s: f64,
}

/// Which equation family a run solves.
#[derive(Clone, Copy)]
enum Target<'a> {
    Ray(&'a DualElement),
    Level(&'a DualElement),
}

fn attempt(
    geo: &Geometry,
    manifold: &EmbeddedManifold,
    target: Target<'_>,
    x0: DVector<f64>,
) -> Option<Candidate> {
    let n = manifold.ambient_dim();
    let m = manifold.constraints().len();
    match target {
        Target::Ray(mu) => {
            let k = mu.dim();
            let phi0 = geo.moment.eval(x0.as_slice());
            let mm = mu.coords();
            let s0 = (phi0.coords().dot(mm) / mm.norm_squared()).max(1e-2);
            let mut y0 = DVector::zeros(n + 1);
            y0.rows_mut(0, n).copy_from(&x0);
            y0[n] = s0;
            let out = newton::project(y0, NewtonOptions::SAMPLING, |y| {
                let x = y.rows(0, n).into_owned();
                let xs = x.as_slice();
                let phi = geo.moment.eval(xs);
                let mut f = DVector::zeros(m + k);
                f.rows_mut(0, m).copy_from(&manifold.constraint_values(xs));
                f.rows_mut(m, k).copy_from(&(phi.coords() - mm * y[n]));
                let mut j = DMatrix::zeros(m + k, n + 1);
                j.view_mut((0, 0), (m, n)).copy_from(&manifold.jacobian(xs));
                j.view_mut((m, 0), (k, n)).copy_from(&geo.moment.jacobian(xs));
                j.view_mut((m, n), (k, 1)).copy_from(&(-mm));
                (f, j)
            });
            let s = out.point[n];
            let x = out.point.rows(0, n).into_owned();
            (out.converged && out.residual < ACCEPT_RESIDUAL && s > MIN_RAY_PARAMETER)
                .then_some(Candidate { point: x, s })
        }
        Target::Level(mu) => {
            let k = mu.dim();
            let mm = mu.coords();
            let out = newton::project(x0, NewtonOptions::SAMPLING, |x| {
                let xs = x.as_slice();
                let mut f = DVector::zeros(m + k);
                f.rows_mut(0, m).copy_from(&manifold.constraint_values(xs));
                f.rows_mut(m, k).copy_from(&(geo.moment.eval(xs).coords() - mm));
                let j = linalg::vstack(&[&manifold.jacobian(xs), &geo.moment.jacobian(xs)]);
                (f, j)
            });
            (out.converged && out.residual < ACCEPT_RESIDUAL).then_some(Candidate {
                point: out.point,
                s: 1.0,
            })
        }
    }
}

fn run_sampler(
    scn: &Scenario,
    manifold: &EmbeddedManifold,
    target: Target<'_>,
    n_samples: usize,
    seed: u64,
    stream_offset: u64,
) -> Result<SampleSet> {
    let geo = scn.geometry()?;
    let mu = match target {
        Target::Ray(m) | Target::Level(m) => m,
    };
    if mu.dim() != scn.algebra().dim() {
        return Err(Error::DimensionMismatch {
            expected: scn.algebra().dim(),
            found: mu.dim(),
        });
    }
    if matches!(target, Target::Ray(_)) && mu.is_zero() {
        return Err(Error::ZeroMu);
    }
    let batch = n_samples.max(16);
    let max_attempts = 8 * batch;
    let mut points: Vec<DVector<f64>> = Vec::new();
    let mut params = Vec::new();
    let mut next = 0usize;
    while points.len() < n_samples && next < max_attempts {
        let idx: Vec<u64> = (next..(next + batch).min(max_attempts)).map(|i| i as u64).collect();
        next += idx.len();
        let found: Vec<Option<Candidate>> = idx
            .par_iter()
            .map(|&i| {
                let x0 = seed_point(seed, stream_offset + i, manifold.ambient_dim(), geo.bounding_radius);
                attempt(geo, manifold, target, x0)
            })
            .collect();
        for c in found.into_iter().flatten() {
            if manifold.residual(c.point.as_slice()) > ON_MANIFOLD_TOL {
                continue;
            }
            if points.iter().any(|p| (p - &c.point).norm() < DEDUP_RADIUS) {
                continue;
            }
            points.push(c.point);
            params.push(c.s);
            if points.len() == n_samples {
                break;
            }
        }
    }
    let diagnostic = points
        .is_empty()
        .then(|| format!("no seed out of {next} converged to an admissible point"));
    Ok(SampleSet {
        scenario: scn.id().to_string(),
        mu: mu.to_vec(),
        points,
        ray_parameters: params,
        seeds_tried: next,
        diagnostic,
    })
}

/// Samples `Z = Phi^-1(R^+ mu)` on the scenario manifold.
pub fn sample_level_ray(scn: &Scenario, mu: &DualElement, n_samples: usize, seed: u64) -> Result<SampleSet> {
    let geo = scn.geometry()?;
    run_sampler(scn, &geo.manifold, Target::Ray(mu), n_samples, seed, 0)
}

/// Samples `Z` restricted to the locus where the listed complex coordinates
/// vanish (blocks `(x_j, y_j)`).
pub fn sample_level_ray_on_locus(
    scn: &Scenario,
    mu: &DualElement,
    vanishing_blocks: &[usize],
    n_samples: usize,
    seed: u64,
) -> Result<SampleSet> {
    let geo = scn.geometry()?;
    let locus = geo.manifold.with_vanishing_coordinates(&block_coordinates(vanishing_blocks));
    run_sampler(scn, &locus, Target::Ray(mu), n_samples, seed, locus_stream(vanishing_blocks))
}

/// Samples the strict level `Phi^-1(mu)`.
pub fn sample_strict_level(scn: &Scenario, mu: &DualElement, n_samples: usize, seed: u64) -> Result<SampleSet> {
    let geo = scn.geometry()?;
    run_sampler(scn, &geo.manifold, Target::Level(mu), n_samples, seed, 1 << 62)
}

/// Real coordinates `2j, 2j + 1` of the listed blocks.
pub fn block_coordinates(blocks: &[usize]) -> Vec<usize> {
    blocks.iter().flat_map(|&j| [2 * j, 2 * j + 1]).collect()
}

fn locus_stream(blocks: &[usize]) -> u64 {
    let mask: u64 = blocks.iter().map(|&j| 1u64 << j).sum();
    (mask + 1) << 40
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::Catalog;
    use crate::scenario::load_scenario;

    fn scn(id: &str) -> Scenario {
        load_scenario(id, &Catalog::builtin()).unwrap()
    }

    #[test]
    fn seeds_are_reproducible_and_distinct() {
        let a = seed_point(7, 3, 6, 2.0);
        assert_eq!(a, seed_point(7, 3, 6, 2.0));
        assert_ne!(a, seed_point(7, 4, 6, 2.0));
        assert!((a.norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sign_obstruction_gives_empty_set() {
        let s = scn("S3");
        let set = sample_level_ray(&s, &DualElement::new(vec![-1.0]), 20, 0).unwrap();
        assert!(set.is_empty());
        assert!(set.diagnostic.is_some());
    }

    #[test]
    fn ray_samples_satisfy_invariants() {
        let s = scn("S5-T2");
        let mu = DualElement::new(vec![2.0, 1.0]);
        let set = sample_level_ray(&s, &mu, 30, 1).unwrap();
        assert_eq!(set.len(), 30);
        let g = s.geometry().unwrap();
        for (p, t) in set.points.iter().zip(&set.ray_parameters) {
            assert!(g.manifold.residual(p.as_slice()) < 1e-8);
            let phi = g.moment.eval(p.as_slice());
            assert!((phi.coords() - mu.coords() * *t).amax() < 1e-8);
            assert!(*t > 0.0);
        }
    }

    #[test]
    fn zero_mu_is_rejected() {
        let s = scn("S3");
        assert_eq!(
            sample_level_ray(&s, &DualElement::new(vec![0.0]), 5, 0).unwrap_err(),
            Error::ZeroMu
        );
    }

    #[test]
    fn locus_samples_have_vanishing_blocks() {
        let s = scn("S5-T2");
        let mu = DualElement::new(vec![1.0, 0.0]);
        let set = sample_level_ray_on_locus(&s, &mu, &[1, 2], 10, 0).unwrap();
        assert!(!set.is_empty());
        for p in &set.points {
            assert!(p[2].abs() + p[3].abs() + p[4].abs() + p[5].abs() < 1e-12);
        }
    }
}
