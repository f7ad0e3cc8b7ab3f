//! Reduction at the strict level `Z = Phi^-1(mu)` by the flows of
//! `A_Z - <mu, A> Y`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::checks::consensus;
use super::sampling::{sample_strict_level, SampleSet, ACCEPT_RESIDUAL};
use crate::error::{Error, Result};
use crate::exterior::reeb_field;
use crate::lie::DualElement;
use crate::linalg;
use crate::newton::{self, NewtonOptions};
use crate::scenario::{Geometry, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlbertRecord {
    pub level_dim: usize,
    pub albert_orbit_dim: usize,
    pub albert_quotient_dim: usize,
    /// `d Phi` has full rank on `T M` at every sample.
    pub regular_value: bool,
    pub samples: usize,
    /// Largest joint residual over the accepted samples.
    pub max_level_residual: f64,
    /// Joint residual (constraints and `Phi - mu`) at the scenario's
    /// witness point, when it declares one.
    pub witness_residual: Option<f64>,
}

/// Relative size of `d(c^T Phi)|TM` below which the combination counts as
/// critical. A sample accepted at residual `eps` next to a nondegenerate
/// critical manifold has gradient `O(sqrt(eps))`, so the cut sits at
/// `sqrt(ACCEPT_RESIDUAL)`.
pub const CRITICAL_GRADIENT_RTOL: f64 = 1e-5;

/// Left singular directions of `d Phi|TM` at `x`, split into regular and
/// critical combinations.
fn critical_split(geo: &Geometry, x: &DVector<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let p = x.as_slice();
    let frame = geo.manifold.tangent_frame(p)?;
    let jphi = geo.moment.jacobian(p);
    let scale = linalg::norm2(&jphi).max(1.0);
    let d = &jphi * &frame.basis;
    let (regular, critical) = linalg::left_singular_split(&d, CRITICAL_GRADIENT_RTOL * scale);
    Ok((frame.basis, regular, critical))
}

/// Constrained Hessian `Hess(c^T Phi) - sum_l lambda_l Hess(g_l)` with
/// `lambda` the Lagrange multipliers of `c^T Phi` on `M`.
fn constrained_hessian(geo: &Geometry, c: &DVector<f64>, p: &[f64]) -> DMatrix<f64> {
    let n = p.len();
    let jc = geo.manifold.jacobian(p);
    let grad = geo.moment.jacobian(p).transpose() * c;
    let lambda = linalg::lstsq(&jc.transpose(), &grad, linalg::norm2(&jc));
    let mut h = DMatrix::zeros(n, n);
    for (i, ci) in c.iter().enumerate() {
        if *ci != 0.0 {
            h += moment_hessian(geo, i, p) * *ci;
        }
    }
    for (l, lam) in lambda.iter().enumerate() {
        if *lam != 0.0 {
            h -= geo.manifold.constraint_hessian(l, p) * *lam;
        }
    }
    h
}

/// Dimension of the level's tangent space at `x`, and whether `x` is a
/// regular point. At a regular point the tangent is the kernel of
/// `d Phi|TM`. Where some combination `c^T Phi` is critical on `M`, the level
/// is treated as clean (Morse-Bott): the tangent is cut by the non-critical
/// part of `d Phi` and by the kernel of the constrained Hessian of each
/// critical combination.
fn level_tangent(geo: &Geometry, x: &DVector<f64>) -> Result<(usize, bool)> {
    let p = x.as_slice();
    let (e, regular_dirs, critical) = critical_split(geo, x)?;
    let jphi = geo.moment.jacobian(p);
    let scale = linalg::norm2(&jphi).max(1.0);
    let reduced = regular_dirs.transpose() * &jphi * &e;
    if critical.ncols() == 0 {
        return Ok((linalg::nullspace(&reduced, scale).ncols(), true));
    }
    let mut blocks = vec![reduced];
    for c in critical.column_iter() {
        let h = constrained_hessian(geo, &c.into_owned(), p);
        blocks.push(e.transpose() * h * &e);
    }
    let refs: Vec<&DMatrix<f64>> = blocks.iter().collect();
    Ok((linalg::nullspace(&linalg::vstack(&refs), scale).ncols(), false))
}

/// Newton on the Lagrange system of the critical combinations, in unknowns
/// `(x, lambda_1, ..)`: `g(x) = 0`, `Phi(x) = mu` and
/// `grad(c_i^T Phi) = Jg^T lambda_i`. Near a nondegenerate critical manifold
/// this converges quadratically, unlike the plain level equations whose
/// root is degenerate there.
fn polish_critical(geo: &Geometry, mu: &DualElement, x: &DVector<f64>, critical: &DMatrix<f64>) -> Option<DVector<f64>> {
    let n = x.len();
    let m = geo.manifold.constraints().len();
    let k = mu.dim();
    let nc = critical.ncols();
    let mut y0 = DVector::zeros(n + nc * m);
    y0.rows_mut(0, n).copy_from(x);
    for (i, c) in critical.column_iter().enumerate() {
        let jc = geo.manifold.jacobian(x.as_slice());
        let grad = geo.moment.jacobian(x.as_slice()).transpose() * c;
        let lambda = linalg::lstsq(&jc.transpose(), &grad, linalg::norm2(&jc));
        y0.rows_mut(n + i * m, m).copy_from(&lambda);
    }
    let out = newton::project(y0, NewtonOptions::SAMPLING, |y| {
        let xv = y.rows(0, n).into_owned();
        let p = xv.as_slice();
        let jc = geo.manifold.jacobian(p);
        let jphi = geo.moment.jacobian(p);
        let rows = m + k + nc * n;
        let mut f = DVector::zeros(rows);
        let mut j = DMatrix::zeros(rows, n + nc * m);
        f.rows_mut(0, m).copy_from(&geo.manifold.constraint_values(p));
        j.view_mut((0, 0), (m, n)).copy_from(&jc);
        f.rows_mut(m, k).copy_from(&(geo.moment.eval(p).coords() - mu.coords()));
        j.view_mut((m, 0), (k, n)).copy_from(&jphi);
        for (i, c) in critical.column_iter().enumerate() {
            let lambda = y.rows(n + i * m, m).into_owned();
            let r0 = m + k + i * n;
            let grad = jphi.transpose() * c - jc.transpose() * &lambda;
            f.rows_mut(r0, n).copy_from(&grad);
            let mut h = DMatrix::zeros(n, n);
            for (a, ca) in c.iter().enumerate() {
                if *ca != 0.0 {
                    h += moment_hessian(geo, a, p) * *ca;
                }
            }
            for (l, lam) in lambda.iter().enumerate() {
                if *lam != 0.0 {
                    h -= geo.manifold.constraint_hessian(l, p) * *lam;
                }
            }
            j.view_mut((r0, 0), (n, n)).copy_from(&h);
            j.view_mut((r0, n + i * m), (n, m)).copy_from(&(-jc.transpose()));
        }
        (f, j)
    });
    (out.converged && out.residual < ACCEPT_RESIDUAL).then(|| out.point.rows(0, n).into_owned())
}

fn moment_hessian(geo: &Geometry, i: usize, p: &[f64]) -> DMatrix<f64> {
    let h = geo.moment.components()[i].hessian();
    let n = p.len();
    DMatrix::from_fn(n, n, |a, b| h[a][b].eval(p))
}

/// `A_M(x) - <mu, A> Y(x)` for each basis element, as columns.
pub fn albert_generators(geo: &Geometry, mu: &DualElement, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    let y = reeb_field(&geo.manifold, &geo.form, x.as_slice())?;
    let g = geo.action.generator_matrix_at(x);
    Ok(g - &y * mu.coords().transpose())
}

fn joint_residual(geo: &Geometry, mu: &DualElement, x: &DVector<f64>) -> f64 {
    let p = x.as_slice();
    let phi = geo.moment.eval(p);
    geo.manifold.residual(p).max((phi.coords() - mu.coords()).amax())
}

pub fn albert_reduce(scn: &Scenario, mu: &DualElement, n_samples: usize, seed: u64) -> Result<AlbertRecord> {
    let samples = sample_strict_level(scn, mu, n_samples, seed)?;
    albert_from_samples(scn, mu, &samples)
}

fn refine_point(geo: &Geometry, mu: &DualElement, x: &DVector<f64>) -> Result<DVector<f64>> {
    let (_, _, critical) = critical_split(geo, x)?;
    if critical.ncols() == 0 {
        return Ok(x.clone());
    }
    polish_critical(geo, mu, x, &critical).ok_or(Error::NotRegular)
}

/// Strict-level samples with every point next to a critical manifold moved
/// onto it. Points at regular values are returned unchanged.
pub fn refine_level_samples(scn: &Scenario, mu: &DualElement, samples: &SampleSet) -> Result<SampleSet> {
    let geo = scn.geometry()?;
    let points = samples
        .points
        .iter()
        .map(|x| refine_point(geo, mu, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleSet {
        points,
        ..samples.clone()
    })
}

pub fn albert_from_samples(scn: &Scenario, mu: &DualElement, samples: &SampleSet) -> Result<AlbertRecord> {
    let geo = scn.geometry()?;
    if samples.is_empty() {
        return Err(Error::EmptyLevel(format!(
            "no point of `{}` has moment {:?}",
            scn.id(),
            mu.to_vec()
        )));
    }
    let mut dims = Vec::with_capacity(samples.len());
    let mut regular = true;
    let mut orbit = 0usize;
    let mut worst = 0.0_f64;
    for x0 in &samples.points {
        let x = &refine_point(geo, mu, x0)?;
        let (dim, reg) = level_tangent(geo, x)?;
        dims.push(dim);
        regular &= reg;
        let a = albert_generators(geo, mu, x)?;
        let scale = x.norm() * geo.action.generator_scale() + mu.coords().norm();
        orbit = orbit.max(linalg::rank(&a, scale));
        worst = worst.max(joint_residual(geo, mu, x));
    }
    let level_dim = match consensus(&dims) {
        Ok(d) => d,
        Err(_) if !regular => return Err(Error::NotRegular),
        Err(e) => return Err(e),
    };
    let albert_quotient_dim = level_dim
        .checked_sub(orbit)
        .ok_or(Error::NegativeQuotient {
            stratum_dim: level_dim,
            orbit_dim: orbit,
        })?;
    Ok(AlbertRecord {
        level_dim,
        albert_orbit_dim: orbit,
        albert_quotient_dim,
        regular_value: regular,
        samples: samples.len(),
        max_level_residual: worst,
        witness_residual: scn.witness_point().map(|w| joint_residual(geo, mu, &w)),
    })
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
    fn e1_reduces_to_a_circle() {
        let s = scn("E1");
        let r = albert_reduce(&s, &DualElement::new(vec![1.0]), 20, 0).unwrap();
        assert_eq!((r.level_dim, r.albert_orbit_dim, r.albert_quotient_dim), (1, 0, 1));
        assert!(!r.regular_value);
        let raw = sample_strict_level(&s, &DualElement::new(vec![1.0]), 20, 0).unwrap();
        let refined = refine_level_samples(&s, &DualElement::new(vec![1.0]), &raw).unwrap();
        for p in &refined.points {
            assert!(p.rows(2, 4).amax() < 1e-12);
        }
    }

    #[test]
    fn e2_quotient_is_three_dimensional() {
        let s = scn("E2");
        let r = albert_reduce(&s, &DualElement::new(vec![1.0]), 20, 0).unwrap();
        assert_eq!((r.level_dim, r.albert_orbit_dim, r.albert_quotient_dim), (4, 1, 3));
        assert!(r.regular_value);
        assert!(r.witness_residual.unwrap() < 1e-10);
    }

    #[test]
    fn hopf_generator_equals_reeb() {
        let s = scn("S3");
        let mu = DualElement::new(vec![1.0]);
        let r = albert_reduce(&s, &mu, 10, 0).unwrap();
        assert_eq!((r.level_dim, r.albert_orbit_dim, r.albert_quotient_dim), (3, 0, 3));
        let geo = s.geometry().unwrap();
        let x = DVector::from_vec(vec![0.6, 0.0, 0.0, 0.8]);
        assert!(albert_generators(geo, &mu, &x).unwrap().amax() < 1e-10);
    }

    #[test]
    fn empty_level() {
        let s = scn("S3");
        assert!(matches!(
            albert_reduce(&s, &DualElement::new(vec![2.0]), 5, 0),
            Err(Error::EmptyLevel(_))
        ));
    }
}
