use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::sampling::SampleSet;
use crate::error::{Error, Result};
use crate::exterior::EmbeddedManifold;
use crate::lie::{kernel_algebra, DualElement};
use crate::linalg::{self, Subspace};
use crate::scenario::{Geometry, Scenario};

/// Principal-angle tolerance between the Gram kernel and the orbit.
pub const KERNEL_ANGLE_TOL: f64 = 1e-6;
/// Share of samples that must agree on a measured dimension.
pub const CONSENSUS_FRACTION: f64 = 0.9;
/// Relative cut for rank tests at sampled points. Samples solve the level
/// equations to `ACCEPT_RESIDUAL`, and a modulus that vanishes on `Z` enters
/// them squared, so it is only pinned to `sqrt(ACCEPT_RESIDUAL)`.
pub const SAMPLE_RANK_RTOL: f64 = 1e-5;

/// Data at `mu` that does not depend on the point.
#[derive(Debug, Clone)]
pub struct RayContext {
    pub mu: DualElement,
    /// Orthonormal rows spanning the complement of `mu` in the dual.
    pub mu_perp: DMatrix<f64>,
    /// `k_mu`, orthonormal basis in the algebra.
    pub kernel: Subspace,
}

impl RayContext {
    pub fn new(scn: &Scenario, mu: &DualElement) -> Result<Self> {
        let k = scn.algebra().dim();
        if mu.dim() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: mu.dim(),
            });
        }
        if mu.is_zero() {
            return Err(Error::ZeroMu);
        }
        let row = linalg::row_vector(mu.coords());
        let mu_perp = linalg::nullspace(&row, 0.0).transpose();
        Ok(Self {
            mu: mu.clone(),
            mu_perp,
            kernel: kernel_algebra(scn.algebra(), mu)?,
        })
    }
}

/// `A_M(x)` for a basis of `k_mu`, as columns.
fn kernel_generators(geo: &Geometry, ctx: &RayContext, point: &DVector<f64>) -> DMatrix<f64> {
    geo.action.generator_matrix_at(point) * ctx.kernel.basis()
}

fn generator_scale(geo: &Geometry, point: &DVector<f64>) -> f64 {
    point.norm() * geo.action.generator_scale()
}

/// `rank [d Phi_x(T_x M) | mu] = dim g*`.
pub fn transversality_at(geo: &Geometry, manifold: &EmbeddedManifold, ctx: &RayContext, point: &DVector<f64>) -> Result<bool> {
    let frame = manifold.tangent_frame(point.as_slice())?;
    let jphi = geo.moment.jacobian(point.as_slice());
    let image = &jphi * &frame.basis;
    let mu_col = DMatrix::from_column_slice(ctx.mu.dim(), 1, ctx.mu.coords().as_slice());
    let m = linalg::hstack(&[&image, &mu_col]);
    let scale = linalg::norm2(&jphi).max(ctx.mu.coords().norm());
    Ok(linalg::rank_rtol(&m, scale, SAMPLE_RANK_RTOL) == ctx.mu.dim())
}

/// `k_mu` generators are linearly independent at the point.
pub fn locally_free_at(geo: &Geometry, ctx: &RayContext, point: &DVector<f64>) -> bool {
    let g = kernel_generators(geo, ctx, point);
    g.ncols() == 0 || linalg::rank_rtol(&g, generator_scale(geo, point), SAMPLE_RANK_RTOL) == g.ncols()
}

pub fn transversality_check(scn: &Scenario, mu: &DualElement, point: &DVector<f64>) -> Result<bool> {
    let geo = scn.geometry()?;
    transversality_at(geo, &geo.manifold, &RayContext::new(scn, mu)?, point)
}

pub fn locally_free_check(scn: &Scenario, mu: &DualElement, point: &DVector<f64>) -> Result<bool> {
    let geo = scn.geometry()?;
    Ok(locally_free_at(geo, &RayContext::new(scn, mu)?, point))
}

/// `dim T_z Z` on the given manifold: `dim M - rank(P d Phi)` with `P` the
/// projection onto the complement of `mu`.
pub fn ray_tangent_dim(geo: &Geometry, manifold: &EmbeddedManifold, ctx: &RayContext, point: &DVector<f64>) -> Result<usize> {
    Ok(ray_tangent(geo, manifold, ctx, point)?.dim())
}

fn ray_tangent(geo: &Geometry, manifold: &EmbeddedManifold, ctx: &RayContext, point: &DVector<f64>) -> Result<Subspace> {
    let frame = manifold.tangent_frame(point.as_slice())?;
    let jphi = geo.moment.jacobian(point.as_slice());
    let constraint = &ctx.mu_perp * &jphi * &frame.basis;
    let null = linalg::nullspace(&constraint, linalg::norm2(&jphi));
    Ok(Subspace::from_orthonormal(&frame.basis * null))
}

/// `dim span{A_M(x) : A in k_mu}`.
pub fn kernel_orbit_dim(geo: &Geometry, ctx: &RayContext, point: &DVector<f64>) -> usize {
    let g = kernel_generators(geo, ctx, point);
    if g.ncols() == 0 {
        0
    } else {
        linalg::rank_rtol(&g, generator_scale(geo, point), SAMPLE_RANK_RTOL)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedKernel {
    pub kernel_dim: usize,
    pub orbit_dim: usize,
    pub principal_angle: f64,
    pub ok: bool,
}

/// Kernel of `d alpha` on `W = T_z Z cap ker alpha_z` against the `k_mu`
/// orbit directions, on the given manifold.
pub fn reduced_kernel_at(
    geo: &Geometry,
    manifold: &EmbeddedManifold,
    ctx: &RayContext,
    point: &DVector<f64>,
) -> Result<ReducedKernel> {
    let p = point.as_slice();
    let tz = ray_tangent(geo, manifold, ctx, point)?;
    let alpha = geo.form.alpha().at(p);
    let ker_alpha = Subspace::from_orthonormal(linalg::nullspace(&linalg::row_vector(&alpha), 0.0));
    let w = tz.intersection(&ker_alpha);
    let omega = geo.form.d_alpha().matrix_at(p);
    let gram = w.basis().transpose() * &omega * w.basis();
    let null = linalg::nullspace(&gram, linalg::norm2(&omega));
    let kernel = Subspace::from_orthonormal(w.basis() * null);
    let g = kernel_generators(geo, ctx, point);
    let orbit = Subspace::span(&g, generator_scale(geo, point));
    let angle = linalg::max_principal_angle(&kernel, &orbit);
    Ok(ReducedKernel {
        kernel_dim: kernel.dim(),
        orbit_dim: orbit.dim(),
        principal_angle: angle,
        ok: kernel.dim() == orbit.dim() && angle < KERNEL_ANGLE_TOL,
    })
}

pub fn reduced_kernel_check(scn: &Scenario, mu: &DualElement, point: &DVector<f64>) -> Result<ReducedKernel> {
    let geo = scn.geometry()?;
    let ctx = RayContext::new(scn, mu)?;
    if !transversality_at(geo, &geo.manifold, &ctx, point)? {
        return Err(Error::Precondition("moment map is not transverse to the ray at the point".into()));
    }
    if !locally_free_at(geo, &ctx, point) {
        return Err(Error::Precondition("kernel group does not act locally freely at the point".into()));
    }
    reduced_kernel_at(geo, &geo.manifold, &ctx, point)
}

/// Value shared by at least 90% of `values` (smallest on ties).
pub fn consensus(values: &[usize]) -> Result<usize> {
    let total = values.len();
    let mut counts = std::collections::BTreeMap::new();
    for v in values {
        *counts.entry(*v).or_insert(0usize) += 1;
    }
    let (best, count) = counts
        .iter()
        .fold((0, 0), |acc, (&v, &c)| if c > acc.1 { (v, c) } else { acc });
    if total == 0 || (count as f64) < CONSENSUS_FRACTION * total as f64 {
        return Err(Error::NoDimensionConsensus { best, count, total });
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionMode {
    Numeric,
    Bookkeeping,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientDimension {
    pub mode: DimensionMode,
    pub level_ray_dim: usize,
    pub orbit_dim: usize,
    pub quotient_dim: usize,
    /// `dim M - (dim g* - 1)`, valid under transversality.
    pub formula_level_ray_dim: Option<usize>,
}

/// `dim Z - dim(k_mu orbit)`, measured on samples when there are any and
/// from declared data otherwise.
pub fn quotient_dimension(scn: &Scenario, mu: &DualElement, samples: Option<&SampleSet>) -> Result<QuotientDimension> {
    let k = scn.algebra().dim();
    let formula = scn.manifold_dim().and_then(|d| (d + 1).checked_sub(k));
    match samples.filter(|s| !s.is_empty()) {
        Some(set) => {
            let geo = scn.geometry()?;
            let ctx = RayContext::new(scn, mu)?;
            let mut z = Vec::with_capacity(set.len());
            let mut orb = Vec::with_capacity(set.len());
            let mut transversal = 0usize;
            for p in &set.points {
                z.push(ray_tangent_dim(geo, &geo.manifold, &ctx, p)?);
                orb.push(kernel_orbit_dim(geo, &ctx, p));
                transversal += usize::from(transversality_at(geo, &geo.manifold, &ctx, p)?);
            }
            let z_dim = consensus(&z)?;
            let orbit_dim = consensus(&orb)?;
            if (transversal as f64) >= CONSENSUS_FRACTION * set.len() as f64 {
                if let Some(f) = formula {
                    if f != z_dim {
                        return Err(Error::InconsistentDimension { numeric: z_dim, formula: f });
                    }
                }
            }
            let quotient_dim = z_dim.checked_sub(orbit_dim).ok_or(Error::NegativeQuotient {
                stratum_dim: z_dim,
                orbit_dim,
            })?;
            Ok(QuotientDimension {
                mode: DimensionMode::Numeric,
                level_ray_dim: z_dim,
                orbit_dim,
                quotient_dim,
                formula_level_ray_dim: formula,
            })
        }
        None => {
            if scn.is_numeric() {
                return Err(Error::EmptyLevel(format!(
                    "no samples of the level ray in `{}`",
                    scn.id()
                )));
            }
            let z_dim = formula.ok_or_else(|| Error::Precondition("manifold dimension is not declared".into()))?;
            if scn.declared().locally_free != Some(true) {
                return Err(Error::Precondition("local freeness of the kernel group is not declared".into()));
            }
            let orbit_dim = kernel_algebra(scn.algebra(), mu)?.dim();
            let quotient_dim = z_dim.checked_sub(orbit_dim).ok_or(Error::NegativeQuotient {
                stratum_dim: z_dim,
                orbit_dim,
            })?;
            Ok(QuotientDimension {
                mode: DimensionMode::Bookkeeping,
                level_ray_dim: z_dim,
                orbit_dim,
                quotient_dim,
                formula_level_ray_dim: formula,
            })
        }
    }
}
