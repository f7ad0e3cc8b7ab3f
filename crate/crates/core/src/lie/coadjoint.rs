//! Coadjoint calculus: `ad^dagger`, stabilizers, kernel algebras and the
//! hypothesis check for reduction at a ray.
//!
//! Sign convention: `<ad^dagger(A) mu, B> = <mu, [A, B]>`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::algebra::{DualElement, LieAlgebraData};
use crate::error::{Error, Result};
use crate::linalg::{self, Subspace};

/// Absolute tolerance for `<mu, [A, B]>` on orthonormal bases.
pub const IDEAL_TOL: f64 = 1e-10;
/// Distance of a lattice pairing from the nearest integer.
pub const INTEGRALITY_TOL: f64 = 1e-9;

pub fn coadjoint_action(alg: &LieAlgebraData, a: &DVector<f64>, mu: &DualElement) -> DualElement {
    let n = alg.dim();
    let m = mu.coords();
    let coords = DVector::from_fn(n, |j, _| {
        let mut s = 0.0;
        for i in 0..n {
            if a[i] == 0.0 {
                continue;
            }
            for k in 0..n {
                s += a[i] * alg.c(i, j, k) * m[k];
            }
        }
        s
    });
    DualElement::from_vector(coords)
}

/// Matrix of `A -> ad^dagger(A) mu`; column `i` is `ad^dagger(e_i) mu`.
pub fn coadjoint_matrix(alg: &LieAlgebraData, mu: &DualElement) -> DMatrix<f64> {
    let n = alg.dim();
    let m = mu.coords();
    DMatrix::from_fn(n, n, |j, i| (0..n).map(|k| alg.c(i, j, k) * m[k]).sum())
}

fn coadjoint_scale(alg: &LieAlgebraData, mu: &DualElement) -> f64 {
    alg.max_abs_structure_constant() * mu.coords().norm()
}

/// Infinitesimal stabilizer `g_mu`.
pub fn coadjoint_stabilizer(alg: &LieAlgebraData, mu: &DualElement) -> Subspace {
    let m = coadjoint_matrix(alg, mu);
    Subspace::from_orthonormal(linalg::nullspace(&m, coadjoint_scale(alg, mu)))
}

/// Tangent space `g_mu^o` of the coadjoint orbit at `mu`.
pub fn orbit_tangent(alg: &LieAlgebraData, mu: &DualElement) -> Subspace {
    Subspace::span(&coadjoint_matrix(alg, mu), coadjoint_scale(alg, mu))
}

/// `ker mu` as a subspace of the algebra.
pub fn annihilator_of(mu: &DualElement) -> Subspace {
    let row = linalg::row_vector(mu.coords());
    Subspace::from_orthonormal(linalg::nullspace(&row, 0.0))
}

/// Kernel algebra `k_mu = ker mu restricted to g_mu`, checked to be an ideal
/// of the stabilizer.
pub fn kernel_algebra(alg: &LieAlgebraData, mu: &DualElement) -> Result<Subspace> {
    let stab = coadjoint_stabilizer(alg, mu);
    let s = stab.basis();
    let k = if s.ncols() == 0 {
        Subspace::zero(alg.dim())
    } else {
        let restricted = linalg::row_vector(mu.coords()) * s;
        let null = linalg::nullspace(&restricted, mu.coords().norm());
        Subspace::span(&(s * null), 0.0)
    };
    let mut worst = 0.0_f64;
    for a in k.basis().column_iter() {
        for b in s.column_iter() {
            let br = alg.bracket(&a.into_owned(), &b.into_owned());
            worst = worst.max(mu.pair(&br).abs());
        }
    }
    let scale = 1.0_f64.max(coadjoint_scale(alg, mu));
    if worst > IDEAL_TOL * scale {
        return Err(Error::IdealViolation(worst));
    }
    Ok(k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub dim_stabilizer: usize,
    pub dim_kernel_algebra: usize,
    /// `ker mu + g_mu = g`.
    pub sum_condition_holds: bool,
    pub kernel_equals_stabilizer: bool,
    pub mu_integral: Option<bool>,
}

/// Integrality against lattice vectors lying in `g_mu`. `None` when no
/// lattice is known.
pub fn mu_integral(alg: &LieAlgebraData, mu: &DualElement, lattice: Option<&[DVector<f64>]>) -> Option<bool> {
    let lattice = lattice.or_else(|| alg.lattice())?;
    let stab = coadjoint_stabilizer(alg, mu);
    Some(
        lattice
            .iter()
            .filter(|l| stab.residual(l) < 1e-10 * l.norm().max(1.0))
            .all(|l| {
                let p = mu.pair(l);
                (p - p.round()).abs() < INTEGRALITY_TOL
            }),
    )
}

pub fn check_reduction_hypotheses(
    alg: &LieAlgebraData,
    mu: &DualElement,
    lattice: Option<&[DVector<f64>]>,
) -> Result<HypothesisReport> {
    let stab = coadjoint_stabilizer(alg, mu);
    let kernel = kernel_algebra(alg, mu)?;
    let ker_mu = annihilator_of(mu);
    let sum = linalg::hstack(&[ker_mu.basis(), stab.basis()]);
    let sum_rank = linalg::rank(&sum, 1.0);
    Ok(HypothesisReport {
        dim_stabilizer: stab.dim(),
        dim_kernel_algebra: kernel.dim(),
        sum_condition_holds: sum_rank == alg.dim(),
        kernel_equals_stabilizer: kernel.dim() == stab.dim(),
        mu_integral: if alg.is_abelian() || lattice.is_some() {
            mu_integral(alg, mu, lattice)
        } else {
            None
        },
    })
}
