//! Linear model of a slice for the coadjoint action at `mu`.
//!
//! The slice through `mu` is `S = R^+ (mu + D)` with `D` a small ball in the
//! complement of the orbit tangent `g_mu^o`, taken with respect to an inner
//! product on the dual. At the linear level the reduction identity
//! `(R^+ mu + g_mu^o) cap S = R^+ mu` holds exactly when the orbit tangent and
//! the slice tangent meet only in zero.

use nalgebra::DMatrix;
use serde::Serialize;

use super::algebra::{DualElement, LieAlgebraData};
use super::coadjoint::orbit_tangent;
use crate::linalg::{self, Subspace};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceReport {
    pub orbit_tangent_dim: usize,
    pub slice_tangent_dim: usize,
    /// `T_mu(G mu) cap T_mu S = 0`.
    pub transversal: bool,
    /// `(R mu + g_mu^o) cap T_mu S = R mu`.
    pub ray_identity: bool,
}

/// Inner product on the dual induced by an invariant form on the algebra.
pub fn dual_form(alg: &LieAlgebraData) -> Option<DMatrix<f64>> {
    alg.invariant_form().and_then(|b| b.clone().try_inverse())
}

/// `dual_inner` defaults to the identity in the dual basis.
pub fn slice_intersection_check(
    alg: &LieAlgebraData,
    mu: &DualElement,
    dual_inner: Option<&DMatrix<f64>>,
) -> SliceReport {
    let n = alg.dim();
    let identity = DMatrix::identity(n, n);
    let g = dual_inner.unwrap_or(&identity);
    let orbit = orbit_tangent(alg, mu);

    // complement of the orbit tangent with respect to g
    let complement = if orbit.dim() == 0 {
        Subspace::full(n)
    } else {
        let rows = orbit.basis().transpose() * g;
        Subspace::from_orthonormal(linalg::nullspace(&rows, linalg::norm2(g)))
    };
    let mu_col = DMatrix::from_column_slice(n, 1, mu.coords().as_slice());
    let slice = Subspace::span(&linalg::hstack(&[&mu_col, complement.basis()]), 0.0);

    let transversal = orbit.intersection(&slice).dim() == 0;
    let ray_plus_orbit = Subspace::span(&linalg::hstack(&[&mu_col, orbit.basis()]), 0.0);
    let meet = ray_plus_orbit.intersection(&slice);
    let ray = Subspace::span(&mu_col, 0.0);
    let ray_identity = meet.dim() == ray.dim() && linalg::max_principal_angle(&meet, &ray) < 1e-9;

    SliceReport {
        orbit_tangent_dim: orbit.dim(),
        slice_tangent_dim: slice.dim(),
        transversal,
        ray_identity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::algebra::Catalog;

    #[test]
    fn abelian_is_trivially_transversal() {
        let alg = LieAlgebraData::abelian(3);
        let r = slice_intersection_check(&alg, &DualElement::new(vec![1.0, 2.0, 0.0]), None);
        assert_eq!(r.orbit_tangent_dim, 0);
        assert!(r.transversal);
        assert!(r.ray_identity);
    }

    #[test]
    fn so3_slice() {
        let cat = Catalog::builtin();
        let so3 = cat.get("so3").unwrap();
        let r = slice_intersection_check(so3, &DualElement::new(vec![0.0, 0.0, 1.0]), None);
        assert_eq!(r.orbit_tangent_dim, 2);
        assert_eq!(r.slice_tangent_dim, 1);
        assert!(r.transversal);
        assert!(r.ray_identity);
    }

    #[test]
    fn sl2_nilpotent_with_trace_form() {
        // The trace form is indefinite; the complement of the orbit tangent
        // at the nilpotent element contains mu itself.
        let cat = Catalog::builtin();
        let sl2 = cat.get("sl2").unwrap();
        let g = dual_form(sl2).unwrap();
        let r = slice_intersection_check(sl2, &DualElement::new(vec![0.0, 0.0, 1.0]), Some(&g));
        assert_eq!(r.orbit_tangent_dim, 2);
        assert!(!r.transversal);
    }
}
