//! Kernels and perpendiculars of antisymmetric bilinear forms.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, Subspace};

const ANTISYMMETRY_TOL: f64 = 1e-12;

fn check_antisymmetric(form: &DMatrix<f64>) -> Result<()> {
    if !form.is_square() {
        return Err(Error::DimensionMismatch {
            expected: form.nrows(),
            found: form.ncols(),
        });
    }
    let asym = (form + form.transpose()).amax();
    if asym > ANTISYMMETRY_TOL * form.amax().max(1.0) {
        return Err(Error::NotAntisymmetric(asym));
    }
    Ok(())
}

/// `ker omega = {v : omega(v, .) = 0}`.
pub fn bilinear_kernel(form: &DMatrix<f64>) -> Result<Subspace> {
    check_antisymmetric(form)?;
    Ok(Subspace::from_orthonormal(linalg::nullspace(form, 0.0)))
}

/// The form restricted to a subspace, in that subspace's basis.
pub fn restrict(form: &DMatrix<f64>, sub: &Subspace) -> DMatrix<f64> {
    sub.basis().transpose() * form * sub.basis()
}

/// Kernel of `omega` restricted to `sub`, as a subspace of the ambient space.
/// Ranks are measured against the ambient form, so a form that vanishes on
/// `sub` up to rounding has all of `sub` as kernel.
pub fn restricted_kernel(form: &DMatrix<f64>, sub: &Subspace) -> Result<Subspace> {
    check_antisymmetric(form)?;
    let k = linalg::nullspace(&restrict(form, sub), linalg::norm2(form));
    Ok(Subspace::from_orthonormal(sub.basis() * k))
}

/// `W^omega = {v : omega(v, w) = 0 for all w in W}` for nondegenerate omega.
pub fn symplectic_perp(form: &DMatrix<f64>, w: &Subspace) -> Result<Subspace> {
    check_antisymmetric(form)?;
    if linalg::rank(form, 0.0) < form.nrows() {
        return Err(Error::DegenerateForm);
    }
    if w.dim() == 0 {
        return Ok(Subspace::full(form.nrows()));
    }
    let constraints = w.basis().transpose() * form.transpose();
    Ok(Subspace::from_orthonormal(linalg::nullspace(&constraints, linalg::norm2(form))))
}

/// Standard symplectic matrix on `R^{2n}` with interleaved `(x_i, y_i)`.
pub fn standard_symplectic(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(2 * i, 2 * i + 1)] = 1.0;
        m[(2 * i + 1, 2 * i)] = -1.0;
    }
    m
}
