use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::linear::{generator_field, LinearAction};
use crate::error::{Error, Result};
use crate::exterior::{eval_1form, ContactForm, EmbeddedManifold, Poly1Form, PolyMap};
use crate::lie::{coadjoint_action, DualElement};
use crate::linalg::{self, Subspace};

/// Value of the moment map, in the dual basis.
pub type MomentValue = DualElement;

/// `<Phi, e_i> = alpha(M_i x)` held as exact polynomials, together with their
/// gradients, so directional derivatives never go through finite differences.
#[derive(Debug, Clone)]
pub struct MomentMap {
    components: Vec<PolyMap>,
    gradients: Vec<Vec<PolyMap>>,
}

impl MomentMap {
    pub fn new(action: &LinearAction, form: &Poly1Form) -> Self {
        let components: Vec<PolyMap> = (0..action.num_generators())
            .map(|i| form.contract(&action.generator(i).as_linear_field()))
            .collect();
        let gradients = components.iter().map(PolyMap::gradient).collect();
        Self {
            components,
            gradients,
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[PolyMap] {
        &self.components
    }

    pub fn eval(&self, point: &[f64]) -> MomentValue {
        DualElement::from_vector(DVector::from_iterator(
            self.components.len(),
            self.components.iter().map(|c| c.eval(point)),
        ))
    }

    /// `k x n` matrix of `d Phi` in ambient coordinates.
    pub fn jacobian(&self, point: &[f64]) -> DMatrix<f64> {
        let n = point.len();
        DMatrix::from_fn(self.components.len(), n, |i, j| self.gradients[i][j].eval(point))
    }

    /// `<d Phi_x (v), e_i>`.
    pub fn directional(&self, i: usize, point: &[f64], v: &[f64]) -> f64 {
        self.gradients[i]
            .iter()
            .zip(v)
            .map(|(g, vj)| if *vj == 0.0 { 0.0 } else { g.eval(point) * vj })
            .sum()
    }
}

/// Component `i` is `alpha_x(A_i(x))`.
pub fn moment_map(action: &LinearAction, form: &Poly1Form, point: &DVector<f64>) -> Result<MomentValue> {
    let coords = (0..action.num_generators())
        .map(|i| {
            let v = generator_field(action, i, point)?;
            eval_1form(form, point.as_slice(), v.as_slice())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DualElement::new(coords))
}

/// `f alpha` for a positive `f`, checked at the given points.
pub fn conformal_rescale(form: &Poly1Form, f: &PolyMap, points: &[DVector<f64>]) -> Result<Poly1Form> {
    if let Some(v) = points.iter().map(|p| f.eval(p.as_slice())).find(|v| v.is_nan() || *v <= 0.0) {
        return Err(Error::NonPositiveFactor(v));
    }
    Ok(form.scaled_by(f))
}

/// `Psi(m, t) = e^t Phi(m)` on the symplectization.
pub fn symplectization_moment(
    action: &LinearAction,
    form: &Poly1Form,
    point: &DVector<f64>,
    t: f64,
) -> Result<MomentValue> {
    let phi = moment_map(action, form, point)?;
    Ok(DualElement::from_vector(phi.coords() * t.exp()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentDifferential {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Compares `<d Phi_x(v), A>` (exact differentiation) with
/// `d alpha_x(v, A_M(x))`.
pub fn moment_differential_check(
    action: &LinearAction,
    form: &ContactForm,
    point: &DVector<f64>,
    v: &DVector<f64>,
    basis_index: usize,
) -> Result<MomentDifferential> {
    let a_m = generator_field(action, basis_index, point)?;
    if v.len() != point.len() {
        return Err(Error::DimensionMismatch {
            expected: point.len(),
            found: v.len(),
        });
    }
    let moment = MomentMap::new(action, form.alpha());
    let lhs = moment.directional(basis_index, point.as_slice(), v.as_slice());
    let rhs = form.d_alpha().eval(point.as_slice(), v.as_slice(), a_m.as_slice());
    Ok(MomentDifferential {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}

/// `d alpha(A_M(x), B_M(x))` over all generator pairs.
pub fn isotropy_gram(action: &LinearAction, form: &ContactForm, point: &DVector<f64>) -> DMatrix<f64> {
    let g = action.generator_matrix_at(point);
    let w = form.d_alpha().matrix_at(point.as_slice());
    g.transpose() * w * g
}

/// `{A : A_M(x) in R Y(x)}` for the Reeb field `Y` at `x`.
pub fn reeb_aligned_subalgebra(action: &LinearAction, reeb: &DVector<f64>, point: &DVector<f64>) -> Subspace {
    let g = action.generator_matrix_at(point);
    let y = reeb / reeb.norm();
    let off_reeb = &g - &y * (y.transpose() * &g);
    let scale = point.norm() * action.generator_scale();
    Subspace::from_orthonormal(linalg::nullspace(&off_reeb, scale))
}

/// Annihilator in the algebra of `Im d(Phi)_x` restricted to `T_x M`.
pub fn moment_image_annihilator(
    moment: &MomentMap,
    manifold: &EmbeddedManifold,
    point: &DVector<f64>,
) -> Result<Subspace> {
    let frame = manifold.tangent_frame(point.as_slice())?;
    let image = moment.jacobian(point.as_slice()) * &frame.basis;
    let scale = linalg::norm2(&moment.jacobian(point.as_slice()));
    Ok(Subspace::from_orthonormal(linalg::nullspace(&image.transpose(), scale)))
}

/// Largest `|d<Phi, B>(A_M) + <ad^dagger(A) Phi, B>|` over basis pairs.
///
/// With `A_M(x) = M_A x` and `[M_A, M_B] = M_[A,B]`, invariance of `alpha`
/// gives `d<Phi, B>(A_M) = -<Phi, [A, B]>`.
pub fn infinitesimal_equivariance_gap(action: &LinearAction, moment: &MomentMap, point: &DVector<f64>) -> f64 {
    let alg = action.algebra();
    let k = alg.dim();
    let phi = moment.eval(point.as_slice());
    let mut worst = 0.0_f64;
    for a in 0..k {
        let a_m = action.generator_matrix(a) * point;
        let ea = DVector::from_fn(k, |i, _| if i == a { 1.0 } else { 0.0 });
        let ad = coadjoint_action(alg, &ea, &phi);
        for b in 0..k {
            let lhs = moment.directional(b, point.as_slice(), a_m.as_slice());
            worst = worst.max((lhs + ad.coords()[b]).abs());
        }
    }
    worst
}
