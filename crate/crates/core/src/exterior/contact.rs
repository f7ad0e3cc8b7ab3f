//! Contact condition and Reeb field of a polynomial 1-form restricted to an
//! embedded manifold.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::forms::{exterior_derivative, Poly1Form, Poly2Form};
use super::manifold::{EmbeddedManifold, TangentFrame};
use crate::error::{Error, Result};
use crate::linalg;

/// `|alpha ^ (d alpha)^n|` on an orthonormal frame must exceed this.
pub const CONTACT_TOL: f64 = 1e-9;
pub const REEB_RESIDUAL_TOL: f64 = 1e-9;
const MAX_HALF_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContactVolume {
    pub volume: f64,
    pub is_contact: bool,
}

/// A contact form together with its exterior derivative.
#[derive(Debug, Clone)]
pub struct ContactForm {
    alpha: Poly1Form,
    d_alpha: Poly2Form,
}

impl ContactForm {
    pub fn new(alpha: Poly1Form) -> Self {
        let d_alpha = exterior_derivative(&alpha);
        Self { alpha, d_alpha }
    }

    pub fn alpha(&self) -> &Poly1Form {
        &self.alpha
    }

    pub fn d_alpha(&self) -> &Poly2Form {
        &self.d_alpha
    }
}

impl From<Poly1Form> for ContactForm {
    fn from(alpha: Poly1Form) -> Self {
        Self::new(alpha)
    }
}

/// Values of `alpha` and `d alpha` on a tangent frame.
pub(crate) struct FrameRestriction {
    pub alpha: DVector<f64>,
    pub omega: DMatrix<f64>,
    /// Spectral norm of the ambient `d alpha` matrix (scale for rank tests).
    pub omega_scale: f64,
}

pub(crate) fn restrict_to_frame(form: &ContactForm, frame: &TangentFrame) -> FrameRestriction {
    let p = frame.point.as_slice();
    let a = form.alpha.at(p);
    let w = form.d_alpha.matrix_at(p);
    FrameRestriction {
        alpha: frame.basis.transpose() * a,
        omega: frame.basis.transpose() * &w * &frame.basis,
        omega_scale: linalg::norm2(&w),
    }
}

/// `alpha ^ (d alpha)^n (e_0, ..., e_2n)` by exhaustive antisymmetrization:
/// `2^-n sum_sigma sgn(sigma) alpha(e_s0) prod_i d alpha(e_s(2i-1), e_s(2i))`.
pub fn top_form_value(alpha: &DVector<f64>, omega: &DMatrix<f64>) -> f64 {
    let m = alpha.len();
    debug_assert_eq!(m % 2, 1);
    let n = m / 2;
    let mut perm: Vec<usize> = (0..m).collect();
    let mut total = 0.0;
    heap_permutations(&mut perm, m, 1.0, &mut |p, sign| {
        let head = alpha[p[0]];
        if head == 0.0 {
            return;
        }
        let mut prod = head;
        for i in 0..n {
            prod *= omega[(p[2 * i + 1], p[2 * i + 2])];
        }
        total += sign * prod;
    });
    total / f64::powi(2.0, n as i32)
}

fn heap_permutations<F: FnMut(&[usize], f64)>(p: &mut [usize], k: usize, sign: f64, f: &mut F) -> f64 {
    // Returns the sign after all swaps made at this level.
    if k <= 1 {
        f(p, sign);
        return sign;
    }
    let mut s = heap_permutations(p, k - 1, sign, f);
    for i in 0..k - 1 {
        if k % 2 == 0 {
            p.swap(i, k - 1);
        } else {
            p.swap(0, k - 1);
        }
        s = -s;
        s = heap_permutations(p, k - 1, s, f);
    }
    s
}

pub fn contact_check(
    manifold: &EmbeddedManifold,
    form: &ContactForm,
    point: &[f64],
) -> Result<ContactVolume> {
    let d = manifold.expected_dim();
    if d % 2 == 0 {
        return Err(Error::EvenDimension(d));
    }
    if d / 2 > MAX_HALF_DIM {
        return Err(Error::UnsupportedDimension(d));
    }
    let frame = manifold.tangent_frame(point)?;
    let r = restrict_to_frame(form, &frame);
    let volume = top_form_value(&r.alpha, &r.omega);
    Ok(ContactVolume {
        volume,
        is_contact: volume.abs() > CONTACT_TOL,
    })
}

/// Unique tangent `Y` with `alpha(Y) = 1` and `d alpha(Y, .) = 0` on `TM`.
pub fn reeb_field(
    manifold: &EmbeddedManifold,
    form: &ContactForm,
    point: &[f64],
) -> Result<DVector<f64>> {
    let frame = manifold.tangent_frame(point)?;
    reeb_on_frame(form, &frame)
}

/// Reeb field of the constraint level set through `point` (no on-manifold
/// check); extends the Reeb field to a neighbourhood for integration.
pub(crate) fn reeb_field_extended(
    manifold: &EmbeddedManifold,
    form: &ContactForm,
    point: &[f64],
) -> Result<DVector<f64>> {
    let frame = manifold.frame_unchecked(point)?;
    reeb_on_frame(form, &frame)
}

fn reeb_on_frame(form: &ContactForm, frame: &TangentFrame) -> Result<DVector<f64>> {
    let r = restrict_to_frame(form, frame);
    let d = frame.dim();
    // [alpha^T ; Omega] c = [1 ; 0]
    let mut sys = DMatrix::zeros(d + 1, d);
    sys.row_mut(0).copy_from(&r.alpha.transpose());
    sys.view_mut((1, 0), (d, d)).copy_from(&r.omega);
    let scale = r.alpha.norm().max(r.omega_scale);
    if linalg::rank(&sys, scale) < d {
        return Err(Error::SingularReebSystem);
    }
    let mut rhs = DVector::zeros(d + 1);
    rhs[0] = 1.0;
    let c = linalg::lstsq(&sys, &rhs, scale);
    let residual = (&sys * &c - &rhs).amax();
    if residual > REEB_RESIDUAL_TOL {
        return Err(Error::ReebResidual(residual));
    }
    Ok(&frame.basis * c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::poly::{q, qi, PolyMap};
    use approx::assert_abs_diff_eq;

    /// Pfaffian by expansion along the first row.
    fn pfaffian(m: &DMatrix<f64>) -> f64 {
        let n = m.nrows();
        if n == 0 {
            return 1.0;
        }
        if n % 2 == 1 {
            return 0.0;
        }
        let mut total = 0.0;
        for j in 1..n {
            let keep: Vec<usize> = (1..n).filter(|&k| k != j).collect();
            let sub = DMatrix::from_fn(n - 2, n - 2, |a, b| m[(keep[a], keep[b])]);
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            total += sign * m[(0, j)] * pfaffian(&sub);
        }
        total
    }

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn darboux_form_is_contact() {
        let r3 = EmbeddedManifold::euclidean(3);
        let f = ContactForm::new(Poly1Form::darboux_r3());
        let v = contact_check(&r3, &f, &[0.3, -0.2, 5.0]).unwrap();
        assert!(v.is_contact);
        // dz ^ dx ^ dy (e_x, e_y, e_z) = 1
        assert_abs_diff_eq!(v.volume, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn closed_form_is_not_contact() {
        let r3 = EmbeddedManifold::euclidean(3);
        let dz = Poly1Form::new(vec![
            PolyMap::zero(3),
            PolyMap::zero(3),
            PolyMap::constant(3, qi(1)),
        ])
        .unwrap();
        let v = contact_check(&r3, &ContactForm::new(dz), &[1.0, 2.0, 3.0]).unwrap();
        assert!(!v.is_contact);
    }

    #[test]
    fn even_dimension_is_rejected() {
        let r2 = EmbeddedManifold::euclidean(2);
        let f = ContactForm::new(Poly1Form::standard_contact(1));
        assert_eq!(
            contact_check(&r2, &f, &[0.0, 0.0]),
            Err(Error::EvenDimension(2))
        );
    }

    #[test]
    fn large_dimension_is_unsupported() {
        let s9 = EmbeddedManifold::unit_sphere(10);
        let f = ContactForm::new(Poly1Form::standard_contact(5));
        let mut p = vec![0.0; 10];
        p[0] = 1.0;
        assert_eq!(
            contact_check(&s9, &f, &p),
            Err(Error::UnsupportedDimension(9))
        );
    }

    #[test]
    fn darboux_reeb_is_dz() {
        let r3 = EmbeddedManifold::euclidean(3);
        let f = ContactForm::new(Poly1Form::darboux_r3());
        let y = reeb_field(&r3, &f, &[1.5, -0.5, 2.0]).unwrap();
        assert_abs_diff_eq!(y, DVector::from_vec(vec![0.0, 0.0, 1.0]), epsilon = 1e-12);
    }

    #[test]
    fn hopf_field_on_three_sphere() {
        let s3 = EmbeddedManifold::unit_sphere(4);
        let f = ContactForm::new(Poly1Form::standard_contact(2));
        let p = DVector::from_vec(vec![0.5, -0.1, 0.3, 0.7]).normalize();
        let y = reeb_field(&s3, &f, p.as_slice()).unwrap();
        let hopf = DVector::from_vec(vec![-p[1], p[0], -p[3], p[2]]);
        assert_abs_diff_eq!(y, hopf, epsilon = 1e-10);
    }

    #[test]
    fn volume_matches_pfaffian_expansion() {
        // value = n! * Pf([[0, a^T], [-a, W]]), and det = Pf^2.
        let e2 = EmbeddedManifold::complex_quadric(&[q(1, 2), qi(1), q(1, 3)]);
        let f = ContactForm::new(Poly1Form::standard_contact(3));
        let p = [1.2, 0.1, -0.2, 0.3, 0.5, -0.4];
        let scale = (e2.constraints()[0].eval(&p) + 1.0).sqrt();
        let p: Vec<f64> = p.iter().map(|x| x / scale).collect();
        let frame = e2.tangent_frame(&p).unwrap();
        let r = restrict_to_frame(&f, &frame);
        let value = top_form_value(&r.alpha, &r.omega);
        let m = r.alpha.len();
        let mut bordered = DMatrix::zeros(m + 1, m + 1);
        for i in 0..m {
            bordered[(0, i + 1)] = r.alpha[i];
            bordered[(i + 1, 0)] = -r.alpha[i];
        }
        bordered.view_mut((1, 1), (m, m)).copy_from(&r.omega);
        let pf = pfaffian(&bordered);
        let n = m / 2;
        assert_abs_diff_eq!(value, pf * factorial(n), epsilon = 1e-10);
        assert_abs_diff_eq!(value * value, bordered.determinant() * factorial(n).powi(2), epsilon = 1e-9);
    }
}
