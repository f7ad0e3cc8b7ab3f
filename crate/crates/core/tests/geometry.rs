//! Forms, Reeb fields and moment maps against closed forms and finite
//! differences.
#![allow(clippy::needless_range_loop)]

mod common;

use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

use common::*;
use contact_reduction::action::{
    infinitesimal_equivariance_gap, moment_map, symplectization_moment, LinearAction, MomentMap,
};
use contact_reduction::exterior::{
    contact_check, exterior_derivative, q, qi, reeb_field, ContactForm, EmbeddedManifold, Poly1Form, PolyMap,
};
use contact_reduction::reduction::ray_parameter;
use contact_reduction::{Catalog, DualElement};

fn random_poly(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> PolyMap {
    let terms: Vec<_> = (0..4)
        .map(|_| {
            let e: Vec<u32> = (0..n).map(|_| r.random_range(0..=2)).collect();
            (e, q(r.random_range(-5..=5), r.random_range(1..=3)))
        })
        .collect();
    PolyMap::from_terms(n, terms)
}

fn rand_vec(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.random_range(-1.0..1.0)).collect()
}

/// `d alpha(u, v) = D_u(alpha(v)) - D_v(alpha(u))` for constant `u, v`,
/// by central differences.
fn d_alpha_fd(form: &Poly1Form, p: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let h = 1e-4;
    let shift = |d: &[f64], t: f64| -> Vec<f64> { p.iter().zip(d).map(|(a, b)| a + t * b).collect() };
    let along = |d: &[f64], w: &[f64]| {
        (form.eval(&shift(d, h), w).unwrap() - form.eval(&shift(d, -h), w).unwrap()) / (2.0 * h)
    };
    along(u, v) - along(v, u)
}

#[test]
fn exterior_derivative_matches_finite_differences() {
    for case in 0..40 {
        let mut r = rng(7, case);
        let n = r.random_range(2..=5);
        let form = Poly1Form::new((0..n).map(|_| random_poly(&mut r, n)).collect()).unwrap();
        let d = exterior_derivative(&form);
        let p = rand_vec(&mut r, n);
        let (u, v) = (rand_vec(&mut r, n), rand_vec(&mut r, n));
        let exact = d.eval(&p, &u, &v);
        assert_abs_diff_eq!(exact, d_alpha_fd(&form, &p, &u, &v), epsilon = 1e-6);
        assert_abs_diff_eq!(exact, -d.eval(&p, &v, &u), epsilon = 1e-12);
    }
}

#[test]
fn standard_form_has_constant_derivative() {
    let form = Poly1Form::standard_contact(3);
    let d = exterior_derivative(&form);
    let mut r = rng(8, 0);
    for _ in 0..20 {
        let (p, u, v) = (rand_vec(&mut r, 6), rand_vec(&mut r, 6), rand_vec(&mut r, 6));
        assert_abs_diff_eq!(d.eval(&p, &u, &v), std_d_alpha(&u, &v), epsilon = 1e-14);
    }
}

#[test]
fn reeb_field_on_ellipsoid() {
    // E2: |z1|^2/2 + |z2|^2 + |z3|^2/3 = 1
    let a = [0.5, 1.0, 1.0 / 3.0];
    let m = EmbeddedManifold::complex_quadric(&[q(1, 2), qi(1), q(1, 3)]);
    let form = ContactForm::new(Poly1Form::standard_contact(3));
    let mut r = rng(9, 0);
    for _ in 0..25 {
        let x = rand_vec(&mut r, 6);
        let s = quadric(&a, &x).sqrt();
        let p: Vec<f64> = x.iter().map(|v| v / s).collect();
        let y = reeb_field(&m, &form, &p).unwrap();
        // alpha(Y) = sum x Y_y - y Y_x
        let alpha_y: f64 = (0..3).map(|j| p[2 * j] * y[2 * j + 1] - p[2 * j + 1] * y[2 * j]).sum();
        assert_abs_diff_eq!(alpha_y, 1.0, epsilon = 1e-12);
        let grad = DVector::from_fn(6, |i, _| a[i / 2] * p[i]);
        assert_abs_diff_eq!(grad.dot(&y), 0.0, epsilon = 1e-12);
        let frame = m.tangent_frame(&p).unwrap();
        for c in frame.basis.column_iter() {
            assert_abs_diff_eq!(std_d_alpha(y.as_slice(), c.as_slice()), 0.0, epsilon = 1e-12);
        }
        // closed form: Y is proportional to sum a_j (-y_j, x_j)
        let rot = DVector::from_fn(6, |i, _| if i % 2 == 0 { -a[i / 2] * p[i + 1] } else { a[i / 2] * p[i - 1] });
        let scale = 1.0 / (0..6).map(|i| a[i / 2] * p[i] * p[i]).sum::<f64>();
        assert_abs_diff_eq!((rot * scale - &y).amax(), 0.0, epsilon = 1e-12);
    }
}

#[test]
fn conformal_factor_scales_contact_volume() {
    // (f alpha) ^ d(f alpha)^n = f^(n+1) alpha ^ (d alpha)^n on the same frame
    let m = EmbeddedManifold::complex_quadric(&[q(1, 2), qi(1), q(1, 3)]);
    let alpha = Poly1Form::standard_contact(3);
    let mut f = PolyMap::constant(6, qi(1));
    for i in 0..6 {
        let mut e = vec![0; 6];
        e[i] = 2;
        f = &f + &PolyMap::monomial(6, e, q(1, 4));
    }
    let base = ContactForm::new(alpha.clone());
    let scaled = ContactForm::new(alpha.scaled_by(&f));
    let mut r = rng(10, 0);
    for _ in 0..25 {
        let x = rand_vec(&mut r, 6);
        let s = quadric(&[0.5, 1.0, 1.0 / 3.0], &x).sqrt();
        let p: Vec<f64> = x.iter().map(|v| v / s).collect();
        let v0 = contact_check(&m, &base, &p).unwrap();
        let v1 = contact_check(&m, &scaled, &p).unwrap();
        assert!(v0.is_contact && v1.is_contact);
        let fp = f.eval(&p);
        assert_abs_diff_eq!(v1.volume / v0.volume, fp.powi(3), epsilon = 1e-9 * fp.powi(3));
    }
}

#[test]
fn torus_moment_is_invariant_along_orbits() {
    let w = vec![vec![1, 1, 1], vec![0, 1, -1]];
    let action = LinearAction::torus(&w).unwrap();
    let form = Poly1Form::standard_contact(3);
    let mut r = rng(11, 0);
    for _ in 0..20 {
        let x = DVector::from_vec(rand_vec(&mut r, 6));
        let a = DVector::from_vec(rand_vec(&mut r, 2));
        let g = action.group_element(&a, r.random_range(-3.0..3.0));
        let before = torus_moment(&w, x.as_slice());
        let after = moment_map(&action, &form, &(&g * &x)).unwrap();
        for (b, c) in before.iter().zip(after.coords().iter()) {
            assert_abs_diff_eq!(b, c, epsilon = 1e-12);
        }
    }
}

#[test]
fn so3_moment_is_equivariant() {
    // Phi(x, y) = 2 (y cross x), and Phi(R z) = R Phi(z)
    let so3 = Catalog::builtin().get("so3").unwrap().clone();
    let action = LinearAction::so3_on_c3(so3).unwrap();
    let form = Poly1Form::standard_contact(3);
    let moment = MomentMap::new(&action, &form);
    let cross = |z: &[f64]| {
        let x = nalgebra::Vector3::new(z[0], z[2], z[4]);
        let y = nalgebra::Vector3::new(z[1], z[3], z[5]);
        y.cross(&x) * 2.0
    };
    let mut r = rng(12, 0);
    for _ in 0..20 {
        let z = DVector::from_vec(rand_vec(&mut r, 6));
        let phi = moment_map(&action, &form, &z).unwrap();
        let exact = cross(z.as_slice());
        for i in 0..3 {
            assert_abs_diff_eq!(phi.coords()[i], exact[i], epsilon = 1e-12);
        }
        assert!(infinitesimal_equivariance_gap(&action, &moment, &z) < 1e-12);
        let a = DVector::from_vec(rand_vec(&mut r, 3));
        let g = action.group_element(&a, 1.0);
        let rot = DMatrix::from_fn(3, 3, |i, j| g[(2 * i, 2 * j)]);
        let moved = moment_map(&action, &form, &(&g * &z)).unwrap();
        let expect = &rot * nalgebra::Vector3::new(exact[0], exact[1], exact[2]);
        for i in 0..3 {
            assert_abs_diff_eq!(moved.coords()[i], expect[i], epsilon = 1e-10);
        }
    }
}

#[test]
fn symplectization_moment_is_the_graph_of_the_scaling() {
    // Psi(m, t - t_m) = e^t mu for m on the level ray with Phi(m) = e^(t_m) mu
    let w = vec![vec![1, 1, 1], vec![0, 1, -1]];
    let action = LinearAction::torus(&w).unwrap();
    let form = Poly1Form::standard_contact(3);
    let mu = DualElement::new(vec![2.0, 1.0]);
    // |z|^2 = (1/2, 7/8, 1/8) gives Phi = (3/2, 3/4) = (3/4) mu
    let m = DVector::from_vec(vec![0.5_f64.sqrt(), 0.0, 0.0, 0.875_f64.sqrt(), 0.125_f64.sqrt(), 0.0]);
    let phi = moment_map(&action, &form, &m).unwrap();
    let s = ray_parameter(&phi, &mu, 1e-12).unwrap();
    assert_abs_diff_eq!(s, 0.75, epsilon = 1e-14);
    let t_m = s.ln();
    for t in [-2.0, 0.0, 0.5, 3.0] {
        let psi = symplectization_moment(&action, &form, &m, t - t_m).unwrap();
        for i in 0..2 {
            assert_abs_diff_eq!(psi.coords()[i], t.exp() * mu.coords()[i], epsilon = 1e-10 * t.exp().max(1.0));
        }
    }
    // off the ray, no shift of t puts Psi on it
    let off = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    for t in [-1.0, 0.0, 2.0] {
        let psi = symplectization_moment(&action, &form, &off, t).unwrap();
        assert!(ray_parameter(&psi, &mu, 1e-9).is_none());
    }
}
