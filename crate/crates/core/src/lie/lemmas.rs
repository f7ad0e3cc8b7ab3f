//! Randomized property suites for the two bilinear-form lemmas behind the
//! reduced-kernel computation, checked against exact rational nullspaces.
//!
//! * kernel splitting: if `V = X + W` with `omega(X, W) = 0` and `omega|W`
//!   nondegenerate, then `ker omega = ker omega|X`.
//! * isotropic kernel: for isotropic `W` in a symplectic space,
//!   `ker omega|W^omega = W`.

use nalgebra::DMatrix;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::bilinear::{bilinear_kernel, restricted_kernel, symplectic_perp};
use crate::exact::{QMat, Q};
use crate::linalg::Subspace;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub instances: usize,
    /// Instances where the exact lemma or a computed dimension failed.
    pub failures: usize,
    /// Largest projection residual between computed and exact subspaces.
    pub max_residual: f64,
}

impl SuiteReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.failures == 0 && self.max_residual <= tol
    }
}

fn rng_for(seed: u64, instance: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(instance as u64);
    rng
}

fn random_int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> QMat {
    let v: Vec<i64> = (0..rows * cols).map(|_| rng.random_range(-bound..=bound)).collect();
    QMat::from_ints(rows, cols, &v)
}

fn random_antisymmetric(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> QMat {
    let mut m = QMat::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = Q::from_integer(i128::from(rng.random_range(-bound..=bound)));
            m[(i, j)] = v;
            m[(j, i)] = -v;
        }
    }
    m
}

fn nondegenerate_antisymmetric(rng: &mut ChaCha8Rng, n: usize) -> QMat {
    loop {
        let m = random_antisymmetric(rng, n, 3);
        if m.rank() == n {
            return m;
        }
    }
}

fn invertible(rng: &mut ChaCha8Rng, n: usize) -> QMat {
    loop {
        let m = random_int_matrix(rng, n, n, 2);
        if m.rank() == n {
            return m;
        }
    }
}

fn inverse(m: &QMat) -> QMat {
    let n = m.rows;
    let mut out = QMat::zeros(n, n);
    for j in 0..n {
        let e: Vec<Q> = (0..n).map(|i| if i == j { Q::from_integer(1) } else { Q::zero() }).collect();
        let x = m.solve(&e).expect("invertible");
        for i in 0..n {
            out[(i, j)] = x[i];
        }
    }
    out
}

fn same_span(a: &QMat, b: &QMat) -> bool {
    let ra = a.rank();
    if ra != b.rank() {
        return false;
    }
    let mut joined = QMat::zeros(a.rows, a.cols + b.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            joined[(i, j)] = a[(i, j)];
        }
        for j in 0..b.cols {
            joined[(i, a.cols + j)] = b[(i, j)];
        }
    }
    joined.rank() == ra
}

/// Two-sided projection residual between a computed subspace and an exact
/// basis; infinite when the dimensions differ.
fn gap(computed: &Subspace, exact: &QMat) -> f64 {
    let e = Subspace::span(&exact.to_f64(), 0.0);
    if e.dim() != computed.dim() {
        return f64::INFINITY;
    }
    let one = e.basis().column_iter().map(|c| computed.residual(&c.into_owned()));
    let two = computed.basis().column_iter().map(|c| e.residual(&c.into_owned()));
    one.chain(two).fold(0.0, f64::max)
}

fn antisym_f64(m: &QMat) -> DMatrix<f64> {
    let f = m.to_f64();
    (&f - f.transpose()) * 0.5
}

/// One kernel-splitting instance on `R^6`: returns `(exact lemma holds,
/// residual)`.
fn kernel_splitting_instance(rng: &mut ChaCha8Rng) -> (bool, f64) {
    let n = 6;
    let a = 2 * rng.random_range(0..=3usize);
    let mut block = QMat::zeros(n, n);
    let wedges = rng.random_range(0..=a / 2);
    for _ in 0..wedges {
        let u = random_int_matrix(rng, a, 1, 3);
        let v = random_int_matrix(rng, a, 1, 3);
        for i in 0..a {
            for j in 0..a {
                block[(i, j)] += u.data[i] * v.data[j] - v.data[i] * u.data[j];
            }
        }
    }
    let ww = nondegenerate_antisymmetric(rng, n - a);
    for i in 0..(n - a) {
        for j in 0..(n - a) {
            block[(a + i, a + j)] = ww[(i, j)];
        }
    }
    let p = invertible(rng, n);
    let pinv = inverse(&p);
    let omega = pinv.transpose().mul(&block).mul(&pinv);
    let x = p.columns(&(0..a).collect::<Vec<_>>());

    let k_full = omega.nullspace();
    let k_x = x.mul(&x.transpose().mul(&omega).mul(&x).nullspace());
    let lemma = same_span(&k_full, &k_x);

    let wf = antisym_f64(&omega);
    let xs = Subspace::span(&x.to_f64(), 0.0);
    let residual = match (bilinear_kernel(&wf), restricted_kernel(&wf, &xs)) {
        (Ok(kf), Ok(kx)) => gap(&kf, &k_full).max(gap(&kx, &k_x)),
        _ => f64::INFINITY,
    };
    (lemma, residual)
}

/// One isotropic-kernel instance on `R^{2m}`, `m` in `1..=3`.
fn isotropic_kernel_instance(rng: &mut ChaCha8Rng) -> (bool, f64) {
    let m = rng.random_range(1..=3usize);
    let n = 2 * m;
    let omega = nondegenerate_antisymmetric(rng, n);
    let d = rng.random_range(0..=m);
    let mut w = QMat::zeros(n, 0);
    while w.cols < d {
        let cand_space = w.transpose().mul(&omega).nullspace();
        let coeffs = random_int_matrix(rng, cand_space.cols, 1, 3);
        let v = cand_space.mul(&coeffs);
        let mut next = QMat::zeros(n, w.cols + 1);
        for i in 0..n {
            for j in 0..w.cols {
                next[(i, j)] = w[(i, j)];
            }
            next[(i, w.cols)] = v.data[i];
        }
        if next.rank() == next.cols {
            w = next;
        }
    }
    let perp = w.transpose().mul(&omega.transpose()).nullspace();
    let ker = perp.mul(&perp.transpose().mul(&omega).mul(&perp).nullspace());
    let lemma = if d == 0 { ker.rank() == 0 } else { same_span(&ker, &w) };

    let wf = antisym_f64(&omega);
    let ws = Subspace::span(&w.to_f64(), 0.0);
    let residual = match symplectic_perp(&wf, &ws) {
        Ok(pf) => match restricted_kernel(&wf, &pf) {
            Ok(kf) => gap(&pf, &perp).max(gap(&kf, &ker)),
            Err(_) => f64::INFINITY,
        },
        Err(_) => f64::INFINITY,
    };
    (lemma, residual)
}

fn run_suite(instances: usize, seed: u64, f: fn(&mut ChaCha8Rng) -> (bool, f64)) -> SuiteReport {
    let mut failures = 0;
    let mut max_residual = 0.0_f64;
    for i in 0..instances {
        let (lemma, r) = f(&mut rng_for(seed, i));
        if !lemma || !r.is_finite() {
            failures += 1;
        }
        max_residual = max_residual.max(r);
    }
    SuiteReport {
        instances,
        failures,
        max_residual,
    }
}

pub fn kernel_splitting_suite(instances: usize, seed: u64) -> SuiteReport {
    run_suite(instances, seed, kernel_splitting_instance)
}

pub fn isotropic_kernel_suite(instances: usize, seed: u64) -> SuiteReport {
    run_suite(instances, seed, isotropic_kernel_instance)
}
