//! Test-side oracles: exact rational Gauss-Jordan elimination, closed-form torus moment
//! maps and projector distances, all independent of the library's SVD path.
#![allow(dead_code, clippy::needless_range_loop)]

use nalgebra::{DMatrix, DVector};
use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type R = Ratio<i128>;

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn ri(v: i64) -> R {
    R::from_integer(i128::from(v))
}

/// Dense rational matrix as rows.
pub type RMat = Vec<Vec<R>>;

pub fn rmat(rows: usize, cols: usize) -> RMat {
    vec![vec![R::zero(); cols]; rows]
}

pub fn rand_int(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> RMat {
    (0..rows)
        .map(|_| (0..cols).map(|_| ri(rng.random_range(-bound..=bound))).collect())
        .collect()
}

pub fn rmul(a: &[Vec<R>], b: &[Vec<R>]) -> RMat {
    let (n, k) = (a.len(), b.len());
    let m = b.first().map_or(0, Vec::len);
    let mut out = rmat(n, m);
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += a[i][l] * b[l][j];
            }
        }
    }
    out
}

pub fn rtranspose(a: &[Vec<R>], cols: usize) -> RMat {
    let mut t = rmat(cols, a.len());
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            t[j][i] = *v;
        }
    }
    t
}

/// Gauss-Jordan nullspace: returns basis vectors of `{x : a x = 0}`.
pub fn rnullspace(a: &RMat, cols: usize) -> Vec<Vec<R>> {
    let mut m = a.clone();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = R::one() / m[row][col];
        for v in m[row].iter_mut() {
            *v *= inv;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col];
                let pr = m[row].clone();
                for (x, y) in m[i].iter_mut().zip(pr) {
                    *x -= f * y;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    (0..cols)
        .filter(|c| !pivot_cols.contains(c))
        .map(|free| {
            let mut v = vec![R::zero(); cols];
            v[free] = R::one();
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -m[r][free];
            }
            v
        })
        .collect()
}

/// Exact rank, by rank-nullity.
pub fn rrank(a: &RMat, cols: usize) -> usize {
    cols - rnullspace(a, cols).len()
}

pub fn to_f64(r: &R) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Columns given as vectors -> f64 matrix.
pub fn cols_to_f64(vs: &[Vec<R>], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, vs.len(), |i, j| to_f64(&vs[j][i]))
}

/// Orthogonal projector onto the column span of a full-column-rank `a`,
/// through a Householder QR (no SVD).
pub fn projector(a: &DMatrix<f64>) -> DMatrix<f64> {
    if a.ncols() == 0 {
        return DMatrix::zeros(a.nrows(), a.nrows());
    }
    let q = a.clone().qr().q();
    &q * q.transpose()
}

/// Spectral-ish distance between two spans (max abs entry of the projector
/// difference); `inf` when dimensions differ.
pub fn span_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() != b.ncols() {
        return f64::INFINITY;
    }
    (projector(a) - projector(b)).amax()
}

/// `Phi_i(z) = sum_j w_ij |z_j|^2` for the standard form and a torus with
/// weight rows `w` (interleaved real coordinates).
pub fn torus_moment(w: &[Vec<i64>], x: &[f64]) -> Vec<f64> {
    w.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, &wj)| wj as f64 * (x[2 * j] * x[2 * j] + x[2 * j + 1] * x[2 * j + 1]))
                .sum()
        })
        .collect()
}

/// Infinitesimal generator of the weight row `w` at `x`: each block
/// `(x_j, y_j)` maps to `w_j (-y_j, x_j)`.
pub fn torus_generator(w: &[i64], x: &[f64]) -> DVector<f64> {
    let mut v = DVector::zeros(x.len());
    for (j, &wj) in w.iter().enumerate() {
        v[2 * j] = -(wj as f64) * x[2 * j + 1];
        v[2 * j + 1] = wj as f64 * x[2 * j];
    }
    v
}

/// `d alpha(u, v) = 2 sum_j (u_xj v_yj - u_yj v_xj)` for the standard form.
pub fn std_d_alpha(u: &[f64], v: &[f64]) -> f64 {
    (0..u.len() / 2)
        .map(|j| 2.0 * (u[2 * j] * v[2 * j + 1] - u[2 * j + 1] * v[2 * j]))
        .sum()
}

/// Quadric value `sum_j a_j |z_j|^2`.
pub fn quadric(a: &[f64], x: &[f64]) -> f64 {
    a.iter()
        .enumerate()
        .map(|(j, aj)| aj * (x[2 * j] * x[2 * j] + x[2 * j + 1] * x[2 * j + 1]))
        .sum()
}

/// `det(G) / scale^(2k)` for the Gram matrix `G` of `k` vectors: near 0
/// for dependent vectors and for vectors that are tiny against `scale`.
pub fn scaled_gram_det(cols: &[DVector<f64>], scale: f64) -> f64 {
    let k = cols.len();
    let g = DMatrix::from_fn(k, k, |i, j| cols[i].dot(&cols[j]) / (scale * scale));
    g.determinant()
}

/// Orthonormal basis of `{v : rows v = 0}` for a full-row-rank `rows`,
/// from the eigenvectors of the projector onto it.
pub fn kernel_basis(rows: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let n = rows.ncols();
    let gram = rows * rows.transpose();
    let inv = gram.cholesky().expect("full row rank").inverse();
    let p = DMatrix::identity(n, n) - rows.transpose() * inv * rows;
    let eig = p.symmetric_eigen();
    (0..n)
        .filter(|&i| eig.eigenvalues[i] > 0.5)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect()
}
