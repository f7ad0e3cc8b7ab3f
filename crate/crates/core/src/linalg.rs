//! Rank-revealing helpers. Matrices are nalgebra types; the SVD itself is
//! computed by faer.
//!
//! Every rank, nullspace and span in the crate goes through this module so
//! that one threshold applies everywhere: singular values at or below
//! `RANK_RTOL * max(sigma_max, scale)` count as zero. The optional `scale`
//! is a reference magnitude for the quantity being tested; it keeps a matrix
//! that is pure rounding noise (all entries ~1e-17) from being reported as
//! full rank.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

pub const RANK_RTOL: f64 = 1e-9;

/// Orthonormal column basis of a subspace of `R^ambient`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient: usize,
    basis: DMatrix<f64>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: DMatrix::zeros(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            ambient,
            basis: DMatrix::identity(ambient, ambient),
        }
    }

    /// Span of the columns of `m`, orthonormalized.
    pub fn span(m: &DMatrix<f64>, scale: f64) -> Self {
        Self {
            ambient: m.nrows(),
            basis: column_span(m, scale),
        }
    }

    /// Wraps a basis that is already orthonormal.
    pub fn from_orthonormal(basis: DMatrix<f64>) -> Self {
        Self {
            ambient: basis.nrows(),
            basis,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn into_basis(self) -> DMatrix<f64> {
        self.basis
    }

    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Norm of the component of `v` orthogonal to the subspace.
    pub fn residual(&self, v: &DVector<f64>) -> f64 {
        (v - &self.basis * (self.basis.transpose() * v)).norm()
    }

    /// Largest projection residual of another subspace's basis vectors.
    pub fn contains(&self, other: &Subspace, tol: f64) -> bool {
        other
            .basis
            .column_iter()
            .all(|c| self.residual(&c.into_owned()) < tol)
    }

    /// Image of the subspace under a linear map, re-orthonormalized.
    pub fn map(&self, m: &DMatrix<f64>) -> Subspace {
        Subspace::span(&(m * &self.basis), 0.0)
    }

    /// Columns as plain vectors (for serialization).
    pub fn columns(&self) -> Vec<Vec<f64>> {
        self.basis
            .column_iter()
            .map(|c| c.iter().copied().collect())
            .collect()
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        intersection(self, other)
    }
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.columns().serialize(s)
    }
}

fn threshold(sigma_max: f64, scale: f64) -> f64 {
    RANK_RTOL * sigma_max.max(scale)
}

struct Svd {
    /// Full `r x r` left factor.
    u: DMatrix<f64>,
    /// Descending, length `min(r, c)`.
    s: Vec<f64>,
    /// Full `c x c` right factor.
    v: DMatrix<f64>,
}

fn to_faer(m: &DMatrix<f64>) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn svd(m: &DMatrix<f64>) -> Svd {
    let f = to_faer(m);
    let d = f.svd().expect("svd of a finite matrix converges");
    let s = d.S().column_vector().iter().copied().collect();
    Svd {
        u: from_faer(d.U()),
        s,
        v: from_faer(d.V()),
    }
}

/// Singular values of `m`, descending.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = to_faer(m)
        .singular_values()
        .expect("svd of a finite matrix converges");
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn rank(m: &DMatrix<f64>, scale: f64) -> usize {
    rank_rtol(m, scale, RANK_RTOL)
}

/// Rank with singular values `<= rtol * max(sigma_max, scale)` counted as 0.
pub fn rank_rtol(m: &DMatrix<f64>, scale: f64, rtol: f64) -> usize {
    let s = singular_values(m);
    let Some(&smax) = s.first() else { return 0 };
    if smax <= f64::MIN_POSITIVE {
        return 0;
    }
    let thr = rtol * smax.max(scale);
    s.iter().filter(|&&x| x > thr).count()
}

fn numerical_rank(s: &[f64], scale: f64) -> usize {
    let smax = s.first().copied().unwrap_or(0.0);
    if smax <= f64::MIN_POSITIVE {
        return 0;
    }
    let thr = threshold(smax, scale);
    s.iter().filter(|&&x| x > thr).count()
}

/// Orthonormal basis of `{x : m x = 0}`.
pub fn nullspace(m: &DMatrix<f64>, scale: f64) -> DMatrix<f64> {
    let (r, c) = m.shape();
    if c == 0 {
        return DMatrix::zeros(0, 0);
    }
    if r == 0 {
        return DMatrix::identity(c, c);
    }
    let d = svd(m);
    let k = numerical_rank(&d.s, scale);
    d.v.columns(k, c - k).into_owned()
}

/// Splits the full left singular basis of `m` at an absolute singular-value
/// threshold: `(directions with sigma > threshold, the rest)`. The rest
/// includes the left null directions beyond `min(rows, cols)`.
pub fn left_singular_split(m: &DMatrix<f64>, threshold: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let r = m.nrows();
    if r == 0 || m.ncols() == 0 {
        return (DMatrix::zeros(r, 0), DMatrix::identity(r, r));
    }
    let d = svd(m);
    let k = d.s.iter().filter(|&&x| x > threshold).count();
    (d.u.columns(0, k).into_owned(), d.u.columns(k, r - k).into_owned())
}

/// Orthonormal basis of the column span of `m`.
pub fn column_span(m: &DMatrix<f64>, scale: f64) -> DMatrix<f64> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return DMatrix::zeros(r, 0);
    }
    let d = svd(m);
    let k = numerical_rank(&d.s, scale);
    d.u.columns(0, k).into_owned()
}

/// Stacks matrices with the same column count vertically.
pub fn vstack(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let ncols = blocks.first().map_or(0, |b| b.ncols());
    let nrows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(nrows, ncols);
    let mut row = 0;
    for b in blocks {
        assert_eq!(b.ncols(), ncols, "vstack column mismatch");
        out.view_mut((row, 0), (b.nrows(), ncols)).copy_from(*b);
        row += b.nrows();
    }
    out
}

/// Concatenates matrices with the same row count horizontally.
pub fn hstack(blocks: &[&DMatrix<f64>]) -> DMatrix<f64> {
    let nrows = blocks.first().map_or(0, |b| b.nrows());
    let ncols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(nrows, ncols);
    let mut col = 0;
    for b in blocks {
        assert_eq!(b.nrows(), nrows, "hstack row mismatch");
        out.view_mut((0, col), (nrows, b.ncols())).copy_from(*b);
        col += b.ncols();
    }
    out
}

pub fn row_vector(v: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(1, v.len(), v.as_slice())
}

/// Intersection of two subspaces as the common nullspace of the two
/// complementary projectors.
pub fn intersection(a: &Subspace, b: &Subspace) -> Subspace {
    assert_eq!(a.ambient, b.ambient);
    let n = a.ambient;
    let id = DMatrix::<f64>::identity(n, n);
    let pa = &id - a.projector();
    let pb = &id - b.projector();
    Subspace::from_orthonormal(nullspace(&vstack(&[&pa, &pb]), 1.0))
}

/// Largest principal angle between two subspaces. Returns pi/2 when the
/// dimensions differ and 0 when both are trivial.
pub fn max_principal_angle(a: &Subspace, b: &Subspace) -> f64 {
    if a.dim() != b.dim() {
        return std::f64::consts::FRAC_PI_2;
    }
    if a.dim() == 0 {
        return 0.0;
    }
    let resid = a.basis() - b.projector() * a.basis();
    let s = singular_values(&resid);
    s.first().copied().unwrap_or(0.0).clamp(0.0, 1.0).asin()
}

/// Spectral norm.
pub fn norm2(m: &DMatrix<f64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Least-squares solve `m x = b` by the truncated pseudo-inverse
/// (minimum-norm solution).
pub fn lstsq(m: &DMatrix<f64>, b: &DVector<f64>, scale: f64) -> DVector<f64> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return DVector::zeros(c);
    }
    let d = svd(m);
    let k = numerical_rank(&d.s, scale);
    let mut x = DVector::zeros(c);
    for i in 0..k {
        let coef = d.u.column(i).dot(b) / d.s[i];
        x += d.v.column(i) * coef;
    }
    x
}
