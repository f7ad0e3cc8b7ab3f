//! Exact rational linear algebra for small matrices (oracle computations).

use nalgebra::DMatrix;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = Ratio<i128>;

/// Row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Q>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn from_ints(rows: usize, cols: usize, v: &[i64]) -> Self {
        assert_eq!(v.len(), rows * cols);
        Self {
            rows,
            cols,
            data: v.iter().map(|&x| Q::from_integer(i128::from(x))).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, rhs: &QMat) -> QMat {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn columns(&self, idx: &[usize]) -> QMat {
        let mut out = Self::zeros(self.rows, idx.len());
        for (c, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                out[(i, c)] = self[(i, j)];
            }
        }
        out
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| to_f64(&self[(i, j)]))
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (QMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            for j in 0..m.cols {
                let tmp = m[(r, j)];
                m[(r, j)] = m[(p, j)];
                m[(p, j)] = tmp;
            }
            let inv = m[(r, c)].recip();
            for j in 0..m.cols {
                m[(r, j)] *= inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)];
                    for j in 0..m.cols {
                        let v = m[(r, j)];
                        m[(i, j)] -= f * v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right nullspace, as columns.
    pub fn nullspace(&self) -> QMat {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Self::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            out[(f, k)] = Q::one();
            for (row, &p) in pivots.iter().enumerate() {
                out[(p, k)] = -r[(row, f)];
            }
        }
        out
    }

    /// Unique solution of a square system, `None` when singular.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(n, n + 1);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, n)] = b[i];
        }
        let (r, pivots) = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some((0..n).map(|i| r[(i, n)]).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

pub fn to_f64(q: &Q) -> f64 {
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}

/// Whether the column span of `n` contains a vector with all entries
/// strictly positive. Solves `max t` over `n c >= t 1`, `|c_i| <= 1`,
/// `t <= 1` by enumerating vertices of the feasible polytope.
pub fn span_meets_open_orthant(n: &QMat) -> bool {
    let m = n.rows;
    let d = n.cols;
    if m == 0 {
        return true;
    }
    if d == 0 {
        return false;
    }
    // Inequalities a^T (c, t) <= b.
    let mut ineq: Vec<(Vec<Q>, Q)> = Vec::new();
    for i in 0..m {
        let mut a: Vec<Q> = (0..d).map(|j| -n[(i, j)]).collect();
        a.push(Q::one());
        ineq.push((a, Q::zero()));
    }
    for j in 0..=d {
        let mut a = vec![Q::zero(); d + 1];
        a[j] = Q::one();
        ineq.push((a.clone(), Q::one()));
        if j < d {
            a[j] = -Q::one();
            ineq.push((a, Q::one()));
        }
    }
    let dim = d + 1;
    let mut best: Option<Q> = None;
    let mut subset: Vec<usize> = (0..dim).collect();
    loop {
        let mut a = QMat::zeros(dim, dim);
        let mut b = Vec::with_capacity(dim);
        for (r, &s) in subset.iter().enumerate() {
            for c in 0..dim {
                a[(r, c)] = ineq[s].0[c];
            }
            b.push(ineq[s].1);
        }
        if let Some(x) = a.solve(&b) {
            let feasible = ineq
                .iter()
                .all(|(row, rhs)| row.iter().zip(&x).fold(Q::zero(), |acc, (p, q)| acc + p * q) <= *rhs);
            if feasible && best.map_or(true, |t| x[d] > t) {
                best = Some(x[d]);
            }
        }
        if !next_combination(&mut subset, ineq.len()) {
            break;
        }
    }
    best.is_some_and(|t| t.is_positive())
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in (i + 1)..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
