//! Polynomial 1-forms and 2-forms on ambient `R^n`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::poly::{qi, PolyMap, QMatrix, Rational};
use crate::error::{Error, Result};

/// `sum_j a_j(x) dx_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly1Form {
    ambient_dim: usize,
    coefficients: Vec<PolyMap>,
}

impl Poly1Form {
    pub fn new(coefficients: Vec<PolyMap>) -> Result<Self> {
        let n = coefficients.len();
        if let Some(bad) = coefficients.iter().find(|c| c.ambient_dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.ambient_dim(),
            });
        }
        Ok(Self {
            ambient_dim: n,
            coefficients,
        })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            ambient_dim: n,
            coefficients: vec![PolyMap::zero(n); n],
        }
    }

    /// `sum_j (x_j dy_j - y_j dx_j)` on `C^n = R^{2n}` with interleaved
    /// coordinates `(x_1, y_1, ..., x_n, y_n)`.
    pub fn standard_contact(complex_dim: usize) -> Self {
        let n = 2 * complex_dim;
        let mut coefficients = vec![PolyMap::zero(n); n];
        for j in 0..complex_dim {
            let (xi, yi) = (2 * j, 2 * j + 1);
            coefficients[xi] = PolyMap::var(n, yi).scale(qi(-1));
            coefficients[yi] = PolyMap::var(n, xi);
        }
        Self {
            ambient_dim: n,
            coefficients,
        }
    }

    /// `dz + x dy` on `R^3` with coordinates `(x, y, z)`.
    pub fn darboux_r3() -> Self {
        let n = 3;
        Self {
            ambient_dim: n,
            coefficients: vec![
                PolyMap::zero(n),
                PolyMap::var(n, 0),
                PolyMap::constant(n, qi(1)),
            ],
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn coefficients(&self) -> &[PolyMap] {
        &self.coefficients
    }

    /// Coefficient vector `(a_1(x), ..., a_n(x))`.
    pub fn at(&self, point: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.ambient_dim,
            self.coefficients.iter().map(|c| c.eval(point)),
        )
    }

    pub fn eval(&self, point: &[f64], vector: &[f64]) -> Result<f64> {
        eval_1form(self, point, vector)
    }

    /// Pointwise product `f * alpha`.
    pub fn scaled_by(&self, f: &PolyMap) -> Self {
        Self {
            ambient_dim: self.ambient_dim,
            coefficients: self.coefficients.iter().map(|c| f * c).collect(),
        }
    }

    pub fn scale(&self, c: Rational) -> Self {
        Self {
            ambient_dim: self.ambient_dim,
            coefficients: self.coefficients.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            ambient_dim: self.ambient_dim,
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(PolyMap::is_zero)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coefficients
            .iter()
            .map(PolyMap::max_abs_coeff)
            .fold(0.0, f64::max)
    }

    /// The polynomial `alpha(X)` for a polynomial vector field `X`.
    pub fn contract(&self, field: &[PolyMap]) -> PolyMap {
        self.coefficients
            .iter()
            .zip(field)
            .fold(PolyMap::zero(self.ambient_dim), |acc, (a, x)| &acc + &(a * x))
    }

    /// Lie derivative along `x -> M x`, exact:
    /// `(L_X alpha)_j = X(a_j) + sum_i a_i M_ij`.
    pub fn lie_derivative_linear(&self, m: &QMatrix) -> Self {
        let n = self.ambient_dim;
        let coefficients = (0..n)
            .map(|j| {
                let transport = self.coefficients[j].lie_derivative_linear(m);
                let stretch = (0..n).fold(PolyMap::zero(n), |acc, i| {
                    &acc + &self.coefficients[i].scale(m.get(i, j))
                });
                &transport + &stretch
            })
            .collect();
        Self {
            ambient_dim: n,
            coefficients,
        }
    }
}

/// `alpha_x(v) = sum_j a_j(x) v_j`.
pub fn eval_1form(form: &Poly1Form, point: &[f64], vector: &[f64]) -> Result<f64> {
    let n = form.ambient_dim;
    for len in [point.len(), vector.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: len,
            });
        }
    }
    Ok(form
        .coefficients
        .iter()
        .zip(vector)
        .filter(|(_, v)| **v != 0.0)
        .map(|(c, v)| c.eval(point) * v)
        .sum())
}

/// `sum_{i<j} c_ij dx_i ^ dx_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly2Form {
    ambient_dim: usize,
    coefficients: BTreeMap<(usize, usize), PolyMap>,
}

impl Poly2Form {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Coefficient of `dx_i ^ dx_j` (antisymmetric in `i, j`).
    pub fn coefficient(&self, i: usize, j: usize) -> PolyMap {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => PolyMap::zero(self.ambient_dim),
            Less => self
                .coefficients
                .get(&(i, j))
                .cloned()
                .unwrap_or_else(|| PolyMap::zero(self.ambient_dim)),
            Greater => -&self.coefficient(j, i),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.values().all(PolyMap::is_zero)
    }

    /// Antisymmetric matrix `W` with `omega(u, v) = u^T W v`.
    pub fn matrix_at(&self, point: &[f64]) -> DMatrix<f64> {
        let n = self.ambient_dim;
        let mut m = DMatrix::zeros(n, n);
        for (&(i, j), c) in &self.coefficients {
            let v = c.eval(point);
            m[(i, j)] = v;
            m[(j, i)] = -v;
        }
        m
    }

    pub fn eval(&self, point: &[f64], u: &[f64], v: &[f64]) -> f64 {
        self.coefficients
            .iter()
            .map(|(&(i, j), c)| c.eval(point) * (u[i] * v[j] - u[j] * v[i]))
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coefficients = self.coefficients.clone();
        for (k, c) in &other.coefficients {
            let sum = coefficients
                .get(k)
                .map_or_else(|| c.clone(), |existing| existing + c);
            if sum.is_zero() {
                coefficients.remove(k);
            } else {
                coefficients.insert(*k, sum);
            }
        }
        Self {
            ambient_dim: self.ambient_dim,
            coefficients,
        }
    }

    pub fn scale(&self, c: Rational) -> Self {
        Self {
            ambient_dim: self.ambient_dim,
            coefficients: self
                .coefficients
                .iter()
                .map(|(k, p)| (*k, p.scale(c)))
                .filter(|(_, p)| !p.is_zero())
                .collect(),
        }
    }
}

/// `d alpha`, with the `dx_i ^ dx_j` coefficient `d_i a_j - d_j a_i`.
pub fn exterior_derivative(form: &Poly1Form) -> Poly2Form {
    let n = form.ambient_dim;
    let mut coefficients = BTreeMap::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let c = &form.coefficients[j].partial(i) - &form.coefficients[i].partial(j);
            if !c.is_zero() {
                coefficients.insert((i, j), c);
            }
        }
    }
    Poly2Form {
        ambient_dim: n,
        coefficients,
    }
}
