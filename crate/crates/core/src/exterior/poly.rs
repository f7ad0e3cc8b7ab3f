//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::Ratio<i64>;

/// Exponent vector of a monomial.
pub type Exponents = Vec<u32>;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn qi(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub fn q_to_f64(c: &Rational) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"p/q"`, an integer, or a terminating decimal into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in `{s}`")))?;
        let d: i64 = d.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in `{s}`")))?;
        if d == 0 {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let digits = frac.len() as u32;
        if digits > 15 {
            return Err(Error::Parse(format!("too many decimal digits in `{s}`")));
        }
        let scale = 10_i64.pow(digits);
        let i: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| Error::Parse(format!("bad number `{s}`")))?
        };
        let f: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| Error::Parse(format!("bad number `{s}`")))?
        };
        let mag = i.abs() * scale + f;
        return Ok(Rational::new(if neg { -mag } else { mag }, scale));
    }
    s.parse::<i64>()
        .map(Rational::from_integer)
        .map_err(|_| Error::Parse(format!("bad rational `{s}`")))
}

/// Polynomial function on `R^n`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMap {
    ambient_dim: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl PolyMap {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ambient_dim: usize, c: Rational) -> Self {
        Self::monomial(ambient_dim, vec![0; ambient_dim], c)
    }

    /// The coordinate function `x_i`.
    pub fn var(ambient_dim: usize, i: usize) -> Self {
        let mut e = vec![0; ambient_dim];
        e[i] = 1;
        Self::monomial(ambient_dim, e, Rational::one())
    }

    pub fn monomial(ambient_dim: usize, exps: Exponents, c: Rational) -> Self {
        assert_eq!(exps.len(), ambient_dim, "exponent vector length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Self { ambient_dim, terms }
    }

    pub fn from_terms<I>(ambient_dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, Rational)>,
    {
        let mut p = Self::zero(ambient_dim);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, exps: Exponents, c: Rational) {
        assert_eq!(exps.len(), self.ambient_dim, "exponent vector length");
        if c.is_zero() {
            return;
        }
        let v = self.terms.get(&exps).copied().unwrap_or_else(Rational::zero) + c;
        if v.is_zero() {
            self.terms.remove(&exps);
        } else {
            self.terms.insert(exps, v);
        }
    }

    /// Sum of `c_j x_j` for a coefficient row.
    pub fn linear(coeffs: &[Rational]) -> Self {
        let n = coeffs.len();
        Self::from_terms(
            n,
            coeffs.iter().enumerate().map(|(i, c)| {
                let mut e = vec![0; n];
                e[i] = 1;
                (e, *c)
            }),
        )
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// Largest absolute coefficient, as a float.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| q_to_f64(&c.abs()))
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.ambient_dim);
        }
        Self {
            ambient_dim: self.ambient_dim,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), *v * c)).collect(),
        }
    }

    /// Exact partial derivative with respect to `x_i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.ambient_dim);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            out.add_term(d, *c * qi(e[i] as i64));
        }
        out
    }

    pub fn gradient(&self) -> Vec<PolyMap> {
        (0..self.ambient_dim).map(|i| self.partial(i)).collect()
    }

    pub fn hessian(&self) -> Vec<Vec<PolyMap>> {
        self.gradient().iter().map(|g| g.gradient()).collect()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.ambient_dim);
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .filter(|(k, _)| **k > 0)
                    .fold(q_to_f64(c), |acc, (k, xi)| acc * xi.powi(*k as i32))
            })
            .sum()
    }

    pub fn eval_vec(&self, x: &DVector<f64>) -> f64 {
        self.eval(x.as_slice())
    }

    /// Directional derivative along the linear vector field `x -> M x`,
    /// computed exactly: `sum_i (M x)_i d_i f`.
    pub fn lie_derivative_linear(&self, m: &QMatrix) -> Self {
        let field = m.as_linear_field();
        let mut out = Self::zero(self.ambient_dim);
        for (i, fi) in field.iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            out = &out + &(fi * &self.partial(i));
        }
        out
    }
}

impl fmt::Debug for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

impl Add for &PolyMap {
    type Output = PolyMap;
    fn add(self, rhs: &PolyMap) -> PolyMap {
        assert_eq!(self.ambient_dim, rhs.ambient_dim);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }
}

impl Sub for &PolyMap {
    type Output = PolyMap;
    fn sub(self, rhs: &PolyMap) -> PolyMap {
        self + &(-rhs)
    }
}

impl Neg for &PolyMap {
    type Output = PolyMap;
    fn neg(self) -> PolyMap {
        self.scale(-Rational::one())
    }
}

impl Mul for &PolyMap {
    type Output = PolyMap;
    fn mul(self, rhs: &PolyMap) -> PolyMap {
        assert_eq!(self.ambient_dim, rhs.ambient_dim);
        let mut out = PolyMap::zero(self.ambient_dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, *ca * *cb);
            }
        }
        out
    }
}

/// Square matrix with exact rational entries (generators, changes of basis).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![Rational::zero(); n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "QMatrix must be square");
            for (j, v) in r.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        m
    }

    pub fn from_integers(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| qi(v)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.n + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.n, rhs.n);
        let mut out = QMatrix::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..self.n {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add_scaled(&self, rhs: &QMatrix, c: Rational) -> QMatrix {
        let mut out = self.clone();
        for (o, r) in out.entries.iter_mut().zip(&rhs.entries) {
            *o += *r * c;
        }
        out
    }

    pub fn commutator(&self, rhs: &QMatrix) -> QMatrix {
        self.mul(rhs).add_scaled(&rhs.mul(self), -Rational::one())
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .map(|c| q_to_f64(&c.abs()))
            .fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| q_to_f64(&self.get(i, j)))
    }

    /// Components of the vector field `x -> M x` as linear polynomials.
    pub fn as_linear_field(&self) -> Vec<PolyMap> {
        (0..self.n)
            .map(|i| {
                let row: Vec<Rational> = (0..self.n).map(|j| self.get(i, j)).collect();
                PolyMap::linear(&row)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_eval(p: &PolyMap, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for (e, c) in p.terms() {
            let mut m = q_to_f64(c);
            for (i, k) in e.iter().enumerate() {
                for _ in 0..*k {
                    m *= x[i];
                }
            }
            s += m;
        }
        s
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let x = PolyMap::var(2, 0);
        let p = &x - &x;
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
    }

    #[test]
    fn derivative_of_square() {
        let x = PolyMap::var(2, 0);
        let p = &x * &x;
        assert_eq!(p.partial(0), x.scale(qi(2)));
        assert!(p.partial(1).is_zero());
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("1/3").unwrap(), q(1, 3));
        assert_eq!(parse_rational("-2").unwrap(), qi(-2));
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), q(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn lie_derivative_of_radius_along_rotation_vanishes() {
        let x = PolyMap::var(2, 0);
        let y = PolyMap::var(2, 1);
        let r2 = &(&x * &x) + &(&y * &y);
        let rot = QMatrix::from_integers(&[&[0, -1], &[1, 0]]);
        assert!(r2.lie_derivative_linear(&rot).is_zero());
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = PolyMap> {
        prop::collection::vec(
            (prop::collection::vec(0u32..3, n), -5i64..=5, 1i64..=4),
            0..6,
        )
        .prop_map(move |ts| PolyMap::from_terms(n, ts.into_iter().map(|(e, a, b)| (e, q(a, b)))))
    }

    proptest! {
        #[test]
        fn eval_matches_naive(p in arb_poly(3), x in prop::collection::vec(-2.0f64..2.0, 3)) {
            let a = p.eval(&x);
            let b = naive_eval(&p, &x);
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }

        #[test]
        fn product_rule(a in arb_poly(2), b in arb_poly(2)) {
            let lhs = (&a * &b).partial(0);
            let rhs = &(&a.partial(0) * &b) + &(&a * &b.partial(0));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
