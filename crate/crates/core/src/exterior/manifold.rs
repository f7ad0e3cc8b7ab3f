use nalgebra::{DMatrix, DVector};

use super::poly::{qi, PolyMap, Rational};
use crate::error::{Error, Result};
use crate::linalg;
use crate::newton::{self, NewtonOptions, NewtonOutcome};

/// Points farther than this from the constraint locus are rejected.
pub const ON_MANIFOLD_TOL: f64 = 1e-8;

/// Zero locus of polynomial constraints in `R^n`, of known dimension.
#[derive(Debug, Clone)]
pub struct EmbeddedManifold {
    ambient_dim: usize,
    constraints: Vec<PolyMap>,
    gradients: Vec<Vec<PolyMap>>,
    expected_dim: usize,
}

/// Orthonormal basis of `T_x M` at a point.
#[derive(Debug, Clone)]
pub struct TangentFrame {
    pub point: DVector<f64>,
    pub basis: DMatrix<f64>,
}

impl TangentFrame {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

impl EmbeddedManifold {
    pub fn new(ambient_dim: usize, constraints: Vec<PolyMap>, expected_dim: usize) -> Result<Self> {
        if let Some(c) = constraints.iter().find(|c| c.ambient_dim() != ambient_dim) {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                found: c.ambient_dim(),
            });
        }
        if expected_dim > ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                found: expected_dim,
            });
        }
        let gradients = constraints.iter().map(PolyMap::gradient).collect();
        Ok(Self {
            ambient_dim,
            constraints,
            gradients,
            expected_dim,
        })
    }

    pub fn euclidean(n: usize) -> Self {
        Self {
            ambient_dim: n,
            constraints: Vec::new(),
            gradients: Vec::new(),
            expected_dim: n,
        }
    }

    /// Hypersurface `sum_j a_j |z_j|^2 = 1` in `C^n` (interleaved real coords).
    pub fn complex_quadric(weights: &[Rational]) -> Self {
        let n = 2 * weights.len();
        let mut h = PolyMap::constant(n, qi(-1));
        for (j, a) in weights.iter().enumerate() {
            for i in [2 * j, 2 * j + 1] {
                let mut e = vec![0; n];
                e[i] = 2;
                h = &h + &PolyMap::monomial(n, e, *a);
            }
        }
        Self::new(n, vec![h], n - 1).expect("quadric dimensions are consistent")
    }

    pub fn unit_sphere(real_dim: usize) -> Self {
        let n = real_dim;
        let mut h = PolyMap::constant(n, qi(-1));
        for i in 0..n {
            h = &h + &(&PolyMap::var(n, i) * &PolyMap::var(n, i));
        }
        Self::new(n, vec![h], n - 1).expect("sphere dimensions are consistent")
    }

    /// Adds `x_i = 0` for each listed coordinate.
    pub fn with_vanishing_coordinates(&self, coords: &[usize]) -> Self {
        let mut constraints = self.constraints.clone();
        constraints.extend(coords.iter().map(|&i| PolyMap::var(self.ambient_dim, i)));
        let expected_dim = self.expected_dim.saturating_sub(coords.len());
        Self::new(self.ambient_dim, constraints, expected_dim).expect("same ambient dimension")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn expected_dim(&self) -> usize {
        self.expected_dim
    }

    pub fn constraints(&self) -> &[PolyMap] {
        &self.constraints
    }

    pub fn constraint_values(&self, point: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.constraints.len(),
            self.constraints.iter().map(|c| c.eval(point)),
        )
    }

    pub fn residual(&self, point: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.eval(point).abs())
            .fold(0.0, f64::max)
    }

    pub fn on_manifold(&self, point: &[f64]) -> bool {
        point.len() == self.ambient_dim && self.residual(point) <= ON_MANIFOLD_TOL
    }

    pub fn jacobian(&self, point: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.constraints.len(), self.ambient_dim, |r, c| {
            self.gradients[r][c].eval(point)
        })
    }

    /// Hessian of constraint `k` at a point.
    pub fn constraint_hessian(&self, k: usize, point: &[f64]) -> DMatrix<f64> {
        let g = &self.gradients[k];
        DMatrix::from_fn(self.ambient_dim, self.ambient_dim, |i, j| {
            g[i].partial(j).eval(point)
        })
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: point.len(),
            });
        }
        let residual = self.residual(point);
        if residual > ON_MANIFOLD_TOL {
            return Err(Error::OffManifold { residual });
        }
        Ok(())
    }

    pub fn tangent_frame(&self, point: &[f64]) -> Result<TangentFrame> {
        self.check_point(point)?;
        self.frame_unchecked(point)
    }

    /// Tangent frame of the level set of the constraints through `point`,
    /// which agrees with `tangent_frame` on the manifold. Used to extend
    /// tangent fields to a neighbourhood.
    pub(crate) fn frame_unchecked(&self, point: &[f64]) -> Result<TangentFrame> {
        let codim = self.ambient_dim - self.expected_dim;
        let basis = if self.constraints.is_empty() {
            DMatrix::identity(self.ambient_dim, self.ambient_dim)
        } else {
            let j = self.jacobian(point);
            let r = linalg::rank(&j, 0.0);
            if r != codim {
                return Err(Error::RankDeficient {
                    rank: r,
                    expected: codim,
                });
            }
            linalg::nullspace(&j, 0.0)
        };
        if basis.ncols() != self.expected_dim {
            return Err(Error::RankDeficient {
                rank: self.ambient_dim - basis.ncols(),
                expected: codim,
            });
        }
        Ok(TangentFrame {
            point: DVector::from_column_slice(point),
            basis,
        })
    }

    /// Newton projection of a nearby point onto the constraint locus.
    pub fn project(&self, point: &DVector<f64>, opts: NewtonOptions) -> NewtonOutcome {
        if self.constraints.is_empty() {
            return NewtonOutcome {
                point: point.clone(),
                residual: 0.0,
                iterations: 0,
                converged: true,
            };
        }
        newton::project(point.clone(), opts, |x| {
            (
                self.constraint_values(x.as_slice()),
                self.jacobian(x.as_slice()),
            )
        })
    }
}
