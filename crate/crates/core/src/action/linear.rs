use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exterior::poly::{qi, QMatrix};
use crate::exterior::{EmbeddedManifold, Poly1Form};
use crate::lie::LieAlgebraData;

/// Linear action of a Lie algebra on `R^n`: `A_M(x) = M_A x`, with one
/// exact generator matrix per basis element.
#[derive(Debug, Clone)]
pub struct LinearAction {
    algebra: LieAlgebraData,
    generators: Vec<QMatrix>,
    generators_f64: Vec<DMatrix<f64>>,
}

impl LinearAction {
    /// Checks `[M_i, M_j] = sum_k c_ijk M_k` exactly.
    pub fn new(algebra: LieAlgebraData, generators: Vec<QMatrix>) -> Result<Self> {
        if generators.len() != algebra.dim() {
            return Err(Error::DimensionMismatch {
                expected: algebra.dim(),
                found: generators.len(),
            });
        }
        let n = generators.first().map_or(0, QMatrix::dim);
        if let Some(g) = generators.iter().find(|g| g.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.dim(),
            });
        }
        for i in 0..generators.len() {
            for j in (i + 1)..generators.len() {
                let mut diff = generators[i].commutator(&generators[j]);
                for (k, g) in generators.iter().enumerate() {
                    diff = diff.add_scaled(g, -algebra.structure_constant(i, j, k));
                }
                if !diff.is_zero() {
                    return Err(Error::NotARepresentation {
                        i,
                        j,
                        residual: diff.max_abs(),
                    });
                }
            }
        }
        let generators_f64 = generators.iter().map(QMatrix::to_f64).collect();
        Ok(Self {
            algebra,
            generators,
            generators_f64,
        })
    }

    /// Torus acting on `C^n` with integer weights; row `r` of `weights` gives
    /// the weights of the `r`-th circle factor. Each factor acts by the
    /// blocks `[[0, -w], [w, 0]]`.
    pub fn torus(weights: &[Vec<i64>]) -> Result<Self> {
        let k = weights.len();
        let n = weights.first().map_or(0, Vec::len);
        let gens = weights
            .iter()
            .map(|row| {
                if row.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: row.len(),
                    });
                }
                let mut m = QMatrix::zeros(2 * n);
                for (j, &w) in row.iter().enumerate() {
                    m.set(2 * j, 2 * j + 1, qi(-w));
                    m.set(2 * j + 1, 2 * j, qi(w));
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(LieAlgebraData::abelian(k), gens)
    }

    /// `so(3)` acting complex-linearly on `C^3 = R^3 + i R^3` (interleaved
    /// coordinates), `e_i` generating rotation about the `i`-th axis.
    pub fn so3_on_c3(so3: LieAlgebraData) -> Result<Self> {
        let eps = |i: usize, j: usize, k: usize| -> i64 {
            match (i, j, k) {
                (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
                (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
                _ => 0,
            }
        };
        let gens = (0..3)
            .map(|i| {
                // (L_i)_{ab} = -eps_{iab}, so L_i v = e_i x v
                let mut m = QMatrix::zeros(6);
                for a in 0..3 {
                    for b in 0..3 {
                        let v = -eps(i, a, b);
                        if v != 0 {
                            m.set(2 * a, 2 * b, qi(v));
                            m.set(2 * a + 1, 2 * b + 1, qi(v));
                        }
                    }
                }
                m
            })
            .collect();
        Self::new(so3, gens)
    }

    /// A single generator that is identically zero (trivial action).
    pub fn trivial(ambient_dim: usize) -> Self {
        Self::new(LieAlgebraData::abelian(1), vec![QMatrix::zeros(ambient_dim)])
            .expect("zero generator represents the abelian algebra")
    }

    pub fn algebra(&self) -> &LieAlgebraData {
        &self.algebra
    }

    pub fn ambient_dim(&self) -> usize {
        self.generators.first().map_or(0, QMatrix::dim)
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generator(&self, i: usize) -> &QMatrix {
        &self.generators[i]
    }

    pub fn generator_matrix(&self, i: usize) -> &DMatrix<f64> {
        &self.generators_f64[i]
    }

    /// Matrix `M_A` for a general algebra vector.
    pub fn matrix_of(&self, a: &DVector<f64>) -> DMatrix<f64> {
        let n = self.ambient_dim();
        self.generators_f64
            .iter()
            .zip(a.iter())
            .fold(DMatrix::zeros(n, n), |acc, (m, c)| acc + m * *c)
    }

    /// Largest spectral norm among generators (scale for rank tests).
    pub fn generator_scale(&self) -> f64 {
        self.generators_f64
            .iter()
            .map(crate::linalg::norm2)
            .fold(0.0, f64::max)
    }

    /// `A_M(x)` for each basis element, as the columns of an `n x dim g`
    /// matrix.
    pub fn generator_matrix_at(&self, point: &DVector<f64>) -> DMatrix<f64> {
        let cols: Vec<DVector<f64>> = self.generators_f64.iter().map(|m| m * point).collect();
        if cols.is_empty() {
            DMatrix::zeros(point.len(), 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    }

    /// The Lie derivative of the form along every generator must vanish as a
    /// polynomial 1-form.
    pub fn check_form_invariant(&self, form: &Poly1Form) -> Result<()> {
        for (i, g) in self.generators.iter().enumerate() {
            let l = form.lie_derivative_linear(g);
            if !l.is_zero() {
                return Err(Error::FormNotInvariant {
                    generator: i,
                    residual: l.max_abs_coeff(),
                });
            }
        }
        Ok(())
    }

    /// Each generator's derivative of each constraint must vanish identically.
    pub fn check_tangent(&self, manifold: &EmbeddedManifold) -> Result<()> {
        for (i, g) in self.generators.iter().enumerate() {
            for (k, c) in manifold.constraints().iter().enumerate() {
                let l = c.lie_derivative_linear(g);
                if !l.is_zero() {
                    return Err(Error::NotTangent {
                        generator: i,
                        constraint: k,
                        residual: l.max_abs_coeff(),
                    });
                }
            }
        }
        Ok(())
    }

    /// `exp(s M_A)` for the one-parameter subgroup through `A`.
    pub fn group_element(&self, a: &DVector<f64>, s: f64) -> DMatrix<f64> {
        (self.matrix_of(a) * s).exp()
    }
}

/// `A_M(x)` for basis element `i`.
pub fn generator_field(action: &LinearAction, basis_index: usize, point: &DVector<f64>) -> Result<DVector<f64>> {
    if basis_index >= action.num_generators() {
        return Err(Error::IndexOutOfRange {
            index: basis_index,
            len: action.num_generators(),
        });
    }
    if point.len() != action.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: action.ambient_dim(),
            found: point.len(),
        });
    }
    Ok(action.generator_matrix(basis_index) * point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::Catalog;
    use approx::assert_abs_diff_eq;

    #[test]
    fn circle_generator_rotates_first_block() {
        let act = LinearAction::torus(&[vec![1, -1, -1]]).unwrap();
        let p = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let v = generator_field(&act, 0, &p).unwrap();
        assert_eq!(v, DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn generator_vanishes_off_its_weights() {
        let act = LinearAction::torus(&[vec![1, 0, 0]]).unwrap();
        let p = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(generator_field(&act, 0, &p).unwrap().norm(), 0.0);
    }

    #[test]
    fn index_out_of_range() {
        let act = LinearAction::torus(&[vec![1, 1]]).unwrap();
        assert!(matches!(
            generator_field(&act, 1, &DVector::zeros(4)),
            Err(Error::IndexOutOfRange { index: 1, len: 1 })
        ));
    }

    #[test]
    fn generator_matches_flow_derivative() {
        let cat = Catalog::builtin();
        let act = LinearAction::so3_on_c3(cat.get("so3").unwrap().clone()).unwrap();
        let p = DVector::from_vec(vec![0.3, -0.2, 0.5, 0.1, -0.7, 0.4]);
        for i in 0..3 {
            let a = DVector::from_fn(3, |j, _| if j == i { 1.0 } else { 0.0 });
            let h = 1e-5;
            let fd = (act.group_element(&a, h) * &p - act.group_element(&a, -h) * &p) / (2.0 * h);
            assert_abs_diff_eq!(fd, generator_field(&act, i, &p).unwrap(), epsilon = 1e-9);
        }
    }

    #[test]
    fn so3_representation_is_checked() {
        let cat = Catalog::builtin();
        assert!(LinearAction::so3_on_c3(cat.get("so3").unwrap().clone()).is_ok());
        // the same matrices do not represent sl(2)
        let wrong = LinearAction::so3_on_c3(cat.get("sl2").unwrap().clone());
        assert!(matches!(wrong, Err(Error::NotARepresentation { .. })));
    }

    #[test]
    fn standard_form_invariance_and_tangency() {
        let act = LinearAction::torus(&[vec![1, 1, 1], vec![0, 1, -1]]).unwrap();
        act.check_form_invariant(&Poly1Form::standard_contact(3)).unwrap();
        act.check_tangent(&EmbeddedManifold::unit_sphere(6)).unwrap();
        // Darboux form on R^3 is not rotation invariant
        let rot = LinearAction::new(
            LieAlgebraData::abelian(1),
            vec![QMatrix::from_integers(&[&[0, -1, 0], &[1, 0, 0], &[0, 0, 0]])],
        )
        .unwrap();
        assert!(matches!(
            rot.check_form_invariant(&Poly1Form::darboux_r3()),
            Err(Error::FormNotInvariant { .. })
        ));
    }
}
