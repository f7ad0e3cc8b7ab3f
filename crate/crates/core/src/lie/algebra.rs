use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exterior::poly::{parse_rational, q_to_f64, Rational};

/// Finite-dimensional real Lie algebra given by exact structure constants
/// `[e_i, e_j] = sum_k c[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebraData {
    name: String,
    basis_names: Vec<String>,
    structure: Vec<Rational>,
    structure_f64: Vec<f64>,
    invariant_form: Option<DMatrix<f64>>,
    lattice: Option<Vec<DVector<f64>>>,
}

impl LieAlgebraData {
    /// Validates antisymmetry and the Jacobi identity exactly.
    pub fn new(name: impl Into<String>, basis_names: Vec<String>, structure: Vec<Rational>) -> Result<Self> {
        let name = name.into();
        let n = basis_names.len();
        if structure.len() != n * n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n * n,
                found: structure.len(),
            });
        }
        let alg = Self {
            structure_f64: structure.iter().map(q_to_f64).collect(),
            name,
            basis_names,
            structure,
            invariant_form: None,
            lattice: None,
        };
        alg.check_antisymmetry()?;
        alg.check_jacobi()?;
        Ok(alg)
    }

    pub fn abelian(n: usize) -> Self {
        let names = (1..=n).map(|i| format!("t{i}")).collect();
        let mut alg = Self::new(format!("abelian-{n}"), names, vec![Rational::zero(); n * n * n])
            .expect("abelian algebra is valid");
        alg.invariant_form = Some(DMatrix::identity(n, n));
        alg.lattice = Some((0..n).map(|i| DVector::from_fn(n, |j, _| f64::from(u8::from(i == j)))).collect());
        alg
    }

    pub fn with_invariant_form(mut self, form: DMatrix<f64>) -> Self {
        self.invariant_form = Some(form);
        self
    }

    pub fn with_lattice(mut self, lattice: Vec<DVector<f64>>) -> Self {
        self.lattice = Some(lattice);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis_names.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.iter().all(Zero::is_zero)
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        let n = self.dim();
        (i * n + j) * n + k
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Rational {
        self.structure[self.idx(i, j, k)]
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.structure_f64[self.idx(i, j, k)]
    }

    pub fn max_abs_structure_constant(&self) -> f64 {
        self.structure_f64.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn invariant_form(&self) -> Option<&DMatrix<f64>> {
        self.invariant_form.as_ref()
    }

    pub fn lattice(&self) -> Option<&[DVector<f64>]> {
        self.lattice.as_deref()
    }

    pub fn bracket(&self, a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        let mut out = DVector::zeros(n);
        for i in 0..n {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if b[j] == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[k] += a[i] * b[j] * self.c(i, j, k);
                }
            }
        }
        out
    }

    fn check_antisymmetry(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.structure_constant(i, j, k) != -self.structure_constant(j, i, k) {
                        return Err(Error::StructureAntisymmetry { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_jacobi(&self) -> Result<()> {
        let n = self.dim();
        let c = |i, j, k| self.structure_constant(i, j, k);
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    for l in 0..n {
                        let mut s = Rational::zero();
                        for m in 0..n {
                            s += c(j, k, m) * c(i, m, l) + c(k, i, m) * c(j, m, l) + c(i, j, m) * c(k, m, l);
                        }
                        if !s.is_zero() {
                            return Err(Error::JacobiViolation {
                                algebra: self.name.clone(),
                                i,
                                j,
                                k,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Element of the dual space, in coordinates of the dual basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DualElement(DVector<f64>);

impl DualElement {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(DVector::from_vec(coords))
    }

    pub fn from_vector(v: DVector<f64>) -> Self {
        Self(v)
    }

    pub fn zero(n: usize) -> Self {
        Self(DVector::zeros(n))
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| *x == 0.0)
    }

    pub fn pair(&self, a: &DVector<f64>) -> f64 {
        self.0.dot(a)
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.iter().copied().collect()
    }
}

#[derive(Debug, Deserialize)]
struct CatalogFile {
    algebra: Vec<AlgebraEntry>,
}

#[derive(Debug, Deserialize)]
struct AlgebraEntry {
    name: String,
    basis: Vec<String>,
    #[serde(default)]
    brackets: Vec<BracketEntry>,
    invariant_form: Option<Vec<Vec<String>>>,
    lattice: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Deserialize)]
struct BracketEntry {
    left: String,
    right: String,
    result: Vec<(String, String)>,
}

/// Named collection of algebras, loaded from the TOML catalog format.
#[derive(Debug, Clone)]
pub struct Catalog {
    algebras: BTreeMap<String, LieAlgebraData>,
}

const BUILTIN_CATALOG: &str = include_str!("../../data/lie_catalog.toml");

fn parse_matrix(rows: &[Vec<String>], n: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("{what} must be {n}x{n}")));
    }
    let mut m = DMatrix::zeros(n, n);
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            m[(i, j)] = q_to_f64(&parse_rational(v)?);
        }
    }
    Ok(m)
}

impl Catalog {
    pub fn builtin() -> Self {
        Self::from_toml_str(BUILTIN_CATALOG).expect("builtin catalog is valid")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let file: CatalogFile = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut algebras = BTreeMap::new();
        for entry in file.algebra {
            let alg = Self::build(entry)?;
            algebras.insert(alg.name.clone(), alg);
        }
        Ok(Self { algebras })
    }

    fn build(entry: AlgebraEntry) -> Result<LieAlgebraData> {
        let n = entry.basis.len();
        let index = |name: &str| {
            entry
                .basis
                .iter()
                .position(|b| b == name)
                .ok_or_else(|| Error::Parse(format!("unknown basis element `{name}` in `{}`", entry.name)))
        };
        let mut structure = vec![Rational::zero(); n * n * n];
        let at = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
        for b in &entry.brackets {
            let (i, j) = (index(&b.left)?, index(&b.right)?);
            for (coeff, target) in &b.result {
                let k = index(target)?;
                let c = parse_rational(coeff)?;
                structure[at(i, j, k)] += c;
                structure[at(j, i, k)] -= c;
            }
        }
        let mut alg = LieAlgebraData::new(entry.name.clone(), entry.basis.clone(), structure)?;
        if let Some(rows) = &entry.invariant_form {
            alg.invariant_form = Some(parse_matrix(rows, n, "invariant_form")?);
        }
        if let Some(rows) = &entry.lattice {
            let vecs = rows
                .iter()
                .map(|r| {
                    if r.len() != n {
                        return Err(Error::Parse(format!("lattice vectors must have length {n}")));
                    }
                    r.iter()
                        .map(|v| parse_rational(v).map(|x| q_to_f64(&x)))
                        .collect::<Result<Vec<f64>>>()
                        .map(DVector::from_vec)
                })
                .collect::<Result<Vec<_>>>()?;
            alg.lattice = Some(vecs);
        }
        Ok(alg)
    }

    pub fn get(&self, name: &str) -> Result<&LieAlgebraData> {
        self.algebras
            .get(name)
            .ok_or_else(|| Error::UnknownAlgebra(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.algebras.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &LieAlgebraData> {
        self.algebras.values()
    }
}
