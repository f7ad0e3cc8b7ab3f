use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::action::{LinearAction, MomentMap};
use crate::error::{Error, Result};
use crate::exterior::poly::q_to_f64;
use crate::exterior::{parse_rational, q, qi, ContactForm, EmbeddedManifold, Poly1Form, Rational};
use crate::lie::{Catalog, DualElement, LieAlgebraData};

/// Numeric data of a scenario: manifold, contact form and action.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub manifold: EmbeddedManifold,
    pub form: ContactForm,
    pub action: LinearAction,
    pub moment: MomentMap,
    /// Radius of a sphere containing the manifold (sampling seeds live on it).
    pub bounding_radius: f64,
}

/// Facts taken as given for bookkeeping scenarios.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DeclaredFacts {
    pub manifold_dim: Option<usize>,
    pub locally_free: Option<bool>,
    pub proper: Option<bool>,
    /// Dimension of the contact quotient, when it is itself declared.
    pub fiber_dim: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    id: String,
    description: String,
    algebra: LieAlgebraData,
    geometry: Option<Geometry>,
    weights: Option<Vec<Vec<i64>>>,
    declared: DeclaredFacts,
    default_mu: Vec<Rational>,
    /// Squared moduli `|z_j|^2` of a distinguished point of the level set.
    witness: Option<Vec<Rational>>,
}

impl Scenario {
    /// Validates the representation, invariance of the form and tangency of
    /// the generators, all exactly.
    pub fn numeric(
        id: &str,
        description: &str,
        manifold: EmbeddedManifold,
        form: Poly1Form,
        action: LinearAction,
        bounding_radius: f64,
        default_mu: Vec<Rational>,
    ) -> Result<Self> {
        if form.ambient_dim() != manifold.ambient_dim() || action.ambient_dim() != manifold.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: manifold.ambient_dim(),
                found: action.ambient_dim().max(form.ambient_dim()),
            });
        }
        action.check_form_invariant(&form)?;
        action.check_tangent(&manifold)?;
        if default_mu.len() != action.num_generators() {
            return Err(Error::DimensionMismatch {
                expected: action.num_generators(),
                found: default_mu.len(),
            });
        }
        let moment = MomentMap::new(&action, &form);
        Ok(Self {
            id: id.to_string(),
            description: description.to_string(),
            algebra: action.algebra().clone(),
            geometry: Some(Geometry {
                manifold,
                form: ContactForm::new(form),
                action,
                moment,
                bounding_radius,
            }),
            weights: None,
            declared: DeclaredFacts::default(),
            default_mu,
            witness: None,
        })
    }

    /// Torus acting diagonally on the quadric `sum_j a_j |z_j|^2 = 1` with
    /// the standard contact form.
    pub fn torus_quadric(
        id: &str,
        description: &str,
        quadric: &[Rational],
        weights: Vec<Vec<i64>>,
        default_mu: Vec<Rational>,
    ) -> Result<Self> {
        if let Some(a) = quadric.iter().find(|a| **a <= qi(0)) {
            return Err(Error::Parse(format!("quadric coefficient {a} must be positive")));
        }
        if quadric.is_empty() {
            return Err(Error::Parse("quadric needs at least one coefficient".into()));
        }
        let manifold = EmbeddedManifold::complex_quadric(quadric);
        let action = LinearAction::torus(&weights)?;
        if action.ambient_dim() != manifold.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: quadric.len(),
                found: action.ambient_dim() / 2,
            });
        }
        let amin = quadric.iter().map(q_to_f64).fold(f64::INFINITY, f64::min);
        let mut s = Self::numeric(
            id,
            description,
            manifold,
            Poly1Form::standard_contact(quadric.len()),
            action,
            1.0 / amin.sqrt(),
            default_mu,
        )?;
        s.weights = Some(weights);
        Ok(s)
    }

    pub fn bookkeeping(
        id: &str,
        description: &str,
        algebra: LieAlgebraData,
        declared: DeclaredFacts,
        default_mu: Vec<Rational>,
    ) -> Result<Self> {
        if default_mu.len() != algebra.dim() {
            return Err(Error::DimensionMismatch {
                expected: algebra.dim(),
                found: default_mu.len(),
            });
        }
        Ok(Self {
            id: id.to_string(),
            description: description.to_string(),
            algebra,
            geometry: None,
            weights: None,
            declared,
            default_mu,
            witness: None,
        })
    }

    pub fn with_witness(mut self, squared_moduli: Vec<Rational>) -> Self {
        self.witness = Some(squared_moduli);
        self
    }

    /// Same scenario with the contact form replaced (e.g. conformally
    /// rescaled); invariance is re-checked. The strict level depends on the
    /// form, so any witness point is dropped.
    pub fn with_form(&self, form: Poly1Form) -> Result<Self> {
        let g = self.geometry()?;
        g.action.check_form_invariant(&form)?;
        let mut out = self.clone();
        out.witness = None;
        let geo = out.geometry.as_mut().expect("checked above");
        geo.moment = MomentMap::new(&geo.action, &form);
        geo.form = ContactForm::new(form);
        Ok(out)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn algebra(&self) -> &LieAlgebraData {
        &self.algebra
    }

    pub fn is_numeric(&self) -> bool {
        self.geometry.is_some()
    }

    pub fn geometry(&self) -> Result<&Geometry> {
        self.geometry
            .as_ref()
            .ok_or_else(|| Error::BookkeepingOnly(self.id.clone()))
    }

    pub fn weights(&self) -> Result<&[Vec<i64>]> {
        self.weights
            .as_deref()
            .ok_or_else(|| Error::NotTorus(self.id.clone()))
    }

    pub fn declared(&self) -> &DeclaredFacts {
        &self.declared
    }

    pub fn default_mu(&self) -> &[Rational] {
        &self.default_mu
    }

    /// Manifold dimension, measured for numeric scenarios and declared
    /// otherwise.
    pub fn manifold_dim(&self) -> Option<usize> {
        match &self.geometry {
            Some(g) => Some(g.manifold.expected_dim()),
            None => self.declared.manifold_dim,
        }
    }

    /// Real point with the witness moduli (first coordinate of each block).
    pub fn witness_point(&self) -> Option<DVector<f64>> {
        let w = self.witness.as_ref()?;
        Some(DVector::from_fn(2 * w.len(), |i, _| {
            if i % 2 == 0 {
                q_to_f64(&w[i / 2]).sqrt()
            } else {
                0.0
            }
        }))
    }

    pub fn mu(&self, coords: &[Rational]) -> Result<DualElement> {
        if coords.len() != self.algebra.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.algebra.dim(),
                found: coords.len(),
            });
        }
        Ok(DualElement::new(coords.iter().map(q_to_f64).collect()))
    }
}

/// Ids of the built-in scenarios, in listing order.
pub const REGISTRY_IDS: [&str; 8] = [
    "E1",
    "E2",
    "S3",
    "S5-T2",
    "S5-T3",
    "R3-darboux",
    "SL2-bookkeeping",
    "SO3-bookkeeping",
];

pub fn load_scenario(id: &str, catalog: &Catalog) -> Result<Scenario> {
    let w = |rows: &[&[i64]]| rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>();
    match id {
        "E1" => Scenario::torus_quadric(
            "E1",
            "ellipsoid |z1|^2 + 2|z2|^2 + 2|z3|^2 = 1, circle weights (1,-1,-1)",
            &[qi(1), qi(2), qi(2)],
            w(&[&[1, -1, -1]]),
            vec![qi(1)],
        ),
        "E2" => Ok(Scenario::torus_quadric(
            "E2",
            "ellipsoid |z1|^2/2 + |z2|^2 + |z3|^2/3 = 1, circle weights (1,-1,-1)",
            &[q(1, 2), qi(1), q(1, 3)],
            w(&[&[1, -1, -1]]),
            vec![qi(1)],
        )?
        .with_witness(vec![q(14, 9), q(1, 18), q(1, 2)])),
        "S3" => Scenario::torus_quadric(
            "S3",
            "unit sphere in C^2, diagonal circle (weights (1,1))",
            &[qi(1), qi(1)],
            w(&[&[1, 1]]),
            vec![qi(1)],
        ),
        "S5-T2" => Scenario::torus_quadric(
            "S5-T2",
            "unit sphere in C^3, 2-torus with weight rows (1,1,1), (0,1,-1)",
            &[qi(1), qi(1), qi(1)],
            w(&[&[1, 1, 1], &[0, 1, -1]]),
            vec![qi(2), qi(1)],
        ),
        "S5-T3" => Scenario::torus_quadric(
            "S5-T3",
            "unit sphere in C^3, coordinatewise 3-torus",
            &[qi(1), qi(1), qi(1)],
            w(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
            vec![qi(1), qi(1), qi(1)],
        ),
        "R3-darboux" => Scenario::numeric(
            "R3-darboux",
            "R^3 with dz + x dy and the trivial circle action",
            EmbeddedManifold::euclidean(3),
            Poly1Form::darboux_r3(),
            LinearAction::trivial(3),
            1.0,
            vec![qi(1)],
        ),
        "SL2-bookkeeping" => Scenario::bookkeeping(
            "SL2-bookkeeping",
            "sl(2,R) acting on T*G x R, dimension bookkeeping at the nilpotent E*",
            catalog.get("sl2")?.clone(),
            DeclaredFacts {
                manifold_dim: Some(7),
                locally_free: Some(true),
                proper: Some(true),
                fiber_dim: None,
            },
            vec![qi(0), qi(0), qi(1)],
        ),
        "SO3-bookkeeping" => Scenario::bookkeeping(
            "SO3-bookkeeping",
            "so(3) acting on a declared 5-manifold, dimension bookkeeping at e3*",
            catalog.get("so3")?.clone(),
            DeclaredFacts {
                manifold_dim: Some(5),
                locally_free: Some(true),
                proper: Some(true),
                fiber_dim: None,
            },
            vec![qi(0), qi(0), qi(1)],
        ),
        other => Err(Error::UnknownScenario(other.to_string())),
    }
}

pub fn registry(catalog: &Catalog) -> Result<Vec<Scenario>> {
    REGISTRY_IDS.iter().map(|id| load_scenario(id, catalog)).collect()
}

/// Scenario file contents.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum ScenarioFile {
    TorusQuadric {
        id: String,
        #[serde(default)]
        description: String,
        quadric: Vec<String>,
        weights: Vec<Vec<i64>>,
        mu: Vec<String>,
        witness: Option<Vec<String>>,
    },
    Bookkeeping {
        id: String,
        #[serde(default)]
        description: String,
        algebra: String,
        mu: Vec<String>,
        #[serde(flatten)]
        declared: DeclaredFacts,
    },
}

fn rationals(v: &[String]) -> Result<Vec<Rational>> {
    v.iter().map(|s| parse_rational(s)).collect()
}

pub fn scenario_from_toml(text: &str, catalog: &Catalog) -> Result<Scenario> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    match file {
        ScenarioFile::TorusQuadric {
            id,
            description,
            quadric,
            weights,
            mu,
            witness,
        } => {
            let s = Scenario::torus_quadric(&id, &description, &rationals(&quadric)?, weights, rationals(&mu)?)?;
            Ok(match witness {
                Some(w) => s.with_witness(rationals(&w)?),
                None => s,
            })
        }
        ScenarioFile::Bookkeeping {
            id,
            description,
            algebra,
            mu,
            declared,
        } => Scenario::bookkeeping(&id, &description, catalog.get(&algebra)?.clone(), declared, rationals(&mu)?),
    }
}
