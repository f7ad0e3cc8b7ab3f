use nalgebra::DVector;
use serde::Serialize;

use super::moment::MomentMap;
use crate::error::{Error, Result};
use crate::exterior::contact::reeb_field_extended;
use crate::exterior::{ContactForm, EmbeddedManifold, ON_MANIFOLD_TOL};
use crate::newton::NewtonOptions;

/// Steps per horizon: `h = 1e-3 T`.
pub const REEB_STEPS: usize = 1000;

#[derive(Debug, Clone, Serialize)]
pub struct FlowReport {
    /// `max_t |Phi(rho_t x) - Phi(x)|`, componentwise max.
    pub max_deviation: f64,
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    /// `|rho_T x - x|`.
    pub return_distance: f64,
}

/// Integrates the Reeb flow with classical RK4 and projects back onto the
/// manifold after every step.
pub fn reeb_flow_level_invariance(
    moment: &MomentMap,
    form: &ContactForm,
    manifold: &EmbeddedManifold,
    point: &DVector<f64>,
    horizon: f64,
) -> Result<FlowReport> {
    // rejects points off the manifold and non-contact points
    crate::exterior::reeb_field(manifold, form, point.as_slice())?;
    let h = horizon / REEB_STEPS as f64;
    let phi0 = moment.eval(point.as_slice());
    let field = |x: &DVector<f64>| reeb_field_extended(manifold, form, x.as_slice());
    let mut x = point.clone();
    let mut worst = 0.0_f64;
    for _ in 0..REEB_STEPS {
        let k1 = field(&x)?;
        let k2 = field(&(&x + &k1 * (h / 2.0)))?;
        let k3 = field(&(&x + &k2 * (h / 2.0)))?;
        let k4 = field(&(&x + &k3 * h))?;
        let stepped = &x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let proj = manifold.project(&stepped, NewtonOptions::FLOW);
        if proj.residual > ON_MANIFOLD_TOL {
            return Err(Error::LeftManifold(proj.residual));
        }
        x = proj.point;
        let dev = (moment.eval(x.as_slice()).coords() - phi0.coords()).amax();
        worst = worst.max(dev);
    }
    Ok(FlowReport {
        max_deviation: worst,
        return_distance: (&x - point).norm(),
        start: point.iter().copied().collect(),
        end: x.iter().copied().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::LinearAction;
    use crate::exterior::Poly1Form;
    use std::f64::consts::PI;

    #[test]
    fn darboux_trivial_action() {
        let act = LinearAction::trivial(3);
        let form = ContactForm::new(Poly1Form::darboux_r3());
        let m = MomentMap::new(&act, form.alpha());
        let p = DVector::from_vec(vec![0.3, -1.0, 2.0]);
        let r = reeb_flow_level_invariance(&m, &form, &EmbeddedManifold::euclidean(3), &p, 1.0).unwrap();
        assert_eq!(r.max_deviation, 0.0);
        // Reeb field is d/dz
        assert!((r.end[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn hopf_orbit_closes() {
        let act = LinearAction::torus(&[vec![1, 1]]).unwrap();
        let form = ContactForm::new(Poly1Form::standard_contact(2));
        let m = MomentMap::new(&act, form.alpha());
        let p = DVector::from_vec(vec![0.6, 0.0, 0.0, 0.8]);
        let r = reeb_flow_level_invariance(&m, &form, &EmbeddedManifold::unit_sphere(4), &p, 2.0 * PI).unwrap();
        assert!(r.max_deviation < 1e-8);
        assert!(r.return_distance < 1e-8, "{}", r.return_distance);
    }

    #[test]
    fn off_manifold_start_is_rejected() {
        let act = LinearAction::torus(&[vec![1, 1]]).unwrap();
        let form = ContactForm::new(Poly1Form::standard_contact(2));
        let m = MomentMap::new(&act, form.alpha());
        let p = DVector::from_vec(vec![1.0, 0.0, 0.0, 1.0]);
        assert!(reeb_flow_level_invariance(&m, &form, &EmbeddedManifold::unit_sphere(4), &p, 1.0).is_err());
    }
}
