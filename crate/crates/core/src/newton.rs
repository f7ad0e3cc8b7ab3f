//! Damped Gauss-Newton projection onto the zero set of a square or
//! underdetermined polynomial system. Steps use the truncated
//! pseudo-inverse, so the iteration moves by the minimum-norm correction.

use nalgebra::{DMatrix, DVector};

use crate::linalg;

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub max_halvings: usize,
}

impl NewtonOptions {
    /// Sampling projection: at most 50 iterations, residual 1e-12.
    pub const SAMPLING: Self = Self {
        max_iterations: 50,
        tolerance: 1e-12,
        max_halvings: 12,
    };

    /// Per-step re-projection during flow integration.
    pub const FLOW: Self = Self {
        max_iterations: 5,
        tolerance: 1e-12,
        max_halvings: 4,
    };
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub point: DVector<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn sup_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Runs damped Gauss-Newton from `x0`. `system` returns the residual vector
/// and its Jacobian at a point.
pub fn project<F>(x0: DVector<f64>, opts: NewtonOptions, mut system: F) -> NewtonOutcome
where
    F: FnMut(&DVector<f64>) -> (DVector<f64>, DMatrix<f64>),
{
    let mut x = x0;
    let (mut f, mut j) = system(&x);
    let mut res = sup_norm(&f);
    if !res.is_finite() {
        return NewtonOutcome {
            point: x,
            residual: res,
            iterations: 0,
            converged: false,
        };
    }
    for it in 0..opts.max_iterations {
        if res < opts.tolerance {
            return NewtonOutcome {
                point: x,
                residual: res,
                iterations: it,
                converged: true,
            };
        }
        let step = linalg::lstsq(&j, &f, 0.0);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial = &x - &step * t;
            let (ft, jt) = system(&trial);
            let rt = sup_norm(&ft);
            if rt.is_finite() && (rt < res || rt < opts.tolerance) {
                x = trial;
                f = ft;
                j = jt;
                res = rt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    NewtonOutcome {
        converged: res < opts.tolerance,
        point: x,
        residual: res,
        iterations: opts.max_iterations,
    }
}
