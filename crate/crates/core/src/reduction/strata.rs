//! Orbit-type partition of the level ray for torus actions.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DVector;
use serde::Serialize;

use super::checks::{consensus, kernel_orbit_dim, ray_tangent_dim, reduced_kernel_at, RayContext};
use super::hnf::column_hnf;
use super::sampling::{block_coordinates, sample_level_ray_on_locus, SampleSet};
use crate::error::{Error, Result};
use crate::exact::{span_meets_open_orthant, QMat, Q};
use crate::exterior::Rational;
use crate::exterior::contact_check;
use crate::lie::DualElement;
use crate::scenario::Scenario;

/// A block `z_j` counts as vanishing below this modulus.
pub const ZERO_MODULUS: f64 = 1e-6;

/// Isotropy of a torus point: the vanishing blocks and the lattice spanned
/// by the weights of the remaining blocks. The isotropy subgroup is the
/// annihilator of that lattice in the torus.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct IsotropyLabel {
    pub zero_blocks: Vec<usize>,
    /// Column Hermite normal form, column-major.
    pub weight_lattice_hnf: Vec<Vec<i64>>,
}

impl IsotropyLabel {
    /// `dim` of the isotropy subgroup (`k - rank` of the weight lattice).
    pub fn isotropy_dim(&self, torus_dim: usize) -> usize {
        torus_dim - self.weight_lattice_hnf.len()
    }
}

impl fmt::Display for IsotropyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "zeros={:?} lattice={:?}", self.zero_blocks, self.weight_lattice_hnf)
    }
}

pub fn isotropy_label(weights: &[Vec<i64>], point: &DVector<f64>) -> IsotropyLabel {
    let k = weights.len();
    let n = weights.first().map_or(0, Vec::len);
    let mut zero_blocks = Vec::new();
    let mut cols = Vec::new();
    for j in 0..n {
        let modulus = point[2 * j].hypot(point[2 * j + 1]);
        if modulus <= ZERO_MODULUS {
            zero_blocks.push(j);
        } else {
            cols.push((0..k).map(|r| weights[r][j]).collect::<Vec<_>>());
        }
    }
    IsotropyLabel {
        zero_blocks,
        weight_lattice_hnf: column_hnf(k, &cols),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StratumRecord {
    pub isotropy_label: IsotropyLabel,
    pub sample_indices: Vec<usize>,
    pub stratum_dim: usize,
    pub orbit_dim: usize,
    pub quotient_dim: usize,
    pub contact_on_stratum: bool,
    /// Reduced kernel equals the orbit directions at every stratum sample.
    pub reduced_kernel_ok: bool,
}

/// Groups samples by isotropy and measures each stratum on the fixed-point
/// submanifold `M_H` (the manifold with the vanishing blocks imposed).
pub fn orbit_type_partition(scn: &Scenario, mu: &DualElement, samples: &SampleSet) -> Result<Vec<StratumRecord>> {
    let weights = scn.weights()?;
    let geo = scn.geometry()?;
    let ctx = RayContext::new(scn, mu)?;
    let mut groups: BTreeMap<IsotropyLabel, Vec<usize>> = BTreeMap::new();
    for (i, p) in samples.points.iter().enumerate() {
        groups.entry(isotropy_label(weights, p)).or_default().push(i);
    }
    groups
        .into_iter()
        .map(|(label, idx)| {
            let coords = block_coordinates(&label.zero_blocks);
            let m_h = geo.manifold.with_vanishing_coordinates(&coords);
            let mut dims = Vec::with_capacity(idx.len());
            let mut orbits = Vec::with_capacity(idx.len());
            let mut contact = true;
            let mut reduced = true;
            for &i in &idx {
                let mut p = samples.points[i].clone();
                for &c in &coords {
                    p[c] = 0.0;
                }
                dims.push(ray_tangent_dim(geo, &m_h, &ctx, &p)?);
                orbits.push(kernel_orbit_dim(geo, &ctx, &p));
                contact &= match contact_check(&m_h, &geo.form, p.as_slice()) {
                    Ok(v) => v.is_contact,
                    Err(Error::EvenDimension(_)) => false,
                    Err(e) => return Err(e),
                };
                reduced &= reduced_kernel_at(geo, &m_h, &ctx, &p)?.ok;
            }
            let stratum_dim = consensus(&dims)?;
            let orbit_dim = consensus(&orbits)?;
            let quotient_dim = stratum_dim
                .checked_sub(orbit_dim)
                .ok_or(Error::NegativeQuotient { stratum_dim, orbit_dim })?;
            Ok(StratumRecord {
                isotropy_label: label,
                sample_indices: idx,
                stratum_dim,
                orbit_dim,
                quotient_dim,
                contact_on_stratum: contact,
                reduced_kernel_ok: reduced,
            })
        })
        .collect()
}

/// Zero patterns of the blocks that occur on the level ray, decided exactly:
/// pattern `P` occurs iff some `t > 0` on the blocks outside `P` and `s > 0`
/// solve `W_P t = s mu` (the quadric then fixes the overall scale).
pub fn realizable_zero_patterns(weights: &[Vec<i64>], mu: &[Rational]) -> Vec<Vec<usize>> {
    let k = weights.len();
    let n = weights.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let zero: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let live: Vec<usize> = (0..n).filter(|j| mask & (1 << j) == 0).collect();
        let mut a = QMat::zeros(k, live.len() + 1);
        for r in 0..k {
            for (c, &j) in live.iter().enumerate() {
                a[(r, c)] = Q::from_integer(i128::from(weights[r][j]));
            }
            a[(r, live.len())] = -Q::new(i128::from(*mu[r].numer()), i128::from(*mu[r].denom()));
        }
        if span_meets_open_orthant(&a.nullspace()) {
            out.push(zero);
        }
    }
    out
}

/// Samples every zero pattern of the blocks (all but the full pattern)
/// separately and merges the results in pattern order, so lower strata are
/// represented even though generic seeds never reach them.
pub fn stratified_samples(scn: &Scenario, mu: &DualElement, per_pattern: usize, seed: u64) -> Result<SampleSet> {
    let n = scn.weights()?.first().map_or(0, Vec::len);
    let mut sets = Vec::new();
    for mask in 0u32..((1u32 << n) - 1) {
        let blocks: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        sets.push(sample_level_ray_on_locus(scn, mu, &blocks, per_pattern, seed)?);
    }
    Ok(SampleSet::merged(&sets).expect("at least the empty pattern"))
}
