//! Property tests: exact-rational oracles for the kernel routines, the
//! realizable-pattern rule for circle actions, and structural invariants of
//! the orbit-type partition and quotient dimensions.
#![allow(clippy::needless_range_loop)]

mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;

use common::*;
use contact_reduction::exterior::{qi, Rational};
use contact_reduction::lie::{bilinear_kernel, restricted_kernel};
use contact_reduction::linalg::Subspace;
use contact_reduction::reduction::{
    orbit_type_partition, quotient_dimension, realizable_zero_patterns, sample_level_ray, stratified_samples,
    ZERO_MODULUS,
};
use contact_reduction::{load_scenario, Catalog};

fn antisymmetric(n: usize, upper: &[i64]) -> RMat {
    let mut m = rmat(n, n);
    let mut it = upper.iter();
    for i in 0..n {
        for j in i + 1..n {
            let v = ri(*it.next().unwrap());
            m[i][j] = v;
            m[j][i] = -v;
        }
    }
    m
}

fn to_f64_mat(m: &RMat, n: usize) -> DMatrix<f64> {
    cols_to_f64(m, n).transpose()
}

fn antisym_strategy() -> impl Strategy<Value = (usize, Vec<i64>)> {
    (2usize..=7).prop_flat_map(|n| (Just(n), prop::collection::vec(-2i64..=2, n * (n - 1) / 2)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kernel_matches_rational_nullspace((n, upper) in antisym_strategy()) {
        let m = antisymmetric(n, &upper);
        let exact = rnullspace(&m, n);
        let k = bilinear_kernel(&to_f64_mat(&m, n)).unwrap();
        prop_assert_eq!(k.dim(), exact.len());
        prop_assert!(span_distance(k.basis(), &cols_to_f64(&exact, n)) < 1e-10);
    }

    #[test]
    fn restricted_kernel_matches_oracle(
        (n, upper) in antisym_strategy(),
        sub in prop::collection::vec(prop::collection::vec(-2i64..=2, 7), 1..=4),
    ) {
        let m = antisymmetric(n, &upper);
        let rows: RMat = sub.iter().map(|v| v[..n].iter().map(|&x| ri(x)).collect()).collect();
        let basis: Vec<Vec<R>> = {
            // independent rows only
            let mut kept: Vec<Vec<R>> = Vec::new();
            for r in rows {
                let mut t = kept.clone();
                t.push(r.clone());
                if rrank(&t, n) == t.len() {
                    kept.push(r);
                }
            }
            kept
        };
        prop_assume!(!basis.is_empty());
        let xm = rtranspose(&basis, n);
        let g = rmul(&rmul(&basis, &m), &xm);
        let coeffs = rnullspace(&g, basis.len());
        let exact: Vec<Vec<R>> = coeffs
            .iter()
            .map(|c| (0..n).map(|i| (0..basis.len()).map(|k| c[k] * basis[k][i]).sum()).collect())
            .collect();
        let sub = Subspace::span(&cols_to_f64(&basis, n), 1.0);
        let k = restricted_kernel(&to_f64_mat(&m, n), &sub).unwrap();
        prop_assert_eq!(k.dim(), exact.len());
        prop_assert!(span_distance(k.basis(), &cols_to_f64(&exact, n)) < 1e-10);
    }

    /// Circle on a positive quadric: `sum_{j not in P} w_j m_j = s mu` with
    /// `m_j, s > 0` is solvable iff some surviving weight has the sign of mu.
    #[test]
    fn circle_patterns_follow_the_sign_rule(
        w in prop::collection::vec(-2i64..=2, 2..=4),
        mu in prop_oneof![Just(-1i64), Just(1i64), Just(3i64)],
    ) {
        let n = w.len();
        let mut expected = Vec::new();
        for mask in 0u32..(1 << n) - 1 {
            let zero: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
            if (0..n).any(|j| !zero.contains(&j) && w[j] * mu > 0) {
                expected.push(zero);
            }
        }
        let mut got = realizable_zero_patterns(std::slice::from_ref(&w), &[qi(mu)]);
        got.sort();
        expected.sort();
        prop_assert_eq!(got, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Samples split into disjoint strata whose labels match the vanishing
    /// blocks; measured quotients on regular strata are odd.
    #[test]
    fn partition_is_disjoint_exhaustive_and_odd(
        mu in prop::sample::select(vec![(2i64, 1i64), (3, -1), (1, 0), (4, 1), (2, -1)]),
        seed in 0u64..1000,
    ) {
        let scn = load_scenario("S5-T2", &Catalog::builtin()).unwrap();
        let mq: Vec<Rational> = vec![qi(mu.0), qi(mu.1)];
        let m = scn.mu(&mq).unwrap();
        let set = stratified_samples(&scn, &m, 4, seed).unwrap();
        let strata = orbit_type_partition(&scn, &m, &set).unwrap();
        let mut seen = vec![0usize; set.len()];
        for s in &strata {
            for &i in &s.sample_indices {
                seen[i] += 1;
                let p = &set.points[i];
                let zeros: Vec<usize> = (0..3).filter(|&j| p[2 * j].hypot(p[2 * j + 1]) <= ZERO_MODULUS).collect();
                prop_assert_eq!(&zeros, &s.isotropy_label.zero_blocks);
            }
            prop_assert_eq!(s.quotient_dim, s.stratum_dim - s.orbit_dim);
            if s.contact_on_stratum {
                prop_assert_eq!(s.quotient_dim % 2, 1);
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        let patterns = realizable_zero_patterns(scn.weights().unwrap(), &mq);
        for s in &strata {
            prop_assert!(patterns.contains(&s.isotropy_label.zero_blocks));
        }
    }

    #[test]
    fn free_quotients_have_odd_dimension(
        mu in prop::sample::select(vec![(2i64, 1i64), (3, -1), (4, 1), (5, 2)]),
        seed in 0u64..1000,
    ) {
        let scn = load_scenario("S5-T2", &Catalog::builtin()).unwrap();
        let m = scn.mu(&[qi(mu.0), qi(mu.1)]).unwrap();
        let set = sample_level_ray(&scn, &m, 30, seed).unwrap();
        prop_assume!(!set.is_empty());
        let qd = quotient_dimension(&scn, &m, Some(&set)).unwrap();
        prop_assert_eq!(qd.quotient_dim, qd.level_ray_dim - qd.orbit_dim);
        prop_assert_eq!(qd.quotient_dim, 3);
    }
}
