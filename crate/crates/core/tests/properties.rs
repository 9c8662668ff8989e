//! Property-based invariants over randomized inputs.

use ghyp::analyzer::{fit_and_judge, AnalyzerOptions, Profile, ProfileEntry, ProfileKind};
use ghyp::bundles::{m_xi, BundleSymbol};
use ghyp::dual::{enumerate_dual, DualIndex, GroupId, GroupPoint};
use ghyp::linalg::{hs_norm, lambda_min, lemma_singular_value};
use ghyp::{C64, CMat};
use proptest::prelude::*;

fn complex_entry() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMat> {
    proptest::collection::vec(complex_entry(), rows * cols)
        .prop_map(move |v| CMat::from_vec(rows, cols, v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn lemma_inequality_holds(a in matrix(4, 3), b in matrix(3, 5)) {
        let (lhs, rhs) = lemma_singular_value(&a, &b).unwrap();
        let scale = lhs.max(rhs).max(1.0);
        prop_assert!(lhs >= rhs - 1e-12 * scale);
    }

    #[test]
    fn lambda_min_is_a_lower_bound_on_columns(a in matrix(5, 4)) {
        // each unit basis direction is a competitor in the minimization
        let lam = lambda_min(&a);
        for j in 0..4 {
            let col_norm = (0..5).map(|i| a[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(lam <= col_norm + 1e-12);
        }
    }

    #[test]
    fn torus_phases_compose(x in 0.0f64..6.28, y in 0.0f64..6.28, n in -6i64..=6) {
        let xi = DualIndex::torus(vec![n]);
        let px = GroupPoint::torus(vec![x]).unwrap();
        let py = GroupPoint::torus(vec![y]).unwrap();
        let pxy = px.compose(&py).unwrap();
        let a = ghyp::dual::rep_eval(&xi, &px).unwrap().entries[(0, 0)];
        let b = ghyp::dual::rep_eval(&xi, &py).unwrap().entries[(0, 0)];
        let c = ghyp::dual::rep_eval(&xi, &pxy).unwrap().entries[(0, 0)];
        prop_assert!((a * b - c).norm() < 1e-12);
    }

    #[test]
    fn judging_scale_covariance(alpha in 0.01f64..100.0) {
        let duals = enumerate_dual(GroupId::Su2, 10.0);
        let entries: Vec<ProfileEntry> = duals
            .iter()
            .map(|xi| ProfileEntry {
                eig: xi.eigenvalue(),
                dim: xi.dim(),
                xi: xi.clone(),
                value: xi.eigenvalue().powf(1.3),
            })
            .collect();
        let p = Profile { kind: ProfileKind::Group, entries };
        let scaled = Profile {
            kind: p.kind,
            entries: p
                .entries
                .iter()
                .map(|e| ProfileEntry {
                    xi: e.xi.clone(),
                    eig: e.eig,
                    dim: e.dim,
                    value: alpha * e.value,
                })
                .collect(),
        };
        let r1 = fit_and_judge(&p, &AnalyzerOptions::default()).unwrap();
        let r2 = fit_and_judge(&scaled, &AnalyzerOptions::default()).unwrap();
        prop_assert_eq!(r1.verdict, r2.verdict);
        let (k1, k2) = (r1.fitted_k.unwrap(), r2.fitted_k.unwrap());
        prop_assert!((k1 - k2).abs() <= 1e-9 * k1.abs().max(1.0));
        let (c1, c2) = (r1.fitted_c.unwrap(), r2.fitted_c.unwrap());
        prop_assert!((alpha * c1 - c2).abs() <= 1e-9 * (alpha * c1).abs());
    }

    #[test]
    fn stacked_minimum_is_a_true_lower_bound(
        blocks in proptest::collection::vec(matrix(3, 3), 4),
        coeff in matrix(3, 3),
    ) {
        // d_tau = 2, d_omega = 2 over a fixed spin-1 point
        let xi = DualIndex::su2(2);
        let mut map = std::collections::BTreeMap::new();
        for i in 0..2usize {
            for r in 0..2usize {
                map.insert((i, r, xi.clone()), blocks[2 * i + r].clone());
            }
        }
        let sym = BundleSymbol::from_blocks(GroupId::Su2, 2, 2, "prop", map, None).unwrap();
        let m_val = m_xi(&sym, &xi).unwrap();
        // apply to the pair (coeff, conj(coeff)) as the two fiber components
        let us = [coeff.clone(), coeff.map(|z| z.conj())];
        let mut lhs = 0.0;
        for r in 0..2 {
            let mut acc = CMat::zeros(3, 3);
            for (i, u) in us.iter().enumerate() {
                acc += sym.eval(i, r, &xi).unwrap() * u;
            }
            lhs += hs_norm(&acc).powi(2);
        }
        let rhs = m_val * m_val * us.iter().map(|u| hs_norm(u).powi(2)).sum::<f64>();
        prop_assert!(lhs >= rhs - 1e-10 * lhs.max(rhs).max(1.0));
    }
}
