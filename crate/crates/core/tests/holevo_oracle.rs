//! Closed-form Holevo information against the covariance-matrix cloner network.

use thzqkd_core::gaussian::{holevo_oracle, holevo_oracle_with, EveEntropyModel};
use thzqkd_core::keyrate::holevo_bound;

const TS: [f64; 7] = [1e-6, 1e-4, 1e-2, 0.1, 0.5, 0.9, 1.0];
const VAS: [f64; 3] = [2.0, 10.0, 1000.0];

#[test]
fn closed_form_matches_joint_oracle_without_excess_noise() {
    for t in TS {
        for va in VAS {
            let closed = holevo_bound(t, va, 1.0).unwrap();
            let oracle = holevo_oracle(t, va, 1.0).unwrap();
            assert!(
                (closed - oracle).abs() <= 1e-9,
                "T={t} Va={va}: {closed} vs {oracle}"
            );
        }
    }
}

#[test]
fn closed_form_is_sum_of_single_mode_entropies() {
    for t in TS {
        for va in VAS {
            for w in [1.0, 1.5, 3.0] {
                let closed = holevo_bound(t, va, w).unwrap();
                let marginal =
                    holevo_oracle_with(EveEntropyModel::SingleModeMarginals, t, va, w).unwrap();
                assert!(
                    (closed - marginal).abs() <= 1e-9,
                    "T={t} Va={va} W={w}: {closed} vs {marginal}"
                );
            }
        }
    }
}

#[test]
fn joint_and_marginal_models_split_when_eve_is_noisy() {
    // e and E′ are correlated once W > 1, so the joint entropy is smaller
    // than the sum of marginals for both Eve's total and conditional state.
    let joint = holevo_oracle(0.5, 10.0, 3.0).unwrap();
    let marginal =
        holevo_oracle_with(EveEntropyModel::SingleModeMarginals, 0.5, 10.0, 3.0).unwrap();
    assert!((joint - marginal).abs() > 0.1, "{joint} vs {marginal}");
}

#[test]
fn oracle_is_non_negative() {
    for t in TS {
        for va in VAS {
            for w in [1.0, 1.5, 3.0] {
                assert!(holevo_oracle(t, va, w).unwrap() >= -1e-9);
            }
        }
    }
}
