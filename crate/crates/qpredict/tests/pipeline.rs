//! End-to-end exercises of the public API at moderate sizes: estimator into
//! enhancer into prediction, restoration, and the speedup accounting.

use qpredict::circuit::CostCounter;
use qpredict::predictor::{
    derive_params, operator_norm_check, predict_general, predict_general_report, restore_history,
    speedup_summary,
};
use qpredict::spectral::{SpectralUnitary, SpectrumSpec};
use qpredict::state::MainState;
use qpredict::wizard::{classify_type, simulate_wizard};
use qpredict::EnhancerTable;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

#[test]
fn estimate_then_predict_then_restore() {
    // one spectrum drives the whole chain: classification, enhancer build,
    // forward prediction, backward restoration, speedup summary
    let n = 8u32;
    let u = SpectralUnitary::build(
        &SpectrumSpec::DyadicSparse {
            n,
            count: 6,
            min_gap: 0.09,
        },
        2024,
    )
    .unwrap();

    let params = derive_params(0.5, 3, n).unwrap();
    assert_eq!(params.q, 6);

    // the estimator at width q is well-behaved on this spectrum
    let tails = classify_type(&u, params.q, 4, 20, 5).unwrap();
    assert!(tails.tail_mass <= 0.25 + 1e-9);

    let h = EnhancerTable::build(&u, params.q, n).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(77);
    let mut reports = Vec::new();
    let mut counter = CostCounter::new();
    for _ in 0..5 {
        let xi = MainState::random(n, &mut rng);
        for t in [1i64, params.t_max / 2, params.t_max] {
            let r = predict_general_report(&xi, &u, &params, &h, t, &mut counter).unwrap();
            assert!(r.vector_distance < params.delta, "t={t}");
            assert!(r.fidelity >= 1.0 - params.delta * params.delta / 2.0 - 1e-6);
            reports.push(r);
        }
    }

    // restoration followed by forward evolution returns within delta
    let xi = MainState::random(n, &mut rng);
    let (state, rep) = restore_history(&xi, &u, &params, &h, params.t_max, &mut counter).unwrap();
    assert!(rep.vector_distance < params.delta);
    let (_, cond) = state.project_ancilla_zero().unwrap();
    let back = u.exact_evolution_oracle(&cond, params.t_max).unwrap();
    assert!(back.distance(&xi).unwrap().vector_distance < params.delta + 1e-9);

    let summary = speedup_summary(&reports, 1.0 / 256.0, 1.0 / 8.0, params.rho).unwrap();
    assert_eq!(summary.cost, 2 * (params.l_dim as u64 - 1));
    assert_eq!(summary.measured_horizon, params.t_max as u64);
    assert!(summary.theoretical_speedup > 0.0);
}

#[test]
fn operator_norm_dominates_states() {
    let u = SpectralUnitary::build(
        &SpectrumSpec::DyadicSparse {
            n: 7,
            count: 5,
            min_gap: 0.1,
        },
        9,
    )
    .unwrap();
    let params = derive_params(0.5, 3, 7).unwrap();
    let h = EnhancerTable::build(&u, params.q, 7).unwrap();
    let t = params.t_max;
    let norm = operator_norm_check(&u, &params, &h, t).unwrap();
    assert!(norm < params.delta, "norm {norm}");

    let mut rng = ChaCha12Rng::seed_from_u64(3);
    for _ in 0..5 {
        let xi = MainState::random(7, &mut rng);
        let mut counter = CostCounter::new();
        let r = predict_general_report(&xi, &u, &params, &h, t, &mut counter).unwrap();
        assert!(norm >= r.vector_distance - 1e-9);
    }
}

#[test]
fn estimator_distribution_is_normalized_and_peaked() {
    let u = SpectralUnitary::build(
        &SpectrumSpec::DyadicSparse {
            n: 7,
            count: 4,
            min_gap: 0.12,
        },
        44,
    )
    .unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(8);
    let xi = MainState::random(7, &mut rng);
    let mut counter = CostCounter::new();
    let out = simulate_wizard(&xi, &u, 5, &mut counter).unwrap();
    let dist = out.eigen_distribution();
    let total: f64 = dist.iter().sum();
    assert!((total - 1.0).abs() < 1e-10);

    // most mass within one cell of each row's true frequency
    let m = 32usize;
    let mut near = 0.0;
    for (k, &w) in u.frequencies().iter().enumerate() {
        for l in 0..m {
            let d = (l as f64 / m as f64 - w).rem_euclid(1.0);
            let d = d.min(1.0 - d);
            if d <= 1.0 / m as f64 {
                near += dist[k * m + l];
            }
        }
    }
    assert!(near > 0.8, "near-mass {near}");
}

#[test]
fn composite_state_route_matches_report_route() {
    let u = SpectralUnitary::build(
        &SpectrumSpec::DyadicSparse {
            n: 6,
            count: 4,
            min_gap: 0.1,
        },
        15,
    )
    .unwrap();
    let params = derive_params(0.9, 3, 6).unwrap();
    let h = EnhancerTable::build(&u, params.q, 6).unwrap();
    let mut rng = ChaCha12Rng::seed_from_u64(6);
    let xi = MainState::random(6, &mut rng);
    let mut c1 = CostCounter::new();
    let mut c2 = CostCounter::new();
    let (_, full) = predict_general(&xi, &u, &params, &h, params.t_max, &mut c1).unwrap();
    let light = predict_general_report(&xi, &u, &params, &h, params.t_max, &mut c2).unwrap();
    assert_eq!(c1, c2);
    assert!((full.vector_distance - light.vector_distance).abs() < 1e-12);
    assert!((full.ancilla_zero_probability - light.ancilla_zero_probability).abs() < 1e-12);
}
