//! Property-based invariants: norm preservation, kernel bounds, tail bounds,
//! and enhancer consistency over randomized inputs.

use num_complex::Complex64;
use proptest::prelude::*;
use qpredict::circuit::{kernel_h, qft_ancilla, u_seq, walsh_hadamard_ancilla, CostCounter};
use qpredict::spectral::{wraparound_distance, FrequencyBits, SpectralUnitary, SpectrumSpec};
use qpredict::state::{MainState, StateVector};
use qpredict::wizard::{classify_type, simulate_wizard};
use qpredict::EnhancerTable;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_matches_direct_sum(omega in 0.0..1.0f64, l in 0u64..64, width in 1u32..=6) {
        let l = l % (1 << width);
        let bits = FrequencyBits::new(l, width).unwrap();
        let m = 1u64 << width;
        let closed = kernel_h(omega, bits);
        let delta = omega - bits.as_real();
        let mut direct = Complex64::new(0.0, 0.0);
        for s in 0..m {
            direct += Complex64::from_polar(1.0, std::f64::consts::TAU * s as f64 * delta);
        }
        prop_assert!((closed - direct).norm() < 1e-9);
        prop_assert!(closed.norm() <= m as f64 + 1e-9);
    }

    #[test]
    fn transforms_preserve_norm(seed in 0u64..1000, p in 1u32..=4) {
        let u = SpectralUnitary::build(
            &SpectrumSpec::DyadicSparse { n: 4, count: 4, min_gap: 0.05 },
            seed,
        ).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0xabcd);
        let xi = MainState::random(4, &mut rng);
        let s = StateVector::from_main(&xi, p).unwrap();
        let mut counter = CostCounter::new();
        let s = walsh_hadamard_ancilla(&s);
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        let s = u_seq(&s, &u, false, &mut counter).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        let s = qft_ancilla(&s, false);
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        let back = qft_ancilla(&s, true);
        let again = qft_ancilla(&back, false);
        prop_assert!(again.distance(&s).unwrap().vector_distance < 1e-10);
    }

    #[test]
    fn tail_bound_holds_for_random_spectra(seed in 0u64..200, k_window in 1u64..=8) {
        let u = SpectralUnitary::build(
            &SpectrumSpec::DyadicSparse { n: 5, count: 4, min_gap: 0.04 },
            seed,
        ).unwrap();
        let rep = classify_type(&u, 3, k_window, 3, seed).unwrap();
        prop_assert!(rep.tail_mass <= 1.0 / k_window as f64 + 1e-9);
        prop_assert!((rep.in_window_mass + rep.tail_mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn estimator_output_normalized(seed in 0u64..200) {
        let u = SpectralUnitary::build(
            &SpectrumSpec::DyadicSparse { n: 5, count: 5, min_gap: 0.03 },
            seed,
        ).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(!seed);
        let xi = MainState::random(5, &mut rng);
        let mut counter = CostCounter::new();
        let out = simulate_wizard(&xi, &u, 3, &mut counter).unwrap();
        let total: f64 = out.eigen_distribution().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        prop_assert_eq!(counter.u_cond_applications(), 7);
    }

    #[test]
    fn enhancer_consistency(seed in 0u64..200) {
        let u = SpectralUnitary::build(
            &SpectrumSpec::DyadicSparse { n: 8, count: 5, min_gap: 0.09 },
            seed,
        ).unwrap();
        let h = EnhancerTable::build(&u, 5, 8).unwrap();
        for &w in &u.distinct_frequencies() {
            let cell = FrequencyBits::truncate(w, 5).value();
            prop_assert_eq!(h.lookup(cell), FrequencyBits::truncate(w, 8).value());
        }
        for l in 0..32u64 {
            prop_assert!(h.delta_star(l).abs() < 1.0);
        }
    }

    #[test]
    fn wraparound_distance_is_a_metric_on_the_circle(a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64) {
        let dab = wraparound_distance(a, b);
        prop_assert!(dab >= 0.0 && dab <= 0.5 + 1e-12);
        prop_assert!((dab - wraparound_distance(b, a)).abs() < 1e-12);
        prop_assert!(dab <= wraparound_distance(a, c) + wraparound_distance(c, b) + 1e-12);
    }
}
