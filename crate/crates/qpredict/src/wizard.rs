//! Frequency-estimation ("wizard") stage.
//!
//! The idealized wizard XORs the p-bit expansion of an eigenfrequency into the
//! ancilla, conditioned on the matching eigenvector. The simulated version
//! realizes it with three register transforms — Walsh-Hadamard, conditional
//! sequential powers of U, Fourier — and is exact precisely when every
//! frequency is p-bit. Away from exactness the ancilla amplitude on row k is
//! x_k * H(omega_k - l/M) / M with H the geometric-sum kernel, which is what
//! every bound in this module is measured against.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::circuit::{cond_power_phases_rows, qft_rows, CostCounter};
use crate::error::{Error, Result};
use crate::spectral::{wraparound_distance, FrequencyBits, SpectralUnitary};
use crate::state::{MainState, RegisterLayout, StateVector};

/// Composite output of a wizard run plus its eigenbasis coefficient table.
#[derive(Debug, Clone)]
pub struct WizardOutput {
    state: StateVector,
    /// Coefficients on (eigenvector k, ancilla l), row-major in k.
    eigen_amps: Vec<Complex64>,
    p: u32,
}

impl WizardOutput {
    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn eigen_amp(&self, k: usize, l: usize) -> Complex64 {
        self.eigen_amps[k * (1usize << self.p) + l]
    }

    pub fn eigen_amps(&self) -> &[Complex64] {
        &self.eigen_amps
    }

    /// Squared magnitudes on (k, l); sums to 1 for normalized input.
    pub fn eigen_distribution(&self) -> Vec<f64> {
        self.eigen_amps.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Tail-mass report for the type classification: mass outside the
/// wraparound window of half-width `epsilon` around the true frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailReport {
    pub epsilon: f64,
    pub in_window_mass: f64,
    pub tail_mass: f64,
    pub k_window: u64,
}

// ---- eigen-row pipeline ----------------------------------------------------

/// Run the estimator entirely in eigen coordinates: start from x tensor |0>,
/// apply WH (uniform row fill), conditional power phases, then the ancilla
/// Fourier transform. `reversed` flips both the power direction and the
/// transform direction.
fn wizard_eigen_rows(x: &[Complex64], freqs: &[f64], m: usize, reversed: bool) -> Vec<Complex64> {
    let norm = 1.0 / (m as f64).sqrt();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); x.len() * m];
    crate::par::for_each_row(&mut coeffs, m, |k, row| {
        let v = x[k] * norm;
        for z in row.iter_mut() {
            *z = v;
        }
    });
    cond_power_phases_rows(&mut coeffs, m, freqs, if reversed { -1.0 } else { 1.0 });
    qft_rows(&mut coeffs, m, reversed);
    coeffs
}

fn run_wizard(
    xi: &MainState,
    u: &SpectralUnitary,
    p: u32,
    reversed: bool,
    counter: &mut CostCounter,
) -> Result<WizardOutput> {
    if xi.n() != u.n() {
        return Err(Error::LayoutMismatch(format!(
            "state n={} but operator n={}",
            xi.n(),
            u.n()
        )));
    }
    let layout = RegisterLayout::new(u.n(), p)?;
    let m = layout.anc_dim();
    let x = u.to_eigen(xi);
    let coeffs = wizard_eigen_rows(&x, u.frequencies(), m, reversed);
    counter.record_u_seq(m);
    let amps = u.expand_composite(&coeffs, m);
    Ok(WizardOutput {
        state: StateVector::new(layout, amps)?,
        eigen_amps: coeffs,
        p,
    })
}

/// Estimator applied to a main-register state with zero ancilla.
pub fn simulate_wizard(
    xi: &MainState,
    u: &SpectralUnitary,
    p: u32,
    counter: &mut CostCounter,
) -> Result<WizardOutput> {
    run_wizard(xi, u, p, false, counter)
}

/// Reversed-sequence estimator: inverse powers, inverse Fourier transform.
pub fn simulate_wizard_reversed(
    xi: &MainState,
    u: &SpectralUnitary,
    p: u32,
    counter: &mut CostCounter,
) -> Result<WizardOutput> {
    run_wizard(xi, u, p, true, counter)
}

/// Idealized reference action: in the eigenbasis, XOR the p-bit truncation of
/// each frequency into the ancilla. Uses exact spectral knowledge and is not
/// charged to the cost counter.
pub fn exact_wizard(s: &StateVector, u: &SpectralUnitary, p: u32) -> Result<StateVector> {
    if s.layout().anc() != p {
        return Err(Error::Argument(format!(
            "ancilla width {} does not match requested p={}",
            s.layout().anc(),
            p
        )));
    }
    if s.layout().n() != u.n() {
        return Err(Error::LayoutMismatch(format!(
            "state n={} but operator n={}",
            s.layout().n(),
            u.n()
        )));
    }
    let m = s.layout().anc_dim();
    let mut coeffs = u.project_composite(s.amps(), m);
    crate::par::for_each_row(&mut coeffs, m, |k, row| {
        let eps = FrequencyBits::truncate(u.frequencies()[k], p).value() as usize;
        // b -> b ^ eps is an involution; swap each pair once.
        for b in 0..m {
            let b2 = b ^ eps;
            if b < b2 {
                row.swap(b, b2);
            }
        }
    });
    let amps = u.expand_composite(&coeffs, m);
    StateVector::new(s.layout(), amps)
}

/// Exact tail mass of one eigen-coefficient table outside the window of
/// half-width `eps` (wraparound) around each row's true frequency.
fn tail_mass(coeffs: &[Complex64], freqs: &[f64], m: usize, eps: f64) -> f64 {
    let mut tail = 0.0;
    for (k, row) in coeffs.chunks(m).enumerate() {
        for (l, z) in row.iter().enumerate() {
            let d = wraparound_distance(l as f64 / m as f64, freqs[k]);
            if d > eps {
                tail += z.norm_sqr();
            }
        }
    }
    tail
}

/// Classify the estimator by its worst observed tail mass outside the window
/// of half-width K/M, over `trial_states` seeded random inputs plus every
/// eigenvector input (the extreme points, since tail mass is linear in
/// |x_k|^2). The guaranteed bound is 1/K for every input state.
pub fn classify_type(
    u: &SpectralUnitary,
    p: u32,
    k_window: u64,
    trial_states: usize,
    seed: u64,
) -> Result<TailReport> {
    let m = 1usize << p;
    if k_window < 1 || k_window > m as u64 {
        return Err(Error::Argument(format!(
            "window parameter K={k_window} outside 1..={m}"
        )));
    }
    let eps = k_window as f64 / m as f64;
    let n_dim = u.dim();
    let mut worst = 0.0f64;

    // Eigenvector inputs, directly in eigen coordinates.
    for k in 0..n_dim {
        let mut x = vec![Complex64::new(0.0, 0.0); n_dim];
        x[k] = Complex64::new(1.0, 0.0);
        let coeffs = wizard_eigen_rows(&x, u.frequencies(), m, false);
        worst = worst.max(tail_mass(&coeffs, u.frequencies(), m, eps));
    }

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for _ in 0..trial_states {
        let xi = MainState::random(u.n(), &mut rng);
        let x = u.to_eigen(&xi);
        let coeffs = wizard_eigen_rows(&x, u.frequencies(), m, false);
        worst = worst.max(tail_mass(&coeffs, u.frequencies(), m, eps));
    }

    Ok(TailReport {
        epsilon: eps,
        in_window_mass: 1.0 - worst,
        tail_mass: worst,
        k_window,
    })
}

/// Distance between the forward estimator output and the phase-corrected
/// reversed output: each reversed coefficient y'_{k,l} is multiplied by
/// exp(2 pi i (M-1) d_{k,l}) with d_{k,l} the gap between the n-bit truncated
/// frequency and (0.l)_p. For n-bit-exact spectra the distance is below
/// 7 M / N.
pub fn reversed_correction_deviation(xi: &MainState, u: &SpectralUnitary, p: u32) -> Result<f64> {
    let m = 1usize << p;
    let x = u.to_eigen(xi);
    let forward = wizard_eigen_rows(&x, u.frequencies(), m, false);
    let mut reversed = wizard_eigen_rows(&x, u.frequencies(), m, true);

    let n = u.n();
    let tau = std::f64::consts::TAU;
    crate::par::for_each_row(&mut reversed, m, |k, row| {
        let omega_n = FrequencyBits::truncate(u.frequencies()[k], n).as_real();
        for (l, z) in row.iter_mut().enumerate() {
            let d = omega_n - l as f64 / m as f64;
            *z *= Complex64::from_polar(1.0, tau * (m as f64 - 1.0) * d);
        }
    });

    let mut acc = 0.0;
    for (a, b) in forward.iter().zip(&reversed) {
        acc += (a - b).norm_sqr();
    }
    Ok(acc.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{kernel_h, qft_ancilla, u_seq, walsh_hadamard_ancilla};
    use crate::spectral::SpectrumSpec;

    fn diag4() -> SpectralUnitary {
        SpectralUnitary::diagonal(2, vec![0.0, 0.25, 0.5, 0.75]).unwrap()
    }

    #[test]
    fn exact_wizard_writes_truncation() {
        let u = diag4();
        let layout = RegisterLayout::new(2, 2).unwrap();
        // eigenvector with frequency 0.25, zero ancilla -> ancilla 01
        let s = StateVector::basis(layout, 1, 0).unwrap();
        let out = exact_wizard(&s, &u, 2).unwrap();
        let want = StateVector::basis(layout, 1, 1).unwrap();
        assert!(out.distance(&want).unwrap().vector_distance < 1e-12);

        // XOR is self-inverse
        let twice = exact_wizard(&out, &u, 2).unwrap();
        assert!(twice.distance(&s).unwrap().vector_distance < 1e-12);
    }

    #[test]
    fn exact_wizard_linear_on_superpositions() {
        let u = diag4();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex64::new(0.0, 0.0); 16];
        amps[0 * 4 + 0] = Complex64::new(r, 0.0); // (Phi_0, 0)
        amps[1 * 4 + 0] = Complex64::new(r, 0.0); // (Phi_1, 0)
        let s = StateVector::new(RegisterLayout::new(2, 2).unwrap(), amps).unwrap();
        let out = exact_wizard(&s, &u, 2).unwrap();
        let marg = out.ancilla_marginal();
        assert!((marg[0] - 0.5).abs() < 1e-12); // Phi_0 -> ancilla 00
        assert!((marg[1] - 0.5).abs() < 1e-12); // Phi_1 -> ancilla 01
    }

    #[test]
    fn simulated_equals_exact_on_exact_spectra() {
        let u = diag4();
        let mut counter = CostCounter::new();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let xi = MainState::random(2, &mut rng);
        let out = simulate_wizard(&xi, &u, 2, &mut counter).unwrap();
        assert_eq!(counter.u_cond_applications(), 3);

        let ref_out = exact_wizard(&StateVector::from_main(&xi, 2).unwrap(), &u, 2).unwrap();
        assert!(out.state().distance(&ref_out).unwrap().vector_distance < 1e-10);

        // eigenvector input: all mass on (k, truncation)
        let phi = u.from_eigen(&[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        let out = simulate_wizard(&phi, &u, 2, &mut counter).unwrap();
        assert!((out.eigen_amp(1, 1).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn matches_public_transform_route() {
        let u = SpectralUnitary::build(
            &SpectrumSpec::DyadicSparse { n: 5, count: 5, min_gap: 0.04 },
            11,
        )
        .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let xi = MainState::random(5, &mut rng);
        let mut c1 = CostCounter::new();
        let fast = simulate_wizard(&xi, &u, 3, &mut c1).unwrap();

        let mut c2 = CostCounter::new();
        let s = StateVector::from_main(&xi, 3).unwrap();
        let s = walsh_hadamard_ancilla(&s);
        let s = u_seq(&s, &u, false, &mut c2).unwrap();
        let s = qft_ancilla(&s, false);
        assert!(fast.state().distance(&s).unwrap().vector_distance < 1e-10);
        assert_eq!(c1, c2);
    }

    #[test]
    fn coefficients_match_kernel() {
        // y_{k,l} = x_k H(omega_k - l/M) / M for every (k, l)
        let u = SpectralUnitary::build(
            &SpectrumSpec::DyadicSparse { n: 5, count: 6, min_gap: 0.03 },
            21,
        )
        .unwrap();
        // nudge off the dyadic grid so the kernel is nontrivial
        let freqs: Vec<f64> = u
            .frequencies()
            .iter()
            .map(|w| (w + 0.003171) % 1.0)
            .collect();
        let u = SpectralUnitary::diagonal(5, freqs).unwrap();

        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let xi = MainState::random(5, &mut rng);
        let x = u.to_eigen(&xi);
        let mut counter = CostCounter::new();
        let out = simulate_wizard(&xi, &u, 3, &mut counter).unwrap();

        let m = 8u64;
        for k in 0..32 {
            for l in 0..8u64 {
                let h = kernel_h(u.frequencies()[k], FrequencyBits::new(l, 3).unwrap());
                let want = x[k] * h / m as f64;
                assert!(
                    (out.eigen_amp(k, l as usize) - want).norm() < 1e-9,
                    "k={k} l={l}"
                );
            }
        }
        let total: f64 = out.eigen_distribution().iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn classify_exact_spectrum_zero_tail() {
        let u = diag4();
        let rep = classify_type(&u, 2, 1, 5, 9).unwrap();
        assert!(rep.tail_mass < 1e-10);
        assert!((rep.in_window_mass + rep.tail_mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn classify_tail_bound_small() {
        let u = SpectralUnitary::build(
            &SpectrumSpec::DyadicSparse { n: 6, count: 6, min_gap: 0.02 },
            31,
        )
        .unwrap();
        let freqs: Vec<f64> = u
            .frequencies()
            .iter()
            .map(|w| (w + 0.0041) % 1.0)
            .collect();
        let u = SpectralUnitary::from_parts(6, freqs, crate::linalg::CMatrix::identity(64)).unwrap();
        for k_window in [2u64, 4, 8] {
            let rep = classify_type(&u, 4, k_window, 10, 17).unwrap();
            assert!(
                rep.tail_mass <= 1.0 / k_window as f64 + 1e-9,
                "K={k_window}: tail {}",
                rep.tail_mass
            );
        }
        // K = M: window covers everything except the far side; bound 1/M
        let rep = classify_type(&u, 4, 16, 10, 17).unwrap();
        assert!(rep.tail_mass <= 1.0 / 16.0 + 1e-9);
    }

    #[test]
    fn reversed_exact_eigenvector() {
        let u = diag4();
        let phi = u.from_eigen(&[
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ]);
        let mut counter = CostCounter::new();
        let out = simulate_wizard_reversed(&phi, &u, 2, &mut counter).unwrap();
        // frequency 0.75 -> l = 3, same magnitude as forward
        assert!((out.eigen_amp(3, 3).norm() - 1.0).abs() < 1e-10);
        assert!((out.state().norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reversed_correction_bound_small() {
        // n-bit-exact spectrum, M/N = 16/256
        let u = SpectralUnitary::build(
            &SpectrumSpec::DyadicSparse { n: 8, count: 8, min_gap: 0.02 },
            41,
        )
        .unwrap();
        assert!(u.is_bit_exact(8));
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..5 {
            let xi = MainState::random(8, &mut rng);
            let dev = reversed_correction_deviation(&xi, &u, 4).unwrap();
            assert!(dev < 7.0 * 16.0 / 256.0, "deviation {dev}");
        }
    }

    #[test]
    fn classify_rejects_bad_window() {
        let u = diag4();
        assert!(classify_type(&u, 2, 0, 1, 1).is_err());
        assert!(classify_type(&u, 2, 5, 1, 1).is_err());
    }
}
