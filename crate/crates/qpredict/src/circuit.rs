//! Primitive transformations on the ancilla register.
//!
//! All four transforms act on the ancilla index with the main index fixed, so
//! with main-major amplitude storage each one is a per-row operation over
//! contiguous rows. The same row kernels run both on computational-basis
//! composites and on eigen-major coefficient arrays (`crate::predictor` uses
//! the latter).
//!
//! Sign convention: the forward Fourier transform on the ancilla carries the
//! kernel exp(-2 pi i s l / M), so a component rotating as exp(2 pi i w s)
//! peaks at l ~ w * M.

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{FrequencyBits, SpectralUnitary};
use crate::state::StateVector;

/// Per-ancilla-value rotation angles, total on the ancilla range.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRule {
    angles: Vec<f64>,
}

impl PhaseRule {
    pub fn new(angles: Vec<f64>) -> Self {
        PhaseRule { angles }
    }

    pub fn from_fn(anc_dim: usize, f: impl Fn(usize) -> f64) -> Self {
        PhaseRule {
            angles: (0..anc_dim).map(f).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
}

/// Counts conditional applications of the primary operator, the one resource
/// the algorithms are charged for.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CostCounter {
    u_cond: u64,
    branch_weighted: u64,
}

impl CostCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Charge one conditional-powers pass over an ancilla of dimension `m`:
    /// the longest branch costs m - 1 sequential applications. The weighted
    /// total over all branches is kept as a secondary statistic.
    pub fn record_u_seq(&mut self, m: usize) {
        let m = m as u64;
        self.u_cond += m - 1;
        self.branch_weighted += m * (m - 1) / 2;
    }

    pub fn u_cond_applications(&self) -> u64 {
        self.u_cond
    }

    pub fn branch_weighted_total(&self) -> u64 {
        self.branch_weighted
    }
}

// ---- row kernels -----------------------------------------------------------

/// In-place Walsh-Hadamard transform of every length-`anc_dim` row.
pub(crate) fn wh_rows(amps: &mut [Complex64], anc_dim: usize) {
    debug_assert!(anc_dim.is_power_of_two());
    let norm = 1.0 / (anc_dim as f64).sqrt();
    crate::par::for_each_row(amps, anc_dim, |_, row| {
        let mut h = 1;
        while h < anc_dim {
            let mut i = 0;
            while i < anc_dim {
                for j in i..i + h {
                    let x = row[j];
                    let y = row[j + h];
                    row[j] = x + y;
                    row[j + h] = x - y;
                }
                i += 2 * h;
            }
            h *= 2;
        }
        for z in row.iter_mut() {
            *z *= norm;
        }
    });
}

/// In-place Fourier transform of every row; forward kernel exp(-2 pi i sl/M).
pub(crate) fn qft_rows(amps: &mut [Complex64], anc_dim: usize, inverse: bool) {
    let direction = if inverse {
        FftDirection::Inverse
    } else {
        FftDirection::Forward
    };
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft(anc_dim, direction);
    let norm = 1.0 / (anc_dim as f64).sqrt();

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        amps.par_chunks_mut(anc_dim).for_each_init(
            || vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()],
            |scratch, row| {
                fft.process_with_scratch(row, scratch);
                for z in row.iter_mut() {
                    *z *= norm;
                }
            },
        );
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for row in amps.chunks_mut(anc_dim) {
            fft.process_with_scratch(row, &mut scratch);
            for z in row.iter_mut() {
                *z *= norm;
            }
        }
    }
}

/// Multiply column l of every row by exp(i * angles[l]).
pub(crate) fn rotate_rows(amps: &mut [Complex64], anc_dim: usize, angles: &[f64]) {
    debug_assert_eq!(angles.len(), anc_dim);
    let phases: Vec<Complex64> = angles
        .iter()
        .map(|&a| Complex64::from_polar(1.0, a))
        .collect();
    crate::par::for_each_row(amps, anc_dim, |_, row| {
        for (z, &p) in row.iter_mut().zip(&phases) {
            *z *= p;
        }
    });
}

/// Conditional-power phases in the eigenbasis: row k, column a gains
/// exp(2 pi i * freq[k] * a * sign).
pub(crate) fn cond_power_phases_rows(
    amps: &mut [Complex64],
    anc_dim: usize,
    freqs: &[f64],
    sign: f64,
) {
    crate::par::for_each_row(amps, anc_dim, |k, row| {
        let step = Complex64::from_polar(1.0, std::f64::consts::TAU * freqs[k] * sign);
        let mut phase = Complex64::new(1.0, 0.0);
        for z in row.iter_mut() {
            *z *= phase;
            phase *= step;
        }
    });
}

// ---- public operations on composite statevectors ---------------------------

/// Walsh-Hadamard transform on the ancilla register. Self-inverse.
pub fn walsh_hadamard_ancilla(s: &StateVector) -> StateVector {
    let mut out = s.clone();
    let anc_dim = s.layout().anc_dim();
    wh_rows(out.amps_mut(), anc_dim);
    out
}

/// Fourier transform on the ancilla register.
pub fn qft_ancilla(s: &StateVector, inverse: bool) -> StateVector {
    let mut out = s.clone();
    let anc_dim = s.layout().anc_dim();
    qft_rows(out.amps_mut(), anc_dim, inverse);
    out
}

/// Conditional sequential powers: component (psi, a) becomes (U^{+-a} psi, a).
pub fn u_seq(
    s: &StateVector,
    u: &SpectralUnitary,
    inverse: bool,
    counter: &mut CostCounter,
) -> Result<StateVector> {
    if s.layout().n() != u.n() {
        return Err(Error::LayoutMismatch(format!(
            "state main register n={} but operator n={}",
            s.layout().n(),
            u.n()
        )));
    }
    let anc_dim = s.layout().anc_dim();
    let mut coeffs = u.project_composite(s.amps(), anc_dim);
    cond_power_phases_rows(
        &mut coeffs,
        anc_dim,
        u.frequencies(),
        if inverse { -1.0 } else { 1.0 },
    );
    let amps = u.expand_composite(&coeffs, anc_dim);
    counter.record_u_seq(anc_dim);
    StateVector::new(s.layout(), amps)
}

/// Diagonal rotation by an ancilla-indexed phase rule.
pub fn rotate_by_ancilla(s: &StateVector, rule: &PhaseRule) -> Result<StateVector> {
    let anc_dim = s.layout().anc_dim();
    if rule.len() != anc_dim {
        return Err(Error::Argument(format!(
            "phase rule covers {} ancilla values, register has {}",
            rule.len(),
            anc_dim
        )));
    }
    let mut out = s.clone();
    rotate_rows(out.amps_mut(), anc_dim, rule.angles());
    Ok(out)
}

/// Geometric-sum kernel H = sum_{s<M} exp(2 pi i s (omega - (0.l))), in closed
/// form away from resonance. At resonance (denominator below 1e-12) the sum
/// is returned directly; it equals M when the offset is an exact integer.
pub fn kernel_h(omega: f64, l: FrequencyBits) -> Complex64 {
    let m = l.modulus();
    let delta = omega - l.as_real();
    let tau = std::f64::consts::TAU;
    let denom = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, tau * delta);
    if denom.norm() < 1e-12 {
        let mut acc = Complex64::new(0.0, 0.0);
        for s in 0..m {
            acc += Complex64::from_polar(1.0, tau * s as f64 * delta);
        }
        return acc;
    }
    (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, tau * m as f64 * delta)) / denom
}
