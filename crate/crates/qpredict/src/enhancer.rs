//! Classical accuracy enhancer: a total map h from q-bit frequency estimates
//! to n-bit refinements, built from a known sparse spectrum.
//!
//! In the production path the refinement register is never materialized — h is
//! deterministic, so XOR-in, rotate, XOR-out collapses to a pure phase on each
//! (main, ancilla) component. The materialized round trip is kept as a
//! cross-check that the implicit path is exactly the phase it claims to be.

use num_complex::Complex64;

use crate::circuit::{rotate_rows, PhaseRule};
use crate::error::{Error, Result};
use crate::spectral::{wraparound_distance, FrequencyBits, SpectralUnitary};
use crate::state::StateVector;

/// Total lookup table h: {0,..,2^q - 1} -> {0,..,2^n - 1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnhancerTable {
    q: u32,
    n_out: u32,
    table: Vec<u64>,
}

impl EnhancerTable {
    /// Nearest-frequency builder: h(l) is the n-bit truncation of the
    /// eigenfrequency closest (wraparound) to (0.l)_q, ties toward the lower
    /// frequency. Fails if the spectrum is too dense for the table to refine
    /// every occupied cell consistently.
    pub fn build(u: &SpectralUnitary, q: u32, n_out: u32) -> Result<Self> {
        let t = Self::build_relaxed(u, q, n_out)?;
        t.verify_consistency(u)?;
        Ok(t)
    }

    /// Same construction without the consistency check, for spectra (e.g.
    /// banded ones) where strict refinement is impossible but the nearest
    /// frequency is still the best available guess.
    pub fn build_relaxed(u: &SpectralUnitary, q: u32, n_out: u32) -> Result<Self> {
        if q == 0 || n_out == 0 || q > 24 {
            return Err(Error::Argument(format!(
                "enhancer widths q={q}, n={n_out} out of range"
            )));
        }
        let freqs = u.distinct_frequencies();
        if freqs.is_empty() {
            return Err(Error::Argument("spectrum has no frequencies".into()));
        }
        let cells = 1u64 << q;
        let mut table = Vec::with_capacity(cells as usize);
        for l in 0..cells {
            let cell_value = l as f64 / cells as f64;
            // freqs are ascending, so strict improvement keeps the lower
            // frequency on exact ties
            let mut best = freqs[0];
            let mut best_d = wraparound_distance(cell_value, freqs[0]);
            for &w in &freqs[1..] {
                let d = wraparound_distance(cell_value, w);
                if d < best_d {
                    best_d = d;
                    best = w;
                }
            }
            table.push(FrequencyBits::truncate(best, n_out).value());
        }
        Ok(EnhancerTable { q, n_out, table })
    }

    /// h(l) = l padded with low zero bits; the identity refinement.
    pub fn zero_extension(q: u32, n_out: u32) -> Result<Self> {
        if n_out < q {
            return Err(Error::Argument(format!(
                "zero extension needs n >= q, got q={q}, n={n_out}"
            )));
        }
        let table = (0..1u64 << q).map(|l| l << (n_out - q)).collect();
        Ok(EnhancerTable { q, n_out, table })
    }

    /// Every eigenfrequency must satisfy h(trunc_q(w)) = trunc_n(w).
    fn verify_consistency(&self, u: &SpectralUnitary) -> Result<()> {
        for &w in &u.distinct_frequencies() {
            let cell = FrequencyBits::truncate(w, self.q).value();
            let want = FrequencyBits::truncate(w, self.n_out).value();
            let got = self.table[cell as usize];
            if got != want {
                return Err(Error::SpectrumNotSparse {
                    q: self.q,
                    cell,
                    omega_a: got as f64 / (1u64 << self.n_out) as f64,
                    omega_b: w,
                });
            }
        }
        Ok(())
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n_out(&self) -> u32 {
        self.n_out
    }

    pub fn lookup(&self, l: u64) -> u64 {
        self.table[l as usize]
    }

    /// Refined frequency as a real: (0.h(l))_n.
    pub fn refined(&self, l: u64) -> f64 {
        self.table[l as usize] as f64 / (1u64 << self.n_out) as f64
    }

    /// Truncation correction d*_l = (0.h(l))_n - (0.l)_q, in (-1, 1).
    pub fn delta_star(&self, l: u64) -> f64 {
        self.refined(l) - l as f64 / (1u64 << self.q) as f64
    }

    /// Two-column serialization (l, h(l)).
    pub fn rows(&self) -> Vec<(u64, u64)> {
        self.table
            .iter()
            .enumerate()
            .map(|(l, &h)| (l as u64, h))
            .collect()
    }
}

fn phase_rule(h: &EnhancerTable, t: i64) -> PhaseRule {
    let big_l = (1u64 << h.q()) as f64;
    let tau = std::f64::consts::TAU;
    PhaseRule::from_fn(1usize << h.q(), |l| {
        let l = l as u64;
        tau * (h.refined(l) * t as f64 - (big_l - 1.0) * h.delta_star(l))
    })
}

/// Implicit enhancer pass: amplitude at (m, l) is multiplied by
/// exp(2 pi i (0.h(l))_n t) * exp(-2 pi i (L-1) d*_l).
pub fn apply_enhancer_phases(s: &StateVector, h: &EnhancerTable, t: i64) -> Result<StateVector> {
    if s.layout().anc() != h.q() {
        return Err(Error::LayoutMismatch(format!(
            "ancilla width {} but enhancer input width {}",
            s.layout().anc(),
            h.q()
        )));
    }
    let rule = phase_rule(h, t);
    let mut out = s.clone();
    rotate_rows(out.amps_mut(), s.layout().anc_dim(), rule.angles());
    Ok(out)
}

/// Reference path with an explicit n-qubit refinement register: XOR h in,
/// rotate by the refined frequency and the d* correction, XOR h out, verify
/// the register returns to zero exactly, and discard it.
pub fn materialized_enhancer_roundtrip(
    s: &StateVector,
    h: &EnhancerTable,
    t: i64,
) -> Result<StateVector> {
    if s.layout().anc() != h.q() {
        return Err(Error::LayoutMismatch(format!(
            "ancilla width {} but enhancer input width {}",
            s.layout().anc(),
            h.q()
        )));
    }
    let main_dim = s.layout().main_dim();
    let anc_dim = s.layout().anc_dim();
    let third_dim = 1usize << h.n_out();
    if main_dim * anc_dim * third_dim > (1usize << 24) {
        return Err(Error::Capacity(format!(
            "materialized enhancer register needs {} amplitudes",
            main_dim * anc_dim * third_dim
        )));
    }

    // index (m, l, b), b the refinement register
    let mut amps3 = vec![Complex64::new(0.0, 0.0); main_dim * anc_dim * third_dim];
    for m in 0..main_dim {
        for l in 0..anc_dim {
            amps3[(m * anc_dim + l) * third_dim] = s.amp(m, l);
        }
    }

    let xor_h = |amps3: &mut [Complex64]| {
        for chunk in amps3.chunks_mut(third_dim * anc_dim) {
            for (l, row) in chunk.chunks_mut(third_dim).enumerate() {
                let hv = h.lookup(l as u64) as usize;
                for b in 0..third_dim {
                    let b2 = b ^ hv;
                    if b < b2 {
                        row.swap(b, b2);
                    }
                }
            }
        }
    };

    let tau = std::f64::consts::TAU;
    xor_h(&mut amps3);
    // rotate by the register content: phase 2 pi (0.b)_n t
    for chunk in amps3.chunks_mut(third_dim) {
        for (b, z) in chunk.iter_mut().enumerate() {
            let angle = tau * (b as f64 / third_dim as f64) * t as f64;
            *z *= Complex64::from_polar(1.0, angle);
        }
    }
    // correction rotation indexed by the ancilla
    let big_l = anc_dim as f64;
    for chunk in amps3.chunks_mut(third_dim * anc_dim) {
        for (l, row) in chunk.chunks_mut(third_dim).enumerate() {
            let angle = -tau * (big_l - 1.0) * h.delta_star(l as u64);
            let ph = Complex64::from_polar(1.0, angle);
            for z in row.iter_mut() {
                *z *= ph;
            }
        }
    }
    xor_h(&mut amps3);

    let mut residual = 0.0;
    let mut amps = vec![Complex64::new(0.0, 0.0); main_dim * anc_dim];
    for m in 0..main_dim {
        for l in 0..anc_dim {
            let row = &amps3[(m * anc_dim + l) * third_dim..(m * anc_dim + l + 1) * third_dim];
            amps[m * anc_dim + l] = row[0];
            residual += row[1..].iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
    }
    if residual > 1e-12 {
        return Err(Error::Internal(format!(
            "refinement register retained mass {residual:.3e} after un-computation"
        )));
    }
    StateVector::new(s.layout(), amps)
}
