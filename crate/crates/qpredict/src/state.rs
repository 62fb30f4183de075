//! Complex statevectors over a composite main/ancilla register.
//!
//! Amplitudes are stored dense and main-major: the joint index of main index
//! `m` and ancilla index `a` is `m * anc_dim + a`, so each main index owns one
//! contiguous ancilla row.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;

/// Default tolerance for state equality checks.
pub const STATE_TOL: f64 = 1e-10;
/// Default tolerance for bound checks.
pub const BOUND_TOL: f64 = 1e-8;
/// Below this ancilla-zero probability a projection is considered degenerate.
pub const PROJECTION_EPS: f64 = 1e-14;

/// Qubit layout of a composite register: `n` main qubits plus `anc` ancilla
/// qubits (p or q wide depending on context).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    n: u32,
    anc: u32,
}

impl RegisterLayout {
    /// The ancilla may be wider than the main register: small systems with
    /// finely resolved spectra need it.
    pub fn new(n: u32, anc: u32) -> Result<Self> {
        if n == 0 || anc == 0 {
            return Err(Error::Argument(format!(
                "register widths must be positive, got n={n}, anc={anc}"
            )));
        }
        if n + anc > 28 {
            return Err(Error::Capacity(format!(
                "n + anc = {} qubits exceeds the dense-amplitude limit",
                n + anc
            )));
        }
        Ok(RegisterLayout { n, anc })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn anc(&self) -> u32 {
        self.anc
    }

    pub fn main_dim(&self) -> usize {
        1usize << self.n
    }

    pub fn anc_dim(&self) -> usize {
        1usize << self.anc
    }

    pub fn total_dim(&self) -> usize {
        self.main_dim() * self.anc_dim()
    }
}

/// A pure state of the main register alone.
#[derive(Debug, Clone, PartialEq)]
pub struct MainState {
    n: u32,
    amps: Vec<Complex64>,
}

impl MainState {
    pub fn new(n: u32, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << n {
            return Err(Error::Argument(format!(
                "expected {} amplitudes for n={n}, got {}",
                1usize << n,
                amps.len()
            )));
        }
        Ok(MainState { n, amps })
    }

    pub fn basis(n: u32, m: usize) -> Result<Self> {
        let dim = 1usize << n;
        if m >= dim {
            return Err(Error::Argument(format!("basis index {m} out of range for n={n}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[m] = Complex64::new(1.0, 0.0);
        Ok(MainState { n, amps })
    }

    /// Seeded random state, uniform on the unit sphere.
    pub fn random<R: Rng>(n: u32, rng: &mut R) -> Self {
        let dim = 1usize << n;
        let mut amps: Vec<Complex64> = (0..dim)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            })
            .collect();
        let nrm = linalg::norm_sqr(&amps).sqrt();
        linalg::scale(&mut amps, 1.0 / nrm);
        MainState { n, amps }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        linalg::norm_sqr(&self.amps)
    }

    pub fn distance(&self, other: &MainState) -> Result<Distances> {
        if self.n != other.n {
            return Err(Error::LayoutMismatch(format!(
                "main register widths differ: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(pair_distances(&self.amps, &other.amps))
    }
}

/// Composite main (x) ancilla statevector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(Error::Argument(format!(
                "expected {} amplitudes, got {}",
                layout.total_dim(),
                amps.len()
            )));
        }
        Ok(StateVector { layout, amps })
    }

    /// Basis state |m, a>.
    pub fn basis(layout: RegisterLayout, m: usize, a: usize) -> Result<Self> {
        if m >= layout.main_dim() || a >= layout.anc_dim() {
            return Err(Error::Argument(format!(
                "basis index (m={m}, a={a}) out of range for layout n={}, anc={}",
                layout.n(),
                layout.anc()
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.total_dim()];
        amps[m * layout.anc_dim() + a] = Complex64::new(1.0, 0.0);
        Ok(StateVector { layout, amps })
    }

    /// Tensor a main-register state with a zeroed ancilla of width `anc`.
    pub fn from_main(main: &MainState, anc: u32) -> Result<Self> {
        let layout = RegisterLayout::new(main.n(), anc)?;
        let anc_dim = layout.anc_dim();
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.total_dim()];
        for (m, &x) in main.amps().iter().enumerate() {
            amps[m * anc_dim] = x;
        }
        Ok(StateVector { layout, amps })
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn amp(&self, m: usize, a: usize) -> Complex64 {
        self.amps[m * self.layout.anc_dim() + a]
    }

    pub fn norm_sqr(&self) -> f64 {
        linalg::norm_sqr(&self.amps)
    }

    pub fn distance(&self, other: &StateVector) -> Result<Distances> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch(format!(
                "layouts differ: ({}, {}) vs ({}, {})",
                self.layout.n(),
                self.layout.anc(),
                other.layout.n(),
                other.layout.anc()
            )));
        }
        Ok(pair_distances(&self.amps, &other.amps))
    }

    /// Probability of each ancilla value (exact marginal).
    pub fn ancilla_marginal(&self) -> Vec<f64> {
        let anc_dim = self.layout.anc_dim();
        let mut probs = vec![0.0f64; anc_dim];
        for row in self.amps.chunks(anc_dim) {
            for (p, z) in probs.iter_mut().zip(row) {
                *p += z.norm_sqr();
            }
        }
        probs
    }

    /// Probability of observing the ancilla in |0>, and the renormalized main
    /// state conditioned on that outcome.
    pub fn project_ancilla_zero(&self) -> Result<(f64, MainState)> {
        let anc_dim = self.layout.anc_dim();
        let slice: Vec<Complex64> = self
            .amps
            .chunks(anc_dim)
            .map(|row| row[0])
            .collect();
        let prob = linalg::norm_sqr(&slice);
        if prob < PROJECTION_EPS {
            return Err(Error::DegenerateProjection { prob });
        }
        let mut amps = slice;
        linalg::scale(&mut amps, 1.0 / prob.sqrt());
        Ok((prob, MainState::new(self.layout.n(), amps)?))
    }
}

/// Pairwise comparison of two states with identical layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distances {
    /// Euclidean 2-norm of the amplitude difference, in [0, 2].
    pub vector_distance: f64,
    /// Squared magnitude of the inner product, in [0, 1].
    pub fidelity: f64,
}

fn pair_distances(a: &[Complex64], b: &[Complex64]) -> Distances {
    let mut diff = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        diff += (x - y).norm_sqr();
    }
    let f = linalg::dot(a, b).norm_sqr();
    Distances {
        vector_distance: diff.sqrt(),
        fidelity: f.min(1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::f64::consts::PI;

    #[test]
    fn basis_state_placement() {
        let l = RegisterLayout::new(2, 1).unwrap();
        let s = StateVector::basis(l, 0, 0).unwrap();
        assert_eq!(s.amps()[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.norm_sqr(), 1.0);

        let l = RegisterLayout::new(1, 1).unwrap();
        let s = StateVector::basis(l, 1, 1).unwrap();
        assert_eq!(s.amps()[3], Complex64::new(1.0, 0.0));

        assert!(matches!(
            StateVector::basis(l, 2, 0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn distances_on_simple_pairs() {
        let l = RegisterLayout::new(2, 1).unwrap();
        let a = StateVector::basis(l, 0, 0).unwrap();
        let d = a.distance(&a).unwrap();
        assert_eq!(d.vector_distance, 0.0);
        assert!((d.fidelity - 1.0).abs() < 1e-15);

        let b = StateVector::basis(l, 1, 0).unwrap();
        let d = a.distance(&b).unwrap();
        assert!((d.vector_distance - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(d.fidelity, 0.0);

        // b = e^{i pi/3} a: distance |1 - e^{i pi/3}| = 1, fidelity 1
        let phase = Complex64::from_polar(1.0, PI / 3.0);
        let c = StateVector::new(l, a.amps().iter().map(|z| z * phase).collect()).unwrap();
        let d = a.distance(&c).unwrap();
        assert!((d.vector_distance - 1.0).abs() < 1e-12);
        assert!((d.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn layout_mismatch_rejected() {
        let a = StateVector::basis(RegisterLayout::new(2, 1).unwrap(), 0, 0).unwrap();
        let b = StateVector::basis(RegisterLayout::new(2, 2).unwrap(), 0, 0).unwrap();
        assert!(matches!(a.distance(&b), Err(Error::LayoutMismatch(_))));
    }

    #[test]
    fn projection_on_product_state() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let psi = MainState::random(3, &mut rng);
        let s = StateVector::from_main(&psi, 2).unwrap();
        let (prob, cond) = s.project_ancilla_zero().unwrap();
        assert!((prob - 1.0).abs() < 1e-12);
        assert!(cond.distance(&psi).unwrap().vector_distance < 1e-12);
    }

    #[test]
    fn projection_on_entangled_state() {
        // (|m=0,a=0> + |m=1,a=1>)/sqrt(2)
        let l = RegisterLayout::new(1, 1).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s = StateVector::new(
            l,
            vec![
                Complex64::new(r, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(r, 0.0),
            ],
        )
        .unwrap();
        let (prob, cond) = s.project_ancilla_zero().unwrap();
        assert!((prob - 0.5).abs() < 1e-12);
        let expect = MainState::basis(1, 0).unwrap();
        assert!(cond.distance(&expect).unwrap().vector_distance < 1e-12);
    }

    #[test]
    fn projection_degenerate() {
        let l = RegisterLayout::new(1, 1).unwrap();
        let s = StateVector::basis(l, 0, 1).unwrap();
        assert!(matches!(
            s.project_ancilla_zero(),
            Err(Error::DegenerateProjection { .. })
        ));
    }

    #[test]
    fn marginal_sums_to_one() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let psi = MainState::random(4, &mut rng);
        let s = StateVector::from_main(&psi, 3).unwrap();
        let total: f64 = s.ancilla_marginal().iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
    }
}
