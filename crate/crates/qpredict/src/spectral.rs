//! Operator models specified by their eigendecomposition.
//!
//! Every algorithm in this crate needs a unitary only through powers U^s and
//! through exact ground-truth evolution, so operators are stored as an
//! orthonormal eigenbasis plus a frequency (eigenphase in [0,1)) per
//! eigenvector, rather than as gate circuits.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::state::MainState;

/// Frequencies closer than this are treated as the same spectral point.
pub const FREQ_TOL: f64 = 1e-9;

/// An integer read as the binary fraction (0.value) over `width` bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyBits {
    value: u64,
    width: u32,
}

impl FrequencyBits {
    pub fn new(value: u64, width: u32) -> Result<Self> {
        if width == 0 || width > 63 {
            return Err(Error::Argument(format!("unsupported bit width {width}")));
        }
        if value >= 1u64 << width {
            return Err(Error::Argument(format!(
                "value {value} does not fit in {width} bits"
            )));
        }
        Ok(FrequencyBits { value, width })
    }

    /// The `width`-bit truncation of a frequency in [0, 1).
    pub fn truncate(omega: f64, width: u32) -> Self {
        let m = 1u64 << width;
        let v = ((omega.rem_euclid(1.0)) * m as f64).floor() as u64;
        FrequencyBits {
            value: v.min(m - 1),
            width,
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn modulus(&self) -> u64 {
        1u64 << self.width
    }

    /// (0.value) as a real number in [0, 1).
    pub fn as_real(&self) -> f64 {
        self.value as f64 / self.modulus() as f64
    }
}

/// Declarative description of a test operator.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSpec {
    /// `count` distinct frequencies, each exactly representable in `n` bits,
    /// pairwise wraparound-separated by at least `min_gap`; eigenvectors from
    /// a seeded random unitary.
    DyadicSparse { n: u32, count: usize, min_gap: f64 },
    /// Bands of width `width` separated by gaps of width `gap`; each strip is
    /// a uniform grid of `points_per_strip` frequencies. Eigenvectors are the
    /// computational basis.
    Strip {
        n: u32,
        strips: usize,
        width: f64,
        gap: f64,
        points_per_strip: usize,
    },
    /// Modular multiplication x -> base * x (mod modulus) on the unit
    /// residues, identity elsewhere.
    Shor { n: u32, base: u64, modulus: u64 },
    /// The search iterate (reflection about the uniform state composed with a
    /// reflection about the marked item), diagonalized numerically.
    Grover { n: u32, marked: usize },
}

enum Basis {
    /// Eigenvectors are the computational basis states.
    Identity,
    Dense(CMatrix),
}

/// Unitary given by an orthonormal eigenbasis and per-eigenvector frequencies.
pub struct SpectralUnitary {
    n: u32,
    freqs: Vec<f64>,
    basis: Basis,
}

impl SpectralUnitary {
    /// Build an operator from a spectrum description. `seed` drives every
    /// random choice; identical inputs give identical operators.
    pub fn build(spec: &SpectrumSpec, seed: u64) -> Result<Self> {
        match *spec {
            SpectrumSpec::DyadicSparse { n, count, min_gap } => {
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                let freqs = sample_sparse_frequencies(count, min_gap, Some(n), &mut rng)?;
                Ok(Self::random_basis_with_frequencies(n, &freqs, &mut rng))
            }
            SpectrumSpec::Strip {
                n,
                strips,
                width,
                gap,
                points_per_strip,
            } => build_strip(n, strips, width, gap, points_per_strip),
            SpectrumSpec::Shor { n, base, modulus } => build_shor(n, base, modulus),
            SpectrumSpec::Grover { n, marked } => build_grover(n, marked),
        }
    }

    /// Assemble an operator from explicit distinct frequencies and a seeded
    /// random eigenbasis; the frequencies are assigned to the N eigenvectors
    /// cyclically.
    pub fn random_basis_with_frequencies<R: Rng>(
        n: u32,
        distinct: &[f64],
        rng: &mut R,
    ) -> Self {
        let dim = 1usize << n;
        let basis = linalg::random_unitary(dim, rng);
        let freqs = (0..dim).map(|k| distinct[k % distinct.len()]).collect();
        SpectralUnitary {
            n,
            freqs,
            basis: Basis::Dense(basis),
        }
    }

    /// Diagonal operator in the computational basis.
    pub fn diagonal(n: u32, freqs: Vec<f64>) -> Result<Self> {
        if freqs.len() != 1usize << n {
            return Err(Error::Argument(format!(
                "need {} frequencies, got {}",
                1usize << n,
                freqs.len()
            )));
        }
        if freqs.iter().any(|w| !(0.0..1.0).contains(w)) {
            return Err(Error::Argument("frequencies must lie in [0, 1)".into()));
        }
        Ok(SpectralUnitary {
            n,
            freqs,
            basis: Basis::Identity,
        })
    }

    /// Explicit eigenbasis. The basis is checked for orthonormality at small
    /// dimension; large callers are expected to pass a genuinely unitary
    /// matrix.
    pub fn from_parts(n: u32, freqs: Vec<f64>, basis: CMatrix) -> Result<Self> {
        let dim = 1usize << n;
        if freqs.len() != dim || basis.rows != dim || basis.cols != dim {
            return Err(Error::Argument("dimension mismatch".into()));
        }
        if freqs.iter().any(|w| !(0.0..1.0).contains(w)) {
            return Err(Error::Argument("frequencies must lie in [0, 1)".into()));
        }
        if dim <= 256 && basis.gram_identity_deviation() > 1e-10 {
            return Err(Error::Argument("eigenbasis is not orthonormal".into()));
        }
        Ok(SpectralUnitary {
            n,
            freqs,
            basis: Basis::Dense(basis),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.freqs
    }

    /// Sorted distinct frequencies (values closer than `FREQ_TOL` merged).
    pub fn distinct_frequencies(&self) -> Vec<f64> {
        let mut sorted: Vec<f64> = self.freqs.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut out: Vec<f64> = Vec::new();
        for w in sorted {
            match out.last() {
                Some(&last) if (w - last).abs() <= FREQ_TOL => {}
                _ => out.push(w),
            }
        }
        // merge across the wrap point
        if out.len() > 1 {
            let first = out[0];
            let last = *out.last().unwrap();
            if (1.0 - last + first).abs() <= FREQ_TOL {
                out.pop();
            }
        }
        out
    }

    /// Minimum wraparound distance over distinct frequency pairs; 1 when
    /// fewer than two distinct frequencies exist.
    pub fn min_wraparound_gap(&self) -> f64 {
        let distinct = self.distinct_frequencies();
        if distinct.len() < 2 {
            return 1.0;
        }
        let mut min = f64::INFINITY;
        for pair in distinct.windows(2) {
            min = min.min(pair[1] - pair[0]);
        }
        min.min(1.0 - distinct.last().unwrap() + distinct[0])
    }

    /// True when every frequency is exactly representable in `width` bits.
    pub fn is_bit_exact(&self, width: u32) -> bool {
        let m = (1u64 << width) as f64;
        self.freqs
            .iter()
            .all(|w| (w * m - (w * m).round()).abs() <= 1e-9)
    }

    /// Eigenbasis coordinates of a main-register state.
    pub fn to_eigen(&self, state: &MainState) -> Vec<Complex64> {
        match &self.basis {
            Basis::Identity => state.amps().to_vec(),
            Basis::Dense(b) => b.adjoint_mul_vec(state.amps()),
        }
    }

    /// Main-register state from eigenbasis coordinates.
    pub fn from_eigen(&self, coords: &[Complex64]) -> MainState {
        let amps = match &self.basis {
            Basis::Identity => coords.to_vec(),
            Basis::Dense(b) => b.mul_vec(coords),
        };
        MainState::new(self.n, amps).expect("dimension preserved")
    }

    /// Composite (main x anc) array from eigen-major coefficients.
    pub(crate) fn expand_composite(&self, coeffs: &[Complex64], anc_dim: usize) -> Vec<Complex64> {
        match &self.basis {
            Basis::Identity => coeffs.to_vec(),
            Basis::Dense(b) => linalg::basis_expand_composite(b, coeffs, anc_dim),
        }
    }

    /// Eigen-major coefficients of a composite (main x anc) array.
    pub(crate) fn project_composite(&self, amps: &[Complex64], anc_dim: usize) -> Vec<Complex64> {
        match &self.basis {
            Basis::Identity => amps.to_vec(),
            Basis::Dense(b) => linalg::basis_project_composite(b, amps, anc_dim),
        }
    }

    /// U^s applied to a main-register state; `s` may be negative.
    pub fn apply_power(&self, state: &MainState, s: i64) -> Result<MainState> {
        if state.n() != self.n {
            return Err(Error::LayoutMismatch(format!(
                "state has n={}, operator has n={}",
                state.n(),
                self.n
            )));
        }
        if s == 0 {
            return Ok(state.clone());
        }
        let mut coords = self.to_eigen(state);
        for (c, &w) in coords.iter_mut().zip(&self.freqs) {
            *c *= Complex64::from_polar(1.0, TAU * w * s as f64);
        }
        Ok(self.from_eigen(&coords))
    }

    /// Ground-truth evolution U^t, used as the oracle in every comparison.
    pub fn exact_evolution_oracle(&self, state: &MainState, t: i64) -> Result<MainState> {
        self.apply_power(state, t)
    }

    /// Dense matrix of U^s. Intended for oracles and small-n checks.
    pub fn dense_matrix(&self, s: i64) -> Result<CMatrix> {
        let dim = self.dim();
        if dim > 1 << 10 {
            return Err(Error::Capacity("dense matrix limited to n <= 10".into()));
        }
        let mut out = CMatrix::zeros(dim, dim);
        for j in 0..dim {
            let e = MainState::basis(self.n, j)?;
            let col = self.apply_power(&e, s)?;
            out.col_mut(j).copy_from_slice(col.amps());
        }
        Ok(out)
    }
}

/// Rejection-sample `count` distinct frequencies with pairwise wraparound gap
/// at least `min_gap`; when `dyadic_width` is given each frequency is an exact
/// multiple of 2^-width.
pub fn sample_sparse_frequencies<R: Rng>(
    count: usize,
    min_gap: f64,
    dyadic_width: Option<u32>,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Argument("need at least one frequency".into()));
    }
    if count as f64 * min_gap > 1.0 {
        return Err(Error::Argument(format!(
            "{count} frequencies with gap {min_gap} do not fit in the unit circle"
        )));
    }
    if let Some(w) = dyadic_width {
        if min_gap > 0.0 && (count as f64) * min_gap * (1u64 << w) as f64 > (1u64 << w) as f64 {
            return Err(Error::Argument("gap infeasible at this bit width".into()));
        }
    }
    let mut freqs: Vec<f64> = Vec::with_capacity(count);
    // greedy placement can strand itself (early picks may leave no room for
    // the rest), so restart from scratch after a run of rejections
    let mut rejections = 0usize;
    let mut restarts = 0usize;
    while freqs.len() < count {
        let cand = match dyadic_width {
            Some(w) => {
                let m = 1u64 << w;
                rng.gen_range(0..m) as f64 / m as f64
            }
            None => rng.gen::<f64>(),
        };
        if freqs.iter().all(|&f| wraparound_distance(f, cand) >= min_gap) {
            freqs.push(cand);
            rejections = 0;
        } else {
            rejections += 1;
            if rejections > 2_000 {
                freqs.clear();
                rejections = 0;
                restarts += 1;
                if restarts > 1_000 {
                    return Err(Error::Argument(
                        "spectrum gap infeasible for requested count".into(),
                    ));
                }
            }
        }
    }
    Ok(freqs)
}

/// min(|a - b|, 1 - |a - b|) on the unit circle.
pub fn wraparound_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

fn build_strip(
    n: u32,
    strips: usize,
    width: f64,
    gap: f64,
    points_per_strip: usize,
) -> Result<SpectralUnitary> {
    if !(width > 0.0 && gap > 0.0 && width < gap) {
        return Err(Error::Argument(format!(
            "strip width {width} must be positive and smaller than gap {gap}"
        )));
    }
    if strips == 0 || points_per_strip < 2 {
        return Err(Error::Argument(
            "need at least one strip and two points per strip".into(),
        ));
    }
    if strips as f64 * (gap + width) > 1.0 {
        return Err(Error::Argument("strips do not fit in the unit circle".into()));
    }
    let mut distinct = Vec::with_capacity(strips * points_per_strip);
    for j in 0..strips {
        let center = (j as f64 + 0.5) * (gap + width);
        for i in 0..points_per_strip {
            let f = center - width / 2.0 + width * i as f64 / (points_per_strip - 1) as f64;
            distinct.push(f.rem_euclid(1.0));
        }
    }
    let dim = 1usize << n;
    let freqs = (0..dim).map(|k| distinct[k % distinct.len()]).collect();
    SpectralUnitary::diagonal(n, freqs)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn build_shor(n: u32, base: u64, modulus: u64) -> Result<SpectralUnitary> {
    if modulus < 2 {
        return Err(Error::Argument("modulus must be at least 2".into()));
    }
    if gcd(base % modulus, modulus) != 1 {
        return Err(Error::Argument(format!(
            "gcd({base}, {modulus}) != 1: multiplication is not invertible"
        )));
    }
    let dim = 1usize << n;
    if (dim as u64) < modulus {
        return Err(Error::Argument(format!(
            "2^{n} < modulus {modulus}: register too small"
        )));
    }
    let a = base % modulus;
    let mut freqs = vec![0.0f64; dim];
    let mut basis = CMatrix::identity(dim);
    let mut seen = vec![false; modulus as usize];
    let mut col = 0usize;
    // Fixed points: 0, the non-units below the modulus, and everything at or
    // above the modulus keep basis columns and frequency 0. Unit orbits get
    // Fourier eigenvectors.
    let mut columns: Vec<(Vec<Complex64>, f64)> = Vec::with_capacity(dim);
    for x0 in 0..modulus {
        if seen[x0 as usize] {
            continue;
        }
        if gcd(x0, modulus) != 1 {
            seen[x0 as usize] = true;
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            v[x0 as usize] = Complex64::new(1.0, 0.0);
            columns.push((v, 0.0));
            continue;
        }
        // orbit of x0 under multiplication by a
        let mut orbit = vec![x0];
        let mut x = (a * x0) % modulus;
        while x != x0 {
            orbit.push(x);
            x = (a * x) % modulus;
        }
        for &y in &orbit {
            seen[y as usize] = true;
        }
        let r = orbit.len();
        let norm = 1.0 / (r as f64).sqrt();
        for k in 0..r {
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            for (j, &y) in orbit.iter().enumerate() {
                v[y as usize] =
                    Complex64::from_polar(norm, -TAU * (k as f64) * (j as f64) / r as f64);
            }
            columns.push((v, k as f64 / r as f64));
        }
    }
    for x in modulus..dim as u64 {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[x as usize] = Complex64::new(1.0, 0.0);
        columns.push((v, 0.0));
    }
    for (v, w) in columns {
        basis.col_mut(col).copy_from_slice(&v);
        freqs[col] = w;
        col += 1;
    }
    debug_assert_eq!(col, dim);
    SpectralUnitary::from_parts(n, freqs, basis)
}

fn build_grover(n: u32, marked: usize) -> Result<SpectralUnitary> {
    let dim = 1usize << n;
    if marked >= dim {
        return Err(Error::Argument(format!(
            "marked item {marked} out of range for n={n}"
        )));
    }
    if dim > 1 << 8 {
        return Err(Error::Capacity("grover build limited to n <= 8".into()));
    }
    // G = (I - 2|psi><psi|)(I - 2|a><a|) with psi uniform and a the marked
    // state. Everything orthogonal to span{a, psi} is fixed (frequency 0);
    // on that plane G is the rotation by pi - 2 asin(1/sqrt(N)), with
    // eigenvectors (a -+ i psi_perp)/sqrt(2).
    let alpha = 1.0 / (dim as f64).sqrt();
    let beta = (1.0 - alpha * alpha).sqrt();
    let mut a = vec![0.0f64; dim];
    a[marked] = 1.0;
    // normalized component of psi orthogonal to a
    let mut psi_perp = vec![alpha / beta; dim];
    psi_perp[marked] = 0.0;

    let freq_offset = alpha.asin() / std::f64::consts::PI;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = CMatrix::zeros(dim, dim);
    let mut freqs = vec![0.0f64; dim];
    for j in 0..dim {
        basis.set(j, 0, Complex64::new(a[j], -psi_perp[j]) * inv_sqrt2);
        basis.set(j, 1, Complex64::new(a[j], psi_perp[j]) * inv_sqrt2);
    }
    freqs[0] = 0.5 - freq_offset;
    freqs[1] = 0.5 + freq_offset;

    // Complete the fixed subspace from computational basis vectors: project
    // each against {a, psi_perp} and the columns accepted so far (two-pass
    // Gram-Schmidt), keeping the dim - 2 with nonvanishing residual.
    let mut col = 2usize;
    for j in 0..dim {
        if col == dim {
            break;
        }
        let mut v = vec![0.0f64; dim];
        v[j] = 1.0;
        for _pass in 0..2 {
            let da = v[marked];
            for (x, &ax) in v.iter_mut().zip(&a) {
                *x -= da * ax;
            }
            let dp: f64 = v.iter().zip(&psi_perp).map(|(x, p)| x * p).sum();
            for (x, &px) in v.iter_mut().zip(&psi_perp) {
                *x -= dp * px;
            }
            for prev in 2..col {
                let d: f64 = (0..dim).map(|i| basis.get(i, prev).re * v[i]).sum();
                for (i, x) in v.iter_mut().enumerate() {
                    *x -= d * basis.get(i, prev).re;
                }
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        for (i, x) in v.iter().enumerate() {
            basis.set(i, col, Complex64::new(x / norm, 0.0));
        }
        col += 1;
    }
    if col != dim {
        return Err(Error::Internal(format!(
            "grover fixed-subspace completion produced {} of {} columns",
            col - 2,
            dim - 2
        )));
    }
    SpectralUnitary::from_parts(n, freqs, basis)
}
