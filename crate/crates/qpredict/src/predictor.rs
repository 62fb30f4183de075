//! Evolution prediction and history restoration.
//!
//! Three pipelines, in increasing generality:
//! - a naive route using the idealized wizard twice with an ancilla rotation
//!   between (exact for p-bit spectra);
//! - an enhanced route using the simulated estimator plus the classical
//!   refinement table (exact for p-bit spectra);
//! - the general algorithm: estimator, refined-frequency rotation with the
//!   (L-1) truncation correction, then the un-computation pass. Its cost is
//!   2(L-1) conditional applications regardless of the target time t, which
//!   is the whole point: the horizon grows like N while the cost stays at L.
//!
//! The un-computation pass uses forward powers and a forward ancilla Fourier
//! transform. That composition is the exact inverse of the *reversed*
//! estimator sequence, and the (L-1) correction is precisely what maps the
//! forward estimator output onto the reversed one; together they cancel the
//! geometric kernel's phase, which is why the output concentrates on the
//! evolved state. (The exact inverse of the forward pass would leave that
//! phase in place and the in-window terms would decohere.)

use num_complex::Complex64;

use crate::circuit::{
    cond_power_phases_rows, qft_rows, rotate_rows, wh_rows, CostCounter, PhaseRule,
};
use crate::enhancer::EnhancerTable;
use crate::error::{Error, Result};
use crate::linalg::{largest_singular_value, CMatrix};
use crate::spectral::SpectralUnitary;
use crate::state::{MainState, RegisterLayout, StateVector};
use crate::wizard::exact_wizard;

const TAU: f64 = std::f64::consts::TAU;

/// Parameters of the general algorithm for a target error delta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionParams {
    /// Target operator-norm error, in (0, 1).
    pub delta: f64,
    /// Target fidelity 1 - delta.
    pub rho: f64,
    /// Base ancilla width.
    pub p: u32,
    /// Refinement overhead, ceil(log2(4 / delta)).
    pub c: u32,
    /// Working ancilla width q = p + c.
    pub q: u32,
    /// Ancilla dimension L = 2^q.
    pub l_dim: usize,
    /// Horizon constant C = delta / 14.
    pub c_const: f64,
    /// Largest admissible |t|, floor(C * 2^n).
    pub t_max: i64,
}

/// Derive the working parameters from (delta, p) against an n-bit frequency
/// resolution. `n` is the refinement width the enhancer targets; it bounds q
/// and sets the horizon.
pub fn derive_params(delta: f64, p: u32, n: u32) -> Result<PredictionParams> {
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::Argument(format!("delta = {delta} outside (0, 1)")));
    }
    let c = (4.0 / delta).log2().ceil() as u32;
    if p < c {
        return Err(Error::Precondition(format!(
            "ancilla width p={p} below refinement overhead c={c}"
        )));
    }
    let q = p + c;
    if q > n {
        return Err(Error::Capacity(format!(
            "working width q={q} exceeds frequency resolution n={n}"
        )));
    }
    let c_const = delta / 14.0;
    let t_max = (c_const * (1u64 << n) as f64).floor() as i64;
    if t_max < 1 {
        return Err(Error::Precondition(format!(
            "horizon floor(C*N) = {t_max} vanishes for delta={delta}, n={n}"
        )));
    }
    Ok(PredictionParams {
        delta,
        rho: 1.0 - delta,
        p,
        c,
        q,
        l_dim: 1usize << q,
        c_const,
        t_max,
    })
}

/// Measured outcome of one prediction run against the exact oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunReport {
    pub t: i64,
    /// Full-composite distance to (oracle state) tensor |0^q>.
    pub vector_distance: f64,
    /// Fidelity of the ancilla-zero conditioned main state to the oracle.
    pub fidelity: f64,
    pub ancilla_zero_probability: f64,
    pub u_cond_count: u64,
    /// Cost of the naive route: |t| direct applications.
    pub naive_cost: u64,
    pub speedup_ratio: f64,
}

// ---- naive and enhanced exact routes ---------------------------------------

/// Idealized prediction: wizard, rotate the ancilla by 2 pi (0.a)_p t, wizard
/// again. Exact when every frequency is p-bit; uses spectral knowledge, so it
/// is not charged to the counter.
pub fn predict_naive_exact(
    xi: &MainState,
    u: &SpectralUnitary,
    p: u32,
    t: i64,
) -> Result<MainState> {
    if !u.is_bit_exact(p) {
        return Err(Error::Precondition(format!(
            "spectrum is not exactly {p}-bit"
        )));
    }
    let m = 1usize << p;
    let s = StateVector::from_main(xi, p)?;
    let s = exact_wizard(&s, u, p)?;
    let rule = PhaseRule::from_fn(m, |a| TAU * (a as f64 / m as f64) * t as f64);
    let s = crate::circuit::rotate_by_ancilla(&s, &rule)?;
    let s = exact_wizard(&s, u, p)?;
    let (prob, main) = s.project_ancilla_zero()?;
    if (prob - 1.0).abs() > 1e-9 {
        return Err(Error::Internal(format!(
            "naive route left ancilla mass {:.3e} outside zero",
            1.0 - prob
        )));
    }
    Ok(main)
}

/// Enhanced prediction for p-bit-exact spectra: simulated estimator, refined
/// rotation, then the inverse estimator sequence. Charges 2(M-1) conditional
/// applications.
pub fn predict_exact_eigenvalue(
    xi: &MainState,
    u: &SpectralUnitary,
    p: u32,
    t: i64,
    h: &EnhancerTable,
    counter: &mut CostCounter,
) -> Result<MainState> {
    if !u.is_bit_exact(p) {
        return Err(Error::Precondition(format!(
            "spectrum is not exactly {p}-bit"
        )));
    }
    if h.q() != p {
        return Err(Error::Argument(format!(
            "enhancer input width {} does not match p={p}",
            h.q()
        )));
    }
    let m = 1usize << p;
    let x = u.to_eigen(xi);
    let mut coeffs = estimator_rows(&x, u.frequencies(), m);
    counter.record_u_seq(m);
    rotate_rows(&mut coeffs, m, enhancer_rule(h, t).angles());
    // exact case: invert the forward estimator directly
    qft_rows(&mut coeffs, m, true);
    cond_power_phases_rows(&mut coeffs, m, u.frequencies(), -1.0);
    counter.record_u_seq(m);
    wh_rows(&mut coeffs, m);

    let (prob, main) = project_zero_eigen(&coeffs, m, u);
    if (prob - 1.0).abs() > 1e-9 {
        return Err(Error::Internal(format!(
            "exact-spectrum route left ancilla mass {:.3e} outside zero",
            1.0 - prob
        )));
    }
    Ok(main)
}

// ---- general algorithm -----------------------------------------------------

fn estimator_rows(x: &[Complex64], freqs: &[f64], m: usize) -> Vec<Complex64> {
    let norm = 1.0 / (m as f64).sqrt();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); x.len() * m];
    crate::par::for_each_row(&mut coeffs, m, |k, row| {
        let v = x[k] * norm;
        for z in row.iter_mut() {
            *z = v;
        }
    });
    cond_power_phases_rows(&mut coeffs, m, freqs, 1.0);
    qft_rows(&mut coeffs, m, false);
    coeffs
}

fn enhancer_rule(h: &EnhancerTable, t: i64) -> PhaseRule {
    let big_l = (1u64 << h.q()) as f64;
    PhaseRule::from_fn(1usize << h.q(), |l| {
        let l = l as u64;
        TAU * (h.refined(l) * t as f64 - (big_l - 1.0) * h.delta_star(l))
    })
}

/// The six steps in eigen coordinates; returns the final (k, a) table.
fn general_eigen(
    x: &[Complex64],
    freqs: &[f64],
    h: &EnhancerTable,
    t: i64,
    counter: &mut CostCounter,
) -> Vec<Complex64> {
    let big_l = 1usize << h.q();
    let mut coeffs = estimator_rows(x, freqs, big_l);
    counter.record_u_seq(big_l);
    rotate_rows(&mut coeffs, big_l, enhancer_rule(h, t).angles());
    // un-computation: forward transform, forward powers, WH — the inverse of
    // the reversed estimator (see module docs)
    qft_rows(&mut coeffs, big_l, false);
    cond_power_phases_rows(&mut coeffs, big_l, freqs, 1.0);
    counter.record_u_seq(big_l);
    wh_rows(&mut coeffs, big_l);
    coeffs
}

fn project_zero_eigen(coeffs: &[Complex64], m: usize, u: &SpectralUnitary) -> (f64, MainState) {
    let v: Vec<Complex64> = coeffs.chunks(m).map(|row| row[0]).collect();
    let prob: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let scale = 1.0 / prob.sqrt();
    let v: Vec<Complex64> = v.into_iter().map(|z| z * scale).collect();
    (prob, u.from_eigen(&v))
}

fn report_from_eigen(
    coeffs: &[Complex64],
    x: &[Complex64],
    freqs: &[f64],
    m: usize,
    t: i64,
    u_cond: u64,
) -> RunReport {
    // oracle in eigen coordinates: x_k exp(2 pi i w_k t) on ancilla zero
    let mut dist_sq = 0.0;
    let mut overlap = Complex64::new(0.0, 0.0);
    let mut prob0 = 0.0;
    for (k, row) in coeffs.chunks(m).enumerate() {
        let target = x[k] * Complex64::from_polar(1.0, TAU * freqs[k] * t as f64);
        dist_sq += (row[0] - target).norm_sqr();
        overlap += target.conj() * row[0];
        prob0 += row[0].norm_sqr();
        for z in &row[1..] {
            dist_sq += z.norm_sqr();
        }
    }
    let fidelity = if prob0 > 0.0 {
        (overlap.norm() / prob0.sqrt()).min(1.0)
    } else {
        0.0
    };
    RunReport {
        t,
        vector_distance: dist_sq.sqrt(),
        fidelity,
        ancilla_zero_probability: prob0,
        u_cond_count: u_cond,
        naive_cost: t.unsigned_abs(),
        speedup_ratio: t.unsigned_abs() as f64 / u_cond as f64,
    }
}

fn check_general_pre(
    xi: &MainState,
    u: &SpectralUnitary,
    params: &PredictionParams,
    h: &EnhancerTable,
    t: i64,
) -> Result<()> {
    if xi.n() != u.n() {
        return Err(Error::LayoutMismatch(format!(
            "state n={} but operator n={}",
            xi.n(),
            u.n()
        )));
    }
    if h.q() != params.q {
        return Err(Error::Argument(format!(
            "enhancer input width {} does not match q={}",
            h.q(),
            params.q
        )));
    }
    if t.unsigned_abs() as i64 > params.t_max {
        return Err(Error::Horizon {
            t,
            t_max: params.t_max,
        });
    }
    Ok(())
}

/// General prediction: returns the full composite final state plus the run
/// report against the oracle. The report compares both the whole composite
/// (including residual ancilla mass) and the ancilla-zero conditioned state.
pub fn predict_general(
    xi: &MainState,
    u: &SpectralUnitary,
    params: &PredictionParams,
    h: &EnhancerTable,
    t: i64,
    counter: &mut CostCounter,
) -> Result<(StateVector, RunReport)> {
    check_general_pre(xi, u, params, h, t)?;
    let before = counter.u_cond_applications();
    let x = u.to_eigen(xi);
    let coeffs = general_eigen(&x, u.frequencies(), h, t, counter);
    let report = report_from_eigen(
        &coeffs,
        &x,
        u.frequencies(),
        params.l_dim,
        t,
        counter.u_cond_applications() - before,
    );
    let amps = u.expand_composite(&coeffs, params.l_dim);
    let layout = RegisterLayout::new(u.n(), params.q)?;
    Ok((StateVector::new(layout, amps)?, report))
}

/// As `predict_general` but without materializing the composite state —
/// every reported quantity is basis-independent, so sweeps over many states
/// can skip the expensive change of basis.
pub fn predict_general_report(
    xi: &MainState,
    u: &SpectralUnitary,
    params: &PredictionParams,
    h: &EnhancerTable,
    t: i64,
    counter: &mut CostCounter,
) -> Result<RunReport> {
    check_general_pre(xi, u, params, h, t)?;
    let before = counter.u_cond_applications();
    let x = u.to_eigen(xi);
    let coeffs = general_eigen(&x, u.frequencies(), h, t, counter);
    Ok(report_from_eigen(
        &coeffs,
        &x,
        u.frequencies(),
        params.l_dim,
        t,
        counter.u_cond_applications() - before,
    ))
}

/// History restoration: the same run with the time negated. Only forward
/// applications of U are consumed; the counter charge is unchanged.
pub fn restore_history(
    xi: &MainState,
    u: &SpectralUnitary,
    params: &PredictionParams,
    h: &EnhancerTable,
    t: i64,
    counter: &mut CostCounter,
) -> Result<(StateVector, RunReport)> {
    if t < 0 {
        return Err(Error::Argument(format!(
            "restoration time must be nonnegative, got {t}"
        )));
    }
    predict_general(xi, u, params, h, -t, counter)
}

/// Largest singular value of (general algorithm restricted to ancilla-zero
/// inputs) minus (oracle tensor ancilla-zero embedding), built column by
/// column through the real pipeline.
pub fn operator_norm_check(
    u: &SpectralUnitary,
    params: &PredictionParams,
    h: &EnhancerTable,
    t: i64,
) -> Result<f64> {
    if u.n() > 9 || params.q > 8 {
        return Err(Error::Capacity(format!(
            "operator-norm check needs n <= 9 and q <= 8, got n={}, q={}",
            u.n(),
            params.q
        )));
    }
    let n_dim = u.dim();
    let l_dim = params.l_dim;
    let mut diff = CMatrix::zeros(n_dim * l_dim, n_dim);
    for m in 0..n_dim {
        let basis = MainState::basis(u.n(), m)?;
        let mut counter = CostCounter::new();
        let (state, _) = predict_general(&basis, u, params, h, t, &mut counter)?;
        let oracle = u.exact_evolution_oracle(&basis, t)?;
        let col = diff.col_mut(m);
        col.copy_from_slice(state.amps());
        for (j, &o) in oracle.amps().iter().enumerate() {
            col[j * l_dim] -= o;
        }
    }
    Ok(largest_singular_value(&diff))
}

// ---- speedup accounting ----------------------------------------------------

/// Aggregate speedup view over a family of runs sharing one parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedupSummary {
    pub runs: usize,
    /// Largest |t| exercised.
    pub measured_horizon: u64,
    /// Conditional-application cost per run (common across the family).
    pub cost: u64,
    /// Best measured |t| / cost over the family.
    pub best_measured_speedup: f64,
    /// Theoretical horizon (1 - rho) / (14 eps) divided by the measured cost.
    pub horizon_speedup: f64,
    /// The closed-form prediction eps1 (1 - rho) / (56 eps).
    pub theoretical_speedup: f64,
}

/// Tabulate measured against theoretical speedup; `eps` is the fine accuracy
/// (1/N for dyadic instances), `eps1` the rough accuracy (1/M). Returns None
/// for an empty family.
pub fn speedup_summary(
    reports: &[RunReport],
    eps: f64,
    eps1: f64,
    rho: f64,
) -> Option<SpeedupSummary> {
    if reports.is_empty() {
        return None;
    }
    let cost = reports.iter().map(|r| r.u_cond_count).max().unwrap();
    let horizon = reports.iter().map(|r| r.naive_cost).max().unwrap();
    let best = reports
        .iter()
        .map(|r| r.speedup_ratio)
        .fold(0.0f64, f64::max);
    Some(SpeedupSummary {
        runs: reports.len(),
        measured_horizon: horizon,
        cost,
        best_measured_speedup: best,
        horizon_speedup: ((1.0 - rho) / (14.0 * eps)) / cost as f64,
        theoretical_speedup: eps1 * (1.0 - rho) / (56.0 * eps),
    })
}
