//! Subcommand implementations. Each command reads one flat config (plus flag
//! overrides), runs seeded experiments, writes rows in the fixed schema, and
//! maps failures onto the exit-code contract:
//! 0 success, 1 bound violation, 2 configuration error, 3 capacity guard.

use std::path::PathBuf;

use qpredict::circuit::CostCounter;
use qpredict::predictor::{derive_params, predict_general_report, speedup_summary};
use qpredict::spectral::{wraparound_distance, SpectralUnitary, SpectrumSpec};
use qpredict::state::MainState;
use qpredict::wizard::classify_type;
use qpredict::{EnhancerTable, Error as LibError};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::config::Config;
use crate::output::{emit, Format, Row};
use crate::shor::run_shor;

pub const EXIT_OK: i32 = 0;
pub const EXIT_BOUND: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Debug)]
pub struct CmdError {
    pub code: i32,
    pub message: String,
}

impl CmdError {
    fn config(msg: impl Into<String>) -> Self {
        CmdError {
            code: EXIT_CONFIG,
            message: msg.into(),
        }
    }

    fn bound(msg: impl Into<String>) -> Self {
        CmdError {
            code: EXIT_BOUND,
            message: msg.into(),
        }
    }

    fn capacity(msg: impl Into<String>) -> Self {
        CmdError {
            code: EXIT_CAPACITY,
            message: msg.into(),
        }
    }
}

impl From<LibError> for CmdError {
    fn from(e: LibError) -> Self {
        match e {
            LibError::Capacity(_) => CmdError::capacity(e.to_string()),
            other => CmdError::config(other.to_string()),
        }
    }
}

impl From<crate::config::ConfigError> for CmdError {
    fn from(e: crate::config::ConfigError) -> Self {
        CmdError::config(e.to_string())
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::config(format!("io error: {e}"))
    }
}

/// Options shared by every subcommand.
#[derive(Debug, Clone)]
pub struct CommonOpts {
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tolerance: f64,
    pub max_qubits: u32,
}

impl Default for CommonOpts {
    fn default() -> Self {
        CommonOpts {
            out: None,
            format: Format::Csv,
            tolerance: 0.0,
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

pub const DEFAULT_MAX_QUBITS: u32 = 22;

fn guard_capacity(n: u32, q: u32, opts: &CommonOpts) -> Result<(), CmdError> {
    if n > 14 {
        return Err(CmdError::capacity(format!(
            "main register n={n} exceeds the n <= 14 guard"
        )));
    }
    if n + q > opts.max_qubits {
        return Err(CmdError::capacity(format!(
            "total qubits n + q = {} exceeds the limit {} (raise --max-qubits to override)",
            n + q,
            opts.max_qubits
        )));
    }
    if opts.max_qubits > DEFAULT_MAX_QUBITS {
        eprintln!(
            "warning: capacity guard raised to {} qubits; dense amplitudes may be large",
            opts.max_qubits
        );
    }
    Ok(())
}

fn dyadic_spectrum(cfg: &Config, n: u32, seed: u64) -> Result<SpectralUnitary, CmdError> {
    let count = cfg.usize_or("count", 8)?;
    let min_gap = cfg.f64_or("min_gap", 0.09)?;
    Ok(SpectralUnitary::build(
        &SpectrumSpec::DyadicSparse { n, count, min_gap },
        seed,
    )?)
}

// ---- wizard ----------------------------------------------------------------

pub fn cmd_wizard(cfg: &Config, opts: &CommonOpts) -> Result<(), CmdError> {
    let n = cfg.u32_or("n", 8)?;
    let p = cfg.u32_or("p", 5)?;
    if p > n {
        return Err(CmdError::config(format!(
            "estimator width p={p} exceeds register width n={n}"
        )));
    }
    guard_capacity(n, p, opts)?;
    let seed = cfg.u64_or("seed", 0)?;
    let trials = cfg.usize_or("trials", 20)?;
    if trials == 0 {
        return Err(CmdError::config("trials must be at least 1"));
    }
    let k_values = cfg.i64_list("k_values", &[2, 4, 8])?;
    let u = dyadic_spectrum(cfg, n, seed)?;

    let mut rows = Vec::new();
    let mut violations = 0usize;
    for &k in &k_values {
        if k < 1 {
            return Err(CmdError::config(format!("window parameter K={k} invalid")));
        }
        let rep = classify_type(&u, p, k as u64, trials, seed)?;
        let bound = 1.0 / k as f64;
        let pass = rep.tail_mass <= bound + 1e-9 + opts.tolerance;
        println!(
            "wizard K={k} tail={:.6} bound={:.6} {}",
            rep.tail_mass,
            bound,
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            violations += 1;
        }
        rows.push(Row {
            experiment: "wizard".into(),
            n,
            p,
            q: p,
            delta: bound,
            t: k,
            distance: rep.tail_mass,
            fidelity: rep.in_window_mass,
            anc_zero_prob: rep.epsilon,
            u_cond: (1u64 << p) - 1,
            naive_cost: 0,
            speedup: 0.0,
        });
    }
    emit(&rows, opts.format, opts.out.as_deref())?;
    if violations > 0 {
        return Err(CmdError::bound(format!(
            "{violations} window parameter(s) violate the tail bound"
        )));
    }
    Ok(())
}

// ---- predict / restore -----------------------------------------------------

fn run_prediction(cfg: &Config, opts: &CommonOpts, restore: bool) -> Result<(), CmdError> {
    let n = cfg.u32_or("n", 10)?;
    let p = cfg.u32_or("p", 5)?;
    let delta = cfg.f64_or("delta", 0.5)?;
    let seed = cfg.u64_or("seed", 0)?;
    let trials = cfg.usize_or("trials", 5)?;
    if trials == 0 {
        return Err(CmdError::config("trials must be at least 1"));
    }
    let params = derive_params(delta, p, n)?;
    guard_capacity(n, params.q, opts)?;

    let default_times = [
        1,
        (params.t_max / 4).max(1),
        (params.t_max / 2).max(1),
        params.t_max,
    ];
    let times = cfg.i64_list("times", &default_times)?;

    let u = dyadic_spectrum(cfg, n, seed)?;
    let h = EnhancerTable::build(&u, params.q, n)?;

    let name = if restore { "restore" } else { "predict" };
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut violations = 0usize;
    let mut horizon_errors = 0usize;
    for _ in 0..trials {
        let xi = MainState::random(n, &mut rng);
        for &t in &times {
            if t < 0 {
                return Err(CmdError::config(format!(
                    "times must be nonnegative, got {t}"
                )));
            }
            let signed_t = if restore { -t } else { t };
            let mut counter = CostCounter::new();
            match predict_general_report(&xi, &u, &params, &h, signed_t, &mut counter) {
                Ok(r) => {
                    if r.vector_distance >= delta + opts.tolerance {
                        violations += 1;
                    }
                    rows.push(Row {
                        experiment: name.into(),
                        n,
                        p,
                        q: params.q,
                        delta,
                        t: r.t,
                        distance: r.vector_distance,
                        fidelity: r.fidelity,
                        anc_zero_prob: r.ancilla_zero_probability,
                        u_cond: r.u_cond_count,
                        naive_cost: r.naive_cost,
                        speedup: r.speedup_ratio,
                    });
                }
                Err(LibError::Horizon { t, t_max }) => {
                    eprintln!("error=horizon t={t} t_max={t_max}");
                    horizon_errors += 1;
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    emit(&rows, opts.format, opts.out.as_deref())?;
    if horizon_errors > 0 {
        return Err(CmdError::config(format!(
            "{horizon_errors} requested time(s) beyond the horizon t_max={}",
            params.t_max
        )));
    }
    if violations > 0 {
        return Err(CmdError::bound(format!(
            "{violations} run(s) exceed the distance bound delta={delta}"
        )));
    }
    println!(
        "{name} n={n} p={p} delta={delta} t_max={} rows={} all distances < {delta}",
        params.t_max,
        rows.len()
    );
    Ok(())
}

pub fn cmd_predict(cfg: &Config, opts: &CommonOpts) -> Result<(), CmdError> {
    run_prediction(cfg, opts, false)
}

pub fn cmd_restore(cfg: &Config, opts: &CommonOpts) -> Result<(), CmdError> {
    run_prediction(cfg, opts, true)
}

// ---- shor ------------------------------------------------------------------

pub fn cmd_shor(cfg: &Config, opts: &CommonOpts) -> Result<(), CmdError> {
    let modulus = cfg.u64_or("modulus", 15)?;
    let base = cfg.u64_or("base", 7)?;
    let p = cfg.u32_or("p", 6)?;
    let trials = cfg.usize_or("trials", 10)?;
    let seed = cfg.u64_or("seed", 0)?;
    let n = (64 - (modulus.max(2) - 1).leading_zeros()).max(1);
    guard_capacity(n, p, opts)?;

    let result = run_shor(modulus, base, p, trials, seed)?;
    match result.factors {
        Some((f1, f2)) => println!(
            "shor modulus={modulus} base={base} period={} factors={f1}x{f2} success={}",
            result.period, result.success
        ),
        None => println!(
            "shor modulus={modulus} base={base} period={} success={}",
            result.period, result.success
        ),
    }

    match opts.format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&result).expect("result serializes");
            text.push('\n');
            match &opts.out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
        }
        Format::Csv => {
            let rows: Vec<Row> = result
                .trials
                .iter()
                .enumerate()
                .map(|(i, tr)| Row {
                    experiment: "shor".into(),
                    n,
                    p,
                    q: p,
                    delta: 0.0,
                    t: i as i64,
                    distance: tr.measured as f64 / (1u64 << p) as f64,
                    fidelity: if result.success { 1.0 } else { 0.0 },
                    anc_zero_prob: 0.0,
                    u_cond: (1u64 << p) - 1,
                    naive_cost: tr.candidate,
                    speedup: 0.0,
                })
                .collect();
            emit(&rows, opts.format, opts.out.as_deref())?;
        }
    }

    if !result.success {
        return Err(CmdError::bound(format!(
            "period not recovered within {trials} trial(s)"
        )));
    }
    Ok(())
}

// ---- grover ----------------------------------------------------------------

pub fn cmd_grover(cfg: &Config, opts: &CommonOpts) -> Result<(), CmdError> {
    let n = cfg.u32_or("n", 4)?;
    let marked = cfg.usize_or("marked", 3)?;
    let delta = cfg.f64_or("delta", 0.5)?;
    let p = cfg.u32_or("p", 3)?;
    // bit width the classical refinement targets; the iterate's frequencies
    // are irrational, so refinement goes well past the register width
    let refine = cfg.u32_or("refine", 20)?;
    let seed = cfg.u64_or("seed", 0)?;
    let trials = cfg.usize_or("trials", 3)?;
    if trials == 0 {
        return Err(CmdError::config("trials must be at least 1"));
    }

    let params = derive_params(delta, p, refine)?;
    guard_capacity(n, params.q, opts)?;
    let u = SpectralUnitary::build(&SpectrumSpec::Grover { n, marked }, seed)?;

    // eigenphase gap between the two rotation-plane frequencies
    let nonzero: Vec<f64> = u
        .distinct_frequencies()
        .into_iter()
        .filter(|f| wraparound_distance(*f, 0.0) > 1e-9)
        .collect();
    if nonzero.len() != 2 {
        return Err(CmdError::config(format!(
            "expected two nontrivial phases, found {}",
            nonzero.len()
        )));
    }
    let gap = wraparound_distance(nonzero[0], nonzero[1]);
    let analytic = 2.0 * 2.0 * (1.0 / ((1u64 << n) as f64).sqrt()).asin() / std::f64::consts::TAU;
    println!(
        "grover n={n} marked={marked} gap={gap:.8} analytic={analytic:.8} cell={:.8}",
        1.0 / params.l_dim as f64
    );
    if 1.0 / params.l_dim as f64 > gap / 2.0 {
        return Err(CmdError::config(format!(
            "ancilla width q={} cannot resolve the gap {gap:.3e}",
            params.q
        )));
    }

    let h = EnhancerTable::build(&u, params.q, refine)?;
    let default_times = [0, 1, (1i64 << n), params.t_max.min(1 << (n + 2))];
    let times = cfg.i64_list("times", &default_times)?;

    let mut rows = vec![Row {
        experiment: "grover-gap".into(),
        n,
        p,
        q: params.q,
        delta,
        t: 0,
        distance: gap,
        fidelity: analytic,
        anc_zero_prob: 0.0,
        u_cond: 0,
        naive_cost: 0,
        speedup: 0.0,
    }];
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    for _ in 0..trials {
        let xi = MainState::random(n, &mut rng);
        for &t in &times {
            let mut counter = CostCounter::new();
            let r = predict_general_report(&xi, &u, &params, &h, t, &mut counter)?;
            if r.vector_distance >= delta + opts.tolerance {
                violations += 1;
            }
            rows.push(Row {
                experiment: "grover".into(),
                n,
                p,
                q: params.q,
                delta,
                t: r.t,
                distance: r.vector_distance,
                fidelity: r.fidelity,
                anc_zero_prob: r.ancilla_zero_probability,
                u_cond: r.u_cond_count,
                naive_cost: r.naive_cost,
                speedup: r.speedup_ratio,
            });
        }
    }
    emit(&rows, opts.format, opts.out.as_deref())?;
    if violations > 0 {
        return Err(CmdError::bound(format!(
            "{violations} run(s) exceed the distance bound delta={delta}"
        )));
    }
    Ok(())
}

// ---- sweep -----------------------------------------------------------------

pub fn cmd_sweep(cfg: &Config, opts: &CommonOpts) -> Result<(), CmdError> {
    let n_list = cfg.u32_list("n_list", &[8, 10])?;
    let p_list = cfg.u32_list("p_list", &[4, 5])?;
    let delta_list = cfg.f64_list("delta_list", &[0.5])?;
    let trials = cfg.usize_or("trials", 3)?;
    if trials == 0 {
        return Err(CmdError::config("trials must be at least 1"));
    }
    let seed = cfg.u64_or("seed", 0)?;

    let mut rows = Vec::new();
    let mut best_family: Option<(u32, u32, f64, Vec<qpredict::RunReport>)> = None;
    for &n in &n_list {
        // one spectrum per register width, deterministically derived
        let u = dyadic_spectrum(cfg, n, seed ^ u64::from(n))?;
        for &p in &p_list {
            for &delta in &delta_list {
                let params = derive_params(delta, p, n)?;
                guard_capacity(n, params.q, opts)?;
                let h = EnhancerTable::build(&u, params.q, n)?;
                let times = cfg.i64_list("times", &[params.t_max])?;
                let mut rng = ChaCha12Rng::seed_from_u64(seed ^ (u64::from(p) << 32));
                let mut reports = Vec::new();
                for &t in &times {
                    // worst case over the trial states in this cell
                    let mut worst_distance = 0.0f64;
                    let mut worst_fidelity = 1.0f64;
                    let mut worst_prob = 1.0f64;
                    let mut cell = None;
                    for _ in 0..trials {
                        let xi = MainState::random(n, &mut rng);
                        let mut counter = CostCounter::new();
                        let r =
                            predict_general_report(&xi, &u, &params, &h, t, &mut counter)?;
                        worst_distance = worst_distance.max(r.vector_distance);
                        worst_fidelity = worst_fidelity.min(r.fidelity);
                        worst_prob = worst_prob.min(r.ancilla_zero_probability);
                        cell = Some(r);
                        reports.push(r);
                    }
                    let cell = cell.expect("trials >= 1");
                    rows.push(Row {
                        experiment: "sweep".into(),
                        n,
                        p,
                        q: params.q,
                        delta,
                        t,
                        distance: worst_distance,
                        fidelity: worst_fidelity,
                        anc_zero_prob: worst_prob,
                        u_cond: cell.u_cond_count,
                        naive_cost: cell.naive_cost,
                        speedup: cell.speedup_ratio,
                    });
                }
                // the summary tracks the largest instance at the smallest p:
                // that is where the horizon-versus-cost contrast is sharpest
                let better = match &best_family {
                    None => true,
                    Some((bn, bp, _, _)) => n > *bn || (n == *bn && p < *bp),
                };
                if better {
                    best_family = Some((n, p, delta, reports));
                }
            }
        }
    }

    if let Some((n, p, delta, reports)) = &best_family {
        let eps = 1.0 / (1u64 << n) as f64;
        let eps1 = 1.0 / (1u64 << p) as f64;
        if let Some(s) = speedup_summary(reports, eps, eps1, 1.0 - delta) {
            rows.push(Row {
                experiment: "summary".into(),
                n: *n,
                p: *p,
                q: 0,
                delta: *delta,
                t: s.measured_horizon as i64,
                distance: s.best_measured_speedup,
                fidelity: s.horizon_speedup,
                anc_zero_prob: 0.0,
                u_cond: s.cost,
                naive_cost: s.measured_horizon,
                speedup: s.theoretical_speedup,
            });
        }
    }
    emit(&rows, opts.format, opts.out.as_deref())?;
    Ok(())
}
