//! Period finding on the modular-multiplication operator: estimate a
//! frequency k/r through the simulated estimator, extract candidate periods
//! by continued fractions, and accumulate them until the period is found.

use qpredict::circuit::CostCounter;
use qpredict::error::{Error, Result};
use qpredict::spectral::{SpectralUnitary, SpectrumSpec};
use qpredict::state::MainState;
use qpredict::wizard::simulate_wizard;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ShorTrial {
    /// Measured ancilla value l; the estimate of some k/r is l / 2^p.
    pub measured: u64,
    /// Continued-fraction convergents of l / 2^p with denominator below the
    /// modulus, as (numerator, denominator) pairs.
    pub convergents: Vec<(u64, u64)>,
    /// Candidate period from this trial: the largest convergent denominator.
    pub candidate: u64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ShorResult {
    pub modulus: u64,
    pub base: u64,
    pub period: u64,
    pub success: bool,
    pub trials: Vec<ShorTrial>,
    /// Nontrivial factors when the modulus is 15 and the period is even.
    pub factors: Option<(u64, u64)>,
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

/// Convergents of num/den with denominators bounded by `max_den`.
pub fn convergents(mut num: u64, mut den: u64, max_den: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    // h/k recurrences over the continued-fraction digits
    let (mut h0, mut k0, mut h1, mut k1) = (0u64, 1u64, 1u64, 0u64);
    while den != 0 {
        let digit = num / den;
        let h2 = digit * h1 + h0;
        let k2 = digit * k1 + k0;
        if k2 > max_den {
            break;
        }
        out.push((h2, k2));
        (h0, k0, h1, k1) = (h1, k1, h2, k2);
        (num, den) = (den, num - digit * den);
    }
    out
}

/// Run the period-finding loop: one estimator pass gives the exact ancilla
/// distribution, trials sample it with a seeded generator, and candidate
/// denominators are combined by lcm until the order of `base` is reached.
pub fn run_shor(modulus: u64, base: u64, p: u32, trials: usize, seed: u64) -> Result<ShorResult> {
    if modulus < 3 || base < 2 || base >= modulus {
        return Err(Error::Argument(format!(
            "need 2 <= base < modulus and modulus >= 3, got base={base}, modulus={modulus}"
        )));
    }
    if gcd(base, modulus) != 1 {
        return Err(Error::Argument(format!(
            "base {base} shares factor {} with modulus {modulus}",
            gcd(base, modulus)
        )));
    }
    if trials == 0 {
        return Err(Error::Argument("need at least one trial".into()));
    }
    let n = (64 - (modulus - 1).leading_zeros()).max(1);
    let u = SpectralUnitary::build(&SpectrumSpec::Shor { n, base, modulus }, seed)?;

    // the state |1> is a uniform mixture of the period-r orbit eigenvectors
    let xi = MainState::basis(n, 1)?;
    let mut counter = CostCounter::new();
    let out = simulate_wizard(&xi, &u, p, &mut counter)?;
    let marginal = out.state().ancilla_marginal();

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let m = 1u64 << p;
    let mut acc = 1u64;
    let mut period = 0u64;
    let mut records = Vec::new();
    for _ in 0..trials {
        // inverse-CDF sample from the exact marginal
        let target: f64 = rng.gen();
        let mut cum = 0.0;
        let mut measured = m - 1;
        for (l, &w) in marginal.iter().enumerate() {
            cum += w;
            if cum >= target {
                measured = l as u64;
                break;
            }
        }
        let convs = convergents(measured, m, modulus);
        let candidate = convs.last().map_or(1, |&(_, d)| d);
        acc = lcm(acc, candidate);
        records.push(ShorTrial {
            measured,
            convergents: convs,
            candidate,
        });
        if pow_mod(base, acc, modulus) == 1 {
            // minimal order: smallest divisor of the accumulated lcm that works
            let mut best = acc;
            let mut d = 1u64;
            while d * d <= acc {
                if acc % d == 0 {
                    if pow_mod(base, d, modulus) == 1 {
                        best = best.min(d);
                    }
                    let other = acc / d;
                    if pow_mod(base, other, modulus) == 1 {
                        best = best.min(other);
                    }
                }
                d += 1;
            }
            period = best;
            break;
        }
    }

    let success = period > 0;
    let factors = if success && modulus == 15 && period % 2 == 0 {
        let half = pow_mod(base, period / 2, 15);
        let f1 = gcd(half + 1, 15);
        let f2 = gcd(half + 14, 15); // half - 1 mod 15
        if f1 > 1 && f1 < 15 && f2 > 1 && f2 < 15 {
            Some((f1.min(f2), f1.max(f2)))
        } else {
            None
        }
    } else {
        None
    };

    Ok(ShorResult {
        modulus,
        base,
        period,
        success,
        trials: records,
        factors,
    })
}
