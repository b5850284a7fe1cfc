//! Environment-averaged (annealed) position laws.
//!
//! The quenched law at time `n` depends on the environment only through
//! `ω_0`, and each mass has the form `A + B cos ω_0 + C sin ω_0`. Averaging
//! is therefore exact with four walks, at `ω_0 ∈ {0, π/2, -π/2, π}`, combined
//! with `E[cos ω_0]` and `E[sin ω_0]`. From the symmetric qubit `B` vanishes.
//! [`annealed_monte_carlo`] makes no use of this structure and serves as the
//! independent check.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::coin::ChiralityVector;
use crate::environment::EnvironmentSpec;
use crate::error::{Error, Result};
use crate::evolve::{evolve_to, Distribution, MASS_TOL};

/// Exact annealed law of `X_n`. Sites other than the origin are drawn from
/// `spec` with `seed`; they do not affect the result.
pub fn annealed_exact(
    spec: &EnvironmentSpec,
    n: usize,
    qubit: ChiralityVector,
    seed: u64,
) -> Result<Distribution> {
    spec.validate()?;
    let background = spec.sample(n, seed)?;
    let origin = spec.measure_at(0);
    let at = |omega0: f64| -> Result<Distribution> {
        let env = background.clone().with_phase(0, omega0)?;
        evolve_to(qubit, &env, n)
    };
    let (ec, es) = (origin.mean_cos(), origin.mean_sin());
    let east = at(0.0)?;
    let west = at(PI)?;
    let up = at(FRAC_PI_2)?;
    let down = at(-FRAC_PI_2)?;
    let masses = (0..=n)
        .map(|j| {
            let (e, w, u, d) = (
                east.masses()[j],
                west.masses()[j],
                up.masses()[j],
                down.masses()[j],
            );
            let p = 0.5 * (u + d) + 0.5 * ec * (e - w) + 0.5 * es * (u - d);
            if p < -MASS_TOL {
                return Err(Error::InternalConsistency(format!(
                    "annealed mass {p} at index {j}"
                )));
            }
            Ok(p.max(0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    Distribution::from_masses(n, masses).map_err(|e| Error::InternalConsistency(e.to_string()))
}

/// Sample mean of quenched laws over independent environments, with
/// per-position standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnealedEstimate {
    pub mean: Distribution,
    /// Standard error at each parity-class position, aligned with
    /// `mean.masses()`.
    pub std_errors: Vec<f64>,
    pub samples: usize,
}

impl AnnealedEstimate {
    pub fn std_error(&self, x: i64) -> f64 {
        let n = self.mean.time() as i64;
        if x.abs() > n || (x + n) % 2 != 0 {
            return 0.0;
        }
        self.std_errors[((x + n) / 2) as usize]
    }
}

pub fn annealed_monte_carlo(
    spec: &EnvironmentSpec,
    n: usize,
    qubit: ChiralityVector,
    samples: usize,
    seed: u64,
) -> Result<AnnealedEstimate> {
    if samples < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    spec.validate()?;
    let mut sum = vec![0.0; n + 1];
    let mut sum_sq = vec![0.0; n + 1];
    for i in 0..samples {
        let env = spec.sample(n, sample_seed(seed, i as u64))?;
        let d = evolve_to(qubit, &env, n)?;
        for (j, p) in d.masses().iter().enumerate() {
            sum[j] += p;
            sum_sq[j] += p * p;
        }
    }
    let k = samples as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / k).collect();
    let std_errors = mean
        .iter()
        .zip(&sum_sq)
        .map(|(m, sq)| {
            let var = ((sq - k * m * m) / (k - 1.0)).max(0.0);
            (var / k).sqrt()
        })
        .collect();
    let mean = Distribution::from_masses(n, mean)?;
    Ok(AnnealedEstimate {
        mean,
        std_errors,
        samples,
    })
}

/// SplitMix64 finalizer over `(seed, index)`.
fn sample_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
