//! Cross-checks between the independent computational routes.
//!
//! Each suite reports the largest discrepancy it saw against a fixed
//! tolerance. Random environments are uniform on `[-π, π)` per site and are
//! seeded, so reports are reproducible.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use crate::closedform::{self, jacobi};
use crate::coin::{Basis, ChiralityVector, Coin};
use crate::environment::{Environment, EnvironmentSpec, PhaseMeasure};
use crate::error::{Error, Result};
use crate::evolve::evolve_to;
use crate::limit::LimitDensity;
use crate::pathsum::{enumerate_paths, path_matrix, reduce_word, PathSum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    /// Block product table against explicit matrix products.
    ProductTable,
    /// Distributions from evolution, path enumeration and the closed law.
    Oracle,
    /// Path-sum coefficients against their closed forms.
    Coefficients,
    /// Binomial sums against their Jacobi-polynomial forms.
    Jacobi,
    /// The environment-dependent remainder of the quenched law vanishes.
    PhaseRemainder,
    /// The quenched law depends on the origin phase only.
    Locality,
    /// Normalization and moments of the limit densities.
    Limit,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::ProductTable,
        Suite::Oracle,
        Suite::Coefficients,
        Suite::Jacobi,
        Suite::PhaseRemainder,
        Suite::Locality,
        Suite::Limit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ProductTable => "product-table",
            Suite::Oracle => "oracle",
            Suite::Coefficients => "coefficients",
            Suite::Jacobi => "jacobi",
            Suite::PhaseRemainder => "phase-remainder",
            Suite::Locality => "locality",
            Suite::Limit => "limit",
        }
    }

    pub fn tolerance(self) -> f64 {
        match self {
            Suite::ProductTable => 1e-12,
            Suite::Oracle | Suite::Coefficients => 1e-10,
            Suite::Jacobi => 1e-9,
            Suite::PhaseRemainder | Suite::Locality => 1e-12,
            Suite::Limit => 1e-8,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "w2" {
            return Ok(Suite::PhaseRemainder);
        }
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                Error::invalid(format!(
                    "unknown suite {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    /// Largest walk length for the exponential-cost path enumeration.
    pub cap: usize,
    /// Random environments per check.
    pub environments: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            cap: 12,
            environments: 100,
            seed: 0,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cap == 0 {
            return Err(Error::invalid("cap must be at least 1"));
        }
        if self.cap > closedform::DIRECT_SUM_CAP {
            return Err(Error::ResourceLimit {
                what: "verification cap",
                requested: self.cap,
                cap: closedform::DIRECT_SUM_CAP,
            });
        }
        if self.environments == 0 {
            return Err(Error::invalid("need at least one environment"));
        }
        Ok(())
    }

    fn environment(&self, index: usize, extent: usize) -> Result<Environment> {
        EnvironmentSpec::iid(PhaseMeasure::Uniform { lo: -PI, hi: PI })
            .sample(extent, self.seed.wrapping_add(index as u64))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<16} max_error={:.3e} tolerance={:.0e} checks={}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.suite.name(),
            self.max_error,
            self.tolerance,
            self.checks
        )
    }
}

/// Running maximum over a suite's checks. NaN counts as infinite error.
#[derive(Default)]
struct Tally {
    checks: usize,
    worst: f64,
}

impl Tally {
    fn record(&mut self, err: f64) {
        self.checks += 1;
        self.worst = if err.is_nan() {
            f64::INFINITY
        } else {
            self.worst.max(err)
        };
    }

    fn finish(self, suite: Suite) -> SuiteReport {
        SuiteReport {
            suite,
            checks: self.checks,
            max_error: self.worst,
            tolerance: suite.tolerance(),
        }
    }
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> Result<SuiteReport> {
    config.validate()?;
    let mut t = Tally::default();
    match suite {
        Suite::ProductTable => product_table(config, &mut t)?,
        Suite::Oracle => oracle(config, &mut t)?,
        Suite::Coefficients => coefficients(config, &mut t)?,
        Suite::Jacobi => jacobi_identities(&mut t)?,
        Suite::PhaseRemainder => phase_remainder(config, &mut t)?,
        Suite::Locality => locality(config, &mut t)?,
        Suite::Limit => limit(&mut t)?,
    }
    Ok(t.finish(suite))
}

pub fn run_suites(suites: &[Suite], config: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    suites.iter().map(|&s| run_suite(s, config)).collect()
}

fn product_table(config: &VerifyConfig, t: &mut Tally) -> Result<()> {
    let env = config.environment(0, config.cap)?;
    for x in -3..=3 {
        let coin = env.coin(x);
        for lhs in Basis::ALL {
            for rhs in Basis::ALL {
                let (k, out) = coin.multiply_blocks(lhs, rhs);
                let direct = coin.block(lhs) * coin.block(rhs);
                t.record((coin.block(out).scale(k)).max_abs_diff(&direct));
            }
        }
    }
    let hadamard = Coin::hadamard();
    t.record(
        (hadamard.block(Basis::P) + hadamard.block(Basis::Q)).max_abs_diff(&hadamard.matrix()),
    );
    let longest = config.cap.min(10);
    for n in 1..=longest {
        for l in 0..=n {
            for word in enumerate_paths(l, n - l)? {
                let (k, b) = reduce_word(&word, &env);
                let reduced = env.coin(0).block(b).scale(k);
                t.record(reduced.max_abs_diff(&path_matrix(&word, &env)));
            }
        }
    }
    Ok(())
}

fn oracle(config: &VerifyConfig, t: &mut Tally) -> Result<()> {
    let phi = ChiralityVector::symmetric();
    let paths = PathSum::with_cap(config.cap);
    let hadamard = Environment::hadamard();
    for n in 1..=config.cap {
        let had = evolve_to(phi, &hadamard, n)?;
        for i in 0..config.environments {
            let env = config.environment(i, n)?;
            let walked = evolve_to(phi, &env, n)?;
            let summed = paths.oracle_distribution(&env, n, phi)?;
            let closed = closedform::quenched_from_hadamard(n, env.phase(0), &had)?;
            t.record(walked.max_abs_diff(&summed));
            t.record(walked.max_abs_diff(&closed));
            t.record(summed.max_abs_diff(&closed));
        }
    }
    Ok(())
}

fn coefficients(config: &VerifyConfig, t: &mut Tally) -> Result<()> {
    let paths = PathSum::with_cap(config.cap);
    for i in 0..config.environments {
        let env = config.environment(i, config.cap)?;
        for n in 1..=config.cap {
            for l in 0..=n {
                let summed = paths.coefficients(l, n - l, &env)?;
                let closed = closedform::closed_form_coefficients(l, n - l, &env)?;
                t.record(summed.max_abs_diff(&closed));
            }
        }
    }
    Ok(())
}

fn jacobi_identities(t: &mut Tally) -> Result<()> {
    for n in 2..=60usize {
        for k in 1..=n / 2 {
            let weighted = jacobi::weighted_alternating_sum(k, n)?;
            t.record(jacobi::relative_error(
                &weighted,
                &jacobi::weighted_alternating_sum_jacobi(k, n)?,
            ));
            let plain = num_rational::BigRational::from_integer(jacobi::alternating_sum(k, n)?);
            t.record(jacobi::relative_error(
                &plain,
                &jacobi::alternating_sum_jacobi(k, n)?,
            ));
            let (p, q) = closedform::amplitudes_via_jacobi(k, n)?;
            let direct = closedform::hadamard_amplitudes(k, n - k)?;
            for (a, b) in [(p, direct.p_h), (q, direct.q_h)] {
                let scale = a.abs().max(b.abs());
                t.record(if scale == 0.0 {
                    0.0
                } else {
                    (a - b).abs() / scale
                });
            }
        }
    }
    Ok(())
}

/// Every split with `n <= 30` covers all five `l`-vs-`m` orderings and both
/// one-sided boundaries.
fn phase_remainder(config: &VerifyConfig, t: &mut Tally) -> Result<()> {
    const MAX_N: usize = 30;
    let count = config.environments.min(50);
    for i in 0..count {
        let env = config.environment(i, MAX_N)?;
        for n in 1..=MAX_N {
            for l in 0..=n {
                t.record(closedform::phase_remainder_magnitude(l, n - l, &env)?);
            }
        }
    }
    Ok(())
}

fn locality(config: &VerifyConfig, t: &mut Tally) -> Result<()> {
    let phi = ChiralityVector::symmetric();
    let count = config.environments.min(20);
    for omega0 in [0.0, PI / 6.0, FRAC_PI_2, -FRAC_PI_4] {
        for n in [4usize, 50, 500] {
            let reference = evolve_to(phi, &Environment::constant(0.0)?.with_phase(0, omega0)?, n)?;
            for i in 0..count {
                let env = config.environment(i, n)?.with_phase(0, omega0)?;
                t.record(evolve_to(phi, &env, n)?.max_abs_diff(&reference));
            }
        }
    }
    Ok(())
}

fn limit(t: &mut Tally) -> Result<()> {
    t.record((crate::limit::hadamard_limit_density(0.0) - 1.0 / PI).abs());
    for omega0 in [0.0, PI / 6.0, PI / 3.0, FRAC_PI_2, -FRAC_PI_4] {
        let d = LimitDensity::quenched(omega0)?;
        t.record((d.total_mass() - 1.0).abs());
        let (m, v) = d.moments();
        let (mq, vq) = d.moments_by_quadrature();
        t.record((m - mq).abs());
        t.record((v - vq).abs());
    }
    Ok(())
}
