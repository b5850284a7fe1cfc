//! Closed forms for the path-sum coefficients of the phase-coin walk.
//!
//! Every coefficient of `Ξ_n(l, m)` factors into a real Hadamard-walk
//! amplitude (an alternating binomial sum) times a unit-modulus phase built
//! from partial sums of site phases. Squaring out the phases leaves a
//! correction to the Hadamard law that depends on `ω_0` alone.
//!
//! This module is a verification surface. Large-`n` distributions come from
//! [`crate::evolve`].

pub mod jacobi;

use std::f64::consts::FRAC_1_SQRT_2;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::evolve::Distribution;
use crate::pathsum::PqrsCoefficients;

pub use jacobi::{jacobi_p, jacobi_p_exact};

/// Largest `l + m` for which the binomial sums are evaluated.
pub const DIRECT_SUM_CAP: usize = 64;

/// Closed-form masses below this are treated as a bug rather than rounding.
const NEGATIVE_MASS_TOL: f64 = 1e-10;

/// Real amplitudes of the Hadamard walk (`ω ≡ 0`) in the P/Q/R/S basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HadamardAmplitudes {
    pub p_h: f64,
    pub q_h: f64,
    pub r_h: f64,
    pub s_h: f64,
}

/// Unit-modulus phases multiplying the Hadamard amplitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseFactors {
    pub theta_p: Complex64,
    pub theta_q: Complex64,
    pub theta_r: Complex64,
    pub theta_s: Complex64,
}

/// `2^{-k/2}`, exact for even `k`.
fn inv_sqrt2_pow(k: usize) -> f64 {
    let half = 0.5f64.powi((k / 2) as i32);
    if k.is_multiple_of(2) {
        half
    } else {
        half * FRAC_1_SQRT_2
    }
}

fn binomial_i128(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

/// `Σ_{γ=1}^{upper} (-1)^{sign_offset - γ} C(a, γ - da) C(b, γ - db)` in
/// exact integers.
fn signed_binomial_sum(
    upper: usize,
    sign_offset: usize,
    a: usize,
    da: usize,
    b: usize,
    db: usize,
) -> Result<i128> {
    let overflow = || Error::ResourceLimit {
        what: "binomial sum size",
        requested: a + b + 2,
        cap: DIRECT_SUM_CAP,
    };
    let mut acc: i128 = 0;
    for g in 1..=upper {
        let term = binomial_i128(a, g - da)
            .checked_mul(binomial_i128(b, g - db))
            .ok_or_else(overflow)?;
        acc = if (sign_offset + g).is_multiple_of(2) {
            acc.checked_add(term)
        } else {
            acc.checked_sub(term)
        }
        .ok_or_else(overflow)?;
    }
    Ok(acc)
}

fn check_split(l: usize, m: usize) -> Result<()> {
    let n = l + m;
    if n == 0 {
        return Err(Error::EmptyWalk);
    }
    if n > DIRECT_SUM_CAP {
        return Err(Error::ResourceLimit {
            what: "walk length for direct summation",
            requested: n,
            cap: DIRECT_SUM_CAP,
        });
    }
    Ok(())
}

/// Hadamard amplitudes `p^(H), q^(H), r^(H) = s^(H)` for `l` left and `m`
/// right moves, including the one-sided boundaries.
pub fn hadamard_amplitudes(l: usize, m: usize) -> Result<HadamardAmplitudes> {
    check_split(l, m)?;
    let n = l + m;
    let scale = inv_sqrt2_pow(n - 1);
    if l == 0 {
        let sign = if (n - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        return Ok(HadamardAmplitudes {
            p_h: 0.0,
            q_h: sign * scale,
            r_h: 0.0,
            s_h: 0.0,
        });
    }
    if m == 0 {
        return Ok(HadamardAmplitudes {
            p_h: scale,
            q_h: 0.0,
            r_h: 0.0,
            s_h: 0.0,
        });
    }
    // (-1)^{m-γ} has the parity of m + γ; (-1)^{m-γ-1} of m + 1 + γ.
    let p = signed_binomial_sum((l - 1).min(m), m, l - 1, 0, m - 1, 1)?;
    let q = signed_binomial_sum(l.min(m - 1), m + 1, l - 1, 1, m - 1, 0)?;
    let r = signed_binomial_sum(l.min(m), m, l - 1, 1, m - 1, 1)?;
    let r_h = r as f64 * scale;
    Ok(HadamardAmplitudes {
        p_h: p as f64 * scale,
        q_h: q as f64 * scale,
        r_h,
        s_h: r_h,
    })
}

/// Phase factors for `l` left and `m` right moves in `env`.
///
/// The `(n, 0)` boundary uses `e^{+i(ω_{-1}+…+ω_{-(n-1)})}`, which is what
/// direct reduction of `P_{-(n-1)}⋯P_{-1}P_0` gives and coincides with the
/// `l - 1 > m` branch.
pub fn phase_factors(l: usize, m: usize, env: &Environment) -> PhaseFactors {
    let cis = |t: f64| Complex64::from_polar(1.0, t);
    let one = Complex64::new(1.0, 0.0);
    let (l, m) = (l as i64, m as i64);
    let sum = |from: i64, to: i64| env.phase_sum(from, to);

    let theta_p = if l - 1 > m {
        cis(sum(-1, -(l - m - 1)))
    } else if l - 1 == m {
        one
    } else {
        cis(-sum(0, m - l))
    };
    let theta_q = if l == 0 {
        // Explicit one-sided clause; the site range is empty for m = 1.
        if m > 1 {
            cis(-sum(1, m - 1))
        } else {
            one
        }
    } else if l > m - 1 {
        cis(sum(0, -(l - m)))
    } else if l == m - 1 {
        one
    } else {
        cis(-sum(1, m - l - 1))
    };
    let theta_r = if l > m {
        cis(sum(0, -(l - m - 1)))
    } else if l == m {
        one
    } else {
        cis(-sum(1, m - l))
    };
    let theta_s = if l > m {
        cis(sum(-1, -(l - m)))
    } else if l == m {
        one
    } else {
        cis(-sum(0, m - l - 1))
    };

    if l == 0 {
        return PhaseFactors {
            theta_p: one,
            theta_q,
            theta_r: one,
            theta_s: one,
        };
    }
    if m == 0 {
        return PhaseFactors {
            theta_p,
            theta_q: one,
            theta_r: one,
            theta_s: one,
        };
    }
    PhaseFactors {
        theta_p,
        theta_q,
        theta_r,
        theta_s,
    }
}

/// `Ξ_n(l, m)` coefficients as phase × Hadamard amplitude.
pub fn closed_form_coefficients(l: usize, m: usize, env: &Environment) -> Result<PqrsCoefficients> {
    let amp = hadamard_amplitudes(l, m)?;
    let th = phase_factors(l, m, env);
    Ok(PqrsCoefficients {
        p: th.theta_p * amp.p_h,
        q: th.theta_q * amp.q_h,
        r: th.theta_r * amp.r_h,
        s: th.theta_s * amp.s_h,
    })
}

/// `p^(H)_n(l, n-l)` and `q^(H)_n(l, n-l)` from Jacobi polynomials at 0,
/// for `1 <= l <= n/2`. The bracketed polynomial combinations are formed
/// exactly before rounding.
pub fn amplitudes_via_jacobi(l: usize, n: usize) -> Result<(f64, f64)> {
    if l == 0 || 2 * l > n {
        return Err(Error::invalid(format!(
            "need 1 <= l <= n/2, got l={l}, n={n}"
        )));
    }
    let mu = (n - 2 * l) as i64;
    let p0 = jacobi::jacobi_at_zero(l - 1, 0, mu)?;
    let p1 = jacobi::jacobi_at_zero(l - 1, 1, mu)?;
    let ratio = BigRational::new(BigInt::from(n - l), BigInt::from(l));
    let p_bracket = (&p0 - &p1).to_f64().unwrap_or(f64::NAN);
    let q_bracket = (ratio * &p1 - &p0).to_f64().unwrap_or(f64::NAN);
    let sign = if (n - l).is_multiple_of(2) { 1.0 } else { -1.0 };
    let scale = sign * inv_sqrt2_pow(n - 2 * l + 1);
    Ok((scale * p_bracket, scale * q_bracket))
}

/// `P^0_n(x) + ½{p^(H)² - q^(H)²} sin ω_0` at every position.
pub fn quenched_from_hadamard(
    n: usize,
    omega0: f64,
    hadamard_dist: &Distribution,
) -> Result<Distribution> {
    if n == 0 {
        return Err(Error::EmptyWalk);
    }
    if hadamard_dist.time() != n {
        return Err(Error::invalid(format!(
            "Hadamard distribution is at time {}, expected {n}",
            hadamard_dist.time()
        )));
    }
    if !omega0.is_finite() {
        return Err(Error::invalid(format!(
            "phase must be finite, got {omega0}"
        )));
    }
    let sin0 = omega0.sin();
    let mut masses = Vec::with_capacity(n + 1);
    for (m, base) in hadamard_dist.masses().iter().enumerate() {
        let amp = hadamard_amplitudes(n - m, m)?;
        let mass = base + 0.5 * (amp.p_h * amp.p_h - amp.q_h * amp.q_h) * sin0;
        if mass < -NEGATIVE_MASS_TOL {
            return Err(Error::InternalConsistency(format!(
                "mass {mass} at position {} for n={n}, ω₀={omega0}",
                2 * m as i64 - n as i64
            )));
        }
        masses.push(mass.max(0.0));
    }
    let d = Distribution::from_masses_unchecked(n, masses);
    d.validate()
        .map_err(|e| Error::InternalConsistency(e.to_string()))?;
    Ok(d)
}

/// The environment-dependent remainder `W₂(ω)` of the quenched law.
pub fn phase_remainder(l: usize, m: usize, env: &Environment) -> Result<f64> {
    let amp = hadamard_amplitudes(l, m)?;
    let th = phase_factors(l, m, env);
    let k = Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, 2.0 * env.phase(0));
    let pr = (k * th.theta_p * th.theta_r.conj()).im;
    let sq = (k * th.theta_s * th.theta_q.conj()).im;
    Ok(-0.5 * amp.r_h * (amp.p_h * pr + amp.q_h * sq))
}

/// `|W₂(ω)|`; should vanish to rounding for every split.
pub fn phase_remainder_magnitude(l: usize, m: usize, env: &Environment) -> Result<f64> {
    Ok(phase_remainder(l, m, env)?.abs())
}

/// `W₁(ω_0) = ½{p^(H)² - q^(H)²} sin ω_0`.
pub fn origin_correction(l: usize, m: usize, omega0: f64) -> Result<f64> {
    let amp = hadamard_amplitudes(l, m)?;
    Ok(0.5 * (amp.p_h * amp.p_h - amp.q_h * amp.q_h) * omega0.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::ChiralityVector;
    use crate::environment::{EnvironmentSpec, PhaseMeasure};
    use crate::evolve::evolve_to;
    use crate::pathsum::PathSum;
    use std::f64::consts::PI;

    fn random_env(seed: u64, extent: usize) -> Environment {
        EnvironmentSpec::iid(PhaseMeasure::Uniform { lo: -PI, hi: PI })
            .sample(extent, seed)
            .unwrap()
    }

    fn cis(t: f64) -> Complex64 {
        Complex64::from_polar(1.0, t)
    }

    #[test]
    fn three_one_amplitudes() {
        let h3 = FRAC_1_SQRT_2.powi(3);
        let a = hadamard_amplitudes(3, 1).unwrap();
        assert!((a.p_h - 2.0 * h3).abs() < 1e-15);
        assert_eq!(a.q_h, 0.0);
        assert!((a.r_h - h3).abs() < 1e-15);
        assert_eq!(a.r_h, a.s_h);
    }

    #[test]
    fn boundary_amplitudes() {
        for n in 1..=20usize {
            let h = FRAC_1_SQRT_2.powi(n as i32 - 1);
            let left = hadamard_amplitudes(n, 0).unwrap();
            assert!((left.p_h - h).abs() < 1e-15);
            assert_eq!((left.q_h, left.r_h, left.s_h), (0.0, 0.0, 0.0));
            let right = hadamard_amplitudes(0, n).unwrap();
            assert!((right.q_h - (-FRAC_1_SQRT_2).powi(n as i32 - 1)).abs() < 1e-15);
            assert_eq!((right.p_h, right.r_h, right.s_h), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn amplitude_errors() {
        assert!(matches!(hadamard_amplitudes(0, 0), Err(Error::EmptyWalk)));
        assert!(matches!(
            hadamard_amplitudes(40, 25),
            Err(Error::ResourceLimit { .. })
        ));
        assert!(hadamard_amplitudes(32, 32).is_ok());
    }

    #[test]
    fn r_equals_s_everywhere() {
        for n in 1..=64usize {
            for l in 0..=n {
                let a = hadamard_amplitudes(l, n - l).unwrap();
                assert_eq!(a.r_h, a.s_h);
            }
        }
    }

    #[test]
    fn hadamard_amplitudes_are_normalized() {
        // Σ_x tr(Ξ*Ξ) = 2: total probability 1 for each of two basis qubits.
        for n in 1..=64usize {
            let total: f64 = (0..=n)
                .map(|l| {
                    let a = hadamard_amplitudes(l, n - l).unwrap();
                    a.p_h * a.p_h + a.q_h * a.q_h + a.r_h * a.r_h + a.s_h * a.s_h
                })
                .sum();
            assert!((total - 2.0).abs() < 1e-12, "n={n}: {total}");
        }
    }

    #[test]
    fn three_one_phases() {
        let env = random_env(1, 5);
        let w = |x: i64| env.phase(x);
        let th = phase_factors(3, 1, &env);
        assert!((th.theta_p - cis(w(-1))).norm() < 1e-15);
        assert!((th.theta_q - cis(w(0) + w(-1) + w(-2))).norm() < 1e-15);
        assert!((th.theta_r - cis(w(0) + w(-1))).norm() < 1e-15);
        assert!((th.theta_s - cis(w(-1) + w(-2))).norm() < 1e-15);
    }

    #[test]
    fn balanced_splits_have_trivial_r_and_s_phases() {
        let env = random_env(2, 10);
        for l in 1..8 {
            let th = phase_factors(l, l, &env);
            assert_eq!(th.theta_r, Complex64::new(1.0, 0.0));
            assert_eq!(th.theta_s, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn hadamard_environment_has_unit_phases() {
        let env = Environment::hadamard();
        for n in 1..=12usize {
            for l in 0..=n {
                let th = phase_factors(l, n - l, &env);
                for t in [th.theta_p, th.theta_q, th.theta_r, th.theta_s] {
                    assert_eq!(t, Complex64::new(1.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn phases_have_unit_modulus() {
        let env = random_env(3, 30);
        for n in 1..=30usize {
            for l in 0..=n {
                let th = phase_factors(l, n - l, &env);
                for t in [th.theta_p, th.theta_q, th.theta_r, th.theta_s] {
                    assert!((t.norm() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_oracle() {
        let oracle = PathSum::default();
        for seed in 0..20 {
            let env = random_env(seed, 12);
            for n in 1..=10usize {
                for l in 0..=n {
                    let a = oracle.coefficients(l, n - l, &env).unwrap();
                    let b = closed_form_coefficients(l, n - l, &env).unwrap();
                    assert!(a.max_abs_diff(&b) < 1e-10, "seed {seed} l={l} m={}", n - l);
                }
            }
        }
        let env = random_env(99, 3);
        let a = oracle.coefficients(1, 1, &env).unwrap();
        let b = closed_form_coefficients(1, 1, &env).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn jacobi_route_matches_direct_sums() {
        let mut worst = 0.0f64;
        for n in 2..=60usize {
            for l in 1..=n / 2 {
                let (pj, qj) = amplitudes_via_jacobi(l, n).unwrap();
                let a = hadamard_amplitudes(l, n - l).unwrap();
                for (x, y) in [(pj, a.p_h), (qj, a.q_h)] {
                    let scale = x.abs().max(y.abs());
                    if scale > 0.0 {
                        worst = worst.max((x - y).abs() / scale);
                    }
                }
            }
        }
        assert!(worst < 1e-9, "relative error {worst}");
        assert!(amplitudes_via_jacobi(0, 4).is_err());
        assert!(amplitudes_via_jacobi(3, 5).is_err());
    }

    #[test]
    fn one_three_via_jacobi() {
        let (p, q) = amplitudes_via_jacobi(1, 4).unwrap();
        let a = hadamard_amplitudes(1, 3).unwrap();
        assert!((p - a.p_h).abs() < 1e-15);
        assert!((q - a.q_h).abs() < 1e-15);
    }

    #[test]
    fn closed_law_four_step_table() {
        let phi = ChiralityVector::symmetric();
        let had = evolve_to(phi, &Environment::hadamard(), 4).unwrap();
        for omega0 in [0.0, PI / 6.0, PI / 2.0, -PI / 4.0, 2.0] {
            let d = quenched_from_hadamard(4, omega0, &had).unwrap();
            let s = omega0.sin();
            let expected = [1.0 + s, 6.0 + 4.0 * s, 2.0, 6.0 - 4.0 * s, 1.0 - s];
            for (got, want) in d.masses().iter().zip(expected) {
                assert!((got - want / 16.0).abs() < 1e-12);
            }
        }
        assert_eq!(quenched_from_hadamard(4, 0.0, &had).unwrap(), had);
    }

    #[test]
    fn closed_law_matches_evolution() {
        let phi = ChiralityVector::symmetric();
        for n in 1..=40usize {
            let had = evolve_to(phi, &Environment::hadamard(), n).unwrap();
            for seed in 0..5 {
                let env = random_env(seed * 31 + n as u64, n);
                let d = quenched_from_hadamard(n, env.phase(0), &had).unwrap();
                assert!(d.max_abs_diff(&evolve_to(phi, &env, n).unwrap()) < 1e-10);
            }
        }
    }

    #[test]
    fn closed_law_argument_errors() {
        let had = evolve_to(ChiralityVector::symmetric(), &Environment::hadamard(), 4).unwrap();
        assert!(quenched_from_hadamard(5, 0.1, &had).is_err());
        assert!(quenched_from_hadamard(4, f64::NAN, &had).is_err());
    }

    #[test]
    fn closed_law_flags_non_hadamard_input() {
        // All mass at -1 is not the one-step Hadamard law; the correction
        // then drives the mass at +1 to -1/2.
        let fake = Distribution::from_masses(1, vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            quenched_from_hadamard(1, PI / 2.0, &fake),
            Err(Error::InternalConsistency(_))
        ));
    }

    #[test]
    fn phase_remainder_vanishes() {
        let mut worst = 0.0f64;
        for seed in 0..20 {
            let env = random_env(seed, 30);
            for n in 1..=30usize {
                for l in 0..=n {
                    worst = worst.max(phase_remainder_magnitude(l, n - l, &env).unwrap());
                }
            }
        }
        assert!(worst < 1e-12, "{worst}");
        for n in 1..=12usize {
            for l in 0..=n {
                assert_eq!(
                    phase_remainder_magnitude(l, n - l, &Environment::hadamard()).unwrap(),
                    0.0
                );
            }
        }
    }

    #[test]
    fn decomposition_reproduces_oracle_law() {
        // P^ω = P^0 + W₁ + W₂ with the oracle computing both P^ω and P^0.
        let phi = ChiralityVector::symmetric();
        let oracle = PathSum::default();
        for seed in 0..5 {
            let env = random_env(seed, 10);
            for n in 1..=9usize {
                let quenched = oracle.oracle_distribution(&env, n, phi).unwrap();
                let had = oracle
                    .oracle_distribution(&Environment::hadamard(), n, phi)
                    .unwrap();
                for m in 0..=n {
                    let x = m as i64 - (n - m) as i64;
                    let predicted = had.get(x)
                        + origin_correction(n - m, m, env.phase(0)).unwrap()
                        + phase_remainder(n - m, m, &env).unwrap();
                    assert!((predicted - quenched.get(x)).abs() < 1e-12);
                }
            }
        }
    }
}
