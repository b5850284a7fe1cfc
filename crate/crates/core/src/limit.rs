//! Weak-limit densities of `X_n / n` and finite-`n` convergence diagnostics.
//!
//! The limit law has density `(1 - s·x)·f_K(x)` on `(-1/√2, 1/√2)` where
//! `f_K(x) = 1 / (π (1 - x²) √(1 - 2x²))` and `s` is `sin ω_0` (quenched) or
//! `E[sin ω_0]` (annealed). All integrals go through the substitution
//! `x = sin(t)/√2`, under which `f_K(x) dx = dt / (√2 π (1 - sin²t / 2))`
//! and the endpoint singularity disappears.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64;

use crate::coin::ChiralityVector;
use crate::environment::{Environment, PhaseMeasure};
use crate::error::{Error, Result};
use crate::evolve::{evolve_to, Distribution};
use crate::quadrature::{integrate, integrate_complex};

/// Absolute error target for density integrals.
pub const QUAD_TOL: f64 = 1e-12;

/// Variance of `f_K`, `(2 - √2)/2`.
pub const HADAMARD_LIMIT_VARIANCE: f64 = 1.0 - FRAC_1_SQRT_2;

/// `f_K(x)`; zero outside the open interval `(-1/√2, 1/√2)`.
pub fn hadamard_limit_density(x: f64) -> f64 {
    if !(x.abs() < FRAC_1_SQRT_2) {
        return 0.0;
    }
    let x2 = x * x;
    1.0 / (PI * (1.0 - x2) * (1.0 - 2.0 * x2).sqrt())
}

/// Limit density `(1 - mean_sin·x) f_K(x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitDensity {
    mean_sin: f64,
}

impl LimitDensity {
    pub fn new(mean_sin: f64) -> Result<Self> {
        if !(mean_sin.abs() <= 1.0) {
            return Err(Error::invalid(format!(
                "sine coefficient must lie in [-1, 1], got {mean_sin}"
            )));
        }
        Ok(LimitDensity { mean_sin })
    }

    /// Quenched limit for an environment with origin phase `omega0`.
    pub fn quenched(omega0: f64) -> Result<Self> {
        if !omega0.is_finite() {
            return Err(Error::invalid(format!(
                "phase must be finite, got {omega0}"
            )));
        }
        Self::new(omega0.sin())
    }

    /// Annealed limit when `ω_0` has law `measure`.
    pub fn annealed(measure: &PhaseMeasure) -> Result<Self> {
        measure.validate()?;
        if measure.is_symmetric() {
            return Self::new(0.0);
        }
        Self::new(measure.mean_sin())
    }

    pub fn mean_sin(&self) -> f64 {
        self.mean_sin
    }

    pub fn support(&self) -> (f64, f64) {
        (-FRAC_1_SQRT_2, FRAC_1_SQRT_2)
    }

    pub fn density(&self, x: f64) -> f64 {
        (1.0 - self.mean_sin * x) * hadamard_limit_density(x)
    }

    /// Density in the angle variable `t`, with `x = sin(t)/√2`.
    fn angular(&self, t: f64) -> f64 {
        let s = t.sin();
        (1.0 - self.mean_sin * s * FRAC_1_SQRT_2) / (SQRT_2 * PI * (1.0 - 0.5 * s * s))
    }

    /// Probability of `[u, v]`; infinite endpoints are allowed.
    pub fn probability(&self, u: f64, v: f64) -> Result<f64> {
        if u.is_nan() || v.is_nan() || u > v {
            return Err(Error::invalid(format!("need u <= v, got [{u}, {v}]")));
        }
        let ta = to_angle(u);
        let tb = to_angle(v);
        Ok(integrate(|t| self.angular(t), ta, tb, QUAD_TOL))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        integrate(|t| self.angular(t), -0.5 * PI, to_angle(x), QUAD_TOL)
    }

    pub fn total_mass(&self) -> f64 {
        integrate(|t| self.angular(t), -0.5 * PI, 0.5 * PI, QUAD_TOL)
    }

    /// Closed-form `(mean, variance)`:
    /// mean `-s(2-√2)/2`, variance `(2-√2)/2 · {1 - (2-√2)/2 · s²}`.
    pub fn moments(&self) -> (f64, f64) {
        let s = self.mean_sin;
        (
            -s * HADAMARD_LIMIT_VARIANCE,
            HADAMARD_LIMIT_VARIANCE * (1.0 - HADAMARD_LIMIT_VARIANCE * s * s),
        )
    }

    /// `(mean, variance)` by quadrature.
    pub fn moments_by_quadrature(&self) -> (f64, f64) {
        let x = |t: f64| t.sin() * FRAC_1_SQRT_2;
        let mean = integrate(|t| x(t) * self.angular(t), -0.5 * PI, 0.5 * PI, QUAD_TOL);
        let second = integrate(
            |t| x(t) * x(t) * self.angular(t),
            -0.5 * PI,
            0.5 * PI,
            QUAD_TOL,
        );
        (mean, second - mean * mean)
    }

    /// `∫ e^{iξx} density(x) dx`.
    pub fn characteristic(&self, xi: f64) -> Complex64 {
        integrate_complex(
            |t| Complex64::from_polar(self.angular(t), xi * t.sin() * FRAC_1_SQRT_2),
            -0.5 * PI,
            0.5 * PI,
            QUAD_TOL,
        )
    }

    /// `points` equally spaced interior nodes `x_i = a(2i - (points-1))/(points+1)`
    /// with `a = 1/√2`, paired with the density. The endpoints, where the
    /// density diverges, are excluded; an odd count includes `x = 0`.
    pub fn grid(&self, points: usize) -> Result<Vec<(f64, f64)>> {
        if points == 0 {
            return Err(Error::invalid("density grid needs at least one point"));
        }
        let denom = (points + 1) as f64;
        Ok((0..points)
            .map(|i| {
                let x = FRAC_1_SQRT_2 * (2.0 * i as f64 - (points - 1) as f64) / denom;
                (x, self.density(x))
            })
            .collect())
    }

    /// Sup-distance between the law of `X_n / n` and this density's CDF.
    ///
    /// The discrete CDF is constant between atoms and the limit CDF is
    /// monotone, so checking both one-sided limits at every atom attains the
    /// supremum.
    pub fn kolmogorov_distance(&self, dist: &Distribution) -> f64 {
        let scale = dist.time().max(1) as f64;
        let mut discrete = 0.0;
        let mut limit = 0.0;
        let mut prev_angle = -0.5 * PI;
        let mut worst = 0.0f64;
        for (x, p) in dist.iter() {
            let angle = to_angle(x as f64 / scale);
            limit += integrate(|t| self.angular(t), prev_angle, angle, QUAD_TOL);
            prev_angle = angle;
            worst = worst.max((discrete - limit).abs());
            discrete += p;
            worst = worst.max((discrete - limit).abs());
        }
        worst.min(1.0)
    }
}

/// `asin(√2 x)`, clamped to `[-π/2, π/2]`.
fn to_angle(x: f64) -> f64 {
    if x <= -FRAC_1_SQRT_2 {
        -0.5 * PI
    } else if x >= FRAC_1_SQRT_2 {
        0.5 * PI
    } else {
        (SQRT_2 * x).asin()
    }
}

pub fn quenched_limit_density(omega0: f64) -> Result<LimitDensity> {
    LimitDensity::quenched(omega0)
}

pub fn annealed_limit_density(measure: &PhaseMeasure) -> Result<LimitDensity> {
    LimitDensity::annealed(measure)
}

/// What a convergence sweep walks in.
#[derive(Clone, Debug)]
pub enum WalkSource {
    /// A fixed environment; the limit uses its origin phase.
    Environment(Environment),
    /// `ω_x = omega0` at every site.
    ConstantPhase(f64),
}

impl WalkSource {
    fn environment(&self) -> Result<Environment> {
        match self {
            WalkSource::Environment(env) => Ok(env.clone()),
            WalkSource::ConstantPhase(w) => Environment::constant(*w),
        }
    }
}

/// Finite-`n` diagnostics against the quenched limit.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub n_values: Vec<usize>,
    pub ks_distances: Vec<f64>,
    pub empirical_means: Vec<f64>,
    pub empirical_variances: Vec<f64>,
    pub limit_mean: f64,
    pub limit_variance: f64,
}

impl ConvergenceReport {
    /// Whether the distances strictly decrease along the sweep.
    pub fn ks_strictly_decreasing(&self) -> bool {
        self.ks_distances.windows(2).all(|w| w[1] < w[0])
    }
}

pub fn convergence_report(
    source: &WalkSource,
    n_values: &[usize],
    qubit: ChiralityVector,
) -> Result<ConvergenceReport> {
    if n_values.is_empty() {
        return Err(Error::invalid("no times given"));
    }
    if n_values[0] == 0 || n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(format!(
            "times must be positive and strictly ascending, got {n_values:?}"
        )));
    }
    let env = source.environment()?;
    let density = LimitDensity::quenched(env.phase(0))?;
    let (limit_mean, limit_variance) = density.moments();
    let mut report = ConvergenceReport {
        n_values: n_values.to_vec(),
        ks_distances: Vec::with_capacity(n_values.len()),
        empirical_means: Vec::with_capacity(n_values.len()),
        empirical_variances: Vec::with_capacity(n_values.len()),
        limit_mean,
        limit_variance,
    };
    for &n in n_values {
        let dist = evolve_to(qubit, &env, n)?;
        let (mean, var) = dist.scaled_moments();
        report.ks_distances.push(density.kolmogorov_distance(&dist));
        report.empirical_means.push(mean);
        report.empirical_variances.push(var);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closed-form CDF of `(1 - s x) f_K`, from antiderivatives in the
    /// angle variable: `atan(tan t / √2)/π + 1/2` and `-atan(cos t)/π`.
    fn cdf_oracle(s: f64, x: f64) -> f64 {
        if x <= -FRAC_1_SQRT_2 {
            return 0.0;
        }
        if x >= FRAC_1_SQRT_2 {
            return 1.0;
        }
        let t = (SQRT_2 * x).asin();
        let base = (t.tan() / SQRT_2).atan() / PI + 0.5;
        let first = -(t.cos()).atan() / PI;
        base - s * first
    }

    /// Midpoint rule directly in `x`, refined toward the endpoints.
    fn riemann(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
        let h = (b - a) / steps as f64;
        (0..steps).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
    }

    #[test]
    fn grid_is_interior_and_symmetric() {
        let d = LimitDensity::quenched(0.0).unwrap();
        let g = d.grid(1001).unwrap();
        assert_eq!(g.len(), 1001);
        assert_eq!(g[500].0, 0.0);
        assert!((g[500].1 - 1.0 / PI).abs() < 1e-15);
        assert!(g
            .iter()
            .all(|(x, f)| x.abs() < FRAC_1_SQRT_2 && f.is_finite()));
        assert!((g[0].0 + g[1000].0).abs() < 1e-15);
        assert!(d.grid(0).is_err());
    }

    #[test]
    fn hadamard_limit_density_values() {
        assert!((hadamard_limit_density(0.0) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(hadamard_limit_density(FRAC_1_SQRT_2), 0.0);
        assert_eq!(hadamard_limit_density(-FRAC_1_SQRT_2), 0.0);
        assert_eq!(hadamard_limit_density(0.9), 0.0);
        let expected = 1.0 / (PI * 0.75 * 0.5f64.sqrt());
        assert!((hadamard_limit_density(0.5) - expected).abs() < 1e-15);
        assert!((hadamard_limit_density(0.5) - 0.600_210_877_4).abs() < 1e-10);
        for x in [0.1, 0.33, 0.7] {
            assert_eq!(hadamard_limit_density(x), hadamard_limit_density(-x));
        }
    }

    #[test]
    fn quenched_special_cases() {
        let d = LimitDensity::quenched(0.0).unwrap();
        for x in [-0.6, -0.2, 0.0, 0.4] {
            assert_eq!(d.density(x), hadamard_limit_density(x));
        }
        let d = LimitDensity::quenched(PI / 2.0).unwrap();
        for x in [-0.6, -0.2, 0.0, 0.4] {
            assert!((d.density(x) - (1.0 - x) * hadamard_limit_density(x)).abs() < 1e-15);
        }
        assert!(LimitDensity::quenched(f64::NAN).is_err());
        assert!(LimitDensity::new(1.5).is_err());
    }

    #[test]
    fn opposite_phases_mirror() {
        let a = LimitDensity::quenched(0.8).unwrap();
        let b = LimitDensity::quenched(-0.8).unwrap();
        for x in [-0.65, -0.3, 0.0, 0.2, 0.5] {
            assert!((a.density(x) - b.density(-x)).abs() < 1e-14);
        }
        for (u, v) in [(-0.5, 0.1), (0.0, 0.7), (-1.0, -0.2)] {
            let pa = a.probability(u, v).unwrap();
            let pb = b.probability(-v, -u).unwrap();
            assert!((pa - pb).abs() < 1e-12);
        }
    }

    #[test]
    fn annealed_cases() {
        let uni = LimitDensity::annealed(&PhaseMeasure::Uniform { lo: -PI, hi: PI }).unwrap();
        assert_eq!(uni.mean_sin(), 0.0);
        let delta = LimitDensity::annealed(&PhaseMeasure::Delta { at: PI / 2.0 }).unwrap();
        assert_eq!(delta.mean_sin(), 1.0);
        let two = LimitDensity::annealed(&PhaseMeasure::TwoPoint { theta: 0.9 }).unwrap();
        assert_eq!(two.mean_sin(), 0.0);
        // Annealed density equals the quenched one at the averaged coefficient.
        let m = PhaseMeasure::Uniform { lo: 0.0, hi: 2.0 };
        let ann = LimitDensity::annealed(&m).unwrap();
        let q = LimitDensity::new(m.mean_sin()).unwrap();
        for x in [-0.5, 0.0, 0.3] {
            assert_eq!(ann.density(x), q.density(x));
        }
    }

    #[test]
    fn probabilities() {
        let d = LimitDensity::quenched(0.0).unwrap();
        assert!((d.probability(f64::NEG_INFINITY, f64::INFINITY).unwrap() - 1.0).abs() < 1e-12);
        assert!((d.probability(0.0, FRAC_1_SQRT_2).unwrap() - 0.5).abs() < 1e-12);
        let p = d.probability(-0.5, 0.5).unwrap();
        let r = riemann(hadamard_limit_density, -0.5, 0.5, 200_000);
        assert!((p - r).abs() < 1e-8, "{p} vs {r}");
        assert!((p - (cdf_oracle(0.0, 0.5) - cdf_oracle(0.0, -0.5))).abs() < 1e-12);
        assert!(d.probability(0.3, 0.2).is_err());
    }

    #[test]
    fn cdf_matches_closed_form() {
        for s in [-1.0, -0.3, 0.0, 0.5, 1.0] {
            let d = LimitDensity::new(s).unwrap();
            for x in [-0.8, -0.7, -0.4, 0.0, 0.2, 0.69, 0.75] {
                assert!((d.cdf(x) - cdf_oracle(s, x)).abs() < 1e-11, "s={s} x={x}");
            }
        }
    }

    #[test]
    fn normalization() {
        for s in [-1.0, -0.5, 0.0, 0.25, 1.0] {
            let d = LimitDensity::new(s).unwrap();
            assert!((d.total_mass() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn moments() {
        let d = LimitDensity::quenched(0.0).unwrap();
        assert_eq!(d.moments().0, 0.0);
        assert!((d.moments().1 - 0.292_893_218_8).abs() < 1e-10);
        let d = LimitDensity::quenched(PI / 2.0).unwrap();
        assert!((d.moments().1 - 0.207_106_781_2).abs() < 1e-10);
        for omega in [0.0, PI / 6.0, PI / 3.0, PI / 2.0, -1.0] {
            let d = LimitDensity::quenched(omega).unwrap();
            let (m, v) = d.moments();
            let (mq, vq) = d.moments_by_quadrature();
            assert!((m - mq).abs() < 1e-8);
            assert!((v - vq).abs() < 1e-8);
        }
    }

    #[test]
    fn characteristic_function() {
        let d = LimitDensity::quenched(0.0).unwrap();
        assert!((d.characteristic(0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        for xi in [1.0, 2.0, 5.0, 20.0] {
            assert!(d.characteristic(xi).im.abs() < 1e-10);
        }
        let d = LimitDensity::quenched(1.0).unwrap();
        let xi = 2.0;
        let re = riemann(
            |x| (xi * x).cos() * d.density(x),
            -FRAC_1_SQRT_2,
            FRAC_1_SQRT_2,
            400_000,
        );
        assert!((d.characteristic(xi).re - re).abs() < 1e-3);
    }

    #[test]
    fn finite_n_characteristic_approaches_limit() {
        let phi = ChiralityVector::symmetric();
        for omega in [0.0, 0.7] {
            let env = Environment::constant(omega).unwrap();
            let d = LimitDensity::quenched(omega).unwrap();
            for xi in [1.0, 2.0, 5.0] {
                let err = |n: usize| {
                    let dist = evolve_to(phi, &env, n).unwrap();
                    (crate::evolve::characteristic_function(&dist, xi) - d.characteristic(xi))
                        .norm()
                };
                let (e1, e2, e3) = (err(50), err(200), err(800));
                assert!(e3 < e2 && e2 < e1, "ω={omega} ξ={xi}: {e1} {e2} {e3}");
            }
        }
    }

    #[test]
    fn kolmogorov_distance_of_point_mass() {
        let d = LimitDensity::quenched(0.0).unwrap();
        let dist = Distribution::from_masses(0, vec![1.0]).unwrap();
        assert!((d.kolmogorov_distance(&dist) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn convergence_sweep() {
        let r = convergence_report(
            &WalkSource::ConstantPhase(0.0),
            &[50, 400],
            ChiralityVector::symmetric(),
        )
        .unwrap();
        assert_eq!(r.n_values, vec![50, 400]);
        assert!(r.ks_strictly_decreasing());
        assert!(r.ks_distances.iter().all(|d| (0.0..=1.0).contains(d)));
        assert!((r.empirical_variances[1] - HADAMARD_LIMIT_VARIANCE).abs() < 0.01);
        assert!(convergence_report(
            &WalkSource::ConstantPhase(0.0),
            &[],
            ChiralityVector::symmetric()
        )
        .is_err());
        assert!(convergence_report(
            &WalkSource::ConstantPhase(0.0),
            &[5, 5],
            ChiralityVector::symmetric()
        )
        .is_err());
        assert!(convergence_report(
            &WalkSource::ConstantPhase(0.0),
            &[0, 5],
            ChiralityVector::symmetric()
        )
        .is_err());
    }
}
