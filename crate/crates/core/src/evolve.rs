//! Exact state-vector evolution.
//!
//! Only the reachable parity class is stored: at time `n` index `j` holds
//! position `x = -n + 2j`, so off-parity amplitudes are zero by construction.
//! One step maps `ψ(x) ↦ P_{x+1} ψ(x+1) + Q_{x-1} ψ(x-1)`: the coin acts at
//! the walker's current site, then the walker moves.

use num_complex::Complex64;

use crate::coin::{ChiralityVector, Coin};
use crate::environment::Environment;
use crate::error::{Error, Result};

/// Tolerance on total probability.
pub const MASS_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct WalkState {
    time: usize,
    amplitudes: Vec<ChiralityVector>,
}

impl WalkState {
    /// All amplitude at the origin at time 0.
    pub fn initial(qubit: ChiralityVector) -> Result<Self> {
        qubit.ensure_normalized()?;
        Ok(WalkState {
            time: 0,
            amplitudes: vec![qubit],
        })
    }

    pub fn time(&self) -> usize {
        self.time
    }

    /// Amplitude at position `x`; zero off the support or off parity.
    pub fn amplitude(&self, x: i64) -> ChiralityVector {
        match index_of(self.time, x) {
            Some(j) => self.amplitudes[j],
            None => ChiralityVector::ZERO,
        }
    }

    /// `(x, ψ(x))` over the reachable parity class, ascending in `x`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, ChiralityVector)> + '_ {
        let n = self.time as i64;
        self.amplitudes
            .iter()
            .enumerate()
            .map(move |(j, v)| (-n + 2 * j as i64, *v))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(ChiralityVector::norm_sqr).sum()
    }

    /// Advances one step in `env`.
    pub fn step(&self, env: &Environment) -> WalkState {
        self.step_with(|x| env.coin(x))
    }

    /// Advances one step, reading the coin at each occupied site from
    /// `coin_at`.
    pub(crate) fn step_with(&self, coin_at: impl Fn(i64) -> Coin) -> WalkState {
        let n = self.time;
        let old = &self.amplitudes;
        let mut next = vec![ChiralityVector::ZERO; n + 2];
        for (j, psi) in old.iter().enumerate() {
            let coin = coin_at(-(n as i64) + 2 * j as i64);
            // P at this site sends the walker to new index j, Q to j + 1.
            next[j].left = coin.a() * psi.left + coin.b() * psi.right;
            next[j + 1].right = coin.c() * psi.left + coin.d() * psi.right;
        }
        WalkState {
            time: n + 1,
            amplitudes: next,
        }
    }

    pub fn distribution(&self) -> Distribution {
        Distribution {
            time: self.time,
            masses: self
                .amplitudes
                .iter()
                .map(ChiralityVector::norm_sqr)
                .collect(),
        }
    }
}

fn index_of(time: usize, x: i64) -> Option<usize> {
    let n = time as i64;
    let shifted = x + n;
    if x.abs() > n || shifted % 2 != 0 {
        None
    } else {
        Some((shifted / 2) as usize)
    }
}

/// Position law at a fixed time. Stored over the parity class
/// `{-n, -n+2, …, n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    time: usize,
    masses: Vec<f64>,
}

impl Distribution {
    /// Builds a distribution from masses on `-n, -n+2, …, n`, checking
    /// nonnegativity and total mass.
    pub fn from_masses(time: usize, masses: Vec<f64>) -> Result<Self> {
        if masses.len() != time + 1 {
            return Err(Error::invalid(format!(
                "time {time} needs {} masses, got {}",
                time + 1,
                masses.len()
            )));
        }
        let d = Distribution { time, masses };
        d.validate()?;
        Ok(d)
    }

    /// Builds a distribution from `(position, probability)` pairs. Pairs
    /// may be listed in any order; positions not given get zero mass.
    /// Off-parity or out-of-range positions must carry zero mass.
    pub fn from_pairs(time: usize, pairs: impl IntoIterator<Item = (i64, f64)>) -> Result<Self> {
        let mut masses = vec![0.0; time + 1];
        for (x, p) in pairs {
            match index_of(time, x) {
                Some(j) => masses[j] += p,
                None if p == 0.0 => {}
                None => {
                    return Err(Error::invalid(format!(
                        "position {x} is unreachable at time {time} but has mass {p}"
                    )))
                }
            }
        }
        Self::from_masses(time, masses)
    }

    pub(crate) fn from_masses_unchecked(time: usize, masses: Vec<f64>) -> Self {
        Distribution { time, masses }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((x, p)) = self.iter().find(|(_, p)| !(*p >= 0.0)) {
            return Err(Error::invalid(format!("negative or NaN mass {p} at {x}")));
        }
        let total = self.total();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::invalid(format!("total mass {total} differs from 1")));
        }
        Ok(())
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn get(&self, x: i64) -> f64 {
        index_of(self.time, x).map_or(0.0, |j| self.masses[j])
    }

    /// Masses on the parity class, ascending in position.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let n = self.time as i64;
        self.masses
            .iter()
            .enumerate()
            .map(move |(j, p)| (-n + 2 * j as i64, *p))
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Largest pointwise difference. Both must be at the same time.
    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        assert_eq!(self.time, other.time, "distributions at different times");
        self.masses
            .iter()
            .zip(&other.masses)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Mean and variance of the rescaled position `X_n / n`
    /// (of `X_0` when `n = 0`).
    pub fn scaled_moments(&self) -> (f64, f64) {
        let scale = if self.time == 0 {
            1.0
        } else {
            self.time as f64
        };
        let mean: f64 = self.iter().map(|(x, p)| p * x as f64 / scale).sum();
        let second: f64 = self
            .iter()
            .map(|(x, p)| {
                let y = x as f64 / scale;
                p * y * y
            })
            .sum();
        (mean, second - mean * mean)
    }

    /// Pointwise `Σ wᵢ dᵢ`; all inputs must share a time.
    pub fn mixture<'a>(
        parts: impl IntoIterator<Item = (f64, &'a Distribution)>,
    ) -> Result<Distribution> {
        let mut out: Option<Distribution> = None;
        for (w, d) in parts {
            let acc = out.get_or_insert_with(|| Distribution {
                time: d.time,
                masses: vec![0.0; d.masses.len()],
            });
            if acc.time != d.time {
                return Err(Error::invalid(
                    "mixture of distributions at different times",
                ));
            }
            for (a, p) in acc.masses.iter_mut().zip(&d.masses) {
                *a += w * p;
            }
        }
        let out = out.ok_or_else(|| Error::invalid("mixture of no distributions"))?;
        out.validate()?;
        Ok(out)
    }
}

pub fn initial_state(qubit: ChiralityVector) -> Result<WalkState> {
    WalkState::initial(qubit)
}

pub fn step(state: &WalkState, env: &Environment) -> WalkState {
    state.step(env)
}

pub fn distribution(state: &WalkState) -> Distribution {
    state.distribution()
}

/// Final state after `n` steps from `qubit` at the origin.
pub fn evolve_state(qubit: ChiralityVector, env: &Environment, n: usize) -> Result<WalkState> {
    let mut state = WalkState::initial(qubit)?;
    if n == 0 {
        return Ok(state);
    }
    // Sites visited before the last step lie in [-(n-1), n-1].
    let reach = (n - 1) as i64;
    let coins: Vec<Coin> = (-reach..=reach).map(|x| env.coin(x)).collect();
    for _ in 0..n {
        state = state.step_with(|x| coins[(x + reach) as usize]);
    }
    Ok(state)
}

/// Law of `X_n` in `env`, starting from `qubit` at the origin.
pub fn evolve_to(qubit: ChiralityVector, env: &Environment, n: usize) -> Result<Distribution> {
    Ok(evolve_state(qubit, env, n)?.distribution())
}

/// `E[e^{iξ X_n / n}]`; for `n = 0` the exponent is zero.
pub fn characteristic_function(dist: &Distribution, xi: f64) -> Complex64 {
    let scale = if dist.time == 0 {
        0.0
    } else {
        xi / dist.time as f64
    };
    dist.iter()
        .map(|(x, p)| Complex64::from_polar(p, scale * x as f64))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn phi() -> ChiralityVector {
        ChiralityVector::symmetric()
    }

    fn four_step_table(s: f64) -> [(i64, f64); 5] {
        [
            (-4, (1.0 + s) / 16.0),
            (-2, (6.0 + 4.0 * s) / 16.0),
            (0, 2.0 / 16.0),
            (2, (6.0 - 4.0 * s) / 16.0),
            (4, (1.0 - s) / 16.0),
        ]
    }

    #[test]
    fn initial_state_symmetric_qubit() {
        let s = initial_state(phi()).unwrap();
        assert_eq!(s.time(), 0);
        assert_eq!(s.amplitude(0), phi());
        assert_eq!(s.amplitude(1), ChiralityVector::ZERO);
    }

    #[test]
    fn initial_state_accepts_other_normalized_qubits() {
        let left = ChiralityVector::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        assert_eq!(initial_state(left).unwrap().amplitude(0), left);
        let v = ChiralityVector::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        assert!(initial_state(v).is_ok());
    }

    #[test]
    fn initial_state_rejects_unnormalized() {
        let v = ChiralityVector::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        assert!(matches!(initial_state(v), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn one_step_probabilities() {
        // U φ* = ((e^{iω}+i)/2, (1-i e^{-iω})/2); |e^{iω}+i|² = 2 + 2 sin ω.
        for omega in [0.0, 0.4, -1.3, PI / 2.0] {
            let env = Environment::constant(omega).unwrap();
            let d = evolve_to(phi(), &env, 1).unwrap();
            assert!((d.get(-1) - (1.0 + omega.sin()) / 2.0).abs() < 1e-15);
            assert!((d.get(1) - (1.0 - omega.sin()) / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn four_step_tables() {
        for omega0 in [0.0, PI / 6.0, PI / 2.0, -PI / 4.0] {
            let env = Environment::from_phases(0.9, [(0, omega0), (-1, -2.0), (1, 0.3), (-3, 1.7)])
                .unwrap();
            let d = evolve_to(phi(), &env, 4).unwrap();
            for (x, p) in four_step_table(omega0.sin()) {
                assert!(
                    (d.get(x) - p).abs() < 1e-12,
                    "ω₀={omega0} x={x}: {} vs {p}",
                    d.get(x)
                );
            }
        }
    }

    #[test]
    fn time_zero_distribution() {
        let d = evolve_to(phi(), &Environment::hadamard(), 0).unwrap();
        let rows: Vec<_> = d.iter().collect();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].0, 0);
        assert!((rows[0].1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hadamard_four_step_distribution() {
        let d = evolve_to(phi(), &Environment::hadamard(), 4).unwrap();
        let expected = [1.0, 6.0, 2.0, 6.0, 1.0].map(|v| v / 16.0);
        for (got, want) in d.masses().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn quarter_turn_four_steps() {
        let env = Environment::constant(PI / 2.0).unwrap();
        let d = evolve_to(phi(), &env, 4).unwrap();
        let expected = [2.0, 10.0, 2.0, 2.0, 0.0].map(|v| v / 16.0);
        for (got, want) in d.masses().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn only_origin_phase_matters_at_four_steps() {
        let a = Environment::from_phases(0.2, [(0, 1.0)]).unwrap();
        let b = Environment::from_phases(-2.5, [(0, 1.0), (2, 0.1), (-1, 3.0)]).unwrap();
        let da = evolve_to(phi(), &a, 4).unwrap();
        let db = evolve_to(phi(), &b, 4).unwrap();
        assert!(da.max_abs_diff(&db) < 1e-15);
    }

    #[test]
    fn hadamard_walk_is_symmetric() {
        let d = evolve_to(phi(), &Environment::hadamard(), 500).unwrap();
        for x in 0..=500 {
            assert!((d.get(x) - d.get(-x)).abs() < 1e-12);
        }
    }

    #[test]
    fn norm_drift_stays_small_at_ten_thousand_steps() {
        let spec =
            crate::environment::EnvironmentSpec::iid(crate::environment::PhaseMeasure::Uniform {
                lo: -PI,
                hi: PI,
            });
        let env = spec.sample(10_000, 5).unwrap();
        let state = evolve_state(phi(), &env, 10_000).unwrap();
        assert!((state.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn off_parity_amplitudes_are_zero() {
        let env = Environment::constant(0.7).unwrap();
        let s = evolve_state(phi(), &env, 7).unwrap();
        for x in (-8..=8).filter(|x: &i64| x.rem_euclid(2) == 0) {
            assert_eq!(s.amplitude(x), ChiralityVector::ZERO);
        }
        let d = s.distribution();
        assert_eq!(d.get(2), 0.0);
        assert_eq!(d.get(9), 0.0);
    }

    #[test]
    fn characteristic_function_basics() {
        let d = evolve_to(phi(), &Environment::hadamard(), 4).unwrap();
        assert!((characteristic_function(&d, 0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        // Direct sum over the five-point table at ξ = π (n = 4): e^{iπx/4}.
        let table = [(-4, 1.0), (-2, 6.0), (0, 2.0), (2, 6.0), (4, 1.0)];
        let expected: f64 = table
            .iter()
            .map(|&(x, w)| w / 16.0 * (PI * x as f64 / 4.0).cos())
            .sum();
        let phi_pi = characteristic_function(&d, PI);
        assert!((phi_pi.re - expected).abs() < 1e-15);
        assert!((expected - (-2.0 / 16.0 + 2.0 / 16.0)).abs() < 1e-15);
        assert!(phi_pi.im.abs() < 1e-12);
        let d0 = evolve_to(phi(), &Environment::hadamard(), 0).unwrap();
        assert!((characteristic_function(&d0, 3.0) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn distribution_from_pairs_validates() {
        let ok = Distribution::from_pairs(2, [(2, 0.25), (-2, 0.25), (0, 0.5)]).unwrap();
        assert_eq!(ok.get(0), 0.5);
        assert!(Distribution::from_pairs(2, [(1, 0.5), (0, 0.5)]).is_err());
        assert!(Distribution::from_pairs(2, [(0, 0.7)]).is_err());
        assert!(Distribution::from_pairs(1, [(-1, 1.2), (1, -0.2)]).is_err());
    }

    #[test]
    fn step_function_matches_free_function() {
        let env = Environment::from_phases(0.0, [(0, 0.3), (1, -0.2), (-1, 1.1)]).unwrap();
        let mut s = initial_state(phi()).unwrap();
        for _ in 0..3 {
            s = step(&s, &env);
        }
        let d = distribution(&s);
        assert!(d.max_abs_diff(&evolve_to(phi(), &env, 3).unwrap()) < 1e-15);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn norm_is_preserved(
            phases in proptest::collection::vec(-PI..PI, 41),
            theta in 0.0..PI,
            rel in -PI..PI,
        ) {
            let env = Environment::from_phases(0.0, (-20..=20).zip(phases)).unwrap();
            let q = ChiralityVector::new(
                Complex64::new((theta / 2.0).cos(), 0.0),
                Complex64::from_polar((theta / 2.0).sin(), rel),
            );
            let mut s = initial_state(q).unwrap();
            for _ in 0..20 {
                s = s.step(&env);
                prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            }
            prop_assert!(s.distribution().validate().is_ok());
        }
    }
}
