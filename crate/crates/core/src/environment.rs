//! Environments `ω = {ω_x}` and the product measures they are drawn from.
//!
//! Sampling is reproducible and order independent: the phase at site `x`
//! comes from its own ChaCha stream keyed by `(seed, x)`, so widening the
//! window or changing the measure at one site leaves every other site alone.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::coin::Coin;
use crate::error::{Error, Result};

const WEIGHT_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;

/// Law of a single site phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseMeasure {
    /// Point mass at `at`.
    Delta {
        at: f64,
    },
    /// Uniform on `[lo, hi]`.
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// `+theta` or `-theta` with probability 1/2 each.
    TwoPoint {
        theta: f64,
    },
    Discrete {
        values: Vec<f64>,
        weights: Vec<f64>,
    },
}

impl PhaseMeasure {
    pub fn validate(&self) -> Result<()> {
        match self {
            PhaseMeasure::Delta { at } => finite("delta.at", *at),
            PhaseMeasure::Uniform { lo, hi } => {
                finite("uniform.lo", *lo)?;
                finite("uniform.hi", *hi)?;
                if lo > hi {
                    return Err(Error::config(format!(
                        "uniform measure needs lo <= hi, got [{lo}, {hi}]"
                    )));
                }
                Ok(())
            }
            PhaseMeasure::TwoPoint { theta } => finite("two_point.theta", *theta),
            PhaseMeasure::Discrete { values, weights } => {
                if values.is_empty() {
                    return Err(Error::config("discrete measure has no atoms"));
                }
                if values.len() != weights.len() {
                    return Err(Error::config(format!(
                        "discrete measure has {} values but {} weights",
                        values.len(),
                        weights.len()
                    )));
                }
                for &v in values {
                    finite("discrete value", v)?;
                }
                if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                    return Err(Error::config(
                        "discrete weights must be finite and nonnegative",
                    ));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > WEIGHT_TOL {
                    return Err(Error::config(format!(
                        "discrete weights sum to {total}, not 1"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Draws one phase. The measure is assumed valid.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            PhaseMeasure::Delta { at } => *at,
            PhaseMeasure::Uniform { lo, hi } => {
                if lo == hi {
                    *lo
                } else {
                    rng.random_range(*lo..=*hi)
                }
            }
            PhaseMeasure::TwoPoint { theta } => {
                if rng.random_bool(0.5) {
                    *theta
                } else {
                    -*theta
                }
            }
            PhaseMeasure::Discrete { values, weights } => {
                let index = WeightedIndex::new(weights).expect("validated weights");
                values[index.sample(rng)]
            }
        }
    }

    /// `E[sin ω]` under this measure, exact for every built-in kind.
    pub fn mean_sin(&self) -> f64 {
        match self {
            PhaseMeasure::Delta { at } => at.sin(),
            PhaseMeasure::Uniform { lo, hi } => {
                if hi - lo <= 0.0 {
                    lo.sin()
                } else {
                    (lo.cos() - hi.cos()) / (hi - lo)
                }
            }
            PhaseMeasure::TwoPoint { .. } => 0.0,
            PhaseMeasure::Discrete { values, weights } => {
                values.iter().zip(weights).map(|(v, w)| w * v.sin()).sum()
            }
        }
    }

    /// `E[cos ω]` under this measure, exact for every built-in kind.
    pub fn mean_cos(&self) -> f64 {
        match self {
            PhaseMeasure::Delta { at } => at.cos(),
            PhaseMeasure::Uniform { lo, hi } => {
                if hi - lo <= 0.0 {
                    lo.cos()
                } else {
                    (hi.sin() - lo.sin()) / (hi - lo)
                }
            }
            PhaseMeasure::TwoPoint { theta } => theta.cos(),
            PhaseMeasure::Discrete { values, weights } => {
                values.iter().zip(weights).map(|(v, w)| w * v.cos()).sum()
            }
        }
    }

    /// Whether the measure is invariant under `ω ↦ -ω`.
    pub fn is_symmetric(&self) -> bool {
        match self {
            PhaseMeasure::Delta { at } => at.abs() <= SYMMETRY_TOL,
            PhaseMeasure::Uniform { lo, hi } => (lo + hi).abs() <= SYMMETRY_TOL,
            PhaseMeasure::TwoPoint { .. } => true,
            PhaseMeasure::Discrete { values, weights } => {
                let mass_at = |target: f64| -> f64 {
                    values
                        .iter()
                        .zip(weights)
                        .filter(|(v, _)| (**v - target).abs() <= SYMMETRY_TOL)
                        .map(|(_, w)| *w)
                        .sum()
                };
                values
                    .iter()
                    .all(|&v| (mass_at(v) - mass_at(-v)).abs() <= SYMMETRY_TOL)
            }
        }
    }

    /// Atoms `(value, weight)` of finitely supported measures; `None` for
    /// non-degenerate uniform measures.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            PhaseMeasure::Delta { at } => Some(vec![(*at, 1.0)]),
            PhaseMeasure::Uniform { lo, hi } if lo == hi => Some(vec![(*lo, 1.0)]),
            PhaseMeasure::Uniform { .. } => None,
            PhaseMeasure::TwoPoint { theta } => Some(vec![(*theta, 0.5), (-*theta, 0.5)]),
            PhaseMeasure::Discrete { values, weights } => Some(
                values
                    .iter()
                    .copied()
                    .zip(weights.iter().copied())
                    .collect(),
            ),
        }
    }

    /// A phase inside the support, used for sites outside a sampled window.
    fn representative(&self) -> f64 {
        match self {
            PhaseMeasure::Delta { at } => *at,
            PhaseMeasure::Uniform { lo, hi } => 0.5 * (lo + hi),
            PhaseMeasure::TwoPoint { theta } => *theta,
            PhaseMeasure::Discrete { values, weights } => {
                let (i, _) = weights
                    .iter()
                    .enumerate()
                    .fold(
                        (0, f64::MIN),
                        |best, (i, &w)| if w > best.1 { (i, w) } else { best },
                    );
                values[i]
            }
        }
    }
}

fn finite(what: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(format!("{what} must be finite, got {v}")))
    }
}

/// A fixed assignment of phases to sites.
#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    phases: BTreeMap<i64, f64>,
    default_phase: f64,
}

impl Environment {
    /// `ω_x = phase` for every site.
    pub fn constant(phase: f64) -> Result<Self> {
        Self::from_phases(phase, std::iter::empty())
    }

    /// The Hadamard environment `ω ≡ 0`.
    pub fn hadamard() -> Self {
        Environment {
            phases: BTreeMap::new(),
            default_phase: 0.0,
        }
    }

    pub fn from_phases(
        default_phase: f64,
        phases: impl IntoIterator<Item = (i64, f64)>,
    ) -> Result<Self> {
        if !default_phase.is_finite() {
            return Err(Error::invalid(format!(
                "default phase must be finite, got {default_phase}"
            )));
        }
        let phases: BTreeMap<i64, f64> = phases.into_iter().collect();
        if let Some((x, w)) = phases.iter().find(|(_, w)| !w.is_finite()) {
            return Err(Error::invalid(format!(
                "phase at site {x} must be finite, got {w}"
            )));
        }
        Ok(Environment {
            phases,
            default_phase,
        })
    }

    /// Returns a copy with `ω_x` replaced.
    pub fn with_phase(mut self, x: i64, phase: f64) -> Result<Self> {
        if !phase.is_finite() {
            return Err(Error::invalid(format!(
                "phase at site {x} must be finite, got {phase}"
            )));
        }
        self.phases.insert(x, phase);
        Ok(self)
    }

    pub fn phase(&self, x: i64) -> f64 {
        self.phases.get(&x).copied().unwrap_or(self.default_phase)
    }

    pub fn default_phase(&self) -> f64 {
        self.default_phase
    }

    pub fn coin(&self, x: i64) -> Coin {
        Coin::from_phase_unchecked(self.phase(x))
    }

    /// Explicitly stored sites, in ascending order.
    pub fn sites(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.phases.iter().map(|(&x, &w)| (x, w))
    }

    /// `Σ ω_k` over the sites from `from` to `to` inclusive, walking in
    /// whichever direction `to` lies.
    pub fn phase_sum(&self, from: i64, to: i64) -> f64 {
        if from <= to {
            (from..=to).map(|x| self.phase(x)).sum()
        } else {
            (to..=from).rev().map(|x| self.phase(x)).sum()
        }
    }
}

/// Product measure over sites: `per_site` overrides, `default_measure`
/// everywhere else.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvironmentSpec {
    pub per_site: BTreeMap<i64, PhaseMeasure>,
    pub default_measure: PhaseMeasure,
}

impl EnvironmentSpec {
    pub fn iid(measure: PhaseMeasure) -> Self {
        EnvironmentSpec {
            per_site: BTreeMap::new(),
            default_measure: measure,
        }
    }

    pub fn with_site(mut self, x: i64, measure: PhaseMeasure) -> Self {
        self.per_site.insert(x, measure);
        self
    }

    pub fn measure_at(&self, x: i64) -> &PhaseMeasure {
        self.per_site.get(&x).unwrap_or(&self.default_measure)
    }

    pub fn validate(&self) -> Result<()> {
        self.default_measure.validate()?;
        for (x, m) in &self.per_site {
            m.validate()
                .map_err(|e| Error::config(format!("site {x}: {e}")))?;
        }
        Ok(())
    }

    /// Samples phases for every `|x| <= extent`, the window an
    /// `extent`-step walk can reach. Other sites read a fixed
    /// representative of the default measure.
    pub fn sample(&self, extent: usize, seed: u64) -> Result<Environment> {
        self.validate()?;
        let extent = i64::try_from(extent)
            .map_err(|_| Error::invalid(format!("extent {extent} too large")))?;
        let phases = (-extent..=extent).map(|x| {
            let mut rng = site_rng(seed, x);
            (x, self.measure_at(x).sample(&mut rng))
        });
        Environment::from_phases(self.default_measure.representative(), phases)
    }
}

/// Convenience wrapper over [`EnvironmentSpec::sample`].
pub fn sample_environment(spec: &EnvironmentSpec, extent: usize, seed: u64) -> Result<Environment> {
    spec.sample(extent, seed)
}

/// Independent stream for site `x`: the ChaCha key comes from `seed`, the
/// stream id from the zigzag encoding of `x`.
fn site_rng(seed: u64, x: i64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(((x << 1) ^ (x >> 63)) as u64);
    rng
}

/// A site entry in an environment file: either a fixed phase or a measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SiteEntry {
    Phase(f64),
    Measure(PhaseMeasure),
}

/// On-disk environment description (JSON).
///
/// ```json
/// {
///   "default_measure": { "kind": "uniform", "lo": -3.141592653589793, "hi": 3.141592653589793 },
///   "sites": { "0": 0.5235987755982988, "5": { "kind": "two_point", "theta": 1.0 } },
///   "seed": 7
/// }
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentFile {
    pub default_measure: PhaseMeasure,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sites: BTreeMap<i64, SiteEntry>,
    #[serde(default)]
    pub seed: u64,
}

impl EnvironmentFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: EnvironmentFile = serde_json::from_str(text)?;
        file.spec().validate()?;
        Ok(file)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn spec(&self) -> EnvironmentSpec {
        let per_site = self
            .sites
            .iter()
            .map(|(&x, entry)| {
                let m = match entry {
                    SiteEntry::Phase(at) => PhaseMeasure::Delta { at: *at },
                    SiteEntry::Measure(m) => m.clone(),
                };
                (x, m)
            })
            .collect();
        EnvironmentSpec {
            per_site,
            default_measure: self.default_measure.clone(),
        }
    }
}
