//! Random difference-set models and concentration experiments for their
//! centered indicators.
//!
//! Three samplers are provided: a uniform Bernoulli model (every element
//! joins with the same probability σ), a per-element Bernoulli model with a
//! decaying probability profile, and a fixed-draw-count model over F_p^n.
//! The centered indicator Y(d) = 1_S(d) − σ is the object whose character
//! correlations the concentration experiment measures: for each N it
//! estimates P(sup_ξ |⟨φ_ξ, Y⟩| ≥ 3εσ) over all N additive characters and
//! reports an exponential reference curve fitted at the smallest N.

use crate::error::Error;
use crate::exec;
use crate::field::PrimeField;
use crate::progressions::{DenseSet, Domain};
use crate::seeds;
use crate::stats;
use crate::Result;
use num_complex::Complex64;
use rand::Rng;
use rustfft::{Fft, FftPlanner};
use std::fmt;
use std::sync::Arc;

/// A probability model for a random difference set S.
#[derive(Debug, Clone, PartialEq)]
pub enum DifferenceModel {
    /// Every element independently with probability σ.
    UniformBernoulli { domain: Domain, sigma: f64 },
    /// Element at index i independently with probability mu[i].
    PerElement { domain: Domain, mu: Vec<f64> },
    /// `draws` i.i.d. uniform draws from F_p^n (duplicates collapse in the
    /// resulting set).
    FixedSize { field: PrimeField, dim: usize, draws: usize },
}

impl DifferenceModel {
    pub fn uniform(domain: Domain, sigma: f64) -> Result<DifferenceModel> {
        if !(0.0..=1.0).contains(&sigma) {
            return Err(Error::InvalidParameter(format!("σ = {sigma} outside [0,1]")));
        }
        Ok(DifferenceModel::UniformBernoulli { domain, sigma })
    }

    pub fn per_element(domain: Domain, mu: Vec<f64>) -> Result<DifferenceModel> {
        if mu.len() != domain.size() {
            return Err(Error::InvalidParameter(format!(
                "μ has {} entries for a domain of size {}",
                mu.len(),
                domain.size()
            )));
        }
        if mu.iter().any(|&m| !(0.0..=1.0).contains(&m)) {
            return Err(Error::InvalidParameter("μ value outside [0,1]".into()));
        }
        Ok(DifferenceModel::PerElement { domain, mu })
    }

    pub fn domain(&self) -> Domain {
        match *self {
            DifferenceModel::UniformBernoulli { domain, .. } => domain,
            DifferenceModel::PerElement { domain, .. } => domain,
            DifferenceModel::FixedSize { field, dim, .. } => Domain::vector(field, dim),
        }
    }

    /// The centering constant σ: the model's probability for the uniform
    /// model, the domain average of μ for the per-element model, and the
    /// draw count over the domain size for the fixed-size model.
    pub fn sigma(&self) -> f64 {
        match self {
            DifferenceModel::UniformBernoulli { sigma, .. } => *sigma,
            DifferenceModel::PerElement { domain, mu } => {
                mu.iter().sum::<f64>() / domain.size() as f64
            }
            DifferenceModel::FixedSize { draws, .. } => {
                *draws as f64 / self.domain().size() as f64
            }
        }
    }

    /// Expected number of distinct elements in one sample.
    pub fn expected_size(&self) -> f64 {
        match self {
            DifferenceModel::UniformBernoulli { domain, sigma } => {
                sigma * domain.size() as f64
            }
            DifferenceModel::PerElement { mu, .. } => mu.iter().sum(),
            DifferenceModel::FixedSize { draws, .. } => {
                let n = self.domain().size() as f64;
                n * (1.0 - (1.0 - 1.0 / n).powi(*draws as i32))
            }
        }
    }

    /// Draws one random set. Deterministic given the generator state.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> DenseSet {
        match self {
            DifferenceModel::UniformBernoulli { domain, sigma } => {
                DenseSet::random_bernoulli(*domain, *sigma, rng)
            }
            DifferenceModel::PerElement { domain, mu } => {
                let mut s = DenseSet::empty(*domain);
                for (i, &m) in mu.iter().enumerate() {
                    if rng.random::<f64>() < m {
                        s.insert(i);
                    }
                }
                s
            }
            DifferenceModel::FixedSize { draws, .. } => {
                let domain = self.domain();
                let size = domain.size() as u64;
                let mut s = DenseSet::empty(domain);
                for _ in 0..*draws {
                    s.insert(rng.random_range(0..size) as usize);
                }
                s
            }
        }
    }
}

/// The centered indicator Y(d) = 1_S(d) − σ.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredIndicator {
    set: DenseSet,
    sigma: f64,
}

impl CenteredIndicator {
    pub fn new(set: DenseSet, sigma: f64) -> CenteredIndicator {
        CenteredIndicator { set, sigma }
    }

    pub fn domain(&self) -> Domain {
        self.set.domain()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn set(&self) -> &DenseSet {
        &self.set
    }

    /// Y at one element: 1−σ for members, −σ otherwise.
    pub fn value(&self, index: usize) -> f64 {
        if self.set.contains(index) {
            1.0 - self.sigma
        } else {
            -self.sigma
        }
    }

    /// All values in index order.
    pub fn values(&self) -> Vec<f64> {
        (0..self.domain().size()).map(|i| self.value(i)).collect()
    }

    /// (1/N)·Σ_d |Y(d)|; expectation 2σ(1−σ) under the uniform model.
    pub fn error_term_mass(&self) -> f64 {
        let n = self.domain().size() as f64;
        let ones = self.set.count() as f64;
        (ones * (1.0 - self.sigma) + (n - ones) * self.sigma) / n
    }
}

/// Centers a sampled set with its model's σ.
pub fn center(s: &DenseSet, model: &DifferenceModel) -> CenteredIndicator {
    assert_eq!(s.domain(), model.domain(), "sample and model domains differ");
    CenteredIndicator::new(s.clone(), model.sigma())
}

/// |⟨φ_ξ, Y⟩| = |E_d e(ξd/N)·Y(d)| for every frequency ξ, via one discrete
/// transform. Cyclic domains only.
pub fn correlation_spectrum(y: &CenteredIndicator) -> Result<Vec<f64>> {
    let Domain::Cyclic { n } = y.domain() else {
        return Err(Error::DomainKind("character correlations require a cyclic domain".into()));
    };
    let fft = FftPlanner::new().plan_fft_forward(n);
    Ok(correlation_spectrum_with_plan(y, n, fft.as_ref()))
}

/// Plan-sharing core of [`correlation_spectrum`] for hot loops.
fn correlation_spectrum_with_plan(y: &CenteredIndicator, n: usize, fft: &dyn Fft<f64>) -> Vec<f64> {
    let mut buffer: Vec<Complex64> =
        (0..n).map(|i| Complex64::new(y.value(i), 0.0)).collect();
    fft.process(&mut buffer);
    let scale = 1.0 / n as f64;
    buffer.into_iter().map(|z| z.norm() * scale).collect()
}

/// sup over ξ ∈ `frequencies` of |⟨φ_ξ, Y⟩| (0 for an empty set).
pub fn character_correlation_sup(y: &CenteredIndicator, frequencies: &[usize]) -> Result<f64> {
    let all = correlation_spectrum(y)?;
    let mut sup: f64 = 0.0;
    for &xi in frequencies {
        if xi >= all.len() {
            return Err(Error::InvalidParameter(format!(
                "frequency {xi} outside 0..{}",
                all.len()
            )));
        }
        sup = sup.max(all[xi]);
    }
    Ok(sup)
}

/// sup over all N characters of |⟨φ_ξ, Y⟩|.
pub fn character_correlation_sup_all(y: &CenteredIndicator) -> Result<f64> {
    Ok(correlation_spectrum(y)?.into_iter().fold(0.0, f64::max))
}

/// A family of models indexed by the domain, parsed from strings like
/// `uniform:c=10`, `perelem:c=4`, `fixed:K=128`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    /// Uniform Bernoulli with σ(N) = min(1, c·ln N/N).
    UniformLog { c: f64 },
    /// Per-element Bernoulli with μ(d) = min(1, c·ln(d+1)/d), where d is
    /// the element value (interval values start at 1; the value 0 gets the
    /// continuous-limit probability min(1, c)).
    PerElementLog { c: f64 },
    /// Fixed draw count over a vector-space domain.
    Fixed { draws: usize },
}

impl ModelSpec {
    /// Parses `uniform:c=…`, `perelem:c=…`, or `fixed:K=…`.
    pub fn parse(text: &str) -> Result<ModelSpec> {
        let bad = |msg: String| Error::Parse(format!("model {text:?}: {msg}"));
        let (name, rest) = text
            .split_once(':')
            .ok_or_else(|| bad("expected name:key=value".into()))?;
        let (key, value) = rest
            .split_once('=')
            .ok_or_else(|| bad("expected name:key=value".into()))?;
        match (name, key) {
            ("uniform", "c") | ("perelem", "c") => {
                let c: f64 = value
                    .parse()
                    .map_err(|_| bad(format!("c = {value:?} is not a number")))?;
                if !c.is_finite() || c < 0.0 {
                    return Err(bad(format!("c = {c} must be finite and ≥ 0")));
                }
                Ok(if name == "uniform" {
                    ModelSpec::UniformLog { c }
                } else {
                    ModelSpec::PerElementLog { c }
                })
            }
            ("fixed", "K") => {
                let draws: usize = value
                    .parse()
                    .map_err(|_| bad(format!("K = {value:?} is not a count")))?;
                Ok(ModelSpec::Fixed { draws })
            }
            _ => Err(bad("known models: uniform:c=…, perelem:c=…, fixed:K=…".into())),
        }
    }

    /// Builds the concrete model on a domain.
    pub fn instantiate(&self, domain: Domain) -> Result<DifferenceModel> {
        match *self {
            ModelSpec::UniformLog { c } => {
                let n = domain.size() as f64;
                let sigma = (c * n.ln() / n).min(1.0);
                DifferenceModel::uniform(domain, sigma)
            }
            ModelSpec::PerElementLog { c } => {
                let mu: Vec<f64> = (0..domain.size())
                    .map(|i| {
                        let d = match domain {
                            Domain::Interval { .. } => (i + 1) as f64,
                            _ => i as f64,
                        };
                        if d == 0.0 {
                            c.min(1.0)
                        } else {
                            (c * (d + 1.0).ln() / d).min(1.0)
                        }
                    })
                    .collect();
                DifferenceModel::per_element(domain, mu)
            }
            ModelSpec::Fixed { draws } => match domain {
                Domain::Vector { field, dim } => {
                    Ok(DifferenceModel::FixedSize { field, dim, draws })
                }
                _ => Err(Error::InvalidParameter(
                    "fixed-size model requires a vector-space domain".into(),
                )),
            },
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::UniformLog { c } => write!(f, "uniform:c={c}"),
            ModelSpec::PerElementLog { c } => write!(f, "perelem:c={c}"),
            ModelSpec::Fixed { draws } => write!(f, "fixed:K={draws}"),
        }
    }
}

/// One row of a concentration experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationRow {
    pub n: usize,
    pub sigma: f64,
    /// The exceedance threshold 3εσ.
    pub threshold: f64,
    pub exceedances: u64,
    pub trials: u64,
    /// Empirical tail probability exceedances/trials.
    pub tail: f64,
    /// 95% Wilson interval for the tail.
    pub ci_low: f64,
    pub ci_high: f64,
    /// exp(−ĉ·σN) with ĉ fitted at the first schedule entry.
    pub reference: f64,
}

/// For each N in the schedule: the empirical probability that
/// sup_ξ |⟨φ_ξ, Y⟩| over all N characters reaches 3εσ, with a fitted
/// exponential reference curve. Deterministic in the master seed at any
/// worker count (each trial derives its own stream from (N, trial index)).
pub fn concentration_experiment(
    spec: &ModelSpec,
    schedule: &[usize],
    eps: f64,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<ConcentrationRow>> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::InvalidParameter(format!("ε = {eps} must be finite and ≥ 0")));
    }
    let mut rows = Vec::with_capacity(schedule.len());
    for &n in schedule {
        let domain = Domain::cyclic(n);
        let model = spec.instantiate(domain)?;
        let sigma = model.sigma();
        let threshold = 3.0 * eps * sigma;
        let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_forward(n);
        let exceeded: Vec<bool> = exec::map_indexed(trials as usize, |t| {
            let mut rng = seeds::trial_rng(master_seed, &[n as u64, t as u64]);
            let s = model.sample(&mut rng);
            let y = center(&s, &model);
            let sup = correlation_spectrum_with_plan(&y, n, fft.as_ref())
                .into_iter()
                .fold(0.0, f64::max);
            sup >= threshold
        });
        let exceedances = exceeded.iter().filter(|&&b| b).count() as u64;
        let tail = exceedances as f64 / trials as f64;
        let (ci_low, ci_high) = stats::wilson_interval(exceedances, trials, stats::Z_95);
        rows.push(ConcentrationRow {
            n,
            sigma,
            threshold,
            exceedances,
            trials,
            tail,
            ci_low,
            ci_high,
            reference: 0.0,
        });
    }
    // Bernstein-shape reference exp(−ĉσN), pinned to the first row's tail.
    if let Some(first) = rows.first() {
        let c_hat = if first.tail > 0.0 {
            Some(-first.tail.ln() / (first.sigma * first.n as f64))
        } else {
            None
        };
        for row in rows.iter_mut() {
            row.reference = match c_hat {
                Some(c) => (-c * row.sigma * row.n as f64).exp(),
                None => 0.0,
            };
        }
    }
    Ok(rows)
}

/// Whether the measured tails are consistent with a non-increasing trend,
/// given their 95% binomial intervals.
pub fn trend_consistent(rows: &[ConcentrationRow]) -> bool {
    let counts: Vec<(u64, u64)> = rows.iter().map(|r| (r.exceedances, r.trials)).collect();
    stats::consistent_with_nonincreasing(&counts)
}
