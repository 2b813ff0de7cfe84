//! Monte Carlo and deterministic evaluation of the fractional operators,
//! plus trial aggregation.
//!
//! `gl_*` evaluates the derivative in its Grünwald–Letnikov form (the limit
//! of scaled backward differences); `rl_*` evaluates the Riemann–Liouville
//! integral. The derivative estimator realizes the signed-measure
//! representation of the scaled backward difference: the weight sum splits
//! into singleton terms plus set masses times expectations over the sieved
//! branch distributions, each expectation replaced by an independent sample
//! mean. The integral estimator averages the integrand over
//! continuous-Sibuya points. Both produce one inner estimate per call;
//! [`run_trials`] repeats them over independent streams and reports mean,
//! standard error and a 95% normal-approximation confidence interval.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad::adaptive_gk15;
use crate::real::Real;
use crate::samplers::{sample_continuous_sibuya, sample_sieved, UniformSource, SEARCH_CAP};
use crate::special::reciprocal_gamma;
use crate::weights::{partition, weight_step, Branch, FractionalOrder};

/// Inner Monte Carlo configuration: step h, inner sample count N, trial
/// count K and the base seed trials derive their streams from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig<T> {
    h: T,
    n_samples: usize,
    n_trials: usize,
    seed: u64,
}

fn require_positive<T: Real>(x: T, what: &str) -> Result<()> {
    if x.is_finite() && x > T::zero() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} must be positive and finite, got {x}")))
    }
}

impl<T: Real> EstimatorConfig<T> {
    pub fn new(h: T, n_samples: usize, n_trials: usize, seed: u64) -> Result<Self> {
        require_positive(h, "step h")?;
        if n_samples == 0 {
            return Err(Error::Domain("inner sample count must be >= 1".into()));
        }
        if n_trials == 0 {
            return Err(Error::Domain("trial count must be >= 1".into()));
        }
        Ok(Self { h, n_samples, n_trials, seed })
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_trials(&self) -> usize {
        self.n_trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// A named scalar function of time.
///
/// By default evaluation is extended by zero for negative arguments, which
/// realizes the operators' lower terminal at 0 and truncates the infinite
/// backward sums. [`Evaluand::two_sided`] skips the extension; a two-sided
/// constant is annihilated exactly by the signed-measure scheme.
#[derive(Clone)]
pub struct Evaluand<T> {
    name: String,
    f: Arc<dyn Fn(T) -> T + Send + Sync>,
    zero_extended: bool,
}

impl<T: Real> Evaluand<T> {
    pub fn new(name: impl Into<String>, f: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        Self { name: name.into(), f: Arc::new(f), zero_extended: true }
    }

    pub fn two_sided(name: impl Into<String>, f: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        Self { name: name.into(), f: Arc::new(f), zero_extended: false }
    }

    #[inline]
    pub fn eval(&self, t: T) -> T {
        if self.zero_extended && t < T::zero() {
            T::zero()
        } else {
            (self.f)(t)
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_zero_extended(&self) -> bool {
        self.zero_extended
    }
}

impl<T> std::fmt::Debug for Evaluand<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Evaluand")
            .field("name", &self.name)
            .field("zero_extended", &self.zero_extended)
            .finish()
    }
}

/// Scaled backward difference h^-α Σ_{k=0}^{⌊t/h⌋} w_k f(t-kh).
///
/// The sum truncates naturally because f vanishes on negative arguments.
/// Integer orders are fine: their weight sequences terminate, making this
/// the exact finite difference.
///
/// The bracket is O(h^α) through cancellation while its rounding floor is
/// not, so at high orders very small steps drown in noise after the h^-α
/// scaling (at α ≈ 4.5, h below ~1e-3 returns garbage). Pick h so that
/// h^α stays well above ~1e-14.
pub fn gl_deterministic<T: Real>(f: &Evaluand<T>, alpha: T, t: T, h: T) -> T {
    assert!(alpha.is_finite() && alpha > T::zero(), "order must be positive");
    assert!(t > T::zero(), "evaluation point must be positive");
    assert!(h > T::zero(), "step must be positive");
    let steps = ((t / h).as_f64() * (1.0 + 1e-12)).floor() as u64;
    let mut w = T::one();
    let mut acc = f.eval(t);
    for k in 1..=steps {
        w = weight_step(w, k, alpha);
        acc = acc + w * f.eval(t - T::of(k as f64) * h);
    }
    acc * h.powf(-alpha)
}

/// One inner Monte Carlo estimate of the scaled backward difference for a
/// non-integer order, using `cfg.n_samples` draws per nonempty branch.
///
/// The negative and positive branches draw from streams derived from `src`
/// at lanes 0 and 1, so the two sample sets are independent and the result
/// is a pure function of (inputs, seed, stream).
///
/// For zero-extended f the branch expectations always exist when f is
/// locally bounded: only the finitely many lattice points inside [0, t]
/// contribute, everything deeper in the tail evaluates to 0. Evaluands
/// without the extension (or unbounded on [0, t]) are the caller's
/// responsibility.
pub fn gl_mc_estimate<T: Real>(
    f: &Evaluand<T>,
    order: &FractionalOrder<T>,
    t: T,
    cfg: &EstimatorConfig<T>,
    src: &UniformSource,
) -> Result<T> {
    if order.is_integer() {
        return Err(Error::Domain(format!(
            "order {} is an integer; use gl_deterministic",
            order.alpha()
        )));
    }
    require_positive(t, "evaluation point")?;
    let part = partition(order, SEARCH_CAP)?;
    let h = cfg.h();
    let mut acc = f.eval(t);
    for (k, w) in [part.singleton_neg(), part.singleton_pos()].into_iter().flatten() {
        acc = acc + w * f.eval(t - T::of(k as f64) * h);
    }
    let n = T::of(cfg.n_samples() as f64);
    for (branch, lane) in [(Branch::Negative, 0u64), (Branch::Positive, 1u64)] {
        if part.set(branch).is_empty() {
            continue;
        }
        let mut stream = src.derive(lane);
        let mut sum = T::zero();
        for _ in 0..cfg.n_samples() {
            let y = sample_sieved(&part, branch, &mut stream)?;
            sum = sum + f.eval(t - T::of(y as f64) * h);
        }
        acc = acc + part.mass(branch) * (sum / n);
    }
    Ok(acc * h.powf(-order.alpha()))
}

/// One inner Monte Carlo estimate of the order-α integral with lower
/// terminal 0: (t^α/Γ(α+1)) · mean of f(t·Xᵢ) over continuous-Sibuya Xᵢ.
pub fn rl_integral_mc_estimate<T: Real>(
    f: &Evaluand<T>,
    alpha: T,
    t: T,
    cfg: &EstimatorConfig<T>,
    src: &UniformSource,
) -> Result<T> {
    require_positive(alpha, "integration order")?;
    require_positive(t, "evaluation point")?;
    let mut stream = src.derive(0);
    let mut sum = T::zero();
    for _ in 0..cfg.n_samples() {
        let x: T = sample_continuous_sibuya(alpha, &mut stream);
        let v = f.eval(t * x);
        if !v.is_finite() {
            return Err(Error::NonFinite { at: (t * x).as_f64() });
        }
        sum = sum + v;
    }
    let n = T::of(cfg.n_samples() as f64);
    Ok(t.powf(alpha) * reciprocal_gamma(alpha + T::one()) * (sum / n))
}

/// Deterministic oracle for the order-α integral.
///
/// The substitution τ = t(1 - v^{1/α}) absorbs the (t-τ)^{α-1} kernel
/// exactly, giving (t^α/Γ(α+1)) ∫₀¹ f(t(1-v^{1/α})) dv. A second
/// substitution v = 1 - w⁸ then weakens any power singularity of f at τ = 0
/// (integrand ∝ w^{8(1-p)-1} for f ~ τ^-p), keeping the adaptive refinement
/// well inside float resolution. τ is formed through ln_1p/exp_m1 so it
/// underflows gracefully instead of rounding onto the singular point.
pub fn rl_integral_quadrature<T: Real>(
    f: &Evaluand<T>,
    alpha: T,
    t: T,
    rel_tol: T,
) -> Result<T> {
    require_positive(alpha, "integration order")?;
    require_positive(t, "evaluation point")?;
    require_positive(rel_tol, "tolerance")?;
    let inv_alpha = alpha.recip();
    let eight = T::of(8.0);
    let g = move |w: T| {
        let w2 = w * w;
        let w4 = w2 * w2;
        let w8 = w4 * w4;
        // τ = t(1 - (1-w⁸)^{1/α}), stable for tiny w⁸
        let tau = t * (-((-w8).ln_1p() * inv_alpha).exp_m1());
        if tau <= T::zero() {
            // w⁸ underflowed; the sliver's true contribution is below
            // double precision.
            return T::zero();
        }
        f.eval(tau) * eight * w4 * w2 * w
    };
    let (integral, _err) = adaptive_gk15(&g, T::zero(), T::one(), rel_tol)?;
    Ok(t.powf(alpha) * reciprocal_gamma(alpha + T::one()) * integral)
}

/// Per-trial estimates with their aggregate statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary<T> {
    trial_values: Vec<T>,
    mean: T,
    std_error: T,
    ci_low: T,
    ci_high: T,
    median: T,
    kurtosis: T,
    heavy_tailed: bool,
}

/// Sample kurtosis above this flags the trial distribution as too
/// heavy-tailed for the normal-approximation interval to be trusted;
/// consumers should prefer the median for such runs.
pub const KURTOSIS_FLAG: f64 = 100.0;

impl<T: Real> TrialSummary<T> {
    /// Aggregate at least two trial values.
    pub fn from_values(trial_values: Vec<T>) -> Result<Self> {
        let k = trial_values.len();
        if k < 2 {
            return Err(Error::TooFewTrials { got: k });
        }
        // Identical trials mean a genuinely deterministic estimator; report
        // that exactly instead of leaving ulp noise from the averaging.
        let first = trial_values[0];
        if trial_values.iter().all(|&v| v == first) {
            return Ok(Self {
                trial_values,
                mean: first,
                std_error: T::zero(),
                ci_low: first,
                ci_high: first,
                median: first,
                kurtosis: T::zero(),
                heavy_tailed: false,
            });
        }
        let kf = T::of(k as f64);
        let mean = trial_values.iter().fold(T::zero(), |a, &v| a + v) / kf;
        let mut m2 = T::zero();
        let mut m4 = T::zero();
        for &v in &trial_values {
            let d = v - mean;
            let d2 = d * d;
            m2 = m2 + d2;
            m4 = m4 + d2 * d2;
        }
        let sample_var = m2 / T::of((k - 1) as f64);
        let std_error = (sample_var / kf).sqrt();
        let half_width = T::of(1.96) * std_error;
        let mut sorted = trial_values.clone();
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let median = if k.is_multiple_of(2) {
            (sorted[k / 2 - 1] + sorted[k / 2]) * T::of(0.5)
        } else {
            sorted[k / 2]
        };
        let kurtosis = if m2 > T::zero() {
            (m4 / kf) / ((m2 / kf) * (m2 / kf))
        } else {
            T::zero()
        };
        Ok(Self {
            trial_values,
            mean,
            std_error,
            ci_low: mean - half_width,
            ci_high: mean + half_width,
            median,
            kurtosis,
            heavy_tailed: kurtosis > T::of(KURTOSIS_FLAG),
        })
    }

    pub fn values(&self) -> &[T] {
        &self.trial_values
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    pub fn std_error(&self) -> T {
        self.std_error
    }

    pub fn ci_low(&self) -> T {
        self.ci_low
    }

    pub fn ci_high(&self) -> T {
        self.ci_high
    }

    pub fn median(&self) -> T {
        self.median
    }

    /// Raw sample kurtosis of the trial values (normal ≈ 3).
    pub fn kurtosis(&self) -> T {
        self.kurtosis
    }

    /// True when the kurtosis sanity check failed; see [`KURTOSIS_FLAG`].
    pub fn heavy_tailed(&self) -> bool {
        self.heavy_tailed
    }
}

/// Run K independent trials in parallel. Trial i draws from the stream
/// (seed, i); results merge in trial-index order, so parallel and serial
/// execution produce identical summaries.
pub fn run_trials<T, F>(one_trial: F, n_trials: usize, seed: u64) -> Result<TrialSummary<T>>
where
    T: Real,
    F: Fn(&UniformSource) -> Result<T> + Sync,
{
    if n_trials < 2 {
        return Err(Error::TooFewTrials { got: n_trials });
    }
    let values: Result<Vec<T>> = (0..n_trials)
        .into_par_iter()
        .map(|i| one_trial(&UniformSource::with_stream(seed, i as u64)))
        .collect();
    TrialSummary::from_values(values?)
}

/// Serial twin of [`run_trials`]; same streams, same merge order.
pub fn run_trials_serial<T, F>(one_trial: F, n_trials: usize, seed: u64) -> Result<TrialSummary<T>>
where
    T: Real,
    F: Fn(&UniformSource) -> Result<T>,
{
    if n_trials < 2 {
        return Err(Error::TooFewTrials { got: n_trials });
    }
    let values: Result<Vec<T>> = (0..n_trials)
        .map(|i| one_trial(&UniformSource::with_stream(seed, i as u64)))
        .collect();
    TrialSummary::from_values(values?)
}
