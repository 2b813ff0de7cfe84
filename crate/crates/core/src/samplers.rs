//! Random variate generation.
//!
//! Three interchangeable Sibuya samplers (inverse CDF, Bernoulli trials, and
//! the beta–geometric mixture), the sieved branch distributions of the weight
//! partition, and the continuous analogue on (0, 1). Everything draws from an
//! explicit seedable [`UniformSource`], so runs are reproducible and trials
//! can be spread over independent streams.
//!
//! The Sibuya tail is extremely heavy (survival decays like k^-α, so for
//! small α values beyond 10^7 occur with macroscopic probability). Sequential
//! searches therefore run literally only for the first 1024 indices; deeper
//! quantiles are resolved exactly by inverting the survival function in log
//! space, and draws whose quantile exceeds `u64::MAX` saturate there. The saturation mass is at most P(Y > 1.8e19), which is
//! invisible to pmf, generating-function and tail statistics, and such draws
//! land far outside any estimator's evaluation window.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::weights::{ln_pochhammer_gap, weight_step, Branch, WeightPartition};

/// Iteration bound for rejection sampling (beta draws).
pub const REJECTION_CAP: u64 = 1_000_000;

/// Default sequential search bound handed to weight partitions.
pub const SEARCH_CAP: u64 = 10_000_000;

/// Length of the literal sequential phase of inverse-CDF searches.
const SEQUENTIAL_LIMIT: u64 = 1024;

/// Splitmix64 finalizer; a bijection on u64.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a decorrelated child seed (one per grid point, worker, ...).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(seed ^ mix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15)))
}

/// Anything that produces uniforms in the open interval (0, 1).
///
/// [`UniformSource`] is the production implementation; tests drive samplers
/// with scripted values.
pub trait UnitSource<T: Real> {
    fn next_unit(&mut self) -> T;
}

/// Seedable uniform source with independent streams.
///
/// Each `(seed, stream)` pair keys its own ChaCha12 generator; distinct pairs
/// produce distinct keys (the mixer is a bijection), so streams never collide
/// and may run on different workers. Values are strictly inside (0, 1).
#[derive(Debug, Clone)]
pub struct UniformSource {
    rng: ChaCha12Rng,
    seed: u64,
    stream: u64,
}

impl UniformSource {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&mix64(seed).to_le_bytes());
        key[8..16].copy_from_slice(&mix64(seed ^ 0x9E37_79B9_7F4A_7C15).to_le_bytes());
        key[16..24].copy_from_slice(&mix64(stream).to_le_bytes());
        key[24..32].copy_from_slice(&mix64(stream ^ 0x6A09_E667_F3BC_C909).to_le_bytes());
        Self { rng: ChaCha12Rng::from_seed(key), seed, stream }
    }

    /// A statistically independent source for sub-stream `lane`, derived by
    /// index from this source's identity (never by splitting its output).
    pub fn derive(&self, lane: u64) -> Self {
        Self::with_stream(
            self.seed,
            mix64(self.stream ^ mix64(lane.wrapping_add(0xA5A5_5A5A_0F0F_F0F0))),
        )
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl<T: Real> UnitSource<T> for UniformSource {
    #[inline]
    fn next_unit(&mut self) -> T {
        T::unit_from_bits(self.rng.next_u64())
    }
}

fn check_sibuya_alpha<T: Real>(alpha: T) -> Result<()> {
    if alpha.is_finite() && alpha > T::zero() && alpha < T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Sibuya parameter must lie in (0, 1), got {alpha}")))
    }
}

/// ln |Σ_{j=0}^k w_j| = ln |(-1)^k C(α-1, k)| for non-integer α ∈ (0, 5).
/// For 0 < α < 1 this is the Sibuya survival ln P(Y > k).
fn ln_abs_partial_sum(alpha: f64, k: f64) -> f64 {
    use std::f64::consts::PI;
    crate::special::ln_gamma(alpha).unwrap() + (PI * alpha).sin().abs().ln() - PI.ln()
        + ln_pochhammer_gap(k, alpha)
}

/// Smallest k > lo with ln|S(k)| < target, saturating at `u64::MAX` when the
/// quantile is beyond the representable range. Caller guarantees
/// ln|S(lo)| ≥ target up to rounding.
fn tail_quantile(alpha: f64, target: f64, lo: u64) -> u64 {
    let ln_s = |k: u64| ln_abs_partial_sum(alpha, k as f64);
    if ln_s(lo) < target {
        // Rounding disagreement with the sequential accumulation; the
        // crossing is at the handoff itself.
        return lo + 1;
    }
    // Gallop out to a bracket, then bisect.
    let mut lo = lo;
    let mut hi = lo.saturating_mul(2);
    while ln_s(hi) >= target {
        if hi == u64::MAX {
            return u64::MAX;
        }
        lo = hi;
        hi = hi.saturating_mul(2);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ln_s(mid) < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Method 1: invert one uniform through the cumulative distribution,
/// accumulating the pmf by the recurrence p_{k+1} = p_k (k-α)/(k+1).
pub fn sample_sibuya_inverse_cdf<T: Real, S: UnitSource<T> + ?Sized>(
    alpha: T,
    src: &mut S,
) -> Result<u64> {
    check_sibuya_alpha(alpha)?;
    let u: T = src.next_unit();
    let mut p = alpha; // p_1
    let mut cum = alpha; // F_1
    for k in 1..=SEQUENTIAL_LIMIT {
        if u < cum {
            return Ok(k);
        }
        let kf = T::of(k as f64);
        p = p * (kf - alpha) / (kf + T::one());
        cum = cum + p;
    }
    // Smallest k with survival below 1-u. 1-u is exact for u >= 0.5.
    let target = (T::one() - u).as_f64().ln();
    Ok(tail_quantile(alpha.as_f64(), target, SEQUENTIAL_LIMIT))
}

/// Method 2: Bernoulli trials with success probability α/k at trial k; the
/// result is the first successful trial number. Past the sequential phase
/// the remaining trials are resolved at once by conditional inversion with a
/// single further uniform.
pub fn sample_sibuya_bernoulli<T: Real, S: UnitSource<T> + ?Sized>(
    alpha: T,
    src: &mut S,
) -> Result<u64> {
    check_sibuya_alpha(alpha)?;
    for k in 1..=SEQUENTIAL_LIMIT {
        let u: T = src.next_unit();
        if u < alpha / T::of(k as f64) {
            return Ok(k);
        }
    }
    let v: T = src.next_unit();
    let af = alpha.as_f64();
    let target = ln_abs_partial_sum(af, SEQUENTIAL_LIMIT as f64) + v.as_f64().ln();
    Ok(tail_quantile(af, target, SEQUENTIAL_LIMIT))
}

/// Geometric on {1, 2, ...} with success probability p, by inverse transform
/// k = ⌈ln U / ln(1-p)⌉; p = 1 short-circuits to 1.
pub fn sample_geometric<T: Real, S: UnitSource<T> + ?Sized>(p: T, src: &mut S) -> Result<u64> {
    if p.is_nan() || p <= T::zero() || p > T::one() {
        return Err(Error::Domain(format!("geometric parameter must lie in (0, 1], got {p}")));
    }
    if p == T::one() {
        return Ok(1);
    }
    let u: T = src.next_unit();
    let r = (u.as_f64().ln() / (-p.as_f64()).ln_1p()).ceil();
    if r >= u64::MAX as f64 {
        return Ok(u64::MAX);
    }
    Ok((r as u64).max(1))
}

/// A draw from Beta(α, 1-α).
///
/// α = 1/2 uses the arcsine shortcut B = sin²(πU/2); otherwise Jöhnk
/// rejection (both shape parameters below one, so only uniforms are needed).
/// Results are nudged off the interval ends where float rounding would land
/// exactly on 0 or 1, keeping the downstream geometric draw defined.
pub fn sample_beta_sibuya<T: Real, S: UnitSource<T> + ?Sized>(alpha: T, src: &mut S) -> Result<T> {
    check_sibuya_alpha(alpha)?;
    let hi = T::one() - T::epsilon();
    let lo = T::min_positive_value();
    if alpha == T::of(0.5) {
        let u: T = src.next_unit();
        let s = (T::PI() * T::of(0.5) * u).sin();
        return Ok((s * s).max(lo).min(hi));
    }
    let inv_a = alpha.recip();
    let inv_b = (T::one() - alpha).recip();
    for _ in 0..REJECTION_CAP {
        let u: T = src.next_unit();
        let v: T = src.next_unit();
        let x = u.powf(inv_a);
        let y = v.powf(inv_b);
        let s = x + y;
        if s <= T::one() && s > T::zero() {
            return Ok((x / s).max(lo).min(hi));
        }
    }
    Err(Error::RejectionCap { cap: REJECTION_CAP })
}

/// Method 3: draw p from Beta(α, 1-α), then a geometric with parameter p.
pub fn sample_sibuya_beta_geometric<T: Real, S: UnitSource<T> + ?Sized>(
    alpha: T,
    src: &mut S,
) -> Result<u64> {
    let p = sample_beta_sibuya(alpha, src)?;
    sample_geometric(p, src)
}

/// Draw from a sieved branch distribution of the weight partition:
/// P(Y = k) = w_k / W over the branch's index set.
pub fn sample_sieved<T: Real, S: UnitSource<T> + ?Sized>(
    part: &WeightPartition<T>,
    branch: Branch,
    src: &mut S,
) -> Result<u64> {
    let set = part.set(branch);
    if set.is_empty() {
        return Err(Error::Domain(format!(
            "{branch:?} branch of the partition at alpha = {} is empty",
            part.alpha()
        )));
    }
    let alpha = part.alpha();
    // For 0 < α < 1 the negative branch is exactly the Sibuya distribution.
    if part.order().regime() == 1 {
        return sample_sibuya_inverse_cdf(alpha, src);
    }
    let u: T = src.next_unit();
    let mass = part.mass(branch);
    let m = part.order().regime() as u64;
    let mut cum = T::zero();
    let mut w = T::one();
    for k in 1..m {
        w = weight_step(w, k, alpha);
        if set.contains(k) {
            cum = cum + w / mass;
            if u < cum {
                return Ok(k);
            }
        }
    }
    if !set.is_infinite() {
        // Finite support: rounding can leave u a hair above the final
        // cumulative value; resolve to the largest member.
        return Ok(set.last_finite().expect("nonempty finite set"));
    }
    // Constant-sign tail from k = m, all of it in this branch.
    let limit = m + SEQUENTIAL_LIMIT.min(part.tail_cap());
    let mut k = m;
    while k <= limit {
        w = weight_step(w, k, alpha);
        cum = cum + w / mass;
        if u < cum {
            return Ok(k);
        }
        k += 1;
    }
    // Residual branch mass beyond k' is |S_{k'}| / |W|.
    let target = (T::one() - u).as_f64().ln() + mass.as_f64().abs().ln();
    Ok(tail_quantile(alpha.as_f64(), target, k - 1))
}

/// Draw from the continuous distribution on (0, 1) with CDF 1 - (1-u)^α,
/// by the inverse transform u = 1 - V^{1/α}.
///
/// Quantiles closer to an interval end than float resolution clamp to the
/// nearest interior value, preserving the open-interval contract. For very
/// small α a macroscopic share of the law sits within one ulp of 1, so the
/// clamp at the top is the nearest representable draw, not an error.
pub fn sample_continuous_sibuya<T: Real, S: UnitSource<T> + ?Sized>(alpha: T, src: &mut S) -> T {
    assert!(
        alpha.is_finite() && alpha > T::zero(),
        "continuous Sibuya parameter must be positive"
    );
    let v: T = src.next_unit();
    (T::one() - v.powf(alpha.recip()))
        .max(T::min_positive_value())
        .min(T::one() - T::epsilon())
}

/// Selector for the three Sibuya simulation methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SibuyaMethod {
    InverseCdf,
    Bernoulli,
    BetaGeometric,
}

impl SibuyaMethod {
    pub const ALL: [SibuyaMethod; 3] =
        [SibuyaMethod::InverseCdf, SibuyaMethod::Bernoulli, SibuyaMethod::BetaGeometric];

    /// 1-based index as used on the command line.
    pub fn from_index(index: u8) -> Result<Self> {
        match index {
            1 => Ok(SibuyaMethod::InverseCdf),
            2 => Ok(SibuyaMethod::Bernoulli),
            3 => Ok(SibuyaMethod::BetaGeometric),
            other => Err(Error::Domain(format!("method must be 1, 2 or 3, got {other}"))),
        }
    }

    pub fn index(&self) -> u8 {
        match self {
            SibuyaMethod::InverseCdf => 1,
            SibuyaMethod::Bernoulli => 2,
            SibuyaMethod::BetaGeometric => 3,
        }
    }
}

/// Validated Sibuya parameter plus method choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SibuyaSpec<T> {
    alpha: T,
    method: SibuyaMethod,
}

impl<T: Real> SibuyaSpec<T> {
    pub fn new(alpha: T, method: SibuyaMethod) -> Result<Self> {
        check_sibuya_alpha(alpha)?;
        Ok(Self { alpha, method })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn method(&self) -> SibuyaMethod {
        self.method
    }

    pub fn sample<S: UnitSource<T> + ?Sized>(&self, src: &mut S) -> Result<u64> {
        match self.method {
            SibuyaMethod::InverseCdf => sample_sibuya_inverse_cdf(self.alpha, src),
            SibuyaMethod::Bernoulli => sample_sibuya_bernoulli(self.alpha, src),
            SibuyaMethod::BetaGeometric => sample_sibuya_beta_geometric(self.alpha, src),
        }
    }
}

/// For each draw, sort the n sampled values ascending; return the
/// element-wise mean over all draws.
pub fn sorted_average_profile<T: Real, S: UnitSource<T> + ?Sized>(
    spec: &SibuyaSpec<T>,
    n: usize,
    draws: usize,
    src: &mut S,
) -> Result<Vec<T>> {
    if n == 0 || draws == 0 {
        return Err(Error::Domain("profile needs n >= 1 and draws >= 1".into()));
    }
    let mut acc = vec![T::zero(); n];
    let mut buf = vec![0u64; n];
    for _ in 0..draws {
        for slot in buf.iter_mut() {
            *slot = spec.sample(src)?;
        }
        buf.sort_unstable();
        for (a, &v) in acc.iter_mut().zip(buf.iter()) {
            *a = *a + T::of(v as f64);
        }
    }
    let d = T::of(draws as f64);
    for a in acc.iter_mut() {
        *a = *a / d;
    }
    Ok(acc)
}
