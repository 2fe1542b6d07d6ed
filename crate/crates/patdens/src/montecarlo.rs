//! Seeded Monte Carlo estimation of density moments and instance
//! probabilities on uniformly random words, plus experiment drivers for
//! the doubled/nondoubled dichotomy and the concentration claims.
//!
//! Reproducibility contract: every sample index `j` draws from its own
//! ChaCha8 substream derived from the master seed, and aggregation walks
//! the per-sample values in index order. Results are therefore
//! bit-identical across runs and across worker counts; parallel scheduling
//! only changes who computes each value, never what is summed or in what
//! order.

use crate::words::{Pattern, Word};
use crate::{exact, fastcount, matcher, Budget, Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// 99% two-sided normal quantile for confidence half-widths.
pub const Z_99: f64 = 2.5758293035489004;

/// Largest supported moment order.
pub const P_MAX_LIMIT: usize = 4;

/// Summary statistics of a Monte Carlo estimation run.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    pub pattern: String,
    pub q: usize,
    pub n: usize,
    pub sample_count: u64,
    pub seed: u64,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// `raw_moments[i]` is the raw moment of order `i + 1`.
    pub raw_moments: Vec<f64>,
    /// `central_moments[i]` is the central moment of order `i + 1` (biased,
    /// i.e. normalized by the sample count).
    pub central_moments: Vec<f64>,
    /// 99% normal-approximation confidence half-width for the mean.
    pub ci_half_width: f64,
}

/// One grid point of an experiment trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub n: usize,
    pub estimate: f64,
    pub scaled_estimate: f64,
    pub ci_half_width: f64,
    pub sample_count: u64,
}

/// A per-order trajectory produced by [`moment_scaling`].
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTrajectory {
    pub order: u32,
    pub central: bool,
    pub rows: Vec<TrajectoryRow>,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// The ChaCha8 substream for one sample index under a master seed.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut x = seed;
    for chunk in key.chunks_exact_mut(8) {
        x = splitmix64(x);
        chunk.copy_from_slice(&x.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Independent derived seed for a sub-experiment (one grid point).
fn derive_seed(seed: u64, salt: u64) -> u64 {
    splitmix64(seed ^ salt.wrapping_mul(0xa24baed4963ee407))
}

/// A uniform random word of length `n` over a `q`-letter alphabet.
pub fn sample_word<R: Rng>(q: usize, n: usize, rng: &mut R) -> Result<Word> {
    if q == 0 {
        return Err(Error::InvalidAlphabetSize(q));
    }
    if q > crate::words::MAX_ALPHABET {
        return Err(Error::AlphabetTooLarge(q));
    }
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    let mut symbols = vec![0u8; n];
    if q == 1 {
        // the single word
    } else if q.is_power_of_two() {
        // pull packed bits: cheap and exactly uniform
        let bits = q.trailing_zeros() as usize;
        let mask = (q - 1) as u64;
        let mut pool = 0u64;
        let mut avail = 0usize;
        for s in symbols.iter_mut() {
            if avail < bits {
                pool = rng.random::<u64>();
                avail = 64;
            }
            *s = (pool & mask) as u8;
            pool >>= bits;
            avail -= bits;
        }
    } else {
        for s in symbols.iter_mut() {
            *s = rng.random_range(0..q) as u8;
        }
    }
    Word::new(symbols, q)
}

/// Work units for one density evaluation, matching the counting route the
/// matcher will take (window count for the generic sweep, `n log n` for
/// shapes with a dedicated counter).
pub(crate) fn density_work(p: &Pattern, n: usize) -> u64 {
    let n = n as u64;
    if fastcount::has_fast_counter(p) {
        n * (64 - n.leading_zeros() as u64).max(1)
    } else {
        n * n
    }
}

fn check_sampling_budget(per_sample: u64, samples: u64, budget: &Budget) -> Result<()> {
    budget.check(per_sample.saturating_mul(samples))
}

/// Order-preserving parallel map over sample indices.
fn collect_samples<F>(samples: u64, eval: F) -> Vec<f64>
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    (0..samples).into_par_iter().map(eval).collect()
}

fn summarize(
    pattern: &Pattern,
    q: usize,
    n: usize,
    seed: u64,
    p_max: usize,
    values: &[f64],
) -> EstimationResult {
    let s = values.len() as f64;
    let mut raw = vec![0.0f64; p_max];
    for &x in values {
        let mut acc = 1.0;
        for slot in raw.iter_mut() {
            acc *= x;
            *slot += acc;
        }
    }
    for slot in raw.iter_mut() {
        *slot /= s;
    }
    let mean = raw[0];
    let mut central = vec![0.0f64; p_max];
    for &x in values {
        let d = x - mean;
        let mut acc = 1.0;
        for slot in central.iter_mut() {
            acc *= d;
            *slot += acc;
        }
    }
    for slot in central.iter_mut() {
        *slot /= s;
    }
    let variance = if values.len() >= 2 {
        central.get(1).copied().unwrap_or(0.0) * s / (s - 1.0)
    } else {
        0.0
    };
    let variance = variance.max(0.0);
    let ci_half_width = Z_99 * (variance / s).sqrt();
    EstimationResult {
        pattern: pattern.render(),
        q,
        n,
        sample_count: values.len() as u64,
        seed,
        mean,
        variance,
        raw_moments: raw,
        central_moments: central,
        ci_half_width,
    }
}

fn validate_p_max(p_max: usize) -> Result<()> {
    if p_max == 0 || p_max > P_MAX_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "moment order must be between 1 and {P_MAX_LIMIT} (got {p_max})"
        )));
    }
    Ok(())
}

/// Moments of `δ(p, W)` over `samples` independent uniform words.
pub fn estimate_density_moments(
    p: &Pattern,
    q: usize,
    n: usize,
    samples: u64,
    seed: u64,
    p_max: usize,
    budget: &Budget,
) -> Result<EstimationResult> {
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least 2 samples".into()));
    }
    validate_p_max(p_max)?;
    check_sampling_budget(density_work(p, n), samples, budget)?;
    let denom = (n as u64 * (n as u64 + 1) / 2) as f64;
    let values = try_collect(samples, |j| {
        let mut rng = sample_rng(seed, j);
        let w = sample_word(q, n, &mut rng)?;
        Ok(fastcount::count_instance_windows(p, &w) as f64 / denom)
    })?;
    Ok(summarize(p, q, n, seed, p_max, &values))
}

/// Mean of the whole-word instance indicator `δ_sur` over uniform words;
/// the Monte Carlo counterpart of `exact::instance_probability`.
pub fn estimate_instance_probability(
    p: &Pattern,
    q: usize,
    n: usize,
    samples: u64,
    seed: u64,
    budget: &Budget,
) -> Result<EstimationResult> {
    if samples < 1 {
        return Err(Error::InvalidParameter("need at least 1 sample".into()));
    }
    check_sampling_budget(n as u64, samples, budget)?;
    let info = matcher::PatternInfo::new(p);
    let values = try_collect(samples, |j| {
        let mut rng = sample_rng(seed, j);
        let w = sample_word(q, n, &mut rng)?;
        Ok(info.window_is_instance_fast(w.symbols()) as u64 as f64)
    })?;
    Ok(summarize(p, q, n, seed, 2, &values))
}

/// Parallel sample collection that surfaces the first error.
fn try_collect<F>(samples: u64, eval: F) -> Result<Vec<f64>>
where
    F: Fn(u64) -> Result<f64> + Sync + Send,
{
    let values: Vec<Result<f64>> = (0..samples).into_par_iter().map(eval).collect();
    values.into_iter().collect()
}

fn validate_grid(n_list: &[usize]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::InvalidParameter("empty n grid".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("n grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Per-`n` density means with the dichotomy scaling `n · mean`: the scaled
/// column stabilizes for doubled patterns, the raw column for nondoubled.
pub fn dichotomy_trajectory(
    p: &Pattern,
    q: usize,
    n_list: &[usize],
    samples: u64,
    seed: u64,
    budget: &Budget,
) -> Result<Vec<TrajectoryRow>> {
    validate_grid(n_list)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let est =
            estimate_density_moments(p, q, n, samples, derive_seed(seed, n as u64), 2, budget)?;
        rows.push(TrajectoryRow {
            n,
            estimate: est.mean,
            scaled_estimate: n as f64 * est.mean,
            ci_half_width: est.ci_half_width,
            sample_count: est.sample_count,
        });
    }
    Ok(rows)
}

/// Per-`n` variance of `δ` with the concentration scaling
/// `Var · n / ((log n)³ · mean²)`, which must stay bounded for doubled
/// patterns. Nondoubled patterns are rejected unless `exploratory` is set
/// (that case is an open question, so no verdict attaches to the data).
pub fn variance_scaling(
    p: &Pattern,
    q: usize,
    n_list: &[usize],
    samples: u64,
    seed: u64,
    exploratory: bool,
    budget: &Budget,
) -> Result<Vec<TrajectoryRow>> {
    if !p.is_doubled() && !exploratory {
        return Err(Error::NondoubledPattern);
    }
    validate_grid(n_list)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let est =
            estimate_density_moments(p, q, n, samples, derive_seed(seed, n as u64), 2, budget)?;
        let log_n = (n as f64).ln();
        let scaled = if est.mean > 0.0 {
            est.variance * n as f64 / (log_n.powi(3) * est.mean * est.mean)
        } else {
            f64::NAN
        };
        rows.push(TrajectoryRow {
            n,
            estimate: est.variance,
            scaled_estimate: scaled,
            ci_half_width: est.ci_half_width,
            sample_count: est.sample_count,
        });
    }
    Ok(rows)
}

/// Raw and central moments of `δ` scaled by `(n / log n)^p`, which must
/// stay bounded for doubled patterns (Theorem-10-style behavior).
pub fn moment_scaling(
    p: &Pattern,
    q: usize,
    n_list: &[usize],
    samples: u64,
    seed: u64,
    p_max: usize,
    budget: &Budget,
) -> Result<Vec<MomentTrajectory>> {
    if !p.is_doubled() {
        return Err(Error::NondoubledPattern);
    }
    validate_grid(n_list)?;
    validate_p_max(p_max)?;
    let estimates: Vec<EstimationResult> = n_list
        .iter()
        .map(|&n| {
            estimate_density_moments(p, q, n, samples, derive_seed(seed, n as u64), p_max, budget)
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(2 * p_max);
    for central in [false, true] {
        for order in 1..=p_max {
            let rows = estimates
                .iter()
                .map(|est| {
                    let factor = (est.n as f64 / (est.n as f64).ln()).powi(order as i32);
                    let moment = if central {
                        est.central_moments[order - 1]
                    } else {
                        est.raw_moments[order - 1]
                    };
                    TrajectoryRow {
                        n: est.n,
                        estimate: moment,
                        scaled_estimate: moment * factor,
                        ci_half_width: est.ci_half_width,
                        sample_count: est.sample_count,
                    }
                })
                .collect();
            out.push(MomentTrajectory { order: order as u32, central, rows });
        }
    }
    Ok(out)
}

/// Per-`n` fraction of uniformly sampled `p`-instances that admit a witness
/// with `|φ(U)| < √n` (`U` as in `exact::lemma_base_fraction`); the
/// fraction must trend toward 1.
pub fn lemma_base_diagnostic(
    p: &Pattern,
    q: usize,
    n_list: &[usize],
    samples: u64,
    seed: u64,
    budget: &Budget,
) -> Result<Vec<TrajectoryRow>> {
    validate_grid(n_list)?;
    if samples < 1 {
        return Err(Error::InvalidParameter("need at least 1 sample".into()));
    }
    let d = p.multiplicity_gcd() as usize;
    let trivial = exact::reduced_pattern(p).is_none();
    let r = p.min_multiplicity();
    let heavy: Vec<bool> = p.multiplicities().iter().map(|&m| m > r).collect();
    let info = matcher::PatternInfo::new(p);
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if n % d != 0 {
            return Err(Error::InvalidParameter(format!(
                "length {n} is not a multiple of the multiplicity gcd {d}"
            )));
        }
        check_sampling_budget(n as u64, samples, budget)?;
        let values: Vec<f64> = if trivial {
            vec![1.0; samples as usize]
        } else {
            let instances = exact::enumerate_instances(p, q, n, budget)?;
            if instances.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "pattern has no instances of length {n}"
                )));
            }
            let threshold = (n as f64).sqrt();
            let n_seed = derive_seed(seed, n as u64);
            collect_samples(samples, |j| {
                let mut rng = sample_rng(n_seed, j);
                let w = &instances[rng.random_range(0..instances.len())];
                exact::has_small_witness(&info, &heavy, w.symbols(), threshold) as u64 as f64
            })
        };
        let est = summarize(p, q, n, seed, 2, &values);
        rows.push(TrajectoryRow {
            n,
            estimate: est.mean,
            scaled_estimate: est.mean,
            ci_half_width: est.ci_half_width,
            sample_count: est.sample_count,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn pat(s: &str) -> Pattern {
        Pattern::parse(s).unwrap()
    }

    fn free() -> Budget {
        Budget::unlimited()
    }

    #[test]
    fn sample_word_is_deterministic() {
        let a = sample_word(3, 50, &mut sample_rng(42, 7)).unwrap();
        let b = sample_word(3, 50, &mut sample_rng(42, 7)).unwrap();
        assert_eq!(a, b);
        let c = sample_word(3, 50, &mut sample_rng(42, 8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sample_word_unary() {
        let w = sample_word(1, 5, &mut sample_rng(0, 0)).unwrap();
        assert_eq!(w.render(), "aaaaa");
    }

    #[test]
    fn sample_word_frequencies() {
        // binomial check: 10^6 fair bits within 4 sigma of half
        let n = 1_000_000usize;
        let w = sample_word(2, n, &mut sample_rng(2024, 0)).unwrap();
        let ones = w.symbols().iter().filter(|&&s| s == 1).count() as f64;
        let sigma = (n as f64 * 0.25).sqrt();
        assert!((ones - n as f64 / 2.0).abs() < 4.0 * sigma, "ones = {ones}");
    }

    #[test]
    fn single_variable_density_is_constant_one() {
        let est = estimate_density_moments(&pat("x"), 2, 10, 100, 1, 2, &free()).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.variance, 0.0);
        assert_eq!(est.ci_half_width, 0.0);
    }

    #[test]
    fn density_mean_matches_exact_small() {
        // E(δ(xx, W_2)) = 1/6
        let est = estimate_density_moments(&pat("xx"), 2, 2, 40_000, 7, 2, &free()).unwrap();
        let exact_val = exact::expected_density(&pat("xx"), 2, 2, &free())
            .unwrap()
            .to_f64()
            .unwrap();
        let se = (est.variance / est.sample_count as f64).sqrt();
        assert!((est.mean - exact_val).abs() < 5.0 * se, "mean {} vs {exact_val}", est.mean);
    }

    #[test]
    fn instance_probability_matches_exact() {
        let est =
            estimate_instance_probability(&pat("aba"), 2, 5, 40_000, 11, &free()).unwrap();
        assert!((est.mean - 0.625).abs() < 0.01, "mean {}", est.mean);
    }

    #[test]
    fn instance_probability_parity_zero() {
        let est = estimate_instance_probability(&pat("xx"), 2, 7, 500, 3, &free()).unwrap();
        assert_eq!(est.mean, 0.0);
    }

    #[test]
    fn estimates_stay_in_range() {
        let est = estimate_density_moments(&pat("xyx"), 2, 9, 300, 5, 4, &free()).unwrap();
        assert!(est.mean >= 0.0 && est.mean <= 1.0);
        assert!(est.variance >= 0.0);
        // central moment 2 consistent with variance up to normalization
        let s = est.sample_count as f64;
        assert!((est.central_moments[1] * s / (s - 1.0) - est.variance).abs() < 1e-12);
    }

    #[test]
    fn determinism_across_worker_counts() {
        let run = |threads: usize| {
            let pool =
                rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                estimate_density_moments(&pat("xx"), 2, 64, 2_000, 99, 3, &free()).unwrap()
            })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn budget_guard() {
        let tight = Budget::new(100);
        assert!(matches!(
            estimate_density_moments(&pat("aba"), 2, 100, 1_000, 0, 2, &tight),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn dichotomy_basic_shape() {
        let rows =
            dichotomy_trajectory(&pat("xx"), 2, &[8, 16, 32], 2_000, 5, &free()).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.windows(2).all(|w| w[0].n < w[1].n));
        assert!(rows[2].estimate < rows[0].estimate); // doubled: mean decreases
    }

    #[test]
    fn variance_scaling_rejects_nondoubled() {
        assert!(matches!(
            variance_scaling(&pat("x"), 2, &[8, 16], 100, 1, false, &free()),
            Err(Error::NondoubledPattern)
        ));
        // exploratory mode accepts
        assert!(variance_scaling(&pat("aba"), 2, &[8, 16], 100, 1, true, &free()).is_ok());
    }

    #[test]
    fn moment_scaling_shape() {
        let trajs = moment_scaling(&pat("xx"), 2, &[8, 16], 500, 2, 3, &free()).unwrap();
        assert_eq!(trajs.len(), 6); // raw and central, orders 1..=3
        for t in &trajs {
            assert_eq!(t.rows.len(), 2);
        }
        assert!(matches!(
            moment_scaling(&pat("aba"), 2, &[8], 100, 1, 2, &free()),
            Err(Error::NondoubledPattern)
        ));
    }

    #[test]
    fn lemma_diagnostic_trivial_pattern() {
        let rows =
            lemma_base_diagnostic(&pat("xxyy"), 2, &[8, 12], 50, 1, &free()).unwrap();
        assert!(rows.iter().all(|r| r.estimate == 1.0));
    }

    #[test]
    fn lemma_diagnostic_aba() {
        let rows =
            lemma_base_diagnostic(&pat("aba"), 2, &[6, 10], 2_000, 9, &free()).unwrap();
        for r in &rows {
            assert!(r.estimate >= 0.0 && r.estimate <= 1.0);
        }
    }

    #[test]
    fn grid_validation() {
        assert!(matches!(
            dichotomy_trajectory(&pat("xx"), 2, &[8, 8], 100, 1, &free()),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            dichotomy_trajectory(&pat("xx"), 2, &[], 100, 1, &free()),
            Err(Error::InvalidParameter(_))
        ));
    }
}
