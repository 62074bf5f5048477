//! Execution of per-sample work and reduction of the results.
//!
//! Sample `i` draws only from its own RNG stream, and totals are gathered in
//! index order before a compensated sum, so the deterministic reduction gives
//! the same bits for any worker count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How per-sample totals are summed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    /// Index-ordered Neumaier summation; reproducible bit for bit.
    #[default]
    Deterministic,
    /// Parallel tree summation; the order depends on scheduling.
    Fast,
}

/// Whether samples are spread over a thread pool.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    /// Rayon data parallelism when the `parallel` feature is enabled,
    /// otherwise the same as `Sequential`.
    #[default]
    Parallel,
    Sequential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub samples: usize,
    pub seed: u64,
    /// Worker count; `None` uses the machine default.
    pub threads: Option<usize>,
    pub reduction: Reduction,
    pub execution: Execution,
}

impl SamplingConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            threads: None,
            reduction: Reduction::Deterministic,
            execution: Execution::Parallel,
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn with_reduction(mut self, reduction: Reduction) -> Self {
        self.reduction = reduction;
        self
    }
}

/// Evaluates `f(0), ..., f(n-1)` and returns the results in index order.
pub fn map_indexed<T, F>(n: usize, config: &SamplingConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    if config.threads == Some(0) {
        return Err(Error::Input("thread count must be positive".into()));
    }
    match config.execution {
        Execution::Sequential => Ok((0..n as u64).map(f).collect()),
        Execution::Parallel => parallel_map(n, config.threads, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(n: usize, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let run = || (0..n as u64).into_par_iter().map(&f).collect();
    match threads {
        None => Ok(run()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Input(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(run))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(n: usize, _threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    Ok((0..n as u64).map(f).collect())
}

/// Neumaier-compensated sum.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn reduce(values: &[f64], reduction: Reduction) -> f64 {
    match reduction {
        Reduction::Deterministic => neumaier_sum(values.iter().copied()),
        Reduction::Fast => fast_sum(values),
    }
}

#[cfg(feature = "parallel")]
fn fast_sum(values: &[f64]) -> f64 {
    use rayon::prelude::*;
    values.par_iter().sum()
}

#[cfg(not(feature = "parallel"))]
fn fast_sum(values: &[f64]) -> f64 {
    values.iter().sum()
}

/// Excess kurtosis above which the grouped error bar is also computed.
pub const KURTOSIS_THRESHOLD: f64 = 20.0;
const GROUPS: usize = 32;

/// Mean and error bar of independent per-sample totals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub excess_kurtosis: f64,
}

/// Sample mean with standard error. Under heavy tails the error bar is the
/// larger of the plain one and the spread of contiguous group means.
pub fn mean_estimate(values: &[f64], reduction: Reduction) -> MeanEstimate {
    let n = values.len();
    if n == 0 {
        return MeanEstimate {
            mean: f64::NAN,
            std_error: f64::NAN,
            excess_kurtosis: f64::NAN,
        };
    }
    let nf = n as f64;
    let mean = reduce(values, reduction) / nf;
    if n < 2 {
        return MeanEstimate {
            mean,
            std_error: f64::INFINITY,
            excess_kurtosis: f64::NAN,
        };
    }
    let m2 = neumaier_sum(values.iter().map(|v| (v - mean).powi(2))) / nf;
    let m4 = neumaier_sum(values.iter().map(|v| (v - mean).powi(4))) / nf;
    let plain = (m2 * nf / (nf - 1.0)).sqrt() / nf.sqrt();
    let excess_kurtosis = if m2 > 0.0 { m4 / (m2 * m2) - 3.0 } else { 0.0 };
    let mut std_error = plain;
    if excess_kurtosis > KURTOSIS_THRESHOLD && n >= 4 * GROUPS {
        let size = n / GROUPS;
        let means: Vec<f64> = (0..GROUPS)
            .map(|g| neumaier_sum(values[g * size..(g + 1) * size].iter().copied()) / size as f64)
            .collect();
        let gm = neumaier_sum(means.iter().copied()) / GROUPS as f64;
        let var = neumaier_sum(means.iter().map(|v| (v - gm).powi(2))) / (GROUPS - 1) as f64;
        std_error = std_error.max((var / GROUPS as f64).sqrt());
    }
    MeanEstimate {
        mean,
        std_error,
        excess_kurtosis,
    }
}

/// Ratio `Σ num / Σ den` with a delta-method error bar.
pub fn ratio_estimate(num: &[f64], den: &[f64], reduction: Reduction) -> MeanEstimate {
    let n = num.len() as f64;
    let sn = reduce(num, reduction);
    let sd = reduce(den, reduction);
    let ratio = sn / sd;
    let resid: Vec<f64> = num.iter().zip(den).map(|(a, b)| a - ratio * b).collect();
    let inner = mean_estimate(&resid, Reduction::Deterministic);
    MeanEstimate {
        mean: ratio,
        std_error: inner.std_error / (sd / n),
        excess_kurtosis: inner.excess_kurtosis,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        assert_eq!(neumaier_sum([1.0, 1e100, 1.0, -1e100]), 2.0);
        assert_eq!(neumaier_sum(std::iter::empty()), 0.0);
    }

    #[test]
    fn map_preserves_order_for_all_modes() {
        let base = SamplingConfig::new(1000, 0);
        let expect: Vec<u64> = (0..1000).map(|i| i * i).collect();
        for cfg in [
            base.clone(),
            base.clone().with_threads(3),
            base.clone().with_execution(Execution::Sequential),
        ] {
            assert_eq!(map_indexed(1000, &cfg, |i| i * i).unwrap(), expect);
        }
        assert!(map_indexed(1, &base.with_threads(0), |i| i).is_err());
    }

    #[test]
    fn mean_and_error_of_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let v: Vec<f64> = (0..40_000).map(|_| rng.random::<f64>()).collect();
        let e = mean_estimate(&v, Reduction::Deterministic);
        assert!((e.mean - 0.5).abs() < 4.0 * e.std_error);
        let expected_se = (1.0f64 / 12.0 / 40_000.0).sqrt();
        assert!((e.std_error / expected_se - 1.0).abs() < 0.03);
        assert!((e.excess_kurtosis + 1.2).abs() < 0.05);
    }

    #[test]
    fn heavy_tails_never_shrink_the_error_bar() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>().powi(-2).min(1e8)).collect();
        let e = mean_estimate(&v, Reduction::Deterministic);
        let n = v.len() as f64;
        let var = v.iter().map(|x| (x - e.mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(e.excess_kurtosis > KURTOSIS_THRESHOLD);
        assert!(e.std_error >= (var / n).sqrt() * (1.0 - 1e-12));
    }

    #[test]
    fn ratio_of_proportional_samples() {
        let den: Vec<f64> = (1..=100).map(f64::from).collect();
        let num: Vec<f64> = den.iter().map(|d| 3.0 * d).collect();
        let r = ratio_estimate(&num, &den, Reduction::Deterministic);
        assert!((r.mean - 3.0).abs() < 1e-15 && r.std_error < 1e-13);
    }
}
