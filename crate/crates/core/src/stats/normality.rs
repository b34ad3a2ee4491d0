use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{check_finite, mean, norm_cdf, sample_var, Method, StatResult, StatsError};

pub const KS_REPLICATES: usize = 10_000;
pub const KS_SEED: u64 = 0x5eed_1234;

/// Replicates per independently seeded stream.
const CHUNK: usize = 250;

/// Largest gap between the ECDF and the normal CDF fitted by sample mean and SD.
pub fn ks_statistic(x: &[f64]) -> Result<f64, StatsError> {
    if x.len() < 4 {
        return Err(StatsError::TooFewObservations { needed: 4, got: x.len() });
    }
    check_finite(x)?;
    let var = sample_var(x);
    if var <= 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(d_sorted(&sorted, mean(x), var.sqrt()))
}

fn d_sorted(sorted: &[f64], mu: f64, sd: f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let f = norm_cdf((v - mu) / sd);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

pub fn ks_normality(x: &[f64]) -> Result<StatResult, StatsError> {
    ks_normality_with(x, KS_REPLICATES, KS_SEED)
}

/// KS normality test with estimated parameters. The p-value is the share of
/// simulated normal samples (same size, parameters re-estimated) whose D is at
/// least the observed one. D is location-scale invariant, so replicates are
/// drawn from N(0, 1).
pub fn ks_normality_with(x: &[f64], replicates: usize, seed: u64) -> Result<StatResult, StatsError> {
    let d = ks_statistic(x)?;
    let n = x.len();
    let chunks = replicates.div_ceil(CHUNK);
    let exceed: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let reps = CHUNK.min(replicates - c * CHUNK);
            let mut buf = vec![0.0; n];
            let mut count = 0;
            for _ in 0..reps {
                for v in buf.iter_mut() {
                    *v = StandardNormal.sample(&mut rng);
                }
                let var = sample_var(&buf);
                let mu = mean(&buf);
                buf.sort_by(f64::total_cmp);
                if d_sorted(&buf, mu, var.sqrt()) >= d {
                    count += 1;
                }
            }
            count
        })
        .sum();
    Ok(StatResult {
        statistic: d,
        p_value: (exceed + 1) as f64 / (replicates + 1) as f64,
        method: Method::MonteCarlo,
        n1: n,
        n2: 0,
    })
}
