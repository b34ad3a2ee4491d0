use super::{check_finite, norm_cdf, Alternative, Method, StatResult, StatsError};

/// Largest combined sample size handled by exact enumeration.
pub(crate) const EXACT_MAX_N: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MwMethod {
    /// Exact when tie-free and `n1 + n2 <= 16`, normal approximation otherwise.
    Auto,
    Exact,
    NormalApprox,
}

/// Midranks (1-based) of the pooled sample and the tie group sizes.
fn midranks(pooled: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        if j > i {
            ties.push(j - i + 1);
        }
        i = j + 1;
    }
    (ranks, ties)
}

/// `U_a`: pairs with `a > b`, ties counted half.
pub fn u_statistic(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, _) = midranks(&pooled);
    let n1 = a.len() as f64;
    ranks[..a.len()].iter().sum::<f64>() - n1 * (n1 + 1.0) / 2.0
}

/// Null counts of `U = 0..=n1*n2` over all `C(n1+n2, n1)` rank assignments.
pub fn exact_u_distribution(n1: usize, n2: usize) -> Vec<u64> {
    // table[m][n] holds the counts for sample sizes (m, n).
    let mut table: Vec<Vec<Vec<u64>>> = vec![vec![Vec::new(); n2 + 1]; n1 + 1];
    for m in 0..=n1 {
        for n in 0..=n2 {
            table[m][n] = if m == 0 || n == 0 {
                vec![1]
            } else {
                // The largest pooled value is either in the first sample
                // (adds n to U) or in the second.
                let mut counts = vec![0u64; m * n + 1];
                for (u, c) in table[m - 1][n].iter().enumerate() {
                    counts[u + n] += c;
                }
                for (u, c) in table[m][n - 1].iter().enumerate() {
                    counts[u] += c;
                }
                counts
            };
        }
    }
    std::mem::take(&mut table[n1][n2])
}

fn exact_p(u_a: f64, n1: usize, n2: usize, alt: Alternative) -> f64 {
    let counts = exact_u_distribution(n1, n2);
    let total: u64 = counts.iter().sum();
    let u = u_a.round() as usize;
    let le: u64 = counts[..=u].iter().sum();
    let ge: u64 = counts[u..].iter().sum();
    let p = match alt {
        Alternative::ALess => le as f64 / total as f64,
        Alternative::AGreater => ge as f64 / total as f64,
        Alternative::TwoSided => 2.0 * le.min(ge) as f64 / total as f64,
    };
    p.min(1.0)
}

fn normal_p(u_a: f64, n1: usize, n2: usize, ties: &[usize], alt: Alternative) -> f64 {
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let n = n1f + n2f;
    let mu = n1f * n2f / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t as f64).powi(3) - t as f64).sum::<f64>() / (n * (n - 1.0));
    let var = n1f * n2f / 12.0 * ((n + 1.0) - tie_term);
    if var <= 0.0 {
        // Every observation tied: no evidence either way.
        return 1.0;
    }
    let sd = var.sqrt();
    let p = match alt {
        Alternative::TwoSided => {
            let z = ((u_a - mu).abs() - 0.5).max(0.0) / sd;
            2.0 * norm_cdf(-z)
        }
        Alternative::ALess => norm_cdf((u_a - mu + 0.5) / sd),
        Alternative::AGreater => norm_cdf(-(u_a - mu - 0.5) / sd),
    };
    p.clamp(0.0, 1.0)
}

pub fn mann_whitney_u(a: &[f64], b: &[f64], alternative: Alternative) -> Result<StatResult, StatsError> {
    mann_whitney_u_with(a, b, alternative, MwMethod::Auto)
}

/// Mann-Whitney U test. The reported statistic is `min(U_a, U_b)`.
pub fn mann_whitney_u_with(
    a: &[f64],
    b: &[f64],
    alternative: Alternative,
    method: MwMethod,
) -> Result<StatResult, StatsError> {
    if a.is_empty() {
        return Err(StatsError::EmptySample("a"));
    }
    if b.is_empty() {
        return Err(StatsError::EmptySample("b"));
    }
    check_finite(a)?;
    check_finite(b)?;
    let (n1, n2) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let u_a = ranks[..n1].iter().sum::<f64>() - (n1 * (n1 + 1)) as f64 / 2.0;
    let u_b = (n1 * n2) as f64 - u_a;

    let exact = match method {
        MwMethod::Auto => ties.is_empty() && n1 + n2 <= EXACT_MAX_N,
        MwMethod::Exact if !ties.is_empty() => return Err(StatsError::ExactWithTies),
        MwMethod::Exact if n1 + n2 > EXACT_MAX_N => return Err(StatsError::ExactTooLarge(n1 + n2)),
        MwMethod::Exact => true,
        MwMethod::NormalApprox => false,
    };
    let (p_value, method) = if exact {
        (exact_p(u_a, n1, n2, alternative), Method::Exact)
    } else {
        (normal_p(u_a, n1, n2, &ties, alternative), Method::NormalApprox)
    };
    Ok(StatResult {
        statistic: u_a.min(u_b),
        p_value,
        method,
        n1,
        n2,
    })
}
