use super::{check_finite, mean, sample_var, StatsError};

/// Hedges' g: Cohen's d with pooled sample SD, times the small-sample
/// correction `J = 1 - 3 / (4 (n1 + n2) - 9)`.
pub fn hedges_g(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    for x in [a, b] {
        if x.len() < 2 {
            return Err(StatsError::TooFewObservations { needed: 2, got: x.len() });
        }
        check_finite(x)?;
    }
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let pooled = (((n1 - 1.0) * sample_var(a) + (n2 - 1.0) * sample_var(b)) / (n1 + n2 - 2.0)).sqrt();
    let diff = mean(a) - mean(b);
    if pooled == 0.0 {
        return if diff == 0.0 { Ok(0.0) } else { Err(StatsError::DegenerateEffect) };
    }
    let j = 1.0 - 3.0 / (4.0 * (n1 + n2) - 9.0);
    Ok(j * diff / pooled)
}
