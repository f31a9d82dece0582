use serde::Serialize;

/// A point estimate with its replication-batch standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    /// `None` when fewer than two replications contributed.
    pub stderr: Option<f64>,
    /// Total denominator count behind the estimate.
    pub n_effective: usize,
}

impl Estimate {
    pub fn is_defined(&self) -> bool {
        self.value.is_finite()
    }
}

/// `Σ num_r / Σ den_r` over replications `r`, with the batch standard error
/// `sqrt(Σ (num_r − est·den_r)² / (B(B−1))) / mean(den)`.
///
/// Replications with zero denominator still count as batches.
pub fn ratio_estimate(batches: &[(f64, f64)]) -> Estimate {
    let b = batches.len();
    let num: f64 = batches.iter().map(|x| x.0).sum();
    let den: f64 = batches.iter().map(|x| x.1).sum();
    let value = if den > 0.0 { num / den } else { f64::NAN };
    let stderr = if b >= 2 && den > 0.0 {
        let ss: f64 = batches.iter().map(|&(n, d)| (n - value * d).powi(2)).sum();
        let mean_den = den / b as f64;
        Some((ss / (b as f64 * (b as f64 - 1.0))).sqrt() / mean_den)
    } else {
        None
    };
    Estimate {
        value,
        stderr,
        n_effective: den.round() as usize,
    }
}
