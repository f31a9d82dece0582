//! Radius tails: the pinned-origin radius sample, the survival table of
//! normalized squared radii and a Gaussian-tail fit.

use rayon::prelude::*;
use serde::Serialize;

use crate::pointprocess::{n_closest_to_origin, sample_poisson, Window};
use crate::solver::Model;

use super::realization::solve_with_resampling;
use super::StatsError;

const MIN_TAIL: usize = 1000;

/// Radii of the germ pinned at the origin, one per sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PinnedRadii {
    pub model: Model,
    pub n_closest: usize,
    /// Finite origin radii in sample order.
    pub radii: Vec<f64>,
    /// Samples whose origin segment was infinite.
    pub infinite: usize,
    pub aborted: usize,
}

/// Pins a germ with θ = 0 at the origin, adds the `n_closest` nearest points
/// of a Poisson sample and records the origin's radius. Sample `k` uses seed
/// `base_seed + k`.
///
/// The disk is sized to hold about `1.5 · n_closest` points so that running
/// short is rare; a short sample is redrawn under a derived seed.
pub fn pinned_origin_radii(
    model: Model,
    lambda: f64,
    n_closest: usize,
    samples: usize,
    base_seed: u64,
) -> Result<PinnedRadii, StatsError> {
    if n_closest == 0 || samples == 0 {
        return Err(StatsError::InvalidConfig(
            "need at least one point and one sample".into(),
        ));
    }
    let radius = (1.5 * n_closest as f64 / (std::f64::consts::PI * lambda)).sqrt() + 1.0;
    let disk = Window::disk(0.0, 0.0, radius)?;
    let results: Vec<Result<f64, StatsError>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let seed = base_seed.wrapping_add(k as u64);
            let sample = solve_with_resampling(seed, model, |s| {
                let set = sample_poisson::<f64>(lambda, &disk, s)?;
                n_closest_to_origin(&set, n_closest, None)
            })?;
            Ok(sample.solution.radii.get(0))
        })
        .collect();

    let mut out = PinnedRadii {
        model,
        n_closest,
        radii: Vec::with_capacity(samples),
        infinite: 0,
        aborted: 0,
    };
    for (k, res) in results.into_iter().enumerate() {
        match res {
            Ok(r) if r.is_finite() => out.radii.push(r),
            Ok(_) => out.infinite += 1,
            Err(e) if e.is_internal() => return Err(e),
            Err(e) => {
                log::warn!("pinned sample {k} aborted: {e}");
                out.aborted += 1;
            }
        }
    }
    if out.aborted * 100 > samples {
        return Err(StatsError::TooManyAborted {
            aborted: out.aborted,
            total: samples,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivalRow {
    pub x: f64,
    pub survival: f64,
    pub exp_reference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalTable {
    pub rows: Vec<SurvivalRow>,
    /// Number of finite radii used.
    pub n: usize,
    pub mean_r2: f64,
}

impl SurvivalTable {
    pub fn at(&self, x: f64) -> Option<f64> {
        self.rows.iter().find(|r| r.x == x).map(|r| r.survival)
    }
}

/// Empirical `P(R² / mean(R²) > x)` over the finite radii, next to `e^{−x}`.
pub fn tail_of_r2(radii: &[f64], grid: &[f64]) -> SurvivalTable {
    let mut z: Vec<f64> = radii.iter().filter(|r| r.is_finite()).map(|r| r * r).collect();
    let n = z.len();
    let mean_r2 = z.iter().sum::<f64>() / n as f64;
    for v in &mut z {
        *v /= mean_r2;
    }
    z.sort_by(f64::total_cmp);
    let rows = grid
        .iter()
        .map(|&x| {
            let above = n - z.partition_point(|&v| v <= x);
            SurvivalRow {
                x,
                survival: if n > 0 { above as f64 / n as f64 } else { f64::NAN },
                exp_reference: (-x).exp(),
            }
        })
        .collect();
    SurvivalTable { rows, n, mean_r2 }
}

/// Least-squares fit of `log S(t) = log α − β t²` on the top decile of the
/// radii, with a domination check of the empirical survival `S`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianTailFit {
    pub alpha: f64,
    pub beta: f64,
    /// Smallest radius in the fitted range.
    pub t_min: f64,
    pub fitted_points: usize,
    pub n: usize,
    /// Sample points in the fitted range where `S(t)` exceeds the allowance.
    pub violations: Vec<(f64, f64)>,
    pub dominated: bool,
}

impl GaussianTailFit {
    pub const SAFETY: f64 = 1.1;

    pub fn bound(&self, t: f64) -> f64 {
        Self::SAFETY * self.alpha * (-self.beta * t * t).exp()
    }
}

/// The bound is `1.1 · α e^{−β t²}` plus two binomial standard errors of
/// `S(t)`, so pure sampling noise at one point does not count as a violation.
pub fn gaussian_tail_diagnostic(radii: &[f64]) -> Result<GaussianTailFit, StatsError> {
    let mut t: Vec<f64> = radii.iter().copied().filter(|r| r.is_finite()).collect();
    let n = t.len();
    if n < MIN_TAIL {
        return Err(StatsError::InsufficientTail {
            needed: MIN_TAIL,
            got: n,
        });
    }
    t.sort_by(f64::total_cmp);
    let t_min = t[(9 * n) / 10];
    // Distinct sample points with their survival S(t) = #{R > t} / n.
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let mut k = 0;
    while k < n {
        let v = t[k];
        let mut end = k;
        while end < n && t[end] == v {
            end += 1;
        }
        let s = (n - end) as f64 / n as f64;
        if v >= t_min && s > 0.0 {
            pts.push((v, s));
        }
        k = end;
    }
    if pts.len() < 3 {
        return Err(StatsError::InsufficientTail {
            needed: MIN_TAIL,
            got: pts.len(),
        });
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0 * p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(StatsError::InsufficientTail {
            needed: MIN_TAIL,
            got: 0,
        });
    }
    let slope = sxy / sxx;
    let mut fit = GaussianTailFit {
        alpha: (my - slope * mx).exp(),
        beta: -slope,
        t_min,
        fitted_points: pts.len(),
        n,
        violations: Vec::new(),
        dominated: false,
    };
    let nf = n as f64;
    fit.violations = pts
        .iter()
        .copied()
        .filter(|&(t, s)| s > fit.bound(t) + 2.0 * (s * (1.0 - s) / nf).sqrt())
        .collect();
    fit.dominated = fit.beta > 0.0 && fit.violations.is_empty();
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Exp, Normal};

    #[test]
    fn survival_table_basics() {
        let table = tail_of_r2(&[1.0, 2.0, f64::INFINITY, 3.0], &[0.0, 1.0, 10.0]);
        assert_eq!(table.n, 3);
        assert_eq!(table.at(0.0), Some(1.0));
        assert_eq!(table.at(10.0), Some(0.0));
        assert!((table.rows[1].exp_reference - (-1.0f64).exp()).abs() < 1e-15);
        // mean R² = 14/3; values 3/14, 12/14, 27/14; one exceeds 1.
        assert!((table.at(1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn constant_or_short_samples_are_rejected() {
        assert!(matches!(
            gaussian_tail_diagnostic(&[2.0; 5000]),
            Err(StatsError::InsufficientTail { .. })
        ));
        assert!(matches!(
            gaussian_tail_diagnostic(&[1.0; 10]),
            Err(StatsError::InsufficientTail { needed: 1000, got: 10 })
        ));
    }

    #[test]
    fn gaussian_data_is_dominated() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let r: Vec<f64> = (0..20_000).map(|_| f64::abs(normal.sample(&mut rng))).collect();
        let fit = gaussian_tail_diagnostic(&r).unwrap();
        assert!(fit.beta > 0.0);
        assert!(fit.dominated, "{:?}", fit.violations.len());
    }

    #[test]
    fn exponential_data_is_not_dominated() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let exp = Exp::new(1.0).unwrap();
        let r: Vec<f64> = (0..100_000).map(|_| exp.sample(&mut rng)).collect();
        let fit = gaussian_tail_diagnostic(&r).unwrap();
        assert!(!fit.dominated);
        assert!(!fit.violations.is_empty());
    }
}
