//! Size of the cluster around the window centre as the window grows.

use rayon::prelude::*;
use serde::Serialize;

use crate::pointprocess::Window;
use crate::solver::Model;

use super::realization::sample_and_solve;
use super::StatsError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendRow {
    /// Side length of the square window `[0, s]²`.
    pub side: f64,
    /// Expected number of points, `λ s²`.
    pub expected_points: f64,
    pub reps: usize,
    pub aborted: usize,
    pub mean_size: f64,
    pub stderr: Option<f64>,
    /// Fraction of replications where the central cluster holds an infinite segment.
    pub infinite_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendTable {
    pub model: Model,
    pub rows: Vec<TrendRow>,
    /// OLS slope of cluster size against expected point count, fitted over
    /// individual replications.
    pub slope: f64,
    pub slope_stderr: f64,
    /// 95% normal interval for the slope.
    pub slope_ci: (f64, f64),
    /// Row means never decrease.
    pub monotone_increasing: bool,
}

impl TrendTable {
    pub fn ci_covers_zero_or_negative(&self) -> bool {
        self.slope_ci.0 <= 0.0
    }
}

/// Replication `r` of size index `k` uses seed `seed + k · reps + r`.
pub fn percolation_trend(
    model: Model,
    lambda: f64,
    sides: &[f64],
    reps: usize,
    seed: u64,
) -> Result<TrendTable, StatsError> {
    if sides.len() < 3 {
        return Err(StatsError::InsufficientSizes(sides.len()));
    }
    if reps < 2 {
        return Err(StatsError::InvalidConfig(
            "trend needs at least two replications per size".into(),
        ));
    }
    let mut rows = Vec::with_capacity(sides.len());
    let mut obs: Vec<(f64, f64)> = Vec::new();
    for (k, &side) in sides.iter().enumerate() {
        let window = Window::square_origin(side, side)?;
        let (cx, cy) = window.center();
        let results: Vec<Result<Option<(usize, bool)>, StatsError>> = (0..reps)
            .into_par_iter()
            .map(|r| {
                let s = seed.wrapping_add((k * reps + r) as u64);
                let sample = sample_and_solve(lambda, &window, s, model, &Default::default())?;
                let pts = sample.solution.set.points();
                let centre = (0..pts.len()).min_by(|&a, &b| {
                    let da = (pts[a].germ().x - cx).hypot(pts[a].germ().y - cy);
                    let db = (pts[b].germ().x - cx).hypot(pts[b].germ().y - cy);
                    da.total_cmp(&db).then(a.cmp(&b))
                });
                Ok(centre.map(|c| {
                    let members = &sample.structure.clusters[sample.structure.cluster_of[c]];
                    let radii = sample.solution.radii.as_slice();
                    (members.len(), members.iter().any(|&i| radii[i].is_infinite()))
                }))
            })
            .collect();

        let mut sizes = Vec::with_capacity(reps);
        let mut infinite = 0;
        let mut aborted = 0;
        for res in results {
            match res {
                Ok(Some((size, inf))) => {
                    sizes.push(size as f64);
                    infinite += usize::from(inf);
                }
                Ok(None) => aborted += 1,
                Err(e) if e.is_internal() => return Err(e),
                Err(e) => {
                    log::warn!("trend side {side}: replication aborted: {e}");
                    aborted += 1;
                }
            }
        }
        let n = sizes.len() as f64;
        let mean = sizes.iter().sum::<f64>() / n;
        let stderr =
            (sizes.len() >= 2).then(|| (sizes.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt());
        let expected = lambda * side * side;
        obs.extend(sizes.iter().map(|&y| (expected, y)));
        rows.push(TrendRow {
            side,
            expected_points: expected,
            reps,
            aborted,
            mean_size: mean,
            stderr,
            infinite_fraction: if n > 0.0 { infinite as f64 / n } else { f64::NAN },
        });
    }

    let (slope, slope_stderr) = ols_slope(&obs);
    let monotone_increasing = rows.windows(2).all(|w| w[1].mean_size >= w[0].mean_size);
    Ok(TrendTable {
        model,
        rows,
        slope,
        slope_stderr,
        slope_ci: (slope - 1.96 * slope_stderr, slope + 1.96 * slope_stderr),
        monotone_increasing,
    })
}

fn ols_slope(obs: &[(f64, f64)]) -> (f64, f64) {
    let n = obs.len() as f64;
    let mx = obs.iter().map(|o| o.0).sum::<f64>() / n;
    let my = obs.iter().map(|o| o.1).sum::<f64>() / n;
    let sxx: f64 = obs.iter().map(|o| (o.0 - mx).powi(2)).sum();
    let sxy: f64 = obs.iter().map(|o| (o.0 - mx) * (o.1 - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = obs.iter().map(|o| (o.1 - my - slope * (o.0 - mx)).powi(2)).sum();
    (slope, (rss / (n - 2.0) / sxx).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_few_sizes() {
        assert_eq!(
            percolation_trend(Model::Model2, 1.0, &[10.0], 5, 0),
            Err(StatsError::InsufficientSizes(1))
        );
    }

    #[test]
    fn exact_line() {
        let (s, se) = ols_slope(&[(1.0, 3.0), (2.0, 5.0), (3.0, 7.0), (4.0, 9.0)]);
        assert!((s - 2.0).abs() < 1e-12);
        assert!(se < 1e-12);
    }

    #[test]
    fn small_trend_runs() {
        let t = percolation_trend(Model::Model2, 1.0, &[5.0, 6.0, 7.0], 4, 1).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert!(t.slope.is_finite());
        assert!(t.rows.iter().all(|r| r.mean_size >= 1.0));
    }
}
