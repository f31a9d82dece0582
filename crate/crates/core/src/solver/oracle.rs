//! Event-ordered growth simulation over all pairs, used as an independent
//! reference for the other two solvers.

use crate::geometry::growth_distances;
use crate::pointprocess::MarkedPointSet;
use crate::scalar::Scalar;

use super::{finish, CandidateIndex, Method, Model, Solution, SolverError, SolverOptions};

/// At `time`, the tip of `mover` reaches the line of `other`, which got
/// there `other_arrival` earlier in its own growth.
#[derive(Debug, Clone, Copy)]
struct Event<T> {
    time: T,
    mover: usize,
    other: usize,
    other_arrival: T,
}

pub fn solve_greedy_oracle<T: Scalar>(set: &MarkedPointSet<T>, model: Model) -> Result<Solution<T>, SolverError> {
    solve_greedy_oracle_with(set, model, &SolverOptions::default())
}

pub fn solve_greedy_oracle_with<T: Scalar>(
    set: &MarkedPointSet<T>,
    model: Model,
    opts: &SolverOptions<T>,
) -> Result<Solution<T>, SolverError> {
    let pts = set.points();
    let n = pts.len();
    let mut events = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (_, d_ij, d_ji) = growth_distances(&pts[i], &pts[j], opts.tolerances.parallel);
            if !(d_ij.is_finite() && d_ji.is_finite()) {
                continue;
            }
            match model {
                Model::Model1 => {
                    if d_ij > d_ji {
                        events.push(Event {
                            time: d_ij,
                            mover: i,
                            other: j,
                            other_arrival: d_ji,
                        });
                    } else if d_ji > d_ij {
                        events.push(Event {
                            time: d_ji,
                            mover: j,
                            other: i,
                            other_arrival: d_ij,
                        });
                    }
                }
                Model::Model2 => {
                    // One contact per pair, when the later of the two arrives.
                    let ev = if d_ij >= d_ji {
                        Event {
                            time: d_ij,
                            mover: i,
                            other: j,
                            other_arrival: d_ji,
                        }
                    } else {
                        Event {
                            time: d_ji,
                            mover: j,
                            other: i,
                            other_arrival: d_ij,
                        }
                    };
                    events.push(ev);
                }
            }
        }
    }
    events.sort_by(|a, b| {
        a.time
            .partial_cmp(&b.time)
            .unwrap()
            .then(a.mover.cmp(&b.mover))
            .then(a.other.cmp(&b.other))
    });

    let mut radius: Vec<Option<T>> = vec![None; n];
    let mut fired = 0;
    for ev in &events {
        if radius[ev.mover].is_some() {
            continue;
        }
        let admitted = radius[ev.other].is_none_or(|r| model.admits(r, ev.other_arrival));
        if !admitted {
            continue;
        }
        fired += 1;
        radius[ev.mover] = Some(ev.time);
        if model == Model::Model2 && radius[ev.other].is_none() {
            // Still growing, so the arriving tip hits it as well.
            radius[ev.other] = Some(ev.time);
        }
    }
    let radii = radius.into_iter().map(|r| r.unwrap_or(T::infinity())).collect();
    let mut index = CandidateIndex::new(pts, model, opts.tolerances.parallel);
    finish(set, model, radii, Method::GreedyOracle, fired, &mut index, opts)
}
