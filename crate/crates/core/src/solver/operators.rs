//! The antitone operators whose unique fixed points are the two models.

use crate::geometry::growth_distances;
use crate::pointprocess::MarkedPointSet;
use crate::scalar::Scalar;

use super::{CandidateIndex, Model, RadiiAssignment};

/// `T f(i)`: the smallest candidate key of `i` whose partner admits the stop
/// under `f`, or `∞`. Model 1 uses `f(j) > d_ji`, Model 2 `f(j) ≥ d_ji`.
///
/// Callers are expected to have checked genericity; ties are resolved by the
/// candidate order without complaint.
pub fn apply_operator<T: Scalar>(index: &mut CandidateIndex<'_, T>, f: &[T]) -> Vec<T> {
    assert_eq!(f.len(), index.len(), "assignment length must match the point set");
    let model = index.model();
    if f.iter().all(|v| *v == T::zero()) {
        return apply_to_zero(index, model);
    }
    (0..f.len())
        .map(|i| {
            index
                .find_from(i, 0, |e| model.admits(f[e.j], e.d_ji))
                .map_or(T::infinity(), |(_, e)| e.key)
        })
        .collect()
}

/// `f ≡ 0` admits a stop only where `d_ji = 0`, which no nearby-first search
/// can rule out early; scan pairs directly instead.
fn apply_to_zero<T: Scalar>(index: &CandidateIndex<'_, T>, model: Model) -> Vec<T> {
    let n = index.len();
    let mut out = vec![T::infinity(); n];
    if model == Model::Model1 {
        return out;
    }
    let pts = index.points();
    let parallel = index.parallel_tolerance();
    for i in 0..n {
        for j in (i + 1)..n {
            let (_, d_ij, d_ji) = growth_distances(&pts[i], &pts[j], parallel);
            let m = d_ij.max(d_ji);
            if !m.is_finite() {
                continue;
            }
            if d_ji == T::zero() {
                out[i] = out[i].min(m);
            }
            if d_ij == T::zero() {
                out[j] = out[j].min(m);
            }
        }
    }
    out
}

pub fn apply_t1<T: Scalar>(f: &RadiiAssignment<T>, set: &MarkedPointSet<T>) -> RadiiAssignment<T> {
    apply_model(f, set, Model::Model1)
}

pub fn apply_t2<T: Scalar>(f: &RadiiAssignment<T>, set: &MarkedPointSet<T>) -> RadiiAssignment<T> {
    apply_model(f, set, Model::Model2)
}

fn apply_model<T: Scalar>(f: &RadiiAssignment<T>, set: &MarkedPointSet<T>, model: Model) -> RadiiAssignment<T> {
    let mut index = CandidateIndex::new(set.points(), model, T::default_tolerances().parallel);
    RadiiAssignment::new(apply_operator(&mut index, f.as_slice())).expect("operator outputs are nonnegative")
}
