//! Independent checks of the defining properties of a solved system.

use crate::geometry::{growth_distances, realize_segment, relative_interiors_intersect, Segment};
use crate::pointprocess::MarkedPointSet;
use crate::scalar::{approx_eq, Scalar};

use super::operators::apply_operator;
use super::{CandidateIndex, Model, RadiiAssignment};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerificationReport {
    /// Pairs whose relative interiors meet.
    pub hard_core_violations: Vec<(usize, usize)>,
    /// Finite radii without a stopping neighbour of the model's type.
    pub growth_violations: Vec<usize>,
    /// Indices where applying the operator moves the radius by more than the tolerance.
    pub fixed_point_violations: Vec<usize>,
    pub passes: bool,
}

impl VerificationReport {
    pub fn hard_core_ok(&self) -> bool {
        self.hard_core_violations.is_empty()
    }

    pub fn growth_maximal_ok(&self) -> bool {
        self.growth_violations.is_empty()
    }

    pub fn fixed_point_ok(&self) -> bool {
        self.fixed_point_violations.is_empty()
    }

    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        if let Some(&(i, j)) = self.hard_core_violations.first() {
            parts.push(format!(
                "{} overlapping pair(s), first ({i}, {j})",
                self.hard_core_violations.len()
            ));
        }
        if let Some(&i) = self.growth_violations.first() {
            parts.push(format!(
                "{} unstopped radius/radii, first {i}",
                self.growth_violations.len()
            ));
        }
        if let Some(&i) = self.fixed_point_violations.first() {
            parts.push(format!(
                "operator moves {} radius/radii, first {i}",
                self.fixed_point_violations.len()
            ));
        }
        if parts.is_empty() {
            "ok".to_string()
        } else {
            parts.join("; ")
        }
    }
}

/// Hard-core, growth-maximality and fixed-point checks at contact tolerance `tol`.
pub fn verify_gmhs<T: Scalar>(
    set: &MarkedPointSet<T>,
    radii: &RadiiAssignment<T>,
    model: Model,
    tol: T,
) -> VerificationReport {
    let mut index = CandidateIndex::new(set.points(), model, T::default_tolerances().parallel);
    verify_with_index(set, radii, model, tol, &mut index)
}

pub(crate) fn verify_with_index<T: Scalar>(
    set: &MarkedPointSet<T>,
    radii: &RadiiAssignment<T>,
    model: Model,
    tol: T,
    index: &mut CandidateIndex<'_, T>,
) -> VerificationReport {
    let pts = set.points();
    let r = radii.as_slice();
    assert_eq!(pts.len(), r.len(), "radii must be index-aligned with the point set");
    let n = pts.len();
    let parallel = index.parallel_tolerance();
    let segments: Vec<Segment<T>> = pts
        .iter()
        .zip(r)
        .map(|(p, &rad)| realize_segment(*p, rad).expect("radii are nonnegative"))
        .collect();

    let mut hard_core = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if r[i].is_finite() && r[j].is_finite() {
                let reach = r[i] + r[j];
                let dist = pts[i].germ().distance(pts[j].germ());
                if dist > reach * (T::one() + tol) + tol {
                    continue;
                }
            }
            if relative_interiors_intersect(&segments[i], &segments[j], tol) {
                hard_core.push((i, j));
            }
        }
    }

    let mut growth = Vec::new();
    for i in (0..n).filter(|&i| r[i].is_finite()) {
        let stopped = (0..n).filter(|&j| j != i).any(|j| {
            let (_, d_ij, d_ji) = growth_distances(&pts[i], &pts[j], parallel);
            match model {
                Model::Model1 => approx_eq(r[i], d_ij, tol) && d_ij > d_ji && r[j] > d_ji,
                Model::Model2 => approx_eq(r[i], d_ij.max(d_ji), tol) && (r[j] >= d_ji || approx_eq(r[j], d_ji, tol)),
            }
        });
        if !stopped {
            growth.push(i);
        }
    }

    let image = apply_operator(index, r);
    let fixed_point: Vec<usize> = (0..n).filter(|&i| !approx_eq(image[i], r[i], tol)).collect();

    let passes = hard_core.is_empty() && growth.is_empty() && fixed_point.is_empty();
    VerificationReport {
        hard_core_violations: hard_core,
        growth_violations: growth,
        fixed_point_violations: fixed_point,
        passes,
    }
}
