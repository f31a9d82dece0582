//! Post-solve separation certificate.
//!
//! A solution is only as trustworthy as the comparisons that produced it.
//! For every germ this re-walks its candidate list up to the selected stop
//! (or to exhaustion for an infinite radius) and requires every admission
//! test `R_j vs d_ji`, plus the key order at the stop, to be resolved by more
//! than the tie tolerance. The one equality the model itself produces, a
//! Model 2 doublet partner with `R_j = d_ji` exactly, is exempt.

use crate::scalar::{approx_eq, Scalar};

use super::{CandidateIndex, DecisiveTie, Model, SolverError};

pub(crate) fn certify_separation<T: Scalar>(
    index: &mut CandidateIndex<'_, T>,
    radii: &[T],
    tie: T,
) -> Result<(), SolverError> {
    let model = index.model();
    let mut ties = Vec::new();
    let mut record = |i: usize, j: usize, a: T, b: T| {
        ties.push(DecisiveTie {
            index: i,
            other: j,
            left: a.to_f64_lossy(),
            right: b.to_f64_lossy(),
        })
    };
    for (i, &r_i) in radii.iter().enumerate() {
        let mut pos = 0;
        let mut stop = T::infinity();
        while let Some(e) = index.entry(i, pos) {
            let r_j = radii[e.j];
            let structural = model == Model::Model2 && r_j == e.d_ji && e.d_ji == e.key && r_i == e.key;
            if !structural && approx_eq(r_j, e.d_ji, tie) {
                record(i, e.j, r_j, e.d_ji);
            }
            if model.admits(r_j, e.d_ji) {
                stop = e.key;
                if model == Model::Model1 && approx_eq(e.d_ij, e.d_ji, tie) {
                    record(i, e.j, e.d_ij, e.d_ji);
                }
                if let Some(next) = index.entry(i, pos + 1) {
                    if approx_eq(next.key, e.key, tie) {
                        record(i, next.j, next.key, e.key);
                    }
                }
                break;
            }
            pos += 1;
        }
        if stop != r_i {
            return Err(SolverError::AlgorithmDivergence(format!(
                "germ {i}: first admissible stop {stop} differs from radius {r_i}"
            )));
        }
    }
    if ties.is_empty() {
        Ok(())
    } else {
        Err(SolverError::ConditionDViolation(ties))
    }
}
