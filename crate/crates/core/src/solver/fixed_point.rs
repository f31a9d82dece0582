//! Alternating iteration `f_{n+1} = T f_n` from `f_0 ≡ 0`.
//!
//! Even iterates increase and odd iterates decrease, with every even iterate
//! below every odd one. Each value is a raw candidate key or `∞`, so on a
//! finite set the two subsequences meet after finitely many steps and the
//! iteration stops on exact equality.

use crate::pointprocess::MarkedPointSet;
use crate::scalar::Scalar;

use super::operators::apply_operator;
use super::{finish, CandidateIndex, Method, Model, Solution, SolverError, SolverOptions};

pub fn solve_fixed_point<T: Scalar>(set: &MarkedPointSet<T>, model: Model) -> Result<Solution<T>, SolverError> {
    solve_fixed_point_with(set, model, &SolverOptions::default())
}

pub fn solve_fixed_point_with<T: Scalar>(
    set: &MarkedPointSet<T>,
    model: Model,
    opts: &SolverOptions<T>,
) -> Result<Solution<T>, SolverError> {
    let mut index = CandidateIndex::new(set.points(), model, opts.tolerances.parallel);
    let (radii, iterations) = iterate(&mut index)?;
    finish(set, model, radii, Method::FixedPoint, iterations, &mut index, opts)
}

pub(crate) fn iterate<T: Scalar>(index: &mut CandidateIndex<'_, T>) -> Result<(Vec<T>, usize), SolverError> {
    let n = index.len();
    let cap = 2 * n + 4;
    let mut before_prev: Option<Vec<T>> = None;
    let mut prev = vec![T::zero(); n];
    for k in 1..=cap {
        let next = apply_operator(index, &prev);
        check_sandwich(k, &next, &prev, before_prev.as_deref())?;
        if next == prev {
            return Ok((next, k));
        }
        before_prev = Some(std::mem::replace(&mut prev, next));
    }
    Err(SolverError::NonConvergence(cap))
}

/// `next = f_k`, `prev = f_{k-1}`, `before_prev = f_{k-2}`.
fn check_sandwich<T: Scalar>(k: usize, next: &[T], prev: &[T], before_prev: Option<&[T]>) -> Result<(), SolverError> {
    let even = k.is_multiple_of(2);
    for i in 0..next.len() {
        let ordered = if even { next[i] <= prev[i] } else { next[i] >= prev[i] };
        let monotone = match before_prev {
            Some(b) if even => next[i] >= b[i],
            Some(b) => next[i] <= b[i],
            None => true,
        };
        if !(ordered && monotone) {
            return Err(SolverError::MonotonicityViolation { iteration: k, index: i });
        }
    }
    Ok(())
}
