//! Chain chasing: resolve a germ by following the stopping candidates whose
//! own radius is still needed.
//!
//! Every germ keeps a cursor into its sorted candidate list; entries before
//! the cursor are known not to admit a stop. To test candidate `j` of `i`:
//!
//! * if `R_j` is known, test it directly (strong test);
//! * otherwise `R_j` is at least `j`'s first remaining key, and if that bound
//!   already admits the stop, `i` is resolved without knowing `R_j` (weak
//!   test);
//! * otherwise `j` is pushed with threshold `d_ji` and only scanned until its
//!   radius is found or its keys pass that threshold.
//!
//! A pushed threshold is below the key that triggered it, which is at most
//! the parent's threshold, so thresholds strictly decrease along the stack.
//! A germ may appear twice at different thresholds; the shared cursor only
//! ever skips entries that cannot admit a stop.

use crate::pointprocess::MarkedPointSet;
use crate::scalar::Scalar;

use super::fixed_point::iterate;
use super::{finish, CandidateIndex, Method, Model, Solution, SolverError, SolverOptions};

/// How the orbit of a germ under the stopping map ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    /// The last `r` chain entries form a cycle; `r = 2` is a doublet.
    Cycle(usize),
    /// The last chain entry has infinite radius.
    InfiniteSegment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainTrace {
    /// Distinct germs `i_0, J(i_0), J(J(i_0)), …`.
    pub chain: Vec<usize>,
    pub terminal: Terminal,
    /// `J(i_t)` for each entry, `None` for an infinite radius.
    pub stops: Vec<Option<usize>>,
}

pub fn solve_chain<T: Scalar>(
    set: &MarkedPointSet<T>,
    model: Model,
    start: Option<usize>,
) -> Result<(Solution<T>, Vec<ChainTrace>), SolverError> {
    solve_chain_with(set, model, start, &SolverOptions::default())
}

pub fn solve_chain_with<T: Scalar>(
    set: &MarkedPointSet<T>,
    model: Model,
    start: Option<usize>,
    opts: &SolverOptions<T>,
) -> Result<(Solution<T>, Vec<ChainTrace>), SolverError> {
    let n = set.len();
    if let Some(s) = start {
        if s >= n {
            return Err(SolverError::AlgorithmDivergence(format!("start {s} outside 0..{n}")));
        }
    }
    let mut index = CandidateIndex::new(set.points(), model, opts.tolerances.parallel);
    let mut state = ChainState::new(n);
    let mut roots = Vec::new();
    let order = start.into_iter().chain(0..n);
    for s in order {
        if state.radius[s].is_none() {
            roots.push(s);
            state.resolve(s, &mut index)?;
        }
    }
    let radii: Vec<T> = state.radius.iter().map(|r| r.expect("every germ resolved")).collect();
    let stops = state.stop.clone();

    if opts.cross_check {
        let (reference, _) = iterate(&mut index)?;
        if reference != radii {
            let at = (0..n).find(|&i| reference[i] != radii[i]).unwrap_or(0);
            return Err(SolverError::AlgorithmDivergence(format!(
                "germ {at}: chain gives {}, fixed point gives {}",
                radii[at], reference[at]
            )));
        }
    }

    let traces = match start {
        Some(s) => vec![trace(s, &stops)],
        None => roots.iter().map(|&s| trace(s, &stops)).collect(),
    };
    let solution = finish(set, model, radii, Method::Chain, state.steps, &mut index, opts)?;
    Ok((solution, traces))
}

struct ChainState<T> {
    radius: Vec<Option<T>>,
    stop: Vec<Option<usize>>,
    cursor: Vec<usize>,
    steps: usize,
}

impl<T: Scalar> ChainState<T> {
    fn new(n: usize) -> Self {
        ChainState {
            radius: vec![None; n],
            stop: vec![None; n],
            cursor: vec![0; n],
            steps: 0,
        }
    }

    fn resolve(&mut self, root: usize, index: &mut CandidateIndex<'_, T>) -> Result<(), SolverError> {
        let model = index.model();
        // (germ, threshold): scan until the radius is known or the first
        // remaining key alone admits a stop against the threshold.
        let mut stack = vec![(root, T::infinity())];
        while let Some(&(i, t)) = stack.last() {
            self.steps += 1;
            if self.radius[i].is_some() {
                stack.pop();
                continue;
            }
            let Some(e) = index.entry(i, self.cursor[i]) else {
                self.radius[i] = Some(T::infinity());
                stack.pop();
                continue;
            };
            if model.admits(e.key, t) {
                stack.pop();
                continue;
            }
            let j = e.j;
            if let Some(r_j) = self.radius[j] {
                if model.admits(r_j, e.d_ji) {
                    self.radius[i] = Some(e.key);
                    self.stop[i] = Some(j);
                    stack.pop();
                } else {
                    self.cursor[i] += 1;
                }
                continue;
            }
            let lower = index.entry(j, self.cursor[j]).map_or(T::infinity(), |c| c.key);
            if model.admits(lower, e.d_ji) {
                self.radius[i] = Some(e.key);
                self.stop[i] = Some(j);
                stack.pop();
                continue;
            }
            if !(e.d_ji < t) {
                return Err(SolverError::AlgorithmDivergence(format!(
                    "threshold {} for germ {j} not below {t} while resolving {root}",
                    e.d_ji
                )));
            }
            stack.push((j, e.d_ji));
        }
        Ok(())
    }
}

fn trace(start: usize, stops: &[Option<usize>]) -> ChainTrace {
    let mut seen = vec![usize::MAX; stops.len()];
    let mut chain = Vec::new();
    let mut at = start;
    loop {
        seen[at] = chain.len();
        chain.push(at);
        match stops[at] {
            None => {
                let stops = chain.iter().map(|&c| stops[c]).collect();
                return ChainTrace {
                    chain,
                    terminal: Terminal::InfiniteSegment,
                    stops,
                };
            }
            Some(next) if seen[next] != usize::MAX => {
                let r = chain.len() - seen[next];
                let stops = chain.iter().map(|&c| stops[c]).collect();
                return ChainTrace {
                    chain,
                    terminal: Terminal::Cycle(r),
                    stops,
                };
            }
            Some(next) => at = next,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_reads_cycles_and_lines() {
        let stops = [Some(1), Some(2), Some(3), Some(1), None, Some(4)];
        let t = trace(0, &stops);
        assert_eq!(t.chain, vec![0, 1, 2, 3]);
        assert_eq!(t.terminal, Terminal::Cycle(3));
        let t = trace(5, &stops);
        assert_eq!(t.chain, vec![5, 4]);
        assert_eq!(t.terminal, Terminal::InfiniteSegment);
        assert_eq!(t.stops, vec![Some(4), None]);
    }
}
