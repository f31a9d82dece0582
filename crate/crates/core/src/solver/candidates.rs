//! Lazily materialized, key-sorted stopping candidates per germ.
//!
//! For Model 1 the candidates of `i` are the `j` with `d_ij > d_ji`, keyed by
//! `d_ij`; for Model 2 every `j` with finite `m_ij`, keyed by `m_ij`. Either
//! key satisfies `2·key ≥ |P_i − P_j|`, so after collecting all germs within
//! a reach `ρ` of `P_i` every candidate with key below `ρ/2` is known. Lists
//! start small and the reach doubles on demand.

use crate::geometry::{growth_distances, MarkedPoint};
use crate::grid::Grid;
use crate::scalar::Scalar;

use super::Model;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate<T> {
    pub j: usize,
    pub key: T,
    pub d_ij: T,
    pub d_ji: T,
}

#[derive(Debug, Clone)]
struct List<T> {
    entries: Vec<Candidate<T>>,
    reach: f64,
    complete: bool,
}

/// Certified prefix bound as a fraction of the reach; below the exact 1/2 to
/// absorb rounding in the computed distances.
const CERTIFIED_FRACTION: f64 = 0.45;

pub struct CandidateIndex<'a, T> {
    points: &'a [MarkedPoint<T>],
    model: Model,
    parallel: T,
    grid: Grid,
    lists: Vec<Option<List<T>>>,
    initial_reach: f64,
}

impl<'a, T: Scalar> CandidateIndex<'a, T> {
    pub fn new(points: &'a [MarkedPoint<T>], model: Model, parallel: T) -> Self {
        let coords = points
            .iter()
            .map(|p| (p.germ().x.to_f64_lossy(), p.germ().y.to_f64_lossy()))
            .collect();
        let grid = Grid::new(coords, 2.0);
        let initial_reach = 4.0 * grid.spacing();
        CandidateIndex {
            points,
            model,
            parallel,
            grid,
            lists: vec![None; points.len()],
            initial_reach,
        }
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &'a [MarkedPoint<T>] {
        self.points
    }

    pub fn parallel_tolerance(&self) -> T {
        self.parallel
    }

    fn candidate(&self, i: usize, j: usize) -> Option<Candidate<T>> {
        let (_, d_ij, d_ji) = growth_distances(&self.points[i], &self.points[j], self.parallel);
        let key = match self.model {
            Model::Model1 if d_ij > d_ji && d_ij.is_finite() => d_ij,
            Model::Model2 if d_ij.is_finite() && d_ji.is_finite() => d_ij.max(d_ji),
            _ => return None,
        };
        Some(Candidate { j, key, d_ij, d_ji })
    }

    fn rebuild(&mut self, i: usize, reach: f64) {
        let complete = reach >= self.grid.extent();
        let mut entries = Vec::new();
        if complete {
            entries.extend(
                (0..self.points.len())
                    .filter(|&j| j != i)
                    .filter_map(|j| self.candidate(i, j)),
            );
        } else {
            let g = self.points[i].germ();
            let mut near = Vec::new();
            self.grid
                .for_each_within(g.x.to_f64_lossy(), g.y.to_f64_lossy(), reach, |j| near.push(j));
            entries.extend(
                near.into_iter()
                    .filter(|&j| j != i)
                    .filter_map(|j| self.candidate(i, j)),
            );
        }
        entries.sort_by(|a, b| a.key.partial_cmp(&b.key).unwrap().then(a.j.cmp(&b.j)));
        self.lists[i] = Some(List {
            entries,
            reach,
            complete,
        });
    }

    fn expand(&mut self, i: usize) {
        let reach = match &self.lists[i] {
            None => self.initial_reach,
            Some(list) => list.reach * 2.0,
        };
        self.rebuild(i, reach);
    }

    /// First candidate of `i` at or after position `pos` satisfying `pred`,
    /// with its position. Positions are stable across expansions.
    pub fn find_from(
        &mut self,
        i: usize,
        mut pos: usize,
        mut pred: impl FnMut(&Candidate<T>) -> bool,
    ) -> Option<(usize, Candidate<T>)> {
        if self.lists[i].is_none() {
            self.expand(i);
        }
        loop {
            let list = self.lists[i].as_ref().expect("list built above");
            let bound = CERTIFIED_FRACTION * list.reach;
            while let Some(e) = list.entries.get(pos) {
                if !list.complete && e.key.to_f64_lossy() > bound {
                    break;
                }
                if pred(e) {
                    return Some((pos, *e));
                }
                pos += 1;
            }
            if list.complete {
                return None;
            }
            self.expand(i);
        }
    }

    /// The candidate at position `pos` of `i`'s sorted list.
    pub fn entry(&mut self, i: usize, pos: usize) -> Option<Candidate<T>> {
        self.find_from(i, pos, |_| true).map(|(_, e)| e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointprocess::{sample_poisson, Window};

    fn brute(points: &[MarkedPoint<f64>], model: Model, i: usize) -> Vec<(f64, usize)> {
        let mut v: Vec<(f64, usize)> = (0..points.len())
            .filter(|&j| j != i)
            .filter_map(|j| {
                let (_, a, b) = growth_distances(&points[i], &points[j], 1e-12);
                match model {
                    Model::Model1 if a > b && a.is_finite() => Some((a, j)),
                    Model::Model2 if a.is_finite() && b.is_finite() => Some((a.max(b), j)),
                    _ => None,
                }
            })
            .collect();
        v.sort_by(|x, y| x.partial_cmp(y).unwrap());
        v
    }

    #[test]
    fn lazy_lists_match_full_sort() {
        let w = Window::square_origin(20.0, 20.0).unwrap();
        let set = sample_poisson::<f64>(1.0, &w, 3).unwrap();
        for model in [Model::Model1, Model::Model2] {
            let mut idx = CandidateIndex::new(set.points(), model, 1e-12);
            for i in 0..set.len() {
                let want = brute(set.points(), model, i);
                for (pos, &(key, j)) in want.iter().enumerate().take(25) {
                    let e = idx.entry(i, pos).unwrap();
                    assert_eq!((e.key, e.j), (key, j), "model {model:?} germ {i} pos {pos}");
                }
            }
            // Exhausting one list forces completion.
            let all = brute(set.points(), model, 0);
            assert!(idx.entry(0, all.len()).is_none());
            assert_eq!(idx.entry(0, all.len() - 1).unwrap().j, all.last().unwrap().1);
        }
    }

    #[test]
    fn find_from_skips_failing_entries() {
        let w = Window::square_origin(10.0, 10.0).unwrap();
        let set = sample_poisson::<f64>(1.0, &w, 11).unwrap();
        let mut idx = CandidateIndex::new(set.points(), Model::Model2, 1e-12);
        let want = brute(set.points(), Model::Model2, 4);
        let target = want.iter().find(|(_, j)| j % 3 == 0).copied();
        let got = idx.find_from(4, 0, |e| e.j % 3 == 0).map(|(_, e)| (e.key, e.j));
        assert_eq!(got, target);
    }
}
