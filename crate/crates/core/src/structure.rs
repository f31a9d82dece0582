//! Stopping map, contacts, clusters, cycles and doublets of a solved system.

use thiserror::Error;

use crate::geometry::{realize_segment, segments_touch, Segment};
use crate::scalar::{approx_eq, Scalar};
use crate::solver::{CandidateIndex, Model, Solution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("germ {index} is stopped equally well by {candidates:?}")]
    AmbiguousStop { index: usize, candidates: Vec<usize> },
    #[error("germ {0} has a finite radius but no stopping neighbour")]
    MissingStop(usize),
    #[error("inconsistent structure: {0}")]
    Inconsistency(String),
}

/// `J(i)`: the germ whose segment stopped `i`, for every finite radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoppingMap {
    pub stops: Vec<Option<usize>>,
}

impl StoppingMap {
    pub fn get(&self, i: usize) -> Option<usize> {
        self.stops[i]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    pub stopping: StoppingMap,
    /// Unordered touching pairs `(min, max)`, sorted.
    pub contacts: Vec<(usize, usize)>,
    /// Components, each sorted, ordered by smallest member.
    pub clusters: Vec<Vec<usize>>,
    /// Cluster index of each germ.
    pub cluster_of: Vec<usize>,
    /// Model 1 stopping cycles, each starting at its smallest member.
    pub cycles: Vec<Vec<usize>>,
    /// Model 2 mutual stops `(min, max)`.
    pub doublets: Vec<(usize, usize)>,
    /// Number of touching segments per germ.
    pub nu: Vec<usize>,
}

impl StructureReport {
    pub fn in_doublet(&self, i: usize) -> bool {
        self.stopping.stops[i].is_some_and(|j| self.stopping.stops[j] == Some(i))
    }
}

pub fn stopping_map<T: Scalar>(solution: &Solution<T>) -> Result<StoppingMap, StructureError> {
    stopping_map_with(solution, T::default_tolerances().contact)
}

/// Each finite `R_i` must equal exactly one admissible candidate key of
/// `i` within `tol`.
pub fn stopping_map_with<T: Scalar>(solution: &Solution<T>, tol: T) -> Result<StoppingMap, StructureError> {
    let pts = solution.set.points();
    let r = solution.radii.as_slice();
    let model = solution.model;
    let mut index = CandidateIndex::new(pts, model, T::default_tolerances().parallel);
    let mut stops = vec![None; pts.len()];
    for (i, &r_i) in r.iter().enumerate() {
        if !r_i.is_finite() {
            continue;
        }
        let ceiling = r_i + tol * T::one().max(r_i);
        let mut matches = Vec::new();
        let mut pos = 0;
        while let Some(e) = index.entry(i, pos) {
            if e.key > ceiling {
                break;
            }
            let r_j = r[e.j];
            let admitted = match model {
                Model::Model1 => r_j > e.d_ji,
                Model::Model2 => r_j >= e.d_ji || approx_eq(r_j, e.d_ji, tol),
            };
            if approx_eq(e.key, r_i, tol) && admitted {
                matches.push(e.j);
            }
            pos += 1;
        }
        match matches.len() {
            0 => return Err(StructureError::MissingStop(i)),
            1 => stops[i] = Some(matches[0]),
            _ => {
                matches.sort_unstable();
                return Err(StructureError::AmbiguousStop {
                    index: i,
                    candidates: matches,
                });
            }
        }
    }
    Ok(StoppingMap { stops })
}

pub fn analyze<T: Scalar>(solution: &Solution<T>) -> Result<StructureReport, StructureError> {
    analyze_with(solution, T::default_tolerances().contact)
}

pub fn analyze_with<T: Scalar>(solution: &Solution<T>, tol: T) -> Result<StructureReport, StructureError> {
    let stopping = stopping_map_with(solution, tol)?;
    let n = solution.set.len();
    let model = solution.model;
    let r = solution.radii.as_slice();

    let mut contacts: Vec<(usize, usize)> = stopping
        .stops
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.map(|j| (i.min(j), i.max(j))))
        .collect();
    contacts.sort_unstable();
    contacts.dedup();
    check_contacts_touch(solution, &contacts, tol)?;

    let mut nu = vec![0usize; n];
    for &(a, b) in &contacts {
        nu[a] += 1;
        nu[b] += 1;
    }

    let (clusters, cluster_of) = components(n, &contacts);
    let orbit_cycles = functional_cycles(&stopping.stops);

    let mut cycles = Vec::new();
    let mut doublets = Vec::new();
    for c in orbit_cycles {
        match (model, c.len()) {
            (Model::Model1, len) if len >= 3 => cycles.push(c),
            (Model::Model2, 2) => {
                if r[c[0]] != r[c[1]] {
                    return Err(StructureError::Inconsistency(format!(
                        "doublet ({}, {}) has unequal radii",
                        c[0], c[1]
                    )));
                }
                doublets.push((c[0], c[1]));
            }
            (_, len) => {
                return Err(StructureError::Inconsistency(format!(
                    "{model} stopping cycle of length {len} through germ {}",
                    c[0]
                )))
            }
        }
    }

    let mut cycles_per_cluster = vec![0usize; clusters.len()];
    for first in cycles.iter().map(|c| c[0]).chain(doublets.iter().map(|d| d.0)) {
        cycles_per_cluster[cluster_of[first]] += 1;
    }
    for (k, members) in clusters.iter().enumerate() {
        let infinite = members.iter().filter(|&&i| r[i].is_infinite()).count();
        let ok = match infinite {
            0 => cycles_per_cluster[k] == 1,
            1 => cycles_per_cluster[k] == 0 && (model == Model::Model1 || members.len() == 1),
            _ => false,
        };
        if !ok {
            return Err(StructureError::Inconsistency(format!(
                "cluster of germ {} has {} members, {infinite} infinite, {} cycle(s)",
                members[0],
                members.len(),
                cycles_per_cluster[k]
            )));
        }
    }

    Ok(StructureReport {
        stopping,
        contacts,
        clusters,
        cluster_of,
        cycles,
        doublets,
        nu,
    })
}

/// Stopping pairs must touch, and no other pair may.
fn check_contacts_touch<T: Scalar>(
    solution: &Solution<T>,
    contacts: &[(usize, usize)],
    tol: T,
) -> Result<(), StructureError> {
    let pts = solution.set.points();
    let r = solution.radii.as_slice();
    let segs: Vec<Segment<T>> = pts
        .iter()
        .zip(r)
        .map(|(p, &rad)| realize_segment(*p, rad).expect("solved radii are nonnegative"))
        .collect();
    for &(a, b) in contacts {
        if !segments_touch(&segs[a], &segs[b], tol) {
            return Err(StructureError::Inconsistency(format!(
                "stopping pair ({a}, {b}) does not touch"
            )));
        }
    }
    let n = pts.len();
    for a in 0..n {
        for b in (a + 1)..n {
            if r[a].is_finite() && r[b].is_finite() {
                let dist = pts[a].germ().distance(pts[b].germ());
                if dist > (r[a] + r[b]) * (T::one() + tol) + tol {
                    continue;
                }
            }
            if segments_touch(&segs[a], &segs[b], tol) && contacts.binary_search(&(a, b)).is_err() {
                return Err(StructureError::Inconsistency(format!(
                    "segments {a} and {b} touch but neither stopped the other"
                )));
            }
        }
    }
    Ok(())
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn components(n: usize, edges: &[(usize, usize)]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut parent: Vec<usize> = (0..n).collect();
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut cluster_of = vec![0; n];
    for (i, slot) in cluster_of.iter_mut().enumerate() {
        let root = find(&mut parent, i);
        if label[root] == usize::MAX {
            label[root] = clusters.len();
            clusters.push(Vec::new());
        }
        *slot = label[root];
        clusters[label[root]].push(i);
    }
    (clusters, cluster_of)
}

/// Cycles of a partial functional graph, each rotated to start at its
/// smallest member, ordered by that member.
fn functional_cycles(next: &[Option<usize>]) -> Vec<Vec<usize>> {
    const NEW: u8 = 0;
    const ACTIVE: u8 = 1;
    const DONE: u8 = 2;
    let mut state = vec![NEW; next.len()];
    let mut cycles = Vec::new();
    let mut path = Vec::new();
    for s in 0..next.len() {
        let mut at = Some(s);
        path.clear();
        while let Some(i) = at {
            match state[i] {
                NEW => {
                    state[i] = ACTIVE;
                    path.push(i);
                    at = next[i];
                }
                ACTIVE => {
                    let from = path.iter().position(|&p| p == i).expect("active nodes are on the path");
                    let mut cycle = path[from..].to_vec();
                    let min_pos = cycle
                        .iter()
                        .enumerate()
                        .min_by_key(|(_, &v)| v)
                        .map(|(k, _)| k)
                        .unwrap();
                    cycle.rotate_left(min_pos);
                    cycles.push(cycle);
                    break;
                }
                _ => break,
            }
        }
        for &p in &path {
            state[p] = DONE;
        }
    }
    cycles.sort();
    cycles
}

/// Both sides of the discrete neighbour-count identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ContactIdentity {
    pub segments: usize,
    pub doublets: usize,
    pub contacts: usize,
    /// `segments` for Model 1, `segments − doublets` for Model 2.
    pub expected_contacts: usize,
    pub nu_sum: usize,
}

impl ContactIdentity {
    pub fn holds(&self) -> bool {
        self.contacts == self.expected_contacts && self.nu_sum == 2 * self.contacts
    }
}

/// Identities over all clusters without an infinite segment. Such clusters
/// are closed under the stopping map, so contacts never leave them.
pub fn contact_count_identity<T: Scalar>(report: &StructureReport, solution: &Solution<T>) -> ContactIdentity {
    contact_count_identity_where(report, solution, |_| true)
}

/// As [`contact_count_identity`], restricted to the finite clusters `keep` accepts.
pub fn contact_count_identity_where<T: Scalar>(
    report: &StructureReport,
    solution: &Solution<T>,
    keep: impl Fn(&[usize]) -> bool,
) -> ContactIdentity {
    let r = solution.radii.as_slice();
    let mut chosen = vec![false; r.len()];
    let mut out = ContactIdentity::default();
    for members in &report.clusters {
        if members.iter().all(|&i| r[i].is_finite()) && keep(members) {
            for &i in members {
                chosen[i] = true;
                out.nu_sum += report.nu[i];
            }
            out.segments += members.len();
        }
    }
    out.doublets = report.doublets.iter().filter(|d| chosen[d.0]).count();
    out.contacts = report.contacts.iter().filter(|c| chosen[c.0]).count();
    out.expected_contacts = match solution.model {
        Model::Model1 => out.segments,
        Model::Model2 => out.segments - out.doublets,
    };
    out
}
