//! One sampled, solved and analysed realization, and what it contributes to
//! the estimators.

use std::collections::BTreeMap;

use crate::pointprocess::{sample_poisson_with, MarkDistribution, MarkedPointSet, PointProcessError, Window};
use crate::solver::{solve_chain_with, Model, Solution, SolverError, SolverOptions};
use crate::structure::{analyze, contact_count_identity_where, ContactIdentity, StructureError, StructureReport};

use super::StatsError;

const MAX_ATTEMPTS: u64 = 8;

/// Seed for resampling attempt `attempt` of `seed`; attempt 0 is `seed`
/// itself. Later attempts are hashed so they never coincide with the
/// neighbouring replication seeds `seed ± k`.
pub fn derive_seed(seed: u64, attempt: u64) -> u64 {
    if attempt == 0 {
        return seed;
    }
    let mut z = seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct SolvedSample {
    pub solution: Solution<f64>,
    pub structure: StructureReport,
    /// The seed that produced the accepted sample.
    pub seed: u64,
    /// Number of rejected samples before it.
    pub rejected: u64,
}

/// Samples, solves and analyses, resampling under a derived seed whenever
/// the sample is too degenerate to solve unambiguously.
pub fn sample_and_solve(
    lambda: f64,
    window: &Window,
    seed: u64,
    model: Model,
    marks: &MarkDistribution,
) -> Result<SolvedSample, StatsError> {
    solve_with_resampling(seed, model, |s| sample_poisson_with(lambda, window, s, marks))
}

pub(crate) fn solve_with_resampling(
    seed: u64,
    model: Model,
    build: impl Fn(u64) -> Result<MarkedPointSet<f64>, PointProcessError>,
) -> Result<SolvedSample, StatsError> {
    let opts = SolverOptions::<f64>::default();
    for attempt in 0..MAX_ATTEMPTS {
        let s = derive_seed(seed, attempt);
        let set = match build(s) {
            Ok(set) => set,
            Err(PointProcessError::NotEnoughPoints { .. } | PointProcessError::DuplicateGerm(..)) => {
                log::info!("seed {seed}: sample {s} unusable, resampling");
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let solution = match solve_chain_with(&set, model, None, &opts) {
            Ok((solution, _)) => solution,
            Err(SolverError::ConditionDViolation(ties)) => {
                log::info!("seed {seed}: sample {s} has {} near-tie(s), resampling", ties.len());
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        match analyze(&solution) {
            Ok(structure) => {
                return Ok(SolvedSample {
                    solution,
                    structure,
                    seed: s,
                    rejected: attempt,
                })
            }
            Err(StructureError::AmbiguousStop { index, .. }) => {
                log::info!("seed {seed}: sample {s} has an ambiguous stop at {index}, resampling");
            }
            Err(e) => return Err(e.into()),
        }
    }
    Err(StatsError::ResamplingExhausted(MAX_ATTEMPTS as usize))
}

/// Minus-sampling status of every germ.
///
/// A germ is *inner* when it lies at least `margin` inside the window, and
/// *certified* when it is inner and its radius is finite and below its
/// boundary distance minus `margin / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certification {
    pub margin: f64,
    pub boundary_distance: Vec<f64>,
    pub inner: Vec<bool>,
    pub certified: Vec<bool>,
}

impl Certification {
    pub fn new(solution: &Solution<f64>, window: &Window, margin: f64) -> Self {
        let boundary_distance: Vec<f64> = solution
            .set
            .points()
            .iter()
            .map(|p| window.distance_to_boundary(p.germ().x, p.germ().y))
            .collect();
        let r = solution.radii.as_slice();
        let inner: Vec<bool> = boundary_distance.iter().map(|&d| d >= margin).collect();
        let certified = (0..r.len())
            .map(|i| inner[i] && Self::radius_ok(r[i], boundary_distance[i], margin))
            .collect();
        Certification {
            margin,
            boundary_distance,
            inner,
            certified,
        }
    }

    fn radius_ok(r: f64, dist: f64, margin: f64) -> bool {
        r.is_finite() && r < dist - 0.5 * margin
    }

    /// Every member has a finite radius clear of the boundary by `margin / 2`.
    pub fn cluster_certified(&self, members: &[usize], radii: &[f64]) -> bool {
        members
            .iter()
            .all(|&i| Self::radius_ok(radii[i], self.boundary_distance[i], self.margin))
    }

    /// Cluster of certified germs only.
    pub fn cluster_fully_certified(&self, members: &[usize]) -> bool {
        members.iter().all(|&i| self.certified[i])
    }
}

/// Both sides of the per-realization mass-transport balance for the
/// kernel `κ(P, Q) = 1{Q stops P}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MassTransport {
    /// Counted germs with a finite radius (each sends unit mass).
    pub lhs: usize,
    /// Mass received by counted germs: `ν(Q)` minus one for a finite `Q`
    /// outside a doublet.
    pub rhs: usize,
    /// All germs counted, in which case `lhs = rhs` must hold exactly.
    pub exhaustive: bool,
}

impl MassTransport {
    pub fn balanced(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Counts over certified germs when `certification` is given, all germs otherwise.
pub fn mass_transport_check(
    solution: &Solution<f64>,
    report: &StructureReport,
    certification: Option<&Certification>,
) -> MassTransport {
    let r = solution.radii.as_slice();
    let counted = |i: usize| certification.is_none_or(|c| c.certified[i]);
    let mut out = MassTransport {
        exhaustive: certification.is_none_or(|c| c.certified.iter().all(|&x| x)),
        ..Default::default()
    };
    for i in (0..r.len()).filter(|&i| counted(i)) {
        let finite = r[i].is_finite();
        if finite {
            out.lhs += 1;
        }
        let own_stop = usize::from(finite && !report.in_doublet(i));
        out.rhs += report.nu[i] - own_stop;
    }
    out
}

/// Everything one realization contributes to [`super::PalmEstimates`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RealizationTally {
    pub germs: usize,
    pub inner: usize,
    pub certified: usize,
    pub nu_sum: usize,
    pub doublet_germs: usize,
    /// Certified germs on stopping cycles, by cycle length.
    pub cycle_germs: BTreeMap<usize, usize>,
    pub inner_in_finite_cluster: usize,
    /// Certified clusters whose lexicographically smallest germ is inner.
    pub clusters: usize,
    pub cluster_members: usize,
    pub infinite_segments: usize,
    /// Identities on finite clusters made only of certified germs.
    pub identity: ContactIdentity,
    pub mass_transport: MassTransport,
    /// More than half of the inner germs failed certification.
    pub flagged: bool,
}

impl RealizationTally {
    pub fn new(sample: &SolvedSample, window: &Window, margin: f64) -> Self {
        let sol = &sample.solution;
        let rep = &sample.structure;
        let r = sol.radii.as_slice();
        let pts = sol.set.points();
        let cert = Certification::new(sol, window, margin);
        let mut t = RealizationTally {
            germs: r.len(),
            infinite_segments: r.iter().filter(|x| x.is_infinite()).count(),
            ..Default::default()
        };

        let mut on_cycle = vec![0usize; r.len()];
        for c in &rep.cycles {
            for &i in c {
                on_cycle[i] = c.len();
            }
        }
        let finite_cluster: Vec<bool> = rep
            .clusters
            .iter()
            .map(|m| m.iter().all(|&i| r[i].is_finite()))
            .collect();

        for i in 0..r.len() {
            if cert.inner[i] {
                t.inner += 1;
                if finite_cluster[rep.cluster_of[i]] {
                    t.inner_in_finite_cluster += 1;
                }
            }
            if !cert.certified[i] {
                continue;
            }
            t.certified += 1;
            t.nu_sum += rep.nu[i];
            if rep.in_doublet(i) {
                t.doublet_germs += 1;
            }
            if on_cycle[i] > 0 {
                *t.cycle_germs.entry(on_cycle[i]).or_default() += 1;
            }
        }

        for members in &rep.clusters {
            if !cert.cluster_certified(members, r) {
                continue;
            }
            let lex_min = members
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    let (pa, pb) = (pts[a].germ(), pts[b].germ());
                    pa.x.total_cmp(&pb.x).then(pa.y.total_cmp(&pb.y))
                })
                .expect("clusters are nonempty");
            if cert.inner[lex_min] {
                t.clusters += 1;
                t.cluster_members += members.len();
            }
        }

        t.identity = contact_count_identity_where(rep, sol, |m| cert.cluster_fully_certified(m));
        t.mass_transport = mass_transport_check(sol, rep, Some(&cert));
        t.flagged = t.inner > 0 && 2 * t.certified < t.inner;
        t
    }
}
