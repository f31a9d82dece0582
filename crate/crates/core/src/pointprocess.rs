//! Marked Poisson sampling in bounded windows and genericity checks on
//! marked point sets.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{growth_distances, length_scale, MarkedPoint, PairKind, Point2};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PointProcessError {
    #[error("intensity must be positive and finite, got {0}")]
    InvalidIntensity(f64),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("asked for {requested} points but the set has {available}")]
    NotEnoughPoints { requested: usize, available: usize },
    #[error("germs {0} and {1} coincide")]
    DuplicateGerm(usize, usize),
    #[error("invalid mark distribution: {0}")]
    InvalidMarks(String),
}

/// Observation window. Coordinates are always `f64`; point sets of either
/// precision refer to the same window type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Window {
    Rectangle { xmin: f64, ymin: f64, xmax: f64, ymax: f64 },
    Disk { cx: f64, cy: f64, radius: f64 },
}

impl Window {
    pub fn rectangle(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Result<Self, PointProcessError> {
        let w = Window::Rectangle { xmin, ymin, xmax, ymax };
        w.validate()?;
        Ok(w)
    }

    /// `[0, width] × [0, height]`.
    pub fn square_origin(width: f64, height: f64) -> Result<Self, PointProcessError> {
        Self::rectangle(0.0, 0.0, width, height)
    }

    pub fn disk(cx: f64, cy: f64, radius: f64) -> Result<Self, PointProcessError> {
        let w = Window::Disk { cx, cy, radius };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<(), PointProcessError> {
        match *self {
            Window::Rectangle { xmin, ymin, xmax, ymax } => {
                if ![xmin, ymin, xmax, ymax].iter().all(|v| v.is_finite()) || !(xmax > xmin && ymax > ymin) {
                    return Err(PointProcessError::InvalidWindow(format!(
                        "rectangle [{xmin}, {xmax}] x [{ymin}, {ymax}] is empty or not finite"
                    )));
                }
            }
            Window::Disk { cx, cy, radius } => {
                if !(cx.is_finite() && cy.is_finite() && radius.is_finite() && radius > 0.0) {
                    return Err(PointProcessError::InvalidWindow(format!(
                        "disk centre ({cx}, {cy}) radius {radius}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        match *self {
            Window::Rectangle { xmin, ymin, xmax, ymax } => (xmax - xmin) * (ymax - ymin),
            Window::Disk { radius, .. } => std::f64::consts::PI * radius * radius,
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            Window::Rectangle { xmin, ymin, xmax, ymax } => x >= xmin && x <= xmax && y >= ymin && y <= ymax,
            Window::Disk { cx, cy, radius } => (x - cx).hypot(y - cy) <= radius,
        }
    }

    /// Distance from an interior point to the boundary; negative outside.
    pub fn distance_to_boundary(&self, x: f64, y: f64) -> f64 {
        match *self {
            Window::Rectangle { xmin, ymin, xmax, ymax } => (x - xmin).min(xmax - x).min(y - ymin).min(ymax - y),
            Window::Disk { cx, cy, radius } => radius - (x - cx).hypot(y - cy),
        }
    }

    pub fn center(&self) -> (f64, f64) {
        match *self {
            Window::Rectangle { xmin, ymin, xmax, ymax } => (0.5 * (xmin + xmax), 0.5 * (ymin + ymax)),
            Window::Disk { cx, cy, .. } => (cx, cy),
        }
    }

    /// `(xmin, ymin, xmax, ymax)`.
    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        match *self {
            Window::Rectangle { xmin, ymin, xmax, ymax } => (xmin, ymin, xmax, ymax),
            Window::Disk { cx, cy, radius } => (cx - radius, cy - radius, cx + radius, cy + radius),
        }
    }

    fn sample_uniform<R: Rng>(&self, rng: &mut R) -> (f64, f64) {
        match *self {
            Window::Rectangle { xmin, ymin, xmax, ymax } => {
                let x = xmin + (xmax - xmin) * rng.random::<f64>();
                let y = ymin + (ymax - ymin) * rng.random::<f64>();
                (x, y)
            }
            Window::Disk { cx, cy, radius } => {
                let r = radius * rng.random::<f64>().sqrt();
                let phi = std::f64::consts::TAU * rng.random::<f64>();
                (cx + r * phi.cos(), cy + r * phi.sin())
            }
        }
    }
}

/// Where a point set came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Sampled { seed: u64, lambda: f64, window: Window },
    UserSupplied,
}

/// Distribution of the direction marks.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MarkDistribution {
    /// θ uniform on `[0, π)`.
    #[default]
    Uniform,
    /// θ₁ with probability `p`, θ₂ otherwise.
    TwoAtom { theta1: f64, theta2: f64, p: f64 },
}

impl MarkDistribution {
    pub fn validate(&self) -> Result<(), PointProcessError> {
        if let MarkDistribution::TwoAtom { theta1, theta2, p } = *self {
            let pi = std::f64::consts::PI;
            let ok_angle = |t: f64| (0.0..pi).contains(&t);
            if !(ok_angle(theta1) && ok_angle(theta2) && (0.0..=1.0).contains(&p)) {
                return Err(PointProcessError::InvalidMarks(format!(
                    "two-atom marks need angles in [0, pi) and p in [0, 1], got ({theta1}, {theta2}, {p})"
                )));
            }
        }
        Ok(())
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            MarkDistribution::Uniform => std::f64::consts::PI * rng.random::<f64>(),
            MarkDistribution::TwoAtom { theta1, theta2, p } => {
                if rng.random::<f64>() < p {
                    theta1
                } else {
                    theta2
                }
            }
        }
    }
}

/// Finite marked point set with pairwise distinct germs. Indices are the
/// identifiers every downstream module uses.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedPointSet<T> {
    points: Vec<MarkedPoint<T>>,
    provenance: Provenance,
}

impl<T: Scalar> MarkedPointSet<T> {
    pub fn new(points: Vec<MarkedPoint<T>>, provenance: Provenance) -> Result<Self, PointProcessError> {
        if let Some((a, b)) = first_duplicate(&points) {
            return Err(PointProcessError::DuplicateGerm(a, b));
        }
        Ok(MarkedPointSet { points, provenance })
    }

    pub fn user(points: Vec<MarkedPoint<T>>) -> Result<Self, PointProcessError> {
        Self::new(points, Provenance::UserSupplied)
    }

    pub fn empty() -> Self {
        MarkedPointSet {
            points: Vec::new(),
            provenance: Provenance::UserSupplied,
        }
    }

    pub fn points(&self) -> &[MarkedPoint<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn window(&self) -> Option<Window> {
        match self.provenance {
            Provenance::Sampled { window, .. } => Some(window),
            Provenance::UserSupplied => None,
        }
    }
}

fn first_duplicate<T: Scalar>(points: &[MarkedPoint<T>]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    let key = |i: usize| {
        let g = points[i].germ();
        (g.x, g.y)
    };
    order.sort_by(|&a, &b| {
        let (ax, ay) = key(a);
        let (bx, by) = key(b);
        ax.partial_cmp(&bx)
            .unwrap()
            .then(ay.partial_cmp(&by).unwrap())
            .then(a.cmp(&b))
    });
    order
        .windows(2)
        .find(|w| key(w[0]) == key(w[1]))
        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
}

/// Stationary Poisson process of intensity `lambda` in `window` with i.i.d.
/// uniform directions. Deterministic in `seed`.
pub fn sample_poisson<T: Scalar>(
    lambda: f64,
    window: &Window,
    seed: u64,
) -> Result<MarkedPointSet<T>, PointProcessError> {
    sample_poisson_with(lambda, window, seed, &MarkDistribution::Uniform)
}

pub fn sample_poisson_with<T: Scalar>(
    lambda: f64,
    window: &Window,
    seed: u64,
    marks: &MarkDistribution,
) -> Result<MarkedPointSet<T>, PointProcessError> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(PointProcessError::InvalidIntensity(lambda));
    }
    window.validate()?;
    marks.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean = lambda * window.area();
    let count = Poisson::new(mean)
        .map_err(|_| PointProcessError::InvalidIntensity(mean))?
        .sample(&mut rng) as usize;
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let (x, y) = window.sample_uniform(&mut rng);
        let theta = marks.sample(&mut rng);
        let p =
            MarkedPoint::folded(T::of(x), T::of(y), T::of(theta)).expect("sampled coordinates and angles are finite");
        points.push(p);
    }
    MarkedPointSet::new(
        points,
        Provenance::Sampled {
            seed,
            lambda,
            window: *window,
        },
    )
}

/// The `n` germs nearest the origin, nearest first (ties by original index),
/// preceded by `pinned` (default: germ at the origin with θ = 0).
pub fn n_closest_to_origin<T: Scalar>(
    set: &MarkedPointSet<T>,
    n: usize,
    pinned: Option<MarkedPoint<T>>,
) -> Result<MarkedPointSet<T>, PointProcessError> {
    if set.len() < n {
        return Err(PointProcessError::NotEnoughPoints {
            requested: n,
            available: set.len(),
        });
    }
    let pin = pinned.unwrap_or_else(|| MarkedPoint::new(T::zero(), T::zero(), T::zero()).expect("origin is valid"));
    let mut order: Vec<(T, usize)> = set
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.germ().dot(p.germ()), i))
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut points = Vec::with_capacity(n + 1);
    points.push(pin);
    points.extend(order.iter().take(n).map(|&(_, i)| set.points[i]));
    MarkedPointSet::new(points, set.provenance)
}

/// Two ordered pairs whose growth distances nearly coincide.
#[derive(Debug, Clone, PartialEq)]
pub struct NearTie {
    pub first: (usize, usize),
    pub second: (usize, usize),
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConditionDReport {
    pub passes: bool,
    pub near_ties: Vec<NearTie>,
    pub collinear_pairs: Vec<(usize, usize)>,
}

/// Genericity check on growth distances.
///
/// Every comparison the solvers make is between two distances whose ordered
/// index pairs share an index, so only such ties are searched: for each `i`,
/// all finite `d_ij` and `d_ji` are sorted and neighbours closer than
/// `tie_tol · max(1, a, b)` are reported. Collinear pairs are always
/// reported since they force `d_ij = d_ji`.
pub fn check_condition_d<T: Scalar>(set: &MarkedPointSet<T>, tie_tol: T) -> ConditionDReport {
    let pts = set.points();
    let n = pts.len();
    let parallel = T::default_tolerances().parallel;
    let mut d = vec![T::infinity(); n * n];
    let mut collinear = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (kind, dij, dji) = growth_distances(&pts[i], &pts[j], parallel);
            if kind == PairKind::CollinearParallel {
                collinear.push((i, j));
            }
            d[i * n + j] = dij;
            d[j * n + i] = dji;
        }
    }
    let is_collinear: BTreeSet<(usize, usize)> = collinear.iter().copied().collect();
    let mut ties = BTreeSet::new();
    let mut near_ties = Vec::new();
    let mut incident: Vec<(T, (usize, usize))> = Vec::with_capacity(2 * n);
    for i in 0..n {
        incident.clear();
        for j in (0..n).filter(|&j| j != i) {
            for (a, b) in [(i, j), (j, i)] {
                let v = d[a * n + b];
                if v.is_finite() {
                    incident.push((v, (a, b)));
                }
            }
        }
        incident.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));
        for w in incident.windows(2) {
            let (va, pa) = w[0];
            let (vb, pb) = w[1];
            let gap = vb - va;
            if gap > tie_tol * T::one().max(va.abs()).max(vb.abs()) {
                continue;
            }
            let same_pair = (pa.0 == pb.1 && pa.1 == pb.0) || pa == pb;
            if same_pair && is_collinear.contains(&(pa.0.min(pa.1), pa.0.max(pa.1))) {
                continue;
            }
            let key = if pa <= pb { (pa, pb) } else { (pb, pa) };
            if ties.insert(key) {
                near_ties.push(NearTie {
                    first: key.0,
                    second: key.1,
                    gap: gap.to_f64_lossy(),
                });
            }
        }
    }
    ConditionDReport {
        passes: near_ties.is_empty() && collinear.is_empty(),
        near_ties,
        collinear_pairs: collinear,
    }
}

/// Deterministically jitters every germ by at most `1e-9 · max(1, |P|)` in
/// each coordinate, keeping directions. Used to break planted ties in
/// user-supplied sets.
pub fn perturb<T: Scalar>(set: &MarkedPointSet<T>, seed: u64) -> Result<MarkedPointSet<T>, PointProcessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rel = T::of(1e-9);
    let points = set
        .points()
        .iter()
        .map(|p| {
            let g = p.germ();
            let eps = rel * length_scale(g, Point2::default());
            let jx = T::of(2.0 * rng.random::<f64>() - 1.0) * eps;
            let jy = T::of(2.0 * rng.random::<f64>() - 1.0) * eps;
            MarkedPoint::new(g.x + jx, g.y + jy, p.theta()).expect("jitter keeps coordinates finite")
        })
        .collect();
    MarkedPointSet::new(points, set.provenance())
}
