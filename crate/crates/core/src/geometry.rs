//! Pairwise geometry of directed growth: intersection points, growth
//! distances, realized segments and hard-core contact predicates.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("germs {0} and {1} coincide")]
    IdenticalGerms(usize, usize),
    #[error("negative or undefined radius {0}")]
    NegativeRadius(f64),
    #[error("germ coordinates must be finite, got ({0}, {1})")]
    NonFiniteGerm(f64, f64),
    #[error("direction {0} outside [0, pi)")]
    DirectionOutOfRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point2<T> {
    pub fn new(x: T, y: T) -> Self {
        Point2 { x, y }
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the planar cross product.
    pub fn cross(self, other: Self) -> T {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Self) -> T {
        (other - self).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn midpoint(self, other: Self) -> Self {
        let half = T::of(0.5);
        Point2::new((self.x + other.x) * half, (self.y + other.y) * half)
    }
}

impl<T: Scalar> Add for Point2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> Sub for Point2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> Neg for Point2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Point2::new(-self.x, -self.y)
    }
}

impl<T: Scalar> Mul<T> for Point2<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Point2::new(self.x * k, self.y * k)
    }
}

/// A germ together with its unoriented growth direction θ ∈ [0, π).
///
/// The unit vector `u(θ)` is cached at construction, so every pair solve
/// reuses the same rounded cosine and sine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkedPoint<T> {
    germ: Point2<T>,
    theta: T,
    dir: Point2<T>,
}

impl<T: Scalar> MarkedPoint<T> {
    pub fn new(x: T, y: T, theta: T) -> Result<Self, GeometryError> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(GeometryError::NonFiniteGerm(x.to_f64_lossy(), y.to_f64_lossy()));
        }
        if !(theta >= T::zero() && theta < T::PI()) {
            return Err(GeometryError::DirectionOutOfRange(theta.to_f64_lossy()));
        }
        Ok(MarkedPoint {
            germ: Point2::new(x, y),
            theta,
            dir: Point2::new(theta.cos(), theta.sin()),
        })
    }

    /// Like [`MarkedPoint::new`] but reduces any finite angle into [0, π),
    /// identifying θ with θ + π.
    pub fn folded(x: T, y: T, theta: T) -> Result<Self, GeometryError> {
        if !theta.is_finite() {
            return Err(GeometryError::DirectionOutOfRange(theta.to_f64_lossy()));
        }
        let mut t = theta % T::PI();
        if t < T::zero() {
            t = t + T::PI();
        }
        if t >= T::PI() {
            t = T::zero();
        }
        Self::new(x, y, t)
    }

    pub fn germ(&self) -> Point2<T> {
        self.germ
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    /// `u(θ) = (cos θ, sin θ)`.
    pub fn direction(&self) -> Point2<T> {
        self.dir
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairKind {
    Transversal,
    CollinearParallel,
    DisjointParallel,
}

/// Growth distances of an ordered germ pair `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGeometry<T> {
    pub kind: PairKind,
    /// `P_ij` for transversal pairs, the germ midpoint for collinear ones.
    pub intersection: Option<Point2<T>>,
    pub d_ij: T,
    pub d_ji: T,
}

impl<T: Scalar> PairGeometry<T> {
    /// `m_ij = max(d_ij, d_ji)`.
    pub fn m(&self) -> T {
        self.d_ij.max(self.d_ji)
    }

    pub fn swapped(&self) -> Self {
        PairGeometry {
            d_ij: self.d_ji,
            d_ji: self.d_ij,
            ..*self
        }
    }
}

/// Local length scale `max(1, |a|, |b|)` that absolute slacks are relative to.
pub fn length_scale<T: Scalar>(a: Point2<T>, b: Point2<T>) -> T {
    T::one().max(a.norm()).max(b.norm())
}

/// Growth distances only, skipping the intersection point.
///
/// The parametric solve `P_i + s u_i = P_j + t u_j` is written so that
/// swapping the arguments swaps `s` and `t` bit-for-bit.
pub(crate) fn growth_distances<T: Scalar>(a: &MarkedPoint<T>, b: &MarkedPoint<T>, parallel_tol: T) -> (PairKind, T, T) {
    let delta = b.germ - a.germ;
    let den = a.dir.cross(b.dir);
    if den.abs() >= parallel_tol {
        let s = delta.cross(b.dir) / den;
        let t = delta.cross(a.dir) / den;
        return (PairKind::Transversal, s.abs(), t.abs());
    }
    let scale = length_scale(a.germ, b.germ);
    let offset = a.dir.cross(delta).abs().max(b.dir.cross(delta).abs());
    if offset <= parallel_tol.sqrt() * scale {
        let half = delta.norm() * T::of(0.5);
        (PairKind::CollinearParallel, half, half)
    } else {
        (PairKind::DisjointParallel, T::infinity(), T::infinity())
    }
}

/// Intersection point and growth distances for the ordered pair `(a, b)`.
///
/// Directions with `|sin(θa − θb)| < tol` are treated as parallel. Parallel
/// lines are collinear when each germ lies within `√tol · scale` of the other
/// germ's line (`scale` as in [`length_scale`]).
pub fn pair_geometry<T: Scalar>(
    a: &MarkedPoint<T>,
    b: &MarkedPoint<T>,
    tol: T,
) -> Result<PairGeometry<T>, GeometryError> {
    if a.germ == b.germ {
        return Err(GeometryError::IdenticalGerms(0, 1));
    }
    let (kind, d_ij, d_ji) = growth_distances(a, b, tol);
    let intersection = match kind {
        PairKind::Transversal => {
            let delta = b.germ - a.germ;
            let den = a.dir.cross(b.dir);
            let s = delta.cross(b.dir) / den;
            let t = delta.cross(a.dir) / den;
            // Both parametrizations, averaged, so the point is symmetric in (a, b).
            let from_a = a.germ + a.dir * s;
            let from_b = b.germ + b.dir * t;
            Some(from_a.midpoint(from_b))
        }
        PairKind::CollinearParallel => Some(a.germ.midpoint(b.germ)),
        PairKind::DisjointParallel => None,
    };
    Ok(PairGeometry {
        kind,
        intersection,
        d_ij,
        d_ji,
    })
}

/// The closed segment `{P + t u(θ) : |t| ≤ R}` or, for `R = ∞`, the full line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<T> {
    pub center: MarkedPoint<T>,
    pub radius: T,
}

impl<T: Scalar> Segment<T> {
    pub fn is_infinite(&self) -> bool {
        self.radius.is_infinite()
    }

    /// `None` for the infinite line.
    pub fn endpoints(&self) -> Option<(Point2<T>, Point2<T>)> {
        if self.is_infinite() {
            return None;
        }
        let p = self.center.germ;
        let u = self.center.dir * self.radius;
        Some((p - u, p + u))
    }

    /// Closed-segment membership with absolute slack `tol · max(1, |P|, |q|)`.
    pub fn contains(&self, q: Point2<T>, tol: T) -> bool {
        let p = self.center.germ;
        let slack = tol * length_scale(p, q);
        let rel = q - p;
        if self.center.dir.cross(rel).abs() > slack {
            return false;
        }
        self.center.dir.dot(rel).abs() <= self.radius + slack
    }
}

pub fn realize_segment<T: Scalar>(a: MarkedPoint<T>, radius: T) -> Result<Segment<T>, GeometryError> {
    if !(radius >= T::zero()) {
        return Err(GeometryError::NegativeRadius(radius.to_f64_lossy()));
    }
    Ok(Segment { center: a, radius })
}

/// Signed positions of the line crossing along each segment's axis, or the
/// collinear overlap configuration.
enum Crossing<T> {
    Point { s: T, t: T },
    Collinear { offset: T },
    Disjoint,
}

fn crossing<T: Scalar>(s1: &Segment<T>, s2: &Segment<T>) -> (Crossing<T>, T) {
    let a = &s1.center;
    let b = &s2.center;
    let scale = length_scale(a.germ, b.germ);
    let parallel_tol = T::default_tolerances().parallel;
    let delta = b.germ - a.germ;
    let den = a.dir.cross(b.dir);
    if den.abs() >= parallel_tol {
        let s = delta.cross(b.dir) / den;
        let t = delta.cross(a.dir) / den;
        return (Crossing::Point { s, t }, scale);
    }
    let off = a.dir.cross(delta).abs().max(b.dir.cross(delta).abs());
    if off <= parallel_tol.sqrt() * scale {
        (
            Crossing::Collinear {
                offset: a.dir.dot(delta),
            },
            scale,
        )
    } else {
        (Crossing::Disjoint, scale)
    }
}

/// Length of the overlap of `[-r1, r1]` and `[c - r2, c + r2]`; may be negative.
fn collinear_overlap<T: Scalar>(r1: T, r2: T, c: T) -> T {
    let hi = r1.min(c + r2);
    let lo = (-r1).max(c - r2);
    hi - lo
}

/// `S⁰₁ ∩ S⁰₂ ≠ ∅` for the relative interiors.
///
/// A crossing at distance `|s|` from a germ is interior when
/// `|s| < R − tol · scale`; infinite segments are interior everywhere and
/// zero-radius segments have empty interior.
pub fn relative_interiors_intersect<T: Scalar>(s1: &Segment<T>, s2: &Segment<T>, tol: T) -> bool {
    let (c, scale) = crossing(s1, s2);
    let slack = tol * scale;
    match c {
        Crossing::Point { s, t } => s.abs() < s1.radius - slack && t.abs() < s2.radius - slack,
        Crossing::Collinear { offset } => {
            s1.radius > T::zero() && s2.radius > T::zero() && collinear_overlap(s1.radius, s2.radius, offset) > slack
        }
        Crossing::Disjoint => false,
    }
}

/// `S₁ ∩ S₂ ≠ ∅` for the closed segments, with slack `tol · scale`.
pub fn segments_touch<T: Scalar>(s1: &Segment<T>, s2: &Segment<T>, tol: T) -> bool {
    let (c, scale) = crossing(s1, s2);
    let slack = tol * scale;
    match c {
        Crossing::Point { s, t } => s.abs() <= s1.radius + slack && t.abs() <= s2.radius + slack,
        Crossing::Collinear { offset } => collinear_overlap(s1.radius, s2.radius, offset) >= -slack,
        Crossing::Disjoint => false,
    }
}
