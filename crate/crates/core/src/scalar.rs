//! Floating-point scalar abstraction shared by the geometric core.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the geometry, solvers and structure analysis are generic over.
///
/// Growth distances are obtained from a 2x2 solve plus trigonometry, so the
/// model has no exact (rational) instantiation; `f32` and `f64` are provided.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Default tolerances calibrated to the type's precision.
    fn default_tolerances() -> Tolerances<Self>;

    /// Lossy conversion from `f64`; used for literals and file input.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("f64 is representable in every Scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Numerical tolerances used by predicates and checks.
///
/// `parallel` is an absolute bound on `|sin(θ₁ − θ₂)|`. `contact` and `tie`
/// are relative to the local length scale `max(1, |Pᵢ|, |Pⱼ|)` (or, for ties,
/// `max(1, a, b)` of the two compared distances).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    pub parallel: T,
    pub contact: T,
    pub tie: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        T::default_tolerances()
    }
}

impl Scalar for f64 {
    fn default_tolerances() -> Tolerances<Self> {
        Tolerances {
            parallel: 1e-12,
            contact: 1e-9,
            tie: 1e-9,
        }
    }
}

impl Scalar for f32 {
    fn default_tolerances() -> Tolerances<Self> {
        Tolerances {
            parallel: 1e-6,
            contact: 1e-4,
            tie: 1e-4,
        }
    }
}

/// `|a - b| <= tol * max(1, |a|, |b|)`; infinities only match themselves.
pub(crate) fn approx_eq<T: Scalar>(a: T, b: T, tol: T) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= tol * T::one().max(a.abs()).max(b.abs())
}
