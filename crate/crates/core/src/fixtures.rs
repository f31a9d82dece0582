//! Small hand-checked configurations with known solutions.

use crate::geometry::MarkedPoint;
use crate::pointprocess::MarkedPointSet;
use crate::scalar::Scalar;

fn set<T: Scalar>(raw: &[(f64, f64, f64)]) -> MarkedPointSet<T> {
    let points = raw
        .iter()
        .map(|&(x, y, t)| MarkedPoint::new(T::of(x), T::of(y), T::of(t)).expect("fixture points are valid"))
        .collect();
    MarkedPointSet::user(points).expect("fixture germs are distinct")
}

/// Two germs: a horizontal line at the origin and a vertical one at (3, 4).
///
/// `d_01 = 3`, `d_10 = 4`. Model 1 radii `{∞, 4}`; Model 2 `{4, 4}`, a doublet.
pub fn f2<T: Scalar>() -> MarkedPointSet<T> {
    set(&[(0.0, 0.0, 0.0), (3.0, 4.0, std::f64::consts::FRAC_PI_2)])
}

/// Three germs with one infinite segment in either model.
///
/// `d_01 = 4`, `d_10 = 3`, `d_02 = 6`, `d_20 = 3√2`, `d_12 = 5`, `d_21 = 5√2`.
/// Model 1 radii `{4, ∞, 5√2}` with `J = {0→1, 2→1}`; Model 2 `{4, 4, ∞}`.
pub fn f3<T: Scalar>() -> MarkedPointSet<T> {
    set(&[
        (0.0, 0.0, 0.0),
        (4.0, 3.0, std::f64::consts::FRAC_PI_2),
        (9.0, 3.0, std::f64::consts::FRAC_PI_4),
    ])
}

/// Three germs stopping each other cyclically under Model 1.
///
/// `d_01 = 10`, `d_10 = 3√2`, `d_12 = 5√2`, `d_21 = 3`, `d_20 = 5`, `d_02 = 2`.
/// Model 1 radii `{10, 5√2, 5}` on the cycle `0→1→2→0`; Model 2 radii
/// `{5, 5√2, 5}` with the doublet `{0, 2}`.
pub fn f3_cycle<T: Scalar>() -> MarkedPointSet<T> {
    set(&[
        (2.0, 0.0, 0.0),
        (-5.0, 3.0, std::f64::consts::FRAC_PI_4),
        (0.0, 5.0, std::f64::consts::FRAC_PI_2),
    ])
}
