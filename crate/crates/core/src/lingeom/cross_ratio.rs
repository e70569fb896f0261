use crate::error::{Error, Result};
use crate::scalar::Real;

/// Cross ratio `|x-b||y-a| / (|x-a||y-b|)` of four collinear points given by
/// their line parameters.
///
/// The endpoints may be infinite (`a = -inf`, `b = +inf`); the one-sided limits
/// are evaluated in closed form. `x` and `y` must lie strictly between `a`
/// and `b`; their relative order is free (swapping them inverts the ratio).
pub fn cross_ratio<T: Real>(a: T, x: T, y: T, b: T) -> Result<T> {
    let lo = x.min(y);
    let hi = x.max(y);
    if !(a < lo && hi < b) {
        return Err(Error::DegenerateConfiguration(format!("need a < x, y < b (a={a}, x={x}, y={y}, b={b})")));
    }
    let a_inf = !a.is_finite();
    let b_inf = !b.is_finite();
    let ratio = match (a_inf, b_inf) {
        (true, true) => T::one(),
        (true, false) => (x - b).abs() / (y - b).abs(),
        (false, true) => (y - a).abs() / (x - a).abs(),
        (false, false) => ((x - b).abs() * (y - a).abs()) / ((x - a).abs() * (y - b).abs()),
    };
    Ok(ratio)
}
