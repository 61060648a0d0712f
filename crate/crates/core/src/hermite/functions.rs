//! Normalized Hermite functions by three-term recurrence.
//!
//! h_0(x) = π^{-1/4} e^{-x²/2},
//! h_{n+1}(x) = x √(2/(n+1)) h_n(x) − √(n/(n+1)) h_{n-1}(x).
//!
//! The Gaussian factor is carried as a separate logarithm whenever it would
//! underflow, so the recurrence stays finite for large |x| in both `f32` and
//! `f64`.

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::scalar::Real;

/// Largest per-axis order accepted by the evaluators.
pub const MAX_AXIS_DEGREE: usize = 512;

/// Recurrence state with an explicit log scale: h_k = mantissa_k · e^{scale}.
pub(crate) struct ScaledPair<T> {
    pub prev: T,
    pub curr: T,
    pub ln_scale: T,
}

fn rescale_threshold<T: Real>() -> T {
    T::max_value().sqrt().sqrt()
}

/// Runs the recurrence up to order `n` and returns (h̃_{n-1}, h̃_n, ln scale).
/// For n = 0 the `prev` slot holds 0.
pub(crate) fn scaled_pair<T: Real>(n: usize, x: T) -> ScaledPair<T> {
    let two = T::lit(2.0);
    let mut ln_scale = -x * x / two;
    let mut prev = T::zero();
    let mut curr = T::one() / T::PI().sqrt().sqrt();
    let big = rescale_threshold::<T>();
    for k in 0..n {
        let kf = T::from_usize_lossy(k);
        let next = x * (two / (kf + T::one())).sqrt() * curr - (kf / (kf + T::one())).sqrt() * prev;
        prev = curr;
        curr = next;
        if curr.abs() > big {
            prev /= big;
            curr /= big;
            ln_scale += big.ln();
        }
    }
    ScaledPair { prev, curr, ln_scale }
}

#[inline]
fn unscale<T: Real>(mantissa: T, ln_scale: T) -> T {
    if mantissa == T::zero() {
        return T::zero();
    }
    let mag = (mantissa.abs().ln() + ln_scale).exp();
    if mantissa < T::zero() {
        -mag
    } else {
        mag
    }
}

/// Values h_0(x), …, h_nmax(x).
pub fn hermite_functions<T: Real>(nmax: usize, x: T) -> Vec<T> {
    let two = T::lit(2.0);
    let mut out = Vec::with_capacity(nmax + 1);
    let gauss_exponent = -x * x / two;
    // direct path when e^{-x²/2} is comfortably representable
    let floor = T::min_positive_value().ln() + T::lit(30.0);
    let h0_norm = T::one() / T::PI().sqrt().sqrt();
    if gauss_exponent > floor {
        let mut prev = T::zero();
        let mut curr = h0_norm * gauss_exponent.exp();
        out.push(curr);
        for k in 0..nmax {
            let kf = T::from_usize_lossy(k);
            let next = x * (two / (kf + T::one())).sqrt() * curr - (kf / (kf + T::one())).sqrt() * prev;
            prev = curr;
            curr = next;
            out.push(curr);
        }
        return out;
    }
    let big = rescale_threshold::<T>();
    let mut ln_scale = gauss_exponent;
    let mut prev = T::zero();
    let mut curr = h0_norm;
    out.push(unscale(curr, ln_scale));
    for k in 0..nmax {
        let kf = T::from_usize_lossy(k);
        let next = x * (two / (kf + T::one())).sqrt() * curr - (kf / (kf + T::one())).sqrt() * prev;
        prev = curr;
        curr = next;
        if curr.abs() > big {
            prev /= big;
            curr /= big;
            ln_scale += big.ln();
        }
        out.push(unscale(curr, ln_scale));
    }
    out
}

/// h_n(x) for a single order.
pub fn hermite_function<T: Real>(n: usize, x: T) -> T {
    let p = scaled_pair(n, x);
    unscale(p.curr, p.ln_scale)
}

/// h_α(x) = ∏_j h_{α_j}(x_j).
pub fn hermite_eval<T: Real>(alpha: &MultiIndex, x: &[T]) -> Result<T> {
    if alpha.dim() != x.len() {
        return Err(Error::DimMismatch { expected: alpha.dim(), got: x.len() });
    }
    if let Some(&a) = alpha.entries().iter().find(|&&a| a as usize > MAX_AXIS_DEGREE) {
        return Err(Error::DegreeCap { degree: a as usize, cap: MAX_AXIS_DEGREE });
    }
    Ok(alpha
        .entries()
        .iter()
        .zip(x)
        .map(|(&a, &xj)| hermite_function(a as usize, xj))
        .fold(T::one(), |acc, v| acc * v))
}
