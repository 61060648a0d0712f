//! Fourier, short-time Fourier and Bargmann transforms.
//!
//! The Fourier transform is normalized as
//! ℱf(ξ) = (2π)^{-d/2} ∫ f(x) e^{-i⟨x,ξ⟩} dx.

mod bargmann;
mod stft;

pub use bargmann::{
    a_space_growth_check, bargmann, bargmann_expansion, bargmann_identity_check, polar_points, BargmannSamples,
    GrowthCheck, IdentityErrors,
};
pub use stft::{apply_u, stft_direct, stft_tensor_route, PhaseGrid};

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermite::{gauss_hermite_rule, HermiteExpansion, QuadratureRule, SampledFunction};
use crate::scalar::Real;

/// (−i)^k.
pub fn minus_i_pow<T: Real>(k: usize) -> Complex<T> {
    match k % 4 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), -T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), T::one()),
    }
}

/// ℱ on coefficients: c_α ↦ (−i)^{|α|} c_α.
pub fn fourier<T: Real>(f: &HermiteExpansion<T>) -> HermiteExpansion<T> {
    f.map_coeffs(|a, c| c * minus_i_pow::<T>(a.order()))
}

/// ℱ_k, the Fourier transform in the k-th coordinate block only.
pub fn partial_fourier<T: Real>(f: &HermiteExpansion<T>, block: usize, block_dims: &[usize]) -> Result<HermiteExpansion<T>> {
    let total: usize = block_dims.iter().sum();
    if total != f.dim() {
        return Err(Error::BlockMismatch { expected: total, got: f.dim() });
    }
    if block >= block_dims.len() {
        return Err(Error::InvalidInput(format!("block {block} of {}", block_dims.len())));
    }
    let start: usize = block_dims[..block].iter().sum();
    let range = start..start + block_dims[block];
    Ok(f.map_coeffs(|a, c| {
        let k: u32 = a.entries()[range.clone()].iter().sum();
        c * minus_i_pow::<T>(k as usize)
    }))
}

/// y ↦ f(y − x₀).
pub fn translate<T: Real>(f: &SampledFunction<T>, x0: &[T]) -> Result<SampledFunction<T>> {
    if x0.len() != f.dim() {
        return Err(Error::DimMismatch { expected: f.dim(), got: x0.len() });
    }
    let (f, x0) = (f.clone(), x0.to_vec());
    Ok(SampledFunction::new(f.dim(), move |y| {
        let shifted: Vec<T> = y.iter().zip(&x0).map(|(&a, &b)| a - b).collect();
        f.eval(&shifted)
    }))
}

/// y ↦ f(y) e^{−i⟨y,ξ₀⟩}.
pub fn modulate<T: Real>(f: &SampledFunction<T>, xi0: &[T]) -> Result<SampledFunction<T>> {
    if xi0.len() != f.dim() {
        return Err(Error::DimMismatch { expected: f.dim(), got: xi0.len() });
    }
    let (f, xi0) = (f.clone(), xi0.to_vec());
    Ok(SampledFunction::new(f.dim(), move |y| {
        let phase: T = y.iter().zip(&xi0).map(|(&a, &b)| a * b).sum();
        f.eval(y) * Complex::new(phase.cos(), -phase.sin())
    }))
}

/// Σ over the d-fold product rule of w(y) g(y), with the rule's Gaussian
/// factor already folded into the weights. Terms are evaluated in parallel
/// and summed in a fixed order, so results do not depend on scheduling.
pub(crate) fn integrate_complex<T, G>(rule: &QuadratureRule<T>, dim: usize, g: G) -> Complex<T>
where
    T: Real,
    G: Fn(&[T]) -> Complex<T> + Sync,
{
    let n = rule.len();
    let total = n.pow(dim as u32);
    (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut point = vec![T::zero(); dim];
            let mut w = T::one();
            let mut rem = flat;
            for axis in (0..dim).rev() {
                let i = rem % n;
                rem /= n;
                point[axis] = rule.nodes()[i];
                w *= rule.scaled_weights()[i];
            }
            g(&point) * w
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
}

/// (2π)^{-d/2} ∫ f(y) e^{−i⟨y,ξ⟩} dy on the Gauss–Hermite rule for the
/// weight e^{−y²/2}, suited to f decaying like a Hermite function.
pub fn fourier_quadrature<T: Real>(f: &SampledFunction<T>, xi: &[T], n_quad: usize) -> Result<Complex<T>> {
    let dim = f.dim();
    if xi.len() != dim {
        return Err(Error::DimMismatch { expected: dim, got: xi.len() });
    }
    let rule = gauss_hermite_rule::<T>(n_quad)?.scaled(T::SQRT_2());
    let sum = integrate_complex(&rule, dim, |y| {
        let phase: T = y.iter().zip(xi).map(|(&a, &b)| a * b).sum();
        f.eval(y) * Complex::new(phase.cos(), -phase.sin())
    });
    Ok(sum * (T::TAU()).powf(-T::from_usize_lossy(dim) / T::lit(2.0)))
}
