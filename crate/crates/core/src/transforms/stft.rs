//! Short-time Fourier transform V_φ f(x, ξ) in one variable, by direct
//! quadrature and through the sheared tensor product U(f ⊗ φ̄).

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermite::{gauss_hermite_rule, HermiteExpansion, SampledFunction};
use crate::scalar::Real;

/// Values on a uniform (x, ξ) lattice, x varying slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid<T> {
    x_axis: Vec<T>,
    xi_axis: Vec<T>,
    values: Vec<Complex<T>>,
}

fn check_axis<T: Real>(axis: &[T], name: &str) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidInput(format!("{name} axis is empty")));
    }
    if axis.len() > 1 {
        let step = axis[1] - axis[0];
        if !(step > T::zero()) {
            return Err(Error::InvalidInput(format!("{name} axis is not increasing")));
        }
        let slack = T::lit(1e-9) * (step + axis[0].abs().max(axis[axis.len() - 1].abs()));
        for w in axis.windows(2) {
            if ((w[1] - w[0]) - step).abs() > slack {
                return Err(Error::InvalidInput(format!("{name} axis is not uniform")));
            }
        }
    }
    Ok(())
}

impl<T: Real> PhaseGrid<T> {
    /// An all-zero table on the given axes.
    pub fn new(x_axis: Vec<T>, xi_axis: Vec<T>) -> Result<Self> {
        check_axis(&x_axis, "x")?;
        check_axis(&xi_axis, "xi")?;
        let values = vec![Complex::new(T::zero(), T::zero()); x_axis.len() * xi_axis.len()];
        Ok(Self { x_axis, xi_axis, values })
    }

    /// n_x points on [x_lo, x_hi] and n_ξ points on [ξ_lo, ξ_hi], endpoints included.
    pub fn uniform(x_lo: T, x_hi: T, nx: usize, xi_lo: T, xi_hi: T, nxi: usize) -> Result<Self> {
        Self::new(linspace(x_lo, x_hi, nx), linspace(xi_lo, xi_hi, nxi))
    }

    pub fn x_axis(&self) -> &[T] {
        &self.x_axis
    }

    pub fn xi_axis(&self) -> &[T] {
        &self.xi_axis
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn get(&self, ix: usize, ixi: usize) -> Complex<T> {
        self.values[ix * self.xi_axis.len() + ixi]
    }

    /// Same axes, new values computed row by row in parallel.
    fn fill<F>(&self, row: F) -> Self
    where
        F: Fn(T) -> Vec<Complex<T>> + Sync,
    {
        let values = self.x_axis.par_iter().flat_map_iter(|&x| row(x)).collect();
        Self { x_axis: self.x_axis.clone(), xi_axis: self.xi_axis.clone(), values }
    }

    /// max |self − other| over the grid.
    pub fn max_deviation(&self, other: &Self) -> Result<T> {
        if self.x_axis != other.x_axis || self.xi_axis != other.xi_axis {
            return Err(Error::InvalidInput("phase grids have different axes".into()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.x_axis != other.x_axis || self.xi_axis != other.xi_axis {
            return Err(Error::InvalidInput("phase grids have different axes".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { x_axis: self.x_axis.clone(), xi_axis: self.xi_axis.clone(), values })
    }
}

fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / T::from_usize_lossy(n - 1);
    (0..n).map(|k| lo + step * T::from_usize_lossy(k)).collect()
}

fn check_window<T: Real>(f: &SampledFunction<T>, window: &HermiteExpansion<T>) -> Result<()> {
    if window.is_zero() {
        return Err(Error::ZeroWindow);
    }
    if f.dim() != 1 || window.dim() != 1 {
        return Err(Error::DimMismatch { expected: 1, got: if f.dim() != 1 { f.dim() } else { window.dim() } });
    }
    Ok(())
}

/// (2π)^{-1/2} Σ_k w̃_k g_k e^{−i y_k ξ} for every ξ on the axis.
fn fourier_row<T: Real>(nodes: &[T], weighted: &[Complex<T>], xi_axis: &[T]) -> Vec<Complex<T>> {
    let norm = T::one() / T::TAU().sqrt();
    xi_axis
        .iter()
        .map(|&xi| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (&y, &g) in nodes.iter().zip(weighted) {
                let p = y * xi;
                acc += g * Complex::new(p.cos(), -p.sin());
            }
            acc * norm
        })
        .collect()
}

/// V_φ f(x, ξ) = (2π)^{-1/2} ∫ f(y) φ(y−x)‾ e^{−iyξ} dy by `n_quad`-point
/// Gauss–Hermite quadrature.
pub fn stft_direct<T: Real>(
    f: &SampledFunction<T>,
    window: &HermiteExpansion<T>,
    grid: &PhaseGrid<T>,
    n_quad: usize,
) -> Result<PhaseGrid<T>> {
    check_window(f, window)?;
    let rule = gauss_hermite_rule::<T>(n_quad)?;
    let fy: Vec<Complex<T>> = rule.nodes().iter().map(|&y| f.eval(&[y])).collect();
    Ok(grid.fill(|x| {
        let weighted: Vec<Complex<T>> = rule
            .nodes()
            .iter()
            .zip(rule.scaled_weights())
            .zip(&fy)
            .map(|((&y, &w), &v)| v * window.synthesize(&[y - x]).conj() * w)
            .collect();
        fourier_row(rule.nodes(), &weighted, grid.xi_axis())
    }))
}

/// (UF)(x, y) = F(y, y − x) for F on ℝ^{d} × ℝ^{d}.
///
/// U has order six: U³F(x, y) = F(−x, −y).
pub fn apply_u<T: Real>(field: &SampledFunction<T>) -> Result<SampledFunction<T>> {
    let dim = field.dim();
    if !dim.is_multiple_of(2) {
        return Err(Error::DimMismatch { expected: dim + 1, got: dim });
    }
    let half = dim / 2;
    let field = field.clone();
    Ok(SampledFunction::new(dim, move |xy| {
        let (x, y) = xy.split_at(half);
        let mut p = Vec::with_capacity(2 * half);
        p.extend_from_slice(y);
        p.extend(y.iter().zip(x).map(|(&b, &a)| b - a));
        field.eval(&p)
    }))
}

/// ℱ₂(U(f ⊗ φ̄))(x, ξ): the tensor field is sheared by U and then Fourier
/// transformed in the second variable by quadrature.
pub fn stft_tensor_route<T: Real>(
    f: &SampledFunction<T>,
    window: &HermiteExpansion<T>,
    grid: &PhaseGrid<T>,
    n_quad: usize,
) -> Result<PhaseGrid<T>> {
    check_window(f, window)?;
    let field = f.tensor(&SampledFunction::from_expansion(window).conj());
    let sheared = apply_u(&field)?;
    let rule = gauss_hermite_rule::<T>(n_quad)?;
    Ok(grid.fill(|x| {
        let weighted: Vec<Complex<T>> = rule
            .nodes()
            .iter()
            .zip(rule.scaled_weights())
            .map(|(&y, &w)| sheared.eval(&[x, y]) * w)
            .collect();
        fourier_row(rule.nodes(), &weighted, grid.xi_axis())
    }))
}
