//! Truncated Hermite expansions f = Σ_{|α|≤N} c_α h_α and the operators
//! that act on their coefficient tables.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result, Warning};
use crate::hermite::functions::{hermite_functions, MAX_AXIS_DEGREE};
use crate::hermite::quadrature::gauss_hermite_rule;
use crate::hermite::sampled::SampledFunction;
use crate::multiindex::{GradedLayout, MultiIndex};
use crate::scalar::{re, Real};

type LayoutCache = Mutex<HashMap<(usize, usize), Arc<GradedLayout>>>;

/// Layouts are shared between every expansion of the same shape.
pub(crate) fn shared_layout(dim: usize, degree: usize) -> Arc<GradedLayout> {
    static CACHE: OnceLock<LayoutCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().expect("layout cache poisoned");
    guard
        .entry((dim, degree))
        .or_insert_with(|| GradedLayout::new(dim, degree))
        .clone()
}

/// A coefficient table over {α ∈ ℕ^d : |α| ≤ N}, stored in graded order.
#[derive(Debug, Clone)]
pub struct HermiteExpansion<T> {
    layout: Arc<GradedLayout>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> PartialEq for HermiteExpansion<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.degree() == other.degree() && self.coeffs == other.coeffs
    }
}

/// Multiplication by a coordinate or differentiation along it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    MultiplyByX,
    Differentiate,
}

impl<T: Real> HermiteExpansion<T> {
    pub fn zeros(dim: usize, degree: usize) -> Self {
        let layout = shared_layout(dim, degree);
        let coeffs = vec![Complex::new(T::zero(), T::zero()); layout.len()];
        Self { layout, coeffs }
    }

    /// The single basis element h_α, truncated at degree |α|.
    pub fn basis(alpha: &MultiIndex) -> Self {
        let mut f = Self::zeros(alpha.dim(), alpha.order());
        f.set(alpha, re(T::one()));
        f
    }

    pub fn from_fn<F>(dim: usize, degree: usize, mut coeff: F) -> Self
    where
        F: FnMut(&MultiIndex) -> Complex<T>,
    {
        let layout = shared_layout(dim, degree);
        let coeffs = layout.indices().iter().map(&mut coeff).collect();
        Self { layout, coeffs }
    }

    /// Builds from sparse (α, c) pairs; the degree is the largest |α| seen
    /// unless `degree` forces a larger one.
    pub fn from_terms<I>(dim: usize, degree: Option<usize>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Complex<T>)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        let top = terms.iter().map(|(a, _)| a.order()).max().unwrap_or(0);
        let degree = degree.unwrap_or(top);
        if top > degree {
            return Err(Error::InvalidInput(format!("term of degree {top} above truncation {degree}")));
        }
        let mut f = Self::zeros(dim, degree);
        for (alpha, c) in terms {
            if alpha.dim() != dim {
                return Err(Error::DimMismatch { expected: dim, got: alpha.dim() });
            }
            let i = f.layout.rank(&alpha).expect("in range");
            f.coeffs[i] += c;
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn degree(&self) -> usize {
        self.layout.degree()
    }

    pub fn layout(&self) -> &GradedLayout {
        &self.layout
    }

    pub fn indices(&self) -> &[MultiIndex] {
        self.layout.indices()
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Complex<T>)> {
        self.layout.indices().iter().zip(&self.coeffs)
    }

    /// c_α, zero outside the stored range.
    pub fn get(&self, alpha: &MultiIndex) -> Complex<T> {
        self.layout
            .rank(alpha)
            .map(|i| self.coeffs[i])
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    /// # Panics
    /// If |α| exceeds the truncation degree or the dimension differs.
    pub fn set(&mut self, alpha: &MultiIndex, value: Complex<T>) {
        let i = self.layout.rank(alpha).unwrap_or_else(|| {
            panic!("{alpha} outside expansion of dim {} degree {}", self.dim(), self.degree())
        });
        self.coeffs[i] = value;
    }

    pub fn map_coeffs<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&MultiIndex, Complex<T>) -> Complex<T>,
    {
        let coeffs = self.iter().map(|(a, &c)| f(a, c)).collect();
        Self { layout: self.layout.clone(), coeffs }
    }

    pub fn scale(&self, lambda: Complex<T>) -> Self {
        self.map_coeffs(|_, c| c * lambda)
    }

    pub fn conj(&self) -> Self {
        self.map_coeffs(|_, c| c.conj())
    }

    /// Re-truncates at `degree`, padding with zeros or dropping high shells.
    pub fn with_degree(&self, degree: usize) -> Self {
        if degree == self.degree() {
            return self.clone();
        }
        Self::from_fn(self.dim(), degree, |a| self.get(a))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), got: other.dim() });
        }
        let degree = self.degree().max(other.degree());
        Ok(Self::from_fn(self.dim(), degree, |a| self.get(a) + other.get(a)))
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().map(|c| c.norm()).fold(T::zero(), T::max)
    }

    /// max_{|α| = k} |c_α|.
    pub fn shell_max(&self, k: usize) -> T {
        if k > self.degree() {
            return T::zero();
        }
        self.coeffs[self.layout.shell(k)]
            .iter()
            .map(|c| c.norm())
            .fold(T::zero(), T::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == T::zero() && c.im == T::zero())
    }

    /// Zeroes coefficients whose magnitude is below `rel` times the largest.
    pub fn denoise(&self, rel: T) -> Self {
        let floor = rel * self.max_abs();
        self.map_coeffs(|_, c| if c.norm() < floor { Complex::new(T::zero(), T::zero()) } else { c })
    }

    /// Σ_{|α|≤N} c_α h_α(x).
    pub fn synthesize(&self, x: &[T]) -> Complex<T> {
        assert_eq!(x.len(), self.dim(), "point dimension");
        let tables: Vec<Vec<T>> = x.iter().map(|&xj| hermite_functions(self.degree(), xj)).collect();
        self.synthesize_with(&tables)
    }

    /// Synthesis from precomputed per-axis tables h_0..h_M(x_j), M ≥ N.
    pub(crate) fn synthesize_with(&self, tables: &[Vec<T>]) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (alpha, &c) in self.iter() {
            let mut basis = T::one();
            for (axis, &a) in alpha.entries().iter().enumerate() {
                basis *= tables[axis][a as usize];
            }
            acc += c * basis;
        }
        acc
    }

    pub fn synthesize_many(&self, points: &[Vec<T>]) -> Vec<Complex<T>> {
        points.par_iter().map(|p| self.synthesize(p)).collect()
    }

    /// Applies x_j· or ∂_{x_j}; the result has degree N+1.
    ///
    /// x h_n = √(n/2) h_{n-1} + √((n+1)/2) h_{n+1},
    /// h_n' = √(n/2) h_{n-1} − √((n+1)/2) h_{n+1}.
    pub fn apply_ladder(&self, axis: usize, kind: Ladder) -> Result<Self> {
        if axis >= self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), got: axis + 1 });
        }
        let degree = self.degree() + 1;
        check_degree(degree)?;
        let mut out = Self::zeros(self.dim(), degree);
        let half = T::lit(0.5);
        let raise_sign = match kind {
            Ladder::MultiplyByX => T::one(),
            Ladder::Differentiate => -T::one(),
        };
        for (alpha, &c) in self.iter() {
            let n = T::from_usize_lossy(alpha.get(axis) as usize);
            if let Some(lower) = alpha.shifted(axis, -1) {
                let i = out.layout.rank(&lower).expect("lower shell in range");
                out.coeffs[i] += c * (n * half).sqrt();
            }
            let upper = alpha.shifted(axis, 1).expect("raising never underflows");
            let i = out.layout.rank(&upper).expect("upper shell in range");
            out.coeffs[i] += c * (raise_sign * ((n + T::one()) * half).sqrt());
        }
        Ok(out)
    }

    /// H_d^p with H_d = |x|² − Δ, acting as c_α ↦ (2|α| + d)^p c_α.
    pub fn apply_oscillator(&self, power: u32) -> Self {
        let d = self.dim();
        self.map_coeffs(|a, c| {
            let lambda = T::from_usize_lossy(2 * a.order() + d);
            c * lambda.powi(power as i32)
        })
    }

    /// Warns when the top degree shell is not negligible.
    pub fn check_resolution(&self, tolerance: f64) -> Option<Warning> {
        let tail = self.shell_max(self.degree()).to_f64_lossy();
        (tail > tolerance).then_some(Warning::QuadratureUnderResolved { tail, tolerance })
    }
}

/// Rejects truncation degrees above [`MAX_AXIS_DEGREE`].
pub fn check_degree(degree: usize) -> Result<()> {
    if degree > MAX_AXIS_DEGREE {
        Err(Error::DegreeCap { degree, cap: MAX_AXIS_DEGREE })
    } else {
        Ok(())
    }
}

/// c_α ≈ (f, h_α)_{L²} by the `n_quad`-point Gauss–Hermite product rule.
///
/// The d-dimensional sum is factored axis by axis, so the cost is
/// O(n^d (N+1) d) rather than O(n^d · #α).
pub fn analyze<T: Real>(f: &SampledFunction<T>, degree: usize, n_quad: usize) -> Result<HermiteExpansion<T>> {
    check_degree(degree)?;
    if n_quad < degree + 1 {
        return Err(Error::InvalidInput(format!(
            "{n_quad} quadrature nodes cannot resolve degree {degree}; need at least {}",
            degree + 1
        )));
    }
    let dim = f.dim();
    let rule = gauss_hermite_rule::<T>(n_quad)?;
    let n = rule.len();
    let basis: Vec<Vec<T>> = rule.nodes().iter().map(|&x| hermite_functions(degree, x)).collect();

    // weighted samples on the product grid, axis 0 slowest
    let total = n.pow(dim as u32);
    let samples: Vec<Complex<T>> = (0..total)
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
            f.eval(&point) * w
        })
        .collect();

    // contract one axis at a time: length n → N+1
    let m = degree + 1;
    let mut shape = vec![n; dim];
    let mut data = samples;
    for axis in 0..dim {
        let outer: usize = shape[..axis].iter().product();
        let inner: usize = shape[axis + 1..].iter().product();
        let len = shape[axis];
        let mut next = vec![Complex::new(T::zero(), T::zero()); outer * m * inner];
        next.par_chunks_mut(m * inner).enumerate().for_each(|(o, block)| {
            for (i, row) in basis.iter().enumerate().take(len) {
                let src = &data[(o * len + i) * inner..(o * len + i + 1) * inner];
                for (k, &h) in row.iter().enumerate() {
                    let dst = &mut block[k * inner..(k + 1) * inner];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += *s * h;
                    }
                }
            }
        });
        shape[axis] = m;
        data = next;
    }

    Ok(HermiteExpansion::from_fn(dim, degree, |alpha| {
        let flat = alpha.entries().iter().fold(0usize, |acc, &a| acc * m + a as usize);
        data[flat]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::functions::hermite_function;
    use std::f64::consts::{PI, SQRT_2};

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn analyze_basis_function() {
        let f = analyze(&SampledFunction::hermite([3].into()), 8, 16).unwrap();
        for (alpha, c) in f.iter() {
            let want = if alpha.get(0) == 3 { 1.0 } else { 0.0 };
            assert!((c - want).norm() < 1e-10, "{alpha}: {c}");
        }
    }

    #[test]
    fn analyze_ground_state() {
        let g = SampledFunction::<f64>::real(1, |x| PI.powf(-0.25) * (-x[0] * x[0] / 2.0).exp());
        let f = analyze(&g, 8, 16).unwrap();
        assert!((f.get(&[0].into()) - 1.0).norm() < 1e-10);
        for k in 1..=8 {
            assert!(f.get(&[k].into()).norm() < 1e-10);
        }
    }

    #[test]
    fn analyze_x_times_ground_state() {
        let g = SampledFunction::<f64>::real(1, |x| x[0] * hermite_function(0, x[0]));
        let f = analyze(&g, 4, 10).unwrap();
        assert!((f.get(&[1].into()) - 1.0 / SQRT_2).norm() < 1e-10);
        for k in [0, 2, 3, 4] {
            assert!(f.get(&[k].into()).norm() < 1e-10);
        }
    }

    #[test]
    fn analyze_needs_enough_nodes() {
        let g = SampledFunction::<f64>::hermite([0].into());
        assert!(matches!(analyze(&g, 8, 8), Err(Error::InvalidInput(_))));
        assert!(matches!(analyze(&g, 600, 700), Err(Error::DegreeCap { .. })));
    }

    #[test]
    fn analyze_three_dimensional_product() {
        let g = SampledFunction::<f64>::hermite([1, 0, 2].into());
        let f = analyze(&g, 4, 8).unwrap();
        for (alpha, c) in f.iter() {
            let want = if alpha == &MultiIndex::from([1, 0, 2]) { 1.0 } else { 0.0 };
            assert!((c - want).norm() < 1e-12);
        }
    }

    #[test]
    fn synthesize_examples() {
        let f = HermiteExpansion::basis(&[0].into());
        assert!((f.synthesize(&[0.0]) - PI.powf(-0.25)).norm() < 1e-15);

        let g = analyze(&SampledFunction::hermite([2].into()), 6, 12).unwrap();
        assert!((g.synthesize(&[0.7]) - hermite_function(2, 0.7)).norm() < 1e-10);

        let h = HermiteExpansion::from_terms(1, None, [([0].into(), c(1.0)), ([2].into(), c(0.5))]).unwrap();
        // direct evaluation: h_0(0) = π^{-1/4}, h_2(0) = −π^{-1/4}/√2
        let h0 = PI.powf(-0.25);
        let want = h0 + 0.5 * (-h0 / SQRT_2);
        assert!((h.synthesize(&[0.0]) - want).norm() < 1e-15);
    }

    #[test]
    fn ladder_examples() {
        let f = HermiteExpansion::<f64>::basis(&[0].into());
        let x = f.apply_ladder(0, Ladder::MultiplyByX).unwrap();
        assert_eq!(x.degree(), 1);
        assert!((x.get(&[1].into()) - 1.0 / SQRT_2).norm() < 1e-15);
        assert_eq!(x.get(&[0].into()), c(0.0));

        let d = f.apply_ladder(0, Ladder::Differentiate).unwrap();
        assert!((d.get(&[1].into()) + 1.0 / SQRT_2).norm() < 1e-15);

        // (∂² − x²) h_0 = −H h_0 = −h_0
        let dd = d.apply_ladder(0, Ladder::Differentiate).unwrap();
        let xx = x.apply_ladder(0, Ladder::MultiplyByX).unwrap();
        let diff = dd.add(&xx.scale(c(-1.0))).unwrap();
        assert!((diff.get(&[0].into()) + 1.0).norm() < 1e-14);
        for k in 1..=2 {
            assert!(diff.get(&[k].into()).norm() < 1e-14);
        }
    }

    #[test]
    fn ladder_axis_checked() {
        let f = HermiteExpansion::<f64>::basis(&[0, 1].into());
        assert!(f.apply_ladder(2, Ladder::Differentiate).is_err());
    }

    #[test]
    fn oscillator_examples() {
        let f = HermiteExpansion::<f64>::basis(&[3].into()).apply_oscillator(1);
        assert_eq!(f.get(&[3].into()), c(7.0));
        let f = HermiteExpansion::<f64>::basis(&[0, 0].into()).apply_oscillator(1);
        assert_eq!(f.get(&[0, 0].into()), c(2.0));
        let f = HermiteExpansion::<f64>::basis(&[2].into()).apply_oscillator(3);
        assert_eq!(f.get(&[2].into()), c(125.0));
    }

    #[test]
    fn resolution_warning() {
        let f = HermiteExpansion::from_terms(1, Some(4), [([4].into(), c(1e-3))]).unwrap();
        assert!(f.check_resolution(1e-12).is_some());
        assert!(f.check_resolution(1e-2).is_none());
    }

    #[test]
    fn single_precision_round_trip() {
        let f = analyze(&SampledFunction::<f32>::hermite([2].into()), 6, 12).unwrap();
        assert!((f.get(&[2].into()).re - 1.0).abs() < 1e-5);
    }
}
