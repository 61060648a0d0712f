use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::hermite::expansion::HermiteExpansion;
use crate::hermite::functions::hermite_functions;
use crate::multiindex::MultiIndex;
use crate::scalar::{re, Real};

type Evaluator<T> = dyn Fn(&[T]) -> Complex<T> + Send + Sync;

/// A complex-valued function on ℝ^d given by an evaluator closure; the
/// input to quadrature-based routines.
#[derive(Clone)]
pub struct SampledFunction<T: Real> {
    dim: usize,
    eval: Arc<Evaluator<T>>,
    decay_hint: Option<f64>,
}

impl<T: Real> fmt::Debug for SampledFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledFunction")
            .field("dim", &self.dim)
            .field("decay_hint", &self.decay_hint)
            .finish_non_exhaustive()
    }
}

impl<T: Real> SampledFunction<T> {
    pub fn new<F>(dim: usize, eval: F) -> Self
    where
        F: Fn(&[T]) -> Complex<T> + Send + Sync + 'static,
    {
        Self { dim, eval: Arc::new(eval), decay_hint: None }
    }

    pub fn real<F>(dim: usize, eval: F) -> Self
    where
        F: Fn(&[T]) -> T + Send + Sync + 'static,
    {
        Self::new(dim, move |x| re(eval(x)))
    }

    /// Records an exponential decay rate, in the units of |x|^{1/s}.
    pub fn with_decay_hint(mut self, rate: f64) -> Self {
        self.decay_hint = Some(rate);
        self
    }

    pub fn decay_hint(&self) -> Option<f64> {
        self.decay_hint
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn eval(&self, x: &[T]) -> Complex<T> {
        debug_assert_eq!(x.len(), self.dim);
        (self.eval)(x)
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(dim, |_| Complex::new(T::zero(), T::zero()))
    }

    /// The Hermite function h_α.
    pub fn hermite(alpha: MultiIndex) -> Self {
        let dim = alpha.dim();
        Self::real(dim, move |x| {
            alpha
                .entries()
                .iter()
                .zip(x)
                .map(|(&a, &xj)| hermite_functions(a as usize, xj)[a as usize])
                .fold(T::one(), |acc, v| acc * v)
        })
        .with_decay_hint(0.5)
    }

    /// e^{-a|x|²}.
    pub fn gaussian(a: T, dim: usize) -> Self {
        Self::real(dim, move |x| {
            let r2: T = x.iter().map(|&v| v * v).sum();
            (-a * r2).exp()
        })
        .with_decay_hint(a.to_f64_lossy())
    }

    /// Pointwise evaluation of a truncated expansion.
    pub fn from_expansion(f: &HermiteExpansion<T>) -> Self {
        let f = f.clone();
        Self::new(f.dim(), move |x| f.synthesize(x))
    }

    pub fn conj(&self) -> Self {
        let inner = self.eval.clone();
        Self { dim: self.dim, eval: Arc::new(move |x| inner(x).conj()), decay_hint: self.decay_hint }
    }

    pub fn scale(&self, lambda: Complex<T>) -> Self {
        let inner = self.eval.clone();
        Self { dim: self.dim, eval: Arc::new(move |x| inner(x) * lambda), decay_hint: self.decay_hint }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in sum");
        let (a, b) = (self.eval.clone(), other.eval.clone());
        Self::new(self.dim, move |x| a(x) + b(x))
    }

    /// (f ⊗ g)(x, y) = f(x) g(y).
    pub fn tensor(&self, other: &Self) -> Self {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let d1 = self.dim;
        Self::new(self.dim + other.dim, move |xy| a(&xy[..d1]) * b(&xy[d1..]))
    }
}
