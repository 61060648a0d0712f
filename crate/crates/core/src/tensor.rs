//! Tensor products of expansions, the bilinear dual pairing, partial
//! pairings and their iteration over permuted blocks.

use std::sync::atomic::{AtomicUsize, Ordering};

use itertools::Itertools;
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermite::HermiteExpansion;
use crate::multiindex::{graded_enumerate, MultiIndex};
use crate::scalar::Real;

/// Default cap on the total degree N₁+N₂ of a tensor product.
pub const DEFAULT_TENSOR_DEGREE_CAP: usize = 64;

static TENSOR_DEGREE_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_TENSOR_DEGREE_CAP);

pub fn tensor_degree_cap() -> usize {
    TENSOR_DEGREE_CAP.load(Ordering::Relaxed)
}

/// Changes the process-wide cap used by [`tensor`].
pub fn set_tensor_degree_cap(cap: usize) {
    TENSOR_DEGREE_CAP.store(cap, Ordering::Relaxed);
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// f₁ ⊗ f₂ with c_{(α₁,α₂)} = c_{α₁}(f₁) c_{α₂}(f₂), of degree N₁+N₂.
pub fn tensor<T: Real>(f1: &HermiteExpansion<T>, f2: &HermiteExpansion<T>) -> Result<HermiteExpansion<T>> {
    let degree = f1.degree() + f2.degree();
    let cap = tensor_degree_cap();
    if degree > cap {
        return Err(Error::DegreeCap { degree, cap });
    }
    let mut out = HermiteExpansion::zeros(f1.dim() + f2.dim(), degree);
    for (a1, &c1) in f1.iter() {
        if c1 == zero() {
            continue;
        }
        for (a2, &c2) in f2.iter() {
            out.set(&MultiIndex::merge([a1, a2]), c1 * c2);
        }
    }
    Ok(out)
}

/// f₁ ⊗ ⋯ ⊗ f_n, n ≥ 2.
pub fn multilinear_tensor<T: Real>(factors: &[HermiteExpansion<T>]) -> Result<HermiteExpansion<T>> {
    if factors.len() < 2 {
        return Err(Error::InvalidInput(format!("need at least two factors, got {}", factors.len())));
    }
    factors[1..].iter().try_fold(factors[0].clone(), |acc, f| tensor(&acc, f))
}

/// Factors together with their tensor product.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorFactorization<T: Real> {
    pub factors: Vec<HermiteExpansion<T>>,
    pub product: HermiteExpansion<T>,
}

impl<T: Real> TensorFactorization<T> {
    pub fn new(factors: Vec<HermiteExpansion<T>>) -> Result<Self> {
        let product = multilinear_tensor(&factors)?;
        Ok(Self { factors, product })
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim()).collect()
    }

    /// max over the product table of |c_α − ∏ c_{α_j}(f_j)|.
    pub fn defect(&self) -> T {
        let dims = self.block_dims();
        self.product
            .iter()
            .map(|(alpha, &c)| {
                let blocks = alpha.split(&dims).expect("product dimension");
                let expected = blocks.iter().zip(&self.factors).fold(Complex::new(T::one(), T::zero()), |acc, (b, f)| {
                    acc * f.get(b)
                });
                (c - expected).norm()
            })
            .fold(T::zero(), T::max)
    }
}

/// ⟨f, φ⟩ = Σ_α c_α(f) c_α(φ) over the common index range. No conjugation.
pub fn pair<T: Real>(f: &HermiteExpansion<T>, phi: &HermiteExpansion<T>) -> Result<Complex<T>> {
    if f.dim() != phi.dim() {
        return Err(Error::DimMismatch { expected: f.dim(), got: phi.dim() });
    }
    // graded layouts of equal dimension agree on their common prefix
    Ok(f.coeffs().iter().zip(phi.coeffs()).fold(zero(), |acc, (&a, &b)| acc + a * b))
}

/// Which block of φ the inner function is paired against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// ψ₂(x₂) = ⟨f₁, φ(·, x₂)⟩.
    First,
    /// ψ₁(x₁) = ⟨f₂, φ(x₁, ·)⟩.
    Second,
}

/// Pairs `inner` against block `position` of φ, whose blocks have the given
/// dimensions; the result lives on the remaining blocks in their order.
pub fn contract_block<T: Real>(
    phi: &HermiteExpansion<T>,
    block_dims: &[usize],
    position: usize,
    inner: &HermiteExpansion<T>,
) -> Result<HermiteExpansion<T>> {
    let total: usize = block_dims.iter().sum();
    if total != phi.dim() {
        return Err(Error::BlockMismatch { expected: total, got: phi.dim() });
    }
    let Some(&inner_dim) = block_dims.get(position) else {
        return Err(Error::InvalidInput(format!("block {position} of {}", block_dims.len())));
    };
    if inner_dim != inner.dim() {
        return Err(Error::DimMismatch { expected: inner_dim, got: inner.dim() });
    }
    let out_dim = total - inner_dim;
    if out_dim == 0 {
        return Err(Error::InvalidInput("contraction would leave no variables".into()));
    }
    let offset: usize = block_dims[..position].iter().sum();
    let n = phi.degree();
    let template = HermiteExpansion::<T>::zeros(out_dim, n);
    let inner_indices: Vec<Vec<MultiIndex>> =
        (0..=n).map(|k| graded_enumerate(inner_dim, k.min(inner.degree()))).collect();
    let coeffs: Vec<Complex<T>> = template
        .indices()
        .par_iter()
        .map(|a| {
            let remaining = n - a.order();
            let mut acc = zero();
            let mut full = Vec::with_capacity(total);
            for b in &inner_indices[remaining] {
                let cb = inner.get(b);
                if cb == zero() {
                    continue;
                }
                full.clear();
                full.extend_from_slice(&a.entries()[..offset]);
                full.extend_from_slice(b.entries());
                full.extend_from_slice(&a.entries()[offset..]);
                acc += phi.get(&MultiIndex::new(full.clone())) * cb;
            }
            acc
        })
        .collect();
    let mut out = template;
    out.coeffs_mut().copy_from_slice(&coeffs);
    Ok(out)
}

/// ψ over the complementary block: c_{α₁}(ψ₁) = Σ_{α₂} c_{(α₁,α₂)}(φ) c_{α₂}(f)
/// for [`Slot::Second`], and symmetrically for [`Slot::First`].
pub fn partial_pair<T: Real>(
    inner: &HermiteExpansion<T>,
    phi: &HermiteExpansion<T>,
    slot: Slot,
) -> Result<HermiteExpansion<T>> {
    if inner.dim() >= phi.dim() {
        return Err(Error::DimMismatch { expected: phi.dim().saturating_sub(1), got: inner.dim() });
    }
    let rest = phi.dim() - inner.dim();
    match slot {
        Slot::First => contract_block(phi, &[inner.dim(), rest], 0, inner),
        Slot::Second => contract_block(phi, &[rest, inner.dim()], 1, inner),
    }
}

/// ⟨f₁⊗f₂, φ⟩ computed three ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FubiniCheck<T> {
    /// Direct sum Σ c_{(α₁,α₂)}(φ) c_{α₁}(f₁) c_{α₂}(f₂).
    pub direct: Complex<T>,
    /// ⟨f₁, ψ₁⟩ with ψ₁ = ⟨f₂, φ(x₁,·)⟩.
    pub via_first: Complex<T>,
    /// ⟨f₂, ψ₂⟩ with ψ₂ = ⟨f₁, φ(·,x₂)⟩.
    pub via_second: Complex<T>,
}

impl<T: Real> FubiniCheck<T> {
    /// (|direct − via_first|, |direct − via_second|, |via_first − via_second|).
    pub fn residuals(&self) -> [T; 3] {
        [
            (self.direct - self.via_first).norm(),
            (self.direct - self.via_second).norm(),
            (self.via_first - self.via_second).norm(),
        ]
    }
}

pub fn fubini_check<T: Real>(
    f1: &HermiteExpansion<T>,
    f2: &HermiteExpansion<T>,
    phi: &HermiteExpansion<T>,
) -> Result<FubiniCheck<T>> {
    let dims = [f1.dim(), f2.dim()];
    if dims[0] + dims[1] != phi.dim() {
        return Err(Error::DimMismatch { expected: dims[0] + dims[1], got: phi.dim() });
    }
    let direct = phi.iter().fold(zero(), |acc, (alpha, &c)| {
        let blocks = alpha.split(&dims).expect("checked dimensions");
        acc + c * f1.get(&blocks[0]) * f2.get(&blocks[1])
    });
    let psi1 = partial_pair(f2, phi, Slot::Second)?;
    let psi2 = partial_pair(f1, phi, Slot::First)?;
    Ok(FubiniCheck { direct, via_first: pair(f1, &psi1)?, via_second: pair(f2, &psi2)? })
}

/// A bijection τ of {1, …, n}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    /// 0-based images.
    images: Vec<usize>,
}

impl Permutation {
    /// Takes the 1-based images τ(1), …, τ(n).
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &t in &images {
            if t == 0 || t > n || seen[t - 1] {
                return Err(Error::BadPermutation(images));
            }
            seen[t - 1] = true;
        }
        Ok(Self { images: images.into_iter().map(|t| t - 1).collect() })
    }

    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    /// Every element of S_n, in lexicographic order of the images.
    pub fn all(n: usize) -> Vec<Self> {
        (0..n).permutations(n).map(|images| Self { images }).collect()
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// τ(k+1) − 1, i.e. the 0-based image of the 0-based position k.
    pub fn at(&self, k: usize) -> usize {
        self.images[k]
    }

    /// The 1-based images.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|t| t + 1).collect()
    }

    /// Block dimensions (d_{τ(1)}, …, d_{τ(n)}).
    pub fn permute_dims(&self, dims: &[usize]) -> Vec<usize> {
        self.images.iter().map(|&t| dims[t]).collect()
    }
}

/// Pairs the blocks of φ against f_{τ(n)}, f_{τ(n−1)}, …, f_{τ(2)} in that
/// order, then pairs the remaining function of x_{τ(1)} against f_{τ(1)}.
pub fn iterated_partial_pair<T: Real>(
    factors: &[HermiteExpansion<T>],
    phi: &HermiteExpansion<T>,
    tau: &Permutation,
) -> Result<Complex<T>> {
    let n = factors.len();
    if tau.len() != n {
        return Err(Error::BadPermutation(tau.images()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("no factors".into()));
    }
    let dims: Vec<usize> = factors.iter().map(|f| f.dim()).collect();
    let total: usize = dims.iter().sum();
    if total != phi.dim() {
        return Err(Error::DimMismatch { expected: total, got: phi.dim() });
    }
    // blocks still present in the current function, in natural order
    let mut live: Vec<usize> = (0..n).collect();
    let mut current = phi.clone();
    for j in (1..n).rev() {
        let block = tau.at(j);
        let position = live.iter().position(|&b| b == block).expect("each block removed once");
        let live_dims: Vec<usize> = live.iter().map(|&b| dims[b]).collect();
        current = contract_block(&current, &live_dims, position, &factors[block])?;
        live.remove(position);
    }
    pair(&factors[tau.at(0)], &current)
}
