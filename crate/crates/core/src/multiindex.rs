//! Multi-indices, graded enumeration and anisotropic factorial powers.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special::ln_factorial;

/// A tuple of nonnegative integers indexing a Hermite basis element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    /// Unit vector `e_axis` scaled by `n`.
    pub fn axis(dim: usize, axis: usize, n: u32) -> Self {
        let mut e = vec![0; dim];
        e[axis] = n;
        Self(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// |α|, the sum of the entries.
    pub fn order(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, axis: usize) -> u32 {
        self.0[axis]
    }

    /// ln(α!) = Σ ln(α_j!).
    pub fn ln_factorial(&self) -> f64 {
        self.0.iter().map(|&a| ln_factorial(a as u64)).sum()
    }

    /// Entry `axis` shifted by `delta`, or `None` if it would become negative.
    pub fn shifted(&self, axis: usize, delta: i64) -> Option<Self> {
        let v = self.0[axis] as i64 + delta;
        if v < 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[axis] = v as u32;
        Some(Self(e))
    }

    /// Splits into consecutive blocks of the given lengths.
    pub fn split(&self, block_dims: &[usize]) -> Result<Vec<MultiIndex>> {
        let total: usize = block_dims.iter().sum();
        if total != self.dim() {
            return Err(Error::BlockMismatch { expected: total, got: self.dim() });
        }
        let mut out = Vec::with_capacity(block_dims.len());
        let mut start = 0;
        for &len in block_dims {
            out.push(Self(self.0[start..start + len].to_vec()));
            start += len;
        }
        Ok(out)
    }

    /// Concatenates blocks; inverse of [`MultiIndex::split`].
    pub fn merge<'a, I>(blocks: I) -> Self
    where
        I: IntoIterator<Item = &'a MultiIndex>,
    {
        Self(blocks.into_iter().flat_map(|b| b.0.iter().copied()).collect())
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(v: [u32; N]) -> Self {
        Self(v.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Every α ∈ ℕ^d with |α| ≤ N, sorted by (|α|, lexicographic ascending).
///
/// The length is C(N+d, d).
pub fn graded_enumerate(dim: usize, max_degree: usize) -> Vec<MultiIndex> {
    assert!(dim >= 1, "dimension must be positive");
    let mut out = Vec::new();
    let mut current = vec![0u32; dim];
    for degree in 0..=max_degree {
        fill_shell(&mut current, 0, degree, &mut out);
    }
    out
}

/// Appends all α with |α| = `remaining` on axes `axis..` in lexicographic order.
fn fill_shell(current: &mut [u32], axis: usize, remaining: usize, out: &mut Vec<MultiIndex>) {
    let dim = current.len();
    if axis == dim - 1 {
        current[axis] = remaining as u32;
        out.push(MultiIndex(current.to_vec()));
        return;
    }
    for a in 0..=remaining {
        current[axis] = a as u32;
        fill_shell(current, axis + 1, remaining - a, out);
    }
    current[axis] = 0;
}

/// Number of multi-indices in ℕ^d with |α| ≤ N, i.e. C(N+d, d).
pub fn graded_count(dim: usize, max_degree: usize) -> usize {
    let mut c: u128 = 1;
    for k in 1..=dim as u128 {
        c = c * (max_degree as u128 + k) / k;
    }
    c as usize
}

/// Canonical storage layout for a coefficient table: the graded enumeration
/// together with its inverse.
#[derive(Debug)]
pub struct GradedLayout {
    dim: usize,
    degree: usize,
    indices: Vec<MultiIndex>,
    ranks: HashMap<MultiIndex, usize>,
    shell_starts: Vec<usize>,
}

impl GradedLayout {
    pub fn new(dim: usize, degree: usize) -> Arc<Self> {
        let indices = graded_enumerate(dim, degree);
        let ranks = indices.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let shell_starts = (0..=degree + 1)
            .map(|k| if k == 0 { 0 } else { graded_count(dim, k - 1) })
            .collect();
        Arc::new(Self { dim, degree, indices, ranks, shell_starts })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn rank(&self, alpha: &MultiIndex) -> Option<usize> {
        self.ranks.get(alpha).copied()
    }

    /// Storage range of the shell |α| = k.
    pub fn shell(&self, k: usize) -> std::ops::Range<usize> {
        self.shell_starts[k]..self.shell_starts[k + 1]
    }
}

/// Anisotropic order 𝒔 = (s_1, …, s_n) acting on coordinate blocks of sizes
/// (d_1, …, d_n).
#[derive(Debug, Clone, PartialEq)]
pub struct AnisotropicOrder<T> {
    values: Vec<T>,
    block_dims: Vec<usize>,
}

impl<T: Real> AnisotropicOrder<T> {
    pub fn new(values: Vec<T>, block_dims: Vec<usize>) -> Result<Self> {
        if values.len() != block_dims.len() || values.is_empty() {
            return Err(Error::InvalidInput(format!(
                "{} order values for {} blocks",
                values.len(),
                block_dims.len()
            )));
        }
        if values.iter().any(|v| !(*v > T::zero())) {
            return Err(Error::InvalidInput("order values must be positive".into()));
        }
        if block_dims.contains(&0) {
            return Err(Error::InvalidInput("block dimensions must be positive".into()));
        }
        Ok(Self { values, block_dims })
    }

    /// The same order `s` on every one of `dim` coordinates, one block each.
    pub fn isotropic(s: T, dim: usize) -> Self {
        Self { values: vec![s; dim], block_dims: vec![1; dim] }
    }

    /// A single block of dimension `dim` with order `s`.
    pub fn single(s: T, dim: usize) -> Self {
        Self { values: vec![s], block_dims: vec![dim] }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn dim(&self) -> usize {
        self.block_dims.iter().sum()
    }
}

/// ln(α!^𝒔) = Σ_j s_j ln(α_j!).
pub fn ln_factorial_power<T: Real>(alpha: &MultiIndex, order: &AnisotropicOrder<T>) -> Result<T> {
    let blocks = alpha.split(&order.block_dims)?;
    Ok(blocks
        .iter()
        .zip(&order.values)
        .map(|(b, &s)| s * T::lit(b.ln_factorial()))
        .sum())
}

/// α!^𝒔 = α_1!^{s_1} ⋯ α_n!^{s_n}, evaluated through logarithms.
pub fn factorial_power<T: Real>(alpha: &MultiIndex, order: &AnisotropicOrder<T>) -> Result<T> {
    ln_factorial_power(alpha, order).map(T::exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn one_dimensional_order() {
        let e = graded_enumerate(1, 2);
        assert_eq!(e, vec![MultiIndex::from([0]), MultiIndex::from([1]), MultiIndex::from([2])]);
    }

    #[test]
    fn two_dimensional_first_shell_is_lex_ascending() {
        let e = graded_enumerate(2, 1);
        assert_eq!(e, vec![[0, 0].into(), [0, 1].into(), [1, 0].into()]);
    }

    #[test]
    fn counts_match_binomial() {
        assert_eq!(graded_enumerate(3, 4).len(), 35);
        for d in 1..=4 {
            for n in 0..=9 {
                assert_eq!(graded_enumerate(d, n).len(), graded_count(d, n));
            }
        }
    }

    #[test]
    fn enumeration_is_a_bijection_onto_the_simplex() {
        for d in 1..=3usize {
            for n in 0..=8usize {
                // brute force over the box [0, n]^d
                let mut brute = BTreeSet::new();
                let mut idx = vec![0u32; d];
                loop {
                    if idx.iter().map(|&a| a as usize).sum::<usize>() <= n {
                        brute.insert(MultiIndex::new(idx.clone()));
                    }
                    let mut axis = 0;
                    loop {
                        if axis == d {
                            break;
                        }
                        idx[axis] += 1;
                        if idx[axis] as usize > n {
                            idx[axis] = 0;
                            axis += 1;
                        } else {
                            break;
                        }
                    }
                    if axis == d {
                        break;
                    }
                }
                let listed = graded_enumerate(d, n);
                let as_set: BTreeSet<_> = listed.iter().cloned().collect();
                assert_eq!(as_set.len(), listed.len(), "duplicates for d={d} n={n}");
                assert_eq!(as_set, brute);
                for w in listed.windows(2) {
                    assert!((w[0].order(), &w[0]) < (w[1].order(), &w[1]));
                }
            }
        }
    }

    #[test]
    fn layout_shells_and_ranks() {
        let layout = GradedLayout::new(2, 5);
        for k in 0..=5 {
            for i in layout.shell(k) {
                assert_eq!(layout.indices()[i].order(), k);
            }
        }
        for (i, a) in layout.indices().iter().enumerate() {
            assert_eq!(layout.rank(a), Some(i));
        }
        assert_eq!(layout.rank(&[3, 3].into()), None);
    }

    #[test]
    fn factorial_power_examples() {
        let order = AnisotropicOrder::new(vec![1.0, 2.0], vec![1, 1]).unwrap();
        let v: f64 = factorial_power(&[2, 1].into(), &order).unwrap();
        assert!((v - 2.0).abs() < 1e-14);

        let any = AnisotropicOrder::new(vec![0.3, 7.0, 1.5], vec![1, 2, 1]).unwrap();
        let v: f64 = factorial_power(&MultiIndex::zero(4), &any).unwrap();
        assert_eq!(v, 1.0);

        let half = AnisotropicOrder::new(vec![0.5, 0.5], vec![1, 1]).unwrap();
        let v: f64 = factorial_power(&[3, 2].into(), &half).unwrap();
        // independent route: √(3!·2!)
        let oracle = ((1.0f64 * 2.0 * 3.0) * (1.0 * 2.0)).sqrt();
        assert!((v - oracle).abs() < 1e-13 * oracle);
        assert!((v - 12f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn factorial_power_block_mismatch() {
        let order = AnisotropicOrder::new(vec![1.0f64], vec![2]).unwrap();
        let err = factorial_power(&[1, 2, 3].into(), &order).unwrap_err();
        assert_eq!(err, Error::BlockMismatch { expected: 2, got: 3 });
    }

    #[test]
    fn large_orders_do_not_overflow() {
        let order = AnisotropicOrder::single(1.0f64, 1);
        let ln = ln_factorial_power(&[300].into(), &order).unwrap();
        assert!(ln.is_finite() && ln > 700.0);
    }

    #[test]
    fn split_merge_examples() {
        let a: MultiIndex = [2, 0, 1].into();
        let parts = a.split(&[2, 1]).unwrap();
        assert_eq!(parts, vec![MultiIndex::from([2, 0]), MultiIndex::from([1])]);
        let m = MultiIndex::merge(&[MultiIndex::from([1]), MultiIndex::from([3, 3])]);
        assert_eq!(m, MultiIndex::from([1, 3, 3]));
        assert!(a.split(&[1, 1]).is_err());
    }

    fn blocks_and_index() -> impl Strategy<Value = (Vec<usize>, Vec<u32>)> {
        prop::collection::vec(1usize..4, 1..4).prop_flat_map(|blocks| {
            let d: usize = blocks.iter().sum();
            (Just(blocks), prop::collection::vec(0u32..40, d))
        })
    }

    proptest! {
        #[test]
        fn split_merge_round_trip((blocks, entries) in blocks_and_index()) {
            let a = MultiIndex::new(entries);
            let parts = a.split(&blocks).unwrap();
            prop_assert_eq!(parts.iter().map(MultiIndex::order).sum::<usize>(), a.order());
            let back = MultiIndex::merge(&parts);
            prop_assert_eq!(&back, &a);
            prop_assert_eq!(back.split(&blocks).unwrap(), parts);
        }

        #[test]
        fn factorial_power_is_multiplicative_over_blocks(
            a1 in prop::collection::vec(0u32..60, 1..3),
            a2 in prop::collection::vec(0u32..60, 1..3),
            s in 0.05f64..3.0,
        ) {
            let (d1, d2) = (a1.len(), a2.len());
            let m1 = MultiIndex::new(a1);
            let m2 = MultiIndex::new(a2);
            let joint = AnisotropicOrder::new(vec![s, s], vec![d1, d2]).unwrap();
            let lhs = ln_factorial_power(&MultiIndex::merge([&m1, &m2]), &joint).unwrap();
            let rhs = ln_factorial_power(&m1, &AnisotropicOrder::single(s, d1)).unwrap()
                + ln_factorial_power(&m2, &AnisotropicOrder::single(s, d2)).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }
    }
}
