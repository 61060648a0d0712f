//! Gauss–Hermite quadrature.
//!
//! Nodes are the eigenvalues of the symmetric Jacobi matrix of the weight
//! e^{-x²} (zero diagonal, off-diagonal √(k/2)), found by implicit QL and
//! then polished with Newton steps on the normalized recurrence. Weights are
//! w_i = e^{-x_i²} / (n h_{n-1}(x_i)²).

use crate::error::{Error, Result};
use crate::hermite::functions::scaled_pair;
use crate::scalar::Real;

/// An n-point rule for ∫ e^{-x²/c²} p(x) dx, c being the rule's scale
/// (1 for the standard rule).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    nodes: Vec<T>,
    /// Weights against the Gaussian factor; may underflow to zero at the
    /// outermost nodes of very large rules.
    weights: Vec<T>,
    /// Weights with the Gaussian factor folded in: Σ wᵢ g(xᵢ) ≈ ∫ g(x) dx.
    scaled_weights: Vec<T>,
    scale: T,
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn scaled_weights(&self) -> &[T] {
        &self.scaled_weights
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    /// Rule for the weight e^{-x²/c²}: nodes c·xᵢ.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            nodes: self.nodes.iter().map(|&x| c * x).collect(),
            weights: self.weights.iter().map(|&w| c * w).collect(),
            scaled_weights: self.scaled_weights.iter().map(|&w| c * w).collect(),
            scale: self.scale * c,
        }
    }

    /// ∫ g(x) dx over ℝ, with the Gaussian factor extracted.
    pub fn integrate<F>(&self, mut g: F) -> T
    where
        F: FnMut(T) -> T,
    {
        self.nodes.iter().zip(&self.scaled_weights).map(|(&x, &w)| w * g(x)).sum()
    }

    /// Visits every node of the d-fold product rule with its product weight
    /// (scaled weights), axis 0 varying slowest.
    pub fn for_each_product_node<F>(&self, dim: usize, mut visit: F)
    where
        F: FnMut(&[T], T),
    {
        let n = self.len();
        let mut idx = vec![0usize; dim];
        let mut point = vec![T::zero(); dim];
        let total = n.pow(dim as u32);
        for _ in 0..total {
            let mut w = T::one();
            for (axis, &i) in idx.iter().enumerate() {
                point[axis] = self.nodes[i];
                w *= self.scaled_weights[i];
            }
            visit(&point, w);
            for axis in (0..dim).rev() {
                idx[axis] += 1;
                if idx[axis] < n {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }
}

/// The n-point Gauss–Hermite rule for the weight e^{-x²}.
pub fn gauss_hermite_rule<T: Real>(n: usize) -> Result<QuadratureRule<T>> {
    if n == 0 {
        return Err(Error::InvalidInput("quadrature needs at least one node".into()));
    }
    let mut diag = vec![T::zero(); n];
    let mut off: Vec<T> = (1..n)
        .map(|k| (T::from_usize_lossy(k) / T::lit(2.0)).sqrt())
        .chain(std::iter::once(T::zero()))
        .collect();
    tridiagonal_eigenvalues(&mut diag, &mut off)?;
    diag.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));

    let nf = T::from_usize_lossy(n);
    let root_2n = (T::lit(2.0) * nf).sqrt();
    let mut nodes = diag;
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let p = scaled_pair(n, *x);
            if p.prev == T::zero() {
                break;
            }
            let step = p.curr / (root_2n * p.prev);
            *x -= step;
            if step.abs() <= T::epsilon() * x.abs().max(T::one()) {
                break;
            }
        }
    }
    // exact symmetry about the origin
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let m = (nodes[j] - nodes[i]) / T::lit(2.0);
        nodes[i] = -m;
        nodes[j] = m;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }

    let mut weights = Vec::with_capacity(n);
    let mut scaled_weights = Vec::with_capacity(n);
    for &x in &nodes {
        // h_{n-1}(x) = mantissa · e^{ln_scale}
        let p = scaled_pair(n - 1, x);
        let ln_h = p.curr.abs().ln() + p.ln_scale;
        let ln_scaled = -T::lit(2.0) * ln_h - nf.ln();
        scaled_weights.push(ln_scaled.exp());
        weights.push((ln_scaled - x * x).exp());
    }
    Ok(QuadratureRule { nodes, weights, scaled_weights, scale: T::one() })
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL.
///
/// `diag` holds the diagonal and receives the eigenvalues; `off[i]` couples
/// rows i and i+1 (the last entry is ignored and destroyed).
fn tridiagonal_eigenvalues<T: Real>(diag: &mut [T], off: &mut [T]) -> Result<()> {
    let n = diag.len();
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(Error::InvalidInput("QL iteration did not converge".into()));
            }
            let mut g = (diag[l + 1] - diag[l]) / (two * off[l]);
            let mut r = g.hypot(T::one());
            let signed_r = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = diag[m] - diag[l] + off[l] / (g + signed_r);
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == T::zero() {
                    diag[i + 1] -= p;
                    off[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + two * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = T::zero();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_gamma;
    use std::f64::consts::PI;

    /// ∫ e^{-x²} x^k dx = Γ((k+1)/2) for even k, 0 for odd k.
    fn moment(k: usize) -> f64 {
        if k % 2 == 1 {
            0.0
        } else {
            ln_gamma((k as f64 + 1.0) / 2.0).exp()
        }
    }

    #[test]
    fn one_point_rule() {
        let r = gauss_hermite_rule::<f64>(1).unwrap();
        assert_eq!(r.nodes(), &[0.0]);
        assert!((r.weights()[0] - PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn two_point_rule() {
        let r = gauss_hermite_rule::<f64>(2).unwrap();
        let x = 0.5f64.sqrt();
        assert!((r.nodes()[0] + x).abs() < 1e-15 && (r.nodes()[1] - x).abs() < 1e-15);
        for w in r.weights() {
            assert!((w - PI.sqrt() / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn twenty_points_integrate_degree_38() {
        let r = gauss_hermite_rule::<f64>(20).unwrap();
        let q: f64 = r.nodes().iter().zip(r.weights()).map(|(x, w)| w * x.powi(38)).sum();
        // Γ(39/2) = 37!! √π / 2^19
        let mut dfact = 1.0f64;
        let mut k = 37.0;
        while k > 1.0 {
            dfact *= k;
            k -= 2.0;
        }
        let exact = dfact * PI.sqrt() / 2f64.powi(19);
        assert!(((q - exact) / exact).abs() < 1e-10, "rel {:e}", (q - exact) / exact);
    }

    #[test]
    fn polynomial_exactness() {
        for n in [3usize, 8, 17, 40, 64] {
            let r = gauss_hermite_rule::<f64>(n).unwrap();
            for k in 0..(2 * n).min(60) {
                let q: f64 = r
                    .nodes()
                    .iter()
                    .zip(r.weights())
                    .map(|(x, w)| w * x.powi(k as i32))
                    .sum();
                let exact = moment(k);
                let scale = exact.abs().max(ln_gamma((k as f64 + 1.0) / 2.0).exp());
                assert!((q - exact).abs() <= 1e-12 * scale, "n={n} k={k}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn large_rules_are_well_formed() {
        let r = gauss_hermite_rule::<f64>(512).unwrap();
        assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(r.scaled_weights().iter().all(|w| *w > 0.0 && w.is_finite()));
        // Σ w̃ h_0² = 1 exercises the far nodes through the scaled weights
        let s: f64 = r.integrate(|x| (-x * x).exp() / PI.sqrt());
        assert!((s - 1.0).abs() < 1e-13);
        // largest node of the 512-point rule ≈ 31.4
        assert!((r.nodes()[511] - 31.4).abs() < 0.2);
    }

    #[test]
    fn scaled_rule_integrates_wider_gaussians() {
        let r = gauss_hermite_rule::<f64>(40).unwrap().scaled(2f64.sqrt());
        let s = r.integrate(|x| (-x * x / 2.0).exp());
        assert!((s - (2.0 * PI).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn single_precision_rule() {
        let r = gauss_hermite_rule::<f32>(10).unwrap();
        let s: f32 = r.weights().iter().sum();
        assert!((s - std::f32::consts::PI.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn zero_nodes_rejected() {
        assert!(gauss_hermite_rule::<f64>(0).is_err());
    }
}
