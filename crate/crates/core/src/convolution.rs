//! Lattice Riemann sums Σ_k φ(x−εk) ψ(εk) ε^d for φ∗ψ, a quadrature
//! reference for the integral, and the rate at which the weighted residual
//! R_{ε,α,β}(x) = x^α D^β(φ∗ψ − Σ_k …)(x) vanishes with ε.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::line;
use crate::hermite::{gauss_hermite_rule, Ladder, SampledFunction};
use crate::multiindex::{graded_enumerate, MultiIndex};
use crate::scalar::Real;
use crate::spaces::{DerivativeOptions, Grid};

/// Boundary summands above this make the lattice truncation unacceptable.
pub const TAIL_TOLERANCE: f64 = 1e-14;

/// Accuracy aimed at by [`convolution_reference`].
pub const REFERENCE_ACCURACY: f64 = 1e-10;

/// Quadrature nodes used by [`convolution_reference`].
pub const REFERENCE_NODES: usize = 128;

/// 12 plus the outermost turning point √(2N+1) of a degree-N input.
pub fn default_lattice_radius(max_degree: usize) -> f64 {
    12.0 + ((2 * max_degree + 1) as f64).sqrt()
}

fn check_dims<T: Real>(phi: &SampledFunction<T>, psi: &SampledFunction<T>, x_points: &[Vec<T>]) -> Result<usize> {
    let dim = phi.dim();
    if psi.dim() != dim {
        return Err(Error::DimMismatch { expected: dim, got: psi.dim() });
    }
    if let Some(p) = x_points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimMismatch { expected: dim, got: p.len() });
    }
    Ok(dim)
}

/// Truncated lattice sum over {k ∈ ℤ^d : |εk_j| ≤ R} at each x, summed in
/// lattice order.
pub fn riemann_convolution<T: Real>(
    phi: &SampledFunction<T>,
    psi: &SampledFunction<T>,
    eps: T,
    x_points: &[Vec<T>],
    lattice_radius: T,
) -> Result<Vec<Complex<T>>> {
    let dim = check_dims(phi, psi, x_points)?;
    if !(eps > T::zero()) || !(lattice_radius > T::zero()) {
        return Err(Error::InvalidInput(format!("eps {eps} and radius {lattice_radius} must be positive")));
    }
    let m = (lattice_radius / eps).floor().to_i64().unwrap_or(0);
    let side = (2 * m + 1) as usize;
    let total = side.pow(dim as u32);
    let vol = eps.powi(dim as i32);
    let zero = Complex::new(T::zero(), T::zero());

    let mut out = Vec::with_capacity(x_points.len());
    for x in x_points {
        let (sum, tail) = (0..total)
            .into_par_iter()
            .map(|flat| {
                let mut y = vec![T::zero(); dim];
                let mut shifted = vec![T::zero(); dim];
                let mut rem = flat;
                let mut boundary = false;
                for axis in (0..dim).rev() {
                    let k = (rem % side) as i64 - m;
                    rem /= side;
                    boundary |= k.abs() == m;
                    y[axis] = eps * T::from_i64(k).expect("lattice index");
                    shifted[axis] = x[axis] - y[axis];
                }
                let term = phi.eval(&shifted) * psi.eval(&y) * vol;
                (term, if boundary { term.norm() } else { T::zero() })
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold((zero, T::zero()), |a, b| (a.0 + b.0, a.1.max(b.1)));
        let tail = tail.to_f64_lossy();
        if tail > TAIL_TOLERANCE {
            return Err(Error::TailNotNegligible { summand: tail, tolerance: TAIL_TOLERANCE });
        }
        out.push(sum);
    }
    Ok(out)
}

/// ∫ φ(x−y) ψ(y) dy by the Gauss–Hermite product rule for the weight
/// e^{−|y|²/2}, which suits inputs decaying like Hermite functions.
pub fn convolution_reference<T: Real>(
    phi: &SampledFunction<T>,
    psi: &SampledFunction<T>,
    x_points: &[Vec<T>],
) -> Result<Vec<Complex<T>>> {
    let dim = check_dims(phi, psi, x_points)?;
    let rule = gauss_hermite_rule::<T>(REFERENCE_NODES)?.scaled(T::SQRT_2());
    Ok(x_points
        .par_iter()
        .map(|x| {
            let mut acc = Complex::new(T::zero(), T::zero());
            rule.for_each_product_node(dim, |y, w| {
                let shifted: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a - b).collect();
                acc += phi.eval(&shifted) * psi.eval(y) * w;
            });
            acc
        })
        .collect())
}

/// φ∗ψ as a sampled function, each value computed by [`convolution_reference`].
pub fn convolved<T: Real>(phi: &SampledFunction<T>, psi: &SampledFunction<T>) -> Result<SampledFunction<T>> {
    if phi.dim() != psi.dim() {
        return Err(Error::DimMismatch { expected: phi.dim(), got: psi.dim() });
    }
    let (a, b) = (phi.clone(), psi.clone());
    Ok(SampledFunction::new(phi.dim(), move |x| {
        convolution_reference(&a, &b, &[x.to_vec()]).expect("dimensions checked")[0]
    }))
}

/// Strictly decreasing mesh sizes with a common lattice radius.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshLadder {
    epsilons: Vec<f64>,
    lattice_radius: f64,
}

impl MeshLadder {
    pub fn new(epsilons: Vec<f64>, lattice_radius: f64) -> Result<Self> {
        if epsilons.is_empty() || epsilons.iter().any(|&e| !(e > 0.0)) || !(lattice_radius > 0.0) {
            return Err(Error::InvalidInput("mesh sizes and radius must be positive".into()));
        }
        for w in epsilons.windows(2) {
            if w[1] == w[0] {
                return Err(Error::DegenerateFit(format!("mesh size {} repeated", w[0])));
            }
            if w[1] > w[0] {
                return Err(Error::InvalidInput("mesh sizes must decrease".into()));
            }
        }
        Ok(Self { epsilons, lattice_radius })
    }

    /// Halving ladder ε₀, ε₀/2, …, with the default radius for degree-0 inputs.
    pub fn halving(eps0: f64, count: usize) -> Result<Self> {
        let eps = (0..count).map(|k| eps0 / 2f64.powi(k as i32)).collect();
        Self::new(eps, default_lattice_radius(0))
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    pub fn lattice_radius(&self) -> f64 {
        self.lattice_radius
    }
}

/// Index set, weights and sampling grid of the residual seminorm.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualWeights {
    pub alpha_max: usize,
    pub beta_max: usize,
    pub h: f64,
    pub s: f64,
    pub sigma: f64,
    pub grid: Grid,
    pub derivatives: DerivativeOptions,
}

impl ResidualWeights {
    /// (α, β) = (0, 0) with unit weights.
    pub fn plain(grid: Grid) -> Self {
        Self { alpha_max: 0, beta_max: 0, h: 1.0, s: 0.5, sigma: 0.5, grid, derivatives: DerivativeOptions::with_degree(32) }
    }
}

/// D^β φ for every |β| ≤ β_max, obtained from the expansion of φ.
fn phi_derivatives<T: Real>(
    phi: &SampledFunction<T>,
    beta_max: usize,
    opts: &DerivativeOptions,
) -> Result<Vec<(MultiIndex, SampledFunction<T>)>> {
    let betas = graded_enumerate(phi.dim(), beta_max);
    if beta_max == 0 {
        return Ok(vec![(betas[0].clone(), phi.clone())]);
    }
    let base = crate::hermite::analyze(phi, opts.degree, opts.n_quad)?.denoise(T::lit(opts.denoise));
    betas
        .into_iter()
        .map(|beta| {
            let mut d = base.clone();
            for (axis, &b) in beta.entries().iter().enumerate() {
                for _ in 0..b {
                    d = d.apply_ladder(axis, Ladder::Differentiate)?;
                }
            }
            Ok((beta, SampledFunction::from_expansion(&d)))
        })
        .collect()
}

/// sup over |α| ≤ α_max, |β| ≤ β_max and the grid of
/// |x^α (D^βφ ∗ ψ − Σ_k D^βφ(x−εk)ψ(εk)ε^d)| / (h^{|α+β|} α!^s β!^σ).
///
/// Derivatives fall on φ only.
pub fn residual_seminorm<T: Real>(
    phi: &SampledFunction<T>,
    psi: &SampledFunction<T>,
    eps: f64,
    lattice_radius: f64,
    weights: &ResidualWeights,
) -> Result<f64> {
    let dim = phi.dim();
    let points: Vec<Vec<T>> = weights
        .grid
        .points(dim)
        .into_iter()
        .map(|p| p.into_iter().map(T::lit).collect())
        .collect();
    let alphas = graded_enumerate(dim, weights.alpha_max);
    let ln_h = weights.h.ln();
    let mut worst = 0.0f64;
    for (beta, d_phi) in phi_derivatives(phi, weights.beta_max, &weights.derivatives)? {
        let reference = convolution_reference(&d_phi, psi, &points)?;
        let sums = riemann_convolution(&d_phi, psi, T::lit(eps), &points, T::lit(lattice_radius))?;
        let ln_beta = beta.order() as f64 * ln_h + weights.sigma * beta.ln_factorial();
        for ((p, r), s) in points.iter().zip(&reference).zip(&sums) {
            let diff = (*r - *s).norm().to_f64_lossy();
            if diff == 0.0 {
                continue;
            }
            for alpha in &alphas {
                let mut ln_x = 0.0;
                let mut vanishes = false;
                for (&a, &x) in alpha.entries().iter().zip(p) {
                    if a > 0 {
                        let ax = x.to_f64_lossy().abs();
                        vanishes |= ax == 0.0;
                        ln_x += a as f64 * ax.ln();
                    }
                }
                if vanishes {
                    continue;
                }
                let ln_den = alpha.order() as f64 * ln_h + weights.s * alpha.ln_factorial() + ln_beta;
                let ln_scale = ln_x - ln_den;
                worst = worst.max(if ln_scale == 0.0 { diff } else { (diff.ln() + ln_scale).exp() });
            }
        }
    }
    Ok(worst)
}

/// Residuals along a ladder and the first-order fit through them.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub epsilons: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Whether each ladder point cleared the noise floor and entered the fit.
    pub used: Vec<bool>,
    pub noise_floor: f64,
    /// Least-squares slope of ln residual against ln ε.
    pub slope: f64,
    /// max residual/ε over the used points.
    pub constant: f64,
    /// max/min of residual/ε over the used points.
    pub ratio: f64,
}

/// Residuals below this many multiples of the reference accuracy are noise.
const NOISE_MULTIPLE: f64 = 10.0;

/// Fits ln residual(ε) = ln C + slope · ln ε over the ladder.
pub fn convergence_rate<T: Real>(
    phi: &SampledFunction<T>,
    psi: &SampledFunction<T>,
    ladder: &MeshLadder,
    weights: &ResidualWeights,
) -> Result<ResidualReport> {
    let eps = ladder.epsilons();
    if eps.len() < 4 {
        return Err(Error::InvalidInput(format!("need at least 4 mesh sizes, got {}", eps.len())));
    }
    let residuals: Vec<f64> = eps
        .par_iter()
        .map(|&e| residual_seminorm(phi, psi, e, ladder.lattice_radius(), weights))
        .collect::<Result<_>>()?;
    rate_from_residuals(eps, residuals)
}

/// The fitting half of [`convergence_rate`], for residuals computed elsewhere.
pub fn rate_from_residuals(eps: &[f64], residuals: Vec<f64>) -> Result<ResidualReport> {
    let noise_floor = NOISE_MULTIPLE * REFERENCE_ACCURACY;
    let used: Vec<bool> = residuals.iter().map(|&r| r.is_finite() && r >= noise_floor).collect();
    let (lx, ly): (Vec<f64>, Vec<f64>) = eps
        .iter()
        .zip(&residuals)
        .zip(&used)
        .filter(|(_, &u)| u)
        .map(|((&e, &r), _)| (e.ln(), r.ln()))
        .unzip();
    if lx.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "{} of {} residuals clear the noise floor {noise_floor:e}; residuals {residuals:?}",
            lx.len(),
            residuals.len()
        )));
    }
    let (_, slope, _) =
        line(&lx, &ly).ok_or_else(|| Error::DegenerateFit("log-log points are collinear in ε".into()))?;
    let per_eps: Vec<f64> = lx.iter().zip(&ly).map(|(x, y)| (y - x).exp()).collect();
    let constant = per_eps.iter().cloned().fold(0.0, f64::max);
    let smallest = per_eps.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(ResidualReport {
        epsilons: eps.to_vec(),
        residuals,
        used,
        noise_floor,
        slope,
        constant,
        ratio: constant / smallest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::HermiteExpansion;
    use crate::testutil::{random_real, rng};
    use rand::Rng;

    fn h(n: u32) -> SampledFunction<f64> {
        SampledFunction::hermite([n].into())
    }

    fn at(xs: &[f64]) -> Vec<Vec<f64>> {
        xs.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn riemann_sum_examples() {
        let r = default_lattice_radius(0);
        let v = riemann_convolution(&h(0), &h(0), 0.05, &at(&[0.0]), r).unwrap();
        assert!((v[0].re - 1.0).abs() < 1e-3);
        let v = riemann_convolution(&h(0), &SampledFunction::zero(1), 0.05, &at(&[0.0, 1.0]), r).unwrap();
        assert!(v.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn riemann_sums_approach_reference() {
        let reference = convolution_reference(&h(0), &h(0), &at(&[1.0])).unwrap()[0];
        for eps in [0.4, 0.2, 0.1] {
            let v = riemann_convolution(&h(0), &h(0), eps, &at(&[1.0]), 13.0).unwrap()[0];
            assert!((v - reference).norm() < 1e-10, "eps={eps}");
        }
    }

    #[test]
    fn truncated_tail_is_reported() {
        let slow = SampledFunction::<f64>::real(1, |x| 1.0 / (1.0 + x[0] * x[0]));
        let err = riemann_convolution(&slow, &slow, 0.1, &at(&[0.0]), 5.0).unwrap_err();
        assert!(matches!(err, Error::TailNotNegligible { .. }));
    }

    #[test]
    fn reference_examples() {
        let v = convolution_reference(&h(0), &h(0), &at(&[0.0])).unwrap();
        assert!((v[0].re - 1.0).abs() < 1e-14);
        let v = convolution_reference(&h(0), &h(1), &at(&[0.0])).unwrap();
        assert!(v[0].norm() < 1e-15);
        let g = SampledFunction::<f64>::gaussian(1.0, 1);
        let xs = [-3.0, -1.0, 0.0, 0.5, 2.0];
        let v = convolution_reference(&g, &g, &at(&xs)).unwrap();
        for (&x, val) in xs.iter().zip(&v) {
            let exact = (std::f64::consts::PI / 2.0).sqrt() * (-x * x / 2.0).exp();
            assert!((val.re - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn plain_residual_is_sup_difference() {
        let grid = Grid::new(2.0, 0.5).unwrap();
        let g = SampledFunction::<f64>::real(1, |x| (-x[0].abs()).exp() * (-x[0] * x[0]).exp());
        let r = residual_seminorm(&g, &h(0), 0.2, 13.0, &ResidualWeights::plain(grid)).unwrap();
        let pts = grid.points(1);
        let a = convolution_reference(&g, &h(0), &pts).unwrap();
        let b = riemann_convolution(&g, &h(0), 0.2, &pts, 13.0).unwrap();
        let sup = a.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        assert!(r > 0.0);
        assert_eq!(r, sup);
    }

    #[test]
    fn weighted_residual_of_gaussians_is_small_and_finite() {
        let w = ResidualWeights {
            alpha_max: 3,
            beta_max: 3,
            h: 4.0,
            s: 0.5,
            sigma: 0.5,
            grid: Grid::new(4.0, 0.5).unwrap(),
            derivatives: DerivativeOptions::with_degree(24),
        };
        let mut prev = f64::INFINITY;
        for eps in [1.5, 1.0, 0.7] {
            let r = residual_seminorm(&h(0), &h(0), eps, 13.0, &w).unwrap();
            assert!(r.is_finite() && r < prev, "eps={eps}: {r}");
            prev = r;
        }
        // the lattice sum of a Gaussian is spectrally accurate: fine meshes hit rounding
        for eps in [0.2, 0.1, 0.05] {
            let r = residual_seminorm(&h(0), &h(0), eps, 13.0, &w).unwrap();
            assert!(r < 1e-12, "eps={eps}: {r}");
        }
    }

    #[test]
    fn ladder_validation() {
        assert!(matches!(MeshLadder::new(vec![0.1, 0.1, 0.1, 0.1], 13.0), Err(Error::DegenerateFit(_))));
        assert!(MeshLadder::new(vec![0.1, 0.2], 13.0).is_err());
        assert!(MeshLadder::new(vec![0.1, -0.2], 13.0).is_err());
        assert_eq!(MeshLadder::halving(0.2, 4).unwrap().epsilons(), &[0.2, 0.1, 0.05, 0.025]);
    }

    #[test]
    fn rate_fit_recovers_first_order_data() {
        let eps = [0.2, 0.1, 0.05, 0.025];
        let rep = rate_from_residuals(&eps, eps.iter().map(|e| 0.3 * e).collect()).unwrap();
        assert!((rep.slope - 1.0).abs() < 1e-12);
        assert!((rep.constant - 0.3).abs() < 1e-12 && (rep.ratio - 1.0).abs() < 1e-12);
        let err = rate_from_residuals(&eps, vec![1e-16; 4]).unwrap_err();
        assert!(matches!(err, Error::DegenerateFit(_)));
    }

    #[test]
    fn jump_input_converges_at_first_order() {
        // ψ(y) = e^{-y} on y ≥ 0: the jump at 0 leaves an O(ε) lattice error
        let jump = SampledFunction::<f64>::real(1, |y| if y[0] >= 0.0 { (-y[0]).exp() } else { 0.0 });
        let ladder = MeshLadder::new(vec![0.2, 0.1, 0.05, 0.025], 40.0).unwrap();
        let weights = ResidualWeights::plain(Grid::new(1.0, 0.5).unwrap());
        let mut residuals = Vec::new();
        for &e in ladder.epsilons() {
            // reference by a fine trapezoid on [0, 40] against the smooth φ = h_0
            let pts = weights.grid.points(1);
            let sums = riemann_convolution(&h(0), &jump, e, &pts, 40.0).unwrap();
            let mut worst: f64 = 0.0;
            for (p, s) in pts.iter().zip(&sums) {
                let m = 400_000;
                let dy = 40.0 / m as f64;
                let mut acc = 0.0;
                for k in 0..=m {
                    let y = k as f64 * dy;
                    let w = if k == 0 || k == m { 0.5 } else { 1.0 };
                    acc += w * h(0).eval(&[p[0] - y]).re * (-y).exp();
                }
                worst = worst.max((acc * dy - s.re).abs());
            }
            residuals.push(worst);
        }
        let rep = rate_from_residuals(ladder.epsilons(), residuals).unwrap();
        assert!((0.9..=1.1).contains(&rep.slope), "{rep:?}");
        assert!(rep.ratio < 3.0);
    }

    #[test]
    fn gaussian_ladder_sits_at_the_noise_floor() {
        let ladder = MeshLadder::halving(0.2, 4).unwrap();
        let weights = ResidualWeights::plain(Grid::new(3.0, 0.5).unwrap());
        let err = convergence_rate(&h(0), &h(0), &ladder, &weights).unwrap_err();
        assert!(matches!(err, Error::DegenerateFit(_)), "{err}");
    }

    #[test]
    fn sums_are_symmetric_in_the_limit() {
        let (a, b) = (h(0), h(2));
        let x = at(&[0.37]);
        let mut gap = f64::INFINITY;
        for eps in [0.2, 0.1, 0.05, 0.025] {
            let ab = riemann_convolution(&a, &b, eps, &x, 14.0).unwrap()[0];
            let ba = riemann_convolution(&b, &a, eps, &x, 14.0).unwrap()[0];
            gap = (ab - ba).norm();
        }
        assert!(gap < 1e-6);
    }

    #[test]
    fn triple_convolution_is_associative() {
        let mut r = rng(51);
        let fs: Vec<SampledFunction<f64>> = (0..3)
            .map(|_| {
                let e: HermiteExpansion<f64> = random_real(&mut r, 1, 4);
                SampledFunction::from_expansion(&e)
            })
            .collect();
        let left = convolved(&convolved(&fs[0], &fs[1]).unwrap(), &fs[2]).unwrap();
        let right = convolved(&fs[0], &convolved(&fs[1], &fs[2]).unwrap()).unwrap();
        for _ in 0..10 {
            let x = [r.gen_range(-3.0..3.0)];
            assert!((left.eval(&x) - right.eval(&x)).norm() < 1e-8);
        }
    }
}
