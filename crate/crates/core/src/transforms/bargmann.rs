//! The Bargmann transform
//! 𝔙f(z) = π^{-d/4} ∫ f(y) exp(−½(⟨z,z⟩ + |y|²) + √2⟨z,y⟩) dy
//! with the bilinear ⟨z,y⟩ = Σ z_j y_j, and growth fits of its values.

use num_complex::Complex;
use rayon::prelude::*;

use super::{integrate_complex, modulate, translate};
use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::hermite::{gauss_hermite_rule, HermiteExpansion, SampledFunction};
use crate::scalar::Real;
use crate::spaces::Order;

/// Points z ∈ ℂ^d with the transform values there.
#[derive(Debug, Clone, PartialEq)]
pub struct BargmannSamples<T> {
    z_points: Vec<Vec<Complex<T>>>,
    values: Vec<Complex<T>>,
}

impl<T: Real> BargmannSamples<T> {
    pub fn new(z_points: Vec<Vec<Complex<T>>>, values: Vec<Complex<T>>) -> Result<Self> {
        if z_points.len() != values.len() {
            return Err(Error::DimMismatch { expected: z_points.len(), got: values.len() });
        }
        Ok(Self { z_points, values })
    }

    pub fn z_points(&self) -> &[Vec<Complex<T>>] {
        &self.z_points
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Points ρ e^{iθ} in ℂ for each radius and `n_angles` equally spaced angles.
pub fn polar_points<T: Real>(radii: &[T], n_angles: usize) -> Vec<Vec<Complex<T>>> {
    radii
        .iter()
        .flat_map(|&r| {
            (0..n_angles).map(move |k| {
                let theta = T::TAU() * T::from_usize_lossy(k) / T::from_usize_lossy(n_angles);
                vec![Complex::from_polar(r, theta)]
            })
        })
        .collect()
}

/// Default node count for a degree-N input: 2N+16, and never fewer than 64.
fn default_nodes(degree: usize) -> usize {
    (2 * degree + 16).max(64)
}

/// 𝔙f at each point by `n_quad`-point Gauss–Hermite quadrature per axis.
pub fn bargmann<T: Real>(
    f: &SampledFunction<T>,
    z_points: &[Vec<Complex<T>>],
    n_quad: usize,
) -> Result<BargmannSamples<T>> {
    let dim = f.dim();
    if let Some(bad) = z_points.iter().find(|z| z.len() != dim) {
        return Err(Error::DimMismatch { expected: dim, got: bad.len() });
    }
    let rule = gauss_hermite_rule::<T>(n_quad)?;
    let norm = T::PI().powf(-T::from_usize_lossy(dim) / T::lit(4.0));
    let half = T::lit(0.5);
    let values = z_points
        .par_iter()
        .map(|z| {
            let zz: Complex<T> = z.iter().map(|&c| c * c).sum();
            integrate_complex(&rule, dim, |y| {
                let yy: T = y.iter().map(|&v| v * v).sum();
                let zy: Complex<T> = z.iter().zip(y).map(|(&c, &v)| c * v).sum();
                let exponent = -(zz + Complex::new(yy, T::zero())) * half + zy * T::SQRT_2();
                f.eval(y) * exponent.exp()
            }) * norm
        })
        .collect();
    BargmannSamples::new(z_points.to_vec(), values)
}

/// 𝔙 of a truncated expansion, with the default node count.
pub fn bargmann_expansion<T: Real>(f: &HermiteExpansion<T>, z_points: &[Vec<Complex<T>>]) -> Result<BargmannSamples<T>> {
    bargmann(&SampledFunction::from_expansion(f), z_points, default_nodes(f.degree()))
}

const RELATIVE_FLOOR: f64 = 1e-6;

/// Worst relative deviations between the two sides of the translation and
/// modulation identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityErrors {
    pub translation: f64,
    pub modulation: f64,
}

/// Pointwise relative error, with the denominator floored at 1e-6 of the
/// largest modulus so that zeros of the transform do not dominate.
fn worst_relative<T: Real>(lhs: &[Complex<T>], rhs: &[Complex<T>]) -> f64 {
    let peak = lhs.iter().chain(rhs).map(|v| v.norm().to_f64_lossy()).fold(0.0, f64::max);
    lhs.iter()
        .zip(rhs)
        .map(|(a, b)| {
            let den = a.norm().to_f64_lossy().max(b.norm().to_f64_lossy()).max(RELATIVE_FLOOR * peak);
            if den == 0.0 {
                0.0
            } else {
                (a - b).norm().to_f64_lossy() / den
            }
        })
        .fold(0.0, f64::max)
}

/// Evaluates both sides of
///
/// 𝔙(f(·−x₀))(z) = e^{⟨z,x₀⟩/√2 − |x₀|²/4} 𝔙f(z − x₀/√2),
/// 𝔙(f e^{−i⟨·,ξ₀⟩})(z) = e^{−i⟨z,ξ₀⟩/√2 − |ξ₀|²/4} 𝔙f(z − iξ₀/√2)
///
/// by separate quadratures.
pub fn bargmann_identity_check<T: Real>(
    f: &SampledFunction<T>,
    x0: &[T],
    xi0: &[T],
    z_points: &[Vec<Complex<T>>],
    n_quad: usize,
) -> Result<IdentityErrors> {
    let dim = f.dim();
    let r2 = T::SQRT_2();
    let quarter = T::lit(0.25);
    let i = Complex::new(T::zero(), T::one());

    let lhs_t = bargmann(&translate(f, x0)?, z_points, n_quad)?;
    let shifted_t: Vec<Vec<Complex<T>>> =
        z_points.iter().map(|z| z.iter().zip(x0).map(|(&c, &a)| c - a / r2).collect()).collect();
    let base_t = bargmann(f, &shifted_t, n_quad)?;
    let x0_sq: T = x0.iter().map(|&a| a * a).sum();
    let rhs_t: Vec<Complex<T>> = z_points
        .iter()
        .zip(base_t.values())
        .map(|(z, &v)| {
            let zx: Complex<T> = z.iter().zip(x0).map(|(&c, &a)| c * a).sum();
            (zx / r2 - x0_sq * quarter).exp() * v
        })
        .collect();

    let lhs_m = bargmann(&modulate(f, xi0)?, z_points, n_quad)?;
    let shifted_m: Vec<Vec<Complex<T>>> =
        z_points.iter().map(|z| z.iter().zip(xi0).map(|(&c, &b)| c - i * (b / r2)).collect()).collect();
    let base_m = bargmann(f, &shifted_m, n_quad)?;
    let xi_sq: T = xi0.iter().map(|&b| b * b).sum();
    let rhs_m: Vec<Complex<T>> = z_points
        .iter()
        .zip(base_m.values())
        .map(|(z, &v)| {
            let zxi: Complex<T> = z.iter().zip(xi0).map(|(&c, &b)| c * b).sum();
            (-i * zxi / r2 - xi_sq * quarter).exp() * v
        })
        .collect();
    debug_assert_eq!(x0.len(), dim);

    Ok(IdentityErrors {
        translation: worst_relative(lhs_t.values(), &rhs_t),
        modulation: worst_relative(lhs_m.values(), &rhs_m),
    })
}

/// Result of fitting the radial envelope ln max_{|z|=ρ} |F(z)|.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthCheck {
    /// Best power p in ln|F| ≈ a + c ρ^p (p = 0 standing for c ln ρ).
    pub power: f64,
    pub power_rate: f64,
    /// Coefficient r of the declared law g: ln|F| ≈ a + r g(ρ).
    pub law_rate: f64,
    pub law_residual: f64,
    /// r ≤ cap.
    pub holds: bool,
}

/// Below this |F| a sample is treated as noise.
const SAMPLE_FLOOR: f64 = 1e-14;

/// The radial law bounding ln|F| for the image of a Pilipović space:
/// (ln⟨ρ⟩)^{1/(1−2s)} for s < ½, ρ^{2σ/(σ+1)} for ♭_σ, ρ² for s = ½.
fn radial_law(order: Order<f64>) -> Result<Box<dyn Fn(f64) -> f64>> {
    match order {
        Order::Real(s) if s < 0.5 => {
            let p = 1.0 / (1.0 - 2.0 * s);
            Ok(Box::new(move |r: f64| (0.5 * (1.0 + r * r).ln()).powf(p)))
        }
        Order::Real(0.5) => Ok(Box::new(|r: f64| r * r)),
        Order::Flat(sigma) => {
            let p = 2.0 * sigma / (sigma + 1.0);
            Ok(Box::new(move |r: f64| r.powf(p)))
        }
        other => Err(Error::InvalidInput(format!("no growth law for order {other}"))),
    }
}

/// Fits the radial envelope of the samples against the law of `order` and,
/// separately, against free powers ρ^p; the bound holds when the fitted
/// law coefficient does not exceed `rate_cap`.
pub fn a_space_growth_check<T: Real>(samples: &BargmannSamples<T>, order: Order<f64>, rate_cap: f64) -> Result<GrowthCheck> {
    let law = radial_law(order)?;
    let mut envelope: Vec<(f64, f64)> = Vec::new();
    for (z, v) in samples.z_points().iter().zip(samples.values()) {
        let rho = z.iter().map(|c| c.norm_sqr().to_f64_lossy()).sum::<f64>().sqrt();
        let m = v.norm().to_f64_lossy();
        if rho == 0.0 || m <= SAMPLE_FLOOR {
            continue;
        }
        match envelope.iter_mut().find(|(r, _)| (r - rho).abs() <= 1e-12 * rho) {
            Some(slot) => slot.1 = slot.1.max(m.ln()),
            None => envelope.push((rho, m.ln())),
        }
    }
    if envelope.is_empty() {
        return Err(Error::DegenerateSamples("every sample is below the noise floor".into()));
    }
    envelope.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (lo, hi) = (envelope[0].0, envelope[envelope.len() - 1].0);
    if envelope.len() < 3 || hi < 10.0 * lo {
        return Err(Error::InvalidInput(format!(
            "radii must span a decade over at least three values, got {} radii in [{lo}, {hi}]",
            envelope.len()
        )));
    }
    let rho: Vec<f64> = envelope.iter().map(|e| e.0).collect();
    let y: Vec<f64> = envelope.iter().map(|e| e.1).collect();
    let ones = vec![1.0; rho.len()];
    let spread = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - y.iter().cloned().fold(f64::INFINITY, f64::min);

    let law_fit = least_squares(&[ones.clone(), rho.iter().map(|&r| law(r)).collect()], &y)
        .ok_or_else(|| Error::DegenerateFit("radial law fit is rank deficient".into()))?;
    let (law_rate, law_residual) = (law_fit.coefficients[1], law_fit.rms);

    if spread < 1e-9 {
        return Ok(GrowthCheck { power: 0.0, power_rate: 0.0, law_rate, law_residual, holds: law_rate <= rate_cap });
    }
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for k in 0..=80 {
        let p = k as f64 * 0.05;
        let x: Vec<f64> = rho.iter().map(|&r| if k == 0 { r.ln() } else { r.powf(p) }).collect();
        if let Some(fit) = least_squares(&[ones.clone(), x], &y) {
            if fit.rms < best.0 {
                best = (fit.rms, p, fit.coefficients[1]);
            }
        }
    }
    Ok(GrowthCheck { power: best.1, power_rate: best.2, law_rate, law_residual, holds: law_rate <= rate_cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_factorial;
    use crate::testutil::{random_complex, rng};
    use rand::Rng;

    fn h(n: u32) -> SampledFunction<f64> {
        SampledFunction::hermite([n].into())
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn square_grid(half_width: f64, n: usize) -> Vec<Vec<Complex<f64>>> {
        let step = 2.0 * half_width / (n - 1) as f64;
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                out.push(vec![c(-half_width + step * i as f64, -half_width + step * j as f64)]);
            }
        }
        out
    }

    #[test]
    fn gaussian_at_origin_is_one() {
        let v = bargmann(&h(0), &[vec![c(0.0, 0.0)]], 64).unwrap();
        assert!((v.values()[0] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn hermite_functions_map_to_monomials() {
        let mut r = rng(41);
        for n in 0..=6u32 {
            let f = HermiteExpansion::<f64>::basis(&[n].into());
            let zs: Vec<Vec<Complex<f64>>> = (0..10)
                .map(|_| vec![Complex::from_polar(r.gen_range(0.0..2.0), r.gen_range(0.0..std::f64::consts::TAU))])
                .collect();
            let v = bargmann_expansion(&f, &zs).unwrap();
            for (z, &val) in zs.iter().zip(v.values()) {
                let expect = z[0].powu(n) / ln_factorial(n as u64).exp().sqrt();
                assert!((val - expect).norm() < 1e-7, "n={n} z={}", z[0]);
            }
        }
    }

    #[test]
    fn two_dimensional_monomial() {
        let f = HermiteExpansion::<f64>::basis(&[1, 2].into());
        let z = vec![c(0.3, -0.4), c(-1.1, 0.2)];
        let v = bargmann_expansion(&f, std::slice::from_ref(&z)).unwrap().values()[0];
        let expect = z[0] * z[1] * z[1] / 2f64.sqrt();
        assert!((v - expect).norm() < 1e-10);
    }

    #[test]
    fn linear_in_f() {
        let mut r = rng(42);
        let (a, b) = (random_complex(&mut r, 1, 5), random_complex(&mut r, 1, 5));
        let zs = vec![vec![c(0.7, -1.2)], vec![c(-0.3, 0.1)]];
        let sum = bargmann_expansion(&a.add(&b).unwrap(), &zs).unwrap();
        let va = bargmann_expansion(&a, &zs).unwrap();
        let vb = bargmann_expansion(&b, &zs).unwrap();
        for k in 0..2 {
            assert!((sum.values()[k] - va.values()[k] - vb.values()[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn identities_degenerate_at_zero_shift() {
        let e = bargmann_identity_check(&h(0), &[0.0], &[0.0], &square_grid(1.5, 5), 64).unwrap();
        assert!(e.translation < 1e-15 && e.modulation < 1e-15);
    }

    #[test]
    fn identities_hold() {
        let zs = square_grid(1.5, 5);
        let e = bargmann_identity_check(&h(0), &[1.0], &[0.0], &zs, 96).unwrap();
        assert!(e.translation < 1e-8, "{e:?}");
        let e = bargmann_identity_check(&h(1), &[0.0], &[0.7], &zs, 96).unwrap();
        assert!(e.modulation < 1e-8, "{e:?}");
        for f in [h(0), h(1)] {
            for &(x0, xi0) in &[(2.0, -2.0), (-1.3, 0.4), (0.5, 2.0)] {
                let e = bargmann_identity_check(&f, &[x0], &[xi0], &square_grid(2f64.sqrt(), 5), 96).unwrap();
                assert!(e.translation < 1e-8 && e.modulation < 1e-8, "{x0} {xi0}: {e:?}");
            }
        }
    }

    #[test]
    fn literal_translation_scaling_fails() {
        // e^{√2⟨z,x₀⟩ + |x₀|²/2} 𝔙f(z + √2 x₀) at f = h_0, z = 0, x₀ = 1
        let lhs = bargmann(&translate(&h(0), &[1.0]).unwrap(), &[vec![c(0.0, 0.0)]], 64).unwrap().values()[0];
        let base = bargmann(&h(0), &[vec![c(2f64.sqrt(), 0.0)]], 64).unwrap().values()[0];
        let literal = 0.5f64.exp() * base;
        assert!((lhs.re - (-0.25f64).exp()).abs() < 1e-12);
        assert!((lhs - literal).norm() > 0.5);
    }

    #[test]
    fn constant_transform_has_no_growth() {
        let radii: Vec<f64> = (1..=12).map(|k| 0.5 * k as f64).collect();
        let zs = polar_points(&radii, 8);
        let samples = BargmannSamples::new(zs.clone(), vec![c(1.0, 0.0); zs.len()]).unwrap();
        let g = a_space_growth_check(&samples, Order::Real(0.5), 0.5).unwrap();
        assert_eq!(g.power, 0.0);
        assert!(g.law_rate.abs() < 1e-12 && g.holds);
    }

    #[test]
    fn gaussian_image_grows_like_a_sixth() {
        let radii: Vec<f64> = (1..=12).map(|k| 0.5 * k as f64).collect();
        let zs = polar_points(&radii, 16);
        let samples = bargmann(&SampledFunction::gaussian(1.0, 1), &zs, 128).unwrap();
        // 𝔙(e^{-x²})(z) = π^{-1/4} √(2π/3) e^{-z²/6}
        let k = std::f64::consts::PI.powf(-0.25) * (2.0 * std::f64::consts::PI / 3.0).sqrt();
        for (z, &v) in zs.iter().zip(samples.values()) {
            let expect = (-z[0] * z[0] / 6.0).exp() * k;
            assert!((v - expect).norm() < 1e-9 * expect.norm().max(1.0));
        }
        let g = a_space_growth_check(&samples, Order::Real(0.5), 0.5).unwrap();
        assert!((g.power - 2.0).abs() < 0.051, "{g:?}");
        assert!((g.law_rate - 1.0 / 6.0).abs() < 1e-6 && g.holds, "{g:?}");
    }

    #[test]
    fn cubic_monomial_is_polynomial_growth() {
        let radii: Vec<f64> = (1..=12).map(|k| 0.5 * k as f64).collect();
        let zs = polar_points(&radii, 8);
        let samples = bargmann_expansion(&HermiteExpansion::basis(&[3].into()), &zs).unwrap();
        let g = a_space_growth_check(&samples, Order::Flat(1.0), 1.0).unwrap();
        assert_eq!(g.power, 0.0);
        assert!((g.power_rate - 3.0).abs() < 1e-6, "{g:?}");
    }

    #[test]
    fn degenerate_samples() {
        let zs = polar_points(&[0.5, 1.0, 6.0], 4);
        let samples = BargmannSamples::new(zs.clone(), vec![c(0.0, 0.0); zs.len()]).unwrap();
        assert!(matches!(a_space_growth_check(&samples, Order::Real(0.5), 0.5), Err(Error::DegenerateSamples(_))));
        assert!(a_space_growth_check(&samples, Order::Real(0.7), 0.5).is_err());
    }
}
