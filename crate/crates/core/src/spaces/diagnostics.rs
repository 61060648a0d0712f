//! Grid-based Gelfand–Shilov seminorm estimates, pointwise decay checks and
//! harmonic-oscillator growth fits.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result, Warning};
use crate::fit::least_squares;
use crate::hermite::functions::hermite_functions;
use crate::hermite::{analyze, HermiteExpansion, Ladder, SampledFunction};
use crate::multiindex::{graded_enumerate, ln_factorial_power, AnisotropicOrder, MultiIndex};
use crate::scalar::Real;
use crate::special::ln_factorial;

/// Symmetric sampling grid {k·step : |k·step| ≤ extent} on each axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub extent: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(extent: f64, step: f64) -> Result<Self> {
        if !(extent >= 0.0) || !(step > 0.0) {
            return Err(Error::InvalidInput(format!("bad grid extent {extent} / step {step}")));
        }
        Ok(Self { extent, step })
    }

    /// [−L, L] with L = √(2N+1) + 4, a little past the last turning point.
    pub fn for_degree(degree: usize, dim: usize) -> Self {
        let step = match dim {
            1 => 0.02,
            2 => 0.1,
            _ => 0.25,
        };
        Self { extent: ((2 * degree + 1) as f64).sqrt() + 4.0, step }
    }

    pub fn axis(&self) -> Vec<f64> {
        let m = (self.extent / self.step + 1e-9).floor() as i64;
        (-m..=m).map(|k| k as f64 * self.step).collect()
    }

    /// Product grid in `dim` variables, first axis slowest.
    pub fn points(&self, dim: usize) -> Vec<Vec<f64>> {
        let axis = self.axis();
        let mut out = vec![Vec::with_capacity(dim)];
        for _ in 0..dim {
            out = out
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

/// How a sampled function is turned into an expansion before differentiating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeOptions {
    pub degree: usize,
    pub n_quad: usize,
    /// Threshold on the top degree shell for [`Warning::QuadratureUnderResolved`].
    pub tolerance: f64,
    /// Coefficients below this fraction of the largest are dropped.
    pub denoise: f64,
}

impl DerivativeOptions {
    pub fn with_degree(degree: usize) -> Self {
        Self { degree, n_quad: 2 * degree + 16, tolerance: 1e-10, denoise: 1e-14 }
    }
}

impl Default for DerivativeOptions {
    fn default() -> Self {
        Self::with_degree(64)
    }
}

fn expand<T: Real>(f: &SampledFunction<T>, opts: &DerivativeOptions) -> Result<(HermiteExpansion<T>, Vec<Warning>)> {
    let raw = analyze(f, opts.degree, opts.n_quad)?;
    let warnings = raw.check_resolution(opts.tolerance).into_iter().collect();
    Ok((raw.denoise(T::lit(opts.denoise)), warnings))
}

/// ∂^β F for every |β| ≤ max_order, in graded order.
fn derivatives<T: Real>(f: &HermiteExpansion<T>, max_order: usize) -> Result<Vec<(MultiIndex, HermiteExpansion<T>)>> {
    let betas = graded_enumerate(f.dim(), max_order);
    let mut out: Vec<(MultiIndex, HermiteExpansion<T>)> = Vec::with_capacity(betas.len());
    let mut pos: HashMap<MultiIndex, usize> = HashMap::new();
    for beta in betas {
        let d = match beta.entries().iter().rposition(|&b| b > 0) {
            None => f.clone(),
            Some(axis) => {
                let parent = beta.shifted(axis, -1).expect("positive entry");
                out[pos[&parent]].1.apply_ladder(axis, Ladder::Differentiate)?
            }
        };
        pos.insert(beta.clone(), out.len());
        out.push((beta, d));
    }
    Ok(out)
}

/// |∂^β F(x)| for every listed derivative at every grid point.
fn sample_derivatives<T: Real>(derivs: &[(MultiIndex, HermiteExpansion<T>)], points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let top = derivs.iter().map(|(_, d)| d.degree()).max().unwrap_or(0);
    points
        .par_iter()
        .map(|p| {
            let tables: Vec<Vec<T>> = p.iter().map(|&x| hermite_functions(top, T::lit(x))).collect();
            derivs.iter().map(|(_, d)| d.synthesize_with(&tables).norm().to_f64_lossy()).collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeminormEstimate {
    pub value: f64,
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub point: Vec<f64>,
    pub warnings: Vec<Warning>,
}

/// max over |α| ≤ α_max, |β| ≤ β_max and the grid of
/// |x^α ∂^β f(x)| / (h^{|α|+|β|} α!^s β!^σ).
#[allow(clippy::too_many_arguments)]
pub fn gs_seminorm_estimate<T: Real>(
    f: &SampledFunction<T>,
    s: f64,
    sigma: f64,
    h: f64,
    alpha_max: usize,
    beta_max: usize,
    grid: &Grid,
    opts: &DerivativeOptions,
) -> Result<SeminormEstimate> {
    if !(s > 0.0 && sigma > 0.0 && h > 0.0) {
        return Err(Error::InvalidInput(format!("s, sigma, h must be positive: {s}, {sigma}, {h}")));
    }
    let dim = f.dim();
    let (expansion, warnings) = expand(f, opts)?;
    let derivs = derivatives(&expansion, beta_max)?;
    let points = grid.points(dim);
    let values = sample_derivatives(&derivs, &points);
    let alphas = graded_enumerate(dim, alpha_max);
    let ln_h = h.ln();

    let mut best = (f64::NEG_INFINITY, 0usize, 0usize, 0usize);
    for (pi, p) in points.iter().enumerate() {
        let ln_x: Vec<f64> = p.iter().map(|x| x.abs().ln()).collect();
        for (bi, (beta, _)) in derivs.iter().enumerate() {
            let v = values[pi][bi];
            if v == 0.0 {
                continue;
            }
            let base = v.ln() - beta.order() as f64 * ln_h - sigma * beta.ln_factorial();
            for (ai, alpha) in alphas.iter().enumerate() {
                let mut lx = 0.0;
                for (&a, &l) in alpha.entries().iter().zip(&ln_x) {
                    if a > 0 {
                        lx += a as f64 * l;
                    }
                }
                let total = base + lx - alpha.order() as f64 * ln_h - s * alpha.ln_factorial();
                if total > best.0 {
                    best = (total, ai, bi, pi);
                }
            }
        }
    }
    if best.0 == f64::NEG_INFINITY {
        return Ok(SeminormEstimate {
            value: 0.0,
            alpha: MultiIndex::zero(dim),
            beta: MultiIndex::zero(dim),
            point: vec![0.0; dim],
            warnings,
        });
    }
    Ok(SeminormEstimate {
        value: best.0.exp(),
        alpha: alphas[best.1].clone(),
        beta: derivs[best.2].0.clone(),
        point: points[best.3].clone(),
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayCheck {
    pub holds: bool,
    pub worst_ratio: f64,
    pub worst_alpha: MultiIndex,
    pub worst_point: Vec<f64>,
    pub warnings: Vec<Warning>,
}

/// Derivative samples below this fraction of their grid maximum are noise.
const DERIVATIVE_NOISE_REL: f64 = 1e-13;

/// Checks |∂^α f(x)| ≤ cap · h^{|α|} α!^𝝈 e^{−r Σ_j |x_j|^{1/s_j}} for all
/// |α| ≤ `order_max` on the grid, where x_j are the coordinate blocks of 𝒔.
///
/// α = 0 uses f directly; higher derivatives go through the expansion.
#[allow(clippy::too_many_arguments)]
pub fn gs_decay_check<T: Real>(
    f: &SampledFunction<T>,
    s: &AnisotropicOrder<f64>,
    sigma: &AnisotropicOrder<f64>,
    h: f64,
    r: f64,
    order_max: usize,
    grid: &Grid,
    cap: f64,
    opts: &DerivativeOptions,
) -> Result<DecayCheck> {
    let dim = f.dim();
    if s.dim() != dim || sigma.dim() != dim {
        return Err(Error::DimMismatch { expected: dim, got: if s.dim() != dim { s.dim() } else { sigma.dim() } });
    }
    if !(h > 0.0 && r > 0.0 && cap > 0.0) {
        return Err(Error::InvalidInput(format!("h, r, cap must be positive: {h}, {r}, {cap}")));
    }
    let points = grid.points(dim);
    let ln_envelope: Vec<f64> = points
        .iter()
        .map(|p| {
            let mut start = 0;
            let mut acc = 0.0;
            for (&sj, &dj) in s.values().iter().zip(s.block_dims()) {
                let norm = p[start..start + dj].iter().map(|x| x * x).sum::<f64>().sqrt();
                acc += norm.powf(1.0 / sj);
                start += dj;
            }
            -r * acc
        })
        .collect();

    let mut worst = (f64::NEG_INFINITY, MultiIndex::zero(dim), 0usize);
    let direct: Vec<f64> = points
        .par_iter()
        .map(|p| {
            let x: Vec<T> = p.iter().map(|&v| T::lit(v)).collect();
            f.eval(&x).norm().to_f64_lossy()
        })
        .collect();
    for (pi, &v) in direct.iter().enumerate() {
        if v > 0.0 {
            let l = v.ln() - ln_envelope[pi];
            if l > worst.0 {
                worst = (l, MultiIndex::zero(dim), pi);
            }
        }
    }

    let mut warnings = Vec::new();
    if order_max > 0 {
        let (expansion, w) = expand(f, opts)?;
        warnings = w;
        let derivs: Vec<_> = derivatives(&expansion, order_max)?.into_iter().skip(1).collect();
        let values = sample_derivatives(&derivs, &points);
        for (bi, (alpha, _)) in derivs.iter().enumerate() {
            let peak = values.iter().map(|row| row[bi]).fold(0.0, f64::max);
            let floor = DERIVATIVE_NOISE_REL * peak;
            let ln_den = alpha.order() as f64 * h.ln() + ln_factorial_power(alpha, sigma)?;
            for (pi, row) in values.iter().enumerate() {
                let v = row[bi];
                if v <= floor || v == 0.0 {
                    continue;
                }
                let l = v.ln() - ln_den - ln_envelope[pi];
                if l > worst.0 {
                    worst = (l, alpha.clone(), pi);
                }
            }
        }
    }

    let worst_ratio = worst.0.exp();
    Ok(DecayCheck {
        holds: worst_ratio <= cap,
        worst_ratio,
        worst_alpha: worst.1,
        worst_point: points.get(worst.2).cloned().unwrap_or_default(),
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorGrowth {
    /// Fitted exponent 2s in ‖H^N f‖_∞ ≈ C h^N N!^{2s}.
    pub two_s: f64,
    pub h: f64,
    /// ln ‖H^N f‖_∞ for N = 0..=N_max.
    pub ln_norms: Vec<f64>,
    /// The fit does not exceed the declared 2s by more than 0.2.
    pub consistent: bool,
    pub warnings: Vec<Warning>,
}

/// Fits ln ‖H_d^N f‖_∞ = a + N ln h + 2s ln N! over N = 0..=n_max.
///
/// The sup is taken on [`Grid::for_degree`]; each power is evaluated as
/// Σ c_α (λ_α/λ_max)^N h_α and rescaled in log space.
pub fn oscillator_growth_check<T: Real>(
    f: &SampledFunction<T>,
    s: f64,
    n_max: u32,
    opts: &DerivativeOptions,
) -> Result<OscillatorGrowth> {
    if n_max < 3 {
        return Err(Error::InvalidInput(format!("need N_max >= 3 to fit three parameters, got {n_max}")));
    }
    let dim = f.dim();
    let (expansion, warnings) = expand(f, opts)?;
    if expansion.is_zero() {
        return Err(Error::DegenerateFit("the expansion vanishes".into()));
    }
    let lambda_max = (2 * expansion.degree() + dim) as f64;
    let points = Grid::for_degree(expansion.degree(), dim).points(dim);
    let degree = expansion.degree();
    let terms: Vec<(Vec<usize>, f64, num_complex::Complex<f64>)> = expansion
        .iter()
        .filter(|(_, c)| c.norm() > T::zero())
        .map(|(a, c)| {
            let lam = (2 * a.order() + dim) as f64 / lambda_max;
            let idx = a.entries().iter().map(|&v| v as usize).collect();
            (idx, lam, num_complex::Complex::new(c.re.to_f64_lossy(), c.im.to_f64_lossy()))
        })
        .collect();
    let powers = n_max as usize + 1;
    let sups: Vec<f64> = points
        .par_iter()
        .map(|p| {
            let tables: Vec<Vec<f64>> = p.iter().map(|&x| hermite_functions(degree, x)).collect();
            let mut acc = vec![num_complex::Complex::new(0.0, 0.0); powers];
            for (idx, lam, c) in &terms {
                let basis: f64 = idx.iter().enumerate().map(|(ax, &a)| tables[ax][a]).product();
                let mut v = c * basis;
                for slot in acc.iter_mut() {
                    *slot += v;
                    v *= *lam;
                }
            }
            acc.into_iter().map(|z| z.norm()).collect::<Vec<_>>()
        })
        .reduce(|| vec![0.0; powers], |a, b| a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect());

    let ln_norms: Vec<f64> = sups.iter().enumerate().map(|(n, &v)| v.ln() + n as f64 * lambda_max.ln()).collect();
    if ln_norms.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateFit("an oscillator power vanished on the grid".into()));
    }
    let ns: Vec<f64> = (0..powers).map(|n| n as f64).collect();
    let lf: Vec<f64> = (0..powers).map(|n| ln_factorial(n as u64)).collect();
    let fit = least_squares(&[vec![1.0; powers], ns, lf], &ln_norms)
        .ok_or_else(|| Error::DegenerateFit("oscillator growth fit is rank deficient".into()))?;
    let two_s = fit.coefficients[2];
    Ok(OscillatorGrowth {
        two_s,
        h: fit.coefficients[1].exp(),
        ln_norms,
        consistent: two_s <= 2.0 * s + 0.2,
        warnings,
    })
}
