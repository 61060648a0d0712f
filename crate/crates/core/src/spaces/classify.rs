//! Empirical classification of an expansion by the decay of its degree maxima.

use rayon::prelude::*;

use super::{gelfand_shilov_label, Order, Regularity, Side};
use crate::fit::least_squares;
use crate::hermite::HermiteExpansion;
use crate::scalar::Real;
use crate::special::ln_factorial;

/// Degree maxima below this fraction of the largest one are left out of fits.
pub const NOISE_FLOOR_REL: f64 = 1e-14;

/// σ values tried for the ♭_σ laws.
pub const FLAT_CANDIDATES: [f64; 3] = [0.5, 1.0, 2.0];

/// Fewer nonzero degrees than this make an expansion "finite".
const MIN_DEGREES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    FiniteExpansion,
    FunctionClass,
    DistributionClass,
}

/// One candidate decay law and how well it fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateFit {
    pub order: Order<f64>,
    pub side: Side,
    pub radius: f64,
    pub intercept: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub best_order: Order<f64>,
    pub fitted_radius: f64,
    /// RMS of the log-space fit of the winning law.
    pub residual: f64,
    pub verdict: Verdict,
    /// The maxima grow at least as fast as the fastest candidate distribution law.
    pub insufficient_decay: bool,
    /// m_k = max_{|α|=k} |c_α| for k = 0..=N.
    pub degree_maxima: Vec<f64>,
    /// Degrees that entered the fit.
    pub fit_degrees: Vec<usize>,
    pub candidates: Vec<CandidateFit>,
    pub annotation: &'static str,
}

impl ClassificationReport {
    pub fn side(&self) -> Option<Side> {
        match self.verdict {
            Verdict::FiniteExpansion => None,
            Verdict::FunctionClass => Some(Side::Function),
            Verdict::DistributionClass => Some(Side::Distribution),
        }
    }
}

/// Real-order grid 0.10, 0.15, …, 2.00.
pub fn real_candidates() -> Vec<f64> {
    (2..=40).map(|i| i as f64 * 0.05).collect()
}

/// min_{|α|=k} ln α! in d variables, attained at the most balanced α.
fn ln_balanced_factorial(k: usize, dim: usize) -> f64 {
    let q = (k / dim) as u64;
    let rem = k % dim;
    rem as f64 * ln_factorial(q + 1) + (dim - rem) as f64 * ln_factorial(q)
}

fn finite(maxima: Vec<f64>) -> ClassificationReport {
    ClassificationReport {
        best_order: Order::Zero,
        fitted_radius: 0.0,
        residual: 0.0,
        verdict: Verdict::FiniteExpansion,
        insufficient_decay: false,
        degree_maxima: maxima,
        fit_degrees: Vec::new(),
        candidates: Vec::new(),
        annotation: gelfand_shilov_label(Order::Zero, Regularity::Roumieu),
    }
}

/// Fits log m_k against −ρ k^{1/(2s)} for each s on the real grid and against
/// k log r ∓ (1/(2σ)) log k! for each ♭_σ, and keeps the smallest residual.
///
/// `tolerance` decides which degrees count as nonzero.
pub fn classify<T: Real>(f: &HermiteExpansion<T>, tolerance: f64) -> ClassificationReport {
    let maxima: Vec<f64> = (0..=f.degree()).map(|k| f.shell_max(k).to_f64_lossy()).collect();
    let nonzero = maxima.iter().filter(|&&m| m > tolerance && m > 0.0).count();
    if nonzero < MIN_DEGREES {
        return finite(maxima);
    }
    let top = maxima.iter().cloned().fold(0.0, f64::max);
    let floor = (NOISE_FLOOR_REL * top).max(tolerance);
    let fit_degrees: Vec<usize> = (0..maxima.len()).filter(|&k| maxima[k] > floor).collect();
    if fit_degrees.len() < 3 {
        return finite(maxima);
    }
    let ks: Vec<f64> = fit_degrees.iter().map(|&k| k as f64).collect();
    let y: Vec<f64> = fit_degrees.iter().map(|&k| maxima[k].ln()).collect();
    let lf: Vec<f64> = fit_degrees.iter().map(|&k| ln_balanced_factorial(k, f.dim())).collect();
    let ones = vec![1.0; ks.len()];

    let mut jobs: Vec<(Order<f64>, f64)> = real_candidates().into_iter().map(|s| (Order::Real(s), 0.0)).collect();
    for &sigma in &FLAT_CANDIDATES {
        jobs.push((Order::Flat(sigma), -1.0));
        jobs.push((Order::Flat(sigma), 1.0));
    }

    let candidates: Vec<CandidateFit> = jobs
        .par_iter()
        .filter_map(|&(order, sign)| match order {
            Order::Real(s) => {
                let x: Vec<f64> = ks.iter().map(|&k| k.powf(1.0 / (2.0 * s))).collect();
                let fit = least_squares(&[ones.clone(), x], &y)?;
                let rho = -fit.coefficients[1];
                let side = if rho > 0.0 { Side::Function } else { Side::Distribution };
                Some(CandidateFit { order, side, radius: rho.abs(), intercept: fit.coefficients[0], residual: fit.rms })
            }
            Order::Flat(sigma) => {
                // function side: y = a + k ln r − L/(2σ); distribution side: + L/(2σ)
                let shifted: Vec<f64> = y.iter().zip(&lf).map(|(&v, &l)| v - sign * l / (2.0 * sigma)).collect();
                let fit = least_squares(&[ones.clone(), ks.clone()], &shifted)?;
                let side = if sign < 0.0 { Side::Function } else { Side::Distribution };
                Some(CandidateFit {
                    order,
                    side,
                    radius: fit.coefficients[1].exp(),
                    intercept: fit.coefficients[0],
                    residual: fit.rms,
                })
            }
            Order::Zero => None,
        })
        .collect();

    let best = candidates
        .iter()
        .fold(None::<&CandidateFit>, |acc, c| match acc {
            Some(b) if b.residual <= c.residual => Some(b),
            _ => Some(c),
        })
        .copied();
    let Some(best) = best else {
        return finite(maxima);
    };
    let verdict = match best.side {
        Side::Function => Verdict::FunctionClass,
        Side::Distribution => Verdict::DistributionClass,
    };
    let fastest = real_candidates()[0];
    let insufficient_decay = verdict == Verdict::DistributionClass && best.order == Order::Real(fastest);
    ClassificationReport {
        best_order: best.order,
        fitted_radius: best.radius,
        residual: best.residual,
        verdict,
        insufficient_decay,
        degree_maxima: maxima,
        fit_degrees,
        candidates,
        annotation: gelfand_shilov_label(best.order, Regularity::Roumieu),
    }
}
