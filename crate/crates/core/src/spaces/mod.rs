//! Pilipović weights and norms, Hermite-coefficient decay classification,
//! and Gelfand–Shilov seminorm and decay diagnostics.

mod classify;
mod diagnostics;

pub use classify::{classify, CandidateFit, ClassificationReport, Verdict, FLAT_CANDIDATES, NOISE_FLOOR_REL};
pub use diagnostics::{
    gs_decay_check, gs_seminorm_estimate, oscillator_growth_check, DecayCheck, DerivativeOptions, Grid,
    OscillatorGrowth, SeminormEstimate,
};

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::hermite::HermiteExpansion;
use crate::multiindex::MultiIndex;
use crate::scalar::Real;

/// Order of a Pilipović space: 0, a positive real s, or ♭_σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order<T> {
    Zero,
    Real(T),
    Flat(T),
}

impl<T: Real> PartialOrd for Order<T> {
    /// 0 < s₁ < ♭_σ < s₂ whenever s₁ < ½ ≤ s₂, and ♭_{σ₁} < ♭_{σ₂} for σ₁ < σ₂.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let half = T::lit(0.5);
        match (self, other) {
            (Order::Zero, Order::Zero) => Some(Ordering::Equal),
            (Order::Zero, _) => Some(Ordering::Less),
            (_, Order::Zero) => Some(Ordering::Greater),
            (Order::Real(a), Order::Real(b)) => a.partial_cmp(b),
            (Order::Flat(a), Order::Flat(b)) => a.partial_cmp(b),
            (Order::Real(s), Order::Flat(_)) => Some(if *s < half { Ordering::Less } else { Ordering::Greater }),
            (Order::Flat(_), Order::Real(s)) => Some(if *s < half { Ordering::Greater } else { Ordering::Less }),
        }
    }
}

impl<T: Real> fmt::Display for Order<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Zero => write!(f, "0"),
            Order::Real(s) => write!(f, "{s}"),
            Order::Flat(sigma) => write!(f, "flat({sigma})"),
        }
    }
}

/// Roumieu ("for some r") or Beurling ("for every r") quantification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    Roumieu,
    Beurling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Function,
    Distribution,
}

/// A Pilipović space ℋ_{s;r} (function side) or ℋ'_{s;r} (distribution side).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceSpec<T> {
    pub order: Order<T>,
    pub radius: T,
    pub regularity: Regularity,
    pub side: Side,
}

impl<T: Real> SpaceSpec<T> {
    pub fn new(order: Order<T>, radius: T, regularity: Regularity, side: Side) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
        }
        match order {
            Order::Real(v) | Order::Flat(v) if !(v > T::zero()) => {
                return Err(Error::InvalidInput(format!("order parameter must be positive, got {v}")))
            }
            _ => {}
        }
        Ok(Self { order, radius, regularity, side })
    }

    /// Roumieu function-side space.
    pub fn function(order: Order<T>, radius: T) -> Result<Self> {
        Self::new(order, radius, Regularity::Roumieu, Side::Function)
    }

    /// Roumieu distribution-side space.
    pub fn distribution(order: Order<T>, radius: T) -> Result<Self> {
        Self::new(order, radius, Regularity::Roumieu, Side::Distribution)
    }
}

/// ln ϑ_{r,s}(α) for the given sign: −1 for the function weight, +1 for the
/// dual weight. Order 0 carries the trivial weight.
fn ln_weight_signed<T: Real>(spec: &SpaceSpec<T>, alpha: &MultiIndex, sign: T) -> T {
    let n = T::from_usize_lossy(alpha.order());
    match spec.order {
        Order::Zero => T::zero(),
        Order::Real(s) => {
            if alpha.order() == 0 {
                T::zero()
            } else {
                sign * spec.radius * n.powf(T::one() / (T::lit(2.0) * s))
            }
        }
        Order::Flat(sigma) => {
            n * spec.radius.ln() + sign * T::lit(alpha.ln_factorial()) / (T::lit(2.0) * sigma)
        }
    }
}

/// ln ϑ_{r,s}(α).
pub fn ln_weight<T: Real>(spec: &SpaceSpec<T>, alpha: &MultiIndex) -> T {
    ln_weight_signed(spec, alpha, -T::one())
}

/// ln ϑ'_{r,s}(α).
pub fn ln_dual_weight<T: Real>(spec: &SpaceSpec<T>, alpha: &MultiIndex) -> T {
    ln_weight_signed(spec, alpha, T::one())
}

/// ϑ_{r,s}(α) = e^{-r|α|^{1/(2s)}} for real s, r^{|α|} α!^{-1/(2σ)} for ♭_σ.
pub fn weight<T: Real>(spec: &SpaceSpec<T>, alpha: &MultiIndex) -> T {
    ln_weight(spec, alpha).exp()
}

/// ϑ'_{r,s}(α) = e^{r|α|^{1/(2s)}} for real s, r^{|α|} α!^{1/(2σ)} for ♭_σ.
pub fn dual_weight<T: Real>(spec: &SpaceSpec<T>, alpha: &MultiIndex) -> T {
    ln_dual_weight(spec, alpha).exp()
}

/// sup_α |c_α| / ϑ (or / ϑ' on the distribution side), over stored α.
///
/// For order 0 the weight is identically 1 and the norm is the coefficient
/// sup-norm over the stored range.
pub fn pil_norm<T: Real>(f: &HermiteExpansion<T>, spec: &SpaceSpec<T>) -> T {
    let mut best = T::zero();
    for (alpha, c) in f.iter() {
        let m = c.norm();
        if m == T::zero() {
            continue;
        }
        let lw = match spec.side {
            Side::Function => ln_weight(spec, alpha),
            Side::Distribution => ln_dual_weight(spec, alpha),
        };
        best = best.max((m.ln() - lw).exp());
    }
    best
}

/// ‖f‖_(0,N) = max_{|α|≤N} |c_α|.
pub fn norm_0n<T: Real>(f: &HermiteExpansion<T>, n: usize) -> T {
    (0..=n.min(f.degree())).map(|k| f.shell_max(k)).fold(T::zero(), T::max)
}

/// Σ_s^σ ≠ {0} (Beurling) or 𝒮_s^σ ≠ {0} (Roumieu).
pub fn gelfand_shilov_nontrivial(s: f64, sigma: f64, regularity: Regularity) -> bool {
    let sum_ok = s + sigma >= 1.0;
    match regularity {
        Regularity::Roumieu => sum_ok,
        Regularity::Beurling => sum_ok && !(s == 0.5 && sigma == 0.5),
    }
}

/// Relation of a Pilipović space of real order to the Fourier invariant
/// Gelfand–Shilov space of the same order.
pub fn gelfand_shilov_label(order: Order<f64>, regularity: Regularity) -> &'static str {
    match (order, regularity) {
        (Order::Real(s), Regularity::Beurling) if s > 0.5 => "equals the Gelfand-Shilov space Sigma_s",
        (Order::Real(s), Regularity::Roumieu) if s >= 0.5 => "equals the Gelfand-Shilov space S_s",
        (Order::Zero, _) => "Hermite polynomials only; no Gelfand-Shilov counterpart",
        _ => "strictly larger than the (trivial) Gelfand-Shilov space of the same order",
    }
}
