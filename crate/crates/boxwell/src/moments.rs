//! Momentum moments <p^2k> of the box modes with explicit cutoff dependence.
//!
//! The truncated moments integrate p^2k |phi_n(p)|^2 over [-P, P]. The
//! density falls off like trig^2 / p^4, so k = 0 and k = 1 converge while
//! every k >= 2 grows like P^{2k-3}; the classifier detects which regime a
//! moment is in from a geometric cutoff ladder and fits the growth law.

use std::f64::consts::PI;

use thiserror::Error;

use crate::analytic;
use crate::domain::{BoxConfig, MomentumGrid, QuantumNumber};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentError {
    #[error("cutoff classification needs at least 4 cutoffs, got {got}")]
    TooFewCutoffs { got: usize },
    #[error("cutoffs must be strictly increasing")]
    NotIncreasing,
    #[error("cutoffs must be geometrically spaced (constant ratio), got ratios {ratios:?}")]
    NonGeometric { ratios: Vec<f64> },
    #[error(
        "moment growth is neither convergent nor a clean power law (growth ratio {growth_ratio:.4}, fit residual {fit_residual:.3e})"
    )]
    InconsistentGrowth { growth_ratio: f64, fit_residual: f64 },
}

/// Quadrature layout for the oscillatory density: panels are aligned to the
/// density's oscillation period 2 pi hbar / L so the trig^2 factor cannot
/// alias the growth-law fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRule {
    pub panels_per_period: usize,
    pub order: usize,
}

impl Default for MomentRule {
    fn default() -> Self {
        Self { panels_per_period: 2, order: 8 }
    }
}

fn moment_grid(cutoff: f64, cfg: &BoxConfig, rule: &MomentRule) -> MomentumGrid {
    let period = 2.0 * PI * cfg.hbar() / cfg.length();
    let per_side = ((cutoff / period).ceil() as usize).max(1) * rule.panels_per_period;
    MomentumGrid::gauss_legendre(cutoff, 2 * per_side, rule.order)
        .expect("validated moment grid parameters")
}

/// Integral of p^{2k} |phi_n(p)|^2 over [-P, P].
pub fn truncated_moment(
    n: QuantumNumber,
    k: u32,
    cutoff: f64,
    cfg: &BoxConfig,
    rule: &MomentRule,
) -> f64 {
    truncated_power_moment(n, 2 * k, cutoff, cfg, rule)
}

/// Integral of p^{power} |phi_n(p)|^2 over [-P, P] for any power; odd powers
/// cancel to rounding on the symmetric grid.
pub fn truncated_power_moment(
    n: QuantumNumber,
    power: u32,
    cutoff: f64,
    cfg: &BoxConfig,
    rule: &MomentRule,
) -> f64 {
    let grid = moment_grid(cutoff, cfg, rule);
    grid.nodes()
        .iter()
        .zip(grid.weights())
        .map(|(&p, &w)| w * p.powi(power as i32) * analytic::mom_density(p, n, cfg))
        .sum()
}

/// Growth-law fit data over the last three cutoffs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitInfo {
    /// Exponent: fitted log-log slope for a diverging moment, the assumed
    /// tail exponent 2k-3 for a convergent one.
    pub exponent: f64,
    /// Slope of the least-squares line of M against P^{2k-3}.
    pub coefficient: f64,
    /// Largest relative deviation of that line over the fit window.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Converged { value: f64, tail_estimate: f64 },
    Diverges,
}

/// Cutoff ladder, truncated values, and the convergence/divergence verdict
/// for one (n, k) moment.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub n: u32,
    pub k: u32,
    pub cutoffs: Vec<f64>,
    pub values: Vec<f64>,
    pub verdict: Verdict,
    pub fit: FitInfo,
}

/// Relative growth below which the ladder counts as converged.
const CONVERGED_GROWTH: f64 = 0.02;
/// Largest acceptable relative residual of the power-law fit.
const FIT_RESIDUAL_LIMIT: f64 = 0.05;

/// Classify the cutoff dependence of <p^2k> on a geometric ladder of at
/// least four cutoffs.
pub fn classify_moment(
    n: QuantumNumber,
    k: u32,
    cutoffs: &[f64],
    cfg: &BoxConfig,
    rule: &MomentRule,
) -> Result<MomentReport, MomentError> {
    if cutoffs.len() < 4 {
        return Err(MomentError::TooFewCutoffs { got: cutoffs.len() });
    }
    if !cutoffs.windows(2).all(|w| w[1] > w[0]) {
        return Err(MomentError::NotIncreasing);
    }
    let ratios: Vec<f64> = cutoffs.windows(2).map(|w| w[1] / w[0]).collect();
    let ratio0 = ratios[0];
    if !ratios.iter().all(|r| (r / ratio0 - 1.0).abs() < 1e-9) {
        return Err(MomentError::NonGeometric { ratios });
    }

    let values: Vec<f64> = cutoffs
        .iter()
        .map(|&p| truncated_moment(n, k, p, cfg, rule))
        .collect();

    let len = values.len();
    let tail_exponent = 2.0 * k as f64 - 3.0;
    // least squares of M against x = P^{2k-3} over the last three cutoffs
    let window: Vec<(f64, f64)> = cutoffs[len - 3..]
        .iter()
        .zip(&values[len - 3..])
        .map(|(&p, &m)| (p.powf(tail_exponent), m))
        .collect();
    let (intercept, slope) = linear_fit(&window);
    let fit_residual = window
        .iter()
        .map(|&(x, m)| ((intercept + slope * x) - m).abs() / m.abs().max(f64::MIN_POSITIVE))
        .fold(0.0f64, f64::max);

    let growth_ratio = values[len - 1] / values[len - 2];
    if (growth_ratio - 1.0).abs() <= CONVERGED_GROWTH {
        // tail vanishes as P^{2k-3} with 2k-3 < 0, so the intercept is the
        // extrapolated limit
        let value = intercept;
        let tail_estimate = (values[len - 1] - intercept).abs();
        return Ok(MomentReport {
            n: n.get(),
            k,
            cutoffs: cutoffs.to_vec(),
            values,
            verdict: Verdict::Converged { value, tail_estimate },
            fit: FitInfo { exponent: tail_exponent, coefficient: slope, residual: fit_residual },
        });
    }

    // diverging branch: fit the growth exponent on log-log axes
    let log_window: Vec<(f64, f64)> = cutoffs[len - 3..]
        .iter()
        .zip(&values[len - 3..])
        .map(|(&p, &m)| (p.ln(), m.ln()))
        .collect();
    let (_, exponent) = linear_fit(&log_window);
    if exponent > 0.25 && fit_residual <= FIT_RESIDUAL_LIMIT {
        Ok(MomentReport {
            n: n.get(),
            k,
            cutoffs: cutoffs.to_vec(),
            values,
            verdict: Verdict::Diverges,
            fit: FitInfo { exponent, coefficient: slope, residual: fit_residual },
        })
    } else {
        Err(MomentError::InconsistentGrowth { growth_ratio, fit_residual })
    }
}

fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (intercept, slope)
}
