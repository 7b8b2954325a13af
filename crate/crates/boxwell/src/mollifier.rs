//! Position-space verifier built from smoothed step and delta functions.
//!
//! The wall-corrected Hamiltonian multiplies d/dx by a coefficient that is a
//! ratio of distributions at the walls. Nothing there has pointwise meaning,
//! so this module replaces the step by a Gaussian-smoothed step of width eps,
//! its derivative by the matching Gaussian bump, and checks the eigenvalue
//! relation weakly, paired against smooth test functions, as eps shrinks.
//!
//! Two operator variants are built on a uniform finite-difference grid:
//! [`OperatorVariant::Ratio`] divides the wall coefficient by the smoothed
//! box window, [`OperatorVariant::Plain`] does not. Away from the walls both
//! reduce to the pure kinetic operator.

use std::f64::consts::PI;
use std::sync::Arc;

use thiserror::Error;

use crate::analytic;
use crate::domain::{BoxConfig, DomainError, PositionGrid, QuantumNumber};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MollifierError {
    #[error("smoothing width must be positive and finite, got {eps}")]
    InvalidWidth { eps: f64 },
    #[error("grid step {step} does not resolve the mollifier; need step <= eps/8 = {limit}")]
    StepTooCoarse { step: f64, limit: f64 },
    #[error("grid padding {padding} must cover at least 4 smoothing widths ({limit})")]
    PaddingTooSmall { padding: f64, limit: f64 },
    #[error("test function {id} extends outside the operator grid")]
    SupportOutsideGrid { id: String },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Smoothed unit step: 0.5 erfc(-x / (eps sqrt(2))). Monotone, equals 1/2 at
/// x = 0, and tends to the sharp step pointwise away from 0 as eps shrinks.
pub fn theta_eps(x: f64, eps: f64) -> f64 {
    0.5 * libm::erfc(-x / (eps * std::f64::consts::SQRT_2))
}

/// Unit-mass Gaussian of standard deviation eps; the exact derivative of
/// [`theta_eps`].
pub fn delta_eps(x: f64, eps: f64) -> f64 {
    (-x * x / (2.0 * eps * eps)).exp() / (eps * (2.0 * PI).sqrt())
}

/// Which wall coefficient multiplies d/dx.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorVariant {
    /// [delta_eps(x) - delta_eps(x-L)] / [theta_eps(x) - theta_eps(x-L)],
    /// the denominator clamped below at `WINDOW_CLAMP` where the smoothed
    /// window vanishes outside the box.
    Ratio,
    /// The bare difference delta_eps(x) - delta_eps(x-L).
    Plain,
}

impl OperatorVariant {
    pub fn label(&self) -> &'static str {
        match self {
            OperatorVariant::Ratio => "ratio",
            OperatorVariant::Plain => "plain",
        }
    }
}

/// Lower clamp for the smoothed window in the ratio variant.
pub const WINDOW_CLAMP: f64 = 1e-12;

/// Smoothing width and finite-difference grid layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierParams {
    eps: f64,
    step: f64,
    padding: f64,
}

impl MollifierParams {
    /// Width eps with the default grid: step eps/8, padding 8 eps beyond
    /// each wall (the smoothed delta then carries unit mass on the grid to
    /// well below 1e-10).
    pub fn new(eps: f64) -> Result<Self, MollifierError> {
        Self::with_grid(eps, eps / 8.0, 8.0 * eps)
    }

    pub fn with_grid(eps: f64, step: f64, padding: f64) -> Result<Self, MollifierError> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(MollifierError::InvalidWidth { eps });
        }
        let limit = eps / 8.0;
        if !(step > 0.0 && step <= limit * (1.0 + 1e-12)) {
            return Err(MollifierError::StepTooCoarse { step, limit });
        }
        let pad_limit = 4.0 * eps;
        if padding < pad_limit {
            return Err(MollifierError::PaddingTooSmall { padding, limit: pad_limit });
        }
        Ok(Self { eps, step, padding })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn padding(&self) -> f64 {
        self.padding
    }

    /// Uniform trapezoid grid covering [-padding, L + padding] at a step no
    /// coarser than the requested one.
    pub fn grid(&self, cfg: &BoxConfig) -> Result<Arc<PositionGrid>, MollifierError> {
        let lower = -self.padding;
        let upper = cfg.length() + self.padding;
        let count = ((upper - lower) / self.step).ceil() as usize + 1;
        Ok(Arc::new(PositionGrid::uniform(cfg, lower, upper, count)?))
    }
}

/// Wall coefficient multiplying d/dx at position x, per variant.
pub fn wall_coefficient(x: f64, eps: f64, variant: OperatorVariant, cfg: &BoxConfig) -> f64 {
    let length = cfg.length();
    let numerator = delta_eps(x, eps) - delta_eps(x - length, eps);
    match variant {
        OperatorVariant::Plain => numerator,
        OperatorVariant::Ratio => {
            let window = theta_eps(x, eps) - theta_eps(x - length, eps);
            numerator / window.max(WINDOW_CLAMP)
        }
    }
}

/// Second-order finite-difference realization of one operator variant on a
/// uniform grid: -(hbar^2/2m) d^2/dx^2 + (hbar^2/2m) c(x) d/dx with central
/// stencils. Endpoint rows are left as zero; test functions vanish there.
#[derive(Debug, Clone)]
pub struct MollifiedOperator {
    grid: Arc<PositionGrid>,
    coefficient: Vec<f64>,
    step: f64,
    kinetic_factor: f64,
    variant: OperatorVariant,
    clamped_nodes: usize,
    eps: f64,
}

impl MollifiedOperator {
    pub fn build(
        params: &MollifierParams,
        variant: OperatorVariant,
        cfg: &BoxConfig,
    ) -> Result<Self, MollifierError> {
        let grid = params.grid(cfg)?;
        let nodes = grid.nodes();
        let step = nodes[1] - nodes[0];
        let eps = params.eps();
        let length = cfg.length();
        let mut clamped_nodes = 0usize;
        let coefficient: Vec<f64> = nodes
            .iter()
            .map(|&x| {
                if variant == OperatorVariant::Ratio {
                    let window = theta_eps(x, eps) - theta_eps(x - length, eps);
                    if window < WINDOW_CLAMP {
                        clamped_nodes += 1;
                    }
                }
                wall_coefficient(x, eps, variant, cfg)
            })
            .collect();
        Ok(Self {
            grid,
            coefficient,
            step,
            kinetic_factor: cfg.hbar() * cfg.hbar() / (2.0 * cfg.mass()),
            variant,
            clamped_nodes,
            eps,
        })
    }

    pub fn grid(&self) -> &Arc<PositionGrid> {
        &self.grid
    }

    pub fn variant(&self) -> OperatorVariant {
        self.variant
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Number of grid nodes where the ratio denominator was clamped.
    pub fn clamped_nodes(&self) -> usize {
        self.clamped_nodes
    }

    pub fn wall_coefficients(&self) -> &[f64] {
        &self.coefficient
    }

    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        let n = values.len();
        assert_eq!(n, self.grid.len(), "sample does not match the operator grid");
        let h = self.step;
        let mut out = vec![0.0; n];
        for i in 1..n - 1 {
            let second = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h);
            let first = (values[i + 1] - values[i - 1]) / (2.0 * h);
            out[i] = self.kinetic_factor * (-second + self.coefficient[i] * first);
        }
        out
    }
}

/// Smoothed eigenfunction candidate: the smoothed box window times the sine
/// formula evaluated on the whole line.
pub fn smoothed_mode(
    n: QuantumNumber,
    params: &MollifierParams,
    grid: &PositionGrid,
    cfg: &BoxConfig,
) -> Vec<f64> {
    let eps = params.eps();
    let length = cfg.length();
    grid.nodes()
        .iter()
        .map(|&x| (theta_eps(x, eps) - theta_eps(x - length, eps)) * analytic::u_extended(x, n, cfg))
        .collect()
}

/// Gaussian test function. `width` is the full width at half maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub id: String,
    pub center: f64,
    pub sigma: f64,
    pub amplitude: f64,
}

impl TestFunction {
    pub fn gaussian(id: impl Into<String>, center: f64, width: f64) -> Self {
        let sigma = width / (2.0 * (2.0 * 2f64.ln()).sqrt());
        Self { id: id.into(), center, sigma, amplitude: 1.0 }
    }

    pub fn value(&self, x: f64) -> f64 {
        let d = x - self.center;
        self.amplitude * (-d * d / (2.0 * self.sigma * self.sigma)).exp()
    }

    /// The bump's one-sigma core must lie inside the grid. Tails running off
    /// the grid edge are harmless: the operator residual they would pair
    /// with decays like the mollifier there.
    fn check_support(&self, grid: &PositionGrid) -> Result<(), MollifierError> {
        let reach = self.sigma;
        if self.amplitude != 0.0
            && (self.center - reach < grid.lower() || self.center + reach > grid.upper())
        {
            return Err(MollifierError::SupportOutsideGrid { id: self.id.clone() });
        }
        Ok(())
    }
}

/// Three interior bumps (centers L/4, L/2, 3L/4) and two wall-straddling
/// bumps (centers 0 and L), all of FWHM L/20.
pub fn default_test_suite(cfg: &BoxConfig) -> Vec<TestFunction> {
    let length = cfg.length();
    let width = length / 20.0;
    vec![
        TestFunction::gaussian("int_L4", length / 4.0, width),
        TestFunction::gaussian("int_L2", length / 2.0, width),
        TestFunction::gaussian("int_3L4", 3.0 * length / 4.0, width),
        TestFunction::gaussian("wall_0", 0.0, width),
        TestFunction::gaussian("wall_L", length, width),
    ]
}

/// Identifies the interior members of [`default_test_suite`].
pub fn is_interior(testfn: &TestFunction, cfg: &BoxConfig) -> bool {
    testfn.center > 0.0 && testfn.center < cfg.length()
}

/// Weak eigen-residual of one test function:
/// |<chi, H v_eps> - E_n <chi, v_eps>| under the grid quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakResidual {
    pub testfn_id: String,
    pub residual: f64,
}

pub fn weak_residual(
    n: QuantumNumber,
    params: &MollifierParams,
    variant: OperatorVariant,
    testfns: &[TestFunction],
    cfg: &BoxConfig,
) -> Result<Vec<WeakResidual>, MollifierError> {
    let operator = MollifiedOperator::build(params, variant, cfg)?;
    let grid = operator.grid().clone();
    let v = smoothed_mode(n, params, &grid, cfg);
    let hv = operator.apply(&v);
    let e_n = analytic::energy(n, cfg).0;
    let weights = grid.weights();
    let nodes = grid.nodes();
    testfns
        .iter()
        .map(|tf| {
            tf.check_support(&grid)?;
            let mut paired = 0.0;
            for i in 0..nodes.len() {
                paired += weights[i] * tf.value(nodes[i]) * (hv[i] - e_n * v[i]);
            }
            Ok(WeakResidual { testfn_id: tf.id.clone(), residual: paired.abs() })
        })
        .collect()
}

/// Weak-sense difference between the two variants acting on the smoothed
/// mode: |<chi, (H_ratio - H_plain) v_eps>| per test function.
pub fn equivalence_check(
    n: QuantumNumber,
    params: &MollifierParams,
    testfns: &[TestFunction],
    cfg: &BoxConfig,
) -> Result<Vec<WeakResidual>, MollifierError> {
    let ratio = MollifiedOperator::build(params, OperatorVariant::Ratio, cfg)?;
    let plain = MollifiedOperator::build(params, OperatorVariant::Plain, cfg)?;
    let grid = ratio.grid().clone();
    let v = smoothed_mode(n, params, &grid, cfg);
    let hv_ratio = ratio.apply(&v);
    let hv_plain = plain.apply(&v);
    let weights = grid.weights();
    let nodes = grid.nodes();
    testfns
        .iter()
        .map(|tf| {
            tf.check_support(&grid)?;
            let mut paired = 0.0;
            for i in 0..nodes.len() {
                paired += weights[i] * tf.value(nodes[i]) * (hv_ratio[i] - hv_plain[i]);
            }
            Ok(WeakResidual { testfn_id: tf.id.clone(), residual: paired.abs() })
        })
        .collect()
}

/// One row of the sweep report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub n: u32,
    pub eps: f64,
    pub variant: &'static str,
    pub testfn_id: String,
    pub residual: f64,
    /// Present when the sweep also ran the variant difference.
    pub equivalence_diff: Option<f64>,
}

/// Residuals for every (n, eps, variant, test function) combination, in a
/// deterministic order suitable for serialization.
#[derive(Debug, Clone, Default)]
pub struct WeakResidualReport {
    pub rows: Vec<ReportRow>,
}

pub fn residual_sweep(
    n_max: u32,
    eps_list: &[f64],
    variants: &[OperatorVariant],
    with_equivalence: bool,
    cfg: &BoxConfig,
) -> Result<WeakResidualReport, MollifierError> {
    let testfns = default_test_suite(cfg);
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let qn = QuantumNumber::new(n).expect("n >= 1");
        for &eps in eps_list {
            let params = MollifierParams::new(eps)?;
            let equiv = if with_equivalence {
                Some(equivalence_check(qn, &params, &testfns, cfg)?)
            } else {
                None
            };
            for &variant in variants {
                let residuals = weak_residual(qn, &params, variant, &testfns, cfg)?;
                for (idx, r) in residuals.into_iter().enumerate() {
                    rows.push(ReportRow {
                        n,
                        eps,
                        variant: variant.label(),
                        testfn_id: r.testfn_id,
                        residual: r.residual,
                        equivalence_diff: equiv.as_ref().map(|e| e[idx].residual),
                    });
                }
            }
        }
    }
    Ok(WeakResidualReport { rows })
}
