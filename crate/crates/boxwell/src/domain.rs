//! Core types shared by every solver stage: physical configuration, quantum
//! numbers, quadrature grids in both representations, and sampled waves.
//!
//! All values are immutable after construction; grids are reference-counted
//! so samples and operators can share them across threads.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::quad;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("{field} must be positive and finite, got {value}")]
    InvalidField { field: &'static str, value: f64 },
    #[error("quantum number must be >= 1")]
    InvalidQuantumNumber,
    #[error("momentum grid needs an even panel count >= 2 to be symmetric about 0, got {panels}")]
    OddPanels { panels: usize },
    #[error("per-panel quadrature order must be >= 2, got {order}")]
    OrderTooLow { order: usize },
    #[error("position grid must cover the box: need lower <= 0 and upper >= {length}, got [{lower}, {upper}]")]
    DoesNotCoverBox { lower: f64, upper: f64, length: f64 },
    #[error("sample has {values} values but the grid has {nodes} nodes")]
    LengthMismatch { values: usize, nodes: usize },
    #[error("expected a sample on a {expected} grid")]
    GridKindMismatch { expected: &'static str },
}

/// Physical constants of the well: mass, reduced Planck constant and box
/// length, all strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxConfig {
    mass: f64,
    hbar: f64,
    length: f64,
}

impl BoxConfig {
    pub fn new(mass: f64, hbar: f64, length: f64) -> Result<Self, DomainError> {
        for (field, value) in [("mass", mass), ("hbar", hbar), ("length", length)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(DomainError::InvalidField { field, value });
            }
        }
        Ok(Self { mass, hbar, length })
    }

    /// Dimensionless defaults, m = hbar = L = 1.
    pub fn unit() -> Self {
        Self { mass: 1.0, hbar: 1.0, length: 1.0 }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Momentum scale pi*hbar/L; the ground-state density peaks at +-p0.
    pub fn momentum_scale(&self) -> f64 {
        PI * self.hbar / self.length
    }

    /// Ground-state energy pi^2 hbar^2 / (2 m L^2).
    pub fn energy_scale(&self) -> f64 {
        let p0 = self.momentum_scale();
        p0 * p0 / (2.0 * self.mass)
    }
}

/// Mode label n = 1, 2, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuantumNumber(u32);

impl QuantumNumber {
    pub fn new(n: u32) -> Result<Self, DomainError> {
        if n == 0 {
            return Err(DomainError::InvalidQuantumNumber);
        }
        Ok(Self(n))
    }

    pub fn get(&self) -> u32 {
        self.0
    }

    pub fn as_f64(&self) -> f64 {
        self.0 as f64
    }
}

impl std::fmt::Display for QuantumNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Mode energy in the configured units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energy(pub f64);

/// Descriptor of the quadrature rule backing a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    /// Composite Gauss-Legendre: equal panels of fixed per-panel order.
    GaussLegendre { panels: usize, order: usize },
    /// Uniform trapezoid rule.
    Trapezoid { nodes: usize },
}

/// Truncated momentum axis [-P, P] with quadrature nodes and weights.
///
/// The grid is built on [0, P] and mirrored, so the node set is closed under
/// negation with bitwise-equal weights, and panels therefore come in pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    cutoff: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    rule: QuadratureRule,
}

impl MomentumGrid {
    /// Composite Gauss-Legendre grid on [-P, P]. `panels` counts the total
    /// panels over the full interval and must be even so that a panel
    /// boundary falls exactly on p = 0.
    pub fn gauss_legendre(cutoff: f64, panels: usize, order: usize) -> Result<Self, DomainError> {
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(DomainError::InvalidField { field: "cutoff", value: cutoff });
        }
        if panels < 2 || panels % 2 != 0 {
            return Err(DomainError::OddPanels { panels });
        }
        if order < 2 {
            return Err(DomainError::OrderTooLow { order });
        }
        let (half_nodes, half_weights) = quad::composite_gauss(0.0, cutoff, panels / 2, order);
        let n = half_nodes.len();
        let mut nodes = Vec::with_capacity(2 * n);
        let mut weights = Vec::with_capacity(2 * n);
        for i in (0..n).rev() {
            nodes.push(-half_nodes[i]);
            weights.push(half_weights[i]);
        }
        nodes.extend_from_slice(&half_nodes);
        weights.extend_from_slice(&half_weights);
        Ok(Self { cutoff, nodes, weights, rule: QuadratureRule::GaussLegendre { panels, order } })
    }

    /// Uniform trapezoid grid on [-P, P] with `per_side` intervals per side;
    /// includes a node at p = 0. Intended for transform cross-checks.
    pub fn uniform_trapezoid(cutoff: f64, per_side: usize) -> Result<Self, DomainError> {
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(DomainError::InvalidField { field: "cutoff", value: cutoff });
        }
        if per_side < 1 {
            return Err(DomainError::OrderTooLow { order: per_side });
        }
        let count = 2 * per_side + 1;
        let h = cutoff / per_side as f64;
        let nodes: Vec<f64> = (0..count).map(|i| (i as f64 - per_side as f64) * h).collect();
        let mut weights = vec![h; count];
        weights[0] = 0.5 * h;
        weights[count - 1] = 0.5 * h;
        Ok(Self { cutoff, nodes, weights, rule: QuadratureRule::Trapezoid { nodes: count } })
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }
}

/// Position-axis grid covering the box [0, L], optionally extended beyond the
/// walls. Panel (or sample) boundaries always fall exactly on x = 0 and x = L
/// so the derivative kink of windowed states sits on a boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionGrid {
    lower: f64,
    upper: f64,
    box_length: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    rule: QuadratureRule,
}

impl PositionGrid {
    /// Composite Gauss-Legendre grid. `panels` is the panel count inside
    /// [0, L]; the extensions [lower, 0] and [L, upper], when present, are
    /// panelled at the same width.
    pub fn gauss_legendre(
        cfg: &BoxConfig,
        lower: f64,
        upper: f64,
        panels: usize,
        order: usize,
    ) -> Result<Self, DomainError> {
        let length = cfg.length();
        if !(lower <= 0.0 && upper >= length && lower.is_finite() && upper.is_finite()) {
            return Err(DomainError::DoesNotCoverBox { lower, upper, length });
        }
        if panels < 1 {
            return Err(DomainError::OddPanels { panels });
        }
        if order < 2 {
            return Err(DomainError::OrderTooLow { order });
        }
        let width = length / panels as f64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut push_segment = |a: f64, b: f64| {
            if b - a > 0.0 {
                let seg_panels = ((b - a) / width).ceil().max(1.0) as usize;
                let (n, w) = quad::composite_gauss(a, b, seg_panels, order);
                nodes.extend(n);
                weights.extend(w);
            }
        };
        push_segment(lower, 0.0);
        push_segment(0.0, length);
        push_segment(length, upper);
        let total = nodes.len();
        let rule = QuadratureRule::GaussLegendre { panels: total / order, order };
        Ok(Self { lower, upper, box_length: length, nodes, weights, rule })
    }

    /// Uniform grid with trapezoid weights and `count` nodes; used by the
    /// finite-difference verifier and as an inverse-transform target.
    pub fn uniform(cfg: &BoxConfig, lower: f64, upper: f64, count: usize) -> Result<Self, DomainError> {
        let length = cfg.length();
        if !(lower <= 0.0 && upper >= length && lower.is_finite() && upper.is_finite()) {
            return Err(DomainError::DoesNotCoverBox { lower, upper, length });
        }
        if count < 2 {
            return Err(DomainError::OrderTooLow { order: count });
        }
        let (nodes, weights) = quad::trapezoid(lower, upper, count);
        Ok(Self {
            lower,
            upper,
            box_length: length,
            nodes,
            weights,
            rule: QuadratureRule::Trapezoid { nodes: count },
        })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }
}

/// The grid a sampled wave lives on.
#[derive(Debug, Clone)]
pub enum SampleGrid {
    Position(Arc<PositionGrid>),
    Momentum(Arc<MomentumGrid>),
}

impl SampleGrid {
    pub fn nodes(&self) -> &[f64] {
        match self {
            SampleGrid::Position(g) => g.nodes(),
            SampleGrid::Momentum(g) => g.nodes(),
        }
    }

    pub fn weights(&self) -> &[f64] {
        match self {
            SampleGrid::Position(g) => g.weights(),
            SampleGrid::Momentum(g) => g.weights(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes().len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes().is_empty()
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SampleGrid::Position(_) => "position",
            SampleGrid::Momentum(_) => "momentum",
        }
    }
}

/// Complex amplitudes bound to grid nodes.
#[derive(Debug, Clone)]
pub struct WaveSample {
    grid: SampleGrid,
    values: Vec<Complex64>,
}

impl WaveSample {
    pub fn new(grid: SampleGrid, values: Vec<Complex64>) -> Result<Self, DomainError> {
        if values.len() != grid.len() {
            return Err(DomainError::LengthMismatch { values: values.len(), nodes: grid.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &SampleGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// sqrt(sum_i w_i |f_i|^2), the grid's quadrature L2 norm.
    pub fn quadrature_norm(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(&w, v)| w * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn position_grid(&self) -> Result<&Arc<PositionGrid>, DomainError> {
        match &self.grid {
            SampleGrid::Position(g) => Ok(g),
            SampleGrid::Momentum(_) => Err(DomainError::GridKindMismatch { expected: "position" }),
        }
    }

    pub fn momentum_grid(&self) -> Result<&Arc<MomentumGrid>, DomainError> {
        match &self.grid {
            SampleGrid::Momentum(g) => Ok(g),
            SampleGrid::Position(_) => Err(DomainError::GridKindMismatch { expected: "momentum" }),
        }
    }
}
