//! Closed-form reference quantities: mode energies, box eigenfunctions, the
//! momentum-space wavefunctions in both printed forms, and the momentum
//! probability density. Everything downstream is validated against this
//! module.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::domain::{
    BoxConfig, DomainError, Energy, MomentumGrid, QuantumNumber, SampleGrid, WaveSample,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("x = {x} lies outside the box [0, {length}]; use the windowed form for extended grids")]
    OutsideBox { x: f64, length: f64 },
    #[error(
        "the rational form is 0/0 at p = +-{removable}; evaluate with SincProduct or Auto instead"
    )]
    RemovableSingularity { removable: f64 },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Which printed expression evaluates phi_n(p).
///
/// The rational form loses roughly six digits to cancellation within
/// `AUTO_WINDOW_P0` of the removable points p = +-n pi hbar / L, where the
/// sinc product stays stable; `Auto` switches between them accordingly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhiForm {
    ClosedRational,
    SincProduct,
    #[default]
    Auto,
}

/// Half-width of the Auto switchover window around each removable point, in
/// units of the momentum scale p0.
pub const AUTO_WINDOW_P0: f64 = 1e-3;

/// E_n = pi^2 hbar^2 n^2 / (2 m L^2).
pub fn energy(n: QuantumNumber, cfg: &BoxConfig) -> Energy {
    let k = n.as_f64() * PI * cfg.hbar() / cfg.length();
    Energy(k * k / (2.0 * cfg.mass()))
}

/// Normalized box eigenfunction sqrt(2/L) sin(n pi x / L) on 0 <= x <= L.
pub fn u_box(x: f64, n: QuantumNumber, cfg: &BoxConfig) -> Result<f64, AnalyticError> {
    let length = cfg.length();
    if !(0.0..=length).contains(&x) {
        return Err(AnalyticError::OutsideBox { x, length });
    }
    Ok(u_extended(x, n, cfg))
}

/// The sine formula evaluated for any x, without the box window.
pub(crate) fn u_extended(x: f64, n: QuantumNumber, cfg: &BoxConfig) -> f64 {
    let length = cfg.length();
    (2.0 / length).sqrt() * (n.as_f64() * PI * x / length).sin()
}

/// Windowed eigenfunction on the whole line: the step window
/// [Theta(x) - Theta(x - L)] times the sine, with the step equal to 1 at its
/// jump. The window is therefore 1 at x = 0 and 0 at x = L; the sine vanishes
/// at both walls anyway.
pub fn v_window(x: f64, n: QuantumNumber, cfg: &BoxConfig) -> f64 {
    let length = cfg.length();
    // Theta(x) - Theta(x - L) with Theta(t) = 1 for t >= 0
    if x >= 0.0 && x < length {
        u_extended(x, n, cfg)
    } else {
        0.0
    }
}

fn removable_point(n: QuantumNumber, cfg: &BoxConfig) -> f64 {
    n.as_f64() * PI * cfg.hbar() / cfg.length()
}

/// Momentum wavefunction phi_n(p).
pub fn phi(
    p: f64,
    n: QuantumNumber,
    cfg: &BoxConfig,
    form: PhiForm,
) -> Result<Complex64, AnalyticError> {
    match form {
        PhiForm::ClosedRational => phi_rational(p, n, cfg),
        PhiForm::SincProduct => Ok(phi_sinc(p, n, cfg)),
        PhiForm::Auto => {
            let window = AUTO_WINDOW_P0 * cfg.momentum_scale();
            let a = removable_point(n, cfg);
            if (p - a).abs() < window || (p + a).abs() < window {
                Ok(phi_sinc(p, n, cfg))
            } else {
                phi_rational(p, n, cfg)
            }
        }
    }
}

/// (pi / (L sqrt(pi hbar L))) * n / ((n pi / L)^2 - (p/hbar)^2) * [1 - (-1)^n e^{-ipL/hbar}]
fn phi_rational(p: f64, n: QuantumNumber, cfg: &BoxConfig) -> Result<Complex64, AnalyticError> {
    let (hbar, length) = (cfg.hbar(), cfg.length());
    let a = n.as_f64() * PI / length;
    let k = p / hbar;
    let denom = a * a - k * k;
    if denom == 0.0 {
        return Err(AnalyticError::RemovableSingularity { removable: removable_point(n, cfg) });
    }
    let prefactor = PI / (length * (PI * hbar * length).sqrt());
    let sign = if n.get() % 2 == 0 { 1.0 } else { -1.0 };
    let bracket = Complex64::new(1.0, 0.0) - sign * Complex64::from_polar(1.0, -p * length / hbar);
    Ok(prefactor * n.as_f64() / denom * bracket)
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0 + z.powi(4) / 120.0
    } else {
        z.sin() / z
    }
}

/// (1/2i) sqrt(L/(pi hbar)) { e^{-iL(k - a)/2} sinc(L(k - a)/2) - e^{-iL(k + a)/2} sinc(L(k + a)/2) }
/// with k = p/hbar and a = n pi / L. Finite everywhere, including the
/// removable points of the rational form.
fn phi_sinc(p: f64, n: QuantumNumber, cfg: &BoxConfig) -> Complex64 {
    let (hbar, length) = (cfg.hbar(), cfg.length());
    let a = n.as_f64() * PI / length;
    let k = p / hbar;
    let zm = length * (k - a) / 2.0;
    let zp = length * (k + a) / 2.0;
    let prefactor = Complex64::new(0.0, -0.5) * (length / (PI * hbar)).sqrt();
    prefactor
        * (Complex64::from_polar(1.0, -zm) * sinc(zm) - Complex64::from_polar(1.0, -zp) * sinc(zp))
}

/// Momentum probability density |phi_n(p)|^2, finite at the removable points
/// where it equals L / (4 pi hbar).
pub fn mom_density(p: f64, n: QuantumNumber, cfg: &BoxConfig) -> f64 {
    phi_sinc_or_rational(p, n, cfg).norm_sqr()
}

fn phi_sinc_or_rational(p: f64, n: QuantumNumber, cfg: &BoxConfig) -> Complex64 {
    // same dispatch as PhiForm::Auto, but total
    let window = AUTO_WINDOW_P0 * cfg.momentum_scale();
    let a = removable_point(n, cfg);
    if (p - a).abs() < window || (p + a).abs() < window {
        phi_sinc(p, n, cfg)
    } else {
        // denom cannot vanish outside the window
        phi_rational(p, n, cfg).expect("outside the removable window")
    }
}

/// Function selector for [`sample`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampledFunction {
    /// u_n on [0, L]; sampling an extended grid is a domain error.
    BoxMode(QuantumNumber),
    /// The windowed v_n, defined on the whole line.
    WindowedMode(QuantumNumber),
    /// phi_n in the requested form.
    MomentumMode(QuantumNumber, PhiForm),
    /// |phi_n|^2.
    MomentumDensity(QuantumNumber),
}

/// Pointwise evaluation on the grid nodes.
pub fn sample(
    function: SampledFunction,
    grid: &SampleGrid,
    cfg: &BoxConfig,
) -> Result<WaveSample, AnalyticError> {
    let values: Vec<Complex64> = match (function, grid) {
        (SampledFunction::BoxMode(n), SampleGrid::Position(g)) => g
            .nodes()
            .iter()
            .map(|&x| u_box(x, n, cfg).map(|v| Complex64::new(v, 0.0)))
            .collect::<Result<_, _>>()?,
        (SampledFunction::WindowedMode(n), SampleGrid::Position(g)) => {
            g.nodes().iter().map(|&x| Complex64::new(v_window(x, n, cfg), 0.0)).collect()
        }
        (SampledFunction::MomentumMode(n, form), SampleGrid::Momentum(g)) => g
            .nodes()
            .iter()
            .map(|&p| phi(p, n, cfg, form))
            .collect::<Result<_, _>>()?,
        (SampledFunction::MomentumDensity(n), SampleGrid::Momentum(g)) => {
            g.nodes().iter().map(|&p| Complex64::new(mom_density(p, n, cfg), 0.0)).collect()
        }
        (SampledFunction::BoxMode(_) | SampledFunction::WindowedMode(_), _) => {
            return Err(DomainError::GridKindMismatch { expected: "position" }.into())
        }
        (SampledFunction::MomentumMode(..) | SampledFunction::MomentumDensity(_), _) => {
            return Err(DomainError::GridKindMismatch { expected: "momentum" }.into())
        }
    };
    Ok(WaveSample::new(grid.clone(), values)?)
}

/// Convenience: phi_n (Auto form) sampled on a momentum grid and normalized
/// under the grid's quadrature inner product.
pub fn sampled_mode(
    n: QuantumNumber,
    grid: &Arc<MomentumGrid>,
    cfg: &BoxConfig,
) -> Vec<Complex64> {
    let mut values: Vec<Complex64> =
        grid.nodes().iter().map(|&p| phi_sinc_or_rational(p, n, cfg)).collect();
    let norm: f64 = grid
        .weights()
        .iter()
        .zip(&values)
        .map(|(&w, v)| w * v.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if norm > 0.0 {
        for v in &mut values {
            *v /= norm;
        }
    }
    values
}

/// Fraction of the mode's momentum density captured inside the grid's
/// truncated axis; close to 1 when the cutoff is adequate for the mode.
pub fn mode_mass_within(n: QuantumNumber, grid: &MomentumGrid, cfg: &BoxConfig) -> f64 {
    grid.nodes()
        .iter()
        .zip(grid.weights())
        .map(|(&p, &w)| w * mom_density(p, n, cfg))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::PositionGrid;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn n(v: u32) -> QuantumNumber {
        QuantumNumber::new(v).unwrap()
    }

    #[test]
    fn energies_by_substitution() {
        let cfg = BoxConfig::unit();
        assert!((energy(n(1), &cfg).0 - PI * PI / 2.0).abs() < 1e-12);
        assert!((energy(n(2), &cfg).0 - 2.0 * PI * PI).abs() < 1e-12);
        let ratio = energy(n(3), &cfg).0 / energy(n(1), &cfg).0;
        assert!((ratio - 9.0).abs() < 1e-12);
    }

    #[test]
    fn box_mode_values_and_domain() {
        let cfg = BoxConfig::unit();
        assert!((u_box(0.5, n(1), &cfg).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(u_box(0.0, n(5), &cfg).unwrap(), 0.0);
        assert!((u_box(0.25, n(2), &cfg).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(u_box(1.2, n(1), &cfg), Err(AnalyticError::OutsideBox { .. })));
    }

    #[test]
    fn windowed_mode_vanishes_outside() {
        let cfg = BoxConfig::unit();
        assert_eq!(v_window(-0.3, n(1), &cfg), 0.0);
        assert_eq!(v_window(1.0, n(1), &cfg), 0.0);
        assert_eq!(v_window(7.3, n(2), &cfg), 0.0);
        assert!((v_window(0.5, n(1), &cfg) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn phi_at_zero_momentum() {
        let cfg = BoxConfig::unit();
        let p1 = phi(0.0, n(1), &cfg, PhiForm::Auto).unwrap();
        assert!((p1.re - 2.0 / PI.powf(1.5)).abs() < 1e-12);
        assert!(p1.im.abs() < 1e-15);
        let p2 = phi(0.0, n(2), &cfg, PhiForm::Auto).unwrap();
        assert!(p2.norm() < 1e-15);
    }

    #[test]
    fn rational_errors_exactly_at_removable_point() {
        let cfg = BoxConfig::unit();
        let err = phi(PI, n(1), &cfg, PhiForm::ClosedRational);
        assert!(matches!(err, Err(AnalyticError::RemovableSingularity { .. })));
        // Auto handles the same point
        let v = phi(PI, n(1), &cfg, PhiForm::Auto).unwrap();
        assert!(v.norm().is_finite());
    }

    #[test]
    fn forms_agree_at_half_p0() {
        let cfg = BoxConfig::unit();
        let p = PI / 2.0;
        let r = phi(p, n(1), &cfg, PhiForm::ClosedRational).unwrap();
        let s = phi(p, n(1), &cfg, PhiForm::SincProduct).unwrap();
        assert!((r - s).norm() <= 1e-12);
    }

    #[test]
    fn forms_agree_off_window() {
        let cfg = BoxConfig::unit();
        let mut rng = StdRng::seed_from_u64(7);
        let window = AUTO_WINDOW_P0 * cfg.momentum_scale();
        for _ in 0..500 {
            let qn = n(rng.random_range(1..=8));
            let p: f64 = rng.random_range(-20.0 * PI..20.0 * PI);
            let a = qn.as_f64() * PI;
            if (p - a).abs() < window || (p + a).abs() < window {
                continue;
            }
            let r = phi(p, qn, &cfg, PhiForm::ClosedRational).unwrap();
            let s = phi(p, qn, &cfg, PhiForm::SincProduct).unwrap();
            let scale = 1f64.max(s.norm());
            assert!((r - s).norm() <= 1e-12 * scale, "n={qn} p={p}: {r} vs {s}");
        }
    }

    #[test]
    fn density_removable_value_independent_of_n() {
        let cfg = BoxConfig::unit();
        for k in 1..=8u32 {
            let qn = n(k);
            let p = qn.as_f64() * PI;
            let d = mom_density(p, qn, &cfg);
            assert!((d - 1.0 / (4.0 * PI)).abs() < 1e-9, "n={k}: {d}");
        }
    }

    #[test]
    fn both_printed_density_forms_match_modulus_squared() {
        // the two prefactor conventions must coincide once E_n is substituted
        let cfg = BoxConfig::unit();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..500 {
            let k = rng.random_range(1..=6);
            let qn = n(k);
            let p: f64 = rng.random_range(-40.0..40.0);
            let a = qn.as_f64() * PI;
            if (p.abs() - a).abs() < 1e-2 {
                continue;
            }
            let trig = if k % 2 == 0 { (p / 2.0).sin().powi(2) } else { (p / 2.0).cos().powi(2) };
            let form_a = 4.0 * qn.as_f64().powi(2) * PI / ((a * a - p * p).powi(2)) * trig;
            let e_n = energy(qn, &cfg).0;
            let form_b = 8.0 * e_n / PI / (p * p - 2.0 * e_n).powi(2) * trig;
            let d = mom_density(p, qn, &cfg);
            assert!((form_a - d).abs() <= 1e-12 * 1f64.max(d));
            assert!((form_b - d).abs() <= 1e-12 * 1f64.max(d));
        }
    }

    #[test]
    fn density_is_even() {
        let cfg = BoxConfig::unit();
        for k in 1..=4u32 {
            for i in 0..200 {
                let p = 0.17 + i as f64 * 0.31;
                let d = mom_density(p, n(k), &cfg);
                assert!((d - mom_density(-p, n(k), &cfg)).abs() <= 1e-14 * 1f64.max(d));
            }
        }
    }

    #[test]
    fn sampling_window_on_extended_grid() {
        let cfg = BoxConfig::unit();
        let grid = Arc::new(PositionGrid::gauss_legendre(&cfg, -0.5, 1.5, 20, 4).unwrap());
        let s = sample(SampledFunction::WindowedMode(n(1)), &SampleGrid::Position(grid.clone()), &cfg)
            .unwrap();
        for (&x, v) in grid.nodes().iter().zip(s.values()) {
            if !(0.0..1.0).contains(&x) {
                assert_eq!(v.norm(), 0.0, "x={x}");
            }
        }
        // u_box refuses the extended grid
        let err = sample(SampledFunction::BoxMode(n(1)), &SampleGrid::Position(grid), &cfg);
        assert!(err.is_err());
    }

    #[test]
    fn sampling_phi_at_exact_removable_node() {
        let cfg = BoxConfig::unit();
        // trapezoid grid with nodes at multiples of p0 = pi, hitting n=1 and n=2 points
        let grid = Arc::new(MomentumGrid::uniform_trapezoid(2.0 * PI, 2).unwrap());
        let s = sample(
            SampledFunction::MomentumMode(n(1), PhiForm::Auto),
            &SampleGrid::Momentum(grid),
            &cfg,
        )
        .unwrap();
        assert!(s.values().iter().all(|v| v.norm().is_finite()));
        let den = sample(
            SampledFunction::MomentumDensity(n(2)),
            &SampleGrid::Momentum(Arc::new(MomentumGrid::uniform_trapezoid(2.0 * PI, 2).unwrap())),
            &cfg,
        )
        .unwrap();
        assert!(den.values().iter().all(|v| v.re >= 0.0 && v.im == 0.0));
    }

    #[test]
    fn conjugation_symmetry() {
        let cfg = BoxConfig::unit();
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..300 {
            let qn = n(rng.random_range(1..=6));
            let p: f64 = rng.random_range(-30.0..30.0);
            let plus = phi(p, qn, &cfg, PhiForm::Auto).unwrap();
            let minus = phi(-p, qn, &cfg, PhiForm::Auto).unwrap();
            assert!((minus - plus.conj()).norm() <= 1e-12 * 1f64.max(plus.norm()));
        }
    }
}
