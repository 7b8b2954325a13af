//! Direct quadrature Fourier transforms between the position and momentum
//! grids, plus generic quadrature application.
//!
//! The transforms are evaluated as plain O(N*M) sums: the grids are small,
//! nonuniform Gauss nodes rule out FFTs, and the convention constant
//! 1/sqrt(2 pi hbar) makes the pair unitary on the continuum.

use std::sync::Arc;

use num_complex::Complex64;

use crate::domain::{BoxConfig, DomainError, MomentumGrid, PositionGrid, SampleGrid, WaveSample};

/// Position-to-momentum transform with kernel e^{-i x p / hbar}:
/// phi(p_j) = (1/sqrt(2 pi hbar)) sum_i w_i v(x_i) e^{-i x_i p_j / hbar}.
///
/// The source must live on a position grid; position grids cover [0, L] by
/// construction, the support of the windowed modes.
pub fn fourier_forward(
    v: &WaveSample,
    target: &Arc<MomentumGrid>,
    cfg: &BoxConfig,
) -> Result<WaveSample, DomainError> {
    let grid = v.position_grid()?;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * cfg.hbar()).sqrt();
    let xs = grid.nodes();
    let ws = grid.weights();
    let values: Vec<Complex64> = target
        .nodes()
        .iter()
        .map(|&p| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..xs.len() {
                acc += ws[i] * v.values()[i] * Complex64::from_polar(1.0, -xs[i] * p / cfg.hbar());
            }
            acc * norm
        })
        .collect();
    WaveSample::new(SampleGrid::Momentum(target.clone()), values)
}

/// Momentum-to-position transform with kernel e^{+i x p / hbar}. The source
/// momentum grid is symmetric under p -> -p by construction, which is what
/// makes reconstructions of real position functions real up to rounding.
pub fn fourier_inverse(
    phi: &WaveSample,
    target: &Arc<PositionGrid>,
    cfg: &BoxConfig,
) -> Result<WaveSample, DomainError> {
    let grid = phi.momentum_grid()?;
    let norm = 1.0 / (2.0 * std::f64::consts::PI * cfg.hbar()).sqrt();
    let ps = grid.nodes();
    let ws = grid.weights();
    let values: Vec<Complex64> = target
        .nodes()
        .iter()
        .map(|&x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..ps.len() {
                acc += ws[j] * phi.values()[j] * Complex64::from_polar(1.0, x * ps[j] / cfg.hbar());
            }
            acc * norm
        })
        .collect();
    WaveSample::new(SampleGrid::Position(target.clone()), values)
}

/// Quadrature sum of the sample: sum_i w_i f_i.
pub fn integrate(sample: &WaveSample) -> Complex64 {
    sample
        .grid()
        .weights()
        .iter()
        .zip(sample.values())
        .map(|(&w, v)| w * v)
        .sum()
}

/// Quadrature sum of a callable evaluated on the grid nodes.
pub fn integrate_with<F>(grid: &SampleGrid, f: F) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    grid.nodes().iter().zip(grid.weights()).map(|(&x, &w)| w * f(x)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{self, PhiForm, SampledFunction};
    use crate::domain::QuantumNumber;
    use std::f64::consts::PI;

    fn n(v: u32) -> QuantumNumber {
        QuantumNumber::new(v).unwrap()
    }

    fn unit_cfg() -> BoxConfig {
        BoxConfig::unit()
    }

    #[test]
    fn forward_matches_analytic_phi() {
        let cfg = unit_cfg();
        let pos = Arc::new(PositionGrid::gauss_legendre(&cfg, 0.0, 1.0, 63, 8).unwrap());
        let v = analytic::sample(SampledFunction::WindowedMode(n(1)), &SampleGrid::Position(pos), &cfg)
            .unwrap();
        let target = Arc::new(MomentumGrid::gauss_legendre(20.0 * PI, 40, 6).unwrap());
        let fwd = fourier_forward(&v, &target, &cfg).unwrap();
        let mut rms = 0.0;
        for (&p, got) in target.nodes().iter().zip(fwd.values()) {
            let want = analytic::phi(p, n(1), &cfg, PhiForm::Auto).unwrap();
            rms += (got - want).norm_sqr();
        }
        rms = (rms / target.len() as f64).sqrt();
        assert!(rms < 1e-10, "rms = {rms:.3e}");
    }

    #[test]
    fn forward_of_zero_is_zero() {
        let cfg = unit_cfg();
        let pos = Arc::new(PositionGrid::gauss_legendre(&cfg, 0.0, 1.0, 8, 4).unwrap());
        let zero =
            WaveSample::new(SampleGrid::Position(pos), vec![Complex64::default(); 32]).unwrap();
        let target = Arc::new(MomentumGrid::gauss_legendre(5.0, 4, 4).unwrap());
        let fwd = fourier_forward(&zero, &target, &cfg).unwrap();
        assert!(fwd.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn forward_rejects_momentum_sample() {
        let cfg = unit_cfg();
        let mom = Arc::new(MomentumGrid::gauss_legendre(5.0, 4, 4).unwrap());
        let s = analytic::sample(
            SampledFunction::MomentumMode(n(1), PhiForm::Auto),
            &SampleGrid::Momentum(mom.clone()),
            &cfg,
        )
        .unwrap();
        assert!(fourier_forward(&s, &mom, &cfg).is_err());
    }

    #[test]
    fn parseval_improves_with_cutoff() {
        let cfg = unit_cfg();
        let pos = Arc::new(PositionGrid::gauss_legendre(&cfg, 0.0, 1.0, 125, 8).unwrap());
        let v = analytic::sample(SampledFunction::WindowedMode(n(1)), &SampleGrid::Position(pos), &cfg)
            .unwrap();
        let mut errs = Vec::new();
        for cutoff_p0 in [10.0, 60.0] {
            let target =
                Arc::new(MomentumGrid::gauss_legendre(cutoff_p0 * PI, 2 * (cutoff_p0 as usize), 8).unwrap());
            let fwd = fourier_forward(&v, &target, &cfg).unwrap();
            errs.push((fwd.quadrature_norm().powi(2) - 1.0).abs());
        }
        assert!(errs[1] < errs[0]);
        assert!(errs[1] < 1e-5, "{errs:?}");
    }

    #[test]
    fn inverse_reconstructs_window() {
        let cfg = unit_cfg();
        let mom = Arc::new(MomentumGrid::gauss_legendre(60.0 * PI, 104, 8).unwrap());
        let phi1 = analytic::sample(
            SampledFunction::MomentumMode(n(1), PhiForm::Auto),
            &SampleGrid::Momentum(mom),
            &cfg,
        )
        .unwrap();
        let target = Arc::new(PositionGrid::uniform(&cfg, 0.0, 1.0, 2000).unwrap());
        let rec = fourier_inverse(&phi1, &target, &cfg).unwrap();
        let mut rms = 0.0;
        let mut max_im: f64 = 0.0;
        for (&x, got) in target.nodes().iter().zip(rec.values()) {
            let want = analytic::v_window(x, n(1), &cfg);
            rms += (got.re - want).powi(2);
            max_im = max_im.max(got.im.abs());
        }
        rms = (rms / target.len() as f64).sqrt();
        // cutoff-tail dominated; measured 5.7e-4 at P = 60 p0
        assert!(rms < 1e-3, "rms = {rms:.3e}");
        assert!(max_im < 1e-10, "max im = {max_im:.3e}");
    }

    #[test]
    fn inverse_leakage_outside_box_is_small() {
        let cfg = unit_cfg();
        let mom = Arc::new(MomentumGrid::gauss_legendre(60.0 * PI, 104, 8).unwrap());
        let phi1 = analytic::sample(
            SampledFunction::MomentumMode(n(1), PhiForm::Auto),
            &SampleGrid::Momentum(mom),
            &cfg,
        )
        .unwrap();
        let target = Arc::new(PositionGrid::uniform(&cfg, -0.3, 1.0, 131).unwrap());
        let rec = fourier_inverse(&phi1, &target, &cfg).unwrap();
        // node 0 sits at x = -0.3; measured 4.9e-6 at this cutoff
        assert!(rec.values()[0].norm() < 1e-5);
    }

    #[test]
    fn inverse_of_zero_is_zero() {
        let cfg = unit_cfg();
        let mom = Arc::new(MomentumGrid::gauss_legendre(5.0, 4, 4).unwrap());
        let zero =
            WaveSample::new(SampleGrid::Momentum(mom), vec![Complex64::default(); 16]).unwrap();
        let target = Arc::new(PositionGrid::uniform(&cfg, 0.0, 1.0, 11).unwrap());
        let rec = fourier_inverse(&zero, &target, &cfg).unwrap();
        assert!(rec.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn integrate_constant_and_odd() {
        let cfg = unit_cfg();
        let mom = Arc::new(MomentumGrid::gauss_legendre(7.0, 6, 5).unwrap());
        let grid = SampleGrid::Momentum(mom);
        let total = integrate_with(&grid, |_| Complex64::new(1.0, 0.0));
        assert!((total.re - 14.0).abs() < 1e-12 * 14.0);
        let odd = integrate_with(&grid, |p| Complex64::new(p.powi(3), 0.0));
        assert!(odd.norm() < 1e-14 * 343.0);
        let _ = cfg;
    }

    #[test]
    fn integrate_density_normalization() {
        let cfg = unit_cfg();
        let mom = Arc::new(MomentumGrid::gauss_legendre(100.0 * PI, 200, 8).unwrap());
        let d = analytic::sample(
            SampledFunction::MomentumDensity(n(1)),
            &SampleGrid::Momentum(mom),
            &cfg,
        )
        .unwrap();
        let total = integrate(&d);
        assert!((total.re - 1.0).abs() < 3e-3);
        assert!(total.im.abs() < 1e-15);
    }

    #[test]
    fn forward_is_linear() {
        let cfg = unit_cfg();
        let pos = Arc::new(PositionGrid::gauss_legendre(&cfg, 0.0, 1.0, 10, 4).unwrap());
        let grid = SampleGrid::Position(pos.clone());
        let f = analytic::sample(SampledFunction::WindowedMode(n(1)), &grid, &cfg).unwrap();
        let g = analytic::sample(SampledFunction::WindowedMode(n(2)), &grid, &cfg).unwrap();
        let (a, b) = (Complex64::new(0.37, -1.2), Complex64::new(-2.5, 0.044));
        let combo: Vec<Complex64> =
            f.values().iter().zip(g.values()).map(|(x, y)| a * x + b * y).collect();
        let combo = WaveSample::new(grid, combo).unwrap();
        let target = Arc::new(MomentumGrid::gauss_legendre(10.0, 8, 4).unwrap());
        let fwd_combo = fourier_forward(&combo, &target, &cfg).unwrap();
        let fwd_f = fourier_forward(&f, &target, &cfg).unwrap();
        let fwd_g = fourier_forward(&g, &target, &cfg).unwrap();
        for i in 0..target.len() {
            let want = a * fwd_f.values()[i] + b * fwd_g.values()[i];
            assert!((fwd_combo.values()[i] - want).norm() <= 1e-13 * 1f64.max(want.norm()));
        }
    }

    #[test]
    fn conjugate_symmetry_for_real_input() {
        let cfg = unit_cfg();
        let pos = Arc::new(PositionGrid::gauss_legendre(&cfg, 0.0, 1.0, 25, 6).unwrap());
        let v = analytic::sample(SampledFunction::WindowedMode(n(3)), &SampleGrid::Position(pos), &cfg)
            .unwrap();
        let target = Arc::new(MomentumGrid::gauss_legendre(15.0, 10, 6).unwrap());
        let fwd = fourier_forward(&v, &target, &cfg).unwrap();
        let m = target.len();
        for i in 0..m {
            let mirrored = fwd.values()[m - 1 - i].conj();
            let here = fwd.values()[i];
            assert!((here - mirrored).norm() <= 1e-12 * 1f64.max(here.norm()));
        }
    }
}
