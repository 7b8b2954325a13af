//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured numbers (visible with `--nocapture`).
//!
//! Run: cargo test -p boxwell --test acceptance -- --nocapture --test-threads=1

use std::f64::consts::PI;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use boxwell::analytic::{self, PhiForm, SampledFunction, AUTO_WINDOW_P0};
use boxwell::domain::{BoxConfig, MomentumGrid, PositionGrid, QuantumNumber, SampleGrid};
use boxwell::mollifier::{
    self, default_test_suite, is_interior, MollifierParams, OperatorVariant,
};
use boxwell::moments::{self, MomentRule, Verdict};
use boxwell::momsolver::{ComplexOperatorMatrix, OperatorOptions, SolveError};
use boxwell::transform;

fn cfg() -> BoxConfig {
    BoxConfig::unit()
}

fn qn(n: u32) -> QuantumNumber {
    QuantumNumber::new(n).unwrap()
}

fn pass(criterion: &str, detail: String) {
    println!("criterion {criterion}: PASS - {detail}");
}

fn fail(criterion: &str, detail: String) -> ! {
    println!("criterion {criterion}: FAIL - {detail}");
    panic!("criterion {criterion}: FAIL - {detail}");
}

/// Reference resolution used throughout: cutoff 60 p0, 104 panels of order 8
/// (832 nodes).
fn reference_grid() -> Arc<MomentumGrid> {
    Arc::new(MomentumGrid::gauss_legendre(60.0 * PI, 104, 8).unwrap())
}

#[test]
fn acceptance_01_analytic_spectrum() {
    let cfg = cfg();
    let mut worst = 0.0f64;
    for n in 1..=10u32 {
        let want = PI * PI * (n as f64) * (n as f64) / 2.0;
        let got = analytic::energy(qn(n), &cfg).0;
        worst = worst.max((got - want).abs() / want);
    }
    if worst > 1e-12 {
        fail("1 (analytic spectrum)", format!("worst rel error {worst:.3e} > 1e-12"));
    }
    pass("1 (analytic spectrum)", format!("n <= 10, worst rel error {worst:.3e} <= 1e-12"));
}

#[test]
fn acceptance_02_form_equivalence_and_removable_value() {
    let cfg = cfg();
    let p0 = cfg.momentum_scale();
    let window = AUTO_WINDOW_P0 * p0;
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    let mut tested = 0usize;
    while tested < 10_000 {
        let n = qn(rng.random_range(1..=8));
        let p: f64 = rng.random_range(-20.0 * p0..20.0 * p0);
        let a = n.as_f64() * p0;
        if (p - a).abs() < window || (p + a).abs() < window {
            continue;
        }
        tested += 1;
        let rational = analytic::phi(p, n, &cfg, PhiForm::ClosedRational).unwrap();
        let sinc = analytic::phi(p, n, &cfg, PhiForm::SincProduct).unwrap();
        let scaled = (rational - sinc).norm() / 1f64.max(sinc.norm());
        worst = worst.max(scaled);
    }
    if worst > 1e-12 {
        fail("2 (form equivalence)", format!("worst scaled disagreement {worst:.3e} > 1e-12"));
    }

    let mut worst_removable = 0.0f64;
    for n in 1..=8u32 {
        let d = analytic::mom_density(n as f64 * p0, qn(n), &cfg);
        worst_removable = worst_removable.max((d - 1.0 / (4.0 * PI)).abs());
    }
    if worst_removable > 1e-9 {
        fail(
            "2 (removable value)",
            format!("density at the removable points off by {worst_removable:.3e} > 1e-9"),
        );
    }
    pass(
        "2 (form equivalence)",
        format!(
            "10^4 samples agree to {worst:.3e}; removable-point density within {worst_removable:.3e} of 1/(4 pi)"
        ),
    );
}

#[test]
fn acceptance_03_transform_oracle() {
    let cfg = cfg();
    let p0 = cfg.momentum_scale();
    let pos = Arc::new(PositionGrid::gauss_legendre(&cfg, 0.0, 1.0, 250, 8).unwrap());
    assert_eq!(pos.len(), 2000);
    let v1 = analytic::sample(SampledFunction::WindowedMode(qn(1)), &SampleGrid::Position(pos), &cfg)
        .unwrap();
    let target = Arc::new(MomentumGrid::uniform_trapezoid(20.0 * p0, 400).unwrap());
    let fwd = transform::fourier_forward(&v1, &target, &cfg).unwrap();
    let mut rms = 0.0;
    for (&p, got) in target.nodes().iter().zip(fwd.values()) {
        let want = analytic::phi(p, qn(1), &cfg, PhiForm::Auto).unwrap();
        rms += (got - want).norm_sqr();
    }
    rms = (rms / target.len() as f64).sqrt();
    if rms > 1e-8 {
        fail("3 (transform oracle)", format!("RMS {rms:.3e} > 1e-8 on |p| <= 20 p0"));
    }
    pass("3 (transform oracle)", format!("RMS {rms:.3e} <= 1e-8 on |p| <= 20 p0 (2000-node grid)"));
}

#[test]
fn acceptance_04_integral_equation_residual() {
    let cfg = cfg();
    let options = OperatorOptions::default();

    let residuals = |grid: &Arc<MomentumGrid>| -> Vec<f64> {
        let a = ComplexOperatorMatrix::build(grid, &cfg, options);
        (1..=3u32)
            .map(|n| {
                let phi = analytic::sample(
                    SampledFunction::MomentumMode(qn(n), PhiForm::Auto),
                    &SampleGrid::Momentum(grid.clone()),
                    &cfg,
                )
                .unwrap();
                a.eigen_residual(&phi, analytic::energy(qn(n), &cfg).0).unwrap()
            })
            .collect()
    };

    let reference = reference_grid();
    let res_ref = residuals(&reference);
    for (i, &r) in res_ref.iter().enumerate() {
        if r > 5e-3 {
            fail(
                "4 (integral-equation residual)",
                format!("n={} residual {r:.3e} > 5e-3 at the reference resolution", i + 1),
            );
        }
    }

    // cutoff refinement at fixed node density
    let wider = Arc::new(MomentumGrid::gauss_legendre(120.0 * PI, 208, 8).unwrap());
    let res_wide = residuals(&wider);
    for i in 0..3 {
        if res_wide[i] >= res_ref[i] {
            fail(
                "4 (integral-equation residual)",
                format!("n={}: residual did not decrease with cutoff ({:.3e} -> {:.3e})",
                    i + 1, res_ref[i], res_wide[i]),
            );
        }
    }

    // node refinement at fixed cutoff, taken where quadrature error still
    // dominates (order-4 panels); past ~400 nodes the residual sits at the
    // tail-closure floor
    let coarse = Arc::new(MomentumGrid::gauss_legendre(60.0 * PI, 52, 4).unwrap());
    let fine = Arc::new(MomentumGrid::gauss_legendre(60.0 * PI, 104, 4).unwrap());
    let res_coarse = residuals(&coarse);
    let res_fine = residuals(&fine);
    for i in 0..3 {
        if res_fine[i] >= res_coarse[i] {
            fail(
                "4 (integral-equation residual)",
                format!("n={}: residual did not decrease with node count ({:.3e} -> {:.3e})",
                    i + 1, res_coarse[i], res_fine[i]),
            );
        }
    }

    pass(
        "4 (integral-equation residual)",
        format!(
            "reference residuals n=1..3: {:.3e}, {:.3e}, {:.3e} (all <= 5e-3); decrease under cutoff ({:.1e}->{:.1e} for n=1) and node ({:.1e}->{:.1e}) refinement",
            res_ref[0], res_ref[1], res_ref[2], res_ref[0], res_wide[0], res_coarse[0], res_fine[0]
        ),
    );
}

#[test]
fn acceptance_05_eigensolve_and_matching() {
    let cfg = cfg();
    let grid = reference_grid();
    let a = ComplexOperatorMatrix::build(&grid, &cfg, OperatorOptions::default());
    let spectrum = a.solve_spectrum().unwrap();
    assert_eq!(spectrum.len(), grid.len());
    let matched = spectrum.match_modes(&cfg, 5).unwrap();

    let mut lines = Vec::new();
    for mode in matched.modes() {
        let im_bound = 1e-4 * mode.analytic_energy;
        if mode.energy_rel_error > 1e-3 {
            fail(
                "5 (eigensolve + matching)",
                format!("n={}: |Re lambda - E|/E = {:.3e} > 1e-3", mode.n, mode.energy_rel_error),
            );
        }
        if mode.im_residue > im_bound {
            fail(
                "5 (eigensolve + matching)",
                format!("n={}: |Im lambda| = {:.3e} > 1e-4 E_n = {:.3e}", mode.n, mode.im_residue, im_bound),
            );
        }
        if mode.overlap < 0.999 {
            fail(
                "5 (eigensolve + matching)",
                format!("n={}: overlap {:.6} < 0.999", mode.n, mode.overlap),
            );
        }
        lines.push(format!(
            "n={}: rel {:.1e}, |Im| {:.1e}, overlap {:.7}",
            mode.n, mode.energy_rel_error, mode.im_residue, mode.overlap
        ));
    }
    pass("5 (eigensolve + matching)", lines.join("; "));
}

#[test]
fn acceptance_06_moments() {
    let cfg = cfg();
    let p0 = cfg.momentum_scale();
    let rule = MomentRule::default();

    let m1 = moments::truncated_moment(qn(1), 1, 200.0 * p0, &cfg, &rule);
    let target = PI * PI; // 2 m E_1 in unit scales
    let m1_rel = (m1 - target).abs() / target;
    if m1_rel > 5e-3 {
        fail("6 (moments)", format!("<p^2> = {m1:.6} misses pi^2 by {m1_rel:.3e} > 0.5%"));
    }

    let cutoffs: Vec<f64> = [50.0, 100.0, 200.0, 400.0].iter().map(|c| c * p0).collect();
    let report = moments::classify_moment(qn(1), 2, &cutoffs, &cfg, &rule).unwrap();
    if !matches!(report.verdict, Verdict::Diverges) {
        fail("6 (moments)", format!("<p^4> verdict {:?} is not divergent", report.verdict));
    }
    let slope_target = 4.0 * PI;
    let slope_rel = (report.fit.coefficient - slope_target).abs() / slope_target;
    if slope_rel > 0.02 {
        fail(
            "6 (moments)",
            format!("<p^4> growth slope {:.6} misses 4 pi by {slope_rel:.3e} > 2%", report.fit.coefficient),
        );
    }

    let podd = moments::truncated_power_moment(qn(1), 1, 100.0 * p0, &cfg, &rule);
    if podd.abs() > 1e-13 {
        fail("6 (moments)", format!("<p> = {podd:.3e} exceeds 1e-13"));
    }

    pass(
        "6 (moments)",
        format!(
            "<p^2> -> pi^2 within {m1_rel:.2e}; <p^4> slope {:.4} vs 4 pi ({slope_rel:.2e} rel); <p> = {podd:.2e}",
            report.fit.coefficient
        ),
    );
}

#[test]
fn acceptance_07_orthonormality() {
    let cfg = cfg();
    let pos = PositionGrid::gauss_legendre(&cfg, 0.0, 1.0, 64, 8).unwrap();
    let mut worst = 0.0f64;
    for i in 1..=8u32 {
        for j in 1..=8u32 {
            let mut g = 0.0;
            for (&x, &w) in pos.nodes().iter().zip(pos.weights()) {
                g += w
                    * analytic::u_box(x, qn(i), &cfg).unwrap()
                    * analytic::u_box(x, qn(j), &cfg).unwrap();
            }
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - want).abs());
        }
    }
    if worst > 1e-10 {
        fail("7 (orthonormality)", format!("Gram deviation {worst:.3e} > 1e-10"));
    }
    pass("7 (orthonormality)", format!("8x8 Gram matrix within {worst:.3e} of identity"));
}

#[test]
fn acceptance_08a_mollified_interior_residuals() {
    let cfg = cfg();
    let eps_list = [1.0 / 50.0, 1.0 / 100.0, 1.0 / 200.0];
    let interior: Vec<_> =
        default_test_suite(&cfg).into_iter().filter(|tf| is_interior(tf, &cfg)).collect();
    let mut lines = Vec::new();
    for variant in [OperatorVariant::Ratio, OperatorVariant::Plain] {
        for n in 1..=2u32 {
            let mut maxima = Vec::new();
            for &eps in &eps_list {
                let params = MollifierParams::new(eps).unwrap();
                let rows =
                    mollifier::weak_residual(qn(n), &params, variant, &interior, &cfg).unwrap();
                maxima.push(rows.iter().map(|r| r.residual).fold(0.0f64, f64::max));
            }
            if !(maxima[0] > maxima[1] && maxima[1] > maxima[2]) {
                fail(
                    "8a (mollified interior residuals)",
                    format!("{} n={n}: not strictly decreasing: {maxima:?}", variant.label()),
                );
            }
            lines.push(format!(
                "{} n={n}: {:.2e} > {:.2e} > {:.2e}",
                variant.label(),
                maxima[0],
                maxima[1],
                maxima[2]
            ));
        }
    }
    pass("8a (mollified interior residuals)", lines.join("; "));
}

#[test]
fn acceptance_08b_mollified_equivalence_difference() {
    // Stated expectation: the weak-sense difference between the two operator
    // variants, paired with wall-straddling test functions, decreases as the
    // smoothing sharpens. Measured behavior: it increases toward a nonzero
    // constant - the smoothed window is 1/2 at the wall where the sharp-step
    // convention would put 1, so the variants differ by a fixed wall term
    // chi(0) * (hbar^2/2m) * u_n'(0) * C with C = Int phi(1-Phi)[t phi/Phi + 1] dt
    // (about 0.0956). The unit suite pins that limit against quadrature of C.
    let cfg = cfg();
    let eps_list = [1.0 / 50.0, 1.0 / 100.0, 1.0 / 200.0];
    let walls: Vec<_> =
        default_test_suite(&cfg).into_iter().filter(|tf| !is_interior(tf, &cfg)).collect();
    let mut failures = Vec::new();
    let mut lines = Vec::new();
    for n in 1..=2u32 {
        let mut maxima = Vec::new();
        for &eps in &eps_list {
            let params = MollifierParams::new(eps).unwrap();
            let rows = mollifier::equivalence_check(qn(n), &params, &walls, &cfg).unwrap();
            maxima.push(rows.iter().map(|r| r.residual).fold(0.0f64, f64::max));
        }
        if !(maxima[0] > maxima[1] && maxima[1] > maxima[2]) {
            failures.push(format!("n={n}: {:.3e}, {:.3e}, {:.3e}", maxima[0], maxima[1], maxima[2]));
        }
        lines.push(format!("n={n}: {:.3e} -> {:.3e} -> {:.3e}", maxima[0], maxima[1], maxima[2]));
    }
    if !failures.is_empty() {
        fail(
            "8b (mollified equivalence difference)",
            format!(
                "wall-paired variant difference does not decrease as eps -> 0; measured over eps = L/50, L/100, L/200: {}; it converges to the nonzero window-mismatch constant instead",
                lines.join("; ")
            ),
        );
    }
    pass("8b (mollified equivalence difference)", lines.join("; "));
}

#[test]
fn acceptance_09_under_resolution_detection() {
    let cfg = cfg();
    let grid = Arc::new(MomentumGrid::gauss_legendre(60.0 * PI, 2, 8).unwrap());
    assert_eq!(grid.len(), 16);
    let a = ComplexOperatorMatrix::build(&grid, &cfg, OperatorOptions::default());
    let spectrum = a.solve_spectrum().unwrap();
    match spectrum.match_modes(&cfg, 5) {
        Err(SolveError::ModeNotResolved { n, overlap, .. }) => {
            let message = SolveError::ModeNotResolved { n, overlap, mass: 1.0 }.to_string();
            assert!(message.contains("mode not resolved"));
            pass(
                "9 (under-resolution detection)",
                format!("16-node run reports mode not resolved for n={n} (overlap {overlap:.3})"),
            );
        }
        Err(other) => fail("9 (under-resolution detection)", format!("unexpected error {other}")),
        Ok(_) => fail(
            "9 (under-resolution detection)",
            "a 16-node grid claimed to resolve all modes".to_string(),
        ),
    }
}
