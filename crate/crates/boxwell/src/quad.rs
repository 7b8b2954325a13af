//! Quadrature kernels shared by the grid constructors and the moment engine.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence. Nodes are returned in ascending order.
pub(crate) fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be at least 1");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-based initial guess, then Newton.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    // cos() guesses come out descending in x for ascending i
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Composite Gauss-Legendre rule over [a, b]: `panels` equal panels of the
/// given per-panel order. Nodes ascending.
pub(crate) fn composite_gauss(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(panels >= 1 && b > a);
    let (gn, gw) = gauss_legendre(order);
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    let h = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for k in 0..order {
            nodes.push(lo + 0.5 * h * (gn[k] + 1.0));
            weights.push(0.5 * h * gw[k]);
        }
    }
    (nodes, weights)
}

/// Uniform trapezoid rule over [a, b] with `n` nodes (n >= 2), endpoints included.
pub(crate) fn trapezoid(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2 && b > a);
    let h = (b - a) / (n - 1) as f64;
    let nodes: Vec<f64> = (0..n).map(|i| a + i as f64 * h).collect();
    let mut weights = vec![h; n];
    weights[0] = 0.5 * h;
    weights[n - 1] = 0.5 * h;
    (nodes, weights)
}

/// Remainder of the sine integral, S(x) = pi/2 - Si(x) = integral of sin(t)/t
/// over [x, inf).
///
/// For x >= 2 the oscillatory tail is rotated onto the imaginary axis,
/// S(x) = Im[i e^{ix} \int_0^inf e^{-u}/(x+iu) du], and the smooth integrand
/// is handled by panelled Gauss quadrature; below that the power series for
/// Si is exact to machine precision.
pub(crate) fn si_complement(x: f64) -> f64 {
    assert!(x > 0.0 && x.is_finite());
    if x < 2.0 {
        let mut si = 0.0;
        let mut term = x;
        let mut k = 0usize;
        loop {
            si += term / (2 * k + 1) as f64;
            term *= -x * x / ((2 * k + 2) as f64 * (2 * k + 3) as f64);
            k += 1;
            if term.abs() < 1e-18 || k > 60 {
                break;
            }
        }
        return PI / 2.0 - si;
    }
    let (un, uw) = composite_gauss(0.0, 45.0, 60, 12);
    let mut re = 0.0;
    let mut im = 0.0;
    for (&u, &w) in un.iter().zip(&uw) {
        // e^{-u} / (x + iu)
        let d = x * x + u * u;
        let e = w * (-u).exp() / d;
        re += e * x;
        im += -e * u;
    }
    // Im[i e^{ix} (re + i im)] = cos(x) * re + sin(x) * (-im) ... expanded below
    let (s, c) = x.sin_cos();
    c * re - s * im
}
