//! Independent oracles for the acceptance suite. Everything here reaches the
//! target values by a route disjoint from the engine: log-gamma closed forms,
//! direct dense-grid summation, and the rational closed form of the
//! trapezoidal kernel.

use rustfft::num_complex::Complex64;
use toeplitz_hv_core::numerics::TrigCoeffs;

/// `ln B(a, b)` via log-gamma.
pub fn lbeta(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}

/// `B(a, b)`.
pub fn beta(a: f64, b: f64) -> f64 {
    lbeta(a, b).exp()
}

/// Direct dense-grid evaluation of `∫ |Σ c_k e^{ikφ}| dφ` by plain
/// summation, no FFT involved.
pub fn dense_l1_direct(coeffs: &TrigCoeffs, points: usize) -> f64 {
    let mut sum = 0.0;
    for j in 0..points {
        let phi = std::f64::consts::TAU * j as f64 / points as f64;
        let mut z = Complex64::new(0.0, 0.0);
        for (&k, &c) in coeffs {
            let arg = k as f64 * phi;
            z += c * Complex64::new(arg.cos(), arg.sin());
        }
        sum += z.norm();
    }
    sum * std::f64::consts::TAU / points as f64
}

/// The trapezoidal window with all values 1 over `(p, q]`, peak at `m`, has
/// the rational closed form
/// `T(z) = (z^(p+1)/(m-p) - z^(m+1) (1/(m-p) + 1/(q-m)) + z^(q+1)/(q-m)) / (1-z)^2`
/// on `|z| = 1`, which this evaluates pointwise in O(1).
pub fn trapezoid_eval(p: i64, m: i64, q: i64, phi: f64) -> f64 {
    let a = 1.0 / (m - p) as f64;
    let c = 1.0 / (q - m) as f64;
    let b = -(a + c);
    let z = Complex64::new(phi.cos(), phi.sin());
    let one_minus_z = Complex64::new(1.0, 0.0) - z;
    if one_minus_z.norm() < 1e-9 {
        // removable singularity: the value is the coefficient sum (q - p)/2
        return (q - p) as f64 / 2.0;
    }
    let pow = |e: i64| {
        let arg = e as f64 * phi;
        Complex64::new(arg.cos(), arg.sin())
    };
    let num = pow(p + 1) * a + pow(m + 1) * b + pow(q + 1) * c;
    (num / (one_minus_z * one_minus_z)).norm()
}

/// `∫_0^2π |T(φ)| dφ` of the trapezoidal kernel by dense Riemann sum over
/// the closed form.
pub fn trapezoid_l1_closed_form(p: i64, m: i64, q: i64, points: usize) -> f64 {
    let mut sum = 0.0;
    for j in 0..points {
        let phi = std::f64::consts::TAU * j as f64 / points as f64;
        sum += trapezoid_eval(p, m, q, phi);
    }
    sum * std::f64::consts::TAU / points as f64
}

/// Least-squares slope of `y` against `x`.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
