//! Modified Bessel function K_ν(z) for complex order and real z > 0.
//!
//! Three evaluators: the I_{±ν} power series (small z, non-integer ν), the
//! large-z asymptotic series, and trapezoidal quadrature of
//! K_ν(z) = ∫_0^∞ e^{−z cosh t} cosh(νt) dt, which covers everything else.

use num::complex::Complex64;
use std::f64::consts::PI;

use super::gamma::rgamma;
use crate::error::{Error, Result};

pub const SERIES_MAX: f64 = 2.0;
pub const ASYMPTOTIC_MIN: f64 = 25.0;

fn near_integer(nu: Complex64) -> bool {
    nu.im.abs() < 1e-12 && (nu.re - nu.re.round()).abs() < 1e-6
}

/// Σ (z/2)^{2k+ν}/(k! Γ(k+ν+1)).
pub fn bessel_i_series(nu: Complex64, z: f64) -> Complex64 {
    let h = z / 2.0;
    let lead = Complex64::new(h, 0.0).powc(nu);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = 1.0; // (z/2)^{2k}/k!
    for k in 0..200 {
        if k > 0 {
            pow *= h * h / k as f64;
        }
        let term = pow * rgamma(nu + (k + 1) as f64);
        sum += term;
        if k > 4 && term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    lead * sum
}

pub fn bessel_k_series(nu: Complex64, z: f64) -> Result<Complex64> {
    if near_integer(nu) {
        return Err(Error::Numerical(format!(
            "series form needs non-integer order, got {nu}"
        )));
    }
    let s = (PI * nu).sin();
    Ok(PI / (2.0 * s) * (bessel_i_series(-nu, z) - bessel_i_series(nu, z)))
}

/// √(π/2z) e^{−z} Σ_k a_k(ν)/z^k, stopped at the smallest term.
pub fn bessel_k_asymptotic(nu: Complex64, z: f64) -> Complex64 {
    let mu = 4.0 * nu * nu;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * z);
        if next.norm() >= last || next.norm() <= 1e-18 * sum.norm() {
            if next.norm() < last {
                sum += next;
            }
            break;
        }
        last = next.norm();
        term = next;
        sum += term;
    }
    (PI / (2.0 * z)).sqrt() * (-z).exp() * sum
}

pub fn bessel_k_quadrature(nu: Complex64, z: f64) -> Complex64 {
    let h = 0.02;
    let growth = nu.re.abs();
    let mut acc = Complex64::new(0.5, 0.0) * (-z).exp();
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let e = -z * t.cosh();
        if e + growth * t < -745.0 {
            break;
        }
        acc += e.exp() * (nu * t).cosh();
        k += 1;
    }
    acc * h
}

/// K_ν(z), z > 0.
pub fn bessel_k(nu: Complex64, z: f64) -> Result<Complex64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Numerical(format!("K_ν needs z > 0, got {z}")));
    }
    if z <= SERIES_MAX && !near_integer(nu) {
        return bessel_k_series(nu, z);
    }
    if z >= ASYMPTOTIC_MIN {
        return Ok(bessel_k_asymptotic(nu, z));
    }
    Ok(bessel_k_quadrature(nu, z))
}

/// dK_ν/dz = −(K_{ν−1} + K_{ν+1})/2.
pub fn bessel_k_derivative(nu: Complex64, z: f64) -> Result<Complex64> {
    Ok(-0.5 * (bessel_k(nu - 1.0, z)? + bessel_k(nu + 1.0, z)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn half_order_closed_form() {
        // K_{1/2}(z) = √(π/2z) e^{−z}
        let nu = Complex64::new(0.5, 0.0);
        for z in [0.3, 1.0, 2.0, 5.0, 12.0, 30.0] {
            let exact = (PI / (2.0 * z)).sqrt() * (-z as f64).exp();
            assert!(rel(bessel_k(nu, z).unwrap(), Complex64::new(exact, 0.0)) < 1e-13, "{z}");
        }
    }

    #[test]
    fn evaluators_agree_in_overlaps() {
        for nu in [
            Complex64::new(0.3, 0.0),
            Complex64::new(0.85, 0.0),
            Complex64::new(1.4, 0.7),
        ] {
            for z in [0.5, 1.0, 2.0] {
                let a = bessel_k_series(nu, z).unwrap();
                assert!(rel(a, bessel_k_quadrature(nu, z)) < 1e-12, "{nu} {z}");
            }
            for z in [25.0, 40.0] {
                assert!(
                    rel(bessel_k_asymptotic(nu, z), bessel_k_quadrature(nu, z)) < 1e-12,
                    "{nu} {z}"
                );
            }
        }
    }

    #[test]
    fn recurrence() {
        // K_{ν+1} − K_{ν−1} = (2ν/z) K_ν
        let nu = Complex64::new(0.35, 0.2);
        for z in [0.7, 3.0, 9.0] {
            let lhs = bessel_k(nu + 1.0, z).unwrap() - bessel_k(nu - 1.0, z).unwrap();
            let rhs = 2.0 * nu / z * bessel_k(nu, z).unwrap();
            assert!(rel(lhs, rhs) < 1e-12);
        }
    }

    #[test]
    fn integer_order_uses_quadrature() {
        // K_0(1) = 0.42102443824070833
        let v = bessel_k(Complex64::new(0.0, 0.0), 1.0).unwrap();
        assert!((v.re - 0.421_024_438_240_708_3).abs() < 1e-14);
    }
}
