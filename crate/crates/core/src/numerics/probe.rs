use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;

use super::connection::numeric_connection;
use super::mode::ModeProblem;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PoleFit {
    pub zeta0: f64,
    /// Best integer order p in c/(ζ−ζ0)^p + r0 + r1(ζ−ζ0); 0 means no pole.
    pub order: usize,
    pub strength: Complex64,
    /// Relative residual of the chosen model.
    pub residual: f64,
    /// Relative residuals for p = 0, 1, …, max_order.
    pub residuals: Vec<f64>,
    /// −d ln|v| / d ln|ζ−ζ0| from the two innermost samples.
    pub slope: f64,
}

/// Fits sampled values v(ζ0 + δ) for each offset δ.
pub fn fit_pole(zeta0: f64, samples: &[(f64, Complex64)], max_order: usize) -> Result<PoleFit> {
    if samples.len() < 4 {
        return Err(Error::IllPosed("pole fit needs at least 4 samples".into()));
    }
    let m = samples.len();
    let rhs = DVector::from_iterator(m, samples.iter().map(|s| s.1));
    let mut residuals = Vec::new();
    let mut best: Option<(usize, Complex64, f64)> = None;
    for p in 0..=max_order {
        let a = DMatrix::from_fn(m, 3, |i, j| {
            let d = samples[i].0;
            Complex64::new(
                match j {
                    0 => d.powi(-(p as i32)),
                    1 => 1.0,
                    _ => d,
                },
                0.0,
            )
        });
        let a = if p == 0 { a.columns(1, 2).into_owned() } else { a };
        let svd = a.clone().svd(true, true);
        let coef = svd.solve(&rhs, 1e-14).map_err(|e| Error::Numerical(e.to_string()))?;
        let res = (&a * &coef - &rhs).norm() / rhs.norm();
        residuals.push(res);
        let strength = if p == 0 { Complex64::new(0.0, 0.0) } else { coef[0] };
        if best.as_ref().map_or(true, |b| res < 0.5 * b.2) {
            best = Some((p, strength, res));
        }
    }
    let (order, strength, residual) = best.expect("at least one model");
    let mut by_dist: Vec<&(f64, Complex64)> = samples.iter().collect();
    by_dist.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()));
    let (s0, s1) = (by_dist[0], by_dist[1]);
    let slope = -(s1.1.norm().ln() - s0.1.norm().ln()) / (s1.0.abs().ln() - s0.0.abs().ln());
    Ok(PoleFit {
        zeta0,
        order,
        strength,
        residual,
        residuals,
        slope,
    })
}

/// Numeric b/a sampled at ζ0 + δ for each δ and fitted.
pub fn pole_probe(p: &ModeProblem, zeta0: f64, offsets: &[f64], max_order: usize) -> Result<PoleFit> {
    let mut samples = Vec::with_capacity(offsets.len());
    for d in offsets {
        let mut q = p.clone();
        q.zeta = Complex64::new(zeta0 + d, 0.0);
        samples.push((*d, numeric_connection(&q)?.ratio()));
    }
    fit_pole(zeta0, &samples, max_order)
}

/// ±(2, 3, 4, 6, 8) × 1e−3.
pub fn default_offsets() -> Vec<f64> {
    let base = [2e-3, 3e-3, 4e-3, 6e-3, 8e-3];
    base.iter().flat_map(|d| [*d, -*d]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::{scattering_symbol, ScalarValue};

    #[test]
    fn synthetic_double_pole() {
        let samples: Vec<(f64, Complex64)> = default_offsets()
            .into_iter()
            .map(|d| (d, Complex64::new(3.0 / (d * d) + 1.0 - 2.0 * d, 0.0)))
            .collect();
        let fit = fit_pole(1.0, &samples, 3).unwrap();
        assert_eq!(fit.order, 2);
        assert!((fit.strength.re - 3.0).abs() < 1e-8);
    }

    #[test]
    fn symbol_has_simple_pole_at_integer_shift() {
        // c(ζ) has a pole at ζ = n/2 + 1 from Γ(n/2 − ζ)
        let z0 = 2.0;
        let samples: Vec<(f64, Complex64)> = default_offsets()
            .into_iter()
            .map(
                |d| match scattering_symbol(2, Complex64::new(z0 + d, 0.0), 1.0).unwrap() {
                    ScalarValue::Float(v) => (d, v),
                    _ => unreachable!(),
                },
            )
            .collect();
        let fit = fit_pole(z0, &samples, 3).unwrap();
        assert_eq!(fit.order, 1);
        // residue of 2^{2−2ζ}Γ(1−ζ)/Γ(ζ−1) at ζ = 2: Γ(1−ζ) ~ 1/(ζ−2)
        assert!((fit.strength.re - 0.25).abs() < 1e-4, "{:?}", fit);
    }
}
