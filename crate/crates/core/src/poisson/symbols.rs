use num::complex::Complex64;
use num::{BigInt, One, Zero};

use crate::algebra::{int, quadratic_form, rat, BoundaryFunction, GaussianRational, Rational};
use crate::error::{Error, Result};
use crate::geometry::MetricExpansion;
use crate::numerics::gamma::{gamma, is_gamma_pole, rgamma};

use super::einstein::einstein_log_recursion;

/// Where a scattering value came from.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Provenance {
    Symbolic,
    Numeric,
    ClosedForm,
}

#[derive(Clone, PartialEq, Debug)]
pub enum ScalarValue {
    Exact(GaussianRational),
    Float(Complex64),
    /// Γ pole hit; no finite value.
    Pole,
}

#[derive(Clone, PartialEq, Debug)]
pub struct ScatteringValue {
    pub mode: Vec<i64>,
    pub zeta: Complex64,
    pub value: ScalarValue,
    pub provenance: Provenance,
}

/// c(ζ) = 2^{n−2ζ} Γ(n/2−ζ)/Γ(ζ−n/2). `None` at poles of Γ(n/2−ζ).
pub fn symbol_constant(n: usize, zeta: Complex64) -> Option<Complex64> {
    let a = Complex64::new(n as f64 / 2.0, 0.0) - zeta;
    if is_gamma_pole(a) {
        return None;
    }
    let two = Complex64::new(2.0, 0.0);
    Some(two.powc(Complex64::new(n as f64, 0.0) - 2.0 * zeta) * gamma(a) * rgamma(-a))
}

/// c(ζ) q^{2ζ−n}. At Γ poles returns `ScalarValue::Pole`.
pub fn scattering_symbol(n: usize, zeta: Complex64, q: f64) -> Result<ScalarValue> {
    if q < 0.0 {
        return Err(Error::IllPosed(format!("negative frequency norm {q}")));
    }
    let Some(c) = symbol_constant(n, zeta) else {
        return Ok(ScalarValue::Pole);
    };
    let e = 2.0 * zeta - n as f64;
    if q == 0.0 {
        if e.re > 0.0 {
            return Ok(ScalarValue::Float(Complex64::new(0.0, 0.0)));
        }
        return Err(Error::IllPosed("q = 0 with Re(2ζ−n) ≤ 0".into()));
    }
    Ok(ScalarValue::Float(c * Complex64::new(q, 0.0).powc(e)))
}

/// Symbol evaluated at the mode ξ of a flat model with boundary metric h0.
pub fn mode_symbol(h0_inv: &[Vec<Rational>], xi: &[i64], n: usize, zeta: Complex64) -> Result<ScatteringValue> {
    let q2 = crate::algebra::rational_to_f64(&quadratic_form(h0_inv, xi));
    Ok(ScatteringValue {
        mode: xi.to_vec(),
        zeta,
        value: scattering_symbol(n, zeta, q2.sqrt())?,
        provenance: Provenance::ClosedForm,
    })
}

fn factorial(m: usize) -> BigInt {
    (1..=m).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// Res_{ζ=n} c(ζ)(q²)^{ζ−n/2} for even n, exact in q²:
/// −(−1)^m 2^{−n}(q²)^m / (m!(m−1)!), m = n/2.
pub fn symbol_residue_at_n(n: usize, q2: &Rational) -> Result<Rational> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::Unsupported(format!("residue at ζ = n needs even n, got {n}")));
    }
    let m = n / 2;
    let sign = if m % 2 == 0 { int(-1) } else { int(1) };
    let den = Rational::from_integer(factorial(m) * factorial(m - 1) * (BigInt::one() << n));
    Ok(sign * num::pow::pow(q2.clone(), m) / den)
}

/// lim_{ζ→n} (n−ζ)Γ(n/2−ζ) = (−1)^{n/2}/(n/2)!.
pub fn mso_limit(n: usize) -> Result<Rational> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::Unsupported(format!("needs even n, got {n}")));
    }
    let m = n / 2;
    let sign = if m % 2 == 0 { int(1) } else { int(-1) };
    Ok(sign / Rational::from_integer(factorial(m)))
}

/// 2^{−n+1} L/Γ(n/2) · qⁿ ln q with L = `mso_limit(n)`.
pub fn mso_symbol(n: usize, q: f64) -> Result<f64> {
    if q <= 0.0 {
        return Err(Error::IllPosed(format!("q must be positive, got {q}")));
    }
    let l = crate::algebra::rational_to_f64(&mso_limit(n)?);
    let g = crate::algebra::rational_to_f64(&Rational::from_integer(factorial(n / 2 - 1)));
    Ok(2f64.powi(1 - n as i32) * l / g * q.powi(n as i32) * q.ln())
}

/// c(n−ζ)(1+q²)^{n/2−ζ} c(ζ) q^{2ζ−n}.
pub fn s_tilde_factorization(n: usize, zeta: Complex64, q: f64) -> Result<ScalarValue> {
    let refl = Complex64::new(n as f64, 0.0) - zeta;
    let (Some(a), Some(b)) = (symbol_constant(n, refl), symbol_constant(n, zeta)) else {
        return Ok(ScalarValue::Pole);
    };
    if q <= 0.0 {
        return Err(Error::IllPosed(format!("q must be positive, got {q}")));
    }
    let w = Complex64::new(1.0 + q * q, 0.0).powc(Complex64::new(n as f64 / 2.0, 0.0) - zeta);
    Ok(ScalarValue::Float(
        a * b * w * Complex64::new(q, 0.0).powc(2.0 * zeta - n as f64),
    ))
}

#[derive(Clone, PartialEq, Debug)]
pub struct ResidueRelation {
    pub n: usize,
    pub mode: Vec<i64>,
    pub q2: Rational,
    pub residue: Rational,
    /// p_n coefficient at the mode, from the ζ = n recursion.
    pub p_n: GaussianRational,
    pub holds: bool,
}

/// Flat-model check of 2·Res_{ζ=n} S = p_n at one mode.
pub fn residue_relation_check(h0: &[Vec<Rational>], xi: &[i64]) -> Result<ResidueRelation> {
    let n = h0.len();
    let g = MetricExpansion::new(h0.to_vec(), vec![], n + 1)?;
    let q2 = quadratic_form(g.h0_inv(), xi);
    let residue = if q2.is_zero() {
        int(0)
    } else {
        symbol_residue_at_n(n, &q2)?
    };
    let f = BoundaryFunction::exponential(n, xi.to_vec(), GaussianRational::real(int(1)));
    let p_n = einstein_log_recursion(&g, &f)?.p_n.coefficient(xi);
    let holds = p_n == GaussianRational::real(residue.clone() * rat(2, 1));
    Ok(ResidueRelation {
        n,
        mode: xi.to_vec(),
        q2,
        residue,
        p_n,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::identity;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn float(v: ScalarValue) -> Complex64 {
        match v {
            ScalarValue::Float(z) => z,
            other => panic!("expected float, got {other:?}"),
        }
    }

    #[test]
    fn gamma_identity_values() {
        assert!((float(scattering_symbol(1, c(1.0), 1.0).unwrap()) - c(-1.0)).norm() < 1e-13);
        assert!((float(scattering_symbol(2, c(1.5), 2.0).unwrap()) - c(-2.0)).norm() < 1e-13);
        assert_eq!(scattering_symbol(3, c(1.5), 1.0).unwrap(), ScalarValue::Pole);
    }

    #[test]
    fn zero_frequency() {
        assert_eq!(float(scattering_symbol(2, c(1.7), 0.0).unwrap()), c(0.0));
        assert!(scattering_symbol(2, c(0.7), 0.0).is_err());
    }

    #[test]
    fn reflection_product_is_one() {
        for z in [Complex64::new(0.3, 0.4), Complex64::new(1.25, -2.0), c(0.9)] {
            let p = symbol_constant(2, z).unwrap() * symbol_constant(2, c(2.0) - z).unwrap();
            assert!((p - c(1.0)).norm() < 1e-12, "{z}");
        }
    }

    #[test]
    fn s_tilde_tends_to_one() {
        let v = float(s_tilde_factorization(1, c(0.75), 10.0).unwrap());
        assert!((v - c(1.0)).norm() < 0.02);
        let far = float(s_tilde_factorization(1, c(0.75), 1e6).unwrap());
        assert!((far - c(1.0)).norm() < 1e-10);
    }

    #[test]
    fn mso_values() {
        assert_eq!(mso_symbol(2, 1.0).unwrap(), 0.0);
        let e = std::f64::consts::E;
        assert!((mso_symbol(2, e).unwrap() + 0.5 * e * e).abs() < 1e-13);
        assert!(mso_symbol(4, 2.0).unwrap() != mso_symbol(4, 3.0).unwrap());
        assert!(mso_symbol(2, 0.0).is_err());
    }

    #[test]
    fn residue_matches_numeric_limit() {
        // (ζ−n) c(ζ) q^{2ζ−n} near ζ = n
        for (n, q2) in [(2usize, 5i64), (4, 3)] {
            let eps = 1e-7;
            let z = c(n as f64 + eps);
            let v = eps * float(scattering_symbol(n, z, (q2 as f64).sqrt()).unwrap()).re;
            let r = crate::algebra::rational_to_f64(&symbol_residue_at_n(n, &int(q2)).unwrap());
            assert!((v - r).abs() < 1e-5 * r.abs(), "{n} {v} {r}");
        }
    }

    #[test]
    fn residue_relation_flat_n2() {
        for xi in [vec![1, 0], vec![1, 1], vec![2, 1], vec![0, 0]] {
            let rep = residue_relation_check(&identity(2), &xi).unwrap();
            assert!(rep.holds, "{xi:?}");
        }
        let rep = residue_relation_check(&identity(2), &[1, 0]).unwrap();
        assert_eq!(rep.residue, rat(1, 4));
    }
}
