//! Dense univariate polynomials in ζ over the Gaussian rationals.
//!
//! Coefficients are stored in ascending degree order. The representation is
//! canonical: no trailing zero coefficients, and the zero polynomial is the
//! empty vector.

use std::fmt;

use super::scalar::{GaussianRational, Scalar};

#[derive(Clone, PartialEq, Debug)]
pub struct Poly {
    coeffs: Vec<GaussianRational>,
}

impl Poly {
    fn normalize(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    pub fn from_coeffs(coeffs: Vec<GaussianRational>) -> Self {
        Poly { coeffs }.normalize()
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: GaussianRational) -> Self {
        Poly::from_coeffs(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(GaussianRational::one())
    }

    /// The indeterminate ζ.
    pub fn zeta() -> Self {
        Poly::from_coeffs(vec![GaussianRational::zero(), GaussianRational::one()])
    }

    /// a + bζ
    pub fn linear(a: GaussianRational, b: GaussianRational) -> Self {
        Poly::from_coeffs(vec![a, b])
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> GaussianRational {
        self.coeffs.get(k).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&GaussianRational> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let len = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..len).map(|k| self.coeff(k).add(&o.coeff(k))).collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let len = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..len).map(|k| self.coeff(k).sub(&o.coeff(k))).collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![GaussianRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn scale(&self, c: &GaussianRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("polynomial division by zero");
        let lead_inv = d.leading().unwrap().inverse().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![GaussianRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].mul(&lead_inv);
            if !c.is_zero() {
                for (i, b) in d.coeffs.iter().enumerate() {
                    rem[k + i] = rem[k + i].sub(&c.mul(b));
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Monic version (zero stays zero).
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) if l.is_one() => self.clone(),
            Some(l) => self.scale(&l.inverse().unwrap()),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn eval(&self, z: &GaussianRational) -> GaussianRational {
        self.coeffs
            .iter()
            .rev()
            .fold(GaussianRational::zero(), |acc, c| acc.mul(z).add(c))
    }

    pub fn eval_complex(&self, z: num::complex::Complex64) -> num::complex::Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(num::complex::Complex64::new(0.0, 0.0), |acc, c| {
                acc * z + c.to_complex()
            })
    }

    /// Coefficients of p(ζ0 + t) in powers of t.
    pub fn shift(&self, z0: &GaussianRational) -> Poly {
        // repeated synthetic division yields the Taylor coefficients at z0
        let mut work = self.coeffs.clone();
        let mut out = Vec::with_capacity(work.len());
        while !work.is_empty() {
            let mut acc = GaussianRational::zero();
            let mut next = vec![GaussianRational::zero(); work.len() - 1];
            for k in (0..work.len()).rev() {
                acc = acc.mul(z0).add(&work[k]);
                if k > 0 {
                    next[k - 1] = acc.clone();
                }
            }
            out.push(acc);
            work = next;
        }
        Poly::from_coeffs(out)
    }

    /// Substitutes ζ ↦ a + bζ.
    pub fn compose_linear(&self, a: &GaussianRational, b: &GaussianRational) -> Poly {
        let lin = Poly::linear(a.clone(), b.clone());
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| acc.mul(&lin).add(&Poly::constant(c.clone())))
    }

    /// self / (ζ − r) when r is a root.
    pub fn div_linear(&self, r: &GaussianRational) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let mut out = vec![GaussianRational::zero(); self.coeffs.len() - 1];
        let mut acc = GaussianRational::zero();
        for k in (0..self.coeffs.len()).rev() {
            acc = acc.mul(r).add(&self.coeffs[k]);
            if k > 0 {
                out[k - 1] = acc.clone();
            }
        }
        acc.is_zero().then(|| Poly::from_coeffs(out))
    }

    /// ∏ (ζ − r)^m.
    pub fn from_roots(roots: &[(GaussianRational, usize)]) -> Poly {
        let mut p = Poly::one();
        for (r, m) in roots {
            let lin = Poly::linear(r.neg(), GaussianRational::one());
            for _ in 0..*m {
                p = p.mul(&lin);
            }
        }
        p
    }

    /// Multiplicity of the root ζ0.
    pub fn root_multiplicity(&self, z0: &GaussianRational) -> usize {
        if self.is_zero() {
            return 0;
        }
        let shifted = self.shift(z0);
        shifted.coeffs.iter().take_while(|c| c.is_zero()).count()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let body = match (k, c.is_real()) {
                (0, _) => c.to_string(),
                (_, true) if c.is_one() => String::new(),
                (_, true) if c.neg().is_one() => "-".to_string(),
                (_, true) => c.to_string(),
                (_, false) => format!("({c})"),
            };
            let var = match k {
                0 => String::new(),
                1 => "ζ".to_string(),
                _ => format!("ζ^{k}"),
            };
            let term = format!("{body}{var}");
            if first {
                write!(f, "{term}")?;
            } else if let Some(rest) = term.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {term}")?;
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::gr;

    fn p(cs: &[i64]) -> Poly {
        Poly::from_coeffs(cs.iter().map(|&c| gr(c, 1)).collect())
    }

    #[test]
    fn gcd_of_shared_linear_factor() {
        // (ζ-2)(ζ+2) and (ζ-2)(ζ+5)
        let a = p(&[-4, 0, 1]);
        let b = p(&[-10, 3, 1]);
        assert_eq!(a.gcd(&b), p(&[-2, 1]));
    }

    #[test]
    fn shift_gives_taylor_coefficients() {
        // ζ^2 at ζ0 = 3: 9 + 6t + t^2
        assert_eq!(p(&[0, 0, 1]).shift(&gr(3, 1)), p(&[9, 6, 1]));
        assert_eq!(p(&[4, -4, 1]).root_multiplicity(&gr(2, 1)), 2);
    }

    #[test]
    fn display() {
        assert_eq!(p(&[-8, 4]).to_string(), "4ζ - 8");
        assert_eq!(p(&[1, 0, -1]).to_string(), "-ζ^2 + 1");
    }
}
