//! Trigonometric polynomials and symmetric 2-tensors on the flat torus.

use std::collections::BTreeMap;
use std::fmt;

use super::scalar::{int, rat, ComplexScalar, GaussianRational, Rational, Scalar};
use crate::error::{Error, Result};

/// Integer frequency vector ξ of the exponential e^{iξ·y}.
pub type Frequency = Vec<i64>;

/// Finite Fourier sum Σ c_ξ e^{iξ·y} on the n-torus. Zero coefficients are
/// never stored.
#[derive(Clone, PartialEq, Debug)]
pub struct BoundaryFunction<S> {
    dim: usize,
    terms: BTreeMap<Frequency, S>,
}

impl<S: Scalar> BoundaryFunction<S> {
    pub fn zero(dim: usize) -> Self {
        BoundaryFunction {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: S) -> Self {
        Self::exponential(dim, vec![0; dim], c)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, S::one())
    }

    /// c e^{iξ·y}
    pub fn exponential(dim: usize, xi: Frequency, c: S) -> Self {
        assert_eq!(xi.len(), dim, "frequency has wrong dimension");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(xi, c);
        }
        BoundaryFunction { dim, terms }
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Frequency, S)>) -> Self {
        let mut out = Self::zero(dim);
        for (xi, c) in terms {
            assert_eq!(xi.len(), dim, "frequency has wrong dimension");
            out.add_term(xi, &c);
        }
        out
    }

    fn add_term(&mut self, xi: Frequency, c: &S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&xi) {
            Some(v) => {
                let s = v.add(c);
                if s.is_zero() {
                    self.terms.remove(&xi);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(xi, c.clone());
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<Frequency, S> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, xi: &[i64]) -> S {
        self.terms.get(xi).cloned().unwrap_or_else(S::zero)
    }

    /// The value when the function does not depend on y.
    pub fn as_constant(&self) -> Option<S> {
        match self.terms.len() {
            0 => Some(S::zero()),
            1 => self.terms.get(&vec![0; self.dim]).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (xi, c) in &o.terms {
            out.add_term(xi.clone(), c);
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return Self::zero(self.dim);
        }
        self.map(|c| c.mul(s))
    }

    /// Exact product of trigonometric polynomials.
    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let xi: Frequency = a.iter().zip(b).map(|(p, q)| p + q).collect();
                out.add_term(xi, &ca.mul(cb));
            }
        }
        out
    }

    /// Coefficientwise map; zero results are dropped.
    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        self.map_into(f)
    }

    /// Coefficientwise change of scalar ring.
    pub fn map_into<T: Scalar>(&self, f: impl Fn(&S) -> T) -> BoundaryFunction<T> {
        let terms = self
            .terms
            .iter()
            .filter_map(|(xi, c)| {
                let v = f(c);
                (!v.is_zero()).then(|| (xi.clone(), v))
            })
            .collect();
        BoundaryFunction { dim: self.dim, terms }
    }

    /// Multiplies the coefficient of e^{iξ·y} by `m(ξ)`.
    pub fn multiplier(&self, m: impl Fn(&[i64]) -> S) -> Self {
        let terms = self
            .terms
            .iter()
            .filter_map(|(xi, c)| {
                let v = c.mul(&m(xi));
                (!v.is_zero()).then(|| (xi.clone(), v))
            })
            .collect();
        BoundaryFunction { dim: self.dim, terms }
    }

    /// Flat Laplacian of the constant metric h0 with positive spectrum:
    /// e^{iξ·y} ↦ (ξ·h0⁻¹ξ) e^{iξ·y}. `h0_inv` must be the inverse of h0.
    pub fn flat_laplacian(&self, h0_inv: &[Vec<Rational>]) -> Self {
        self.multiplier(|xi| S::from_rational(&quadratic_form(h0_inv, xi)))
    }
}

impl<S: ComplexScalar> BoundaryFunction<S> {
    /// ∂/∂y_i: e^{iξ·y} ↦ iξ_i e^{iξ·y}
    pub fn partial(&self, i: usize) -> Self {
        self.multiplier(|xi| S::from_gaussian(&GaussianRational::new(int(0), int(xi[i]))))
    }

    /// Complex conjugate function: c_ξ ↦ conj(c_{-ξ}).
    pub fn conjugate(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(xi, c)| (xi.iter().map(|v| -v).collect(), c.conj()))
            .collect();
        BoundaryFunction { dim: self.dim, terms }
    }

    /// True when c_{-ξ} = conj(c_ξ) for every ξ.
    pub fn is_real(&self) -> bool {
        self.conjugate() == *self
    }
}

/// ξ·Aξ for a rational matrix A.
pub fn quadratic_form(a: &[Vec<Rational>], xi: &[i64]) -> Rational {
    let mut acc = int(0);
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if xi[i] != 0 && xi[j] != 0 {
                acc += v * int(xi[i] * xi[j]);
            }
        }
    }
    acc
}

impl<S: Scalar> fmt::Display for BoundaryFunction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(xi, c)| {
                if xi.iter().all(|&v| v == 0) {
                    format!("[{c}]")
                } else {
                    let xs: Vec<String> = xi.iter().map(|v| v.to_string()).collect();
                    format!("[{c}]e({})", xs.join(","))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Symmetric n×n matrix of boundary functions.
#[derive(Clone, PartialEq, Debug)]
pub struct BoundaryTensor<S> {
    entries: Vec<Vec<BoundaryFunction<S>>>,
}

impl<S: Scalar> BoundaryTensor<S> {
    /// Validates symmetry.
    pub fn new(entries: Vec<Vec<BoundaryFunction<S>>>) -> Result<Self> {
        let n = entries.len();
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, e) in row.iter().enumerate() {
                if e.dim() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: e.dim(),
                    });
                }
                if j > i && *e != entries[j][i] {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        Ok(BoundaryTensor { entries })
    }

    pub fn zero(n: usize) -> Self {
        BoundaryTensor {
            entries: vec![vec![BoundaryFunction::zero(n); n]; n],
        }
    }

    /// Constant tensor from a rational matrix.
    pub fn from_constant(m: &[Vec<Rational>]) -> Result<Self> {
        let n = m.len();
        let entries = m
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| BoundaryFunction::constant(n, S::from_rational(v)))
                    .collect()
            })
            .collect();
        Self::new(entries)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &BoundaryFunction<S> {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<BoundaryFunction<S>>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        let entries = self
            .entries
            .iter()
            .zip(&o.entries)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a.add(b)).collect())
            .collect();
        BoundaryTensor { entries }
    }

    pub fn scale(&self, s: &S) -> Self {
        BoundaryTensor {
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|e| e.scale(s)).collect())
                .collect(),
        }
    }

    pub fn map_into<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> BoundaryTensor<T> {
        BoundaryTensor {
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|e| e.map_into(f)).collect())
                .collect(),
        }
    }

    /// A·T·B for constant rational matrices A, B.
    pub fn sandwich(&self, a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Self {
        let n = self.dim();
        let mut entries = vec![vec![BoundaryFunction::zero(n); n]; n];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, out) in row.iter_mut().enumerate() {
                for k in 0..n {
                    for l in 0..n {
                        let c = &a[i][k] * &b[l][j];
                        if !num::Zero::is_zero(&c) {
                            *out = out.add(&self.entries[k][l].scale(&S::from_rational(&c)));
                        }
                    }
                }
            }
        }
        BoundaryTensor { entries }
    }

    /// Tr(A·T) for a constant rational matrix A.
    pub fn trace_against(&self, a: &[Vec<Rational>]) -> BoundaryFunction<S> {
        let n = self.dim();
        let mut acc = BoundaryFunction::zero(n);
        for i in 0..n {
            for k in 0..n {
                if !num::Zero::is_zero(&a[i][k]) {
                    acc = acc.add(&self.entries[k][i].scale(&S::from_rational(&a[i][k])));
                }
            }
        }
        acc
    }
}

impl<S: ComplexScalar> BoundaryTensor<S> {
    pub fn is_real(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.is_real())
    }
}

/// Exact inverse of a rational matrix by Gauss-Jordan elimination.
pub fn invert_rational(m: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut inv: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| int((i == j) as i64)).collect()).collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !num::Zero::is_zero(&a[r][col]))
            .ok_or(Error::SingularMatrix)?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].recip();
        for j in 0..n {
            a[col][j] = &a[col][j] * &p;
            inv[col][j] = &inv[col][j] * &p;
        }
        for r in 0..n {
            if r != col && !num::Zero::is_zero(&a[r][col]) {
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = &f * &a[col][j];
                    a[r][j] = &a[r][j] - t;
                    let t = &f * &inv[col][j];
                    inv[r][j] = &inv[r][j] - t;
                }
            }
        }
    }
    Ok(inv)
}

/// Sylvester's criterion on leading principal minors.
pub fn is_positive_definite(m: &[Vec<Rational>]) -> bool {
    let n = m.len();
    (1..=n).all(|k| {
        let sub: Vec<Vec<Rational>> = m[..k].iter().map(|r| r[..k].to_vec()).collect();
        determinant(&sub) > int(0)
    })
}

/// Exact determinant by fraction-free elimination over the rationals.
pub fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = int(1);
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !num::Zero::is_zero(&a[r][col])) else {
            return int(0);
        };
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        det = &det * &a[col][col];
        for r in col + 1..n {
            let f = &a[r][col] / &a[col][col];
            for j in col..n {
                let t = &f * &a[col][j];
                a[r][j] = &a[r][j] - t;
            }
        }
    }
    det
}

/// Identity matrix over the rationals.
pub fn identity(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { rat(1, 1) } else { rat(0, 1) }).collect())
        .collect()
}
