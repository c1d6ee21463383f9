//! Truncated polyhomogeneous series Σ a_{j,l}(y) x^{α+j} (ln x)^l.
//!
//! The base exponent α is carried as an opaque tag and never expanded. A
//! series with truncation `J` is exact for every `j ≤ J`; nothing is known
//! about higher orders, so every operation tracks how far its output stays
//! exact.

mod matrix;

pub use matrix::{invert_scalar_matrix, PhgMatrix};

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{rat, BoundaryFunction, ComplexScalar, Scalar};
use crate::error::{Error, Result};

/// Symbolic part of the base exponent α.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum BaseTag {
    /// α = 0: ordinary coefficient series.
    Zero,
    /// α = ζ
    Zeta,
    /// α = n − ζ
    NMinusZeta,
}

impl fmt::Display for BaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseTag::Zero => write!(f, "1"),
            BaseTag::Zeta => write!(f, "x^ζ"),
            BaseTag::NMinusZeta => write!(f, "x^(n-ζ)"),
        }
    }
}

/// Bound on the log power allowed at order j: `slope * j + offset`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct LogCap {
    pub slope: usize,
    pub offset: usize,
}

impl Default for LogCap {
    fn default() -> Self {
        LogCap { slope: 1, offset: 0 }
    }
}

impl LogCap {
    pub fn new(slope: usize, offset: usize) -> Self {
        LogCap { slope, offset }
    }

    pub fn at(&self, j: usize) -> usize {
        self.slope * j + self.offset
    }

    /// Smallest cap dominating both.
    pub fn join(self, o: LogCap) -> LogCap {
        LogCap {
            slope: self.slope.max(o.slope),
            offset: self.offset.max(o.offset),
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct PhgSeries<S> {
    dim: usize,
    tag: BaseTag,
    trunc: usize,
    cap: LogCap,
    terms: BTreeMap<(usize, usize), BoundaryFunction<S>>,
}

impl<S: Scalar> PhgSeries<S> {
    pub fn new(dim: usize, tag: BaseTag, trunc: usize, cap: LogCap) -> Self {
        PhgSeries {
            dim,
            tag,
            trunc,
            cap,
            terms: BTreeMap::new(),
        }
    }

    /// Zero-based zero series with the default cap.
    pub fn zero(dim: usize, trunc: usize) -> Self {
        Self::new(dim, BaseTag::Zero, trunc, LogCap::default())
    }

    pub fn one(dim: usize, trunc: usize) -> Self {
        Self::constant(BoundaryFunction::one(dim), trunc)
    }

    /// The Zero-based series f(y).
    pub fn constant(f: BoundaryFunction<S>, trunc: usize) -> Self {
        let mut s = Self::zero(f.dim(), trunc);
        s.insert(0, 0, f).expect("order zero fits every cap");
        s
    }

    /// f(y) x^{α+j} (ln x)^l
    pub fn monomial(
        f: BoundaryFunction<S>,
        tag: BaseTag,
        j: usize,
        l: usize,
        trunc: usize,
        cap: LogCap,
    ) -> Result<Self> {
        let mut s = Self::new(f.dim(), tag, trunc, cap);
        s.insert(j, l, f)?;
        Ok(s)
    }

    pub fn with_cap(mut self, cap: LogCap) -> Result<Self> {
        self.cap = cap;
        self.check_cap()?;
        Ok(self)
    }

    /// Reinterprets the base tag (the coefficients are unchanged).
    pub fn with_tag(mut self, tag: BaseTag) -> Self {
        self.tag = tag;
        self
    }

    fn check_cap(&self) -> Result<()> {
        for &(j, l) in self.terms.keys() {
            if l > self.cap.at(j) {
                return Err(Error::LogCapExceeded {
                    j,
                    l,
                    cap: self.cap.at(j),
                });
            }
        }
        Ok(())
    }

    /// Adds f x^{α+j}(ln x)^l in place. Terms past the truncation are dropped.
    pub fn insert(&mut self, j: usize, l: usize, f: BoundaryFunction<S>) -> Result<()> {
        if j > self.trunc || f.is_zero() {
            return Ok(());
        }
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: f.dim(),
            });
        }
        if l > self.cap.at(j) {
            return Err(Error::LogCapExceeded {
                j,
                l,
                cap: self.cap.at(j),
            });
        }
        match self.terms.get_mut(&(j, l)) {
            Some(v) => {
                let s = v.add(&f);
                if s.is_zero() {
                    self.terms.remove(&(j, l));
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert((j, l), f);
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tag(&self) -> BaseTag {
        self.tag
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn cap(&self) -> LogCap {
        self.cap
    }

    pub fn terms(&self) -> &BTreeMap<(usize, usize), BoundaryFunction<S>> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest order j carrying a term.
    pub fn valuation(&self) -> Option<usize> {
        self.terms.keys().next().map(|k| k.0)
    }

    /// Highest log power present.
    pub fn log_degree(&self) -> usize {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    /// Exact coefficient of x^{α+j}(ln x)^l.
    pub fn coefficient(&self, j: usize, l: usize) -> Result<BoundaryFunction<S>> {
        if j > self.trunc {
            return Err(Error::BeyondTruncation { j, trunc: self.trunc });
        }
        Ok(self
            .terms
            .get(&(j, l))
            .cloned()
            .unwrap_or_else(|| BoundaryFunction::zero(self.dim)))
    }

    /// All log levels at order j, as (l, coefficient).
    pub fn order(&self, j: usize) -> impl Iterator<Item = (usize, &BoundaryFunction<S>)> {
        self.terms.range((j, 0)..=(j, usize::MAX)).map(|(k, v)| (k.1, v))
    }

    /// The y-independent scalar constant term, if the series starts with one.
    pub fn constant_scalar(&self) -> Option<S> {
        if self.terms.keys().any(|&(j, l)| j == 0 && l > 0) {
            return None;
        }
        match self.terms.get(&(0, 0)) {
            Some(f) => f.as_constant(),
            None => Some(S::zero()),
        }
    }

    pub fn truncate(&self, trunc: usize) -> Self {
        let trunc = trunc.min(self.trunc);
        let terms = self
            .terms
            .range(..(trunc + 1, 0))
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        PhgSeries {
            trunc,
            terms,
            ..self.clone_empty()
        }
    }

    fn clone_empty(&self) -> Self {
        PhgSeries {
            dim: self.dim,
            tag: self.tag,
            trunc: self.trunc,
            cap: self.cap,
            terms: BTreeMap::new(),
        }
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.dim != o.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: o.dim,
            });
        }
        if self.tag != o.tag {
            return Err(Error::IncompatibleBase(format!(
                "cannot add {} and {} series",
                self.tag, o.tag
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        let trunc = self.trunc.min(o.trunc);
        let mut out = PhgSeries {
            trunc,
            cap: self.cap.join(o.cap),
            ..self.clone_empty()
        };
        for (&(j, l), f) in self.terms.iter().chain(&o.terms) {
            out.insert(j, l, f.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_terms(|f| f.neg())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map_terms(|f| f.scale(s))
    }

    /// Multiplication by a function of y alone.
    pub fn mul_boundary(&self, g: &BoundaryFunction<S>) -> Self {
        self.map_terms(|f| f.mul(g))
    }

    fn map_terms(&self, op: impl Fn(&BoundaryFunction<S>) -> BoundaryFunction<S>) -> Self {
        let terms = self
            .terms
            .iter()
            .filter_map(|(k, f)| {
                let v = op(f);
                (!v.is_zero()).then(|| (*k, v))
            })
            .collect();
        PhgSeries {
            terms,
            ..self.clone_empty()
        }
    }

    /// Coefficientwise change of scalar ring.
    pub fn map_into<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> PhgSeries<T> {
        let terms = self
            .terms
            .iter()
            .filter_map(|(k, v)| {
                let w = v.map_into(f);
                (!w.is_zero()).then(|| (*k, w))
            })
            .collect();
        PhgSeries {
            dim: self.dim,
            tag: self.tag,
            trunc: self.trunc,
            cap: self.cap,
            terms,
        }
    }

    /// Product, exact through order `trunc` or as far as the factors allow.
    /// One factor must be Zero-based; the result carries the other tag.
    pub fn mul(&self, o: &Self, trunc: usize) -> Result<Self> {
        if self.dim != o.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: o.dim,
            });
        }
        let tag = match (self.tag, o.tag) {
            (BaseTag::Zero, t) | (t, BaseTag::Zero) => t,
            (a, b) => return Err(Error::IncompatibleBase(format!("cannot multiply {a} and {b} series"))),
        };
        // a zero factor is known to vanish only up to its own truncation
        let va = self.valuation().unwrap_or(self.trunc + 1);
        let vb = o.valuation().unwrap_or(o.trunc + 1);
        let trunc = trunc.min(self.trunc + vb).min(o.trunc + va);
        let mut out = PhgSeries::new(self.dim, tag, trunc, self.cap.join(o.cap));
        for (&(ja, la), fa) in &self.terms {
            if ja > trunc {
                break;
            }
            for (&(jb, lb), fb) in &o.terms {
                if ja + jb > trunc {
                    break;
                }
                out.insert(ja + jb, la + lb, fa.mul(fb))?;
            }
        }
        Ok(out)
    }

    /// Multiplication by x^k.
    pub fn shift(&self, k: usize) -> Self {
        let terms = self.terms.iter().map(|(&(j, l), f)| ((j + k, l), f.clone())).collect();
        PhgSeries {
            trunc: self.trunc + k,
            terms,
            ..self.clone_empty()
        }
    }

    /// Division by x^k; every term must have order at least k. The cap
    /// offset grows so the shifted terms remain admissible.
    pub fn unshift(&self, k: usize) -> Result<Self> {
        if let Some(v) = self.valuation() {
            if v < k {
                return Err(Error::Unsupported(format!(
                    "series has a term at order {v}, cannot divide by x^{k}"
                )));
            }
        }
        if self.trunc < k {
            return Err(Error::BeyondTruncation {
                j: k,
                trunc: self.trunc,
            });
        }
        let terms = self.terms.iter().map(|(&(j, l), f)| ((j - k, l), f.clone())).collect();
        let cap = LogCap::new(self.cap.slope, self.cap.offset + self.cap.slope * k);
        Ok(PhgSeries {
            trunc: self.trunc - k,
            cap,
            terms,
            ..self.clone_empty()
        })
    }

    /// x∂_x, acting on x^{α+j}(ln x)^l as (α+j)x^{α+j}(ln x)^l + l x^{α+j}(ln x)^{l-1}.
    pub fn euler(&self) -> Result<Self> {
        let alpha = S::base_value(self.tag, self.dim)
            .ok_or_else(|| Error::Unsupported(format!("x∂x of a {} series needs ζ-valued scalars", self.tag)))?;
        let mut out = self.clone_empty();
        for (&(j, l), f) in &self.terms {
            let e = alpha.add(&S::from_int(j as i64));
            out.insert(j, l, f.scale(&e))?;
            if l > 0 {
                out.insert(j, l - 1, f.scale(&S::from_int(l as i64)))?;
            }
        }
        Ok(out)
    }

    /// Applies the y-operator `op` to every coefficient.
    pub fn map_boundary(&self, op: impl Fn(&BoundaryFunction<S>) -> BoundaryFunction<S>) -> Self {
        self.map_terms(op)
    }

    fn require_zero_base(&self, what: &str) -> Result<()> {
        if self.tag != BaseTag::Zero {
            return Err(Error::IncompatibleBase(format!(
                "{what} needs a Zero-based series, got {}",
                self.tag
            )));
        }
        Ok(())
    }

    /// Splits off the constant scalar c and returns (c, self − c).
    fn split_constant(&self, what: &str) -> Result<(S, Self)> {
        self.require_zero_base(what)?;
        let c = self
            .constant_scalar()
            .ok_or_else(|| Error::NotInvertible("constant term depends on y or carries logarithms".into()))?;
        let mut rest = self.clone();
        rest.terms.remove(&(0, 0));
        Ok((c, rest))
    }

    /// Multiplicative inverse by the geometric series c⁻¹ Σ (−c⁻¹R)^k.
    pub fn invert(&self, trunc: usize) -> Result<Self> {
        let (c, rest) = self.split_constant("inversion")?;
        let ci = c
            .inverse()
            .ok_or_else(|| Error::NotInvertible("constant term is zero".into()))?;
        let trunc = trunc.min(self.trunc);
        let step = rest.scale(&ci.neg()).truncate(trunc);
        let mut term = PhgSeries::one(self.dim, trunc).with_cap(self.cap)?;
        let mut acc = term.clone();
        while !term.is_zero() {
            term = term.mul(&step, trunc)?;
            acc = acc.add(&term)?;
        }
        Ok(acc.scale(&ci).truncate(trunc))
    }

    /// exp(A) for a series without constant term.
    pub fn exp(&self, trunc: usize) -> Result<Self> {
        self.require_zero_base("exp")?;
        if self.valuation() == Some(0) {
            return Err(Error::Unsupported("exp of a series with an order-zero term".into()));
        }
        let trunc = trunc.min(self.trunc);
        let a = self.truncate(trunc);
        let mut term = PhgSeries::one(self.dim, trunc).with_cap(self.cap)?;
        let mut acc = term.clone();
        let mut k = 1i64;
        while !term.is_zero() {
            term = term.mul(&a, trunc)?.scale(&S::from_rational(&rat(1, k)));
            acc = acc.add(&term)?;
            k += 1;
        }
        Ok(acc)
    }

    /// ln(A) for a series whose constant term is exactly 1.
    pub fn ln(&self, trunc: usize) -> Result<Self> {
        let (c, rest) = self.split_constant("ln")?;
        if !c.is_one() {
            return Err(Error::Unsupported("ln needs constant term 1".into()));
        }
        let trunc = trunc.min(self.trunc);
        Ok(log_one_plus(&rest.truncate(trunc), trunc)?)
    }
}

/// ln(1 + R) = Σ (−1)^{k+1} R^k / k for R of positive valuation.
fn log_one_plus<S: Scalar>(r: &PhgSeries<S>, trunc: usize) -> Result<PhgSeries<S>> {
    let mut acc = PhgSeries::new(r.dim, BaseTag::Zero, trunc, r.cap);
    let mut power = r.clone();
    let mut k = 1i64;
    while !power.is_zero() {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        acc = acc.add(&power.scale(&S::from_rational(&rat(sign, k))))?;
        power = power.mul(r, trunc)?;
        k += 1;
    }
    Ok(acc)
}

impl<S: ComplexScalar> PhgSeries<S> {
    /// ∂/∂y_i applied to every coefficient.
    pub fn partial(&self, i: usize) -> Self {
        self.map_terms(|f| f.partial(i))
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|f| f.is_real())
    }
}

impl<S: Scalar> fmt::Display for PhgSeries<S> {
    /// One line per (j, l), sorted, e.g. `x^(n-ζ) · x^2 (ln x)^1: [1/2]e(1,0)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "base {} truncation {}", self.tag, self.trunc)?;
        for ((j, l), c) in &self.terms {
            writeln!(f, "  x^{j} (ln x)^{l}: {c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{gr, GaussianRational, ZetaRational};

    type Ser = PhgSeries<GaussianRational>;

    fn c(v: i64, d: i64) -> BoundaryFunction<GaussianRational> {
        BoundaryFunction::constant(1, gr(v, d))
    }

    fn series(trunc: usize, terms: &[(usize, usize, i64)]) -> Ser {
        let mut s = Ser::zero(1, trunc);
        for &(j, l, v) in terms {
            s.insert(j, l, c(v, 1)).unwrap();
        }
        s
    }

    #[test]
    fn one_plus_xlog_times_one_minus_xlog() {
        let a = series(2, &[(0, 0, 1), (1, 1, 1)]);
        let b = series(2, &[(0, 0, 1), (1, 1, -1)]);
        assert_eq!(a.mul(&b, 2).unwrap(), series(2, &[(0, 0, 1), (2, 2, -1)]));
    }

    #[test]
    fn inverse_of_one_plus_x_squared() {
        let a = series(6, &[(0, 0, 1), (2, 0, 1)]);
        let inv = a.invert(6).unwrap();
        assert_eq!(inv, series(6, &[(0, 0, 1), (2, 0, -1), (4, 0, 1), (6, 0, -1)]));
        assert_eq!(series(6, &[(0, 0, 1)]).invert(6).unwrap(), series(6, &[(0, 0, 1)]));
    }

    #[test]
    fn inverse_of_one_plus_xlogx_alternates() {
        let a = series(5, &[(0, 0, 1), (1, 1, 1)]);
        let inv = a.invert(5).unwrap();
        let expected: Vec<(usize, usize, i64)> = (0..=5).map(|j| (j, j, if j % 2 == 0 { 1 } else { -1 })).collect();
        assert_eq!(inv, series(5, &expected));
        assert_eq!(a.mul(&inv, 5).unwrap(), Ser::one(1, 5));
    }

    #[test]
    fn inversion_rejects_y_dependent_constant() {
        let mut a = Ser::zero(1, 3);
        a.insert(0, 0, BoundaryFunction::exponential(1, vec![1], gr(1, 1)))
            .unwrap();
        assert!(matches!(a.invert(3), Err(Error::NotInvertible(_))));
        assert!(matches!(Ser::zero(1, 3).invert(3), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn tagged_times_zero_based_shifts_grading() {
        let f = BoundaryFunction::exponential(1, vec![1], gr(1, 1));
        let big = Ser::monomial(f.clone(), BaseTag::NMinusZeta, 0, 0, 6, LogCap::default()).unwrap();
        let x2 = Ser::monomial(c(1, 1), BaseTag::Zero, 2, 0, 6, LogCap::default()).unwrap();
        let p = big.mul(&x2, 6).unwrap();
        assert_eq!(p.tag(), BaseTag::NMinusZeta);
        assert_eq!(p.coefficient(2, 0).unwrap(), f);
        assert!(matches!(
            big.mul(&big.clone().with_tag(BaseTag::Zeta), 6),
            Err(Error::IncompatibleBase(_))
        ));
        assert!(big.add(&x2).is_err());
    }

    #[test]
    fn coefficient_extract() {
        let a = series(3, &[(0, 0, 1), (2, 1, 3)]);
        assert_eq!(a.coefficient(2, 1).unwrap(), c(3, 1));
        assert!(a.coefficient(2, 0).unwrap().is_zero());
        assert_eq!(a.coefficient(4, 0), Err(Error::BeyondTruncation { j: 4, trunc: 3 }));
    }

    #[test]
    fn cap_violation_is_an_error() {
        let mut a = Ser::zero(1, 3);
        assert_eq!(
            a.insert(1, 2, c(1, 1)),
            Err(Error::LogCapExceeded { j: 1, l: 2, cap: 1 })
        );
    }

    #[test]
    fn euler_on_tagged_series() {
        type Z = PhgSeries<ZetaRational>;
        let one = BoundaryFunction::constant(2, ZetaRational::one());
        let u = Z::monomial(one.clone(), BaseTag::NMinusZeta, 1, 1, 4, LogCap::default()).unwrap();
        let e = u.euler().unwrap();
        // (n - ζ + 1) x^{n-ζ+1} ln x + x^{n-ζ+1}
        let expect0 = ZetaRational::linear(crate::algebra::int(3), crate::algebra::int(-1));
        assert_eq!(e.coefficient(1, 1).unwrap(), one.scale(&expect0));
        assert_eq!(e.coefficient(1, 0).unwrap(), one);
        assert!(Ser::monomial(c(1, 1), BaseTag::Zeta, 0, 0, 2, LogCap::default())
            .unwrap()
            .euler()
            .is_err());
    }

    #[test]
    fn exp_and_ln_are_inverse() {
        let a = series(6, &[(1, 1, 2), (2, 0, -3), (3, 2, 1)]);
        let e = a.exp(6).unwrap();
        assert_eq!(e.ln(6).unwrap(), a);
    }
}
