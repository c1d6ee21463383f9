//! Square matrices of Zero-based series.

use super::{BaseTag, LogCap, PhgSeries};
use crate::algebra::{rat, BoundaryFunction, ComplexScalar, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Debug)]
pub struct PhgMatrix<S> {
    entries: Vec<Vec<PhgSeries<S>>>,
}

/// Gauss-Jordan inverse over an exact field.
pub fn invert_scalar_matrix<S: Scalar>(m: &[Vec<S>]) -> Result<Vec<Vec<S>>> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut inv: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::SingularMatrix)?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].inverse().ok_or(Error::SingularMatrix)?;
        for j in 0..n {
            a[col][j] = a[col][j].mul(&p);
            inv[col][j] = inv[col][j].mul(&p);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                a[r][j] = a[r][j].sub(&f.mul(&a[col][j]));
                inv[r][j] = inv[r][j].sub(&f.mul(&inv[col][j]));
            }
        }
    }
    Ok(inv)
}

impl<S: Scalar> PhgMatrix<S> {
    pub fn new(entries: Vec<Vec<PhgSeries<S>>>) -> Result<Self> {
        let n = entries.len();
        for row in &entries {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            for e in row {
                if e.tag() != BaseTag::Zero {
                    return Err(Error::IncompatibleBase(format!(
                        "matrix entries must be Zero-based, got {}",
                        e.tag()
                    )));
                }
            }
        }
        Ok(PhgMatrix { entries })
    }

    pub fn identity(size: usize, dim: usize, trunc: usize) -> Self {
        let entries = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| {
                        if i == j {
                            PhgSeries::one(dim, trunc)
                        } else {
                            PhgSeries::zero(dim, trunc)
                        }
                    })
                    .collect()
            })
            .collect();
        PhgMatrix { entries }
    }

    /// Constant matrix of scalars.
    pub fn from_scalars(m: &[Vec<S>], dim: usize, trunc: usize) -> Self {
        let entries = m
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| PhgSeries::constant(BoundaryFunction::constant(dim, v.clone()), trunc))
                    .collect()
            })
            .collect();
        PhgMatrix { entries }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &PhgSeries<S> {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<PhgSeries<S>>] {
        &self.entries
    }

    pub fn trunc(&self) -> usize {
        self.entries.iter().flatten().map(|e| e.trunc()).min().unwrap_or(0)
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.size();
        (0..n).all(|i| (0..i).all(|j| self.entries[i][j] == self.entries[j][i]))
    }

    pub fn map(&self, f: impl Fn(&PhgSeries<S>) -> Result<PhgSeries<S>>) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|r| r.iter().map(&f).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(PhgMatrix { entries })
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.sub(b))
    }

    fn zip(&self, o: &Self, f: impl Fn(&PhgSeries<S>, &PhgSeries<S>) -> Result<PhgSeries<S>>) -> Result<Self> {
        if self.size() != o.size() {
            return Err(Error::DimensionMismatch {
                expected: self.size(),
                found: o.size(),
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&o.entries)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| f(a, b)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(PhgMatrix { entries })
    }

    pub fn mul(&self, o: &Self, trunc: usize) -> Result<Self> {
        let n = self.size();
        if o.size() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: o.size(),
            });
        }
        let mut entries = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let mut acc: Option<PhgSeries<S>> = None;
                for k in 0..n {
                    let p = self.entries[i][k].mul(&o.entries[k][j], trunc)?;
                    acc = Some(match acc {
                        None => p,
                        Some(a) => a.add(&p)?,
                    });
                }
                row.push(acc.expect("nonempty matrix"));
            }
            entries.push(row);
        }
        Ok(PhgMatrix { entries })
    }

    pub fn trace(&self) -> Result<PhgSeries<S>> {
        let mut it = (0..self.size()).map(|i| &self.entries[i][i]);
        let first = it
            .next()
            .ok_or(Error::DimensionMismatch { expected: 1, found: 0 })?
            .clone();
        it.try_fold(first, |acc, e| acc.add(e))
    }

    /// The order-zero part, which must be a constant scalar matrix.
    pub fn constant_term(&self) -> Result<Vec<Vec<S>>> {
        self.entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| {
                        e.constant_scalar().ok_or_else(|| {
                            Error::NotInvertible("constant term of a matrix entry is not a y-independent scalar".into())
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// H0⁻¹(H − H0), the small part relative to the constant term, together
    /// with H0⁻¹ as a constant matrix.
    fn relative_remainder(&self, trunc: usize) -> Result<(Self, Self)> {
        let h0 = self.constant_term()?;
        let h0_inv = invert_scalar_matrix(&h0)?;
        let trunc = trunc.min(self.trunc());
        let dim = self.entries[0][0].dim();
        let h0m = PhgMatrix::from_scalars(&h0, dim, trunc);
        let inv0 = PhgMatrix::from_scalars(&h0_inv, dim, trunc);
        let r = self.sub(&h0m)?;
        let m = inv0.mul(&r, trunc)?;
        Ok((m, inv0))
    }

    /// H⁻¹ = Σ_k (−M)^k H0⁻¹ with M = H0⁻¹(H − H0).
    pub fn invert(&self, trunc: usize) -> Result<Self> {
        let trunc = trunc.min(self.trunc());
        let (m, inv0) = self.relative_remainder(trunc)?;
        let neg_m = m.map(|e| Ok(e.neg()))?;
        let mut term = inv0.clone();
        let mut acc = inv0;
        loop {
            term = neg_m.mul(&term, trunc)?;
            if term.entries.iter().flatten().all(|e| e.is_zero()) {
                break;
            }
            acc = acc.add(&term)?;
        }
        acc.map(|e| Ok(e.truncate(trunc)))
    }

    /// ln(det H / det H0) = Σ_{k≥1} (−1)^{k+1} Tr(M^k)/k.
    pub fn log_det(&self, trunc: usize) -> Result<PhgSeries<S>> {
        let trunc = trunc.min(self.trunc());
        let (m, _) = self.relative_remainder(trunc)?;
        let dim = m.entries[0][0].dim();
        let cap = self
            .entries
            .iter()
            .flatten()
            .fold(LogCap::default(), |c, e| c.join(e.cap()));
        let mut acc = PhgSeries::new(dim, BaseTag::Zero, trunc, cap);
        let mut power = m.clone();
        let mut k = 1i64;
        loop {
            let tr = power.trace()?;
            if power.entries.iter().flatten().all(|e| e.is_zero()) {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&tr.scale(&S::from_rational(&rat(sign, k))))?;
            power = power.mul(&m, trunc)?;
            k += 1;
        }
        Ok(acc.truncate(trunc))
    }

    /// Exact determinant by cofactor expansion (brute-force reference).
    pub fn det(&self, trunc: usize) -> Result<PhgSeries<S>> {
        let n = self.size();
        if n == 1 {
            return Ok(self.entries[0][0].truncate(trunc));
        }
        let mut acc: Option<PhgSeries<S>> = None;
        for c in 0..n {
            let minor: Vec<Vec<PhgSeries<S>>> = self.entries[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(k, _)| k != c)
                        .map(|(_, e)| e.clone())
                        .collect()
                })
                .collect();
            let t = self.entries[0][c].mul(&PhgMatrix { entries: minor }.det(trunc)?, trunc)?;
            let t = if c % 2 == 1 { t.neg() } else { t };
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&t)?,
            });
        }
        Ok(acc.expect("nonempty matrix"))
    }
}

impl<S: ComplexScalar> PhgMatrix<S> {
    pub fn partial(&self, i: usize) -> Self {
        PhgMatrix {
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|e| e.partial(i)).collect())
                .collect(),
        }
    }
}
