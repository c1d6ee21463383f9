//! Differential operators Σ c_{a,β}(x,y) (x∂_x)^a ∂_y^β with series coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{ComplexScalar, Scalar};
use crate::error::{Error, Result};
use crate::series::{BaseTag, LogCap, PhgSeries};

/// (power of x∂_x, multi-index of y-derivatives)
pub type OpKey = (usize, Vec<usize>);

#[derive(Clone, PartialEq, Debug)]
pub struct DifferentialOperatorSeries<S> {
    dim: usize,
    trunc: usize,
    terms: BTreeMap<OpKey, PhgSeries<S>>,
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

impl<S: ComplexScalar> DifferentialOperatorSeries<S> {
    pub fn new(dim: usize, trunc: usize) -> Self {
        DifferentialOperatorSeries {
            dim,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    /// The operator of multiplication by `c`.
    pub fn multiplication(c: PhgSeries<S>) -> Result<Self> {
        let mut op = Self::new(c.dim(), c.trunc());
        op.insert(0, vec![0; c.dim()], c)?;
        Ok(op)
    }

    /// (x∂_x)^a ∂^β with unit coefficient.
    pub fn monomial(dim: usize, trunc: usize, a: usize, beta: Vec<usize>) -> Self {
        let mut op = Self::new(dim, trunc);
        op.insert(a, beta, PhgSeries::one(dim, trunc))
            .expect("unit coefficient is admissible");
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn terms(&self) -> &BTreeMap<OpKey, PhgSeries<S>> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, a: usize, beta: &[usize]) -> PhgSeries<S> {
        self.terms
            .get(&(a, beta.to_vec()))
            .cloned()
            .unwrap_or_else(|| PhgSeries::zero(self.dim, self.trunc))
    }

    /// Adds `c (x∂)^a ∂^β`.
    pub fn insert(&mut self, a: usize, beta: Vec<usize>, c: PhgSeries<S>) -> Result<()> {
        if beta.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: beta.len(),
            });
        }
        if c.tag() != BaseTag::Zero {
            return Err(Error::IncompatibleBase(format!(
                "operator coefficients must be Zero-based, got {}",
                c.tag()
            )));
        }
        let c = c.truncate(self.trunc);
        let key = (a, beta);
        let sum = match self.terms.remove(&key) {
            Some(old) => old.add(&c)?,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
        Ok(())
    }

    pub fn truncate(&self, trunc: usize) -> Self {
        let mut out = Self::new(self.dim, trunc.min(self.trunc));
        for (k, c) in &self.terms {
            let c = c.truncate(out.trunc);
            if !c.is_zero() {
                out.terms.insert(k.clone(), c);
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let mut out = Self::new(self.dim, self.trunc.min(o.trunc));
        for (k, c) in self.terms.iter().chain(&o.terms) {
            out.insert(k.0, k.1.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        DifferentialOperatorSeries {
            dim: self.dim,
            trunc: self.trunc,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect(),
        }
    }

    /// Left multiplication by a Zero-based series.
    pub fn mul_left(&self, c: &PhgSeries<S>, trunc: usize) -> Result<Self> {
        let mut out = Self::new(self.dim, trunc.min(self.trunc));
        for (k, v) in &self.terms {
            out.insert(k.0, k.1.clone(), c.mul(v, out.trunc)?)?;
        }
        Ok(out)
    }

    /// Multiplies every coefficient by x^k.
    pub fn shift(&self, k: usize) -> Self {
        DifferentialOperatorSeries {
            dim: self.dim,
            trunc: self.trunc + k,
            terms: self.terms.iter().map(|(key, c)| (key.clone(), c.shift(k))).collect(),
        }
    }

    pub fn map_into<T: ComplexScalar>(&self, f: impl Fn(&S) -> T + Copy) -> DifferentialOperatorSeries<T> {
        DifferentialOperatorSeries {
            dim: self.dim,
            trunc: self.trunc,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.map_into(f))).collect(),
        }
    }

    /// Applies the operator to a series of any base tag, exact through `trunc`.
    pub fn apply(&self, u: &PhgSeries<S>, trunc: usize) -> Result<PhgSeries<S>> {
        let trunc = trunc.min(self.trunc).min(u.trunc());
        let mut out = PhgSeries::new(u.dim(), u.tag(), trunc, u.cap());
        let mut eulers: Vec<PhgSeries<S>> = vec![u.truncate(trunc)];
        for ((a, beta), c) in &self.terms {
            while eulers.len() <= *a {
                let next = eulers.last().unwrap().euler()?;
                eulers.push(next);
            }
            let mut v = eulers[*a].clone();
            for (i, &b) in beta.iter().enumerate() {
                for _ in 0..b {
                    v = v.partial(i);
                }
            }
            out = out.add(&c.mul(&v, trunc)?)?;
        }
        Ok(out)
    }

    /// Composition `self ∘ o` by the Leibniz rule.
    pub fn compose(&self, o: &Self, trunc: usize) -> Result<Self> {
        let trunc = trunc.min(self.trunc).min(o.trunc);
        let mut out = Self::new(self.dim, trunc);
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &o.terms {
                // (x∂)^{a1} ∂^{b1} (c2 v) = Σ C(a1,i) C(b1,γ) ((x∂)^i ∂^γ c2) (x∂)^{a1-i} ∂^{b1-γ} v
                for gamma in sub_multi_indices(b1) {
                    let mut dc = c2.truncate(trunc);
                    let mut weight = 1i64;
                    for (k, (&g, &b)) in gamma.iter().zip(b1).enumerate() {
                        weight *= binomial(b, g);
                        for _ in 0..g {
                            dc = dc.partial(k);
                        }
                    }
                    for i in 0..=*a1 {
                        let w = S::from_int(weight * binomial(*a1, i));
                        let coef = c1.mul(&dc, trunc)?.scale(&w);
                        let beta: Vec<usize> = b1
                            .iter()
                            .zip(&gamma)
                            .zip(b2)
                            .map(|((&b, &g), &bb)| b - g + bb)
                            .collect();
                        out.insert(a1 - i + a2, beta, coef)?;
                        dc = dc.euler()?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Conjugation by an invertible multiplier w: the operator w P w⁻¹, given
    /// through the substitutions x∂ ↦ x∂ + s and ∂_j ↦ ∂_j + ψ_j with
    /// s = −x∂(ln w) and ψ_j = −∂_j(ln w).
    pub fn conjugate(&self, s: &PhgSeries<S>, psi: &[PhgSeries<S>], trunc: usize) -> Result<Self> {
        let n = self.dim;
        let trunc = trunc.min(self.trunc);
        let mut x_op = Self::monomial(n, trunc, 1, vec![0; n]);
        x_op.insert(0, vec![0; n], s.clone())?;
        let y_ops: Vec<Self> = (0..n)
            .map(|j| {
                let mut e = vec![0; n];
                e[j] = 1;
                let mut op = Self::monomial(n, trunc, 0, e);
                op.insert(0, vec![0; n], psi[j].clone())?;
                Ok(op)
            })
            .collect::<Result<_>>()?;
        let mut out = Self::new(n, trunc);
        for ((a, beta), c) in &self.terms {
            let mut p = Self::multiplication(c.truncate(trunc))?;
            for _ in 0..*a {
                p = p.compose(&x_op, trunc)?;
            }
            for (j, &b) in beta.iter().enumerate() {
                for _ in 0..b {
                    p = p.compose(&y_ops[j], trunc)?;
                }
            }
            out = out.add(&p)?;
        }
        Ok(out)
    }

    /// Largest log cap among the coefficients.
    pub fn cap(&self) -> LogCap {
        self.terms.values().fold(LogCap::default(), |c, v| c.join(v.cap()))
    }
}

/// All γ with 0 ≤ γ ≤ β componentwise.
fn sub_multi_indices(beta: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &b in beta {
        out = out
            .into_iter()
            .flat_map(|p| (0..=b).map(move |g| [p.clone(), vec![g]].concat()))
            .collect();
    }
    out
}

impl<S: Scalar> fmt::Display for DifferentialOperatorSeries<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((a, beta), c) in &self.terms {
            let b: Vec<String> = beta.iter().map(|v| v.to_string()).collect();
            writeln!(f, "(x∂x)^{a} ∂^({}):", b.join(","))?;
            for ((j, l), v) in c.terms() {
                writeln!(f, "  x^{j} (ln x)^{l}: {v}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{gr, BoundaryFunction, GaussianRational};

    type Op = DifferentialOperatorSeries<GaussianRational>;
    type Ser = PhgSeries<GaussianRational>;

    fn x_pow(j: usize, l: usize, trunc: usize) -> Ser {
        Ser::monomial(BoundaryFunction::one(1), BaseTag::Zero, j, l, trunc, LogCap::new(1, 2)).unwrap()
    }

    #[test]
    fn compose_agrees_with_sequential_application() {
        let mut p = Op::monomial(1, 6, 1, vec![1]);
        p.insert(2, vec![0], x_pow(1, 1, 6)).unwrap();
        let mut q = Op::monomial(1, 6, 1, vec![0]);
        let mut c = x_pow(2, 0, 6);
        c.insert(0, 0, BoundaryFunction::exponential(1, vec![1], gr(1, 2)))
            .unwrap();
        q.insert(0, vec![2], c).unwrap();
        let pq = p.compose(&q, 6).unwrap();
        let mut u = x_pow(1, 2, 6);
        u.insert(0, 0, BoundaryFunction::exponential(1, vec![-2], gr(3, 1)))
            .unwrap();
        let lhs = pq.apply(&u, 6).unwrap();
        let rhs = p.apply(&q.apply(&u, 6).unwrap(), 6).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn conjugation_by_power_of_x() {
        // x^{-2} (x∂) x^2 = x∂ + 2
        let p = Op::monomial(1, 4, 1, vec![0]);
        let s = Ser::constant(BoundaryFunction::constant(1, gr(2, 1)), 4);
        let conj = p.conjugate(&s, &[Ser::zero(1, 4)], 4).unwrap();
        assert_eq!(conj.coefficient(0, &[0]), s);
        assert_eq!(conj.coefficient(1, &[0]), Ser::one(1, 4));
    }
}
