use crate::algebra::{
    invert_rational, is_positive_definite, BoundaryFunction, BoundaryTensor, GaussianRational, Rational, Scalar,
};
use crate::error::{Error, Result};
use crate::series::{LogCap, PhgMatrix, PhgSeries};

/// One term x^j (ln x)^l h_{j,l}(y) of the boundary metric family.
#[derive(Clone, PartialEq, Debug)]
pub struct Correction {
    pub j: usize,
    pub l: usize,
    pub tensor: BoundaryTensor<GaussianRational>,
}

/// h(x) = h0 + Σ x^j (ln x)^l h_{j,l}(y), the tangential part of the metric
/// (dx² + h(x))/x².
#[derive(Clone, PartialEq, Debug)]
pub struct MetricExpansion {
    n: usize,
    h0: Vec<Vec<Rational>>,
    h0_inv: Vec<Vec<Rational>>,
    corrections: Vec<Correction>,
    trunc: usize,
}

impl MetricExpansion {
    /// Validates h0 and the corrections; corrections at the same (j, l) are
    /// summed and the list is kept sorted.
    pub fn new(h0: Vec<Vec<Rational>>, corrections: Vec<Correction>, trunc: usize) -> Result<Self> {
        let n = h0.len();
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        for (i, row) in h0.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            for j in 0..i {
                if h0[i][j] != h0[j][i] {
                    return Err(Error::NotSymmetric { i: j, j: i });
                }
            }
        }
        if !is_positive_definite(&h0) {
            return Err(Error::NotPositiveDefinite);
        }
        let h0_inv = invert_rational(&h0)?;
        let mut merged: Vec<Correction> = Vec::new();
        for c in corrections {
            if c.j == 0 {
                return Err(Error::Unsupported(
                    "corrections start at order x^1; fold order 0 into h0".into(),
                ));
            }
            if c.tensor.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.tensor.dim(),
                });
            }
            if !c.tensor.is_real() {
                return Err(Error::NotReal);
            }
            match merged.iter_mut().find(|m| m.j == c.j && m.l == c.l) {
                Some(m) => m.tensor = m.tensor.add(&c.tensor),
                None => merged.push(c),
            }
        }
        merged.retain(|c| !c.tensor.is_zero());
        merged.sort_by_key(|c| (c.j, c.l));
        Ok(MetricExpansion {
            n,
            h0,
            h0_inv,
            corrections: merged,
            trunc,
        })
    }

    /// h = I in dimension n.
    pub fn flat(n: usize, trunc: usize) -> Self {
        Self::new(crate::algebra::identity(n), Vec::new(), trunc).expect("identity is a valid metric")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h0(&self) -> &[Vec<Rational>] {
        &self.h0
    }

    pub fn h0_inv(&self) -> &[Vec<Rational>] {
        &self.h0_inv
    }

    pub fn corrections(&self) -> &[Correction] {
        &self.corrections
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn with_trunc(&self, trunc: usize) -> Self {
        MetricExpansion { trunc, ..self.clone() }
    }

    /// Adds x^j (ln x)^l · tensor.
    pub fn with_correction(&self, j: usize, l: usize, tensor: BoundaryTensor<GaussianRational>) -> Result<Self> {
        let mut cs = self.corrections.clone();
        cs.push(Correction { j, l, tensor });
        Self::new(self.h0.clone(), cs, self.trunc)
    }

    pub fn is_flat(&self) -> bool {
        self.corrections.is_empty()
    }

    /// True when no correction depends on y.
    pub fn is_radial(&self) -> bool {
        self.corrections
            .iter()
            .all(|c| c.tensor.entries().iter().flatten().all(|e| e.is_constant()))
    }

    /// Log cap admitting every correction: l ≤ ⌈l/j⌉ j.
    pub fn cap(&self) -> LogCap {
        let slope = self
            .corrections
            .iter()
            .map(|c| c.l.div_ceil(c.j))
            .max()
            .unwrap_or(1)
            .max(1);
        LogCap::new(slope, 0)
    }

    /// h(x) as a matrix of series, exact through `trunc`.
    pub fn h_matrix(&self, trunc: usize) -> PhgMatrix<GaussianRational> {
        let n = self.n;
        let cap = self.cap();
        let entries = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let mut s = PhgSeries::new(n, crate::series::BaseTag::Zero, trunc, cap);
                        let c0 = GaussianRational::from_rational(&self.h0[a][b]);
                        s.insert(0, 0, BoundaryFunction::constant(n, c0)).expect("order 0 fits");
                        for c in &self.corrections {
                            s.insert(c.j, c.l, c.tensor.get(a, b).clone())
                                .expect("cap admits corrections");
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        PhgMatrix::new(entries).expect("entries are Zero-based")
    }

    /// h(x)⁻¹ through `trunc`.
    pub fn h_inverse(&self, trunc: usize) -> Result<PhgMatrix<GaussianRational>> {
        self.h_matrix(trunc).invert(trunc)
    }

    /// ln(det h(x) / det h0) through `trunc`.
    pub fn log_det(&self, trunc: usize) -> Result<PhgSeries<GaussianRational>> {
        self.h_matrix(trunc).log_det(trunc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{gr, int, rat};

    fn const_tensor(m: &[&[i64]]) -> BoundaryTensor<GaussianRational> {
        let rows: Vec<Vec<Rational>> = m.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
        BoundaryTensor::from_constant(&rows).unwrap()
    }

    #[test]
    fn rejects_indefinite_h0() {
        let h0 = vec![vec![int(1), int(2)], vec![int(2), int(1)]];
        assert_eq!(MetricExpansion::new(h0, vec![], 4), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn rejects_complex_tensor() {
        let e = BoundaryFunction::exponential(1, vec![1], gr(1, 1));
        let t = BoundaryTensor::new(vec![vec![e]]).unwrap();
        let err = MetricExpansion::new(vec![vec![int(1)]], vec![Correction { j: 2, l: 0, tensor: t }], 4);
        assert_eq!(err, Err(Error::NotReal));
    }

    #[test]
    fn merges_and_sorts_corrections() {
        let g = MetricExpansion::new(
            vec![vec![rat(2, 1)]],
            vec![
                Correction {
                    j: 2,
                    l: 1,
                    tensor: const_tensor(&[&[1]]),
                },
                Correction {
                    j: 1,
                    l: 0,
                    tensor: const_tensor(&[&[3]]),
                },
                Correction {
                    j: 2,
                    l: 1,
                    tensor: const_tensor(&[&[-1]]),
                },
            ],
            4,
        )
        .unwrap();
        assert_eq!(g.corrections().len(), 1);
        assert_eq!(g.corrections()[0].j, 1);
        assert_eq!(g.h0_inv()[0][0], rat(1, 2));
    }

    #[test]
    fn log_cap_slope_follows_corrections() {
        let g = MetricExpansion::flat(1, 4)
            .with_correction(1, 2, const_tensor(&[&[1]]))
            .unwrap();
        assert_eq!(g.cap(), LogCap::new(2, 0));
    }
}
