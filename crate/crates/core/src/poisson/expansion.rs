use num::complex::Complex64;

use crate::algebra::{int, rat, BoundaryFunction, GaussianRational, LaurentData, Scalar, ZetaRational};
use crate::error::{Error, Result};
use crate::geometry::MetricExpansion;
use crate::spectral::{build_d_zeta, SpectralParams, ZSeries};

/// Formal solution x^{n−ζ}F of (Δ_g − ζ(n−ζ))u = O(x^{n−ζ+J+1}) with F|_{x=0} = f.
#[derive(Clone, PartialEq, Debug)]
pub struct PoissonExpansion {
    pub n: usize,
    pub params: SpectralParams,
    pub source: BoundaryFunction<GaussianRational>,
    pub trunc: usize,
    /// F, Zero-based; the coefficient at (j, l) is p_{j,l}(ζ)f.
    pub series: ZSeries,
}

/// One entry of a pole table.
#[derive(Clone, PartialEq, Debug)]
pub struct PoleEntry {
    pub zeta0: GaussianRational,
    pub j: usize,
    pub l: usize,
    pub frequency: Vec<i64>,
    pub laurent: LaurentData,
}

/// Runs the order-by-order recursion for ζ symbolic.
pub fn gz_expand(
    g: &MetricExpansion,
    f: &BoundaryFunction<GaussianRational>,
    trunc: usize,
) -> Result<PoissonExpansion> {
    gz_expand_with(g, f, &SpectralParams::symbolic(g.n()), trunc)
}

/// Same recursion at an arbitrary (symbolic or exact) ζ. At exceptional
/// values the division by j(2ζ−n−j) fails with `DivisionByZero`.
pub fn gz_expand_with(
    g: &MetricExpansion,
    f: &BoundaryFunction<GaussianRational>,
    params: &SpectralParams,
    trunc: usize,
) -> Result<PoissonExpansion> {
    let n = g.n();
    if f.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.dim(),
        });
    }
    let d = build_d_zeta(g, params, trunc)?;
    let z = params.zeta();
    let nz = ZetaRational::from_int(n as i64);
    let fz = f.map_into(|c| ZetaRational::constant(c.clone()));
    let mut series = ZSeries::constant(fz, trunc).with_cap(g.cap())?;
    for j in 1..=trunc {
        let r = d.apply(&series.truncate(j), j)?;
        let mut residual: Vec<BoundaryFunction<ZetaRational>> = Vec::new();
        for (l, c) in r.order(j) {
            if residual.len() <= l {
                residual.resize(l + 1, BoundaryFunction::zero(n));
            }
            residual[l] = c.clone();
        }
        let jz = ZetaRational::from_int(j as i64);
        // 𝒟_ζ(c x^j L^l) = j(2ζ−n−j)c x^j L^l + l(2ζ−n−2j)c x^j L^{l−1} − l(l−1)c x^j L^{l−2} + O(x^{j+1})
        let indicial = z.add(&z).sub(&nz).sub(&jz).mul(&jz);
        let inv = indicial.inverse().ok_or(Error::DivisionByZero)?;
        for l in (0..residual.len()).rev() {
            let c = residual[l].scale(&inv).neg();
            if c.is_zero() {
                continue;
            }
            if l >= 1 {
                let k = z
                    .add(&z)
                    .sub(&nz)
                    .sub(&ZetaRational::from_int(2 * j as i64))
                    .mul(&ZetaRational::from_int(l as i64));
                residual[l - 1] = residual[l - 1].add(&c.scale(&k));
            }
            if l >= 2 {
                let k = ZetaRational::from_int(-((l * (l - 1)) as i64));
                residual[l - 2] = residual[l - 2].add(&c.scale(&k));
            }
            series.insert(j, l, c)?;
        }
    }
    Ok(PoissonExpansion {
        n,
        params: params.clone(),
        source: f.clone(),
        trunc,
        series,
    })
}

impl PoissonExpansion {
    pub fn coefficient(&self, j: usize, l: usize) -> Result<BoundaryFunction<ZetaRational>> {
        self.series.coefficient(j, l)
    }

    /// Highest log power present at order j.
    pub fn top_log(&self, j: usize) -> Option<usize> {
        self.series.order(j).map(|(l, _)| l).max()
    }

    /// 𝒟_ζ F through the truncation order; zero when the recursion is right.
    pub fn residual(&self, g: &MetricExpansion) -> Result<ZSeries> {
        build_d_zeta(g, &self.params, self.trunc)?.apply(&self.series, self.trunc)
    }

    /// Laurent data of every stored coefficient at the exceptional points
    /// ζ0 = (n+j')/2, j' ≤ j, sorted by ζ0 then (j, l, frequency).
    pub fn pole_table(&self, terms: usize) -> Vec<PoleEntry> {
        let mut out = Vec::new();
        for jp in 1..=self.trunc {
            let zeta0 = GaussianRational::real(rat((self.n + jp) as i64, 2));
            for ((j, l), c) in self.series.terms() {
                for (xi, v) in c.terms() {
                    let ld = v.pole_data(&zeta0, terms);
                    if ld.order > 0 {
                        out.push(PoleEntry {
                            zeta0: zeta0.clone(),
                            j: *j,
                            l: *l,
                            frequency: xi.clone(),
                            laurent: ld,
                        });
                    }
                }
            }
        }
        out
    }

    /// Evaluates the frequency-ξ part of F at real x > 0 and complex ζ, using
    /// ζ ↦ value substitution in every coefficient.
    pub fn eval_mode(&self, xi: &[i64], x: f64, zeta: Complex64) -> Complex64 {
        let lx = x.ln();
        let mut acc = Complex64::new(0.0, 0.0);
        for ((j, l), c) in self.series.terms() {
            let v = c.coefficient(xi);
            if v.is_zero() {
                continue;
            }
            acc += v.eval_complex(zeta) * x.powi(*j as i32) * lx.powi(*l as i32);
        }
        acc
    }

    /// x∂_x of the same mode sum.
    pub fn eval_mode_euler(&self, xi: &[i64], x: f64, zeta: Complex64) -> Complex64 {
        let lx = x.ln();
        let mut acc = Complex64::new(0.0, 0.0);
        for ((j, l), c) in self.series.terms() {
            let v = c.coefficient(xi);
            if v.is_zero() {
                continue;
            }
            let val = v.eval_complex(zeta);
            let xj = x.powi(*j as i32);
            acc += val * xj * (*j as f64) * lx.powi(*l as i32);
            if *l > 0 {
                acc += val * xj * (*l as f64) * lx.powi(*l as i32 - 1);
            }
        }
        acc
    }
}

/// −2 times the residue of p_{l,m_l} at ζ0 = (n+l)/2: the coefficient of
/// x^{ζ0}(ln x)^{m_l+1} in the limiting solution.
pub fn exceptional_log_coefficient(
    g: &MetricExpansion,
    f: &BoundaryFunction<GaussianRational>,
    l: usize,
) -> Result<BoundaryFunction<GaussianRational>> {
    if l == 0 {
        return Err(Error::Unsupported("exceptional order starts at l = 1".into()));
    }
    let exp = gz_expand(g, f, l)?;
    let zeta0 = GaussianRational::real(rat((g.n() + l) as i64, 2));
    let Some(m) = exp.top_log(l) else {
        return Ok(BoundaryFunction::zero(g.n()));
    };
    let coeff = exp.coefficient(l, m)?;
    let mut terms = Vec::new();
    for (xi, v) in coeff.terms() {
        let ld = v.pole_data(&zeta0, 2);
        if ld.order > 1 {
            return Err(Error::UnexpectedPoleOrder {
                expected: 1,
                found: ld.order,
            });
        }
        terms.push((xi.clone(), ld.residue().scale(&int(-2))));
    }
    Ok(BoundaryFunction::from_terms(g.n(), terms))
}
