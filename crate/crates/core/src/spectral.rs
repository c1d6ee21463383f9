//! Operators depending on the spectral parameter ζ: the indicial polynomial,
//! Δ_g − ζ(n−ζ), the conjugated operator 𝒟_ζ = x^{ζ−n}(Δ_g − ζ(n−ζ))x^{n−ζ}
//! and coefficient freezing at a boundary point.

use crate::algebra::{int, rat, BoundaryFunction, ComplexScalar, GaussianRational, Scalar, ZetaRational};
use crate::error::{Error, Result};
use crate::geometry::{laplace_h, laplacian, tau, DifferentialOperatorSeries, MetricExpansion};
use crate::series::{BaseTag, LogCap, PhgSeries};

pub type ZOp = DifferentialOperatorSeries<ZetaRational>;
pub type ZSeries = PhgSeries<ZetaRational>;

/// The spectral parameter: an indeterminate or an exact value.
#[derive(Clone, PartialEq, Debug)]
pub enum Zeta {
    Symbolic,
    Value(GaussianRational),
}

#[derive(Clone, PartialEq, Debug)]
pub struct SpectralParams {
    pub n: usize,
    pub zeta: Zeta,
}

impl SpectralParams {
    pub fn symbolic(n: usize) -> Self {
        SpectralParams {
            n,
            zeta: Zeta::Symbolic,
        }
    }

    pub fn at(n: usize, zeta: GaussianRational) -> Self {
        SpectralParams {
            n,
            zeta: Zeta::Value(zeta),
        }
    }

    /// ζ as an element of the scalar ring.
    pub fn zeta(&self) -> ZetaRational {
        match &self.zeta {
            Zeta::Symbolic => ZetaRational::zeta(),
            Zeta::Value(v) => ZetaRational::constant(v.clone()),
        }
    }

    /// n − ζ
    pub fn reflected(&self) -> ZetaRational {
        ZetaRational::from_int(self.n as i64).sub(&self.zeta())
    }

    /// True when ζ lies in (n − ℕ)/2.
    pub fn is_exceptional(&self) -> bool {
        match &self.zeta {
            Zeta::Symbolic => false,
            Zeta::Value(v) => {
                let t = GaussianRational::from_int(self.n as i64).sub(&v.scale(&int(2)));
                t.is_real() && t.re.is_integer() && t.re >= int(0)
            }
        }
    }
}

/// The indicial polynomial −(η−ζ)(η−(n−ζ)) evaluated at the exponent η.
pub fn indicial_apply(params: &SpectralParams, eta: &ZetaRational) -> ZetaRational {
    eta.sub(&params.zeta()).mul(&eta.sub(&params.reflected())).neg()
}

/// The two indicial roots (n − ζ, ζ).
pub fn indicial_roots(params: &SpectralParams) -> (ZetaRational, ZetaRational) {
    (params.reflected(), params.zeta())
}

fn lift(op: &DifferentialOperatorSeries<GaussianRational>) -> ZOp {
    op.map_into(|g| ZetaRational::constant(g.clone()))
}

fn lift_series(s: &PhgSeries<GaussianRational>) -> ZSeries {
    s.map_into(|g| ZetaRational::constant(g.clone()))
}

fn constant(n: usize, v: ZetaRational, trunc: usize) -> ZSeries {
    ZSeries::constant(BoundaryFunction::constant(n, v), trunc)
}

/// Δ_g with coefficients in the ζ ring.
pub fn build_laplacian(g: &MetricExpansion, _params: &SpectralParams, trunc: usize) -> Result<ZOp> {
    Ok(lift(&laplacian(g, trunc)?))
}

/// Δ_g − ζ(n−ζ).
pub fn shifted_laplacian(g: &MetricExpansion, params: &SpectralParams, trunc: usize) -> Result<ZOp> {
    let n = g.n();
    let mut op = build_laplacian(g, params, trunc)?;
    let lam = params.zeta().mul(&params.reflected()).neg();
    op.insert(0, vec![0; n], constant(n, lam, trunc))?;
    Ok(op)
}

/// 𝒟_ζ = −(x∂)² + (2ζ − n − τ/2)x∂ − ((n−ζ)/2)τ + x²Δ_h, τ = x Tr_h(∂_x h).
pub fn build_d_zeta(g: &MetricExpansion, params: &SpectralParams, trunc: usize) -> Result<ZOp> {
    let n = g.n();
    let z = params.zeta();
    let half = ZetaRational::from_rational(&rat(1, 2));
    let t = lift_series(&tau(g, trunc)?);
    let mut op = ZOp::new(n, trunc);
    op.insert(2, vec![0; n], constant(n, ZetaRational::from_int(-1), trunc))?;
    let lin = z.add(&z).sub(&ZetaRational::from_int(n as i64));
    op.insert(1, vec![0; n], constant(n, lin, trunc).sub(&t.scale(&half))?)?;
    op.insert(0, vec![0; n], t.scale(&params.reflected().mul(&half).neg()))?;
    let lh = lift(&laplace_h(g, trunc.saturating_sub(2))?).shift(2);
    op.add(&lh).map(|o| o.truncate(trunc))
}

/// G(z) = x²Δ_h − ((n−z)/2)τ.
pub fn g_operator(g: &MetricExpansion, z: &ZetaRational, trunc: usize) -> Result<ZOp> {
    let n = g.n();
    let t = lift_series(&tau(g, trunc)?);
    let c = ZetaRational::from_int(n as i64)
        .sub(z)
        .mul(&ZetaRational::from_rational(&rat(-1, 2)));
    let mut op = lift(&laplace_h(g, trunc.saturating_sub(2))?).shift(2).truncate(trunc);
    op.insert(0, vec![0; n], t.scale(&c))?;
    Ok(op)
}

/// The log cap needed for f x^j (ln x)^i inputs on this metric.
pub fn monomial_cap(g: &MetricExpansion, i: usize) -> LogCap {
    LogCap::new(g.cap().slope, i)
}

/// f x^j (ln x)^i as a Zero-based series.
pub fn monomial(
    g: &MetricExpansion,
    f: &BoundaryFunction<GaussianRational>,
    j: usize,
    i: usize,
    trunc: usize,
) -> Result<ZSeries> {
    let fz = f.map_into(|c| ZetaRational::constant(c.clone()));
    ZSeries::monomial(fz, BaseTag::Zero, j, i, trunc, monomial_cap(g, i))
}

/// Closed form of 𝒟_ζ(f x^j (ln x)^i):
///
/// j(2ζ−n−j) f x^j L^i + i(2ζ−n−2j) f x^j L^{i−1} − i(i−1) f x^j L^{i−2}
/// + x^j L^i G(n−j)f − (i/2)τ f x^j L^{i−1} − ((n−ζ)/2)τ f x^j L^i,
///
/// with L = ln x. G(n−j) contributes only −(j/2)τ, so together with the last
/// term the full multiplier of τ f x^j L^i is −(n−ζ+j)/2; nothing is counted
/// twice.
pub fn d_zeta_monomial(
    g: &MetricExpansion,
    params: &SpectralParams,
    f: &BoundaryFunction<GaussianRational>,
    j: usize,
    i: usize,
    trunc: usize,
) -> Result<ZSeries> {
    let n = g.n();
    let nz = ZetaRational::from_int(n as i64);
    let z = params.zeta();
    let two_z = z.add(&z);
    let fz = f.map_into(|c| ZetaRational::constant(c.clone()));
    let cap = monomial_cap(g, i).join(g.cap());
    let mono = |l: usize, c: ZetaRational| -> Result<ZSeries> {
        ZSeries::monomial(fz.scale(&c), BaseTag::Zero, j, l, trunc, cap)
    };
    let (ji, ii) = (j as i64, i as i64);
    let mut out = mono(
        i,
        two_z
            .sub(&nz)
            .sub(&ZetaRational::from_int(ji))
            .mul(&ZetaRational::from_int(ji)),
    )?;
    if i >= 1 {
        let c = two_z
            .sub(&nz)
            .sub(&ZetaRational::from_int(2 * ji))
            .mul(&ZetaRational::from_int(ii));
        out = out.add(&mono(i - 1, c)?)?;
    }
    if i >= 2 {
        out = out.add(&mono(i - 2, ZetaRational::from_int(-ii * (ii - 1)))?)?;
    }
    // x^j L^i G(n−j) f
    let gop = g_operator(g, &nz.sub(&ZetaRational::from_int(ji)), trunc)?;
    let gf = gop.apply(&ZSeries::constant(fz.clone(), trunc), trunc)?;
    let xl = ZSeries::monomial(BoundaryFunction::one(n), BaseTag::Zero, j, i, trunc, cap)?;
    out = out.add(&xl.mul(&gf, trunc)?)?;
    let t = lift_series(&tau(g, trunc)?);
    if i >= 1 {
        let xl1 = ZSeries::monomial(
            fz.scale(&ZetaRational::from_rational(&rat(-ii, 2))),
            BaseTag::Zero,
            j,
            i - 1,
            trunc,
            cap,
        )?;
        out = out.add(&xl1.mul(&t, trunc)?)?;
    }
    let c = params.reflected().mul(&ZetaRational::from_rational(&rat(-1, 2)));
    out = out.add(&ZSeries::monomial(fz.scale(&c), BaseTag::Zero, j, i, trunc, cap)?.mul(&t, trunc)?)?;
    Ok(out)
}

/// A boundary point y with coordinates y_i = k_i π/2, so that e^{iξ·y} is a
/// power of i and evaluation stays exact.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BoundaryPoint {
    pub quarter_turns: Vec<i64>,
}

impl BoundaryPoint {
    pub fn origin(n: usize) -> Self {
        BoundaryPoint {
            quarter_turns: vec![0; n],
        }
    }

    /// Exact value of a boundary function at this point.
    pub fn eval<S: ComplexScalar>(&self, f: &BoundaryFunction<S>) -> S {
        let powers = [
            GaussianRational::one(),
            GaussianRational::i(),
            GaussianRational::from_int(-1),
            GaussianRational::i().neg(),
        ];
        f.terms().iter().fold(S::zero(), |acc, (xi, c)| {
            let k: i64 = xi.iter().zip(&self.quarter_turns).map(|(a, b)| a * b).sum();
            acc.add(&c.mul(&S::from_gaussian(&powers[k.rem_euclid(4) as usize])))
        })
    }
}

/// Normal operator at p: writes each term as p_{a,β}(x,y)(x∂_x)^a(x∂_y)^β and
/// replaces p_{a,β} by its value at (0, p).
pub fn freeze_normal_operator<S: ComplexScalar>(
    op: &DifferentialOperatorSeries<S>,
    p: &BoundaryPoint,
) -> Result<DifferentialOperatorSeries<S>> {
    let n = op.dim();
    if p.quarter_turns.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.quarter_turns.len(),
        });
    }
    let mut out = DifferentialOperatorSeries::new(n, op.trunc());
    for ((a, beta), c) in op.terms() {
        if c.tag() != BaseTag::Zero {
            return Err(Error::IncompatibleBase(format!(
                "cannot freeze a {} coefficient",
                c.tag()
            )));
        }
        let order: usize = beta.iter().sum();
        let v0 = c
            .unshift(order)
            .map_err(|_| Error::Unsupported(format!("coefficient of ∂^{beta:?} is not divisible by x^{order}")))?;
        if v0.order(0).any(|(l, _)| l > 0) {
            return Err(Error::Unsupported(
                "coefficient has a logarithmic singularity at x = 0".into(),
            ));
        }
        let value = p.eval(&v0.coefficient(0, 0)?);
        if value.is_zero() {
            continue;
        }
        let frozen = PhgSeries::monomial(
            BoundaryFunction::constant(n, value),
            BaseTag::Zero,
            order,
            0,
            op.trunc(),
            LogCap::default(),
        )?;
        out.insert(*a, beta.clone(), frozen)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{gr, BoundaryTensor, Rational};

    #[test]
    fn indicial_roots_vanish() {
        let p = SpectralParams::symbolic(3);
        let (a, b) = indicial_roots(&p);
        assert!(indicial_apply(&p, &a).is_zero());
        assert!(indicial_apply(&p, &b).is_zero());
        let q = SpectralParams::at(2, gr(0, 1));
        assert_eq!(
            indicial_apply(&q, &ZetaRational::from_int(1)),
            ZetaRational::from_int(1)
        );
    }

    #[test]
    fn indicial_reflection_symmetry() {
        let p = SpectralParams::symbolic(4);
        let eta = ZetaRational::linear(int(1), int(3));
        let v = indicial_apply(&p, &eta);
        let refl = v.substitute_linear(&gr(4, 1), &gr(-1, 1));
        assert_eq!(indicial_apply(&p, &eta.substitute_linear(&gr(4, 1), &gr(-1, 1))), refl);
    }

    #[test]
    fn d_zeta_annihilates_one_on_constant_metric() {
        let g = MetricExpansion::flat(2, 4);
        let d = build_d_zeta(&g, &SpectralParams::symbolic(2), 4).unwrap();
        assert!(d.apply(&ZSeries::one(2, 4), 4).unwrap().is_zero());
    }

    #[test]
    fn d_zeta_on_flat_monomial() {
        let g = MetricExpansion::flat(2, 6);
        let p = SpectralParams::symbolic(2);
        let f = BoundaryFunction::exponential(2, vec![1, 0], gr(1, 1));
        let u = monomial(&g, &f, 1, 0, 6).unwrap();
        let out = build_d_zeta(&g, &p, 6).unwrap().apply(&u, 6).unwrap();
        let fz = f.map_into(|c| ZetaRational::constant(c.clone()));
        let c1 = ZetaRational::linear(int(-3), int(2));
        assert_eq!(out.coefficient(1, 0).unwrap(), fz.scale(&c1));
        assert_eq!(out.coefficient(3, 0).unwrap(), fz);
        assert_eq!(out.terms().len(), 2);
    }

    #[test]
    fn monomial_formula_terms() {
        let g = MetricExpansion::flat(1, 6);
        let p = SpectralParams::symbolic(1);
        let f = BoundaryFunction::one(1);
        let two = d_zeta_monomial(&g, &p, &f, 2, 2, 6).unwrap();
        assert_eq!(
            two.coefficient(2, 0).unwrap(),
            BoundaryFunction::constant(1, ZetaRational::from_int(-2))
        );
        let one = d_zeta_monomial(&g, &p, &f, 1, 1, 6).unwrap();
        // (2ζ − n − 2j) with n = 1, j = 1
        assert_eq!(
            one.coefficient(1, 0).unwrap(),
            BoundaryFunction::constant(1, ZetaRational::linear(int(-3), int(2)))
        );
    }

    #[test]
    fn monomial_formula_matches_engine_with_correction() {
        let cos = BoundaryFunction::from_terms(2, [(vec![1, 0], gr(1, 2)), (vec![-1, 0], gr(1, 2))]);
        let zero = BoundaryFunction::zero(2);
        let t = BoundaryTensor::new(vec![vec![cos.clone(), zero.clone()], vec![zero, cos]]).unwrap();
        let g = MetricExpansion::flat(2, 6).with_correction(1, 1, t).unwrap();
        let p = SpectralParams::symbolic(2);
        let d = build_d_zeta(&g, &p, 6).unwrap();
        let f = BoundaryFunction::exponential(2, vec![0, 1], gr(1, 1));
        for (j, i) in [(0, 0), (1, 2), (2, 3)] {
            let engine = d.apply(&monomial(&g, &f, j, i, 6).unwrap(), 6).unwrap();
            let closed = d_zeta_monomial(&g, &p, &f, j, i, 6).unwrap();
            assert_eq!(engine, closed, "j={j} i={i}");
        }
    }

    #[test]
    fn freezing_keeps_only_the_boundary_values() {
        let g = MetricExpansion::flat(2, 4);
        let lap = laplacian(&g, 4).unwrap();
        let frozen = freeze_normal_operator(&lap, &BoundaryPoint::origin(2)).unwrap();
        assert_eq!(frozen, lap);
        let h0: Vec<Vec<Rational>> = crate::algebra::identity(2);
        let h1 = BoundaryTensor::from_constant(&h0).unwrap();
        let g1 = g.with_correction(1, 0, h1).unwrap();
        let f1 = freeze_normal_operator(&laplacian(&g1, 4).unwrap(), &BoundaryPoint::origin(2)).unwrap();
        assert_eq!(f1, lap);
        assert_eq!(freeze_normal_operator(&f1, &BoundaryPoint::origin(2)).unwrap(), f1);
    }
}
