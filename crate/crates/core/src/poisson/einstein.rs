use crate::algebra::{int, rat, BoundaryFunction, BoundaryTensor, GaussianRational, Rational, Scalar, ZetaRational};
use crate::error::{Error, Result};
use crate::geometry::{laplacian, MetricExpansion};
use crate::series::{BaseTag, LogCap, PhgSeries};

use super::expansion::gz_expand;

type Ser = PhgSeries<GaussianRational>;

/// Output of the ζ = n recursion.
#[derive(Clone, PartialEq, Debug)]
pub struct EinsteinLog {
    /// F_n = F_{n−1} + p_n x^n ln x.
    pub series: Ser,
    /// Coefficient of x^n ln x.
    pub p_n: BoundaryFunction<GaussianRational>,
    /// Δ_g F_n, exact through order n; zero through order n when the
    /// recursion is consistent.
    pub residual: Ser,
}

/// At ζ = n the conjugated operator is Δ_g itself. Solves Δ_g F = O(x^{n+1} ln x)
/// with F|_{x=0} = f, introducing the single log term x^n ln x.
pub fn einstein_log_recursion(g: &MetricExpansion, f: &BoundaryFunction<GaussianRational>) -> Result<EinsteinLog> {
    let n = g.n();
    for c in g.corrections() {
        if c.j < n && (c.j % 2 == 1 || c.l > 0) {
            return Err(Error::Unsupported(format!(
                "correction x^{} (ln x)^{} below order {n} is not even and log-free",
                c.j, c.l
            )));
        }
    }
    let lap = laplacian(g, n + 1)?;
    let cap = g.cap().join(LogCap::new(1, 0));
    let mut series = Ser::constant(f.clone(), n + 1).with_cap(cap)?;
    for j in 1..n {
        let r = lap.apply(&series.truncate(j), j)?;
        for (l, c) in r.order(j) {
            if l > 0 {
                return Err(Error::Unsupported(format!("log term at order {j} below n")));
            }
            let k = GaussianRational::from_rational(&rat(1, (j as i64) * (j as i64 - n as i64)));
            series.insert(j, 0, c.scale(&k))?;
        }
    }
    let r = lap.apply(&series.truncate(n), n)?;
    let mut p_n = BoundaryFunction::zero(n);
    for (l, c) in r.order(n) {
        if l > 0 {
            return Err(Error::Unsupported(format!("log term at order {n} before the log step")));
        }
        p_n = c.scale(&GaussianRational::from_rational(&rat(1, n as i64)));
    }
    series.insert(n, 1, p_n.clone())?;
    let residual = lap.apply(&series.truncate(n), n)?;
    Ok(EinsteinLog { series, p_n, residual })
}

/// Δ_g(p x^n ln x) at leading order: −n p x^n.
pub fn log_term_action(g: &MetricExpansion, p: &BoundaryFunction<GaussianRational>) -> Result<Ser> {
    let n = g.n();
    let lap = laplacian(g, n)?;
    let u = Ser::monomial(p.clone(), BaseTag::Zero, n, 1, n, LogCap::new(1, 0))?;
    lap.apply(&u, n)
}

/// Report comparing the engine's Laurent data for a single-correction metric
/// h = h0 + x^k (ln x)^m h_{k,m}, f = 1, with the closed form
/// l^{m_l} k ((n−k)/2 − 1/2)/4 · Tr(h0⁻¹h_{k,m}).
#[derive(Clone, PartialEq, Debug)]
pub struct ResidueTraceReport {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    /// Tr(h0⁻¹ h_{k,m}), zero-frequency part.
    pub trace: Rational,
    pub levels: Vec<ResidueLevel>,
    /// Closed form evaluated with l = k + 1.
    pub closed_form: Rational,
}

/// Laurent data of the zero-frequency coefficient at one order l.
#[derive(Clone, PartialEq, Debug)]
pub struct ResidueLevel {
    pub l: usize,
    pub zeta0: Rational,
    /// Highest log power m_l present at order l (None when the order is empty).
    pub top_log: Option<usize>,
    /// Pole order of p_{l,m_l} at ζ0.
    pub pole_order: usize,
    /// [(ζ−ζ0)^{order} p_{l,m_l}] at ζ0.
    pub leading: GaussianRational,
    /// Largest pole order over all log levels at order l, and its leading coefficient.
    pub max_pole_order: usize,
    pub max_pole_leading: GaussianRational,
}

impl ResidueTraceReport {
    /// The level carrying the first nonzero coefficient.
    pub fn primary(&self) -> Option<&ResidueLevel> {
        self.levels.iter().find(|lv| lv.top_log.is_some())
    }

    /// engine / Tr, when Tr ≠ 0.
    pub fn engine_constant(&self) -> Option<GaussianRational> {
        let p = self.primary()?;
        let t = GaussianRational::real(self.trace.clone());
        t.inverse().map(|ti| p.leading.mul(&ti))
    }

    /// engine / closed form, when the closed form is nonzero.
    pub fn ratio_to_closed_form(&self) -> Option<GaussianRational> {
        let p = self.primary()?;
        GaussianRational::real(self.closed_form.clone())
            .inverse()
            .map(|c| p.leading.mul(&c))
    }
}

/// Runs the symbolic recursion for h = h0 + x^k (ln x)^m L with f = 1 and
/// records Laurent data at ζ0 = (n+l)/2 for l = k and l = k + 1.
pub fn residue_trace_check(
    h0: &[Vec<Rational>],
    k: usize,
    m: usize,
    tensor: &BoundaryTensor<GaussianRational>,
) -> Result<ResidueTraceReport> {
    let n = h0.len();
    let g = MetricExpansion::new(h0.to_vec(), vec![], k + 1)?.with_correction(k, m, tensor.clone())?;
    let trace = tensor.trace_against(g.h0_inv()).coefficient(&vec![0; n]);
    if !trace.is_real() {
        return Err(Error::NotReal);
    }
    let exp = gz_expand(&g, &BoundaryFunction::one(n), k + 1)?;
    let zero = vec![0i64; n];
    let mut levels = Vec::new();
    for l in [k, k + 1] {
        let zeta0 = rat((n + l) as i64, 2);
        let z0 = GaussianRational::real(zeta0.clone());
        let top = exp
            .series
            .order(l)
            .filter(|(_, c)| !c.coefficient(&zero).is_zero())
            .map(|(l, _)| l)
            .max();
        let (mut pole_order, mut leading) = (0, GaussianRational::zero());
        let (mut max_order, mut max_leading) = (0, GaussianRational::zero());
        for (lv, c) in exp.series.order(l) {
            let v: ZetaRational = c.coefficient(&zero);
            if v.is_zero() {
                continue;
            }
            let ld = v.pole_data(&z0, 1);
            if Some(lv) == top {
                pole_order = ld.order;
                leading = ld.leading().clone();
            }
            if ld.order > max_order {
                max_order = ld.order;
                max_leading = ld.leading().clone();
            }
        }
        levels.push(ResidueLevel {
            l,
            zeta0,
            top_log: top,
            pole_order,
            leading,
            max_pole_order: max_order,
            max_pole_leading: max_leading,
        });
    }
    let l = k + 1;
    let m_l = m as u32;
    let closed_form = Rational::from_integer(num::BigInt::from(l).pow(m_l))
        * int(k as i64)
        * (rat(n as i64 - k as i64, 2) - rat(1, 2))
        / int(4)
        * trace.re.clone();
    Ok(ResidueTraceReport {
        n,
        k,
        m,
        trace: trace.re,
        levels,
        closed_form,
    })
}
