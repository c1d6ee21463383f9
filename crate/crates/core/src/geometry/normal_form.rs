//! Normal form for conformal rescalings e^{2u}(dx² + h(x))/x².
//!
//! With x′ = x e^ω the condition |dx′/x′|_g = 1 reads
//! (1 + x∂ω)² + x²|d_yω|²_h = e^{2u}, solved order by order in x.

use super::metric::{Correction, MetricExpansion};
use crate::algebra::{rat, BoundaryFunction, BoundaryTensor, GaussianRational, Scalar};
use crate::error::{Error, Result};
use crate::series::{BaseTag, PhgSeries};

type Ser = PhgSeries<GaussianRational>;
type Bf = BoundaryFunction<GaussianRational>;

#[derive(Clone, PartialEq, Debug)]
pub struct NormalForm {
    pub omega: Ser,
    /// e^{2u} − (1 + x∂ω)² − x²|d_yω|²_h; zero through the truncation order.
    pub residual: Ser,
    /// The metric in the new defining function; only for y-independent u with ω0 = 0.
    pub h_new: Option<MetricExpansion>,
}

fn defect(g: &MetricExpansion, e2u: &Ser, omega: &Ser, trunc: usize) -> Result<Ser> {
    let n = g.n();
    let one = Ser::one(n, trunc);
    let a = one.add(&omega.euler()?)?;
    let mut r = e2u.sub(&a.mul(&a, trunc)?)?;
    if trunc >= 2 {
        let t = trunc - 2;
        let hinv = g.h_inverse(t)?;
        let d: Vec<Ser> = (0..n).map(|i| omega.partial(i).truncate(t)).collect();
        let mut q = Ser::zero(n, t);
        for i in 0..n {
            for j in 0..n {
                q = q.add(&hinv.get(i, j).mul(&d[i], t)?.mul(&d[j], t)?)?;
            }
        }
        r = r.sub(&q.shift(2))?;
    }
    Ok(r.truncate(trunc))
}

/// Solves for ω with ω|_{x=0} = ω0. Requires u|_{x=0} = 0 (no order-zero terms).
pub fn normal_form_solve(g: &MetricExpansion, u: &Ser, omega0: &Bf, trunc: usize) -> Result<NormalForm> {
    let n = g.n();
    if u.dim() != n || omega0.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.dim().min(omega0.dim()),
        });
    }
    if u.tag() != BaseTag::Zero {
        return Err(Error::IncompatibleBase(format!(
            "conformal exponent based at {}",
            u.tag()
        )));
    }
    if u.order(0).next().is_some() {
        return Err(Error::IllPosed("conformal exponent must vanish at x = 0".into()));
    }
    let g = g.with_trunc(trunc.max(g.trunc()));
    let cap = g.cap().join(u.cap());
    let e2u = u.scale(&GaussianRational::from_int(2)).exp(trunc)?.with_cap(cap)?;
    let mut omega = Ser::constant(omega0.clone(), trunc).with_cap(cap)?;
    for j in 1..=trunc {
        let r = defect(&g, &e2u, &omega.truncate(j), j)?;
        let mut levels: Vec<Bf> = Vec::new();
        for (l, c) in r.order(j) {
            if levels.len() <= l {
                levels.resize(l + 1, Bf::zero(n));
            }
            levels[l] = c.clone();
        }
        // new term c x^j L^l changes the defect by −2jc L^l − 2lc L^{l−1}
        let inv = GaussianRational::from_rational(&rat(1, 2 * j as i64));
        for l in (0..levels.len()).rev() {
            let c = levels[l].scale(&inv);
            if c.is_zero() {
                continue;
            }
            if l >= 1 {
                levels[l - 1] = levels[l - 1].sub(&c.scale(&GaussianRational::from_int(2 * l as i64)));
            }
            omega.insert(j, l, c)?;
        }
    }
    let residual = defect(&g, &e2u, &omega, trunc)?;
    let radial = u.terms().values().all(|f| f.is_constant()) && g.is_radial();
    let h_new = if radial && omega0.is_zero() {
        Some(new_metric(&g, u, &omega, trunc)?)
    } else {
        None
    };
    Ok(NormalForm { omega, residual, h_new })
}

/// f(x(x′)) where x = x′e^{−φ}, ln x = ln x′ − φ.
fn pull_back(f: &Ser, phi: &Ser, trunc: usize) -> Result<Ser> {
    let n = f.dim();
    let cap = f.cap().join(phi.cap());
    let mut out = Ser::zero(n, trunc).with_cap(cap)?;
    let neg_phi = phi.neg();
    for (&(j, l), c) in f.terms() {
        if j > trunc {
            continue;
        }
        let ej = neg_phi
            .scale(&GaussianRational::from_int(j as i64))
            .exp(trunc)?
            .with_cap(cap)?;
        let mut pow = Ser::one(n, trunc).with_cap(cap)?;
        let mut binom = 1i64;
        for i in 0..=l {
            let mono = Ser::monomial(c.clone(), BaseTag::Zero, j, l - i, trunc, cap)?;
            let term = mono
                .mul(&pow, trunc)?
                .mul(&ej, trunc)?
                .scale(&GaussianRational::from_int(binom));
            out = out.add(&term)?;
            pow = pow.mul(&neg_phi, trunc)?;
            binom = binom * (l - i) as i64 / (i + 1) as i64;
        }
    }
    Ok(out)
}

/// φ(x′) = ω(x(x′)) by fixed-point iteration; each pass fixes one more order.
fn inverse_shift(omega: &Ser, trunc: usize) -> Result<Ser> {
    let mut phi = Ser::zero(omega.dim(), trunc).with_cap(omega.cap())?;
    for _ in 0..=trunc {
        let next = pull_back(omega, &phi, trunc)?;
        if next == phi {
            break;
        }
        phi = next;
    }
    Ok(phi)
}

/// h′(x′) = e^{2(u + ω)} h evaluated at x(x′).
fn new_metric(g: &MetricExpansion, u: &Ser, omega: &Ser, trunc: usize) -> Result<MetricExpansion> {
    let n = g.n();
    let phi = inverse_shift(omega, trunc)?;
    let w = u.add(omega)?.scale(&GaussianRational::from_int(2)).exp(trunc)?;
    let factor = pull_back(&w, &phi, trunc)?;
    let h = g.h_matrix(trunc);
    let mut entries: Vec<Vec<Ser>> = Vec::new();
    for i in 0..n {
        let mut row = Vec::new();
        for k in 0..n {
            row.push(pull_back(h.get(i, k), &phi, trunc)?.mul(&factor, trunc)?);
        }
        entries.push(row);
    }
    let mut keys: Vec<(usize, usize)> = entries
        .iter()
        .flatten()
        .flat_map(|e| e.terms().keys().copied())
        .collect();
    keys.sort();
    keys.dedup();
    let mut h0 = vec![vec![crate::algebra::int(0); n]; n];
    let mut corrections = Vec::new();
    for (j, l) in keys {
        let t: Vec<Vec<Bf>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| entries[i][k].coefficient(j, l).unwrap_or_else(|_| Bf::zero(n)))
                    .collect()
            })
            .collect();
        if j == 0 {
            if l > 0 {
                return Err(Error::Unsupported(
                    "logarithmic term at order zero in the new metric".into(),
                ));
            }
            for i in 0..n {
                for k in 0..n {
                    let v = t[i][k]
                        .as_constant()
                        .ok_or_else(|| Error::Unsupported("y-dependent h0".into()))?;
                    if !v.is_real() {
                        return Err(Error::NotReal);
                    }
                    h0[i][k] = v.re;
                }
            }
        } else {
            corrections.push(Correction {
                j,
                l,
                tensor: BoundaryTensor::new(t)?,
            });
        }
    }
    MetricExpansion::new(h0, corrections, trunc)
}
