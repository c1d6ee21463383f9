use nalgebra::DMatrix;
use num::complex::Complex64;

use super::bessel::{bessel_k, bessel_k_derivative};
use super::ode::{integrate, OdeOptions, State};
use crate::algebra::{quadratic_form, rational_to_f64, Rational};
use crate::error::{Error, Result};
use crate::geometry::MetricExpansion;

/// Radial metric h(x) = h0 + Σ x^j (ln x)^l L_{j,l} in floating point.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    n: usize,
    h0: DMatrix<f64>,
    terms: Vec<(usize, usize, DMatrix<f64>)>,
}

fn to_matrix(m: &[Vec<Rational>]) -> DMatrix<f64> {
    let n = m.len();
    DMatrix::from_fn(n, n, |i, j| rational_to_f64(&m[i][j]))
}

impl RadialProfile {
    pub fn new(g: &MetricExpansion) -> Result<Self> {
        if !g.is_radial() {
            return Err(Error::Unsupported("mode reduction needs a y-independent metric".into()));
        }
        let n = g.n();
        let zero = vec![0i64; n];
        let terms = g
            .corrections()
            .iter()
            .map(|c| {
                let m = DMatrix::from_fn(n, n, |i, k| c.tensor.get(i, k).coefficient(&zero).to_complex().re);
                (c.j, c.l, m)
            })
            .collect();
        Ok(RadialProfile {
            n,
            h0: to_matrix(g.h0()),
            terms,
        })
    }

    pub fn h(&self, x: f64) -> DMatrix<f64> {
        let lx = x.ln();
        let mut h = self.h0.clone();
        for (j, l, m) in &self.terms {
            h += m * (x.powi(*j as i32) * lx.powi(*l as i32));
        }
        h
    }

    /// x∂_x h.
    pub fn euler_h(&self, x: f64) -> DMatrix<f64> {
        let lx = x.ln();
        let mut d = DMatrix::zeros(self.n, self.n);
        for (j, l, m) in &self.terms {
            let xj = x.powi(*j as i32);
            let mut c = *j as f64 * xj * lx.powi(*l as i32);
            if *l > 0 {
                c += *l as f64 * xj * lx.powi(*l as i32 - 1);
            }
            d += m * c;
        }
        d
    }

    /// (τ(x), ξᵀh(x)⁻¹ξ, det h(x)).
    pub fn coefficients(&self, x: f64, xi: &[f64]) -> Result<(f64, f64, f64)> {
        let h = self.h(x);
        let det = h.determinant();
        let inv = h
            .try_inverse()
            .ok_or_else(|| Error::Numerical(format!("h({x}) is singular")))?;
        let tau = (&inv * self.euler_h(x)).trace();
        let v = nalgebra::DVector::from_column_slice(xi);
        let w = (v.transpose() * &inv * &v)[(0, 0)];
        Ok((tau, w, det))
    }
}

#[derive(Clone, Debug)]
pub struct ModeProblem {
    pub metric: MetricExpansion,
    pub xi: Vec<i64>,
    pub zeta: Complex64,
    /// Integration window [x_min, x_max].
    pub window: (f64, f64),
    /// Sub-window used for connection fitting.
    pub fit_window: (f64, f64),
    pub fit_points: usize,
    pub rtol: f64,
    /// Truncation order J of the branch models.
    pub trunc: usize,
}

impl ModeProblem {
    pub fn new(metric: MetricExpansion, xi: Vec<i64>, zeta: Complex64) -> Result<Self> {
        if xi.len() != metric.n() {
            return Err(Error::DimensionMismatch {
                expected: metric.n(),
                found: xi.len(),
            });
        }
        Ok(ModeProblem {
            metric,
            xi,
            zeta,
            window: (1e-4, 1.0),
            fit_window: (1e-4, 1e-2),
            fit_points: 200,
            rtol: 1e-12,
            trunc: 8,
        })
    }

    pub fn flat(n: usize, xi: Vec<i64>, zeta: Complex64) -> Result<Self> {
        Self::new(MetricExpansion::flat(n, 8), xi, zeta)
    }

    pub fn n(&self) -> usize {
        self.metric.n()
    }

    /// q² = ξ·h0⁻¹ξ.
    pub fn q2(&self) -> f64 {
        rational_to_f64(&quadratic_form(self.metric.h0_inv(), &self.xi))
    }

    pub fn q(&self) -> f64 {
        self.q2().sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.window;
        let (c, d) = self.fit_window;
        if !(a > 0.0 && a < b && c >= a && d <= b && c < d) {
            return Err(Error::IllPosed(format!(
                "bad windows {:?} / {:?}",
                self.window, self.fit_window
            )));
        }
        if self.fit_points < 4 {
            return Err(Error::IllPosed("need at least 4 fit points".into()));
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<RadialProfile> {
        RadialProfile::new(&self.metric)
    }

    pub fn ode_options(&self) -> OdeOptions {
        OdeOptions {
            rtol: self.rtol,
            ..OdeOptions::default()
        }
    }

    /// Log-spaced fit abscissae, descending.
    pub fn fit_grid(&self) -> Vec<f64> {
        let (a, b) = (self.fit_window.0.ln(), self.fit_window.1.ln());
        let m = self.fit_points;
        (0..m)
            .map(|i| (b + (a - b) * i as f64 / (m - 1) as f64).exp())
            .collect()
    }
}

/// Initial data at the starting point.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialData {
    /// x^{n/2} K_{ζ−n/2}(qx), the solution decaying as x → ∞ on the flat model.
    DecayingBessel,
    /// x^s.
    Power(Complex64),
    /// Explicit (u, x∂_x u).
    Values(Complex64, Complex64),
}

impl InitialData {
    pub fn evaluate(&self, p: &ModeProblem, x: f64) -> Result<State> {
        match self {
            InitialData::DecayingBessel => decaying_reference(p.n(), p.q(), p.zeta, x),
            InitialData::Power(s) => {
                let u = Complex64::new(x, 0.0).powc(*s);
                Ok([u, s * u])
            }
            InitialData::Values(u, ut) => Ok([*u, *ut]),
        }
    }
}

/// (u, x u_x) for u = x^{n/2} K_ν(qx), ν = ζ − n/2.
pub fn decaying_reference(n: usize, q: f64, zeta: Complex64, x: f64) -> Result<State> {
    if q <= 0.0 {
        return Err(Error::IllPosed("decaying Bessel data needs q > 0".into()));
    }
    let nu = zeta - n as f64 / 2.0;
    let pre = x.powf(n as f64 / 2.0);
    let k = bessel_k(nu, q * x)?;
    let dk = bessel_k_derivative(nu, q * x)?;
    let u = pre * k;
    Ok([u, n as f64 / 2.0 * u + pre * q * x * dk])
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeSolution {
    pub xs: Vec<f64>,
    /// u(x).
    pub u: Vec<Complex64>,
    /// x∂_x u.
    pub ut: Vec<Complex64>,
    pub steps: usize,
}

/// Integrates u_tt = (n − τ/2)u_t + (x²w − ζ(n−ζ))u in t = ln x from x0
/// towards each sample point in `xs` (monotone away from x0).
pub fn solve_mode_from(p: &ModeProblem, x0: f64, init: &InitialData, xs: &[f64]) -> Result<ModeSolution> {
    p.validate()?;
    let prof = p.profile()?;
    let xi: Vec<f64> = p.xi.iter().map(|v| *v as f64).collect();
    let n = p.n() as f64;
    let zeta = p.zeta;
    let shift = zeta * (n - zeta);
    let f = |t: f64, y: &State| -> State {
        let x = t.exp();
        let (tau, w, _) = prof.coefficients(x, &xi).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        [y[1], (n - tau / 2.0) * y[1] + (x * x * w - shift) * y[0]]
    };
    let y0 = init.evaluate(p, x0)?;
    let ts: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let (ys, steps) = integrate(f, x0.ln(), y0, &ts, &p.ode_options())?;
    Ok(ModeSolution {
        xs: xs.to_vec(),
        u: ys.iter().map(|y| y[0]).collect(),
        ut: ys.iter().map(|y| y[1]).collect(),
        steps,
    })
}

/// Inward integration from x_max with the given data, sampled on the fit grid.
pub fn solve_mode_ode(p: &ModeProblem, init: &InitialData) -> Result<ModeSolution> {
    solve_mode_from(p, p.window.1, init, &p.fit_grid())
}

/// x^{−n} √det h · (u₁ ∂_t u₂ − u₂ ∂_t u₁) at each sample; constant for exact solutions.
pub fn weighted_wronskian(p: &ModeProblem, a: &ModeSolution, b: &ModeSolution) -> Result<Vec<Complex64>> {
    if a.xs != b.xs {
        return Err(Error::IllPosed("solutions sampled on different grids".into()));
    }
    let prof = p.profile()?;
    let xi: Vec<f64> = p.xi.iter().map(|v| *v as f64).collect();
    let n = p.n() as i32;
    a.xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let (_, _, det) = prof.coefficients(x, &xi)?;
            Ok(x.powi(-n) * det.sqrt() * (a.u[i] * b.ut[i] - b.u[i] * a.ut[i]))
        })
        .collect()
}
