use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;

use super::mode::{solve_mode_ode, InitialData, ModeProblem, ModeSolution};
use crate::algebra::{int, BoundaryFunction, GaussianRational};
use crate::error::{Error, Result};
use crate::poisson::{gz_expand, PoissonExpansion, Provenance, ScalarValue, ScatteringValue};

/// Coefficients of u ≈ a x^{n−ζ}F_J + b x^ζ G_J.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectionPair {
    pub a: Complex64,
    pub b: Complex64,
    /// Condition number of the column-scaled design matrix.
    pub condition: f64,
    /// Relative least-squares residual.
    pub residual: f64,
}

impl ConnectionPair {
    pub fn ratio(&self) -> Complex64 {
        self.b / self.a
    }
}

/// Branch models for one mode: F from the symbolic recursion evaluated at ζ,
/// G the same series evaluated at n − ζ.
#[derive(Clone, Debug)]
pub struct BranchModel {
    pub n: usize,
    pub xi: Vec<i64>,
    pub zeta: Complex64,
    pub expansion: PoissonExpansion,
}

impl BranchModel {
    pub fn new(p: &ModeProblem) -> Result<Self> {
        let f = BoundaryFunction::exponential(p.n(), p.xi.clone(), GaussianRational::real(int(1)));
        let expansion = gz_expand(&p.metric.with_trunc(p.trunc), &f, p.trunc)?;
        Ok(BranchModel {
            n: p.n(),
            xi: p.xi.clone(),
            zeta: p.zeta,
            expansion,
        })
    }

    pub fn reflected(&self) -> Complex64 {
        Complex64::new(self.n as f64, 0.0) - self.zeta
    }

    /// x^{n−ζ} F_J(x).
    pub fn f_branch(&self, x: f64) -> Complex64 {
        Complex64::new(x, 0.0).powc(self.reflected()) * self.expansion.eval_mode(&self.xi, x, self.zeta)
    }

    /// x^ζ G_J(x).
    pub fn g_branch(&self, x: f64) -> Complex64 {
        Complex64::new(x, 0.0).powc(self.zeta) * self.expansion.eval_mode(&self.xi, x, self.reflected())
    }

    /// x∂_x of the two branches.
    pub fn f_branch_euler(&self, x: f64) -> Complex64 {
        let s = self.reflected();
        let xs = Complex64::new(x, 0.0).powc(s);
        xs * (s * self.expansion.eval_mode(&self.xi, x, self.zeta)
            + self.expansion.eval_mode_euler(&self.xi, x, self.zeta))
    }

    pub fn g_branch_euler(&self, x: f64) -> Complex64 {
        let s = self.zeta;
        let z = self.reflected();
        let xs = Complex64::new(x, 0.0).powc(s);
        xs * (s * self.expansion.eval_mode(&self.xi, x, z) + self.expansion.eval_mode_euler(&self.xi, x, z))
    }
}

/// Rejects ζ within 1e−3 of n/2 + l/2, l = 0, …, 2J + 2.
pub fn check_conditioning(n: usize, zeta: Complex64, trunc: usize) -> Result<()> {
    for l in 0..=(2 * trunc + 2) {
        let z0 = (n + l) as f64 / 2.0;
        if (zeta - z0).norm() < 1e-3 {
            return Err(Error::IllPosed(format!(
                "ζ = {zeta} is within 1e-3 of the exceptional point {z0}"
            )));
        }
    }
    Ok(())
}

/// Least-squares fit of u/x^{n−ζ} against F_J and x^{2ζ−n}G_J.
pub fn extract_connection(sol: &ModeSolution, model: &BranchModel) -> Result<ConnectionPair> {
    check_conditioning(model.n, model.zeta, model.expansion.trunc)?;
    let m = sol.xs.len();
    let mut a = DMatrix::<Complex64>::zeros(m, 2);
    let mut rhs = DVector::<Complex64>::zeros(m);
    for (i, &x) in sol.xs.iter().enumerate() {
        let w = Complex64::new(x, 0.0).powc(-model.reflected());
        a[(i, 0)] = model.f_branch(x) * w;
        a[(i, 1)] = model.g_branch(x) * w;
        rhs[i] = sol.u[i] * w;
    }
    let scale: Vec<f64> = (0..2).map(|j| a.column(j).norm()).collect();
    if scale.iter().any(|s| *s == 0.0 || !s.is_finite()) {
        return Err(Error::IllPosed("degenerate branch column".into()));
    }
    for (j, s) in scale.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let condition = sv.max() / sv.min();
    if !condition.is_finite() || condition > 1e12 {
        return Err(Error::IllPosed(format!("fit condition number {condition:.3e}")));
    }
    let coef = svd.solve(&rhs, 0.0).map_err(|e| Error::Numerical(e.to_string()))?;
    let residual = (&a * &coef - &rhs).norm() / rhs.norm();
    Ok(ConnectionPair {
        a: coef[0] / scale[0],
        b: coef[1] / scale[1],
        condition,
        residual,
    })
}

/// b/a for the solution decaying at infinity on a metric that is h0 beyond x_max.
/// At q = 0 the data is the pure x^{n−ζ} branch.
pub fn numeric_connection(p: &ModeProblem) -> Result<ConnectionPair> {
    let model = BranchModel::new(p)?;
    let init = if p.q2() == 0.0 {
        InitialData::Power(model.reflected())
    } else {
        InitialData::DecayingBessel
    };
    let sol = solve_mode_ode(p, &init)?;
    extract_connection(&sol, &model)
}

pub fn numeric_scattering(p: &ModeProblem) -> Result<ScatteringValue> {
    let pair = numeric_connection(p)?;
    Ok(ScatteringValue {
        mode: p.xi.clone(),
        zeta: p.zeta,
        value: ScalarValue::Float(pair.ratio()),
        provenance: Provenance::Numeric,
    })
}
