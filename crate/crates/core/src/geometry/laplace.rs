//! Δ_{h(x)}, Tr_h(∂_x h) and the Laplacian of (dx² + h(x))/x².
//!
//! All operators use the positive sign convention, so the flat torus
//! Laplacian acts on e^{iξ·y} by ξ·h0⁻¹ξ.

use super::metric::MetricExpansion;
use super::operator::DifferentialOperatorSeries;
use crate::algebra::{rat, BoundaryFunction, GaussianRational, Scalar};
use crate::error::Result;
use crate::series::{PhgMatrix, PhgSeries};

pub type Op = DifferentialOperatorSeries<GaussianRational>;
type Ser = PhgSeries<GaussianRational>;

fn unit(n: usize, i: usize) -> Vec<usize> {
    let mut e = vec![0; n];
    e[i] += 1;
    e
}

fn pair(n: usize, i: usize, j: usize) -> Vec<usize> {
    let mut e = unit(n, i);
    e[j] += 1;
    e
}

fn constant(n: usize, v: GaussianRational, trunc: usize) -> Ser {
    Ser::constant(BoundaryFunction::constant(n, v), trunc)
}

/// Tr(A·B) for two series matrices.
fn trace_product(a: &PhgMatrix<GaussianRational>, b: &PhgMatrix<GaussianRational>, trunc: usize) -> Result<Ser> {
    let n = a.size();
    let mut acc = Ser::zero(a.get(0, 0).dim(), trunc);
    for i in 0..n {
        for k in 0..n {
            acc = acc.add(&a.get(i, k).mul(b.get(k, i), trunc)?)?;
        }
    }
    Ok(acc)
}

/// τ = x Tr_h(∂_x h) = Tr(h⁻¹ x∂_x h). Has no order-zero term.
pub fn tau(g: &MetricExpansion, trunc: usize) -> Result<Ser> {
    let h = g.h_matrix(trunc);
    let hinv = h.invert(trunc)?;
    let dh = h.map(|e| e.euler())?;
    trace_product(&hinv, &dh, trunc)
}

/// Tr_h(∂_x h) = Tr(h⁻¹ ∂_x h), exact through x^trunc.
pub fn trace_dxh(g: &MetricExpansion, trunc: usize) -> Result<Ser> {
    tau(g, trunc + 1)?.unshift(1)
}

/// Δ_{h(x)} = −|h|^{−1/2} ∂_i (|h|^{1/2} h^{ij} ∂_j) as a y-operator.
pub fn laplace_h(g: &MetricExpansion, trunc: usize) -> Result<Op> {
    let n = g.n();
    let hinv = g.h_inverse(trunc)?;
    let ell = g.log_det(trunc)?;
    let half = GaussianRational::from_rational(&rat(-1, 2));
    let mut op = Op::new(n, trunc);
    for i in 0..n {
        for j in i..n {
            let c = hinv.get(i, j).neg();
            let c = if i == j {
                c
            } else {
                c.scale(&GaussianRational::from_int(2))
            };
            op.insert(0, pair(n, i, j), c)?;
        }
    }
    for j in 0..n {
        let mut c = Ser::zero(n, trunc);
        for i in 0..n {
            c = c.sub(&hinv.get(i, j).partial(i))?;
            c = c.add(&hinv.get(i, j).mul(&ell.partial(i), trunc)?.scale(&half))?;
        }
        op.insert(0, unit(n, j), c)?;
    }
    Ok(op)
}

/// Δ_g = −(x∂_x)² + (n − τ/2) x∂_x + x²Δ_h.
pub fn laplacian(g: &MetricExpansion, trunc: usize) -> Result<Op> {
    let n = g.n();
    let t = tau(g, trunc)?;
    let mut op = Op::new(n, trunc);
    op.insert(2, vec![0; n], constant(n, GaussianRational::from_int(-1), trunc))?;
    let c1 = constant(n, GaussianRational::from_int(n as i64), trunc)
        .sub(&t.scale(&GaussianRational::from_rational(&rat(1, 2))))?;
    op.insert(1, vec![0; n], c1)?;
    let lh = laplace_h(g, trunc.saturating_sub(2))?.shift(2);
    op.add(&lh).map(|o| o.truncate(trunc))
}

/// δ^{1/4} Δ_g δ^{−1/4} with δ = det h / x^{2(n+1)}, in closed form:
///
/// −(x∂)² − x∂ + c0 + x²(−h^{ij}∂_i∂_j − (∂_i h^{ij})∂_j + V),
///
/// c0 = (x∂τ)/4 − nτ/4 + τ²/16 + (n²−1)/4, V = −∂_i(h^{ij}ψ_j) + h^{ij}ψ_iψ_j,
/// ψ = −¼ dℓ, ℓ = ln det h.
pub fn half_density_conjugate(g: &MetricExpansion, trunc: usize) -> Result<Op> {
    let n = g.n();
    let nn = n as i64;
    let q = |a: i64, b: i64| GaussianRational::from_rational(&rat(a, b));
    let t = tau(g, trunc)?;
    let mut op = Op::new(n, trunc);
    op.insert(2, vec![0; n], constant(n, q(-1, 1), trunc))?;
    op.insert(1, vec![0; n], constant(n, q(-1, 1), trunc))?;
    let c0 = t
        .euler()?
        .scale(&q(1, 4))
        .sub(&t.scale(&q(nn, 4)))?
        .add(&t.mul(&t, trunc)?.scale(&q(1, 16)))?
        .add(&constant(n, q(nn * nn - 1, 4), trunc))?;
    op.insert(0, vec![0; n], c0)?;

    let yt = trunc.saturating_sub(2);
    let hinv = g.h_inverse(yt)?;
    let mut y = Op::new(n, yt);
    for i in 0..n {
        for j in i..n {
            let c = hinv.get(i, j).neg();
            let c = if i == j { c } else { c.scale(&q(2, 1)) };
            y.insert(0, pair(n, i, j), c)?;
        }
        let mut first = Ser::zero(n, yt);
        for k in 0..n {
            first = first.sub(&hinv.get(k, i).partial(k))?;
        }
        y.insert(0, unit(n, i), first)?;
    }
    y.insert(0, vec![0; n], half_density_potential(g, yt)?)?;
    op.add(&y.shift(2)).map(|o| o.truncate(trunc))
}

/// V = −∂_i(h^{ij}ψ_j) + h^{ij}ψ_iψ_j with ψ = −¼ dℓ; zero for y-independent h.
pub fn half_density_potential(g: &MetricExpansion, trunc: usize) -> Result<Ser> {
    let n = g.n();
    let hinv = g.h_inverse(trunc)?;
    let ell = g.log_det(trunc)?;
    let quarter = GaussianRational::from_rational(&rat(-1, 4));
    let psi: Vec<Ser> = (0..n).map(|i| ell.partial(i).scale(&quarter)).collect();
    let mut v = Ser::zero(n, trunc);
    for i in 0..n {
        for j in 0..n {
            let hp = hinv.get(i, j).mul(&psi[j], trunc)?;
            v = v.sub(&hp.partial(i))?;
            v = v.add(&hp.mul(&psi[i], trunc)?)?;
        }
    }
    Ok(v)
}

/// The same conjugation computed by substituting x∂ ↦ x∂ + (n+1)/2 − τ/4 and
/// ∂_j ↦ ∂_j − ¼∂_jℓ into Δ_g term by term.
pub fn half_density_conjugate_by_substitution(g: &MetricExpansion, trunc: usize) -> Result<Op> {
    let n = g.n();
    let q = |a: i64, b: i64| GaussianRational::from_rational(&rat(a, b));
    let lap = laplacian(g, trunc)?;
    let t = tau(g, trunc)?;
    let s = constant(n, q(n as i64 + 1, 2), trunc).sub(&t.scale(&q(1, 4)))?;
    let ell = g.log_det(trunc)?;
    let psi: Vec<Ser> = (0..n).map(|i| ell.partial(i).scale(&q(-1, 4))).collect();
    lap.conjugate(&s, &psi, trunc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{gr, int, BoundaryTensor, Rational};
    use crate::series::{BaseTag, LogCap};

    fn diag_tensor(d: &[i64]) -> BoundaryTensor<GaussianRational> {
        let n = d.len();
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { int(d[i]) } else { int(0) }).collect())
            .collect();
        BoundaryTensor::from_constant(&rows).unwrap()
    }

    fn cos_tensor(n: usize) -> BoundaryTensor<GaussianRational> {
        let mut e = vec![0; n];
        e[0] = 1;
        let mut m = e.clone();
        m[0] = -1;
        let cos = BoundaryFunction::from_terms(n, [(e, gr(1, 2)), (m, gr(1, 2))]);
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { cos.clone() } else { BoundaryFunction::zero(n) })
                    .collect()
            })
            .collect();
        BoundaryTensor::new(entries).unwrap()
    }

    #[test]
    fn tau_vanishes_for_constant_metric() {
        assert!(tau(&MetricExpansion::flat(3, 5), 5).unwrap().is_zero());
    }

    #[test]
    fn trace_dxh_of_x_squared_correction() {
        let h0 = vec![vec![int(2), int(1)], vec![int(1), int(2)]];
        let h2 = diag_tensor(&[3, 0]);
        let g = MetricExpansion::new(h0, vec![], 5)
            .unwrap()
            .with_correction(2, 0, h2)
            .unwrap();
        let t = trace_dxh(&g, 3).unwrap();
        // 2x Tr(h0⁻¹h2) = 2x · (2/3 · 3) = 4x
        assert_eq!(t.coefficient(1, 0).unwrap(), BoundaryFunction::constant(2, gr(4, 1)));
        assert!(t.coefficient(0, 0).unwrap().is_zero());
    }

    #[test]
    fn trace_dxh_of_log_correction() {
        let g = MetricExpansion::flat(2, 5)
            .with_correction(2, 1, diag_tensor(&[1, 1]))
            .unwrap();
        let t = trace_dxh(&g, 2).unwrap();
        // k x^{k-1} (ln x)^m Tr + m x^{k-1} (ln x)^{m-1} Tr with k=2, m=1, Tr=2
        assert_eq!(t.coefficient(1, 1).unwrap(), BoundaryFunction::constant(2, gr(4, 1)));
        assert_eq!(t.coefficient(1, 0).unwrap(), BoundaryFunction::constant(2, gr(2, 1)));
    }

    #[test]
    fn flat_laplace_h_is_fourier_multiplier() {
        let h0 = vec![vec![int(2), int(0)], vec![int(0), int(2)]];
        let g = MetricExpansion::new(h0, vec![], 3).unwrap();
        let op = laplace_h(&g, 3).unwrap();
        let f = BoundaryFunction::exponential(2, vec![2, 1], gr(1, 1));
        let u = PhgSeries::constant(f.clone(), 3);
        let out = op.apply(&u, 3).unwrap();
        assert_eq!(out, PhgSeries::constant(f.scale(&gr(5, 2)), 3));
    }

    #[test]
    fn laplace_h_first_correction_matches_coordinate_expansion() {
        // h = I + x² diag(a, b): h^{ii} = 1 − x² d_i, Δ_h = −Σ h^{ii}∂_i² at this order
        let g = MetricExpansion::flat(2, 4)
            .with_correction(2, 0, diag_tensor(&[3, -1]))
            .unwrap();
        let op = laplace_h(&g, 3).unwrap();
        assert_eq!(
            op.coefficient(0, &[2, 0]).coefficient(2, 0).unwrap(),
            BoundaryFunction::constant(2, gr(3, 1))
        );
        assert_eq!(
            op.coefficient(0, &[0, 2]).coefficient(2, 0).unwrap(),
            BoundaryFunction::constant(2, gr(-1, 1))
        );
        assert!(op.coefficient(0, &[1, 0]).is_zero());
    }

    #[test]
    fn hyperbolic_conjugation_on_one() {
        // h = I: the conjugated operator maps 1 to (n²−1)/4
        let g = MetricExpansion::flat(2, 4);
        let op = half_density_conjugate(&g, 4).unwrap();
        let out = op.apply(&PhgSeries::one(2, 4), 4).unwrap();
        assert_eq!(out, PhgSeries::constant(BoundaryFunction::constant(2, gr(3, 4)), 4));
    }

    #[test]
    fn closed_form_conjugation_matches_substitution() {
        for g in [
            MetricExpansion::flat(2, 5)
                .with_correction(2, 0, cos_tensor(2))
                .unwrap(),
            MetricExpansion::flat(2, 5)
                .with_correction(1, 1, diag_tensor(&[1, 2]))
                .unwrap(),
            MetricExpansion::flat(3, 5)
                .with_correction(2, 2, cos_tensor(3))
                .unwrap(),
        ] {
            let a = half_density_conjugate(&g, 5).unwrap();
            let b = half_density_conjugate_by_substitution(&g, 5).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn conjugated_laplacian_acts_through_the_density() {
        // compare with w Δ_g(w⁻¹ u) for w = (det h)^{1/4}, the x-power handled by a shift
        let g = MetricExpansion::flat(1, 5)
            .with_correction(2, 0, cos_tensor(1))
            .unwrap();
        let conj = half_density_conjugate(&g, 5).unwrap();
        let lap = laplacian(&g, 5).unwrap();
        let ell = g.log_det(5).unwrap();
        let w_inv = ell.scale(&gr(-1, 4)).exp(5).unwrap();
        let w = ell.scale(&gr(1, 4)).exp(5).unwrap();
        let f = BoundaryFunction::exponential(1, vec![1], gr(1, 1)).add(&BoundaryFunction::exponential(
            1,
            vec![-1],
            gr(1, 1),
        ));
        let u = PhgSeries::monomial(f, BaseTag::Zero, 1, 1, 5, LogCap::new(1, 1)).unwrap();
        // x^{(n+1)/2} factor: x∂ shifts by the constant s0 = (n+1)/2 = 1
        let s0 = PhgSeries::constant(BoundaryFunction::constant(1, gr(1, 1)), 5);
        let shifted = lap.conjugate(&s0, &[PhgSeries::zero(1, 5)], 5).unwrap();
        let rhs = w
            .mul(&shifted.apply(&w_inv.mul(&u, 5).unwrap(), 5).unwrap(), 5)
            .unwrap();
        assert_eq!(conj.apply(&u, 5).unwrap(), rhs);
    }
}
