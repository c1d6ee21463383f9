use std::f64::consts::PI;

use num::complex::Complex64;
use proptest::prelude::*;

use phgscat::algebra::{int, rat, BoundaryTensor, Rational};
use phgscat::geometry::{Correction, MetricExpansion};
use phgscat::numerics::bessel::bessel_k;
use phgscat::numerics::gamma::gamma;
use phgscat::numerics::{numeric_connection, solve_mode_ode, weighted_wronskian, InitialData, ModeProblem};
use phgscat::poisson::{scattering_symbol, ScalarValue};

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn symbol(n: usize, zeta: f64, q: f64) -> Complex64 {
    match scattering_symbol(n, c(zeta), q).unwrap() {
        ScalarValue::Float(v) => v,
        other => panic!("{other:?}"),
    }
}

fn diag(d: &[Rational]) -> Vec<Vec<Rational>> {
    (0..d.len())
        .map(|i| {
            (0..d.len())
                .map(|j| if i == j { d[i].clone() } else { int(0) })
                .collect()
        })
        .collect()
}

/// h = h0 + eps x² I.
fn radial(eps: Rational) -> MetricExpansion {
    let tensor = BoundaryTensor::from_constant(&diag(&[eps.clone(), eps])).unwrap();
    MetricExpansion::new(diag(&[int(1), int(1)]), vec![Correction { j: 2, l: 0, tensor }], 8).unwrap()
}

#[test]
fn anisotropic_boundary_metric_rescales_the_frequency() {
    // h0 = diag(4, 1) and ξ = (2, 0) give q = 1
    let g = MetricExpansion::new(diag(&[int(4), int(1)]), vec![], 8).unwrap();
    let p = ModeProblem::new(g, vec![2, 0], c(1.3)).unwrap();
    assert!((p.q() - 1.0).abs() < 1e-15);
    let v = numeric_connection(&p).unwrap().ratio();
    let s = symbol(2, 1.3, 1.0);
    assert!((v - s).norm() < 1e-6 * s.norm(), "{v} vs {s}");
}

#[test]
fn radial_perturbation_is_window_independent() {
    let mut p = ModeProblem::new(radial(rat(1, 3)), vec![1, 0], c(1.35)).unwrap();
    let full = numeric_connection(&p).unwrap();
    assert!(full.residual < 1e-8, "{}", full.residual);
    p.fit_window = (2e-4, 4e-3);
    let narrow = numeric_connection(&p).unwrap();
    assert!((full.ratio() - narrow.ratio()).norm() < 1e-6 * full.ratio().norm());
}

#[test]
fn radial_perturbation_is_first_order_in_eps() {
    let flat = symbol(2, 1.35, 1.0);
    let shift = |eps: Rational| {
        let p = ModeProblem::new(radial(eps), vec![1, 0], c(1.35)).unwrap();
        (numeric_connection(&p).unwrap().ratio() - flat).norm()
    };
    let (d1, d2) = (shift(rat(1, 50)), shift(rat(1, 100)));
    assert!(d1 > 1e-5, "perturbation has no effect: {d1}");
    let ratio = d1 / d2;
    assert!((ratio - 2.0).abs() < 0.1, "shift ratio {ratio}");
}

#[test]
fn wronskian_is_constant_on_a_perturbed_metric() {
    let p = ModeProblem::new(radial(rat(1, 2)), vec![0, 1], c(1.2)).unwrap();
    let a = solve_mode_ode(&p, &InitialData::DecayingBessel).unwrap();
    let b = solve_mode_ode(&p, &InitialData::Power(c(0.8))).unwrap();
    let w = weighted_wronskian(&p, &a, &b).unwrap();
    let w0 = w[0];
    assert!(w0.norm() > 0.0);
    for wi in &w {
        assert!((wi - w0).norm() < 1e-8 * w0.norm(), "{wi} vs {w0}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bessel_k_three_term_recurrence(nu in -2.3f64..2.3, im in -0.5f64..0.5, z in 0.05f64..30.0) {
        let nu = Complex64::new(nu, im);
        let one = c(1.0);
        let lhs = bessel_k(nu + one, z).unwrap() - bessel_k(nu - one, z).unwrap();
        let rhs = bessel_k(nu, z).unwrap() * nu * 2.0 / z;
        prop_assert!((lhs - rhs).norm() <= 1e-8 * (lhs.norm() + rhs.norm() + 1e-300), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn gamma_reflection(re in -3.7f64..3.7, im in -2.0f64..2.0) {
        let z = Complex64::new(re, im);
        prop_assume!((z - z.re.round()).norm() > 1e-3);
        let lhs = gamma(z) * gamma(c(1.0) - z);
        let rhs = PI / (z * PI).sin();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm(), "{} vs {}", lhs, rhs);
    }
}
