//! Dormand–Prince 5(4) for a complex two-component system.

use num::complex::Complex64;

use crate::error::{Error, Result};

pub type State = [Complex64; 2];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-12,
            atol: 1e-300,
            h_init: 1e-3,
            h_min: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn axpy(y: &State, h: f64, ks: &[State], coef: &[f64]) -> State {
    let mut out = *y;
    for (k, c) in ks.iter().zip(coef) {
        if *c != 0.0 {
            out[0] += h * c * k[0];
            out[1] += h * c * k[1];
        }
    }
    out
}

/// One step; returns the fifth-order update and the embedded error estimate.
fn step<F: Fn(f64, &State) -> State>(f: &F, t: f64, y: &State, h: f64) -> (State, State) {
    let mut k: [State; 7] = [[Complex64::new(0.0, 0.0); 2]; 7];
    k[0] = f(t, y);
    for s in 1..7 {
        let ys = axpy(y, h, &k[..s], &A[s][..s]);
        k[s] = f(t + C[s] * h, &ys);
    }
    let y5 = axpy(y, h, &k, &B);
    let err = axpy(&[Complex64::new(0.0, 0.0); 2], h, &k, &E);
    (y5, err)
}

fn check_finite(y: &State, t: f64) -> Result<()> {
    if y.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numerical(format!("non-finite state at t = {t}")))
    }
}

/// Adaptive integration from (t0, y0), reporting the state at each point of
/// `ts`, which must be monotone in the direction of integration. Returns the
/// states and the number of accepted steps.
pub fn integrate<F: Fn(f64, &State) -> State>(
    f: F,
    t0: f64,
    y0: State,
    ts: &[f64],
    opts: &OdeOptions,
) -> Result<(Vec<State>, usize)> {
    let mut out = Vec::with_capacity(ts.len());
    let (mut t, mut y) = (t0, y0);
    let mut h = opts.h_init;
    let mut steps = 0usize;
    for &target in ts {
        let dir = (target - t).signum();
        while (target - t).abs() > 1e-14 * target.abs().max(1.0) {
            if steps >= opts.max_steps {
                return Err(Error::Numerical("step budget exhausted".into()));
            }
            let mut hs = h.min((target - t).abs());
            loop {
                if hs < opts.h_min {
                    return Err(Error::Numerical(format!("step size underflow at t = {t}")));
                }
                let (y5, err) = step(&f, t, &y, dir * hs);
                let mut en = 0.0f64;
                for i in 0..2 {
                    let sc = opts.atol + opts.rtol * y[i].norm().max(y5[i].norm());
                    en = en.max(err[i].norm() / sc);
                }
                if en <= 1.0 {
                    let last = hs >= (target - t).abs();
                    t = if last { target } else { t + dir * hs };
                    y = y5;
                    check_finite(&y, t)?;
                    steps += 1;
                    let grow = if en == 0.0 {
                        5.0
                    } else {
                        (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    if !last || grow < 1.0 {
                        h = hs * grow;
                    }
                    break;
                }
                hs *= (0.9 * en.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
        out.push(y);
    }
    Ok((out, steps))
}

/// Fixed-step integration with `n` equal steps from t0 to t1.
pub fn integrate_fixed<F: Fn(f64, &State) -> State>(f: F, t0: f64, y0: State, t1: f64, n: usize) -> Result<State> {
    let h = (t1 - t0) / n as f64;
    let mut y = y0;
    for i in 0..n {
        let t = t0 + i as f64 * h;
        y = step(&f, t, &y, h).0;
        check_finite(&y, t)?;
    }
    Ok(y)
}
