//! Single Runge–Kutta steps with continuous extensions.

use crate::types::ComplexNumber;

type C = ComplexNumber;

/// Right-hand side of the pole ODE with frozen seabed regions.
pub(crate) trait VectorField {
    /// Writes `dz/dt` into `out`; on a collision returns the pair and its separation.
    fn eval(&mut self, y: &[C], out: &mut [C]) -> Result<(), (usize, usize, f64)>;
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Continuous extension of one accepted step over `[t0, t0 + h]`.
#[derive(Debug, Clone)]
pub(crate) enum Dense {
    /// Dormand–Prince 4th-order interpolant.
    Dopri {
        y0: Vec<C>,
        r2: Vec<C>,
        r3: Vec<C>,
        r4: Vec<C>,
        r5: Vec<C>,
    },
    /// Cubic Hermite interpolant from end values and slopes.
    Hermite {
        y0: Vec<C>,
        y1: Vec<C>,
        hf0: Vec<C>,
        hf1: Vec<C>,
    },
}

impl Dense {
    /// State at fraction `theta` of the step.
    pub(crate) fn eval(&self, theta: f64, out: &mut Vec<C>) {
        out.clear();
        match self {
            Dense::Dopri { y0, r2, r3, r4, r5 } => {
                let t1 = 1.0 - theta;
                for i in 0..y0.len() {
                    out.push(y0[i] + (r2[i] + (r3[i] + (r4[i] + r5[i] * t1) * theta) * t1) * theta);
                }
            }
            Dense::Hermite { y0, y1, hf0, hf1 } => {
                let t2 = theta * theta;
                let t3 = t2 * theta;
                let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
                let h10 = t3 - 2.0 * t2 + theta;
                let h01 = -2.0 * t3 + 3.0 * t2;
                let h11 = t3 - t2;
                for i in 0..y0.len() {
                    out.push(y0[i] * h00 + hf0[i] * h10 + y1[i] * h01 + hf1[i] * h11);
                }
            }
        }
    }
}

pub(crate) enum StepResult {
    Accepted {
        y1: Vec<C>,
        f1: Vec<C>,
        err: f64,
        dense: Dense,
    },
    Rejected {
        err: f64,
    },
    Collision {
        pair: (usize, usize),
        separation: f64,
    },
}

fn combine(y0: &[C], h: f64, terms: &[(f64, &[C])], out: &mut Vec<C>) {
    out.clear();
    for i in 0..y0.len() {
        let mut acc = C::new(0.0, 0.0);
        for (coef, k) in terms {
            acc += k[i] * *coef;
        }
        out.push(y0[i] + acc * h);
    }
}

macro_rules! stage {
    ($sys:expr, $y:expr, $k:expr) => {
        if let Err((i, j, d)) = $sys.eval($y, $k) {
            return StepResult::Collision {
                pair: (i, j),
                separation: d,
            };
        }
    };
}

/// Scaled RMS norm of an error vector, complex components counted as two reals.
pub(crate) fn error_norm(err: &[C], y0: &[C], y1: &[C], rtol: f64, atol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..err.len() {
        let sre = atol + rtol * y0[i].re.abs().max(y1[i].re.abs());
        let sim = atol + rtol * y0[i].im.abs().max(y1[i].im.abs());
        acc += (err[i].re / sre).powi(2) + (err[i].im / sim).powi(2);
    }
    (acc / (2 * err.len()).max(1) as f64).sqrt()
}

pub(crate) fn dopri_step<F: VectorField>(
    sys: &mut F,
    y0: &[C],
    f0: &[C],
    h: f64,
    rtol: f64,
    atol: f64,
) -> StepResult {
    let n = y0.len();
    let zero = vec![C::new(0.0, 0.0); n];
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) = (
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero.clone(),
        zero,
    );
    let mut ys = Vec::with_capacity(n);

    combine(y0, h, &[(A21, f0)], &mut ys);
    stage!(sys, &ys, &mut k2);
    combine(y0, h, &[(A31, f0), (A32, &k2)], &mut ys);
    stage!(sys, &ys, &mut k3);
    combine(y0, h, &[(A41, f0), (A42, &k2), (A43, &k3)], &mut ys);
    stage!(sys, &ys, &mut k4);
    combine(
        y0,
        h,
        &[(A51, f0), (A52, &k2), (A53, &k3), (A54, &k4)],
        &mut ys,
    );
    stage!(sys, &ys, &mut k5);
    combine(
        y0,
        h,
        &[(A61, f0), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        &mut ys,
    );
    stage!(sys, &ys, &mut k6);
    let mut y1 = Vec::with_capacity(n);
    combine(
        y0,
        h,
        &[(A71, f0), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        &mut y1,
    );
    stage!(sys, &y1, &mut k7);

    let err_vec: Vec<C> = (0..n)
        .map(|i| (f0[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h)
        .collect();
    let err = error_norm(&err_vec, y0, &y1, rtol, atol);
    if !(err <= 1.0) {
        return StepResult::Rejected {
            err: if err.is_nan() { f64::INFINITY } else { err },
        };
    }

    let r2: Vec<C> = (0..n).map(|i| y1[i] - y0[i]).collect();
    let r3: Vec<C> = (0..n).map(|i| f0[i] * h - r2[i]).collect();
    let r4: Vec<C> = (0..n).map(|i| r2[i] - k7[i] * h - r3[i]).collect();
    let r5: Vec<C> = (0..n)
        .map(|i| (f0[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h)
        .collect();
    StepResult::Accepted {
        dense: Dense::Dopri {
            y0: y0.to_vec(),
            r2,
            r3,
            r4,
            r5,
        },
        y1,
        f1: k7,
        err,
    }
}

/// Classical fourth-order Runge–Kutta step (no error control).
pub(crate) fn rk4_step<F: VectorField>(sys: &mut F, y0: &[C], f0: &[C], h: f64) -> StepResult {
    let n = y0.len();
    let zero = vec![C::new(0.0, 0.0); n];
    let (mut k2, mut k3, mut k4, mut f1) = (zero.clone(), zero.clone(), zero.clone(), zero);
    let mut ys = Vec::with_capacity(n);
    combine(y0, h, &[(0.5, f0)], &mut ys);
    stage!(sys, &ys, &mut k2);
    combine(y0, h, &[(0.5, &k2)], &mut ys);
    stage!(sys, &ys, &mut k3);
    combine(y0, h, &[(1.0, &k3)], &mut ys);
    stage!(sys, &ys, &mut k4);
    let mut y1 = Vec::with_capacity(n);
    combine(
        y0,
        h,
        &[
            (1.0 / 6.0, f0),
            (1.0 / 3.0, &k2),
            (1.0 / 3.0, &k3),
            (1.0 / 6.0, &k4),
        ],
        &mut y1,
    );
    stage!(sys, &y1, &mut f1);
    StepResult::Accepted {
        dense: Dense::Hermite {
            y0: y0.to_vec(),
            y1: y1.clone(),
            hf0: f0.iter().map(|f| f * h).collect(),
            hf1: f1.iter().map(|f| f * h).collect(),
        },
        y1,
        f1,
        err: 0.0,
    }
}
