//! Test-only oracles, written independently of the production stepping path.

#![allow(dead_code)]

use std::f64::consts::PI;

pub const PHI0: f64 = 2.067833848e-15;

/// Physical parameters of one SQUID as seen by the continuous equation.
#[derive(Clone, Copy, Debug)]
pub struct Model {
    pub alpha: f64,
    pub c: f64,
    pub bias: f64,
    pub eps: f64,
    pub zeta: f64,
    pub r: f64,
    /// L_g I_0 / Phi_0
    pub screening: f64,
}

impl Model {
    pub fn new(r_eff: f64, i_plus: f64, cap: f64, l_g: f64, nu: f64, eps: f64, bias: f64) -> Self {
        Model {
            alpha: i_plus * r_eff / (PHI0 * nu),
            c: 2.0 * PI * r_eff * cap * nu,
            bias,
            eps,
            zeta: 0.0,
            r: 0.0,
            screening: l_g * i_plus / 2.0 / PHI0,
        }
    }

    /// Screened flux by bisection on the monotone residual.
    pub fn flux(&self, phase: f64, tau: f64) -> f64 {
        let ext = 0.5 * (1.0 + self.zeta) * (1.0 - self.eps * tau.cos());
        if self.screening == 0.0 {
            return ext;
        }
        let g = |x: f64| x - ext + self.screening * (PI * x).sin() * phase.cos();
        let (mut lo, mut hi) = (ext - self.screening - 1e-9, ext + self.screening + 1e-9);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    fn current(&self, phase: f64, tau: f64) -> f64 {
        let x = PI * self.flux(phase, tau);
        x.cos() * phase.sin() + self.r * x.sin() * phase.cos()
    }

    fn rhs(&self, tau: f64, y: [f64; 2]) -> [f64; 2] {
        let drive = self.alpha * (self.current(y[0], tau) - self.bias);
        if self.c == 0.0 {
            [-drive, 0.0]
        } else {
            [y[1], (-y[1] - drive) / self.c]
        }
    }

    /// Phase at each of `checkpoints` (increasing, starting after 0) from
    /// phi(0) = 0 at rest, by adaptive Dormand-Prince 5(4).
    pub fn reference_phase(&self, checkpoints: &[f64], tol: f64) -> Vec<f64> {
        let mut y = [0.0, 0.0];
        let mut t = 0.0;
        let mut h: f64 = 1e-5;
        let mut out = Vec::with_capacity(checkpoints.len());
        for &target in checkpoints {
            while t < target {
                let step = h.min(target - t);
                let (next, err) = dopri_step(self, t, y, step);
                let scale = tol * (1.0 + y[0].abs().max(next[0].abs()));
                let ratio = err / scale;
                if ratio <= 1.0 {
                    t += step;
                    y = next;
                    if target - t < 1e-14 {
                        t = target;
                    }
                }
                let factor = if ratio == 0.0 {
                    5.0
                } else {
                    (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
                };
                h = step * factor;
            }
            out.push(y[0]);
        }
        out
    }
}

fn dopri_step(m: &Model, t: f64, y: [f64; 2], h: f64) -> ([f64; 2], f64) {
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
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let mut k = [[0.0; 2]; 7];
    for s in 0..7 {
        let mut ys = y;
        for (j, kj) in k.iter().enumerate().take(s) {
            ys[0] += h * A[s][j] * kj[0];
            ys[1] += h * A[s][j] * kj[1];
        }
        k[s] = m.rhs(t + C[s] * h, ys);
    }
    let mut y5 = y;
    let mut y4 = y;
    for s in 0..7 {
        y5[0] += h * B5[s] * k[s][0];
        y5[1] += h * B5[s] * k[s][1];
        y4[0] += h * B4[s] * k[s][0];
        y4[1] += h * B4[s] * k[s][1];
    }
    let err = (y5[0] - y4[0]).abs().max(if m.c == 0.0 {
        0.0
    } else {
        m.c * (y5[1] - y4[1]).abs()
    });
    (y5, err)
}

/// Root of `g` on `[lo, hi]` by bisection; `g(lo)` and `g(hi)` must differ in sign.
pub fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let glo = g(lo);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) == (glo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub const NB_R_EFF: f64 = 1000.0 / 1050.0;
