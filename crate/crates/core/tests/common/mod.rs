//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the algorithms under test except for plain data
//! types; every oracle is written from the underlying formulas.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use svhe_core::MachineParams;

pub fn sind(x: f64) -> f64 {
    x.to_radians().sin()
}

pub fn cosd(x: f64) -> f64 {
    x.to_radians().cos()
}

/// Synchronous-frame error-voltage constants of one sample.
#[derive(Debug, Clone, Copy)]
pub struct RippleConstants {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub t0: f64,
    pub t1: f64,
    pub t2: f64,
}

impl RippleConstants {
    /// `v` is the active vector length, `ts` the subcycle.
    pub fn new(m: f64, alpha: f64, v: f64, ts: f64) -> Self {
        let v_ref = 3f64.sqrt() / 2.0 * m * v;
        let t1 = m * sind(60.0 - alpha) * ts;
        let t2 = m * sind(alpha) * ts;
        Self {
            k1: -v_ref,
            k2: v * cosd(alpha),
            k3: v * cosd(60.0 - alpha),
            t0: ts - t1 - t2,
            t1,
            t2,
        }
    }

    fn k4(&self) -> f64 {
        self.k2 + self.k1
    }

    fn k5(&self) -> f64 {
        self.k3 + self.k1
    }

    fn k6(&self) -> f64 {
        self.k3 - self.k2
    }
}

/// Closed-form q-ripple of the first SVHE sample (`0121`), `0 <= t <= ts`.
pub fn svhe_first_sample_psi_q(c: &RippleConstants, k: f64, t: f64) -> f64 {
    let ts = c.t0 + c.t1 + c.t2;
    if t <= c.t0 {
        c.k1 * t
    } else if t <= c.t0 + k * c.t1 {
        c.k4() * t - c.k2 * c.t0
    } else if t <= ts - (1.0 - k) * c.t1 {
        c.k2 * k * c.t1 + c.k5() * t - c.k3 * (c.t0 + k * c.t1)
    } else {
        c.k4() * (t - c.t2) - c.k2 * c.t0 + c.k5() * c.t2
    }
}

/// Closed-form q-ripple of the second SVHE sample (`7212`), `ts <= t <= 2 ts`.
pub fn svhe_second_sample_psi_q(c: &RippleConstants, k: f64, t: f64) -> f64 {
    let ts = c.t0 + c.t1 + c.t2;
    let t7 = c.t0;
    if t <= ts + t7 {
        c.k1 * (t - ts)
    } else if t <= ts + t7 + (1.0 - k) * c.t2 {
        c.k5() * (t - ts) - c.k3 * t7
    } else if t <= 2.0 * ts - k * c.t2 {
        c.k6() * (t7 + (1.0 - k) * c.t2) - c.k3 * t7 + c.k4() * (t - ts)
    } else {
        c.k5() * (t - ts - c.t1) - c.k3 * t7 + c.k4() * c.t1
    }
}

/// Breakpoints of the first SVHE sample.
pub fn svhe_first_sample_breaks(c: &RippleConstants, k: f64) -> [f64; 5] {
    let ts = c.t0 + c.t1 + c.t2;
    [0.0, c.t0, c.t0 + k * c.t1, ts - (1.0 - k) * c.t1, ts]
}

/// Breakpoints of the second SVHE sample, absolute time.
pub fn svhe_second_sample_breaks(c: &RippleConstants, k: f64) -> [f64; 5] {
    let ts = c.t0 + c.t1 + c.t2;
    [
        ts,
        ts + c.t0,
        ts + c.t0 + (1.0 - k) * c.t2,
        2.0 * ts - k * c.t2,
        2.0 * ts,
    ]
}

/// `n`-th complex Fourier coefficient of `f` over `[0, period)` by the
/// trapezoid rule with `samples` points.
pub fn trapezoid_coefficient(
    f: impl Fn(f64) -> f64,
    period: f64,
    n: u32,
    samples: usize,
) -> Complex64 {
    let h = period / samples as f64;
    let w = 2.0 * PI * f64::from(n) / period;
    let mut acc = Complex64::new(0.0, 0.0);
    // periodic integrand: the trapezoid rule reduces to a plain sum
    for i in 0..samples {
        let t = i as f64 * h;
        acc += Complex64::from_polar(f(t), -w * t);
    }
    acc * h / period
}

/// Stator impedance seen by a voltage phasor at signed angular frequency
/// `omega` when the rotor turns at electrical speed `omega_r`.
pub fn stator_impedance(machine: &MachineParams, omega: f64, omega_r: f64) -> Complex64 {
    let l_m = machine.l_o;
    let l_s = l_m * (1.0 + machine.sigma_s);
    let l_r = l_m * (1.0 + machine.sigma_r);
    let j = Complex64::new(0.0, 1.0);
    let slip = omega - omega_r;
    // rotor: j·slip·(Lm·is + Lr·ir) = -Rr·ir
    let ir_per_is = -(j * slip * l_m) / (machine.r_r + j * slip * l_r);
    machine.r_s + j * omega * (l_s + l_m * ir_per_is)
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Linear interpolation of sorted `(t, y)` points.
pub fn interpolate(points: &[(f64, f64)], t: f64) -> f64 {
    let i = points.partition_point(|p| p.0 <= t);
    if i == 0 {
        return points[0].1;
    }
    if i == points.len() {
        return points[points.len() - 1].1;
    }
    let (t0, y0) = points[i - 1];
    let (t1, y1) = points[i];
    if t1 == t0 {
        return y1;
    }
    y0 + (y1 - y0) * (t - t0) / (t1 - t0)
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}
