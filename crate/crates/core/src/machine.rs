//! No-load induction machine driven by a three-phase voltage source.
//!
//! Two-axis model in the stationary frame with stator and rotor flux linkage
//! as state and the rotor held at synchronous speed. Integration is
//! fourth-order Runge-Kutta with substeps that never straddle a switching
//! instant of the source.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonic::{spectrum_linear, thd, SpectrumResult, Thd};
use crate::ripple::{peak_to_peak, MachineParams};
use crate::svpwm::ThreePhaseWaveform;
use crate::waveform::PiecewiseLinear;

/// `e^{j2π/3}`
fn rot120() -> Complex64 {
    Complex64::new(-0.5, crate::svpwm::SIN_60)
}

/// Amplitude-invariant Clarke transform of phase voltages.
pub fn clarke(va: f64, vb: f64, vc: f64) -> Complex64 {
    let a = rot120();
    (Complex64::new(va, 0.0) + a * vb + a * a * vc) * (2.0 / 3.0)
}

/// Phase quantities from a stationary-frame space vector.
pub fn inverse_clarke(x: Complex64) -> [f64; 3] {
    let a = rot120();
    [x.re, (x * a.conj()).re, (x * a).re]
}

/// A periodic supply split into intervals on which it is smooth.
pub trait VoltageSource {
    fn period(&self) -> f64;

    /// `(start, duration)` pairs tiling one period.
    fn intervals(&self) -> Vec<(f64, f64)>;

    /// Stator voltage space vector inside `interval` at time `t` (seconds
    /// from the start of the period).
    fn space_vector(&self, interval: usize, t: f64) -> Complex64;

    /// True when the voltage does not vary inside an interval.
    fn piecewise_constant(&self) -> bool {
        false
    }
}

impl VoltageSource for ThreePhaseWaveform {
    fn period(&self) -> f64 {
        ThreePhaseWaveform::period(self)
    }

    fn intervals(&self) -> Vec<(f64, f64)> {
        self.slots().iter().map(|s| (s.start, s.duration)).collect()
    }

    fn space_vector(&self, interval: usize, _t: f64) -> Complex64 {
        let sw = self.slots()[interval].vector.switch_state();
        let pole = sw.map(|s| (f64::from(s) - 0.5) * self.v_dc());
        // isolated star point: subtract the common-mode voltage
        let cm = (pole[0] + pole[1] + pole[2]) / 3.0;
        clarke(pole[0] - cm, pole[1] - cm, pole[2] - cm)
    }

    fn piecewise_constant(&self) -> bool {
        true
    }
}

/// Balanced sinusoidal phase voltages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidalSupply {
    /// Peak phase voltage.
    pub amplitude: f64,
    pub frequency: f64,
    /// Number of equal integration intervals per period.
    pub pieces: usize,
}

impl VoltageSource for SinusoidalSupply {
    fn period(&self) -> f64 {
        1.0 / self.frequency
    }

    fn intervals(&self) -> Vec<(f64, f64)> {
        let d = self.period() / self.pieces as f64;
        (0..self.pieces).map(|i| (i as f64 * d, d)).collect()
    }

    fn space_vector(&self, _interval: usize, t: f64) -> Complex64 {
        Complex64::from_polar(self.amplitude, 2.0 * PI * self.frequency * t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialState {
    /// Start on the periodic orbit of the discretised model.
    #[default]
    PeriodicSteadyState,
    /// Start from zero flux linkage.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Largest integration step, s.
    pub dt: f64,
    /// Every source interval is split into at least this many substeps.
    pub min_substeps: usize,
    pub n_settle_cycles: usize,
    pub n_measure_cycles: usize,
    pub initial: InitialState,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 2e-6,
            min_substeps: 20,
            n_settle_cycles: 10,
            n_measure_cycles: 1,
            initial: InitialState::PeriodicSteadyState,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::domain("dt", self.dt, "> 0"));
        }
        if self.min_substeps == 0 {
            return Err(Error::domain("min_substeps", 0.0, ">= 1"));
        }
        if self.n_measure_cycles == 0 {
            return Err(Error::domain("n_measure_cycles", 0.0, ">= 1"));
        }
        if self.initial == InitialState::Zero && self.n_settle_cycles == 0 {
            return Err(Error::domain(
                "n_settle_cycles",
                0.0,
                ">= 1 from a zero start",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSample {
    pub t: f64,
    pub ia: f64,
    pub ib: f64,
    pub ic: f64,
    pub torque: f64,
}

/// Recorded measurement window of a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// Samples at every integration step of the measurement cycles.
    pub samples: Vec<SimSample>,
    pub period: f64,
    pub measure_start: f64,
    pub measure_end: f64,
}

impl SimResult {
    pub fn sector_duration(&self) -> f64 {
        self.period / 6.0
    }

    fn window(&self, start: f64, len: f64) -> Result<&[SimSample]> {
        let available = self.measure_end - start;
        if available < len * (1.0 - 1e-9) {
            return Err(Error::WindowTooShort {
                available,
                required: len,
            });
        }
        let tol = 1e-9 * self.period;
        let lo = self.samples.partition_point(|s| s.t < start - tol);
        let hi = self.samples.partition_point(|s| s.t <= start + len + tol);
        Ok(&self.samples[lo..hi])
    }

    /// Phase current over the first measured cycle.
    pub fn current_cycle(&self, phase: usize) -> Result<PiecewiseLinear> {
        let w = self.window(self.measure_start, self.period)?;
        let pts = w.iter().map(|s| (s.t, [s.ia, s.ib, s.ic][phase])).collect();
        PiecewiseLinear::new(pts)
    }

    /// Electromagnetic torque over the first measured sector.
    pub fn torque_sector(&self) -> Result<PiecewiseLinear> {
        let w = self.window(self.measure_start, self.sector_duration())?;
        PiecewiseLinear::new(w.iter().map(|s| (s.t, s.torque)).collect())
    }

    /// Mean torque over the first measured cycle.
    pub fn mean_torque(&self) -> Result<f64> {
        let w = self.window(self.measure_start, self.period)?;
        let pl = PiecewiseLinear::new(w.iter().map(|s| (s.t, s.torque)).collect())?;
        let area: f64 = pl
            .pieces()
            .map(|(t0, y0, t1, y1)| 0.5 * (y0 + y1) * (t1 - t0))
            .sum();
        Ok(area / pl.span())
    }

    /// Writes `t_s, ia_A, ib_A, ic_A, torque_Nm`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t_s,ia_A,ib_A,ic_A,torque_Nm")?;
        for s in &self.samples {
            writeln!(
                out,
                "{:.11e},{:.12e},{:.12e},{:.12e},{:.12e}",
                s.t, s.ia, s.ib, s.ic, s.torque
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Model {
    r_s: f64,
    r_r: f64,
    l_m: f64,
    l_s: f64,
    l_r: f64,
    det: f64,
    omega_r: f64,
    torque_gain: f64,
}

type State = [Complex64; 2];

impl Model {
    fn new(machine: &MachineParams, period: f64) -> Self {
        let l_m = machine.l_o;
        let l_s = l_m * (1.0 + machine.sigma_s);
        let l_r = l_m * (1.0 + machine.sigma_r);
        Self {
            r_s: machine.r_s,
            r_r: machine.r_r,
            l_m,
            l_s,
            l_r,
            det: l_s * l_r - l_m * l_m,
            omega_r: 2.0 * PI / period,
            torque_gain: 1.5 * machine.pole_pairs(),
        }
    }

    fn currents(&self, x: &State) -> (Complex64, Complex64) {
        let i_s = (x[0] * self.l_r - x[1] * self.l_m) / self.det;
        let i_r = (x[1] * self.l_s - x[0] * self.l_m) / self.det;
        (i_s, i_r)
    }

    fn deriv(&self, x: &State, v: Complex64) -> State {
        let (i_s, i_r) = self.currents(x);
        [
            v - i_s * self.r_s,
            -i_r * self.r_r + Complex64::new(0.0, self.omega_r) * x[1],
        ]
    }

    fn rk4(&self, x: &State, h: f64, v0: Complex64, vm: Complex64, v1: Complex64) -> State {
        let add = |x: &State, k: &State, s: f64| [x[0] + k[0] * s, x[1] + k[1] * s];
        let k1 = self.deriv(x, v0);
        let k2 = self.deriv(&add(x, &k1, 0.5 * h), vm);
        let k3 = self.deriv(&add(x, &k2, 0.5 * h), vm);
        let k4 = self.deriv(&add(x, &k3, h), v1);
        [
            x[0] + (k1[0] + (k2[0] + k3[0]) * 2.0 + k4[0]) * (h / 6.0),
            x[1] + (k1[1] + (k2[1] + k3[1]) * 2.0 + k4[1]) * (h / 6.0),
        ]
    }

    fn sample(&self, t: f64, x: &State) -> SimSample {
        let (i_s, _) = self.currents(x);
        let [ia, ib, ic] = inverse_clarke(i_s);
        SimSample {
            t,
            ia,
            ib,
            ic,
            torque: self.torque_gain * (x[0].conj() * i_s).im,
        }
    }
}

struct Stepper<'a, S: VoltageSource> {
    model: Model,
    source: &'a S,
    intervals: Vec<(f64, f64, usize)>,
    dt: f64,
}

impl<S: VoltageSource> Stepper<'_, S> {
    /// Advances one period from `x`; `drive = false` zeroes the input.
    fn period(
        &self,
        mut x: State,
        drive: bool,
        t_offset: f64,
        mut record: Option<&mut Vec<SimSample>>,
    ) -> Result<State> {
        let zero = Complex64::new(0.0, 0.0);
        let constant = self.source.piecewise_constant();
        for (idx, &(start, dur, n)) in self.intervals.iter().enumerate() {
            let h = dur / n as f64;
            let held = if drive && constant {
                self.source.space_vector(idx, start)
            } else {
                zero
            };
            for j in 0..n {
                let t = start + h * j as f64;
                if let Some(rec) = record.as_deref_mut() {
                    rec.push(self.model.sample(t_offset + t, &x));
                }
                let (v0, vm, v1) = if drive && !constant {
                    (
                        self.source.space_vector(idx, t),
                        self.source.space_vector(idx, t + 0.5 * h),
                        self.source.space_vector(idx, t + h),
                    )
                } else {
                    (held, held, held)
                };
                x = self.model.rk4(&x, h, v0, vm, v1);
            }
            if !(x[0].norm() < 1e9 && x[1].norm() < 1e9) {
                return Err(Error::Unstable {
                    dt: self.dt,
                    t: t_offset + start + dur,
                });
            }
        }
        Ok(x)
    }
}

/// Solves `x = M x + c` for the 2×2 complex monodromy `M`.
fn periodic_orbit<S: VoltageSource>(stepper: &Stepper<'_, S>) -> Result<State> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let col0 = stepper.period([one, zero], false, 0.0, None)?;
    let col1 = stepper.period([zero, one], false, 0.0, None)?;
    let c = stepper.period([zero, zero], true, 0.0, None)?;
    // (I - M) x = c
    let a = [[one - col0[0], -col1[0]], [-col0[1], one - col1[1]]];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.norm() < 1e-300 {
        return Err(Error::Unstable {
            dt: stepper.dt,
            t: 0.0,
        });
    }
    Ok([
        (c[0] * a[1][1] - a[0][1] * c[1]) / det,
        (a[0][0] * c[1] - a[1][0] * c[0]) / det,
    ])
}

/// Runs the machine at synchronous speed from `source` and records the
/// measurement cycles.
pub fn simulate_no_load<S: VoltageSource>(
    machine: &MachineParams,
    source: &S,
    cfg: &SimConfig,
) -> Result<SimResult> {
    machine.validate()?;
    cfg.validate()?;
    let period = source.period();
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::domain("period", period, "> 0"));
    }
    let intervals: Vec<(f64, f64, usize)> = source
        .intervals()
        .into_iter()
        .filter(|&(_, d)| d > 0.0)
        .map(|(s, d)| {
            let n = ((d / cfg.dt).ceil() as usize).max(cfg.min_substeps);
            (s, d, n)
        })
        .collect();
    if intervals.is_empty() {
        return Err(Error::EmptyWaveform);
    }
    let stepper = Stepper {
        model: Model::new(machine, period),
        source,
        intervals,
        dt: cfg.dt,
    };

    let mut x = match cfg.initial {
        InitialState::PeriodicSteadyState => periodic_orbit(&stepper)?,
        InitialState::Zero => [Complex64::new(0.0, 0.0); 2],
    };
    for cycle in 0..cfg.n_settle_cycles {
        x = stepper.period(x, true, cycle as f64 * period, None)?;
    }
    let measure_start = cfg.n_settle_cycles as f64 * period;
    let mut samples = Vec::new();
    for cycle in 0..cfg.n_measure_cycles {
        let t0 = measure_start + cycle as f64 * period;
        x = stepper.period(x, true, t0, Some(&mut samples))?;
    }
    let measure_end = measure_start + cfg.n_measure_cycles as f64 * period;
    samples.push(stepper.model.sample(measure_end, &x));
    Ok(SimResult {
        samples,
        period,
        measure_start,
        measure_end,
    })
}

/// Spectrum of one phase current over the first measured cycle.
pub fn current_spectrum(r: &SimResult, phase: usize, n_max: u32) -> Result<SpectrumResult> {
    spectrum_linear(&r.current_cycle(phase)?, n_max)
}

/// Line-current THD of each phase.
pub fn line_current_thd(r: &SimResult, n_max: u32) -> Result<[Thd; 3]> {
    let mut out = [Thd {
        percent: 0.0,
        linear_sum_percent: 0.0,
    }; 3];
    for (phase, slot) in out.iter_mut().enumerate() {
        *slot = thd(&current_spectrum(r, phase, n_max)?, n_max)?;
    }
    Ok(out)
}

/// Peak-to-peak electromagnetic torque over one sector of the measurement window.
pub fn torque_pp_from_sim(r: &SimResult) -> Result<f64> {
    Ok(peak_to_peak(&r.torque_sector()?))
}
