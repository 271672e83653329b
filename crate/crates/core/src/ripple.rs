//! Stator-flux ripple and torque ripple in the synchronously rotating frame.
//!
//! Within a subcycle the reference vector is held at its sampled position.
//! The error between the applied vector and the reference is resolved along
//! `q` (aligned with the reference) and `d` (leading `q` by 90°). Its time
//! integral is the flux ripple, which returns to zero at the end of every
//! subcycle by volt-second balance.

use std::f64::consts::PI;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::svpwm::{
    check_m, cos_deg, dwell_times, sin_deg, subcycle_playlist, DriveConfig, SequenceKind,
    SequenceSpec, SpaceVector, SIN_60,
};
use crate::waveform::PiecewiseLinear;

/// Induction machine parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MachineParams {
    /// Rated output power, W.
    pub p_rated: f64,
    pub pole_count: u32,
    pub r_s: f64,
    pub r_r: f64,
    /// Magnetizing inductance, H.
    pub l_o: f64,
    /// Stator leakage inductance over magnetizing inductance.
    pub sigma_s: f64,
    pub sigma_r: f64,
}

impl Default for MachineParams {
    /// 7.5 kW, four-pole machine.
    fn default() -> Self {
        Self {
            p_rated: 7500.0,
            pole_count: 4,
            r_s: 1.1667,
            r_r: 3.2105,
            l_o: 0.3025,
            sigma_s: 0.0392,
            sigma_r: 0.0392,
        }
    }
}

impl MachineParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("p_rated", self.p_rated),
            ("r_s", self.r_s),
            ("r_r", self.r_r),
            ("l_o", self.l_o),
            ("sigma_s", self.sigma_s),
            ("sigma_r", self.sigma_r),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(name, v, "> 0"));
            }
        }
        if self.pole_count == 0 || !self.pole_count.is_multiple_of(2) {
            return Err(Error::domain(
                "pole_count",
                f64::from(self.pole_count),
                "even and > 0",
            ));
        }
        if self.sigma_s + self.sigma_r >= 1.0 {
            return Err(Error::domain(
                "sigma_s + sigma_r",
                self.sigma_s + self.sigma_r,
                "< 1",
            ));
        }
        Ok(())
    }

    /// `1/(σ_s + σ_r) - 1`
    pub fn leakage_factor(&self) -> f64 {
        1.0 / (self.sigma_s + self.sigma_r) - 1.0
    }

    pub fn pole_pairs(&self) -> f64 {
        f64::from(self.pole_count) / 2.0
    }

    /// Rated torque at synchronous speed for supply frequency `f_hz`.
    pub fn rated_torque(&self, f_hz: f64) -> f64 {
        self.p_rated / (2.0 * PI * f_hz / self.pole_pairs())
    }
}

/// One constant piece of the error voltage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSegment {
    pub vector: SpaceVector,
    pub duration: f64,
    pub vq: f64,
    pub vd: f64,
}

/// Error voltage over one subcycle.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorVoltageSegments {
    pub kind: SequenceKind,
    pub sample_index: usize,
    pub alpha_deg: f64,
    pub ts: f64,
    pub k: f64,
    pub segments: Vec<ErrorSegment>,
}

/// Error-voltage segments of one subcycle, in sector-1 roles.
///
/// Zero vectors give `(-V_ref, 0)`; `V1` gives `(v cos α - V_ref, -v sin α)`;
/// `V2` gives `(v cos(60°-α) - V_ref, v sin(60°-α))`, with `v` the active
/// vector length.
pub fn error_voltage_segments(
    seq: &SequenceSpec,
    m: f64,
    alpha_deg: f64,
    ts: f64,
    k: f64,
    sample_index: usize,
    drive: &DriveConfig,
) -> Result<ErrorVoltageSegments> {
    let dwell = dwell_times(m, alpha_deg, ts)?;
    let playlist = subcycle_playlist(seq, &dwell, k, sample_index)?;
    let v = drive.active_vector_length();
    let k1 = -drive.v_ref(m);
    let k2 = v * cos_deg(alpha_deg);
    let k3 = v * cos_deg(60.0 - alpha_deg);
    let segments = playlist
        .into_iter()
        .map(|s| {
            let (vq, vd) = match s.vector.id() {
                0 | 7 => (k1, 0.0),
                1 => (k2 + k1, -v * sin_deg(alpha_deg)),
                2 => (k3 + k1, v * sin_deg(60.0 - alpha_deg)),
                _ => unreachable!("playlists only use sector-1 roles"),
            };
            ErrorSegment {
                vector: s.vector,
                duration: s.duration,
                vq,
                vd,
            }
        })
        .collect();
    Ok(ErrorVoltageSegments {
        kind: seq.kind,
        sample_index,
        alpha_deg,
        ts,
        k,
        segments,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxPoint {
    pub t: f64,
    pub psi_q: f64,
    pub psi_d: f64,
}

/// Piecewise-linear q/d flux ripple.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxRippleWaveform {
    pub points: Vec<FluxPoint>,
    /// Subcycle boundary times, including both ends.
    pub boundaries: Vec<f64>,
}

impl FluxRippleWaveform {
    pub fn q(&self) -> PiecewiseLinear {
        PiecewiseLinear::new(self.points.iter().map(|p| (p.t, p.psi_q)).collect())
            .expect("flux ripple is non-empty")
    }

    pub fn d(&self) -> PiecewiseLinear {
        PiecewiseLinear::new(self.points.iter().map(|p| (p.t, p.psi_d)).collect())
            .expect("flux ripple is non-empty")
    }

    pub fn span(&self) -> f64 {
        self.points[self.points.len() - 1].t - self.points[0].t
    }

    fn append(&mut self, other: &FluxRippleWaveform) {
        let offset = self.points.last().map_or(0.0, |p| p.t);
        let skip = usize::from(!self.points.is_empty());
        self.points
            .extend(other.points.iter().skip(skip).map(|p| FluxPoint {
                t: p.t + offset,
                ..*p
            }));
        self.boundaries
            .extend(other.boundaries.iter().skip(skip).map(|t| t + offset));
    }

    /// Writes `t_s, psi_q_Vs, psi_d_Vs, torque_Nm`, with torque obtained by
    /// scaling `psi_q` by `torque_per_flux`.
    pub fn write_csv<W: Write>(&self, mut out: W, torque_per_flux: f64) -> io::Result<()> {
        writeln!(out, "t_s,psi_q_Vs,psi_d_Vs,torque_Nm")?;
        for p in &self.points {
            writeln!(
                out,
                "{:.11e},{:.12e},{:.12e},{:.12e}",
                p.t,
                p.psi_q,
                p.psi_d,
                p.psi_q * torque_per_flux
            )?;
        }
        Ok(())
    }
}

/// Running integral of the error voltage, starting from zero at `t = 0`.
pub fn flux_ripple(segments: &ErrorVoltageSegments) -> FluxRippleWaveform {
    let mut points = Vec::with_capacity(segments.segments.len() + 1);
    let (mut t, mut q, mut d) = (0.0, 0.0, 0.0);
    points.push(FluxPoint {
        t,
        psi_q: q,
        psi_d: d,
    });
    for s in &segments.segments {
        t += s.duration;
        q += s.vq * s.duration;
        d += s.vd * s.duration;
        points.push(FluxPoint {
            t,
            psi_q: q,
            psi_d: d,
        });
    }
    FluxRippleWaveform {
        points,
        boundaries: vec![0.0, t],
    }
}

/// Flux ripple over one sector (`n·Ts`).
pub fn sector_flux_ripple(
    seq: &SequenceSpec,
    m: f64,
    k: f64,
    drive: &DriveConfig,
) -> Result<FluxRippleWaveform> {
    check_m(m)?;
    drive.validate()?;
    let ts = seq.subcycle_duration(m, drive);
    let mut out = FluxRippleWaveform {
        points: Vec::new(),
        boundaries: Vec::new(),
    };
    for (i, &alpha) in seq.sample_angles_deg.iter().enumerate() {
        let seg = error_voltage_segments(seq, m, alpha, ts, k, i, drive)?;
        out.append(&flux_ripple(&seg));
    }
    Ok(out)
}

/// Flux ripple over a whole fundamental period (six identical sectors).
pub fn cycle_flux_ripple(
    seq: &SequenceSpec,
    m: f64,
    k: f64,
    drive: &DriveConfig,
) -> Result<FluxRippleWaveform> {
    let sector = sector_flux_ripple(seq, m, k, drive)?;
    let mut out = sector.clone();
    for _ in 1..6 {
        out.append(&sector);
    }
    Ok(out)
}

/// Torque per unit q-axis flux ripple, N·m/(V·s).
pub fn torque_per_flux(machine: &MachineParams, m: f64, drive: &DriveConfig) -> Result<f64> {
    machine.validate()?;
    let f1 = drive.fundamental_hz(m);
    if !(f1.is_finite() && f1 > 0.0) {
        return Err(Error::domain("f1", f1, "> 0"));
    }
    let fundamental_flux = drive.v_ref(m) / (2.0 * PI * f1);
    Ok(
        (2.0 / 3.0) * machine.pole_pairs() * fundamental_flux / machine.l_o
            * machine.leakage_factor(),
    )
}

/// Torque ripple waveform, N·m, proportional to the q-axis flux ripple.
pub fn torque_ripple(
    psi: &FluxRippleWaveform,
    machine: &MachineParams,
    m: f64,
    drive: &DriveConfig,
) -> Result<PiecewiseLinear> {
    let scale = torque_per_flux(machine, m, drive)?;
    Ok(psi.q().map(|q| q * scale))
}

/// Peak-to-peak q-axis flux ripple of SVHE from the zero-vector dwell of
/// its 15° sample.
pub fn pp_flux_svhe(m: f64, drive: &DriveConfig) -> Result<f64> {
    check_m(m)?;
    let alpha = 15.0;
    let ts = SequenceSpec::of(SequenceKind::Svhe).subcycle_duration(m, drive);
    Ok(drive.v_ref(m) * ts * (1.0 - m * (sin_deg(alpha) + sin_deg(60.0 - alpha))))
}

/// Peak-to-peak q-axis flux ripple of CSV from its 10° sample.
pub fn pp_flux_csv(m: f64, drive: &DriveConfig) -> Result<f64> {
    check_m(m)?;
    let alpha = 10.0;
    let v = drive.active_vector_length();
    let v_ref = drive.v_ref(m);
    let ts = SequenceSpec::of(SequenceKind::Csv).subcycle_duration(m, drive);
    let t0_term = v_ref * (1.0 - m * (sin_deg(alpha) + sin_deg(60.0 - alpha)));
    let t2_term = (v_ref - v * cos_deg(60.0 - alpha)) * 2.0 * m * sin_deg(alpha);
    Ok(ts * (t0_term + t2_term))
}

/// Modulation index above which SVHE (sampled at `alpha1`) has lower
/// peak-to-peak q ripple than CSV (sampled at `alpha2`).
pub fn crossover_m(alpha1_deg: f64, alpha2_deg: f64) -> Result<f64> {
    for (name, a) in [("alpha1", alpha1_deg), ("alpha2", alpha2_deg)] {
        if !(a.is_finite() && a > 0.0 && a < 60.0) {
            return Err(Error::domain(name, a, "0 < alpha < 60 degrees"));
        }
    }
    let num = 0.5 + 2.0 * sin_deg(alpha2_deg) * cos_deg(60.0 - alpha2_deg) / SIN_60;
    let den = 1.5 * (sin_deg(alpha1_deg) + sin_deg(60.0 - alpha1_deg)) + sin_deg(alpha2_deg)
        - sin_deg(60.0 - alpha2_deg);
    if den.abs() < 1e-12 {
        return Err(Error::domain("crossover denominator", den, "non-zero"));
    }
    Ok(num / den)
}

/// `max - min`; exact for piecewise-linear signals.
pub fn peak_to_peak(w: &PiecewiseLinear) -> f64 {
    w.max() - w.min()
}

/// RMS over the waveform's span, integrating each linear piece exactly.
pub fn rms_ripple(w: &PiecewiseLinear) -> f64 {
    let span = w.span();
    if span <= 0.0 {
        return w.points()[0].1.abs();
    }
    let integral: f64 = w
        .pieces()
        .map(|(t0, y0, t1, y1)| (t1 - t0) * (y0 * y0 + y0 * y1 + y1 * y1) / 3.0)
        .sum();
    (integral / span).sqrt()
}
