//! Space-vector geometry, the studied switching sequences, dwell times and
//! pole-voltage synthesis for a two-level three-phase inverter.
//!
//! Sector `s` (1..=6) spans the 60° between active vectors `V_s` and
//! `V_{s+1}`. Playlists are written for sector 1 in terms of the roles
//! `0`, `1`, `2`, `7`; [`SpaceVector::rotated`] maps them to any other sector.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::waveform::PiecewiseConstant;

/// sin(60°) = cos(30°).
pub const SIN_60: f64 = 0.866_025_403_784_438_6;

pub(crate) fn sin_deg(deg: f64) -> f64 {
    deg.to_radians().sin()
}

pub(crate) fn cos_deg(deg: f64) -> f64 {
    deg.to_radians().cos()
}

pub(crate) fn check_m(m: f64) -> Result<()> {
    if m.is_finite() && m > 0.0 && m <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain("m", m, "0 < m <= 1"))
    }
}

pub(crate) fn check_k(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 && k < 1.0 {
        Ok(())
    } else {
        Err(Error::domain("k", k, "0 < k < 1"))
    }
}

/// How the length of an active space vector relates to the DC-link voltage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VectorConvention {
    /// Active vectors have length `v_dc`, so `V_ref = 0.866·m·v_dc`.
    #[default]
    UnitDcLink,
    /// Amplitude-invariant Clarke scaling: active vectors have length `2/3·v_dc`.
    TwoThirdsDcLink,
}

/// DC link and constant-V/f operating law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveConfig {
    pub v_dc: f64,
    /// Fundamental frequency at `m = 1`; `f1 = f_base·m`.
    pub f_base: f64,
    pub convention: VectorConvention,
}

impl DriveConfig {
    pub fn new(v_dc: f64, f_base: f64) -> Result<Self> {
        let cfg = Self {
            v_dc,
            f_base,
            convention: VectorConvention::UnitDcLink,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_convention(mut self, convention: VectorConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_dc.is_finite() && self.v_dc > 0.0) {
            return Err(Error::domain("v_dc", self.v_dc, "> 0"));
        }
        if !(self.f_base.is_finite() && self.f_base > 0.0) {
            return Err(Error::domain("f_base", self.f_base, "> 0"));
        }
        Ok(())
    }

    /// Fundamental frequency under the V/f law.
    pub fn fundamental_hz(&self, m: f64) -> f64 {
        self.f_base * m
    }

    pub fn active_vector_length(&self) -> f64 {
        match self.convention {
            VectorConvention::UnitDcLink => self.v_dc,
            VectorConvention::TwoThirdsDcLink => 2.0 / 3.0 * self.v_dc,
        }
    }

    /// Reference vector magnitude; `m = 1` touches the inscribed circle of the hexagon.
    pub fn v_ref(&self, m: f64) -> f64 {
        SIN_60 * m * self.active_vector_length()
    }
}

impl Default for DriveConfig {
    fn default() -> Self {
        Self {
            v_dc: crate::reference::DEFAULT_V_DC,
            f_base: 50.0,
            convention: VectorConvention::UnitDcLink,
        }
    }
}

/// One of the eight inverter states `V0..V7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceVector(u8);

const SWITCH_STATES: [[u8; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
    [0, 1, 1],
    [0, 0, 1],
    [1, 0, 1],
    [1, 1, 1],
];

impl SpaceVector {
    pub const V0: SpaceVector = SpaceVector(0);
    pub const V1: SpaceVector = SpaceVector(1);
    pub const V2: SpaceVector = SpaceVector(2);
    pub const V7: SpaceVector = SpaceVector(7);

    pub fn new(id: u8) -> Result<Self> {
        if id <= 7 {
            Ok(SpaceVector(id))
        } else {
            Err(Error::domain("vector_id", f64::from(id), "0..=7"))
        }
    }

    pub fn id(self) -> u8 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0 || self.0 == 7
    }

    /// Upper-switch states `(sa, sb, sc)`.
    pub fn switch_state(self) -> [u8; 3] {
        SWITCH_STATES[self.0 as usize]
    }

    /// Maps a sector-1 vector to the corresponding vector `sectors` sectors ahead.
    ///
    /// Advancing one sector is the phase permutation `(a, b, c) -> (!b, !c, !a)`,
    /// which sends `V_k -> V_{k+1}` and swaps the two zero vectors.
    pub fn rotated(self, sectors: u8) -> Self {
        let s = sectors % 6;
        if self.is_zero() {
            if s.is_multiple_of(2) {
                self
            } else {
                SpaceVector(7 - self.0)
            }
        } else {
            SpaceVector((self.0 - 1 + s) % 6 + 1)
        }
    }

    /// Position in the stationary frame for the given active-vector length.
    pub fn alpha_beta(self, length: f64) -> Complex64 {
        if self.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(length, (f64::from(self.0 - 1) * 60.0).to_radians())
        }
    }
}

impl fmt::Display for SpaceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V{}", self.0)
    }
}

/// Switch states of vector `id`; errors on ids outside `0..=7`.
pub fn vector_switch_state(id: u8) -> Result<[u8; 3]> {
    Ok(SpaceVector::new(id)?.switch_state())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SequenceKind {
    /// Conventional SVPWM, 0127-7210-0127.
    Csv,
    /// Advanced bus clamping, 0121-1210.
    Abc1,
    /// Advanced bus clamping, 7212-2127.
    Abc2,
    /// Harmonic-elimination sequence 0121-7212 with division coefficient k.
    Svhe,
}

impl SequenceKind {
    pub const ALL: [SequenceKind; 4] = [
        SequenceKind::Csv,
        SequenceKind::Abc1,
        SequenceKind::Abc2,
        SequenceKind::Svhe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SequenceKind::Csv => "csv",
            SequenceKind::Abc1 => "abc1",
            SequenceKind::Abc2 => "abc2",
            SequenceKind::Svhe => "svhe",
        }
    }

    pub fn pattern(self) -> &'static str {
        match self {
            SequenceKind::Csv => "0127-7210-0127",
            SequenceKind::Abc1 => "0121-1210",
            SequenceKind::Abc2 => "7212-2127",
            SequenceKind::Svhe => "0121-7212",
        }
    }
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SequenceKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(SequenceKind::Csv),
            "abc1" | "abc-i" => Ok(SequenceKind::Abc1),
            "abc2" | "abc-ii" => Ok(SequenceKind::Abc2),
            "svhe" => Ok(SequenceKind::Svhe),
            other => Err(format!(
                "unknown sequence '{other}' (expected csv, abc1, abc2 or svhe)"
            )),
        }
    }
}

/// Sampling layout of a sequence within one sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceSpec {
    pub kind: SequenceKind,
    pub samples_per_sector: usize,
    /// Sample locations measured from the leading active vector, degrees.
    pub sample_angles_deg: &'static [f64],
}

impl SequenceSpec {
    pub fn of(kind: SequenceKind) -> Self {
        match kind {
            SequenceKind::Csv => Self {
                kind,
                samples_per_sector: 3,
                sample_angles_deg: &[10.0, 30.0, 50.0],
            },
            _ => Self {
                kind,
                samples_per_sector: 2,
                sample_angles_deg: &[15.0, 45.0],
            },
        }
    }

    /// Subcycle duration `Ts = 1/(6·f1·n)`.
    pub fn subcycle_duration(&self, m: f64, drive: &DriveConfig) -> f64 {
        1.0 / (6.0 * drive.fundamental_hz(m) * self.samples_per_sector as f64)
    }

    pub fn uses_k(&self) -> bool {
        self.kind == SequenceKind::Svhe
    }
}

impl From<SequenceKind> for SequenceSpec {
    fn from(kind: SequenceKind) -> Self {
        SequenceSpec::of(kind)
    }
}

/// Dwell times of one subcycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DwellTimes {
    pub t1: f64,
    pub t2: f64,
    pub t0: f64,
    pub ts: f64,
}

/// Dwell times for a reference at `alpha_deg` within the sector.
pub fn dwell_times(m: f64, alpha_deg: f64, ts: f64) -> Result<DwellTimes> {
    check_m(m)?;
    if !(alpha_deg.is_finite() && (0.0..=60.0).contains(&alpha_deg)) {
        return Err(Error::domain(
            "alpha",
            alpha_deg,
            "0 <= alpha <= 60 degrees",
        ));
    }
    if !(ts.is_finite() && ts > 0.0) {
        return Err(Error::domain("ts", ts, "> 0"));
    }
    let t1 = m * sin_deg(60.0 - alpha_deg) * ts;
    let t2 = m * sin_deg(alpha_deg) * ts;
    let mut t0 = ts - t1 - t2;
    // rounding at the m = 1, alpha = 30° corner
    if t0.abs() <= 4.0 * f64::EPSILON * ts {
        t0 = 0.0;
    }
    Ok(DwellTimes { t1, t2, t0, ts })
}

/// One subcycle of the sampling plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePoint {
    /// Sector number, 1..=6.
    pub sector: u8,
    /// Sample position within the sector, 0-based.
    pub sample_index: usize,
    pub alpha_deg: f64,
    pub ts: f64,
    pub start: f64,
}

/// Time-ordered subcycles covering one fundamental period.
pub fn sample_plan(seq: &SequenceSpec, m: f64, drive: &DriveConfig) -> Result<Vec<SamplePoint>> {
    check_m(m)?;
    drive.validate()?;
    let ts = seq.subcycle_duration(m, drive);
    let n = seq.samples_per_sector;
    let mut plan = Vec::with_capacity(6 * n);
    for sector in 1..=6u8 {
        for (sample_index, &alpha_deg) in seq.sample_angles_deg.iter().enumerate() {
            let idx = plan.len();
            plan.push(SamplePoint {
                sector,
                sample_index,
                alpha_deg,
                ts,
                start: idx as f64 * ts,
            });
        }
    }
    Ok(plan)
}

/// A vector applied for a duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slot {
    pub vector: SpaceVector,
    pub duration: f64,
}

fn slot(id: u8, duration: f64) -> Slot {
    Slot {
        vector: SpaceVector(id),
        duration,
    }
}

/// Sector-1 vector order and durations for sample `sample_index` (0-based).
///
/// `k` is only read for the SVHE sequence. ABC sequences use the time
/// reverse of their first sample for the second one.
pub fn subcycle_playlist(
    seq: &SequenceSpec,
    dwell: &DwellTimes,
    k: f64,
    sample_index: usize,
) -> Result<Vec<Slot>> {
    if sample_index >= seq.samples_per_sector {
        return Err(Error::domain(
            "sample_index",
            sample_index as f64,
            "< samples per sector",
        ));
    }
    let DwellTimes { t1, t2, t0, .. } = *dwell;
    let forward = sample_index.is_multiple_of(2);
    let mut slots = match seq.kind {
        SequenceKind::Csv => vec![
            slot(0, t0 / 2.0),
            slot(1, t1),
            slot(2, t2),
            slot(7, t0 / 2.0),
        ],
        SequenceKind::Abc1 => vec![
            slot(0, t0),
            slot(1, t1 / 2.0),
            slot(2, t2),
            slot(1, t1 / 2.0),
        ],
        SequenceKind::Abc2 => vec![
            slot(7, t0),
            slot(2, t2 / 2.0),
            slot(1, t1),
            slot(2, t2 / 2.0),
        ],
        SequenceKind::Svhe => {
            check_k(k)?;
            return Ok(if forward {
                vec![
                    slot(0, t0),
                    slot(1, k * t1),
                    slot(2, t2),
                    slot(1, (1.0 - k) * t1),
                ]
            } else {
                vec![
                    slot(7, t0),
                    slot(2, (1.0 - k) * t2),
                    slot(1, t1),
                    slot(2, k * t2),
                ]
            });
        }
    };
    if !forward {
        slots.reverse();
    }
    Ok(slots)
}

/// A slot placed on the time axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedSlot {
    pub start: f64,
    pub duration: f64,
    pub vector: SpaceVector,
}

/// Inverter output over one fundamental period.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreePhaseWaveform {
    fundamental_hz: f64,
    v_dc: f64,
    slots: Vec<TimedSlot>,
}

impl ThreePhaseWaveform {
    pub fn fundamental_hz(&self) -> f64 {
        self.fundamental_hz
    }

    pub fn period(&self) -> f64 {
        1.0 / self.fundamental_hz
    }

    pub fn v_dc(&self) -> f64 {
        self.v_dc
    }

    pub fn slots(&self) -> &[TimedSlot] {
        &self.slots
    }

    /// Pole voltage of phase `phase` (0 = a) referred to the DC midpoint.
    pub fn pole_voltage(&self, phase: usize) -> PiecewiseConstant {
        let pts = self
            .slots
            .iter()
            .map(|s| (s.start, self.level(s.vector, phase)))
            .collect();
        PiecewiseConstant::new(self.period(), pts).expect("synthesized waveform is well formed")
    }

    /// Line-to-line voltage `v_from - v_to`.
    pub fn line_voltage(&self, from: usize, to: usize) -> PiecewiseConstant {
        let pts = self
            .slots
            .iter()
            .map(|s| {
                (
                    s.start,
                    self.level(s.vector, from) - self.level(s.vector, to),
                )
            })
            .collect();
        PiecewiseConstant::new(self.period(), pts).expect("synthesized waveform is well formed")
    }

    fn level(&self, v: SpaceVector, phase: usize) -> f64 {
        (f64::from(v.switch_state()[phase]) - 0.5) * self.v_dc
    }

    /// Writes `t_s, va_V, vb_V, vc_V`, one row per segment start.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t_s,va_V,vb_V,vc_V")?;
        for s in &self.slots {
            writeln!(
                out,
                "{:.11e},{},{},{}",
                s.start,
                self.level(s.vector, 0),
                self.level(s.vector, 1),
                self.level(s.vector, 2)
            )?;
        }
        Ok(())
    }
}

/// Pole voltages of all three phases for one fundamental period.
pub fn pole_voltage_waveform(
    seq: &SequenceSpec,
    m: f64,
    k: f64,
    drive: &DriveConfig,
) -> Result<ThreePhaseWaveform> {
    if seq.uses_k() {
        check_k(k)?;
    }
    let plan = sample_plan(seq, m, drive)?;
    let mut slots: Vec<TimedSlot> = Vec::with_capacity(plan.len() * 4);
    let mut t = 0.0;
    for p in &plan {
        let dwell = dwell_times(m, p.alpha_deg, p.ts)?;
        for s in subcycle_playlist(seq, &dwell, k, p.sample_index)? {
            if s.duration <= 0.0 {
                continue;
            }
            let vector = s.vector.rotated(p.sector - 1);
            match slots.last_mut() {
                Some(last) if last.vector == vector => last.duration += s.duration,
                _ => slots.push(TimedSlot {
                    start: t,
                    duration: s.duration,
                    vector,
                }),
            }
            t += s.duration;
        }
    }
    Ok(ThreePhaseWaveform {
        fundamental_hz: drive.fundamental_hz(m),
        v_dc: drive.v_dc,
        slots,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwitchingCount {
    pub per_phase: [usize; 3],
    pub total: usize,
}

/// Level transitions of each pole voltage over one period.
pub fn switching_count(w: &ThreePhaseWaveform) -> SwitchingCount {
    let per_phase = [0, 1, 2].map(|p| w.pole_voltage(p).transitions());
    SwitchingCount {
        per_phase,
        total: per_phase.iter().sum(),
    }
}
