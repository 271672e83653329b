//! Sweeps over modulation index and their CSV tables.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harmonic::{solve_k, EliminationSolution, DEFAULT_THD_ORDERS};
use crate::machine::{line_current_thd, simulate_no_load, SimConfig};
use crate::reference::TORQUE_RIPPLE_NM;
use crate::ripple::{peak_to_peak, sector_flux_ripple, torque_ripple, MachineParams};
use crate::svpwm::{check_k, pole_voltage_waveform, DriveConfig, SequenceKind, SequenceSpec};

/// Bracket width used when solving for k in sweeps.
pub const K_TOL: f64 = 1e-9;

/// How the SVHE division coefficient is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KPolicy {
    Fixed(f64),
    Solve5,
    Solve7,
    Half,
}

impl KPolicy {
    pub fn resolve(self, m: f64, drive: &DriveConfig) -> Result<f64> {
        match self {
            KPolicy::Fixed(k) => check_k(k).map(|_| k),
            KPolicy::Half => Ok(0.5),
            KPolicy::Solve5 => solve_k(m, 5, drive, K_TOL).map(|s| s.k),
            KPolicy::Solve7 => solve_k(m, 7, drive, K_TOL).map(|s| s.k),
        }
    }
}

impl FromStr for KPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "half" => Ok(KPolicy::Half),
            "solve-5" => Ok(KPolicy::Solve5),
            "solve-7" => Ok(KPolicy::Solve7),
            _ => {
                let v = s.strip_prefix("fixed:").ok_or_else(|| {
                    format!("bad k policy '{s}' (fixed:X, solve-5, solve-7, half)")
                })?;
                let k: f64 = v.parse().map_err(|_| format!("bad k value '{v}'"))?;
                if k > 0.0 && k < 1.0 {
                    Ok(KPolicy::Fixed(k))
                } else {
                    Err(format!("k = {k} outside (0, 1)"))
                }
            }
        }
    }
}

impl fmt::Display for KPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KPolicy::Fixed(k) => write!(f, "fixed:{k}"),
            KPolicy::Solve5 => f.write_str("solve-5"),
            KPolicy::Solve7 => f.write_str("solve-7"),
            KPolicy::Half => f.write_str("half"),
        }
    }
}

/// Peak-to-peak analytic torque ripple over one sector, N·m.
pub fn analytic_torque_pp(
    kind: SequenceKind,
    m: f64,
    k: f64,
    machine: &MachineParams,
    drive: &DriveConfig,
) -> Result<f64> {
    let psi = sector_flux_ripple(&SequenceSpec::of(kind), m, k, drive)?;
    Ok(peak_to_peak(&torque_ripple(&psi, machine, m, drive)?))
}

/// One row of the torque-ripple sweep, N·m.
#[derive(Debug, Clone, PartialEq)]
pub struct RippleRow {
    pub m: f64,
    pub csv: f64,
    pub abc1: f64,
    pub abc2: f64,
    pub svhe_half: f64,
    pub svhe_h5: Option<f64>,
    pub svhe_h7: Option<f64>,
    pub k5: Option<f64>,
    pub k7: Option<f64>,
}

impl RippleRow {
    pub fn columns(&self) -> [Option<f64>; 6] {
        [
            Some(self.csv),
            Some(self.abc1),
            Some(self.abc2),
            Some(self.svhe_half),
            self.svhe_h5,
            self.svhe_h7,
        ]
    }
}

fn ripple_row(m: f64, machine: &MachineParams, drive: &DriveConfig) -> Result<RippleRow> {
    let pp = |kind, k| analytic_torque_pp(kind, m, k, machine, drive);
    let k5 = solve_k(m, 5, drive, K_TOL).ok().map(|s| s.k);
    let k7 = solve_k(m, 7, drive, K_TOL).ok().map(|s| s.k);
    Ok(RippleRow {
        m,
        csv: pp(SequenceKind::Csv, 0.5)?,
        abc1: pp(SequenceKind::Abc1, 0.5)?,
        abc2: pp(SequenceKind::Abc2, 0.5)?,
        svhe_half: pp(SequenceKind::Svhe, 0.5)?,
        svhe_h5: k5.map(|k| pp(SequenceKind::Svhe, k)).transpose()?,
        svhe_h7: k7.map(|k| pp(SequenceKind::Svhe, k)).transpose()?,
        k5,
        k7,
    })
}

/// Analytic peak-to-peak torque ripple for every sequence at each `m`.
pub fn sweep_ripple(
    ms: &[f64],
    machine: &MachineParams,
    drive: &DriveConfig,
) -> Result<Vec<RippleRow>> {
    ms.par_iter()
        .map(|&m| ripple_row(m, machine, drive))
        .collect()
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"))
}

pub fn write_ripple_csv<W: Write>(mut out: W, rows: &[RippleRow]) -> io::Result<()> {
    writeln!(
        out,
        "m,csv_pp_Nm,abc1_pp_Nm,abc2_pp_Nm,svhe_pp_Nm,svhe_h5_pp_Nm,svhe_h7_pp_Nm"
    )?;
    for r in rows {
        let cols: Vec<String> = r.columns().iter().map(|&c| cell(c)).collect();
        writeln!(out, "{},{}", r.m, cols.join(","))?;
    }
    Ok(())
}

/// Result of fitting `v_dc` to the reference ripple table.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub v_dc: f64,
    /// `(m, column, predicted / reference - 1)` per cell.
    pub residuals: Vec<(f64, usize, f64)>,
    pub rms_residual: f64,
    /// Largest minus smallest relative residual.
    pub spread: f64,
}

impl Calibration {
    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.2.abs()).fold(0.0, f64::max)
    }
}

/// Least-squares `v_dc` (relative error) over the reference ripple table.
pub fn calibrate_v_dc(machine: &MachineParams, f_base: f64) -> Result<Calibration> {
    let unit = DriveConfig::new(1.0, f_base)?;
    let ms: Vec<f64> = TORQUE_RIPPLE_NM.iter().map(|r| r.m).collect();
    let rows = sweep_ripple(&ms, machine, &unit)?;
    let mut ratios = Vec::new();
    for (row, reference) in rows.iter().zip(TORQUE_RIPPLE_NM.iter()) {
        for (col, (pred, target)) in row.columns().iter().zip(reference.columns()).enumerate() {
            if let Some(p) = pred {
                ratios.push((row.m, col, p / target));
            }
        }
    }
    let num: f64 = ratios.iter().map(|r| r.2).sum();
    let den: f64 = ratios.iter().map(|r| r.2 * r.2).sum();
    if den.is_nan() || den <= 0.0 {
        return Err(Error::ZeroFundamental);
    }
    let scale = num / den;
    let residuals: Vec<(f64, usize, f64)> = ratios
        .iter()
        .map(|&(m, c, r)| (m, c, r * scale - 1.0))
        .collect();
    let rms_residual =
        (residuals.iter().map(|r| r.2 * r.2).sum::<f64>() / residuals.len() as f64).sqrt();
    let hi = residuals
        .iter()
        .map(|r| r.2)
        .fold(f64::NEG_INFINITY, f64::max);
    let lo = residuals.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    Ok(Calibration {
        v_dc: scale.sqrt(),
        residuals,
        rms_residual,
        spread: hi - lo,
    })
}

/// Simulated no-load line-current THD of phase a, percent.
pub fn simulated_thd(
    kind: SequenceKind,
    m: f64,
    k: f64,
    machine: &MachineParams,
    drive: &DriveConfig,
    sim: &SimConfig,
) -> Result<f64> {
    let w = pole_voltage_waveform(&SequenceSpec::of(kind), m, k, drive)?;
    let r = simulate_no_load(machine, &w, sim)?;
    Ok(line_current_thd(&r, DEFAULT_THD_ORDERS)?[0].percent)
}

/// One row of the THD sweep; failed cells are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThdRow {
    pub m: f64,
    pub csv: Option<f64>,
    pub svhe_half: Option<f64>,
    pub svhe_h5: Option<f64>,
    pub svhe_h7: Option<f64>,
}

impl ThdRow {
    pub fn columns(&self) -> [Option<f64>; 4] {
        [self.csv, self.svhe_half, self.svhe_h5, self.svhe_h7]
    }
}

/// Simulated THD for CSV and the three SVHE variants at each `m`.
pub fn sweep_thd(
    ms: &[f64],
    machine: &MachineParams,
    drive: &DriveConfig,
    sim: &SimConfig,
) -> Vec<ThdRow> {
    let cells: Vec<(usize, usize)> = (0..ms.len())
        .flat_map(|i| (0..4).map(move |c| (i, c)))
        .collect();
    let values: Vec<Option<f64>> = cells
        .par_iter()
        .map(|&(i, c)| {
            let m = ms[i];
            let (kind, policy) = match c {
                0 => (SequenceKind::Csv, KPolicy::Half),
                1 => (SequenceKind::Svhe, KPolicy::Half),
                2 => (SequenceKind::Svhe, KPolicy::Solve5),
                _ => (SequenceKind::Svhe, KPolicy::Solve7),
            };
            policy
                .resolve(m, drive)
                .and_then(|k| simulated_thd(kind, m, k, machine, drive, sim))
                .ok()
        })
        .collect();
    ms.iter()
        .enumerate()
        .map(|(i, &m)| ThdRow {
            m,
            csv: values[4 * i],
            svhe_half: values[4 * i + 1],
            svhe_h5: values[4 * i + 2],
            svhe_h7: values[4 * i + 3],
        })
        .collect()
}

pub fn write_thd_csv<W: Write>(mut out: W, rows: &[ThdRow]) -> io::Result<()> {
    writeln!(
        out,
        "m,csv_thd_pct,svhe_hne_thd_pct,svhe_h5_thd_pct,svhe_h7_thd_pct"
    )?;
    for r in rows {
        let cols: Vec<String> = r.columns().iter().map(|&c| cell(c)).collect();
        writeln!(out, "{},{}", r.m, cols.join(","))?;
    }
    Ok(())
}

/// Solutions for the 5th and 7th harmonic at one `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveKRow {
    pub m: f64,
    pub h5: std::result::Result<EliminationSolution, Error>,
    pub h7: std::result::Result<EliminationSolution, Error>,
}

pub fn sweep_solve_k(ms: &[f64], drive: &DriveConfig) -> Vec<SolveKRow> {
    ms.par_iter()
        .map(|&m| SolveKRow {
            m,
            h5: solve_k(m, 5, drive, K_TOL),
            h7: solve_k(m, 7, drive, K_TOL),
        })
        .collect()
}

/// Writes `m, k5, residual5, k7, residual7`; unsolved cells are `NA`.
pub fn write_solve_k_csv<W: Write>(mut out: W, rows: &[SolveKRow]) -> io::Result<()> {
    writeln!(out, "m,k5,residual5,k7,residual7")?;
    let cells = |sol: &std::result::Result<EliminationSolution, Error>| match sol {
        Ok(s) => format!("{:.10},{:.3e}", s.k, s.residual),
        Err(_) => "NA,NA".to_string(),
    };
    for r in rows {
        writeln!(out, "{},{},{}", r.m, cells(&r.h5), cells(&r.h7))?;
    }
    Ok(())
}
