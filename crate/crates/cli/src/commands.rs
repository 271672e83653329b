use std::fmt::Write as _;

use svhe_core::reference::{
    CROSSOVER_M, LINE_CURRENT_THD_PCT, MODULATION_INDICES, TORQUE_RIPPLE_NM,
};
use svhe_core::report::{
    calibrate_v_dc, sweep_ripple, sweep_solve_k, sweep_thd, write_ripple_csv, write_solve_k_csv,
    write_thd_csv, Calibration, RippleRow, SolveKRow, ThdRow,
};
use svhe_core::ripple::{
    crossover_m, cycle_flux_ripple, peak_to_peak, sector_flux_ripple, torque_per_flux,
};
use svhe_core::svpwm::{pole_voltage_waveform, switching_count};
use svhe_core::SequenceSpec;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{write_csv, write_text};

/// Calibration RMS residual above which sweeps warn.
const CALIBRATION_WARN: f64 = 0.05;

fn single_m(cfg: &RunConfig) -> Result<f64, CliError> {
    match cfg.ms.as_deref() {
        None => Ok(0.8),
        Some([m]) => Ok(*m),
        Some(list) => Err(CliError::Usage(format!(
            "waveform takes a single m, got {} values",
            list.len()
        ))),
    }
}

fn m_list(cfg: &RunConfig) -> Vec<f64> {
    cfg.ms
        .clone()
        .unwrap_or_else(|| MODULATION_INDICES.to_vec())
}

pub fn waveform(cfg: &RunConfig) -> Result<(), CliError> {
    let hash = cfg.hash("waveform");
    let m = single_m(cfg)?;
    let seq = SequenceSpec::of(cfg.seq);
    let k = if seq.uses_k() {
        cfg.k.resolve(m, &cfg.drive)?
    } else {
        0.5
    };
    let w = pole_voltage_waveform(&seq, m, k, &cfg.drive)?;
    let cycle = cycle_flux_ripple(&seq, m, k, &cfg.drive)?;
    let sector = sector_flux_ripple(&seq, m, k, &cfg.drive)?;
    let scale = torque_per_flux(&cfg.machine, m, &cfg.drive)?;

    let name = cfg.seq.name();
    let dir = &cfg.out_dir;
    let files = [
        write_csv(dir, &format!("{name}_pole_voltage.csv"), &hash, |o| {
            w.write_csv(o)
        })?,
        write_csv(dir, &format!("{name}_flux_ripple.csv"), &hash, |o| {
            cycle.write_csv(o, scale)
        })?,
        write_csv(dir, &format!("{name}_torque_ripple.csv"), &hash, |o| {
            sector.write_csv(o, scale)
        })?,
    ];
    let ts = seq.subcycle_duration(m, &cfg.drive);
    println!(
        "{name} m={m} k={k:.10} Ts={ts:.6e} s switchings/phase={} torque_pp={:.4} N·m",
        switching_count(&w).per_phase[0],
        peak_to_peak(&sector.q()) * scale
    );
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn check_calibration(cfg: &RunConfig) -> Result<Calibration, CliError> {
    let cal = calibrate_v_dc(&cfg.machine, cfg.drive.f_base)?;
    if cal.rms_residual > CALIBRATION_WARN {
        eprintln!(
            "warning: reference ripple table fit is poor for this machine \
             (rms residual {:.1}%, best v_dc {:.2} V)",
            100.0 * cal.rms_residual,
            cal.v_dc
        );
    }
    Ok(cal)
}

fn ripple_table(cfg: &RunConfig, hash: &str) -> Result<Vec<RippleRow>, CliError> {
    let rows = sweep_ripple(&m_list(cfg), &cfg.machine, &cfg.drive)?;
    let path = write_csv(&cfg.out_dir, "ripple_table.csv", hash, |o| {
        write_ripple_csv(o, &rows)
    })?;
    println!("wrote {}", path.display());
    Ok(rows)
}

pub fn sweep_ripple_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    check_calibration(cfg)?;
    ripple_table(cfg, &cfg.hash("sweep-ripple"))?;
    Ok(())
}

fn thd_table(cfg: &RunConfig, hash: &str) -> Result<Vec<ThdRow>, CliError> {
    let rows = sweep_thd(&m_list(cfg), &cfg.machine, &cfg.drive, &cfg.sim);
    let names = ["csv", "svhe", "svhe_h5", "svhe_h7"];
    for r in &rows {
        for (name, c) in names.iter().zip(r.columns()) {
            if c.is_none() {
                eprintln!(
                    "warning: m={} {name}: simulation failed, cell marked NA",
                    r.m
                );
            }
        }
    }
    let path = write_csv(&cfg.out_dir, "thd_table.csv", hash, |o| {
        write_thd_csv(o, &rows)
    })?;
    println!("wrote {}", path.display());
    Ok(rows)
}

pub fn sweep_thd_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    thd_table(cfg, &cfg.hash("sweep-thd"))?;
    Ok(())
}

fn solve_k_table(cfg: &RunConfig, hash: &str) -> Result<Vec<SolveKRow>, CliError> {
    let rows = sweep_solve_k(&m_list(cfg), &cfg.drive);
    let path = write_csv(&cfg.out_dir, "solve_k.csv", hash, |o| {
        write_solve_k_csv(o, &rows)
    })?;
    for r in &rows {
        let show = |s: &Result<svhe_core::EliminationSolution, svhe_core::Error>| match s {
            Ok(s) => format!("{:.6} ({:.1e})", s.k, s.residual),
            Err(_) => "none".to_string(),
        };
        println!("m={:<5} k5={:<22} k7={}", r.m, show(&r.h5), show(&r.h7));
    }
    println!("wrote {}", path.display());
    Ok(rows)
}

pub fn solve_k_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    solve_k_table(cfg, &cfg.hash("solve-k"))?;
    Ok(())
}

pub fn crossover_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    println!("{:.4}", crossover_m(cfg.alpha1, cfg.alpha2)?);
    Ok(())
}

fn percent(got: Option<f64>, want: f64) -> String {
    got.map_or_else(
        || "NA".to_string(),
        |g| format!("{:+.2}%", 100.0 * (g / want - 1.0)),
    )
}

/// Runs every analysis and writes a plain-text summary next to the tables.
pub fn report(cfg: &RunConfig) -> Result<(), CliError> {
    let hash = cfg.hash("report");
    let cross = crossover_m(cfg.alpha1, cfg.alpha2)?;
    let cal = check_calibration(cfg)?;
    let k_rows = solve_k_table(cfg, &hash)?;
    let ripple = ripple_table(cfg, &hash)?;
    let thd = thd_table(cfg, &hash)?;

    let mut s = String::new();
    let _ = writeln!(s, "{}", crate::output::comment_line(&hash));
    let _ = writeln!(
        s,
        "crossover m({}°, {}°) = {cross:.4}",
        cfg.alpha1, cfg.alpha2
    );
    let _ = writeln!(s, "reference crossover = {CROSSOVER_M}");
    let _ = writeln!(
        s,
        "v_dc in use = {:.2} V; table fit = {:.2} V (rms {:.2}%, spread {:.2}%)",
        cfg.drive.v_dc,
        cal.v_dc,
        100.0 * cal.rms_residual,
        100.0 * cal.spread
    );
    let solved = k_rows
        .iter()
        .map(|r| usize::from(r.h5.is_ok()) + usize::from(r.h7.is_ok()))
        .sum::<usize>();
    let _ = writeln!(s, "k solutions: {solved} of {}", 2 * k_rows.len());

    let _ = writeln!(s, "\ntorque ripple vs reference (csv abc1 abc2 svhe h5 h7)");
    for row in &ripple {
        if let Some(r) = TORQUE_RIPPLE_NM.iter().find(|r| (r.m - row.m).abs() < 1e-9) {
            let cells: Vec<String> = row
                .columns()
                .iter()
                .zip(r.columns())
                .map(|(&g, w)| percent(g, w))
                .collect();
            let _ = writeln!(s, "m={:<5} {}", row.m, cells.join(" "));
        }
    }
    let _ = writeln!(s, "\nline-current THD vs reference (csv svhe h5 h7)");
    for row in &thd {
        if let Some(r) = LINE_CURRENT_THD_PCT
            .iter()
            .find(|r| (r.m - row.m).abs() < 1e-9)
        {
            let cells: Vec<String> = row
                .columns()
                .iter()
                .zip(r.columns())
                .map(|(&g, w)| percent(g, w))
                .collect();
            let _ = writeln!(s, "m={:<5} {}", row.m, cells.join(" "));
        }
    }
    let path = write_text(&cfg.out_dir, "report.txt", &s)?;
    print!("{s}");
    println!("wrote {}", path.display());
    Ok(())
}
