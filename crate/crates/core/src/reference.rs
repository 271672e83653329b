//! Reference operating data for the default 7.5 kW machine.
//!
//! The tables hold published peak-to-peak torque-ripple magnitudes (N·m) and
//! no-load line-current THD (%) for the four sequences over the modulation
//! indices 0.6..=0.95. [`DEFAULT_V_DC`] is the DC-link voltage that makes the
//! analytic torque ripple of this crate fit the ripple table best.

/// DC link voltage, V, for the default machine with four poles at 50 Hz.
///
/// Torque ripple scales with `v_dc²`, so the fit is linear in `v_dc²`:
/// `v_dc² = Σ r_i / Σ r_i²` with `r_i = predicted_i(v_dc = 1) / reference_i`
/// over all 48 cells of [`TORQUE_RIPPLE_NM`] (least squares on relative
/// error). `report::calibrate_v_dc` recomputes it.
pub const DEFAULT_V_DC: f64 = 563.01;

/// Modulation indices of the reference tables.
pub const MODULATION_INDICES: [f64; 8] = [0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95];

/// Peak-to-peak torque ripple per sequence column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RippleReference {
    pub m: f64,
    pub csv: f64,
    pub abc1: f64,
    pub abc2: f64,
    /// SVHE with `k = 0.5`.
    pub svhe_half: f64,
    /// SVHE with the 5th harmonic eliminated.
    pub svhe_h5: f64,
    /// SVHE with the 7th harmonic eliminated.
    pub svhe_h7: f64,
}

impl RippleReference {
    pub fn columns(&self) -> [f64; 6] {
        [
            self.csv,
            self.abc1,
            self.abc2,
            self.svhe_half,
            self.svhe_h5,
            self.svhe_h7,
        ]
    }
}

const fn ripple(m: f64, c: [f64; 6]) -> RippleReference {
    RippleReference {
        m,
        csv: c[0],
        abc1: c[1],
        abc2: c[2],
        svhe_half: c[3],
        svhe_h5: c[4],
        svhe_h7: c[5],
    }
}

pub const TORQUE_RIPPLE_NM: [RippleReference; 8] = [
    ripple(0.6, [20.066, 55.046, 55.07, 27.57, 27.57, 27.57]),
    ripple(0.65, [17.011, 48.547, 48.618, 24.4, 24.4, 24.4]),
    ripple(0.7, [14.958, 42.442, 42.432, 21.24, 21.24, 21.24]),
    ripple(0.75, [13.025, 36.066, 36.038, 18.06, 18.06, 18.06]),
    ripple(0.8, [11.7, 29.723, 29.588, 14.9, 14.9, 14.9]),
    ripple(0.85, [10.432, 23.719, 23.741, 11.74, 11.74, 11.74]),
    ripple(0.9, [9.136, 17.763, 17.812, 8.569, 8.569, 8.569]),
    ripple(0.95, [7.844, 11.893, 11.908, 5.398, 5.756, 5.942]),
];

/// No-load line-current THD per column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThdReference {
    pub m: f64,
    pub csv: f64,
    pub svhe_half: f64,
    pub svhe_h5: f64,
    pub svhe_h7: f64,
}

impl ThdReference {
    pub fn columns(&self) -> [f64; 4] {
        [self.csv, self.svhe_half, self.svhe_h5, self.svhe_h7]
    }
}

const fn thd(m: f64, c: [f64; 4]) -> ThdReference {
    ThdReference {
        m,
        csv: c[0],
        svhe_half: c[1],
        svhe_h5: c[2],
        svhe_h7: c[3],
    }
}

pub const LINE_CURRENT_THD_PCT: [ThdReference; 8] = [
    thd(0.6, [71.84, 87.83, 84.57, 97.71]),
    thd(0.65, [68.32, 79.67, 75.96, 90.96]),
    thd(0.7, [65.12, 71.85, 67.58, 84.34]),
    thd(0.75, [62.32, 64.45, 59.48, 78.23]),
    thd(0.8, [59.95, 57.82, 52.01, 72.64]),
    thd(0.85, [58.06, 52.22, 45.36, 67.68]),
    thd(0.9, [56.9, 47.62, 39.67, 63.31]),
    thd(0.95, [56.43, 44.84, 35.78, 60.03]),
];

/// Crossover modulation index between SVHE and CSV torque ripple.
pub const CROSSOVER_M: f64 = 0.8847;
