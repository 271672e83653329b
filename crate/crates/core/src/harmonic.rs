//! Exact Fourier analysis of switched waveforms, the dwell-division
//! coefficient solver and total harmonic distortion.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::svpwm::{check_m, pole_voltage_waveform, DriveConfig, SequenceKind, SequenceSpec};
use crate::waveform::{PiecewiseConstant, PiecewiseLinear};

/// `(e^z - 1) / z`
fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        // sum z^k / (k+1)!
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..40 {
            term *= z / (k as f64 + 1.0);
            sum += term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `∫_0^1 u e^{z u} du = (z e^z - e^z + 1) / z²`
fn phi_ramp(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        // sum z^k (k+1) / (k+2)!
        let mut pow_over_fact = Complex64::new(0.5, 0.0); // z^k / (k+2)!
        let mut sum = pow_over_fact;
        for k in 1..40 {
            pow_over_fact *= z / (k as f64 + 2.0);
            let term = pow_over_fact * (k as f64 + 1.0);
            sum += term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        sum
    } else {
        let ez = z.exp();
        (z * ez - ez + 1.0) / (z * z)
    }
}

/// Complex Fourier-series coefficient `c_n` of a periodic piecewise-constant
/// signal, integrated exactly segment by segment.
pub fn fourier_coefficient(w: &PiecewiseConstant, n: u32) -> Complex64 {
    let period = w.period();
    if n == 0 {
        let area: f64 = w.segments().map(|(_, d, v)| d * v).sum();
        return Complex64::new(area / period, 0.0);
    }
    // the mean contributes nothing for n >= 1; removing it keeps DC offsets
    // from leaking in through rounding
    let mean = fourier_coefficient(w, 0).re;
    let omega = 2.0 * PI * f64::from(n) / period;
    let mut acc = Complex64::new(0.0, 0.0);
    for (t0, d, level) in w.segments() {
        let level = level - mean;
        if d <= 0.0 || level == 0.0 {
            continue;
        }
        let z = Complex64::new(0.0, -omega * d);
        acc += Complex64::from_polar(level * d, -omega * t0) * phi1(z);
    }
    acc / period
}

/// `c_n` of a piecewise-linear signal whose span is taken as one period.
pub fn fourier_coefficient_linear(w: &PiecewiseLinear, n: u32) -> Complex64 {
    let period = w.span();
    let omega = 2.0 * PI * f64::from(n) / period;
    let mut acc = Complex64::new(0.0, 0.0);
    // records usually repeat one step length (up to rounding of the sample
    // times), so the kernels and the per-piece rotation are cached and the
    // phase advances by recurrence, re-anchored every 256 pieces
    let mut cached_h = f64::NAN;
    let (mut k1, mut kr, mut step) = (
        Complex64::default(),
        Complex64::default(),
        Complex64::default(),
    );
    let mut rot = Complex64::default();
    for (i, (t0, y0, t1, y1)) in w.pieces().enumerate() {
        let h = t1 - t0;
        if (h - cached_h).abs() > 1e-9 * h || cached_h.is_nan() {
            let z = Complex64::new(0.0, -omega * h);
            k1 = phi1(z);
            kr = phi_ramp(z);
            step = Complex64::from_polar(1.0, -omega * h);
            cached_h = h;
        }
        if i % 256 == 0 {
            rot = Complex64::from_polar(1.0, -omega * t0);
        }
        acc += rot * h * (k1 * y0 + kr * (y1 - y0));
        rot *= step;
    }
    acc / period
}

/// Harmonic content `c_1..c_{n_max}` of a periodic signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub fundamental_hz: f64,
    /// `coefficients[n - 1]` is `c_n`.
    pub coefficients: Vec<Complex64>,
    /// RMS of the fundamental, `√2·|c_1|`.
    pub reference_rms: f64,
}

impl SpectrumResult {
    fn from_coefficients(fundamental_hz: f64, coefficients: Vec<Complex64>) -> Self {
        let reference_rms = std::f64::consts::SQRT_2 * coefficients[0].norm();
        Self {
            fundamental_hz,
            coefficients,
            reference_rms,
        }
    }

    pub fn n_max(&self) -> u32 {
        self.coefficients.len() as u32
    }

    /// `c_n` for `1 <= n <= n_max`.
    pub fn coefficient(&self, n: u32) -> Option<Complex64> {
        n.checked_sub(1)
            .and_then(|i| self.coefficients.get(i as usize))
            .copied()
    }

    pub fn magnitude(&self, n: u32) -> f64 {
        self.coefficient(n).map_or(0.0, |c| c.norm())
    }

    /// RMS of harmonic `n` (`√2·|c_n|`).
    pub fn rms(&self, n: u32) -> f64 {
        std::f64::consts::SQRT_2 * self.magnitude(n)
    }

    /// `|c_n| / |c_1|`.
    pub fn relative(&self, n: u32) -> f64 {
        self.magnitude(n) / self.coefficients[0].norm()
    }

    /// Writes `n, magnitude, phase_rad, magnitude_rel_fundamental`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,magnitude,phase_rad,magnitude_rel_fundamental")?;
        let c1 = self.coefficients[0].norm();
        for (i, c) in self.coefficients.iter().enumerate() {
            let rel = if c1 > 0.0 { c.norm() / c1 } else { f64::NAN };
            writeln!(
                out,
                "{},{:.12e},{:.12e},{:.12e}",
                i + 1,
                c.norm(),
                c.arg(),
                rel
            )?;
        }
        Ok(())
    }
}

fn check_n_max(n_max: u32) -> Result<()> {
    if n_max == 0 {
        return Err(Error::domain("n_max", 0.0, ">= 1"));
    }
    Ok(())
}

pub fn spectrum(w: &PiecewiseConstant, n_max: u32) -> Result<SpectrumResult> {
    check_n_max(n_max)?;
    let coefficients = (1..=n_max).map(|n| fourier_coefficient(w, n)).collect();
    Ok(SpectrumResult::from_coefficients(
        1.0 / w.period(),
        coefficients,
    ))
}

/// Spectrum of a piecewise-linear record spanning exactly one period.
pub fn spectrum_linear(w: &PiecewiseLinear, n_max: u32) -> Result<SpectrumResult> {
    check_n_max(n_max)?;
    if w.span() <= 0.0 {
        return Err(Error::EmptyWaveform);
    }
    let coefficients = (1..=n_max)
        .map(|n| fourier_coefficient_linear(w, n))
        .collect();
    Ok(SpectrumResult::from_coefficients(
        1.0 / w.span(),
        coefficients,
    ))
}

/// Harmonic order range used for THD unless configured otherwise.
pub const DEFAULT_THD_ORDERS: u32 = 49;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thd {
    /// `100·sqrt(Σ I_n²) / I_1`.
    pub percent: f64,
    /// `100·Σ I_n / I_1`, the unsquared sum, kept as a diagnostic.
    pub linear_sum_percent: f64,
}

/// THD over orders `2..=n_max`.
pub fn thd(s: &SpectrumResult, n_max: u32) -> Result<Thd> {
    if n_max > s.n_max() {
        return Err(Error::domain(
            "n_max",
            f64::from(n_max),
            "<= spectrum order",
        ));
    }
    let i1 = s.magnitude(1);
    if i1.is_nan() || i1 <= 0.0 {
        return Err(Error::ZeroFundamental);
    }
    let (sq, lin) = (2..=n_max).fold((0.0, 0.0), |(sq, lin), n| {
        let a = s.magnitude(n);
        (sq + a * a, lin + a)
    });
    Ok(Thd {
        percent: 100.0 * sq.sqrt() / i1,
        linear_sum_percent: 100.0 * lin / i1,
    })
}

/// Solved dwell-division coefficient for one harmonic.
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationSolution {
    pub k: f64,
    pub target_harmonic: u32,
    /// `|c_target| / |c_1|` of the phase-a pole voltage at `k`.
    pub residual: f64,
    pub m: f64,
    /// Every root found on the scan, ascending; `k` is the one nearest 0.5.
    pub roots: Vec<f64>,
}

/// Scan and bisection settings for [`solve_k_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KSearch {
    pub lo: f64,
    pub hi: f64,
    /// Number of scan intervals.
    pub intervals: usize,
    /// Bisection stops when the bracket is narrower than this.
    pub tol: f64,
}

impl Default for KSearch {
    fn default() -> Self {
        Self {
            lo: 1e-6,
            hi: 1.0 - 1e-6,
            intervals: 1000,
            tol: 1e-9,
        }
    }
}

/// Target harmonic of the SVHE phase-a pole voltage, phase-aligned to the
/// fundamental and normalised by `|c_1|`. Real-valued up to rounding; its
/// sign change in `k` marks an elimination.
pub fn aligned_harmonic(m: f64, k: f64, target: u32, drive: &DriveConfig) -> Result<Complex64> {
    let w = pole_voltage_waveform(&SequenceSpec::of(SequenceKind::Svhe), m, k, drive)?;
    let va = w.pole_voltage(0);
    let c1 = fourier_coefficient(&va, 1);
    let cn = fourier_coefficient(&va, target);
    let unit = c1 / c1.norm();
    Ok(cn * unit.conj().powu(target) / c1.norm())
}

/// Dwell-division coefficient that removes harmonic `target` at index `m`.
pub fn solve_k(m: f64, target: u32, drive: &DriveConfig, tol: f64) -> Result<EliminationSolution> {
    solve_k_with(
        m,
        target,
        drive,
        KSearch {
            tol,
            ..KSearch::default()
        },
    )
}

pub fn solve_k_with(
    m: f64,
    target: u32,
    drive: &DriveConfig,
    search: KSearch,
) -> Result<EliminationSolution> {
    check_m(m)?;
    if target < 2 {
        return Err(Error::domain("target", f64::from(target), ">= 2"));
    }
    if search.tol.is_nan() || search.tol <= 0.0 {
        return Err(Error::domain("tol", search.tol, "> 0"));
    }
    if !(search.lo > 0.0 && search.hi < 1.0 && search.lo < search.hi && search.intervals > 0) {
        return Err(Error::domain("search", search.lo, "0 < lo < hi < 1"));
    }
    let g = |k: f64| aligned_harmonic(m, k, target, drive).map(|c| c.re);

    let step = (search.hi - search.lo) / search.intervals as f64;
    let ks: Vec<f64> = (0..=search.intervals)
        .map(|i| search.lo + step * i as f64)
        .collect();
    let values = ks.iter().map(|&k| g(k)).collect::<Result<Vec<f64>>>()?;

    let mut roots = Vec::new();
    for i in 0..search.intervals {
        let (a, b) = (values[i], values[i + 1]);
        if a == 0.0 {
            roots.push(ks[i]);
        } else if a * b < 0.0 {
            roots.push(bisect(&g, ks[i], ks[i + 1], a, search.tol)?);
        }
    }
    if values[search.intervals] == 0.0 {
        roots.push(ks[search.intervals]);
    }

    let Some(&k) = roots
        .iter()
        .min_by(|a, b| (*a - 0.5).abs().total_cmp(&(*b - 0.5).abs()))
    else {
        let (i, v) = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .expect("scan is non-empty");
        return Err(Error::NoEliminationSolution {
            m,
            target,
            scan_min: v.abs(),
            scan_min_k: ks[i],
        });
    };
    let residual = aligned_harmonic(m, k, target, drive)?.norm();
    Ok(EliminationSolution {
        k,
        target_harmonic: target,
        residual,
        m,
        roots,
    })
}

fn bisect(
    g: &impl Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    mut ga: f64,
    tol: f64,
) -> Result<f64> {
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
