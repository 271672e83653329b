//! Piecewise waveforms shared by the modulation, ripple and simulation modules.

use crate::error::{Error, Result};

/// A periodic piecewise-constant signal given by its breakpoints.
///
/// Segment `i` holds `level` from its start time until the next breakpoint;
/// the last segment runs to `origin + period`, where `origin` is the first
/// breakpoint time.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    period: f64,
    breakpoints: Vec<(f64, f64)>,
}

impl PiecewiseConstant {
    pub fn new(period: f64, breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::EmptyWaveform);
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::domain("period", period, "> 0"));
        }
        let origin = breakpoints[0].0;
        for w in breakpoints.windows(2) {
            if w[1].0 < w[0].0 {
                return Err(Error::domain("breakpoint", w[1].0, "non-decreasing times"));
            }
        }
        let last = breakpoints[breakpoints.len() - 1].0;
        if last > origin + period {
            return Err(Error::domain("breakpoint", last, "within one period"));
        }
        Ok(Self {
            period,
            breakpoints,
        })
    }

    /// A single level held over the whole period.
    pub fn constant(period: f64, level: f64) -> Result<Self> {
        Self::new(period, vec![(0.0, level)])
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn origin(&self) -> f64 {
        self.breakpoints[0].0
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    /// `(start, duration, level)` for every segment, including zero-length ones.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let end = self.origin() + self.period;
        self.breakpoints
            .iter()
            .enumerate()
            .map(move |(i, &(t, level))| {
                let next = self.breakpoints.get(i + 1).map_or(end, |b| b.0);
                (t, next - t, level)
            })
    }

    /// Value at `t`, extended periodically. At a breakpoint the new level applies.
    pub fn value_at(&self, t: f64) -> f64 {
        let origin = self.origin();
        let tau = origin + (t - origin).rem_euclid(self.period);
        let idx = self.breakpoints.partition_point(|&(s, _)| s <= tau);
        self.breakpoints[idx.saturating_sub(1)].1
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            period: self.period,
            breakpoints: self
                .breakpoints
                .iter()
                .map(|&(t, v)| (t, v * factor))
                .collect(),
        }
    }

    /// The same signal delayed by `delta` seconds.
    pub fn delayed(&self, delta: f64) -> Self {
        Self {
            period: self.period,
            breakpoints: self
                .breakpoints
                .iter()
                .map(|&(t, v)| (t + delta, v))
                .collect(),
        }
    }

    /// Number of level changes over one period, counting the wrap-around
    /// only when the last level differs from the first.
    pub fn transitions(&self) -> usize {
        let levels: Vec<f64> = self
            .segments()
            .filter(|&(_, d, _)| d > 0.0)
            .map(|(_, _, v)| v)
            .collect();
        if levels.len() < 2 {
            return 0;
        }
        let inner = levels.windows(2).filter(|w| w[0] != w[1]).count();
        inner + usize::from(levels[0] != levels[levels.len() - 1])
    }
}

/// A continuous piecewise-linear signal through `(t, y)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    points: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyWaveform);
        }
        for w in points.windows(2) {
            if w[1].0 < w[0].0 {
                return Err(Error::domain("point", w[1].0, "non-decreasing times"));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn start(&self) -> f64 {
        self.points[0].0
    }

    pub fn end(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    pub fn span(&self) -> f64 {
        self.end() - self.start()
    }

    pub fn max(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.1)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.1)
            .fold(f64::INFINITY, f64::min)
    }

    /// Linear interpolation; clamps outside the span.
    pub fn value_at(&self, t: f64) -> f64 {
        let idx = self.points.partition_point(|&(s, _)| s <= t);
        if idx == 0 {
            return self.points[0].1;
        }
        if idx == self.points.len() {
            return self.points[idx - 1].1;
        }
        let (t0, y0) = self.points[idx - 1];
        let (t1, y1) = self.points[idx];
        if t1 == t0 {
            return y1;
        }
        y0 + (y1 - y0) * (t - t0) / (t1 - t0)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            points: self.points.iter().map(|&(t, y)| (t, f(y))).collect(),
        }
    }

    /// Non-degenerate linear pieces as `(t0, y0, t1, y1)`.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.points
            .windows(2)
            .filter(|w| w[1].0 > w[0].0)
            .map(|w| (w[0].0, w[0].1, w[1].0, w[1].1))
    }
}
