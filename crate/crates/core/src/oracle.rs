//! Independent ground truth: fixed-step RK4 integration of the Van der Pol
//! equation, transient removal, and limit-cycle feature extraction.
//!
//! This path shares no numerics with the splitting solver (no periodic
//! grids, no resolvents), so agreement between the two is meaningful
//! validation. Fixed-step integration keeps stored regression values
//! bitwise reproducible.

use thiserror::Error;

use crate::signal::{PeriodicGrid, PeriodicSignal, SignalError};

/// State magnitude beyond which the integration is declared divergent
/// (signals a bad step size).
const DIVERGENCE_LIMIT: f64 = 1e6;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("trajectory diverged at t = {t:.3} (|state| > {DIVERGENCE_LIMIT:.0e}); reduce the step size")]
    Divergence { t: f64 },
    #[error("only {found} up-crossings after transient removal; increase t_end")]
    TooFewCrossings { found: usize },
    #[error("invalid oracle configuration: {0}")]
    BadConfig(String),
    #[error("waveforms have {left} vs {right} samples; resample before comparing")]
    LengthMismatch { left: usize, right: usize },
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Integration parameters for one oracle run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeRunConfig {
    pub step: f64,
    pub t_end: f64,
    /// Initial `(x, xdot)`.
    pub initial_state: (f64, f64),
}

impl OdeRunConfig {
    pub fn new(step: f64, t_end: f64, initial_state: (f64, f64)) -> Self {
        Self {
            step,
            t_end,
            initial_state,
        }
    }
}

/// A completed integration: the sampled `(x, xdot)` trajectory at spacing
/// `step`, starting from `t = 0`.
#[derive(Debug, Clone)]
pub struct OdeRun {
    pub k: f64,
    pub step: f64,
    pub t_end: f64,
    pub initial_state: (f64, f64),
    pub states: Vec<[f64; 2]>,
}

impl OdeRun {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let step = self.step;
        (0..self.states.len()).map(move |i| i as f64 * step)
    }

    /// Linear interpolation of `x` at an arbitrary time within the run.
    pub fn x_at(&self, t: f64) -> f64 {
        let u = (t / self.step).clamp(0.0, (self.states.len() - 1) as f64);
        let i = (u.floor() as usize).min(self.states.len() - 2);
        let frac = u - i as f64;
        (1.0 - frac) * self.states[i][0] + frac * self.states[i + 1][0]
    }
}

/// Features of the settled limit cycle.
#[derive(Debug, Clone)]
pub struct LimitCycleFeatures {
    /// Half the peak-to-peak range of `x`.
    pub amplitude: f64,
    /// Mean gap between consecutive late up-crossings.
    pub period: f64,
    /// One period starting at an up-crossing, resampled onto a periodic
    /// grid.
    pub waveform: PeriodicSignal,
}

/// Classical RK4 on the first-order Van der Pol form
/// `xdot = v, vdot = -x - K (x^2 - 1) v`. Deterministic for identical
/// inputs.
pub fn integrate_vdp(k: f64, cfg: &OdeRunConfig) -> Result<OdeRun, OracleError> {
    if !(cfg.step.is_finite() && cfg.step > 0.0) || !(cfg.t_end.is_finite() && cfg.t_end > 0.0) {
        return Err(OracleError::BadConfig(format!(
            "step {} and t_end {} must be positive",
            cfg.step, cfg.t_end
        )));
    }
    let rhs = |x: f64, v: f64| -> (f64, f64) { (v, -x - k * (x * x - 1.0) * v) };

    let n_steps = (cfg.t_end / cfg.step).round() as usize;
    let h = cfg.step;
    let mut states = Vec::with_capacity(n_steps + 1);
    let (mut x, mut v) = cfg.initial_state;
    states.push([x, v]);
    for i in 0..n_steps {
        let (k1x, k1v) = rhs(x, v);
        let (k2x, k2v) = rhs(x + 0.5 * h * k1x, v + 0.5 * h * k1v);
        let (k3x, k3v) = rhs(x + 0.5 * h * k2x, v + 0.5 * h * k2v);
        let (k4x, k4v) = rhs(x + h * k3x, v + h * k3v);
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if !x.is_finite() || !v.is_finite() || x.abs() > DIVERGENCE_LIMIT || v.abs() > DIVERGENCE_LIMIT
        {
            return Err(OracleError::Divergence {
                t: (i + 1) as f64 * h,
            });
        }
        states.push([x, v]);
    }
    Ok(OdeRun {
        k,
        step: cfg.step,
        t_end: cfg.t_end,
        initial_state: cfg.initial_state,
        states,
    })
}

/// Interpolated times of upward zero crossings of `x` within the index
/// range `[start, end)`.
fn up_crossings(run: &OdeRun, start: usize) -> Vec<f64> {
    let mut times = Vec::new();
    for i in start..run.states.len() - 1 {
        let a = run.states[i][0];
        let b = run.states[i + 1][0];
        if a < 0.0 && b >= 0.0 {
            times.push((i as f64 + a / (a - b)) * run.step);
        }
    }
    times
}

/// Discards the leading `discard_fraction` of the run as transient, then
/// measures the cycle period (mean up-crossing gap), amplitude (half
/// peak-to-peak of the kept segment) and one period of the waveform
/// resampled to `resample_n` points starting at an up-crossing.
pub fn extract_limit_cycle(
    run: &OdeRun,
    discard_fraction: f64,
    resample_n: usize,
) -> Result<LimitCycleFeatures, OracleError> {
    if !(0.0..1.0).contains(&discard_fraction) {
        return Err(OracleError::BadConfig(format!(
            "discard fraction must be in [0, 1), got {discard_fraction}"
        )));
    }
    let start = ((run.states.len() as f64) * discard_fraction) as usize;
    let crossings = up_crossings(run, start);
    if crossings.len() < 4 {
        return Err(OracleError::TooFewCrossings {
            found: crossings.len(),
        });
    }
    let period =
        (crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64;

    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for s in &run.states[start..] {
        min = min.min(s[0]);
        max = max.max(s[0]);
    }
    let amplitude = 0.5 * (max - min);

    let grid = PeriodicGrid::new(period, resample_n)?;
    let t0 = crossings[0];
    let samples: Vec<f64> = (0..resample_n)
        .map(|j| run.x_at(t0 + period * j as f64 / resample_n as f64))
        .collect();
    let waveform = PeriodicSignal::new(grid, samples)?;

    Ok(LimitCycleFeatures {
        amplitude,
        period,
        waveform,
    })
}

/// Best-cyclic-shift RMS distance between two equal-length waveforms,
/// normalized by `norm(a)/sqrt(N)`. Returns `(normalized_rms, shift)`
/// where `shift` is the cyclic delay of `b` relative to `a` in time
/// units of `a`'s grid.
pub fn compare_waveforms(
    a: &PeriodicSignal,
    b: &PeriodicSignal,
) -> Result<(f64, f64), OracleError> {
    if a.len() != b.len() {
        return Err(OracleError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    let av = a.samples();
    let bv = b.samples();
    let mut best = f64::INFINITY;
    let mut best_shift = 0usize;
    for shift in 0..n {
        let mut acc = 0.0;
        for k in 0..n {
            let d = av[k] - bv[(k + shift) % n];
            acc += d * d;
        }
        if acc < best {
            best = acc;
            best_shift = shift;
        }
    }
    let scale = a.norm();
    let rms = if scale > 0.0 {
        best.sqrt() / scale
    } else {
        (best / n as f64).sqrt()
    };
    Ok((rms, best_shift as f64 * a.grid().step()))
}
