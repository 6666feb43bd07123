//! T-periodic, square-summable signals on a uniform grid, with the inner
//! product and the periodic central-difference operators every other module
//! builds on.
//!
//! Indexing is cyclic everywhere: `sample[-1] == sample[N-1]` and
//! `sample[N] == sample[0]`. The periodicity conditions of the difference
//! stencils are realized as index wraparound, never as ghost cells.

use std::fmt;
use std::io::Write;

use thiserror::Error;

/// Denominator floor used by [`PeriodicSignal::relative_change_from`] when
/// the reference iterate is identically zero.
pub const RELATIVE_CHANGE_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SignalError {
    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: PeriodicGrid, right: PeriodicGrid },
    #[error("invalid grid: period {period}, {len} samples (need finite period > 0 and N >= 4)")]
    InvalidGrid { period: f64, len: usize },
    #[error("sample count {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite sample at index {index}: {value}")]
    NonFiniteSample { index: usize, value: f64 },
    #[error("csv parse error at line {line}: {message}")]
    CsvParse { line: usize, message: String },
}

/// Uniform discretization of one period `[0, T)` into `N` samples of
/// spacing `h = T / N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid {
    period: f64,
    len: usize,
}

impl PeriodicGrid {
    /// Central differences and zero-crossing detection need at least this
    /// many samples.
    pub const MIN_SAMPLES: usize = 4;

    pub fn new(period: f64, len: usize) -> Result<Self, SignalError> {
        if !(period.is_finite() && period > 0.0) || len < Self::MIN_SAMPLES {
            return Err(SignalError::InvalidGrid { period, len });
        }
        Ok(Self { period, len })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sample spacing `h = T / N`.
    pub fn step(&self) -> f64 {
        self.period / self.len as f64
    }

    /// Time of the k-th sample, `k * h`.
    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.step()
    }
}

impl fmt::Display for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(T={}, N={})", self.period, self.len)
    }
}

/// A T-periodic signal: `N` real samples on a [`PeriodicGrid`].
///
/// Value-semantic and immutable once constructed; every operation returns a
/// new signal. All samples are finite by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSignal {
    grid: PeriodicGrid,
    samples: Vec<f64>,
}

impl PeriodicSignal {
    pub fn new(grid: PeriodicGrid, samples: Vec<f64>) -> Result<Self, SignalError> {
        if samples.len() != grid.len() {
            return Err(SignalError::LengthMismatch {
                expected: grid.len(),
                got: samples.len(),
            });
        }
        for (index, &value) in samples.iter().enumerate() {
            if !value.is_finite() {
                return Err(SignalError::NonFiniteSample { index, value });
            }
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        Self {
            grid,
            samples: vec![0.0; grid.len()],
        }
    }

    /// Sample `f` at the grid times `k * h`.
    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(f64) -> f64) -> Result<Self, SignalError> {
        let samples = (0..grid.len()).map(|k| f(grid.time(k))).collect();
        Self::new(grid, samples)
    }

    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Cyclic access: any integer index wraps into `0..N`.
    pub fn at(&self, index: isize) -> f64 {
        let n = self.samples.len() as isize;
        let wrapped = index.rem_euclid(n) as usize;
        self.samples[wrapped]
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |acc, &v| acc.max(v.abs()))
    }

    pub fn min_max(&self) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in &self.samples {
            min = min.min(v);
            max = max.max(v);
        }
        (min, max)
    }

    fn check_same_grid(&self, other: &Self) -> Result<(), SignalError> {
        if self.grid != other.grid {
            return Err(SignalError::GridMismatch {
                left: self.grid,
                right: other.grid,
            });
        }
        Ok(())
    }

    /// Sequence-space inner product `Σ_n a[n] b[n]` (no `h` weight).
    pub fn inner_product(&self, other: &Self) -> Result<f64, SignalError> {
        self.check_same_grid(other)?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// `sqrt(<a, a>)`; zero iff the signal is identically zero.
    pub fn norm(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// First derivative by the periodic central-difference stencil
    /// `(x[k+1] - x[k-1]) / 2h`. The induced matrix is circulant and
    /// antisymmetric.
    pub fn diff1(&self) -> Self {
        let n = self.samples.len();
        let two_h = 2.0 * self.grid.step();
        let samples = (0..n)
            .map(|k| (self.samples[(k + 1) % n] - self.samples[(k + n - 1) % n]) / two_h)
            .collect();
        Self {
            grid: self.grid,
            samples,
        }
    }

    /// Second derivative by the periodic stencil
    /// `(x[k+1] - 2x[k] + x[k-1]) / h^2`. The induced matrix is circulant,
    /// symmetric and negative semidefinite.
    pub fn diff2(&self) -> Self {
        let n = self.samples.len();
        let h2 = self.grid.step() * self.grid.step();
        let samples = (0..n)
            .map(|k| {
                (self.samples[(k + 1) % n] - 2.0 * self.samples[k]
                    + self.samples[(k + n - 1) % n])
                    / h2
            })
            .collect();
        Self {
            grid: self.grid,
            samples,
        }
    }

    /// Max-norm relative change `max|new - old| / max(max|old|, floor)`.
    ///
    /// The floor guards the all-zero reference iterate, in which case the
    /// result is huge and forces the caller to continue iterating.
    pub fn relative_change_from(&self, old: &Self, floor: f64) -> Result<f64, SignalError> {
        self.check_same_grid(old)?;
        let max_delta = self
            .samples
            .iter()
            .zip(&old.samples)
            .fold(0.0f64, |acc, (n, o)| acc.max((n - o).abs()));
        Ok(max_delta / old.max_abs().max(floor))
    }

    /// Linearly interpolated times `t in [0, T)` where the signal changes
    /// sign between adjacent samples. An exact-zero sample counts as one
    /// crossing at its own time; a constant-sign signal yields none.
    pub fn zero_crossings(&self) -> Vec<f64> {
        let n = self.samples.len();
        let h = self.grid.step();
        let mut crossings = Vec::new();
        for k in 0..n {
            let a = self.samples[k];
            let b = self.samples[(k + 1) % n];
            if a == 0.0 {
                let prev = self.samples[(k + n - 1) % n];
                if prev != 0.0 || b != 0.0 {
                    crossings.push(k as f64 * h);
                }
            } else if a * b < 0.0 {
                crossings.push(k as f64 * h + h * a / (a - b));
            }
        }
        crossings
    }

    /// Value at an arbitrary time by periodic linear interpolation.
    pub fn interp(&self, t: f64) -> f64 {
        let n = self.samples.len();
        let h = self.grid.step();
        let u = (t / h).rem_euclid(n as f64);
        let i = u.floor() as usize % n;
        let frac = u - u.floor();
        (1.0 - frac) * self.samples[i] + frac * self.samples[(i + 1) % n]
    }

    /// Resample onto a grid with the given period and sample count by
    /// periodic linear interpolation of this signal.
    pub fn resample(&self, grid: PeriodicGrid) -> Self {
        let samples = (0..grid.len())
            .map(|k| {
                // Map the new grid position proportionally into the old period.
                let t = grid.time(k) / grid.period() * self.grid.period();
                self.interp(t)
            })
            .collect();
        Self {
            grid,
            samples,
        }
    }

    /// Cyclic shift by `m` samples: `out[k] = self[k + m]`.
    pub fn shifted(&self, m: isize) -> Self {
        let n = self.samples.len();
        let samples = (0..n).map(|k| self.at(k as isize + m)).collect();
        Self {
            grid: self.grid,
            samples,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        let samples = self.samples.iter().map(|v| v * factor).collect();
        Self {
            grid: self.grid,
            samples,
        }
    }

    /// `self + factor * other`; panics on grid mismatch (internal combinator
    /// for same-grid arithmetic, like the `Add`/`Sub` impls).
    pub fn axpy(&self, factor: f64, other: &Self) -> Self {
        assert_eq!(self.grid, other.grid, "axpy on mismatched grids");
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + factor * b)
            .collect();
        Self {
            grid: self.grid,
            samples,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let samples = self.samples.iter().map(|&v| f(v)).collect();
        Self {
            grid: self.grid,
            samples,
        }
    }

    /// Write the `t,value` CSV form: N rows, `t = k * h`, 12 significant
    /// digits, LF line endings.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,value")?;
        for (k, &v) in self.samples.iter().enumerate() {
            writeln!(w, "{:.11e},{:.11e}", self.grid.time(k), v)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }

    /// Read samples from the `t,value` CSV form onto the given grid. The
    /// time column is ignored; the row count must match the grid.
    pub fn from_csv(grid: PeriodicGrid, text: &str) -> Result<Self, SignalError> {
        let mut samples = Vec::with_capacity(grid.len());
        for (i, line) in text.lines().enumerate() {
            if i == 0 {
                continue; // header
            }
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let value = line
                .rsplit(',')
                .next()
                .and_then(|field| field.trim().parse::<f64>().ok())
                .ok_or_else(|| SignalError::CsvParse {
                    line: i + 1,
                    message: format!("expected `t,value`, got `{line}`"),
                })?;
            samples.push(value);
        }
        Self::new(grid, samples)
    }
}

impl std::ops::Add for &PeriodicSignal {
    type Output = PeriodicSignal;
    fn add(self, rhs: Self) -> PeriodicSignal {
        self.axpy(1.0, rhs)
    }
}

impl std::ops::Sub for &PeriodicSignal {
    type Output = PeriodicSignal;
    fn sub(self, rhs: Self) -> PeriodicSignal {
        self.axpy(-1.0, rhs)
    }
}
