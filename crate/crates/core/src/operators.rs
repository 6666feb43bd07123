//! Maximal monotone relation implementations: LTI differential operators
//! `b(s)/a(s)` acting on periodic signals, memoryless polynomial
//! nonlinearities applied samplewise, and plain gains. Each carries the
//! operations the splitting solver needs: forward application and the
//! resolvent `(I + lambda R)^{-1}`.
//!
//! On a periodic grid the substitution `s -> D1`, `s^2 -> D2` turns a
//! rational operator into a circulant matrix, so LTI systems are solved by
//! discrete-Fourier diagonalization. The static resolvent reduces to one
//! strictly increasing scalar root-find per sample.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::signal::{PeriodicGrid, PeriodicSignal, SignalError};

/// Relative pivot ratio below which a Fourier-domain eigenvalue is treated
/// as resonant: silently amplified modes would masquerade as limit cycles.
pub const RESONANCE_PIVOT_RATIO: f64 = 1e-10;

/// Absolute residual tolerance of the samplewise resolvent root-find.
pub const STATIC_ROOT_TOL: f64 = 1e-12;

/// Highest polynomial degree accepted for the rational operator parts.
pub const MAX_LTI_DEGREE: usize = 2;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error("invalid coefficients: {0}")]
    BadCoefficients(String),
    #[error(
        "resonance: discrete frequency {omega_rad_s:.6} rad/s eigenvalue \
         within {RESONANCE_PIVOT_RATIO:e} of singular{}",
        lambda.map(|l| format!(" (lambda = {l})")).unwrap_or_default()
    )]
    Resonance { omega_rad_s: f64, lambda: Option<f64> },
    #[error("polynomial is decreasing at {at}: slope {slope}")]
    NonMonotonePolynomial { at: f64, slope: f64 },
    #[error("resolvent root not bracketed at sample {sample_index}; polynomial non-monotone?")]
    RootNotBracketed { sample_index: usize },
    #[error("monotonicity check needs at least two distinct domain samples")]
    InsufficientSamples,
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn horner_derivative(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for (i, &c) in coeffs.iter().enumerate().skip(1).rev() {
        acc = acc * x + i as f64 * c;
    }
    acc
}

/// Circulant eigenvalues of the grid's first- and second-difference
/// matrices at mode `k`: `mu1 = i sin(theta)/h`, `mu2 = (2 cos(theta)-2)/h^2`
/// with `theta = 2 pi k / N`.
pub fn difference_eigenvalues(grid: PeriodicGrid, k: usize) -> (Complex<f64>, Complex<f64>) {
    let n = grid.len();
    let h = grid.step();
    let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
    let mu1 = Complex::new(0.0, theta.sin() / h);
    let mu2 = Complex::new((2.0 * theta.cos() - 2.0) / (h * h), 0.0);
    (mu1, mu2)
}

/// Fourier symbol of `c0 + c1 s + c2 s^2` under the substitution
/// `s -> D1, s^2 -> D2`. Mirrored so that `symbol[N-k] == conj(symbol[k])`
/// holds exactly.
fn poly_symbol(coeffs: &[f64], grid: PeriodicGrid) -> Vec<Complex<f64>> {
    let n = grid.len();
    let mut symbol = vec![Complex::new(0.0, 0.0); n];
    for k in 0..=n / 2 {
        let (mu1, mu2) = difference_eigenvalues(grid, k);
        let mut value = Complex::new(coeffs.first().copied().unwrap_or(0.0), 0.0);
        if let Some(&c1) = coeffs.get(1) {
            value += mu1 * c1;
        }
        if let Some(&c2) = coeffs.get(2) {
            value += mu2 * c2;
        }
        symbol[k] = value;
        if k != 0 && k != n - k {
            symbol[n - k] = value.conj();
        }
    }
    symbol
}

/// Continuous frequency (rad/s) associated with grid mode `k`, reported in
/// resonance errors as the positive alias.
fn mode_frequency(grid: PeriodicGrid, k: usize) -> f64 {
    let n = grid.len();
    let alias = k.min(n - k);
    2.0 * std::f64::consts::PI * alias as f64 / grid.period()
}

/// Checks a Fourier-domain multiplier denominator for near-singular modes.
fn check_pivots(
    denom: &[Complex<f64>],
    grid: PeriodicGrid,
    lambda: Option<f64>,
) -> Result<(), OperatorError> {
    let max_mag = denom.iter().fold(0.0f64, |acc, v| acc.max(v.norm()));
    if max_mag == 0.0 {
        return Err(OperatorError::Resonance {
            omega_rad_s: 0.0,
            lambda,
        });
    }
    for (k, v) in denom.iter().enumerate() {
        if v.norm() < RESONANCE_PIVOT_RATIO * max_mag {
            return Err(OperatorError::Resonance {
                omega_rad_s: mode_frequency(grid, k),
                lambda,
            });
        }
    }
    Ok(())
}

fn plan_pair(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    let mut planner = FftPlanner::new();
    (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
}

/// Applies a per-mode multiplier to a real signal through the DFT.
fn apply_multiplier(
    x: &PeriodicSignal,
    multiplier: &[Complex<f64>],
    fft_fwd: &dyn Fft<f64>,
    fft_inv: &dyn Fft<f64>,
) -> PeriodicSignal {
    let n = x.len();
    let mut buf: Vec<Complex<f64>> = x
        .samples()
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .collect();
    fft_fwd.process(&mut buf);
    for (b, m) in buf.iter_mut().zip(multiplier) {
        *b *= m;
    }
    fft_inv.process(&mut buf);
    let scale = 1.0 / n as f64;
    let samples = buf.iter().map(|c| c.re * scale).collect();
    PeriodicSignal::new(x.grid(), samples)
        .expect("multiplier output on a valid grid is finite")
}

/// A rational differential operator `y -> (b(s)/a(s)) y` on periodic
/// signals, realized through the central-difference circulants.
///
/// Coefficients are ascending powers of `s`; degree is limited to
/// [`MAX_LTI_DEGREE`]. Trailing zero coefficients are trimmed so the
/// leading coefficient is always nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct LtiRelation {
    numerator: Vec<f64>,
    denominator: Vec<f64>,
}

impl LtiRelation {
    pub fn new(numerator: &[f64], denominator: &[f64]) -> Result<Self, OperatorError> {
        let trim = |c: &[f64], side: &str| -> Result<Vec<f64>, OperatorError> {
            let mut v = c.to_vec();
            while v.last() == Some(&0.0) {
                v.pop();
            }
            if v.is_empty() {
                return Err(OperatorError::BadCoefficients(format!(
                    "{side} polynomial is identically zero"
                )));
            }
            if v.len() - 1 > MAX_LTI_DEGREE {
                return Err(OperatorError::BadCoefficients(format!(
                    "{side} degree {} exceeds {MAX_LTI_DEGREE}",
                    v.len() - 1
                )));
            }
            if !v.iter().all(|x| x.is_finite()) {
                return Err(OperatorError::BadCoefficients(format!(
                    "{side} has non-finite coefficients"
                )));
            }
            Ok(v)
        };
        Ok(Self {
            numerator: trim(numerator, "numerator")?,
            denominator: trim(denominator, "denominator")?,
        })
    }

    /// Pure gain `c / 1`.
    pub fn gain(c: f64) -> Self {
        Self {
            numerator: vec![c],
            denominator: vec![1.0],
        }
    }

    pub fn numerator(&self) -> &[f64] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[f64] {
        &self.denominator
    }

    /// Forward application: the signal `w` solving `a(D) w = b(D) x`.
    ///
    /// Errors with [`OperatorError::Resonance`] when the denominator symbol
    /// has a near-singular mode (pivot ratio below
    /// [`RESONANCE_PIVOT_RATIO`]), e.g. `a(s) = s` on any grid.
    pub fn apply(&self, x: &PeriodicSignal) -> Result<PeriodicSignal, OperatorError> {
        let grid = x.grid();
        let num = poly_symbol(&self.numerator, grid);
        let den = poly_symbol(&self.denominator, grid);
        check_pivots(&den, grid, None)?;
        let multiplier: Vec<_> = num.iter().zip(&den).map(|(b, a)| b / a).collect();
        let (fwd, inv) = plan_pair(grid.len());
        Ok(apply_multiplier(x, &multiplier, fwd.as_ref(), inv.as_ref()))
    }

    /// Factors the resolvent `(I + lambda b/a)^{-1}`, i.e. the Fourier
    /// multiplier of `(a(D) + lambda b(D)) w = a(D) z`, for reuse across
    /// many applications on one grid.
    pub fn factor_resolvent(
        &self,
        lambda: f64,
        grid: PeriodicGrid,
    ) -> Result<LtiResolvent, OperatorError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(OperatorError::BadCoefficients(format!(
                "resolvent parameter lambda must be positive, got {lambda}"
            )));
        }
        let num = poly_symbol(&self.numerator, grid);
        let den = poly_symbol(&self.denominator, grid);
        let shifted: Vec<_> = den
            .iter()
            .zip(&num)
            .map(|(a, b)| a + b * lambda)
            .collect();
        check_pivots(&shifted, grid, Some(lambda))?;
        let multiplier = den
            .iter()
            .zip(&shifted)
            .map(|(a, g)| a / g)
            .collect();
        let (fft_fwd, fft_inv) = plan_pair(grid.len());
        Ok(LtiResolvent {
            grid,
            lambda,
            multiplier,
            fft_fwd,
            fft_inv,
        })
    }

    /// One-shot resolvent application; see [`Self::factor_resolvent`].
    pub fn resolvent(
        &self,
        lambda: f64,
        z: &PeriodicSignal,
    ) -> Result<PeriodicSignal, OperatorError> {
        Ok(self.factor_resolvent(lambda, z.grid())?.apply(z)?)
    }
}

/// The factored LTI resolvent: a per-mode multiplier plus FFT plans,
/// immutable and reusable for every application at one `(lambda, grid)`.
pub struct LtiResolvent {
    grid: PeriodicGrid,
    lambda: f64,
    multiplier: Vec<Complex<f64>>,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

impl LtiResolvent {
    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn apply(&self, z: &PeriodicSignal) -> Result<PeriodicSignal, SignalError> {
        if z.grid() != self.grid {
            return Err(SignalError::GridMismatch {
                left: z.grid(),
                right: self.grid,
            });
        }
        Ok(apply_multiplier(
            z,
            &self.multiplier,
            self.fft_fwd.as_ref(),
            self.fft_inv.as_ref(),
        ))
    }
}

impl std::fmt::Debug for LtiResolvent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LtiResolvent")
            .field("grid", &self.grid)
            .field("lambda", &self.lambda)
            .finish_non_exhaustive()
    }
}

/// A memoryless polynomial nonlinearity applied samplewise, with an
/// optional offset signal subtracted after evaluation:
/// `x -> p(x) - offset`.
///
/// Construction checks that `p` is nondecreasing on the declared domain
/// interval (by derivative sign on a dense sample of it), so the relation
/// is monotone there.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticPolyRelation {
    coeffs: Vec<f64>,
    domain: (f64, f64),
    offset: Option<PeriodicSignal>,
}

impl StaticPolyRelation {
    pub const DEFAULT_DOMAIN: (f64, f64) = (-16.0, 16.0);

    pub fn new(coeffs: &[f64], domain: (f64, f64)) -> Result<Self, OperatorError> {
        if coeffs.is_empty() || !coeffs.iter().all(|c| c.is_finite()) {
            return Err(OperatorError::BadCoefficients(
                "polynomial coefficients must be finite and non-empty".into(),
            ));
        }
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(OperatorError::BadCoefficients(format!(
                "domain must be a finite interval, got [{lo}, {hi}]"
            )));
        }
        let scale = coeffs.iter().fold(1.0f64, |acc, c| acc.max(c.abs()));
        let steps = 1024;
        for i in 0..=steps {
            let x = lo + (hi - lo) * i as f64 / steps as f64;
            let slope = horner_derivative(coeffs, x);
            if slope < -1e-12 * scale {
                return Err(OperatorError::NonMonotonePolynomial { at: x, slope });
            }
        }
        Ok(Self {
            coeffs: coeffs.to_vec(),
            domain,
            offset: None,
        })
    }

    /// Attaches an offset signal. Offsets do not affect monotonicity, so no
    /// re-check happens; the frozen outer iteration rebuilds offsets often.
    pub fn with_offset(&self, offset: PeriodicSignal) -> Self {
        Self {
            coeffs: self.coeffs.clone(),
            domain: self.domain,
            offset: Some(offset),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn offset(&self) -> Option<&PeriodicSignal> {
        self.offset.as_ref()
    }

    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs, x)
    }

    /// Samplewise forward application `p(x[k]) - offset[k]`.
    pub fn apply(&self, x: &PeriodicSignal) -> Result<PeriodicSignal, OperatorError> {
        let mut out: Vec<f64> = x.samples().iter().map(|&v| self.eval(v)).collect();
        if let Some(offset) = &self.offset {
            if offset.grid() != x.grid() {
                return Err(SignalError::GridMismatch {
                    left: x.grid(),
                    right: offset.grid(),
                }
                .into());
            }
            for (o, f) in out.iter_mut().zip(offset.samples()) {
                *o -= f;
            }
        }
        Ok(PeriodicSignal::new(x.grid(), out)?)
    }

    /// Samplewise resolvent: solves `w + lambda (p(w) - offset[k]) = z[k]`
    /// for each sample. The left side is strictly increasing for a
    /// nondecreasing `p`, so each sample has a unique root; it is found by
    /// bracket expansion plus bisection-safeguarded Newton to
    /// [`STATIC_ROOT_TOL`] residual.
    ///
    /// Samples are independent: the output is bitwise identical regardless
    /// of evaluation order.
    pub fn resolvent(
        &self,
        lambda: f64,
        z: &PeriodicSignal,
    ) -> Result<PeriodicSignal, OperatorError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(OperatorError::BadCoefficients(format!(
                "resolvent parameter lambda must be positive, got {lambda}"
            )));
        }
        if let Some(offset) = &self.offset {
            if offset.grid() != z.grid() {
                return Err(SignalError::GridMismatch {
                    left: z.grid(),
                    right: offset.grid(),
                }
                .into());
            }
        }
        let zero = PeriodicSignal::zeros(z.grid());
        let offset = self.offset.as_ref().unwrap_or(&zero);
        let mut out = Vec::with_capacity(z.len());
        for (k, (&zk, &ok)) in z.samples().iter().zip(offset.samples()).enumerate() {
            let rhs = zk + lambda * ok;
            out.push(self.solve_sample(lambda, rhs, k)?);
        }
        Ok(PeriodicSignal::new(z.grid(), out)?)
    }

    /// Root of `g(w) := w + lambda p(w) = rhs`.
    fn solve_sample(&self, lambda: f64, rhs: f64, index: usize) -> Result<f64, OperatorError> {
        let g = |w: f64| w + lambda * horner(&self.coeffs, w);
        let g_prime = |w: f64| 1.0 + lambda * horner_derivative(&self.coeffs, w);

        // Expand a bracket outward from the right-hand side.
        let mut lo = rhs;
        let mut hi = rhs;
        let mut step = 1.0 + rhs.abs();
        let mut expansions = 0;
        while g(lo) > rhs {
            lo -= step;
            step *= 2.0;
            expansions += 1;
            if expansions > 200 || !lo.is_finite() {
                return Err(OperatorError::RootNotBracketed { sample_index: index });
            }
        }
        step = 1.0 + rhs.abs();
        expansions = 0;
        while g(hi) < rhs {
            hi += step;
            step *= 2.0;
            expansions += 1;
            if expansions > 200 || !hi.is_finite() {
                return Err(OperatorError::RootNotBracketed { sample_index: index });
            }
        }

        let mut w = 0.5 * (lo + hi);
        for _ in 0..200 {
            let residual = g(w) - rhs;
            if residual.abs() <= STATIC_ROOT_TOL {
                return Ok(w);
            }
            if residual > 0.0 {
                hi = w;
            } else {
                lo = w;
            }
            let slope = g_prime(w);
            let newton = w - residual / slope;
            w = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= f64::EPSILON * w.abs().max(1.0) {
                return Ok(w);
            }
        }
        Ok(w)
    }
}

/// A samplewise gain `x -> g x`; monotone iff `g >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainRelation {
    pub gain: f64,
}

impl GainRelation {
    pub fn new(gain: f64) -> Self {
        Self { gain }
    }

    pub fn is_monotone(&self) -> bool {
        self.gain >= 0.0
    }

    pub fn apply(&self, x: &PeriodicSignal) -> PeriodicSignal {
        x.scale(self.gain)
    }
}

/// Result of probing a relation for monotonicity on a finite sample set.
#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    /// Minimum of `<u1 - u2, R(u1) - R(u2)>` over all sample pairs.
    pub min_pairing: f64,
    /// Indices of the first pair achieving a negative pairing, if any.
    pub violating_pair: Option<(usize, usize)>,
    /// Empirical coercivity: min pairing / ||u1 - u2||^2.
    pub alpha_estimate: f64,
    /// Empirical cocoercivity: min pairing / ||R(u1) - R(u2)||^2.
    pub beta_estimate: f64,
    pub pairs_checked: usize,
}

impl MonotonicityReport {
    pub fn is_monotone(&self) -> bool {
        self.violating_pair.is_none()
    }
}

/// Evaluates the monotonicity pairing for every pair of domain samples and
/// reports the worst case together with empirical coercivity and
/// cocoercivity constants.
pub fn empirical_monotonicity_check<F>(
    relation: F,
    domain_samples: &[PeriodicSignal],
) -> Result<MonotonicityReport, OperatorError>
where
    F: Fn(&PeriodicSignal) -> Result<PeriodicSignal, OperatorError>,
{
    if domain_samples.len() < 2 {
        return Err(OperatorError::InsufficientSamples);
    }
    let images: Vec<PeriodicSignal> = domain_samples
        .iter()
        .map(&relation)
        .collect::<Result<_, _>>()?;

    let mut min_pairing = f64::INFINITY;
    let mut violating_pair = None;
    let mut alpha = f64::INFINITY;
    let mut beta = f64::INFINITY;
    let mut pairs_checked = 0;
    for i in 0..domain_samples.len() {
        for j in (i + 1)..domain_samples.len() {
            let du = &domain_samples[i] - &domain_samples[j];
            let dr = &images[i] - &images[j];
            let du_sq = du.inner_product(&du)?;
            if du_sq == 0.0 {
                continue;
            }
            let pairing = du.inner_product(&dr)?;
            pairs_checked += 1;
            if pairing < min_pairing {
                min_pairing = pairing;
            }
            if pairing < 0.0 && violating_pair.is_none() {
                violating_pair = Some((i, j));
            }
            alpha = alpha.min(pairing / du_sq);
            let dr_sq = dr.inner_product(&dr)?;
            if dr_sq > 0.0 {
                beta = beta.min(pairing / dr_sq);
            }
        }
    }
    if pairs_checked == 0 {
        return Err(OperatorError::InsufficientSamples);
    }
    Ok(MonotonicityReport {
        min_pairing,
        violating_pair,
        alpha_estimate: alpha,
        beta_estimate: beta,
        pairs_checked,
    })
}
