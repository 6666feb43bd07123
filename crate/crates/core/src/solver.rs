//! Outer solver for the mixed-monotone zero-finding problem
//! `0 in A(y) - B(y)` with `A = H^{-1} + E1 - u*` maximally monotone and
//! `B` the positive-feedback part.
//!
//! Each outer step freezes `B` at the current iterate, absorbs the frozen
//! value (and the external input) into the static component's offset, and
//! solves the resulting monotone inclusion with Douglas-Rachford splitting.
//! A root of `A - B` is a fixed point of this scheme and conversely.
//!
//! Also here: the one-dimensional fast path for scalar problems, sampled
//! contraction diagnostics for the update map, and grid-period adaptation
//! from the zero crossings of an iterate.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::operators::{LtiRelation, OperatorError, StaticPolyRelation};
use crate::signal::{PeriodicGrid, PeriodicSignal, SignalError, RELATIVE_CHANGE_FLOOR};
use crate::splitting::{dr_solve, DrConfig, SplittingError};

/// Slack factor of the convergence certificate
/// `||A(y) - B(y)|| <= FACTOR * eps1 * (1 + ||y||)`, accounting for
/// tolerance stacking between the inner and outer loops.
pub const RESIDUAL_CERTIFICATE_FACTOR: f64 = 10.0;

/// Relative period change below which adaptation is a no-op.
pub const PERIOD_ADAPT_DEADBAND: f64 = 0.01;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(
        "outer iteration budget exhausted after {} steps (last change {:.3e}, residual {:.3e})",
        report.outer_iters,
        report.relative_change_history.last().copied().unwrap_or(f64::INFINITY),
        report.residual_norm
    )]
    NonConvergence { report: Box<SolveReport> },
    #[error("inner solve failed at outer iteration {outer_iter}: {source}")]
    Inner {
        outer_iter: usize,
        source: SplittingError,
    },
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error("iterate left the initial basin at step {iteration}: x = {value}")]
    DomainEscape { iteration: usize, value: f64 },
    #[error("scalar iteration did not converge in {iters} steps (last x = {last_x})")]
    ScalarNonConvergence { iters: usize, last_x: f64 },
    #[error("all {failures} contraction probes failed")]
    AllProbesFailed { failures: usize },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

/// Parameters of the outer iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterConfig {
    /// Outer relative-change stopping threshold.
    pub tol_eps1: f64,
    pub max_outer_iters: usize,
    /// Inner Douglas-Rachford parameters. When `dr.residual_tol` is unset,
    /// the solve applies `Some(tol_eps1 / 3)` so inner iterate noise stays
    /// below the outer stopping threshold and the convergence certificate.
    pub dr: DrConfig,
    /// Re-estimate the grid period from iterate zero crossings between
    /// outer steps. Off by default: the fixed-grid setting.
    pub period_adaptation: bool,
}

impl OuterConfig {
    pub fn new(lambda: f64) -> Self {
        Self {
            tol_eps1: 0.01,
            max_outer_iters: 200,
            dr: DrConfig::new(lambda),
            period_adaptation: false,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.tol_eps1.is_finite() && self.tol_eps1 > 0.0) {
            return Err(SolverError::BadConfig(format!(
                "tol_eps1 must be positive, got {}",
                self.tol_eps1
            )));
        }
        if self.max_outer_iters == 0 {
            return Err(SolverError::BadConfig(
                "max_outer_iters must be at least 1".into(),
            ));
        }
        self.dr.validate().map_err(SolverError::BadConfig)
    }
}

/// Everything a converged (or abandoned) solve reports.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: PeriodicSignal,
    pub outer_iters: usize,
    pub per_outer_inner_iters: Vec<usize>,
    pub relative_change_history: Vec<f64>,
    /// `||A(y) - B(y)||` at the solution, assembled from the inner solve's
    /// implicit forward value of the LTI part plus the explicit static maps.
    pub residual_norm: f64,
    /// Half the peak-to-peak range over one period.
    pub amplitude: f64,
    /// Fundamental period from iterate zero crossings; the grid period when
    /// the solution has fewer than two crossings.
    pub period_estimate: f64,
    pub converged: bool,
}

/// The A-side of the problem in its natural split form: a purely LTI part
/// `F1 = H^{-1}` with factorizable resolvent, a static monotone
/// nonlinearity `E1`, and the external input `u*` (None means zero).
pub struct SplitProblem<'a> {
    pub lti: &'a LtiRelation,
    pub static_part: &'a StaticPolyRelation,
    pub external_input: Option<&'a PeriodicSignal>,
}

/// Solves `0 in A(y) - B(y)` by the freeze-and-solve outer iteration.
///
/// `b_forward` is the forward map of the positive-feedback relation `B`.
/// Declares convergence only when the relative change passes `tol_eps1`
/// and the residual certificate
/// `||A(y) - B(y)|| <= 10 eps1 (1 + ||y||)` holds; exhausting the budget
/// returns [`SolverError::NonConvergence`] carrying the full report.
pub fn solve_mixed<B>(
    problem: &SplitProblem<'_>,
    b_forward: B,
    y0: &PeriodicSignal,
    cfg: &OuterConfig,
) -> Result<SolveReport, SolverError>
where
    B: Fn(&PeriodicSignal) -> PeriodicSignal,
{
    cfg.validate()?;
    let mut grid = y0.grid();
    if let Some(u) = problem.external_input {
        if u.grid() != grid {
            return Err(SignalError::GridMismatch {
                left: u.grid(),
                right: grid,
            }
            .into());
        }
    }

    let mut dr_cfg = cfg.dr.clone();
    if dr_cfg.residual_tol.is_none() {
        dr_cfg.residual_tol = Some(cfg.tol_eps1 / 3.0);
    }

    let mut u_star = problem
        .external_input
        .cloned()
        .unwrap_or_else(|| PeriodicSignal::zeros(grid));
    let mut resolvent = problem.lti.factor_resolvent(dr_cfg.lambda, grid)?;
    let mut y = y0.clone();

    let mut per_outer_inner_iters = Vec::new();
    let mut relative_change_history = Vec::new();
    let mut residual_norm = f64::INFINITY;

    for outer in 0..cfg.max_outer_iters {
        // Freeze B at the current iterate and fold it, together with the
        // external input, into the static component's offset.
        let frozen = &u_star + &b_forward(&y);
        let frozen = match problem.static_part.offset() {
            Some(own) => &frozen + own,
            None => frozen,
        };
        let f2 = problem.static_part.with_offset(frozen);

        let inner = dr_solve(
            |z| resolvent.apply(z).map_err(OperatorError::from),
            |z| f2.resolvent(dr_cfg.lambda, z),
            &y,
            &dr_cfg,
        );
        let inner = match inner {
            Ok(result) => result,
            Err(SplittingError::NonConvergence { partial, .. }) => {
                // Surface the abandoned state as a non-converged report so
                // callers can still inspect and persist it.
                let y_next = partial.zero_candidate.clone();
                per_outer_inner_iters.push(partial.inner_iters);
                let change = y_next.relative_change_from(&y, RELATIVE_CHANGE_FLOOR)?;
                relative_change_history.push(change);
                let report = build_report(
                    y_next,
                    outer + 1,
                    per_outer_inner_iters,
                    relative_change_history,
                    residual_norm,
                    false,
                );
                return Err(SolverError::NonConvergence {
                    report: Box::new(report),
                });
            }
            Err(source) => return Err(SolverError::Inner {
                outer_iter: outer,
                source,
            }),
        };

        let y_next = inner.zero_candidate;
        per_outer_inner_iters.push(inner.inner_iters);
        let change = y_next.relative_change_from(&y, RELATIVE_CHANGE_FLOOR)?;
        relative_change_history.push(change);

        // Residual of the unfrozen inclusion at the new iterate, using the
        // implicit F1 value: r = F1(y) + E1(y) - u* - B(y).
        let e1_val = problem.static_part.apply(&y_next)?;
        let r = &(&(&inner.f1_value + &e1_val) - &u_star) - &b_forward(&y_next);
        residual_norm = r.norm();

        let certificate =
            residual_norm <= RESIDUAL_CERTIFICATE_FACTOR * cfg.tol_eps1 * (1.0 + y_next.norm());
        if change < cfg.tol_eps1 && certificate {
            return Ok(build_report(
                y_next,
                outer + 1,
                per_outer_inner_iters,
                relative_change_history,
                residual_norm,
                true,
            ));
        }

        y = y_next;

        if cfg.period_adaptation {
            let adapted = adapt_period(&y);
            if adapted.changed {
                grid = adapted.grid;
                y = adapted.iterate;
                u_star = u_star.resample(grid);
                resolvent = problem.lti.factor_resolvent(dr_cfg.lambda, grid)?;
            }
        }
    }

    let report = build_report(
        y,
        cfg.max_outer_iters,
        per_outer_inner_iters,
        relative_change_history,
        residual_norm,
        false,
    );
    Err(SolverError::NonConvergence {
        report: Box::new(report),
    })
}

fn build_report(
    solution: PeriodicSignal,
    outer_iters: usize,
    per_outer_inner_iters: Vec<usize>,
    relative_change_history: Vec<f64>,
    residual_norm: f64,
    converged: bool,
) -> SolveReport {
    let (min, max) = solution.min_max();
    let amplitude = 0.5 * (max - min);
    let period_estimate =
        estimate_period(&solution).unwrap_or_else(|| solution.grid().period());
    SolveReport {
        solution,
        outer_iters,
        per_outer_inner_iters,
        relative_change_history,
        residual_norm,
        amplitude,
        period_estimate,
        converged,
    }
}

/// Fundamental-period estimate: twice the mean gap between consecutive
/// zero crossings (a half-wave per gap). None with fewer than two
/// crossings.
pub fn estimate_period(x: &PeriodicSignal) -> Option<f64> {
    let crossings = x.zero_crossings();
    if crossings.len() < 2 {
        return None;
    }
    let gaps = crossings.len() - 1;
    let span = crossings[gaps] - crossings[0];
    Some(2.0 * span / gaps as f64)
}

/// Result of one period-adaptation step.
#[derive(Debug, Clone)]
pub struct PeriodAdaptation {
    pub grid: PeriodicGrid,
    pub iterate: PeriodicSignal,
    pub changed: bool,
    /// Set when the iterate had fewer than two zero crossings and the grid
    /// was left untouched.
    pub too_few_crossings: bool,
}

/// Re-estimates the fundamental period from the iterate's zero crossings
/// and resamples it (periodic linear interpolation, same sample count)
/// onto the adjusted grid. No-op within [`PERIOD_ADAPT_DEADBAND`] or when
/// there are fewer than two crossings.
pub fn adapt_period(iterate: &PeriodicSignal) -> PeriodAdaptation {
    let grid = iterate.grid();
    let new_period = match estimate_period(iterate) {
        Some(p) if p > 0.0 => p,
        _ => {
            return PeriodAdaptation {
                grid,
                iterate: iterate.clone(),
                changed: false,
                too_few_crossings: true,
            }
        }
    };
    if (new_period - grid.period()).abs() / grid.period() < PERIOD_ADAPT_DEADBAND {
        return PeriodAdaptation {
            grid,
            iterate: iterate.clone(),
            changed: false,
            too_few_crossings: false,
        };
    }
    let new_grid = PeriodicGrid::new(new_period, grid.len())
        .expect("positive period on an existing grid");
    PeriodAdaptation {
        grid: new_grid,
        iterate: iterate.resample(new_grid),
        changed: true,
        too_few_crossings: false,
    }
}

/// Outcome of the one-dimensional solver.
#[derive(Debug, Clone)]
pub struct ScalarSolve {
    pub x_star: f64,
    pub iters: usize,
    /// All iterates including the initial guess.
    pub trajectory: Vec<f64>,
}

/// Scalar mixed-monotone iteration `x_{i+1} = A^{-1}(B(x_i))`, with the
/// inverse computed by bracketed bisection on the strictly increasing
/// `a_scalar`.
///
/// The iterate is confined to the sign basin of `x0`: a sign change
/// errors with [`SolverError::DomainEscape`].
pub fn scalar_mixed_solve(
    a_scalar: impl Fn(f64) -> f64,
    b_scalar: impl Fn(f64) -> f64,
    x0: f64,
    tol: f64,
    max_iters: usize,
) -> Result<ScalarSolve, SolverError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(SolverError::BadConfig(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let basin_sign = if x0 == 0.0 { 0.0 } else { x0.signum() };
    let mut x = x0;
    let mut trajectory = vec![x0];
    for i in 1..=max_iters {
        let target = b_scalar(x);
        let next = invert_increasing(&a_scalar, target, x)?;
        trajectory.push(next);
        if basin_sign != 0.0 && next != 0.0 && next.signum() != basin_sign {
            return Err(SolverError::DomainEscape {
                iteration: i,
                value: next,
            });
        }
        let change = (next - x).abs() / x.abs().max(RELATIVE_CHANGE_FLOOR);
        x = next;
        if change < tol {
            return Ok(ScalarSolve {
                x_star: x,
                iters: i,
                trajectory,
            });
        }
    }
    Err(SolverError::ScalarNonConvergence {
        iters: max_iters,
        last_x: x,
    })
}

/// Root of the strictly increasing `f(w) = target`, by outward bracket
/// expansion from `guess` followed by bisection to machine width.
fn invert_increasing(
    f: &impl Fn(f64) -> f64,
    target: f64,
    guess: f64,
) -> Result<f64, SolverError> {
    let mut lo = guess;
    let mut hi = guess;
    let mut step = 1.0 + guess.abs();
    let mut tries = 0;
    while f(lo) > target {
        lo -= step;
        step *= 2.0;
        tries += 1;
        if tries > 200 || !lo.is_finite() {
            return Err(SolverError::BadConfig(
                "scalar map could not be bracketed; is it increasing?".into(),
            ));
        }
    }
    step = 1.0 + guess.abs();
    tries = 0;
    while f(hi) < target {
        hi += step;
        step *= 2.0;
        tries += 1;
        if tries > 200 || !hi.is_finite() {
            return Err(SolverError::BadConfig(
                "scalar map could not be bracketed; is it increasing?".into(),
            ));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Sampled Lipschitz/coercivity diagnostics of a map around a center
/// point. Advisory only: the sufficient conditions of the convergence
/// theory are not checkable exactly, so the sampled constant is the
/// operative signal.
#[derive(Debug, Clone)]
pub struct ContractionReport {
    /// Max of `||map(u) - map(v)|| / ||u - v||` over probe pairs.
    pub sampled_lipschitz_max: f64,
    /// Min of `<u - v, map(u) - map(v)> / ||u - v||^2` over probe pairs.
    pub alpha_estimate: f64,
    /// Min of `<u - v, map(u) - map(v)> / ||map(u) - map(v)||^2`;
    /// infinite when every probe pair maps to the same point.
    pub beta_estimate: f64,
    pub contraction_predicted: bool,
    pub probes_evaluated: usize,
    pub probe_failures: usize,
}

/// Draws `num_probes` reproducible points in the radius-ball around
/// `center`, pushes them through `map`, and reports pairwise Lipschitz
/// and coercivity samples. Failed probes are skipped and counted.
pub fn estimate_contraction<M>(
    map: M,
    center: &PeriodicSignal,
    radius: f64,
    num_probes: usize,
    rng_seed: u64,
) -> Result<ContractionReport, SolverError>
where
    M: Fn(&PeriodicSignal) -> Result<PeriodicSignal, SolverError>,
{
    if num_probes < 2 {
        return Err(SolverError::BadConfig(
            "contraction sampling needs at least two probes".into(),
        ));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(SolverError::BadConfig(format!(
            "probe radius must be positive, got {radius}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let n = center.len();
    let mut probes = Vec::with_capacity(num_probes);
    for _ in 0..num_probes {
        let direction: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dir =
            PeriodicSignal::new(center.grid(), direction).expect("finite probe direction");
        let norm = dir.norm();
        let magnitude: f64 = rng.gen_range(0.0..1.0);
        let probe = if norm == 0.0 {
            center.clone()
        } else {
            center.axpy(radius * magnitude / norm, &dir)
        };
        probes.push(probe);
    }

    let mut images = Vec::with_capacity(num_probes);
    let mut failures = 0;
    for probe in &probes {
        match map(probe) {
            Ok(image) => images.push(Some(image)),
            Err(_) => {
                images.push(None);
                failures += 1;
            }
        }
    }
    let ok: Vec<(usize, &PeriodicSignal)> = images
        .iter()
        .enumerate()
        .filter_map(|(i, im)| im.as_ref().map(|s| (i, s)))
        .collect();
    if ok.len() < 2 {
        return Err(SolverError::AllProbesFailed { failures });
    }

    let mut lipschitz: f64 = 0.0;
    let mut alpha = f64::INFINITY;
    let mut beta = f64::INFINITY;
    for a in 0..ok.len() {
        for b in (a + 1)..ok.len() {
            let (ia, ma) = ok[a];
            let (ib, mb) = ok[b];
            let du = &probes[ia] - &probes[ib];
            let du_sq = du.inner_product(&du).expect("probes share the grid");
            if du_sq == 0.0 {
                continue;
            }
            let dm = ma - mb;
            let dm_sq = dm.inner_product(&dm).expect("images share the grid");
            lipschitz = lipschitz.max((dm_sq / du_sq).sqrt());
            let pairing = du.inner_product(&dm).expect("probes share the grid");
            alpha = alpha.min(pairing / du_sq);
            if dm_sq > 0.0 {
                beta = beta.min(pairing / dm_sq);
            }
        }
    }
    Ok(ContractionReport {
        sampled_lipschitz_max: lipschitz,
        alpha_estimate: alpha,
        beta_estimate: beta,
        contraction_predicted: lipschitz < 1.0,
        probes_evaluated: ok.len(),
        probe_failures: failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_double_well_fixed_points() {
        let a = |x: f64| x * x * x / 3.0;
        let b = |x: f64| x;
        let sqrt3 = 3.0f64.sqrt();

        let pos = scalar_mixed_solve(a, b, 0.3, 1e-9, 200).unwrap();
        assert!((pos.x_star - sqrt3).abs() < 1e-6, "{}", pos.x_star);
        assert!(pos.trajectory.iter().all(|&x| x >= 0.0));

        let neg = scalar_mixed_solve(a, b, -0.3, 1e-9, 200).unwrap();
        assert!((neg.x_star + sqrt3).abs() < 1e-6);

        let trivial = scalar_mixed_solve(a, b, 0.0, 1e-9, 200).unwrap();
        assert_eq!(trivial.x_star, 0.0);
        assert_eq!(trivial.iters, 1);
    }

    #[test]
    fn scalar_basin_escape_detected() {
        // A(x) = x, B(x) = -x flips the sign on the first step.
        let result = scalar_mixed_solve(|x| x, |x| -x, 0.5, 1e-9, 50);
        assert!(matches!(result, Err(SolverError::DomainEscape { .. })));
    }

    #[test]
    fn period_estimate_on_sinusoid() {
        let grid = PeriodicGrid::new(10.0, 400).unwrap();
        let x = PeriodicSignal::from_fn(grid, |t| (2.0 * std::f64::consts::PI * t / 9.0).sin())
            .unwrap();
        let p = estimate_period(&x).unwrap();
        assert!((p - 9.0).abs() <= 2.0 * grid.step(), "estimate {p}");
    }

    #[test]
    fn adapt_period_captures_shorter_period() {
        let grid = PeriodicGrid::new(10.0, 400).unwrap();
        let x = PeriodicSignal::from_fn(grid, |t| (2.0 * std::f64::consts::PI * t / 9.0).sin())
            .unwrap();
        let adapted = adapt_period(&x);
        assert!(adapted.changed);
        assert!((adapted.grid.period() - 9.0).abs() <= 2.0 * grid.step());
        assert_eq!(adapted.iterate.len(), 400);
    }

    #[test]
    fn adapt_period_no_op_cases() {
        let grid = PeriodicGrid::new(10.0, 100).unwrap();
        let constant = PeriodicSignal::new(grid, vec![1.5; 100]).unwrap();
        let adapted = adapt_period(&constant);
        assert!(!adapted.changed);
        assert!(adapted.too_few_crossings);

        // Sub-percent mismatch stays put.
        let x = PeriodicSignal::from_fn(grid, |t| {
            (2.0 * std::f64::consts::PI * t / 9.995).sin()
        })
        .unwrap();
        let adapted = adapt_period(&x);
        assert!(!adapted.changed);
        assert!(!adapted.too_few_crossings);
    }

    #[test]
    fn contraction_of_identity_and_halving() {
        let grid = PeriodicGrid::new(4.0, 16).unwrap();
        let center = PeriodicSignal::zeros(grid);

        let id = estimate_contraction(|x| Ok(x.clone()), &center, 1.0, 6, 42).unwrap();
        assert!((id.sampled_lipschitz_max - 1.0).abs() < 1e-12);
        assert!(!id.contraction_predicted);
        assert!((id.alpha_estimate - 1.0).abs() < 1e-12);

        let half = estimate_contraction(|x| Ok(x.scale(0.5)), &center, 1.0, 6, 42).unwrap();
        assert!((half.sampled_lipschitz_max - 0.5).abs() < 1e-12);
        assert!(half.contraction_predicted);
        assert!((half.beta_estimate - 2.0).abs() < 1e-12);
    }

    #[test]
    fn contraction_of_double_well_update_near_fixed_point() {
        // x -> (3x)^(1/3) has slope 1/3 at x = sqrt(3).
        let grid = PeriodicGrid::new(4.0, 4).unwrap();
        let center = PeriodicSignal::new(grid, vec![3.0f64.sqrt(); 4]).unwrap();
        let report = estimate_contraction(
            |x| Ok(x.map(|v| (3.0 * v).cbrt())),
            &center,
            0.05,
            8,
            7,
        )
        .unwrap();
        assert!(
            (report.sampled_lipschitz_max - 1.0 / 3.0).abs() < 0.02,
            "sampled {}",
            report.sampled_lipschitz_max
        );
        assert!(report.contraction_predicted);
    }

    #[test]
    fn contraction_probe_failures_reported() {
        let grid = PeriodicGrid::new(4.0, 8).unwrap();
        let center = PeriodicSignal::zeros(grid);
        let result = estimate_contraction(
            |_| {
                Err(SolverError::BadConfig("boom".into()))
            },
            &center,
            1.0,
            4,
            1,
        );
        assert!(matches!(
            result,
            Err(SolverError::AllProbesFailed { failures: 4 })
        ));
    }

    #[test]
    fn solve_mixed_linear_monotone_case() {
        // H^{-1} = 1, E1(y) = y, B = 0, u* = sin: solution y = u*/2.
        let grid = PeriodicGrid::new(2.0 * std::f64::consts::PI, 64).unwrap();
        let u = PeriodicSignal::from_fn(grid, f64::sin).unwrap();
        let lti = LtiRelation::gain(1.0);
        let e1 = StaticPolyRelation::new(&[0.0, 1.0], (-8.0, 8.0)).unwrap();
        let problem = SplitProblem {
            lti: &lti,
            static_part: &e1,
            external_input: Some(&u),
        };
        let mut cfg = OuterConfig::new(0.5);
        cfg.tol_eps1 = 1e-6;
        cfg.dr.tol_eps2 = 1e-8;
        let report = solve_mixed(&problem, |y| y.scale(0.0), &PeriodicSignal::zeros(grid), &cfg)
            .unwrap();
        assert!(report.converged);
        // With B = 0 the second outer pass re-solves the identical frozen
        // problem, so it terminates on the second iteration.
        assert_eq!(report.outer_iters, 2);
        let expected = u.scale(0.5);
        assert!((&report.solution - &expected).max_abs() < 1e-5);
        assert!(report.residual_norm <= 10.0 * cfg.tol_eps1 * (1.0 + report.solution.norm()));
    }
}
