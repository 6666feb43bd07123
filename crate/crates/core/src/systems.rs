//! Built-in mixed-feedback system definitions and the data model for
//! user-defined ones.
//!
//! A system is the triple `(H, E1, E2)` plus an external input: a passive
//! LTI block `H` (stored as the rational form of `H^{-1}`), a monotone
//! negative-feedback nonlinearity `E1`, and a positive-feedback relation
//! `E2`, giving the inclusion `u in H^{-1} y + E1(y) - E2(y)`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::operators::{
    empirical_monotonicity_check, GainRelation, LtiRelation, OperatorError, StaticPolyRelation,
};
use crate::signal::{PeriodicGrid, PeriodicSignal, SignalError};
use crate::solver::{solve_mixed, OuterConfig, SolveReport, SolverError, SplitProblem};

/// Slope of the large-K Van der Pol period asymptote, `3 - 2 ln 2`.
pub const RELAXATION_PERIOD_SLOPE: f64 = 1.613705638880109;

/// Coefficient of the `K^(-1/3)` correction in Cartwright's semi-empirical
/// period formula, `3 * 2.338107410459767` (the first Airy zero).
pub const CARTWRIGHT_CORRECTION: f64 = 7.014322231379301;

/// Monotonicity probes may dip this far negative before the load-time
/// check rejects a feedback relation (rounding slack).
const MONOTONICITY_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SystemError {
    #[error("{which} feedback relation is not monotone on the probe set (min pairing {min_pairing:.3e})")]
    NonMonotoneFeedback { which: &'static str, min_pairing: f64 },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// The positive-feedback relation `E2`: a plain gain or a monotone
/// polynomial.
#[derive(Debug, Clone)]
pub enum PositiveFeedback {
    Gain(GainRelation),
    Poly(StaticPolyRelation),
}

impl PositiveFeedback {
    pub fn apply(&self, x: &PeriodicSignal) -> Result<PeriodicSignal, OperatorError> {
        match self {
            PositiveFeedback::Gain(g) => Ok(g.apply(x)),
            PositiveFeedback::Poly(p) => p.apply(x),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            PositiveFeedback::Gain(g) => g.gain == 0.0,
            PositiveFeedback::Poly(p) => p.coeffs().iter().all(|&c| c == 0.0),
        }
    }
}

/// A mixed-feedback system `u in H^{-1} y + E1(y) - E2(y)`.
///
/// Constructing one probes `E1` and `E2` for monotonicity on a seeded
/// random sample set spanning the operating interval; a violating relation
/// is rejected at load time.
#[derive(Debug, Clone)]
pub struct MixedFeedbackSystem {
    h_inverse: LtiRelation,
    e1: StaticPolyRelation,
    e2: PositiveFeedback,
    input: Option<PeriodicSignal>,
    label: String,
}

impl MixedFeedbackSystem {
    pub fn new(
        h_inverse: LtiRelation,
        e1: StaticPolyRelation,
        e2: PositiveFeedback,
        input: Option<PeriodicSignal>,
        label: impl Into<String>,
        probe_seed: u64,
    ) -> Result<Self, SystemError> {
        let probe_grid = match &input {
            Some(u) => u.grid(),
            None => PeriodicGrid::new(2.0 * std::f64::consts::PI, 16)
                .expect("static probe grid is valid"),
        };
        // Probe amplitudes stay inside the declared monotone interval.
        let (lo, hi) = e1.domain();
        let amp = 0.5 * lo.abs().min(hi.abs()).max(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(probe_seed);
        let probes: Vec<PeriodicSignal> = (0..6)
            .map(|_| {
                let samples = (0..probe_grid.len())
                    .map(|_| rng.gen_range(-amp..amp))
                    .collect();
                PeriodicSignal::new(probe_grid, samples)
            })
            .collect::<Result<_, _>>()?;

        let report = empirical_monotonicity_check(|x| e1.apply(x), &probes)?;
        if report.min_pairing < -MONOTONICITY_SLACK {
            return Err(SystemError::NonMonotoneFeedback {
                which: "negative (E1)",
                min_pairing: report.min_pairing,
            });
        }
        let report = empirical_monotonicity_check(|x| e2.apply(x), &probes)?;
        if report.min_pairing < -MONOTONICITY_SLACK {
            return Err(SystemError::NonMonotoneFeedback {
                which: "positive (E2)",
                min_pairing: report.min_pairing,
            });
        }

        Ok(Self {
            h_inverse,
            e1,
            e2,
            input,
            label: label.into(),
        })
    }

    pub fn h_inverse(&self) -> &LtiRelation {
        &self.h_inverse
    }

    pub fn e1(&self) -> &StaticPolyRelation {
        &self.e1
    }

    pub fn e2(&self) -> &PositiveFeedback {
        &self.e2
    }

    pub fn input(&self) -> Option<&PeriodicSignal> {
        self.input.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Runs the outer solver on this system from the given initial guess.
    pub fn solve(
        &self,
        y0: &PeriodicSignal,
        cfg: &OuterConfig,
    ) -> Result<SolveReport, SolverError> {
        let problem = SplitProblem {
            lti: &self.h_inverse,
            static_part: &self.e1,
            external_input: self.input.as_ref(),
        };
        solve_mixed(
            &problem,
            |y| {
                self.e2
                    .apply(y)
                    .expect("E2 apply cannot fail without an offset signal")
            },
            y0,
            cfg,
        )
    }
}

/// Van der Pol parameters: the damping constant and the solve grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VdpParams {
    pub k: f64,
    pub grid: PeriodicGrid,
}

/// The Van der Pol oscillator `x'' + K (x^2 - 1) x' + x = 0` in
/// mixed-feedback form: `H^{-1} = (s^2 + 1)/s`, `E1(x) = K x^3 / 3`,
/// `E2(x) = K x`, zero input.
pub fn van_der_pol(params: VdpParams) -> Result<MixedFeedbackSystem, SystemError> {
    if !(params.k.is_finite() && params.k >= 0.0) {
        return Err(SystemError::BadParameter(format!(
            "Van der Pol damping K must be nonnegative, got {}",
            params.k
        )));
    }
    let h_inverse = LtiRelation::new(&[1.0, 0.0, 1.0], &[0.0, 1.0])?;
    let e1 = StaticPolyRelation::new(
        &[0.0, 0.0, 0.0, params.k / 3.0],
        StaticPolyRelation::DEFAULT_DOMAIN,
    )?;
    let e2 = PositiveFeedback::Gain(GainRelation::new(params.k));
    MixedFeedbackSystem::new(
        h_inverse,
        e1,
        e2,
        None,
        format!("van-der-pol(K={})", params.k),
        0,
    )
}

/// The scalar double-well problem: minimizing `x^4/12 - x^2/2` leads to
/// `0 in x^3/3 - x`, split as `A(x) = x^3/3`, `B(x) = x`.
#[derive(Debug, Clone, Copy)]
pub struct DoubleWell;

impl DoubleWell {
    pub fn a(&self, x: f64) -> f64 {
        x * x * x / 3.0
    }

    pub fn b(&self, x: f64) -> f64 {
        x
    }

    /// The underlying potential `x^4/12 - x^2/2`.
    pub fn potential(&self, x: f64) -> f64 {
        x.powi(4) / 12.0 - x * x / 2.0
    }
}

pub fn double_well() -> DoubleWell {
    DoubleWell
}

/// Rough fundamental-period guess for the Van der Pol cycle: `2 pi` in the
/// sinusoidal regime, Cartwright's semi-empirical two-term value
/// `(3 - 2 ln 2) K + 7.0143 K^(-1/3)` once that regime takes over.
pub fn period_guess(k: f64) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    let crossover = tau / RELAXATION_PERIOD_SLOPE;
    if k <= crossover {
        tau
    } else {
        RELAXATION_PERIOD_SLOPE * k + CARTWRIGHT_CORRECTION * k.powf(-1.0 / 3.0)
    }
}

/// The classical describing-function prediction for the Van der Pol
/// oscillator: amplitude 2 at 1 rad/s, independent of K.
pub fn describing_function_baseline(_k: f64) -> (f64, f64) {
    (2.0, 1.0)
}

/// The paper-style initial iterate: `samples[k] = slope * k * h`, used
/// verbatim even though it is not periodic as a function.
pub fn initial_guess_ramp(grid: PeriodicGrid, slope: f64) -> PeriodicSignal {
    PeriodicSignal::from_fn(grid, |t| slope * t).expect("ramp samples are finite")
}
