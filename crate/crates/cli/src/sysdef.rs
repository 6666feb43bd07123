//! System-definition files: a TOML schema describing the LTI block, the
//! two feedback nonlinearities and an optional input waveform.
//!
//! ```toml
//! label = "my oscillator"
//!
//! [lti]                      # H^{-1} as b(s)/a(s), ascending coefficients
//! numerator = [1.0, 0.0, 1.0]
//! denominator = [0.0, 1.0]
//!
//! [e1]                       # negative feedback, ascending coefficients
//! coefficients = [0.0, 0.0, 0.0, 0.5]
//! domain = [-16.0, 16.0]     # optional monotonicity interval
//!
//! [e2]                       # positive feedback: a gain ...
//! gain = 1.5
//! # ... or a polynomial:
//! # coefficients = [0.0, 1.5]
//!
//! [input]                    # optional, defaults to zero
//! kind = "sine"              # zero | sine | file
//! amplitude = 1.0
//! frequency_rad_s = 1.0
//! # kind = "file" reads `t,value` CSV rows from `path`
//! ```

use std::path::Path;

use serde::Deserialize;

use limitcycle::operators::{GainRelation, StaticPolyRelation};
use limitcycle::signal::{PeriodicGrid, PeriodicSignal};
use limitcycle::systems::{MixedFeedbackSystem, PositiveFeedback};
use limitcycle::LtiRelation;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDefinition {
    #[serde(default)]
    pub label: Option<String>,
    pub lti: LtiSection,
    pub e1: PolySection,
    pub e2: E2Section,
    #[serde(default)]
    pub input: Option<InputSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LtiSection {
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolySection {
    pub coefficients: Vec<f64>,
    #[serde(default)]
    pub domain: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct E2Section {
    #[serde(default)]
    pub gain: Option<f64>,
    #[serde(default)]
    pub coefficients: Option<Vec<f64>>,
    #[serde(default)]
    pub domain: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    pub kind: String,
    #[serde(default)]
    pub amplitude: Option<f64>,
    #[serde(default)]
    pub frequency_rad_s: Option<f64>,
    #[serde(default)]
    pub path: Option<String>,
}

impl SystemDefinition {
    pub fn parse(text: &str) -> Result<Self, String> {
        // toml errors carry line/column and the offending key.
        toml::from_str(text).map_err(|e| format!("system definition: {e}"))
    }

    /// Builds the system on the given grid, materializing the input
    /// waveform. `base_dir` resolves relative `kind = "file"` paths.
    pub fn materialize(
        &self,
        grid: PeriodicGrid,
        base_dir: &Path,
        probe_seed: u64,
    ) -> Result<MixedFeedbackSystem, String> {
        let h_inverse = LtiRelation::new(&self.lti.numerator, &self.lti.denominator)
            .map_err(|e| format!("[lti]: {e}"))?;
        let e1_domain = self
            .e1
            .domain
            .map(|[lo, hi]| (lo, hi))
            .unwrap_or(StaticPolyRelation::DEFAULT_DOMAIN);
        if self.e1.coefficients.len() > 8 {
            return Err("[e1].coefficients: polynomial degree is limited to 7".into());
        }
        let e1 = StaticPolyRelation::new(&self.e1.coefficients, e1_domain)
            .map_err(|e| format!("[e1]: {e}"))?;

        let e2 = match (&self.e2.gain, &self.e2.coefficients) {
            (Some(g), None) => PositiveFeedback::Gain(GainRelation::new(*g)),
            (None, Some(coeffs)) => {
                if coeffs.len() > 8 {
                    return Err("[e2].coefficients: polynomial degree is limited to 7".into());
                }
                let domain = self
                    .e2
                    .domain
                    .map(|[lo, hi]| (lo, hi))
                    .unwrap_or(StaticPolyRelation::DEFAULT_DOMAIN);
                PositiveFeedback::Poly(
                    StaticPolyRelation::new(coeffs, domain).map_err(|e| format!("[e2]: {e}"))?,
                )
            }
            _ => {
                return Err(
                    "[e2]: specify exactly one of `gain` or `coefficients`".into(),
                )
            }
        };

        let input = match &self.input {
            None => None,
            Some(section) => match section.kind.as_str() {
                "zero" => None,
                "sine" => {
                    let amplitude = section.amplitude.ok_or(
                        "[input]: `amplitude` is required for kind = \"sine\"",
                    )?;
                    let omega = section.frequency_rad_s.ok_or(
                        "[input]: `frequency_rad_s` is required for kind = \"sine\"",
                    )?;
                    Some(
                        PeriodicSignal::from_fn(grid, |t| amplitude * (omega * t).sin())
                            .map_err(|e| format!("[input]: {e}"))?,
                    )
                }
                "file" => {
                    let rel = section
                        .path
                        .as_ref()
                        .ok_or("[input]: `path` is required for kind = \"file\"")?;
                    let path = base_dir.join(rel);
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| format!("[input].path {}: {e}", path.display()))?;
                    Some(
                        PeriodicSignal::from_csv(grid, &text)
                            .map_err(|e| format!("[input].path {}: {e}", path.display()))?,
                    )
                }
                other => {
                    return Err(format!(
                        "[input].kind: expected zero | sine | file, got `{other}`"
                    ))
                }
            },
        };

        let label = self.label.clone().unwrap_or_else(|| "user-system".into());
        MixedFeedbackSystem::new(h_inverse, e1, e2, input, label, probe_seed)
            .map_err(|e| e.to_string())
    }
}
