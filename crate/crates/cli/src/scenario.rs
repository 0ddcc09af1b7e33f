//! Scenario files: JSON descriptions of a model, its initial states and the tasks to run.
//!
//! Dimensionless quantities are in units of the matter splitting `h_z` (or of the
//! lowest drive frequency for the three-mode model). Only the `applications`
//! block carries SI quantities with explicit unit strings.

use std::path::Path;

use prft::applications::{FrequencyConvention, Quantity};
use prft::linalg::{c, CMat};
use prft::semiclassical::IntegratorSpec;
use prft::system::{DrivenSystem, ModeSpec, PhotonMode};
use prft::{Complex64, CountingGrid};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub initial_states: Vec<InitialStateSpec>,
    /// one entry per drive mode
    #[serde(default)]
    pub photons: Vec<PhotonMode>,
    #[serde(default)]
    pub counting: Option<CountingSpec>,
    #[serde(default)]
    pub times: Option<TimeGrid>,
    pub tasks: Vec<Task>,
    #[serde(default)]
    pub oracle: OracleSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub integrator: Option<IntegratorSettings>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub applications: Option<ApplicationsSpec>,
    /// Merge patches over this scenario; each variant runs into its own subdirectory.
    #[serde(default)]
    pub variants: Vec<Variant>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Variant {
    pub label: String,
    pub patch: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Jc { h_z: f64, omega: f64, g: f64, phase: f64 },
    Rabi { h_z: f64, omega: f64, g: f64, phase: f64 },
    TwoModeJc { h_z: f64, omega: f64, g: [f64; 2], phases: [f64; 2] },
    ThreeModeRabi { h_z: f64, omegas: [f64; 3], g: [f64; 3], phases: [f64; 3] },
    Custom { h0: Vec<Vec<[f64; 2]>>, modes: Vec<CustomMode> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomMode {
    pub omega: f64,
    pub g: f64,
    pub phase: f64,
    /// rows of `[re, im]`
    pub op: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    pub coupling: CouplingSpec,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingSpec {
    #[default]
    Hermitian,
    RotatingWave,
}

/// Exactly one of the optional fields selects the matter state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InitialStateSpec {
    pub label: String,
    /// computational basis index (0 = spin up)
    #[serde(default)]
    pub basis: Option<usize>,
    /// index of a Floquet state, ordered by quasienergy
    #[serde(default)]
    pub floquet: Option<usize>,
    /// coefficients `[re, im]` in the Floquet basis
    #[serde(default)]
    pub floquet_coefficients: Option<Vec<[f64; 2]>>,
    /// amplitudes `[re, im]` in the computational basis
    #[serde(default)]
    pub amplitudes: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountingSpec {
    /// counted mode (0-based)
    #[serde(default)]
    pub mode: usize,
    /// number of counting-field points on the circle
    pub grid: usize,
    /// largest photon change expected; checked against the grid
    #[serde(default)]
    pub window: Option<usize>,
    #[serde(default)]
    pub cumulant_method: CumulantMethodSpec,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CumulantMethodSpec {
    #[default]
    Spectral,
    FiniteDifference,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum TimeGrid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl TimeGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            TimeGrid::List(v) => v.clone(),
            TimeGrid::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n).map(|i| start + (stop - start) * i as f64 / (*n - 1) as f64).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Propagate,
    Floquet,
    Cumulants,
    Quasiprob,
    Redistribute,
    Purity,
    OracleCompare,
    StandardFcs,
    CoherenceTime,
    TransferRate,
    Protocol,
}

impl Task {
    pub fn needs_model(self) -> bool {
        !matches!(self, Task::CoherenceTime | Task::TransferRate | Task::Protocol)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Elements {
    /// `sqrt(n)` matrix elements with `g_tilde = g / sqrt(mean)`
    #[default]
    Exact,
    /// `sqrt(n)` replaced by the coherent amplitude
    Semiclassical,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OracleSpec {
    #[serde(default)]
    pub elements: Elements,
    /// extra Fock states on each side of the initial window
    #[serde(default)]
    pub pad: Option<i64>,
}

/// Bounds checked by `oracle_compare`; a deviation passes if it is within the
/// absolute bound or the relative bound.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default)]
    pub kappa1_abs: Option<f64>,
    #[serde(default)]
    pub kappa2_abs: Option<f64>,
    #[serde(default)]
    pub kappa_rel: Option<f64>,
    /// relative bound for `kappa2`, defaults to `kappa_rel`
    #[serde(default)]
    pub kappa2_rel: Option<f64>,
    #[serde(default)]
    pub bloch_abs: Option<f64>,
    #[serde(default)]
    pub pn_l1: Option<f64>,
    #[serde(default)]
    pub purity_abs: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntegratorSettings {
    #[serde(default)]
    pub steps_per_period: Option<usize>,
    #[serde(default)]
    pub unitarity_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ApplicationsSpec {
    #[serde(default)]
    pub convention: FrequencyConvention,
    #[serde(default)]
    pub coherence: Option<CoherenceSpec>,
    #[serde(default)]
    pub transfer: Option<TransferSpec>,
    #[serde(default)]
    pub protocol: Option<ProtocolSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoherenceSpec {
    Traveling {
        frequency: Quantity,
        power: Quantity,
        /// quasienergy-derivative differences, used literally as rad/s
        derivative_gaps: Vec<Quantity>,
    },
    Closed {
        field: Quantity,
        volume: Quantity,
        modes: Vec<ClosedModeSpec>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosedModeSpec {
    pub frequency: Quantity,
    pub derivative_gaps: Vec<Quantity>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferSpec {
    pub n_atoms: usize,
    /// used literally as rad/s
    pub rabi: Quantity,
    pub frequency: Quantity,
    pub power: Quantity,
    pub attenuation: Quantity,
    pub distance: Quantity,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub n_atoms: usize,
    pub rabi: Quantity,
    pub frequency: Quantity,
    pub power: Quantity,
    pub attenuation: Quantity,
    pub distance: Quantity,
    /// defaults to the inverse transfer rate
    #[serde(default)]
    pub pulse: Option<Quantity>,
    pub trials: u64,
    #[serde(default = "yes")]
    pub shot_noise: bool,
}

fn yes() -> bool {
    true
}

/// Parses scenario JSON, rejecting unknown keys (all of them are listed).
pub fn parse_value(value: Value) -> Result<Scenario, CliError> {
    let mut unknown = Vec::new();
    let s: Scenario = serde_ignored::deserialize(value, |path| unknown.push(path.to_string()))
        .map_err(|e| CliError::Validation(vec![format!("schema: {e}")]))?;
    if !unknown.is_empty() {
        return Err(CliError::Validation(unknown.into_iter().map(|k| format!("unknown key '{k}'")).collect()));
    }
    Ok(s)
}

pub fn parse_str(text: &str) -> Result<Scenario, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Validation(vec![format!("invalid JSON: {e}")]))?;
    parse_value(value)
}

pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_str(&text)
}

/// RFC 7396 merge patch.
pub fn merge_patch(target: &mut Value, patch: &Value) {
    match patch {
        Value::Object(p) => {
            if !target.is_object() {
                *target = Value::Object(Default::default());
            }
            let t = target.as_object_mut().expect("object");
            for (k, v) in p {
                if v.is_null() {
                    t.remove(k);
                } else {
                    merge_patch(t.entry(k.clone()).or_insert(Value::Null), v);
                }
            }
        }
        _ => *target = patch.clone(),
    }
}

impl Scenario {
    /// The scenario itself, or one expanded scenario per variant.
    pub fn expand(&self) -> Result<Vec<(Option<String>, Scenario)>, CliError> {
        if self.variants.is_empty() {
            return Ok(vec![(None, self.clone())]);
        }
        let mut base = serde_json::to_value(self).map_err(|e| CliError::Io(e.to_string()))?;
        base.as_object_mut().expect("object").remove("variants");
        self.variants
            .iter()
            .map(|v| {
                let mut value = base.clone();
                merge_patch(&mut value, &v.patch);
                let s = parse_value(value)
                    .map_err(|e| CliError::Validation(vec![format!("variant '{}': {e}", v.label)]))?;
                Ok((Some(v.label.clone()), s))
            })
            .collect()
    }

    pub fn time_values(&self) -> Vec<f64> {
        self.times.as_ref().map(TimeGrid::values).unwrap_or_default()
    }

    pub fn has(&self, t: Task) -> bool {
        self.tasks.contains(&t)
    }

    pub fn integrator_spec(&self) -> IntegratorSpec {
        let mut spec = IntegratorSpec::default();
        if let Some(s) = &self.integrator {
            if let Some(n) = s.steps_per_period {
                spec.steps_per_period = n;
            }
            if let Some(t) = s.unitarity_tol {
                spec.unitarity_tol = t;
            }
        }
        spec
    }

    pub fn counting_grid(&self) -> Option<Result<CountingGrid, String>> {
        self.counting.as_ref().map(|c| CountingGrid::new(c.grid).map_err(|e| e.to_string()))
    }

    pub fn counted_mode(&self) -> usize {
        self.counting.as_ref().map_or(0, |c| c.mode)
    }
}

fn matrix(rows: &[Vec<[f64; 2]>]) -> Result<CMat, String> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err("matrices must be square and non-empty".into());
    }
    Ok(CMat::from_fn(n, n, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

pub fn complex_list(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|z| c(z[0], z[1])).collect()
}

impl ModelSpec {
    pub fn build(&self) -> Result<DrivenSystem, String> {
        let r = match self {
            ModelSpec::Jc { h_z, omega, g, phase } => DrivenSystem::jc(*h_z, *omega, *g, *phase),
            ModelSpec::Rabi { h_z, omega, g, phase } => DrivenSystem::rabi(*h_z, *omega, *g, *phase),
            ModelSpec::TwoModeJc { h_z, omega, g, phases } => DrivenSystem::two_mode_jc(*h_z, *omega, *g, *phases),
            ModelSpec::ThreeModeRabi { h_z, omegas, g, phases } => {
                DrivenSystem::multi_mode_rabi(*h_z, omegas, g, phases)
            }
            ModelSpec::Custom { h0, modes } => {
                let h0 = matrix(h0)?;
                let modes = modes
                    .iter()
                    .map(|m| {
                        let op = matrix(&m.op)?;
                        Ok(match m.coupling {
                            CouplingSpec::Hermitian => ModeSpec::hermitian(m.omega, m.g, m.phase, op),
                            CouplingSpec::RotatingWave => ModeSpec::rotating_wave(m.omega, m.g, m.phase, op),
                        })
                    })
                    .collect::<Result<Vec<_>, String>>()?;
                DrivenSystem::new(h0, modes)
            }
        };
        r.map_err(|e| e.to_string())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ModelSpec::Jc { .. } => "jc",
            ModelSpec::Rabi { .. } => "rabi",
            ModelSpec::TwoModeJc { .. } => "two_mode_jc",
            ModelSpec::ThreeModeRabi { .. } => "three_mode_rabi",
            ModelSpec::Custom { .. } => "custom",
        }
    }

    pub fn has_oracle(&self) -> bool {
        matches!(self, ModelSpec::Jc { .. } | ModelSpec::Rabi { .. } | ModelSpec::TwoModeJc { .. })
    }

    /// Models whose excitation number is conserved.
    pub fn conserves_excitations(&self) -> bool {
        matches!(self, ModelSpec::Jc { .. } | ModelSpec::TwoModeJc { .. })
    }
}
