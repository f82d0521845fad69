//! Typed run configurations. Everything deserializes from the JSON config
//! file with unknown keys rejected; `--set` overrides are applied to the
//! raw JSON before this parse.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

fn default_t() -> f64 {
    1.0
}
fn default_e_p() -> f64 {
    2.0 * PI / 3.0
}
fn default_alpha() -> f64 {
    2.0 * PI / 3.0
}
fn default_a2_two_level() -> f64 {
    0.5
}
fn default_a2_fair() -> f64 {
    5.0 / 6.0
}
fn default_n() -> usize {
    100
}
fn default_s_max() -> f64 {
    2.0 * PI
}
fn default_n_samples() -> usize {
    401
}
fn default_gap_samples() -> usize {
    2001
}
fn default_epsilon() -> f64 {
    0.1
}
fn default_rc_exponent() -> f64 {
    2.0
}
fn default_rc_fine_grid() -> usize {
    1 << 16
}
fn default_cap() -> usize {
    1 << 22
}
fn default_l_values() -> Vec<usize> {
    (4..=14).map(|k| 1 << k).collect()
}
fn default_true() -> bool {
    true
}
fn default_clock_e_p() -> f64 {
    0.5
}
fn default_l_steps() -> usize {
    4096
}
fn default_delta_l_max() -> usize {
    8
}
fn default_n_values() -> Vec<usize> {
    vec![100, 1_000, 10_000, 100_000, 1_000_000]
}
fn default_t_max() -> f64 {
    20.0
}
fn default_lz_z() -> f64 {
    1.0
}
fn default_lz_g() -> f64 {
    0.3
}
fn default_discretize_l() -> Vec<usize> {
    (4..=12).map(|k| 1 << k).collect()
}
fn default_reference_l() -> usize {
    8192
}

/// Gate entry of a circuit description: either a named gate or an explicit
/// matrix (`[[ [re, im], ... ], ...]`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    pub targets: Vec<usize>,
}

/// Model selection shared by the spectrum and passage commands.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "model", deny_unknown_fields)]
pub enum ModelConfig {
    #[serde(rename = "two_level")]
    TwoLevel {
        #[serde(rename = "E2", default = "default_e_p")]
        e2: f64,
        #[serde(default = "default_a2_two_level")]
        a2: f64,
        #[serde(rename = "T", default = "default_t")]
        t: f64,
    },
    #[serde(rename = "grover_optimal")]
    GroverOptimal {
        #[serde(rename = "E_P", default = "default_e_p")]
        e_p: f64,
        #[serde(rename = "T", default = "default_t")]
        t: f64,
    },
    #[serde(rename = "grover_fair")]
    GroverFair {
        #[serde(rename = "N", default = "default_n")]
        n: usize,
        #[serde(default = "default_a2_fair")]
        a2: f64,
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(rename = "E_P", default = "default_e_p")]
        e_p: f64,
        #[serde(rename = "T", default = "default_t")]
        t: f64,
        #[serde(default)]
        theta: f64,
    },
    #[serde(rename = "clocksim")]
    ClockSim {
        n: usize,
        gates: Vec<GateConfig>,
        #[serde(rename = "E_P", default = "default_clock_e_p")]
        e_p: f64,
        #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
        t: Option<f64>,
    },
    #[serde(rename = "custom")]
    Custom { matrix_file: String },
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::GroverOptimal {
            e_p: default_e_p(),
            t: default_t(),
        }
    }
}

/// Payload of a custom-model matrix file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomMatrixFile {
    pub h0: Vec<Vec<[f64; 2]>>,
    pub v: Vec<[f64; 2]>,
    #[serde(rename = "T", default = "default_t")]
    pub t: f64,
    #[serde(default)]
    pub start_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_index: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumConfig {
    #[serde(flatten)]
    pub model: ModelConfig,
    #[serde(default)]
    pub s_from: f64,
    #[serde(default = "default_s_max")]
    pub s_to: f64,
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            s_from: 0.0,
            s_to: default_s_max(),
            n_samples: default_n_samples(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScheduleKind {
    #[serde(rename = "linear")]
    Linear,
    #[serde(rename = "roland_cerf")]
    RolandCerf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PassageConfig {
    #[serde(flatten)]
    pub model: ModelConfig,
    #[serde(default = "ScheduleKind::linear")]
    pub schedule: ScheduleKind,
    #[serde(default = "default_rc_exponent")]
    pub rc_exponent: f64,
    #[serde(default = "default_rc_fine_grid")]
    pub rc_fine_grid: usize,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_l_values")]
    pub l_values: Vec<usize>,
    #[serde(default = "default_true")]
    pub find_running_time: bool,
    #[serde(default = "default_cap")]
    pub cap: usize,
    #[serde(default)]
    pub seed: u64,
}

impl ScheduleKind {
    fn linear() -> Self {
        ScheduleKind::Linear
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapScanConfig {
    #[serde(rename = "N_values", default = "default_n_values")]
    pub n_values: Vec<usize>,
    #[serde(default = "default_a2_fair")]
    pub a2: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(rename = "E_P", default = "default_e_p")]
    pub e_p: f64,
    #[serde(rename = "T", default = "default_t")]
    pub t: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default = "default_gap_samples")]
    pub n_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for GapScanConfig {
    fn default() -> Self {
        serde_json::from_value(serde_json::json!({})).expect("defaults are complete")
    }
}

fn default_demo_n() -> usize {
    1
}
fn default_demo_gates() -> Vec<GateConfig> {
    vec![GateConfig {
        gate: Some("X".into()),
        theta: None,
        matrix: None,
        targets: vec![0],
    }]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClockDemoConfig {
    #[serde(default = "default_demo_n")]
    pub n: usize,
    #[serde(default = "default_demo_gates")]
    pub gates: Vec<GateConfig>,
    #[serde(rename = "E_P", default = "default_clock_e_p")]
    pub e_p: f64,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default = "default_l_steps")]
    pub l_steps: usize,
    #[serde(default = "default_delta_l_max")]
    pub delta_l_max: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for ClockDemoConfig {
    fn default() -> Self {
        serde_json::from_value(serde_json::json!({})).expect("defaults are complete")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizeConfig {
    #[serde(rename = "T_max", default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_lz_z")]
    pub z: f64,
    #[serde(default = "default_lz_g")]
    pub g: f64,
    #[serde(rename = "L_values", default = "default_discretize_l")]
    pub l_values: Vec<usize>,
    #[serde(rename = "reference_L", default = "default_reference_l")]
    pub reference_l: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for DiscretizeConfig {
    fn default() -> Self {
        serde_json::from_value(serde_json::json!({})).expect("defaults are complete")
    }
}

/// Keys each model variant accepts. `flatten` cannot enforce unknown-key
/// rejection, so configs that embed a model are validated by hand.
fn model_keys(tag: &str) -> Option<&'static [&'static str]> {
    match tag {
        "two_level" => Some(&["E2", "a2", "T"]),
        "grover_optimal" => Some(&["E_P", "T"]),
        "grover_fair" => Some(&["N", "a2", "alpha", "E_P", "T", "theta"]),
        "clocksim" => Some(&["n", "gates", "E_P", "T"]),
        "custom" => Some(&["matrix_file"]),
        _ => None,
    }
}

/// Reject unknown top-level keys for a config that embeds a model.
pub fn validate_model_config_keys(
    raw: &serde_json::Value,
    command_keys: &[&str],
) -> Result<(), String> {
    let map = raw.as_object().ok_or("config root must be a JSON object")?;
    let tag = map
        .get("model")
        .and_then(|v| v.as_str())
        .ok_or("missing or non-string `model` key")?;
    let allowed_model = model_keys(tag)
        .ok_or_else(|| format!("unknown model `{tag}`"))?;
    for key in map.keys() {
        if key == "model" || command_keys.contains(&key.as_str()) || allowed_model.contains(&key.as_str()) {
            continue;
        }
        return Err(format!("unknown key `{key}` for model `{tag}`"));
    }
    Ok(())
}

pub const SPECTRUM_KEYS: &[&str] = &["s_from", "s_to", "n_samples", "seed"];
pub const PASSAGE_KEYS: &[&str] = &[
    "schedule",
    "rc_exponent",
    "rc_fine_grid",
    "epsilon",
    "l_values",
    "find_running_time",
    "cap",
    "seed",
];
