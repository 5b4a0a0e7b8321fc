//! Report document. Field order is the emission order, and every list is
//! sorted, so equal inputs give byte-identical reports.

use serde::{Deserialize, Serialize};

use crate::spec::RelationSection;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub meta: Meta,
    pub relation: RelationSection,
    pub chain: Option<ChainReport>,
    pub morse: Option<MorseReport>,
    pub lyapunov: Option<LyapunovReport>,
    pub conley: Option<ConleyReport>,
    pub robust: Option<RobustReport>,
    pub perturb: Option<PerturbReport>,
    pub semiflow: Option<SemiflowReport>,
    pub hybrid: Option<HybridReport>,
    pub paths: Option<PathsReport>,
    #[serde(default)]
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn verified(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_toml(&self) -> Result<String, toml::ser::Error> {
        toml::to_string(self)
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub name: String,
    pub kind: String,
    pub schema: u32,
    pub tool_version: String,
    pub spec_hash: String,
    pub seed: String,
    pub analyses: Vec<String>,
    pub eps: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub analysis: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainLevel {
    pub eps: f64,
    pub recurrent: Vec<usize>,
    pub components: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    /// First ladder index from which the analysis no longer changes.
    pub stable_from: Option<usize>,
    pub levels: Vec<ChainLevel>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub attractor: Vec<usize>,
    pub repeller: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorseReport {
    pub eps: f64,
    pub acyclic: bool,
    pub components: Vec<Vec<usize>>,
    pub edges: Vec<[usize; 2]>,
    pub pairs: Vec<PairReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub eps: f64,
    pub pass: bool,
    pub monotone: bool,
    pub separates_components: bool,
    pub pair_count: usize,
    pub critical_set: Vec<usize>,
    pub violations: Vec<[usize; 2]>,
    /// Exact values as `p/q` strings, indexed by cell.
    pub values: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientReport {
    pub star: usize,
    pub star_attractor: Option<bool>,
    pub nodes: Vec<usize>,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConleyReport {
    pub isolating: bool,
    pub simple: bool,
    pub index_type: bool,
    pub valid: Option<bool>,
    pub region: Vec<usize>,
    pub viable_set: Vec<usize>,
    pub exit: Vec<usize>,
    pub p1: Vec<usize>,
    pub p2: Vec<usize>,
    pub failed_conditions: Vec<String>,
    pub quotient: Option<QuotientReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustReport {
    pub eps_star: Option<f64>,
    pub samples: usize,
    pub sample_passes: usize,
    pub pass: bool,
    pub ladder: Vec<f64>,
    pub u: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbReport {
    pub mode: String,
    pub eps: f64,
    pub eliminates: bool,
    pub containment_fwd: bool,
    pub containment_bwd: bool,
    pub annihilation_n: Option<usize>,
    pub surjective: bool,
    pub changed_cells: Vec<usize>,
    pub retract_to: Vec<usize>,
    pub g: RelationSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemiflowReport {
    pub steps_per_unit: usize,
    pub complete: bool,
    pub kolmogorov_horizon: usize,
    pub weak_kolmogorov: bool,
    pub isolating: bool,
    pub index_type: bool,
    pub valid: Option<bool>,
    pub region: Vec<usize>,
    pub terminal: Vec<usize>,
    pub exit: Vec<usize>,
    pub viable_set: Vec<usize>,
    pub p2: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridReport {
    pub steps_per_unit: usize,
    pub complete: bool,
    pub h_edges: usize,
    pub teel_edges: usize,
    pub sandwich: bool,
    pub chain_agrees: bool,
    pub lyapunov_pass: bool,
    pub isolating: Option<bool>,
    pub valid: Option<bool>,
    pub flow_set: Vec<usize>,
    pub jump_domain: Vec<usize>,
    pub exit: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathsReport {
    pub max_length: f64,
    pub cap: usize,
    pub count: usize,
    pub truncated: bool,
    /// Every enumerated hybrid path of length at least one spans an orbit
    /// with `ℓ/3 ≤ k ≤ ℓ`; always true for plain relations.
    pub span_ok: bool,
    pub sample: Vec<Vec<usize>>,
}
