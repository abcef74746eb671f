//! Count results and the backends that produce them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::logic::Interpretation;
use crate::semiring::Value;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    #[default]
    Auto,
    Enumerate,
    Circuit,
    ExactMeasure,
    Mc,
    VertexEnum,
    ProjectedGradient,
    GridRefine,
}

impl Backend {
    pub const ALL: [Backend; 8] = [
        Backend::Auto,
        Backend::Enumerate,
        Backend::Circuit,
        Backend::ExactMeasure,
        Backend::Mc,
        Backend::VertexEnum,
        Backend::ProjectedGradient,
        Backend::GridRefine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Auto => "auto",
            Backend::Enumerate => "enumerate",
            Backend::Circuit => "circuit",
            Backend::ExactMeasure => "exact-measure",
            Backend::Mc => "mc",
            Backend::VertexEnum => "vertex-enum",
            Backend::ProjectedGradient => "projected-gradient",
            Backend::GridRefine => "grid-refine",
        }
    }

    pub fn is_optimizer(self) -> bool {
        matches!(
            self,
            Backend::VertexEnum | Backend::ProjectedGradient | Backend::GridRefine
        )
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Backend::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown backend `{s}`"))
    }
}

/// Counters reported with a result. Absent entries do not apply to the backend.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub models: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_nodes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free_slots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circuit_nodes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circuit_edges: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regions: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hits: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluations: Option<u64>,
    /// Wall time. Not serialized.
    #[serde(skip)]
    pub wall_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountResult {
    pub value: Value,
    pub witness: Option<Interpretation>,
    pub exact: bool,
    pub std_error: Option<f64>,
    /// `infeasible`, `not-attained`, `diverged`, ...
    pub flags: Vec<String>,
    pub stats: Stats,
    pub backend: Backend,
}

impl CountResult {
    pub fn exact(value: Value, backend: Backend) -> Self {
        CountResult {
            exact: value.is_exact(),
            value,
            witness: None,
            std_error: None,
            flags: Vec::new(),
            stats: Stats::default(),
            backend,
        }
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }
}
