use ft_core::optimizer::DEFAULT_POOL_SIZE;
use ft_core::Scenario;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Bundled fixture name or an inline network document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NetworkRef {
    Fixture(String),
    Inline(Value),
}

fn default_samples() -> u64 {
    10_000
}

fn default_k_pool() -> usize {
    DEFAULT_POOL_SIZE
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestOptions {
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_k_pool")]
    pub k_pool: usize,
    #[serde(default = "yes")]
    pub want_map: bool,
}

impl Default for RequestOptions {
    fn default() -> Self {
        RequestOptions { samples: default_samples(), k_pool: default_k_pool(), want_map: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioRequest {
    pub network_ref: NetworkRef,
    pub scenario: Scenario,
    #[serde(default)]
    pub options: RequestOptions,
}

impl ScenarioRequest {
    pub fn fixture(name: &str, scenario: Scenario) -> Self {
        ScenarioRequest { network_ref: NetworkRef::Fixture(name.into()), scenario, options: RequestOptions::default() }
    }

    /// The bundled Seattle to Orlando demo request.
    pub fn demo() -> Self {
        Self::fixture("fixture14", ft_core::fixtures::demo_scenario())
    }

    /// First 16 hex digits of the SHA-256 of the canonical request.
    pub fn hash16(&self) -> String {
        let digest = Sha256::digest(ft_core::canon::to_string(self).as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
