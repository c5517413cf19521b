//! Multimodal network data model: nodes, mode-tagged edges and the
//! intermodal transfer rules that permit a mode change at a node.

mod faf;
mod graph;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use faf::{ingest_faf_flows, DemandRecord, FafError, FAF_HEADER};
pub use graph::{Arc, NetworkGraph};
pub use validate::{validate_network, Violation, ViolationCode};

/// Transport mode of an edge. Closed set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TransportMode {
    Highway,
    Rail,
    Water,
}

impl TransportMode {
    pub const ALL: [TransportMode; 3] = [TransportMode::Highway, TransportMode::Rail, TransportMode::Water];

    pub fn as_str(self) -> &'static str {
        match self {
            TransportMode::Highway => "Highway",
            TransportMode::Rail => "Rail",
            TransportMode::Water => "Water",
        }
    }
}

impl fmt::Display for TransportMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    City,
    Terminal,
    RailStation,
    Seaport,
    Warehouse,
    Junction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkNode {
    pub id: u64,
    pub name: String,
    pub kind: NodeKind,
    /// Degrees WGS84.
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkEdge {
    pub id: u64,
    pub from_node: u64,
    pub to_node: u64,
    pub mode: TransportMode,
    pub distance_miles: f64,
    pub speed_mph: f64,
    pub op_cost_per_container_mile: f64,
    pub emission_kg_per_container_mile: f64,
    /// Throughput cap over the scenario horizon. Shared by both directions
    /// of a bidirectional edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity_containers: Option<u64>,
    #[serde(default)]
    pub bidirectional: bool,
}

impl NetworkEdge {
    /// Traversal time in hours.
    pub fn hours(&self) -> f64 {
        self.distance_miles / self.speed_mph
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferRule {
    pub node_id: u64,
    pub from_mode: TransportMode,
    pub to_mode: TransportMode,
    pub transfer_time_hours: f64,
    pub transfer_cost_per_container: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Network {
    pub name: String,
    pub nodes: Vec<NetworkNode>,
    pub edges: Vec<NetworkEdge>,
    #[serde(default)]
    pub transfers: Vec<TransferRule>,
}

impl Network {
    pub fn node(&self, id: u64) -> Option<&NetworkNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn edge(&self, id: u64) -> Option<&NetworkEdge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn transfer(&self, node_id: u64, from_mode: TransportMode, to_mode: TransportMode) -> Option<&TransferRule> {
        self.transfers
            .iter()
            .find(|t| t.node_id == node_id && t.from_mode == from_mode && t.to_mode == to_mode)
    }

    /// Distinct modes present on edges, sorted.
    pub fn modes(&self) -> Vec<TransportMode> {
        let mut modes: Vec<_> = self.edges.iter().map(|e| e.mode).collect();
        modes.sort();
        modes.dedup();
        modes
    }

    pub fn is_capacitated(&self) -> bool {
        self.edges.iter().any(|e| e.capacity_containers.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("network parse error: {0}")]
    Parse(String),
    #[error("network validation failed: {}", join_violations(.0))]
    Validation(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.message.as_str()).collect::<Vec<_>>().join("; ")
}

/// Parses and validates a network JSON document.
pub fn load_network(document: &str) -> Result<Network, NetworkError> {
    let net: Network = serde_json::from_str(document).map_err(|e| NetworkError::Parse(e.to_string()))?;
    check(net)
}

/// Like [`load_network`] for an already-parsed JSON value.
pub fn network_from_value(value: &serde_json::Value) -> Result<Network, NetworkError> {
    let net = Network::deserialize(value).map_err(|e| NetworkError::Parse(e.to_string()))?;
    check(net)
}

fn check(net: Network) -> Result<Network, NetworkError> {
    let violations = validate_network(&net);
    if violations.is_empty() {
        Ok(net)
    } else {
        Err(NetworkError::Validation(violations))
    }
}

/// Canonical JSON text of a network.
pub fn serialize_network(net: &Network) -> String {
    crate::canon::to_string(net)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "name": "pair",
        "nodes": [
            {"id": 1, "name": "A", "kind": "City", "lat": 47.6, "lon": -122.3},
            {"id": 2, "name": "B", "kind": "Terminal", "lat": 45.5, "lon": -122.7}
        ],
        "edges": [
            {"id": 1, "from_node": 1, "to_node": 2, "mode": "Highway", "distance_miles": 174,
             "speed_mph": 60, "op_cost_per_container_mile": 1.5, "emission_kg_per_container_mile": 0.1}
        ],
        "transfers": []
    }"#;

    #[test]
    fn minimal_document_loads() {
        let net = load_network(MINIMAL).unwrap();
        assert_eq!(net.nodes.len(), 2);
        assert_eq!(net.edges.len(), 1);
        assert!(!net.edges[0].bidirectional);
        assert_eq!(net.edges[0].capacity_containers, None);
    }

    #[test]
    fn dangling_from_node_is_reported() {
        let doc = MINIMAL.replace(r#""from_node": 1"#, r#""from_node": 99"#);
        match load_network(&doc) {
            Err(NetworkError::Validation(v)) => {
                assert_eq!(v.len(), 1);
                assert_eq!(v[0].code, ViolationCode::UnknownFromNode);
                assert_eq!(v[0].message, "edge 1: unknown from_node 99");
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let doc = MINIMAL.replace(r#""name": "pair","#, r#""name": "pair", "owner": "x","#);
        assert!(matches!(load_network(&doc), Err(NetworkError::Parse(_))));
    }

    #[test]
    fn bad_mode_string_rejected() {
        let doc = MINIMAL.replace(r#""Highway""#, r#""highway""#);
        assert!(matches!(load_network(&doc), Err(NetworkError::Parse(_))));
    }

    #[test]
    fn malformed_json_is_parse_error() {
        assert!(matches!(load_network("{\"name\": "), Err(NetworkError::Parse(_))));
    }

    #[test]
    fn round_trip_is_identity() {
        let net = load_network(MINIMAL).unwrap();
        let again = load_network(&serialize_network(&net)).unwrap();
        assert_eq!(net, again);
    }
}
