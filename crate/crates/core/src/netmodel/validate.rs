use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::Network;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    BadCoordinate,
    DupEdgeId,
    DupNodeId,
    DupTransfer,
    NegativeCost,
    NegativeEmission,
    NegativeTransferCost,
    NegativeTransferTime,
    NonpositiveCapacity,
    NonpositiveDistance,
    NonpositiveId,
    NonpositiveSpeed,
    SelfLoop,
    TransferSameMode,
    UnknownFromNode,
    UnknownToNode,
    UnknownTransferNode,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::BadCoordinate => "BAD_COORDINATE",
            ViolationCode::DupEdgeId => "DUP_EDGE_ID",
            ViolationCode::DupNodeId => "DUP_NODE_ID",
            ViolationCode::DupTransfer => "DUP_TRANSFER",
            ViolationCode::NegativeCost => "NEGATIVE_COST",
            ViolationCode::NegativeEmission => "NEGATIVE_EMISSION",
            ViolationCode::NegativeTransferCost => "NEGATIVE_TRANSFER_COST",
            ViolationCode::NegativeTransferTime => "NEGATIVE_TRANSFER_TIME",
            ViolationCode::NonpositiveCapacity => "NONPOSITIVE_CAPACITY",
            ViolationCode::NonpositiveDistance => "NONPOSITIVE_DISTANCE",
            ViolationCode::NonpositiveId => "NONPOSITIVE_ID",
            ViolationCode::NonpositiveSpeed => "NONPOSITIVE_SPEED",
            ViolationCode::SelfLoop => "SELF_LOOP",
            ViolationCode::TransferSameMode => "TRANSFER_SAME_MODE",
            ViolationCode::UnknownFromNode => "UNKNOWN_FROM_NODE",
            ViolationCode::UnknownToNode => "UNKNOWN_TO_NODE",
            ViolationCode::UnknownTransferNode => "UNKNOWN_TRANSFER_NODE",
        }
    }
}

/// One broken network invariant. `entity_id` is the node id for node and
/// transfer violations and the edge id for edge violations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
    pub entity_id: u64,
}

fn finite_nonneg(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

fn finite_pos(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

/// Checks every network invariant. The result is empty iff the network is
/// valid and is sorted by (code, entity id, message).
pub fn validate_network(net: &Network) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |code, entity_id, message: String| out.push(Violation { code, message, entity_id });

    let mut node_ids = HashSet::new();
    for node in &net.nodes {
        if node.id == 0 {
            push(ViolationCode::NonpositiveId, 0, "node id must be positive".to_string());
        }
        if !node_ids.insert(node.id) {
            push(ViolationCode::DupNodeId, node.id, format!("node {}: duplicate id", node.id));
        }
        let lat_ok = node.lat.is_finite() && (-90.0..=90.0).contains(&node.lat);
        let lon_ok = node.lon.is_finite() && (-180.0..=180.0).contains(&node.lon);
        if !lat_ok || !lon_ok {
            push(
                ViolationCode::BadCoordinate,
                node.id,
                format!("node {}: coordinate ({}, {}) out of range", node.id, node.lat, node.lon),
            );
        }
    }

    let mut edge_ids = HashSet::new();
    for e in &net.edges {
        let id = e.id;
        if id == 0 {
            push(ViolationCode::NonpositiveId, 0, "edge id must be positive".to_string());
        }
        if !edge_ids.insert(id) {
            push(ViolationCode::DupEdgeId, id, format!("edge {id}: duplicate id"));
        }
        if !node_ids.contains(&e.from_node) {
            push(ViolationCode::UnknownFromNode, id, format!("edge {id}: unknown from_node {}", e.from_node));
        }
        if !node_ids.contains(&e.to_node) {
            push(ViolationCode::UnknownToNode, id, format!("edge {id}: unknown to_node {}", e.to_node));
        }
        if e.from_node == e.to_node {
            push(ViolationCode::SelfLoop, id, format!("edge {id}: from_node equals to_node {}", e.to_node));
        }
        if !finite_pos(e.distance_miles) {
            push(ViolationCode::NonpositiveDistance, id, format!("edge {id}: distance_miles {} must be > 0", e.distance_miles));
        }
        if !finite_pos(e.speed_mph) {
            push(ViolationCode::NonpositiveSpeed, id, format!("edge {id}: speed_mph {} must be > 0", e.speed_mph));
        }
        if !finite_nonneg(e.op_cost_per_container_mile) {
            push(
                ViolationCode::NegativeCost,
                id,
                format!("edge {id}: op_cost_per_container_mile {} must be >= 0", e.op_cost_per_container_mile),
            );
        }
        if !finite_nonneg(e.emission_kg_per_container_mile) {
            push(
                ViolationCode::NegativeEmission,
                id,
                format!("edge {id}: emission_kg_per_container_mile {} must be >= 0", e.emission_kg_per_container_mile),
            );
        }
        if e.capacity_containers == Some(0) {
            push(ViolationCode::NonpositiveCapacity, id, format!("edge {id}: capacity_containers must be positive"));
        }
    }

    let mut rules = HashMap::new();
    for t in &net.transfers {
        let n = t.node_id;
        if !node_ids.contains(&n) {
            push(ViolationCode::UnknownTransferNode, n, format!("transfer at unknown node {n}"));
        }
        if t.from_mode == t.to_mode {
            push(ViolationCode::TransferSameMode, n, format!("transfer at node {n}: from_mode equals to_mode {}", t.to_mode));
        }
        if rules.insert((n, t.from_mode, t.to_mode), ()).is_some() {
            push(
                ViolationCode::DupTransfer,
                n,
                format!("transfer at node {n}: duplicate rule {} -> {}", t.from_mode, t.to_mode),
            );
        }
        if !finite_nonneg(t.transfer_time_hours) {
            push(
                ViolationCode::NegativeTransferTime,
                n,
                format!("transfer at node {n}: transfer_time_hours {} must be >= 0", t.transfer_time_hours),
            );
        }
        if !finite_nonneg(t.transfer_cost_per_container) {
            push(
                ViolationCode::NegativeTransferCost,
                n,
                format!("transfer at node {n}: transfer_cost_per_container {} must be >= 0", t.transfer_cost_per_container),
            );
        }
    }

    out.sort_by(|a, b| {
        (a.code.as_str(), a.entity_id, &a.message).cmp(&(b.code.as_str(), b.entity_id, &b.message))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{NetworkEdge, NetworkNode, NodeKind, TransferRule, TransportMode};

    fn node(id: u64) -> NetworkNode {
        NetworkNode { id, name: format!("n{id}"), kind: NodeKind::Junction, lat: 40.0, lon: -100.0 }
    }

    fn edge(id: u64, from: u64, to: u64) -> NetworkEdge {
        NetworkEdge {
            id,
            from_node: from,
            to_node: to,
            mode: TransportMode::Highway,
            distance_miles: 10.0,
            speed_mph: 50.0,
            op_cost_per_container_mile: 1.0,
            emission_kg_per_container_mile: 0.1,
            capacity_containers: None,
            bidirectional: false,
        }
    }

    fn net() -> Network {
        Network { name: "t".into(), nodes: vec![node(1), node(2), node(3)], edges: vec![edge(1, 1, 2), edge(2, 2, 3)], transfers: vec![] }
    }

    #[test]
    fn valid_network_has_no_violations() {
        assert!(validate_network(&net()).is_empty());
    }

    #[test]
    fn duplicate_node_id() {
        let mut n = net();
        n.nodes.push(node(3));
        let v = validate_network(&n);
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].code, v[0].entity_id), (ViolationCode::DupNodeId, 3));
    }

    #[test]
    fn zero_speed() {
        let mut n = net();
        n.edges[1].speed_mph = 0.0;
        let v = validate_network(&n);
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].code, v[0].entity_id), (ViolationCode::NonpositiveSpeed, 2));
    }

    #[test]
    fn violations_are_sorted_and_complete() {
        let mut n = net();
        n.edges[1].distance_miles = -1.0;
        n.edges[0].to_node = 1;
        n.edges.push(edge(2, 1, 7));
        n.nodes[0].lat = 91.0;
        n.transfers.push(TransferRule {
            node_id: 9,
            from_mode: TransportMode::Rail,
            to_mode: TransportMode::Rail,
            transfer_time_hours: -1.0,
            transfer_cost_per_container: 0.0,
        });
        let codes: Vec<_> = validate_network(&n).iter().map(|v| (v.code.as_str(), v.entity_id)).collect();
        assert_eq!(
            codes,
            vec![
                ("BAD_COORDINATE", 1),
                ("DUP_EDGE_ID", 2),
                ("NEGATIVE_TRANSFER_TIME", 9),
                ("NONPOSITIVE_DISTANCE", 2),
                ("SELF_LOOP", 1),
                ("TRANSFER_SAME_MODE", 9),
                ("UNKNOWN_TO_NODE", 2),
                ("UNKNOWN_TRANSFER_NODE", 9),
            ]
        );
    }

    #[test]
    fn duplicate_transfer_rule() {
        let mut n = net();
        let rule = TransferRule {
            node_id: 2,
            from_mode: TransportMode::Highway,
            to_mode: TransportMode::Rail,
            transfer_time_hours: 1.0,
            transfer_cost_per_container: 5.0,
        };
        n.transfers = vec![rule.clone(), rule];
        let v = validate_network(&n);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].code, ViolationCode::DupTransfer);
    }

    #[test]
    fn nan_cost_is_caught() {
        let mut n = net();
        n.edges[0].op_cost_per_container_mile = f64::NAN;
        assert_eq!(validate_network(&n)[0].code, ViolationCode::NegativeCost);
    }
}
