use std::collections::HashMap;

use super::{Network, NetworkEdge, TransferRule, TransportMode};

/// A directed traversal of an edge. Bidirectional edges yield two arcs that
/// share the edge id (and therefore its capacity budget).
#[derive(Debug, Clone)]
pub struct Arc {
    pub edge_id: u64,
    pub from: usize,
    pub to: usize,
    pub mode: TransportMode,
    pub hours: f64,
    pub distance_miles: f64,
    /// distance × op cost, USD per container.
    pub unit_linehaul: f64,
    /// distance × emission factor, kg per container.
    pub unit_emission: f64,
}

/// Index over a validated network: dense node indices, expanded arcs and a
/// transfer-rule lookup.
#[derive(Debug)]
pub struct NetworkGraph<'a> {
    pub net: &'a Network,
    node_index: HashMap<u64, usize>,
    pub arcs: Vec<Arc>,
    /// Outgoing arc indices per node, ordered by edge id.
    pub out: Vec<Vec<usize>>,
    transfers: HashMap<(u64, TransportMode, TransportMode), &'a TransferRule>,
    edges: HashMap<u64, &'a NetworkEdge>,
}

impl<'a> NetworkGraph<'a> {
    pub fn new(net: &'a Network) -> Self {
        let node_index: HashMap<u64, usize> = net.nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
        let mut arcs = Vec::with_capacity(net.edges.len() * 2);
        let mut sorted: Vec<&NetworkEdge> = net.edges.iter().collect();
        sorted.sort_by_key(|e| e.id);
        for e in sorted {
            let (Some(&from), Some(&to)) = (node_index.get(&e.from_node), node_index.get(&e.to_node)) else {
                continue;
            };
            let arc = |from, to| Arc {
                edge_id: e.id,
                from,
                to,
                mode: e.mode,
                hours: e.hours(),
                distance_miles: e.distance_miles,
                unit_linehaul: e.distance_miles * e.op_cost_per_container_mile,
                unit_emission: e.distance_miles * e.emission_kg_per_container_mile,
            };
            arcs.push(arc(from, to));
            if e.bidirectional {
                arcs.push(arc(to, from));
            }
        }
        let mut out = vec![Vec::new(); net.nodes.len()];
        for (i, a) in arcs.iter().enumerate() {
            out[a.from].push(i);
        }
        NetworkGraph {
            net,
            node_index,
            arcs,
            out,
            transfers: net.transfers.iter().map(|t| ((t.node_id, t.from_mode, t.to_mode), t)).collect(),
            edges: net.edges.iter().map(|e| (e.id, e)).collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.net.nodes.len()
    }

    pub fn index_of(&self, node_id: u64) -> Option<usize> {
        self.node_index.get(&node_id).copied()
    }

    pub fn node_id(&self, index: usize) -> u64 {
        self.net.nodes[index].id
    }

    pub fn edge(&self, id: u64) -> Option<&'a NetworkEdge> {
        self.edges.get(&id).copied()
    }

    pub fn transfer(&self, node_id: u64, from: TransportMode, to: TransportMode) -> Option<&'a TransferRule> {
        self.transfers.get(&(node_id, from, to)).copied()
    }

    /// Transfer needed to leave `node` in `next` mode after arriving in
    /// `last`. `Some(None)` when no mode change happens, `None` when the
    /// change is forbidden (no rule at this node).
    pub fn transition(
        &self,
        node: usize,
        last: Option<TransportMode>,
        next: TransportMode,
    ) -> Option<Option<&'a TransferRule>> {
        match last {
            None => Some(None),
            Some(m) if m == next => Some(None),
            Some(m) => self.transfer(self.node_id(node), m, next).map(Some),
        }
    }
}
