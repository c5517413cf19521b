//! Deadline-constrained minimum-cost intermodal routing.
//!
//! The exact router ([`solve_rcsp`]) is a label-setting search over
//! `(node, last mode)` states with pairwise dominance. [`enumerate_paths_oracle`]
//! is an independent brute-force check of it, [`k_best_plans`] builds a
//! ranked pool of alternative plans and [`assign_flow`] splits a shipment
//! over that pool when edges carry capacity limits.
//!
//! Plan ranking is shared by every engine: lower per-container generalized
//! cost first, then earlier arrival, then the lexicographically smallest
//! sequence of edge ids. Costs or times within [`TIE_EPS`] of each other are
//! treated as equal.

mod cost;
mod flow;
mod kbest;
mod oracle;
mod rcsp;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::money;
use crate::netmodel::TransportMode;

pub use cost::{cost_breakdown, CostBreakdown};
pub use flow::{assign_flow, FlowAssignment, RouteAllocation, DEFAULT_POOL_SIZE};
pub use kbest::k_best_plans;
pub use oracle::{enumerate_paths_oracle, oracle_hop_bound, outcomes_agree};
pub use rcsp::{min_arrival_time, solve_rcsp, solve_rcsp_with, SolverOptions};

/// Absolute tolerance (USD per container, hours) under which two costs or
/// times count as tied.
pub const TIE_EPS: f64 = 1e-9;

/// Slack allowed when comparing an arrival time against the deadline.
pub const DEADLINE_EPS: f64 = 1e-9;

/// A shipment request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub origin: u64,
    pub destination: u64,
    pub containers: u64,
    pub deadline_hours: f64,
    pub carbon_price_usd_per_kg: f64,
    pub allowed_modes: Vec<TransportMode>,
    /// Coefficient of variation of travel and transfer durations, used only
    /// by the simulator.
    #[serde(default)]
    pub travel_time_cv: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        let bad = |msg: String| Err(OptimizeError::InvalidScenario { message: msg });
        if self.containers == 0 {
            return bad("containers must be at least 1".into());
        }
        if !(self.deadline_hours.is_finite() && self.deadline_hours > 0.0) {
            return bad(format!("deadline_hours must be > 0, got {}", self.deadline_hours));
        }
        if !(self.carbon_price_usd_per_kg.is_finite() && self.carbon_price_usd_per_kg >= 0.0) {
            return bad(format!("carbon_price_usd_per_kg must be >= 0, got {}", self.carbon_price_usd_per_kg));
        }
        if self.allowed_modes.is_empty() {
            return bad("allowed_modes must not be empty".into());
        }
        if !(self.travel_time_cv.is_finite() && self.travel_time_cv >= 0.0) {
            return bad(format!("travel_time_cv must be >= 0, got {}", self.travel_time_cv));
        }
        Ok(())
    }

    pub fn allows(&self, mode: TransportMode) -> bool {
        self.allowed_modes.contains(&mode)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Leg {
    pub edge_id: u64,
    pub mode: TransportMode,
    pub from_node: u64,
    pub to_node: u64,
    pub depart_hours: f64,
    pub arrive_hours: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferEvent {
    pub node_id: u64,
    pub from_mode: TransportMode,
    pub to_mode: TransportMode,
    pub start_hours: f64,
    pub end_hours: f64,
}

/// A timed origin-to-destination leg sequence with its cost decomposition
/// for the scenario's container count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoutePlan {
    pub origin: u64,
    pub destination: u64,
    pub legs: Vec<Leg>,
    pub transfers: Vec<TransferEvent>,
    #[serde(serialize_with = "money::serialize")]
    pub linehaul_usd: f64,
    #[serde(serialize_with = "money::serialize")]
    pub transfer_usd: f64,
    #[serde(serialize_with = "money::serialize")]
    pub ghg_tax_usd: f64,
    #[serde(serialize_with = "money::serialize")]
    pub total_usd: f64,
    pub total_time_hours: f64,
    pub emissions_kg: f64,
    pub optimal: bool,
}

impl RoutePlan {
    pub fn empty(node: u64) -> Self {
        RoutePlan {
            origin: node,
            destination: node,
            legs: Vec::new(),
            transfers: Vec::new(),
            linehaul_usd: 0.0,
            transfer_usd: 0.0,
            ghg_tax_usd: 0.0,
            total_usd: 0.0,
            total_time_hours: 0.0,
            emissions_kg: 0.0,
            optimal: true,
        }
    }

    pub fn edge_ids(&self) -> Vec<u64> {
        self.legs.iter().map(|l| l.edge_id).collect()
    }

    pub fn costs(&self) -> CostBreakdown {
        CostBreakdown {
            linehaul_usd: self.linehaul_usd,
            transfer_usd: self.transfer_usd,
            ghg_tax_usd: self.ghg_tax_usd,
            total_usd: self.total_usd,
            emissions_kg: self.emissions_kg,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "kind")]
pub enum OptimizeError {
    #[error("invalid scenario: {message}")]
    InvalidScenario { message: String },
    #[error("unknown node {node_id}")]
    UnknownNode { node_id: u64 },
    #[error("no path from node {origin} to node {destination} using the allowed modes")]
    NoPath { origin: u64, destination: u64 },
    #[error("no route meets the {deadline_hours} h deadline; minimum achievable time is {min_time_hours:.4} h")]
    DeadlineInfeasible { deadline_hours: f64, min_time_hours: f64 },
    #[error("pool capacity cannot carry all {containers} containers; shortfall {shortfall}")]
    CapacityInfeasible { containers: u64, shortfall: u64 },
    #[error("unknown edge {edge_id}")]
    UnknownEdge { edge_id: u64 },
    #[error("no transfer rule at node {node_id} from {from_mode} to {to_mode}")]
    UnknownTransfer { node_id: u64, from_mode: TransportMode, to_mode: TransportMode },
    #[error("invalid plan pool: {message}")]
    InvalidPool { message: String },
}

impl OptimizeError {
    pub fn kind(&self) -> &'static str {
        match self {
            OptimizeError::InvalidScenario { .. } => "InvalidScenario",
            OptimizeError::UnknownNode { .. } => "UnknownNode",
            OptimizeError::NoPath { .. } => "NoPath",
            OptimizeError::DeadlineInfeasible { .. } => "DeadlineInfeasible",
            OptimizeError::CapacityInfeasible { .. } => "CapacityInfeasible",
            OptimizeError::UnknownEdge { .. } => "UnknownEdge",
            OptimizeError::UnknownTransfer { .. } => "UnknownTransfer",
            OptimizeError::InvalidPool { .. } => "InvalidPool",
        }
    }
}

/// Tie-aware comparison of (per-container cost, time, edge ids).
pub(crate) fn rank(
    a: (f64, f64, &[u64]),
    b: (f64, f64, &[u64]),
) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    if (a.0 - b.0).abs() > TIE_EPS {
        return a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal);
    }
    if (a.1 - b.1).abs() > TIE_EPS {
        return a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal);
    }
    a.2.cmp(b.2)
}
