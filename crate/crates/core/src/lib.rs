//! Core engines of the freight twin: the multimodal network model, the
//! deadline-constrained minimum-cost router, plan simulation and
//! geospatial export.
//!
//! Units are fixed across the crate: hours, miles, miles per hour, USD and
//! kilograms of CO₂.

pub mod canon;
pub mod fixtures;
pub mod geoviz;
pub mod netmodel;
pub mod optimizer;
pub mod simulator;
pub mod synth;

pub use netmodel::{
    load_network, serialize_network, validate_network, Network, NetworkEdge, NetworkNode,
    NodeKind, TransferRule, TransportMode,
};
pub use optimizer::{
    assign_flow, cost_breakdown, enumerate_paths_oracle, k_best_plans, solve_rcsp,
    CostBreakdown, FlowAssignment, OptimizeError, RoutePlan, Scenario,
};
pub use simulator::{monte_carlo, replay_plan, SimulationReport};
