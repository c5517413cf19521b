//! Plan replay and Monte Carlo evaluation of deadline adherence.
//!
//! # Random stream layout
//!
//! Sampling uses ChaCha8 (`rand_chacha::ChaCha8Rng`) keyed by
//! `seed_from_u64(seed)`. Sample `i` draws exclusively from stream `i`
//! (`set_stream(i)`), so every sample is reproducible on its own and the
//! report does not depend on evaluation order. Within a sample, factors are
//! drawn in timeline order: a transfer's factor before the leg that follows
//! it. Each factor is lognormal with mean 1 and coefficient of variation
//! `travel_time_cv`: `σ² = ln(1 + cv²)`, `μ = −σ²/2`. The generator and this
//! layout are part of the report format; changing either changes golden
//! values.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::probability;
use crate::netmodel::{Network, TransportMode};
use crate::optimizer::{Leg, RoutePlan, Scenario, TransferEvent, DEADLINE_EPS};

/// Seed used when the scenario doesn't carry one.
pub const DEFAULT_SEED: u64 = 42;

/// Absolute tolerance for replayed times.
pub const REPLAY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub samples: u64,
    #[serde(serialize_with = "probability::serialize")]
    pub on_time_probability: f64,
    pub completion_p50_hours: f64,
    pub completion_p95_hours: f64,
    pub mean_completion_hours: f64,
    pub per_leg_mean_hours: Vec<f64>,
    pub seed_used: u64,
}

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "kind")]
pub enum SimError {
    #[error("leg {leg_index}: unknown edge {edge_id}")]
    UnknownEdge { leg_index: usize, edge_id: u64 },
    #[error("leg {leg_index}: edge {edge_id} does not connect {from_node} -> {to_node} in mode {mode}")]
    EdgeMismatch { leg_index: usize, edge_id: u64, from_node: u64, to_node: u64, mode: TransportMode },
    #[error("leg {leg_index}: starts at node {found} but the previous leg ended at {expected}")]
    Discontinuous { leg_index: usize, expected: u64, found: u64 },
    #[error("leg {leg_index}: no transfer rule at node {node_id} from {from_mode} to {to_mode}")]
    UnknownTransfer { leg_index: usize, node_id: u64, from_mode: TransportMode, to_mode: TransportMode },
    #[error("leg {leg_index}: {field} expected {expected}, found {found}")]
    InconsistentPlan { leg_index: usize, field: String, expected: f64, found: f64 },
    #[error("invalid simulation request: {message}")]
    InvalidRequest { message: String },
}

/// One timed step of a replayed plan: an optional transfer then a leg.
struct Step {
    transfer: Option<(TransferEvent, f64)>,
    leg: Leg,
    leg_hours: f64,
}

fn rebuild(net: &Network, plan: &RoutePlan) -> Result<Vec<Step>, SimError> {
    let mut steps = Vec::with_capacity(plan.legs.len());
    let mut t = 0.0;
    let mut prev: Option<&Leg> = None;
    for (i, leg) in plan.legs.iter().enumerate() {
        let edge = net.edge(leg.edge_id).ok_or(SimError::UnknownEdge { leg_index: i, edge_id: leg.edge_id })?;
        let forward = edge.from_node == leg.from_node && edge.to_node == leg.to_node;
        let backward = edge.bidirectional && edge.to_node == leg.from_node && edge.from_node == leg.to_node;
        if !(forward || backward) || edge.mode != leg.mode {
            return Err(SimError::EdgeMismatch {
                leg_index: i,
                edge_id: leg.edge_id,
                from_node: leg.from_node,
                to_node: leg.to_node,
                mode: leg.mode,
            });
        }
        let mut transfer = None;
        match prev {
            Some(p) if p.to_node != leg.from_node => {
                return Err(SimError::Discontinuous { leg_index: i, expected: p.to_node, found: leg.from_node });
            }
            Some(p) if p.mode != leg.mode => {
                let rule = net.transfer(leg.from_node, p.mode, leg.mode).ok_or(SimError::UnknownTransfer {
                    leg_index: i,
                    node_id: leg.from_node,
                    from_mode: p.mode,
                    to_mode: leg.mode,
                })?;
                let end = t + rule.transfer_time_hours;
                transfer = Some((
                    TransferEvent { node_id: leg.from_node, from_mode: p.mode, to_mode: leg.mode, start_hours: t, end_hours: end },
                    rule.transfer_time_hours,
                ));
                t = end;
            }
            _ => {}
        }
        if prev.is_none() && leg.from_node != plan.origin {
            return Err(SimError::Discontinuous { leg_index: i, expected: plan.origin, found: leg.from_node });
        }
        let hours = edge.hours();
        let arrive = t + hours;
        steps.push(Step {
            transfer,
            leg: Leg { depart_hours: t, arrive_hours: arrive, ..leg.clone() },
            leg_hours: hours,
        });
        t = arrive;
        prev = Some(leg);
    }
    if let Some(last) = prev {
        if last.to_node != plan.destination {
            return Err(SimError::Discontinuous { leg_index: plan.legs.len(), expected: plan.destination, found: last.to_node });
        }
    }
    Ok(steps)
}

fn check(leg_index: usize, field: &str, expected: f64, found: f64) -> Result<(), SimError> {
    if (expected - found).abs() <= REPLAY_EPS {
        Ok(())
    } else {
        Err(SimError::InconsistentPlan { leg_index, field: field.to_string(), expected, found })
    }
}

/// Recomputes every depart/arrive/transfer time from t = 0 and checks the
/// plan against them. Returns the plan with the recomputed timeline.
pub fn replay_plan(net: &Network, plan: &RoutePlan) -> Result<RoutePlan, SimError> {
    let steps = rebuild(net, plan)?;
    let expected_transfers: Vec<(usize, &TransferEvent)> = steps
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.transfer.as_ref().map(|(t, _)| (i, t)))
        .collect();
    if expected_transfers.len() != plan.transfers.len() {
        let leg_index = expected_transfers.get(plan.transfers.len()).map_or(plan.legs.len(), |(i, _)| *i);
        return Err(SimError::InconsistentPlan {
            leg_index,
            field: "transfer count".into(),
            expected: expected_transfers.len() as f64,
            found: plan.transfers.len() as f64,
        });
    }
    for ((i, want), got) in expected_transfers.iter().zip(&plan.transfers) {
        if (want.node_id, want.from_mode, want.to_mode) != (got.node_id, got.from_mode, got.to_mode) {
            return Err(SimError::UnknownTransfer {
                leg_index: *i,
                node_id: got.node_id,
                from_mode: got.from_mode,
                to_mode: got.to_mode,
            });
        }
        check(*i, "transfer start_hours", want.start_hours, got.start_hours)?;
        check(*i, "transfer end_hours", want.end_hours, got.end_hours)?;
    }
    for (i, (step, leg)) in steps.iter().zip(&plan.legs).enumerate() {
        check(i, "depart_hours", step.leg.depart_hours, leg.depart_hours)?;
        check(i, "arrive_hours", step.leg.arrive_hours, leg.arrive_hours)?;
    }
    let total = steps.last().map_or(0.0, |s| s.leg.arrive_hours);
    check(plan.legs.len().saturating_sub(1), "total_time_hours", total, plan.total_time_hours)?;

    Ok(RoutePlan {
        legs: steps.iter().map(|s| s.leg.clone()).collect(),
        transfers: steps.iter().filter_map(|s| s.transfer.as_ref().map(|(t, _)| t.clone())).collect(),
        total_time_hours: total,
        ..plan.clone()
    })
}

/// Lognormal multiplier with mean 1 and the given coefficient of variation.
pub fn unit_mean_lognormal(cv: f64) -> Result<LogNormal<f64>, SimError> {
    let sigma2 = (1.0 + cv * cv).ln();
    LogNormal::new(-sigma2 / 2.0, sigma2.sqrt())
        .map_err(|e| SimError::InvalidRequest { message: format!("travel_time_cv {cv}: {e}") })
}

/// Nearest-rank percentile of sorted data.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Samples the plan's completion time `samples` times and reports on-time
/// probability against the scenario deadline.
pub fn monte_carlo(net: &Network, plan: &RoutePlan, s: &Scenario, samples: u64) -> Result<SimulationReport, SimError> {
    if samples == 0 {
        return Err(SimError::InvalidRequest { message: "samples must be at least 1".into() });
    }
    let cv = s.travel_time_cv;
    if !(cv.is_finite() && cv >= 0.0) {
        return Err(SimError::InvalidRequest { message: format!("travel_time_cv must be >= 0, got {cv}") });
    }
    replay_plan(net, plan)?;
    let steps = rebuild(net, plan)?;
    let factor = unit_mean_lognormal(cv)?;
    let seed = s.seed.unwrap_or(DEFAULT_SEED);

    let mut completions = Vec::with_capacity(samples as usize);
    let mut leg_means = vec![0.0; steps.len()];
    let mut mean = 0.0;
    let mut on_time = 0u64;
    let draw = |rng: &mut ChaCha8Rng| if cv == 0.0 { 1.0 } else { factor.sample(rng) };
    for i in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let mut t = 0.0;
        for (j, step) in steps.iter().enumerate() {
            if let Some((_, hours)) = &step.transfer {
                t += hours * draw(&mut rng);
            }
            let d = step.leg_hours * draw(&mut rng);
            t += d;
            leg_means[j] += (d - leg_means[j]) / (i + 1) as f64;
        }
        mean += (t - mean) / (i + 1) as f64;
        if t <= s.deadline_hours + DEADLINE_EPS {
            on_time += 1;
        }
        completions.push(t);
    }
    completions.sort_by(f64::total_cmp);
    Ok(SimulationReport {
        samples,
        on_time_probability: on_time as f64 / samples as f64,
        completion_p50_hours: percentile(&completions, 0.50),
        completion_p95_hours: percentile(&completions, 0.95),
        mean_completion_hours: mean,
        per_leg_mean_hours: leg_means,
        seed_used: seed,
    })
}
