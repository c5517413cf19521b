//! Brute-force reference router for small networks.
//!
//! Enumerates every walk that never repeats a `(node, arrival mode)` state,
//! up to `max_hops` legs, and keeps the best by the shared ranking. Any walk
//! that repeats a state can be shortcut to one that doesn't at no extra cost
//! and strictly less time, so this space contains the optimum over all walks
//! once `max_hops >= nodes × modes`.

use std::cmp::Ordering;

use super::cost::plan_from_arcs;
use super::rcsp::endpoints;
use super::{rank, OptimizeError, RoutePlan, Scenario, DEADLINE_EPS};
use crate::netmodel::{Network, NetworkGraph, TransportMode};

struct Search<'g, 'n> {
    g: &'g NetworkGraph<'n>,
    s: &'g Scenario,
    dest: usize,
    max_hops: usize,
    deadline: f64,
    path: Vec<usize>,
    states: Vec<(usize, Option<TransportMode>)>,
    best: Option<(f64, f64, Vec<usize>, Vec<u64>)>,
    fastest: f64,
}

impl Search<'_, '_> {
    /// Depth-first over state-simple walks. With `time_only` the deadline is
    /// ignored and the search only tracks the earliest arrival.
    fn walk(&mut self, node: usize, mode: Option<TransportMode>, time: f64, cost: f64, time_only: bool) {
        if node == self.dest {
            if time_only {
                self.fastest = self.fastest.min(time);
                return;
            }
            let ids: Vec<u64> = self.path.iter().map(|&a| self.g.arcs[a].edge_id).collect();
            let better = match &self.best {
                None => true,
                Some((bc, bt, _, bids)) => rank((cost, time, &ids), (*bc, *bt, bids)) == Ordering::Less,
            };
            if better {
                self.best = Some((cost, time, self.path.clone(), ids));
            }
            return;
        }
        if self.path.len() >= self.max_hops {
            return;
        }
        let price = self.s.carbon_price_usd_per_kg;
        for &ai in &self.g.out[node] {
            let arc = &self.g.arcs[ai];
            if !self.s.allowed_modes.contains(&arc.mode) {
                continue;
            }
            let (extra_time, extra_cost) = match mode {
                Some(m) if m != arc.mode => {
                    match self.g.net.transfer(self.g.node_id(node), m, arc.mode) {
                        Some(r) => (r.transfer_time_hours, r.transfer_cost_per_container),
                        None => continue,
                    }
                }
                _ => (0.0, 0.0),
            };
            let next = (arc.to, Some(arc.mode));
            if self.states.contains(&next) {
                continue;
            }
            let t = time + extra_time + arc.hours;
            if time_only {
                if t >= self.fastest {
                    continue;
                }
            } else if t > self.deadline {
                continue;
            }
            let c = cost + extra_cost + (arc.unit_linehaul + arc.unit_emission * price);
            self.path.push(ai);
            self.states.push(next);
            self.walk(arc.to, Some(arc.mode), t, c, time_only);
            self.path.pop();
            self.states.pop();
        }
    }
}

/// Exhaustive reference solver. Intended for networks of at most ten nodes.
pub fn enumerate_paths_oracle(net: &Network, s: &Scenario, max_hops: usize) -> Result<RoutePlan, OptimizeError> {
    let g = NetworkGraph::new(net);
    let (origin, dest) = endpoints(&g, s)?;
    if origin == dest {
        return Ok(RoutePlan::empty(s.origin));
    }
    let mut search = Search {
        g: &g,
        s,
        dest,
        max_hops,
        deadline: s.deadline_hours + DEADLINE_EPS,
        path: Vec::new(),
        states: vec![(origin, None)],
        best: None,
        fastest: f64::INFINITY,
    };
    search.walk(origin, None, 0.0, 0.0, false);
    if let Some((_, _, arcs, _)) = search.best.take() {
        return plan_from_arcs(&g, s, &arcs, true);
    }
    search.walk(origin, None, 0.0, 0.0, true);
    if search.fastest.is_finite() {
        Err(OptimizeError::DeadlineInfeasible { deadline_hours: s.deadline_hours, min_time_hours: search.fastest })
    } else {
        Err(OptimizeError::NoPath { origin: s.origin, destination: s.destination })
    }
}

/// Hop bound under which the oracle's walk space contains the optimum.
pub fn oracle_hop_bound(net: &Network) -> usize {
    net.nodes.len() * TransportMode::ALL.len()
}

/// Checks that two solver outcomes agree: equal cost and time within a
/// relative 1e-9 and the same edge sequence, or the same error.
pub fn outcomes_agree(a: &Result<RoutePlan, OptimizeError>, b: &Result<RoutePlan, OptimizeError>) -> Result<(), String> {
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0);
    match (a, b) {
        (Ok(x), Ok(y)) if close(x.total_usd, y.total_usd) && close(x.total_time_hours, y.total_time_hours) && x.edge_ids() == y.edge_ids() => Ok(()),
        (
            Err(OptimizeError::DeadlineInfeasible { min_time_hours: p, .. }),
            Err(OptimizeError::DeadlineInfeasible { min_time_hours: q, .. }),
        ) if close(*p, *q) => Ok(()),
        (Err(x @ OptimizeError::DeadlineInfeasible { .. }), Err(y)) | (Err(x), Err(y @ OptimizeError::DeadlineInfeasible { .. })) => {
            Err(format!("{x} vs {y}"))
        }
        (Err(x), Err(y)) if x == y => Ok(()),
        (Ok(x), Ok(y)) => Err(format!(
            "cost {} vs {}, time {} vs {}, edges {:?} vs {:?}",
            x.total_usd, y.total_usd, x.total_time_hours, y.total_time_hours, x.edge_ids(), y.edge_ids()
        )),
        (Ok(x), Err(e)) | (Err(e), Ok(x)) => Err(format!("plan {:?} at ${} vs error: {e}", x.edge_ids(), x.total_usd)),
        (Err(x), Err(y)) => Err(format!("{x} vs {y}")),
    }
}
