use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::cost::plan_from_arcs;
use super::rcsp::{endpoints, infeasibility};
use super::{rank, OptimizeError, RoutePlan, Scenario, DEADLINE_EPS, TIE_EPS};
use crate::netmodel::{NetworkGraph, Network, TransportMode};

struct Partial {
    node: usize,
    mode: Option<TransportMode>,
    time: f64,
    cost: f64,
    arcs: Vec<usize>,
    states: Vec<(usize, Option<TransportMode>)>,
}

struct Entry {
    bound: f64,
    time: f64,
    seq: u64,
    partial: Partial,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then(self.time.total_cmp(&other.time))
            .then(self.seq.cmp(&other.seq))
    }
}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Reverse Dijkstra lower bounds (cost per container, hours) to `dest`
/// ignoring transfer penalties.
fn lower_bounds(g: &NetworkGraph<'_>, s: &Scenario, dest: usize) -> (Vec<f64>, Vec<f64>) {
    let n = g.node_count();
    let mut incoming = vec![Vec::new(); n];
    for (i, a) in g.arcs.iter().enumerate() {
        if s.allows(a.mode) {
            incoming[a.to].push(i);
        }
    }
    let price = s.carbon_price_usd_per_kg;
    let run = |weight: &dyn Fn(usize) -> f64| {
        let mut dist = vec![f64::INFINITY; n];
        let mut heap = BinaryHeap::new();
        dist[dest] = 0.0;
        heap.push(Reverse((OrdF(0.0), dest)));
        while let Some(Reverse((OrdF(d), v))) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &ai in &incoming[v] {
                let u = g.arcs[ai].from;
                let nd = d + weight(ai);
                if nd < dist[u] {
                    dist[u] = nd;
                    heap.push(Reverse((OrdF(nd), u)));
                }
            }
        }
        dist
    };
    let cost = run(&|ai| g.arcs[ai].unit_linehaul + g.arcs[ai].unit_emission * price);
    let time = run(&|ai| g.arcs[ai].hours);
    (cost, time)
}

#[derive(PartialEq, Clone, Copy)]
struct OrdF(f64);
impl Eq for OrdF {}
impl PartialOrd for OrdF {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OrdF {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Up to `k` distinct deadline-feasible plans in non-decreasing cost. The
/// first equals [`super::solve_rcsp`]'s result.
///
/// Best-first enumeration of state-simple walks with admissible cost and
/// time bounds. Walks are returned ordered by the shared plan ranking.
pub fn k_best_plans(net: &Network, s: &Scenario, k: usize) -> Result<Vec<RoutePlan>, OptimizeError> {
    if k == 0 {
        return Err(OptimizeError::InvalidScenario { message: "k must be at least 1".into() });
    }
    let g = NetworkGraph::new(net);
    let (origin, dest) = endpoints(&g, s)?;
    if origin == dest {
        return Ok(vec![RoutePlan::empty(s.origin)]);
    }
    let (h_cost, h_time) = lower_bounds(&g, s, dest);
    let deadline = s.deadline_hours + DEADLINE_EPS;
    let price = s.carbon_price_usd_per_kg;

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Reverse(Entry {
        bound: h_cost[origin],
        time: 0.0,
        seq,
        partial: Partial { node: origin, mode: None, time: 0.0, cost: 0.0, arcs: Vec::new(), states: vec![(origin, None)] },
    }));

    // (per-container cost, time, edge ids, arcs), kept ranked
    let mut found: Vec<(f64, f64, Vec<u64>, Vec<usize>)> = Vec::new();
    while let Some(Reverse(entry)) = heap.pop() {
        if found.len() >= k && entry.bound > found[k - 1].0 + TIE_EPS {
            break;
        }
        let p = entry.partial;
        if p.node == dest {
            let ids: Vec<u64> = p.arcs.iter().map(|&a| g.arcs[a].edge_id).collect();
            let pos = found
                .iter()
                .position(|f| rank((p.cost, p.time, &ids), (f.0, f.1, &f.2)) == Ordering::Less)
                .unwrap_or(found.len());
            found.insert(pos, (p.cost, p.time, ids, p.arcs));
            continue;
        }
        for &ai in &g.out[p.node] {
            let arc = &g.arcs[ai];
            if !s.allows(arc.mode) || !h_time[arc.to].is_finite() {
                continue;
            }
            let Some(rule) = g.transition(p.node, p.mode, arc.mode) else {
                continue;
            };
            let next = (arc.to, Some(arc.mode));
            if p.states.contains(&next) {
                continue;
            }
            let (tt, tc) = rule.map_or((0.0, 0.0), |r| (r.transfer_time_hours, r.transfer_cost_per_container));
            let time = p.time + tt + arc.hours;
            if time + h_time[arc.to] > deadline {
                continue;
            }
            let cost = p.cost + tc + (arc.unit_linehaul + arc.unit_emission * price);
            let mut arcs = p.arcs.clone();
            arcs.push(ai);
            let mut states = p.states.clone();
            states.push(next);
            seq += 1;
            heap.push(Reverse(Entry {
                bound: cost + h_cost[arc.to],
                time,
                seq,
                partial: Partial { node: arc.to, mode: Some(arc.mode), time, cost, arcs, states },
            }));
        }
    }

    if found.is_empty() {
        return Err(infeasibility(&g, s, origin, dest));
    }
    found.truncate(k);
    found
        .iter()
        .enumerate()
        .map(|(i, f)| plan_from_arcs(&g, s, &f.3, i == 0))
        .collect()
}
