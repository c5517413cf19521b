use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::cost::plan_from_arcs;
use super::{rank, OptimizeError, RoutePlan, Scenario, DEADLINE_EPS, TIE_EPS};
use crate::netmodel::{Network, NetworkGraph, TransportMode};

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Slack on the `<=` side of the dominance test. Strictness always
    /// requires a margin of [`TIE_EPS`].
    pub dominance_tol: f64,
    /// Disable to expand every label (exhaustive walk search).
    pub prune: bool,
    /// Upper bound on legs per walk. Required in practice when `prune` is off.
    pub max_hops: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { dominance_tol: TIE_EPS, prune: true, max_hops: None }
    }
}

#[derive(Debug, Clone)]
struct Label {
    node: usize,
    mode: Option<TransportMode>,
    time: f64,
    /// Generalized cost per container: linehaul + transfer + carbon-priced emissions.
    cost: f64,
    pred: Option<usize>,
    arc: Option<usize>,
    hops: usize,
    alive: bool,
}

#[derive(PartialEq)]
struct QueueKey {
    cost: f64,
    time: f64,
    label: usize,
}

impl Eq for QueueKey {}

impl Ord for QueueKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then(self.time.total_cmp(&other.time))
            .then(self.label.cmp(&other.label))
    }
}

impl PartialOrd for QueueKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn mode_slot(mode: Option<TransportMode>) -> usize {
    match mode {
        None => 0,
        Some(TransportMode::Highway) => 1,
        Some(TransportMode::Rail) => 2,
        Some(TransportMode::Water) => 3,
    }
}

fn dominates(a: &Label, b: &Label, tol: f64) -> bool {
    a.time <= b.time + tol && a.cost <= b.cost + tol && (a.time < b.time - TIE_EPS || a.cost < b.cost - TIE_EPS)
}

fn arc_path(labels: &[Label], mut idx: usize) -> Vec<usize> {
    let mut arcs = Vec::new();
    while let Some(a) = labels[idx].arc {
        arcs.push(a);
        idx = labels[idx].pred.expect("labels with an arc have a predecessor");
    }
    arcs.reverse();
    arcs
}

pub(crate) fn endpoints(g: &NetworkGraph<'_>, s: &Scenario) -> Result<(usize, usize), OptimizeError> {
    s.validate()?;
    let o = g.index_of(s.origin).ok_or(OptimizeError::UnknownNode { node_id: s.origin })?;
    let d = g.index_of(s.destination).ok_or(OptimizeError::UnknownNode { node_id: s.destination })?;
    Ok((o, d))
}

/// Minimum-cost plan meeting the deadline, using only allowed modes.
/// Edge capacities are ignored.
pub fn solve_rcsp(net: &Network, s: &Scenario) -> Result<RoutePlan, OptimizeError> {
    solve_rcsp_with(net, s, &SolverOptions::default())
}

pub fn solve_rcsp_with(net: &Network, s: &Scenario, opts: &SolverOptions) -> Result<RoutePlan, OptimizeError> {
    let g = NetworkGraph::new(net);
    let (origin, dest) = endpoints(&g, s)?;
    if origin == dest {
        return Ok(RoutePlan::empty(s.origin));
    }

    let price = s.carbon_price_usd_per_kg;
    let deadline = s.deadline_hours + DEADLINE_EPS;
    let mut labels = vec![Label { node: origin, mode: None, time: 0.0, cost: 0.0, pred: None, arc: None, hops: 0, alive: true }];
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); g.node_count() * 4];
    buckets[origin * 4].push(0);
    let mut heap = BinaryHeap::new();
    heap.push(Reverse(QueueKey { cost: 0.0, time: 0.0, label: 0 }));
    let mut best: Option<(usize, Vec<u64>)> = None;

    while let Some(Reverse(key)) = heap.pop() {
        let li = key.label;
        if !labels[li].alive {
            continue;
        }
        if let Some((b, _)) = &best {
            if labels[li].cost > labels[*b].cost + TIE_EPS {
                break;
            }
        }
        let cur = labels[li].clone();
        if cur.node == dest {
            continue;
        }
        if opts.max_hops.is_some_and(|h| cur.hops >= h) {
            continue;
        }
        for &ai in &g.out[cur.node] {
            let arc = &g.arcs[ai];
            if !s.allows(arc.mode) {
                continue;
            }
            let Some(rule) = g.transition(cur.node, cur.mode, arc.mode) else {
                continue;
            };
            let (t_time, t_cost) = rule.map_or((0.0, 0.0), |r| (r.transfer_time_hours, r.transfer_cost_per_container));
            let time = cur.time + t_time + arc.hours;
            if time > deadline {
                continue;
            }
            let cost = cur.cost + t_cost + (arc.unit_linehaul + arc.unit_emission * price);
            let cand = Label {
                node: arc.to,
                mode: Some(arc.mode),
                time,
                cost,
                pred: Some(li),
                arc: Some(ai),
                hops: cur.hops + 1,
                alive: true,
            };
            let slot = arc.to * 4 + mode_slot(cand.mode);
            if opts.prune {
                if buckets[slot].iter().any(|&o| dominates(&labels[o], &cand, opts.dominance_tol)) {
                    continue;
                }
                let mut kept = Vec::with_capacity(buckets[slot].len() + 1);
                for &o in &buckets[slot] {
                    if dominates(&cand, &labels[o], opts.dominance_tol) {
                        labels[o].alive = false;
                    } else {
                        kept.push(o);
                    }
                }
                buckets[slot] = kept;
            }
            let ni = labels.len();
            labels.push(cand);
            buckets[slot].push(ni);
            heap.push(Reverse(QueueKey { cost, time, label: ni }));

            if arc.to == dest {
                let seq: Vec<u64> = arc_path(&labels, ni).iter().map(|&a| g.arcs[a].edge_id).collect();
                let better = match &best {
                    None => true,
                    Some((b, bseq)) => {
                        let (lb, ln) = (&labels[*b], &labels[ni]);
                        rank((ln.cost, ln.time, &seq), (lb.cost, lb.time, bseq)) == Ordering::Less
                    }
                };
                if better {
                    best = Some((ni, seq));
                }
            }
        }
    }

    match best {
        Some((b, _)) => plan_from_arcs(&g, s, &arc_path(&labels, b), true),
        None => Err(infeasibility(&g, s, origin, dest)),
    }
}

pub(crate) fn infeasibility(g: &NetworkGraph<'_>, s: &Scenario, origin: usize, dest: usize) -> OptimizeError {
    match earliest_arrival(g, s, origin, dest) {
        Some(t) => OptimizeError::DeadlineInfeasible { deadline_hours: s.deadline_hours, min_time_hours: t },
        None => OptimizeError::NoPath { origin: s.origin, destination: s.destination },
    }
}

/// Earliest possible arrival at the destination ignoring the deadline, or
/// `None` when it is unreachable under the allowed modes.
pub fn min_arrival_time(net: &Network, s: &Scenario) -> Result<Option<f64>, OptimizeError> {
    let g = NetworkGraph::new(net);
    let (o, d) = endpoints(&g, s)?;
    Ok(earliest_arrival(&g, s, o, d))
}

/// Time-only Dijkstra over (node, last mode) states.
fn earliest_arrival(g: &NetworkGraph<'_>, s: &Scenario, origin: usize, dest: usize) -> Option<f64> {
    if origin == dest {
        return Some(0.0);
    }
    let modes = [None, Some(TransportMode::Highway), Some(TransportMode::Rail), Some(TransportMode::Water)];
    let mut dist = vec![f64::INFINITY; g.node_count() * 4];
    let mut heap = BinaryHeap::new();
    dist[origin * 4] = 0.0;
    heap.push(Reverse(QueueKey { cost: 0.0, time: 0.0, label: origin * 4 }));
    while let Some(Reverse(QueueKey { cost: t, label: state, .. })) = heap.pop() {
        if t > dist[state] {
            continue;
        }
        let (node, mode) = (state / 4, modes[state % 4]);
        if node == dest {
            return Some(t);
        }
        for &ai in &g.out[node] {
            let arc = &g.arcs[ai];
            if !s.allows(arc.mode) {
                continue;
            }
            let Some(rule) = g.transition(node, mode, arc.mode) else {
                continue;
            };
            let nt = t + rule.map_or(0.0, |r| r.transfer_time_hours) + arc.hours;
            let ns = arc.to * 4 + mode_slot(Some(arc.mode));
            if nt < dist[ns] {
                dist[ns] = nt;
                heap.push(Reverse(QueueKey { cost: nt, time: 0.0, label: ns }));
            }
        }
    }
    None
}
