//! Seeded random networks and scenarios for randomized checking
//! (the `oracle-check` command and the property suites).
//!
//! Attribute values are drawn from coarse grids so exact cost and time ties
//! occur regularly and exercise tie-breaking.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::netmodel::{Network, NetworkEdge, NetworkNode, NodeKind, TransferRule, TransportMode};
use crate::optimizer::{min_arrival_time, Scenario};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random valid network with `nodes` nodes using a subset of at most
/// `max_modes` modes.
pub fn random_network<R: Rng>(rng: &mut R, nodes: usize, max_modes: usize) -> Network {
    let mut modes: Vec<TransportMode> = TransportMode::ALL.to_vec();
    let mode_count = rng.random_range(1..=max_modes.clamp(1, 3));
    while modes.len() > mode_count {
        let i = rng.random_range(0..modes.len());
        modes.remove(i);
    }
    let kinds = [NodeKind::City, NodeKind::Terminal, NodeKind::RailStation, NodeKind::Seaport, NodeKind::Warehouse, NodeKind::Junction];
    let node_list: Vec<NetworkNode> = (1..=nodes as u64)
        .map(|id| NetworkNode {
            id,
            name: format!("Node {id}"),
            kind: *kinds.choose(rng).unwrap(),
            lat: rng.random_range(25.0..49.0),
            lon: rng.random_range(-124.0..-67.0),
        })
        .collect();

    let density = rng.random_range(0.15..0.4);
    let mut edges = Vec::new();
    for i in 1..=nodes as u64 {
        for j in 1..=nodes as u64 {
            if i == j || !rng.random_bool(density) {
                continue;
            }
            let mode = *modes.choose(rng).unwrap();
            let speeds: &[f64] = match mode {
                TransportMode::Highway => &[40.0, 50.0, 55.0, 60.0],
                TransportMode::Rail => &[25.0, 30.0, 40.0],
                TransportMode::Water => &[10.0, 12.0, 15.0],
            };
            edges.push(NetworkEdge {
                id: edges.len() as u64 + 1,
                from_node: i,
                to_node: j,
                mode,
                distance_miles: rng.random_range(2..=80) as f64 * 5.0,
                speed_mph: *speeds.choose(rng).unwrap(),
                op_cost_per_container_mile: rng.random_range(1..=60) as f64 * 0.05,
                emission_kg_per_container_mile: rng.random_range(0..=40) as f64 * 0.01,
                capacity_containers: None,
                bidirectional: rng.random_bool(0.3),
            });
        }
    }

    let mut transfers = Vec::new();
    for n in 1..=nodes as u64 {
        for &a in &modes {
            for &b in &modes {
                if a != b && rng.random_bool(0.5) {
                    transfers.push(TransferRule {
                        node_id: n,
                        from_mode: a,
                        to_mode: b,
                        transfer_time_hours: *[0.0, 0.5, 1.0, 2.0].choose(rng).unwrap(),
                        transfer_cost_per_container: rng.random_range(0..=50) as f64,
                    });
                }
            }
        }
    }
    Network { name: "synthetic".into(), nodes: node_list, edges, transfers }
}

/// A random scenario whose deadline sits around the minimum achievable
/// travel time, so feasible, binding and infeasible cases all occur.
pub fn random_scenario<R: Rng>(rng: &mut R, net: &Network) -> Scenario {
    let n = net.nodes.len();
    let origin = net.nodes[rng.random_range(0..n)].id;
    let destination = if rng.random_bool(0.03) { origin } else { net.nodes[rng.random_range(0..n)].id };
    let available = net.modes();
    let allowed_modes = if available.is_empty() || rng.random_bool(0.6) {
        TransportMode::ALL.to_vec()
    } else {
        let picked: Vec<_> = available.iter().copied().filter(|_| rng.random_bool(0.6)).collect();
        if picked.is_empty() {
            vec![*available.choose(rng).unwrap()]
        } else {
            picked
        }
    };
    let mut s = Scenario {
        origin,
        destination,
        containers: rng.random_range(1..=300),
        deadline_hours: 1.0,
        carbon_price_usd_per_kg: rng.random_range(0..=40) as f64 * 0.05,
        allowed_modes,
        travel_time_cv: 0.0,
        seed: None,
    };
    s.deadline_hours = match min_arrival_time(net, &s) {
        Ok(Some(t)) if t > 0.0 => t * rng.random_range(0.9..3.0),
        _ => rng.random_range(5.0..100.0),
    };
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::validate_network;

    #[test]
    fn generated_networks_are_valid_and_seeded() {
        for seed in 0..50 {
            let a = random_network(&mut rng(seed), 8, 3);
            assert!(validate_network(&a).is_empty(), "seed {seed}");
            assert_eq!(a, random_network(&mut rng(seed), 8, 3));
        }
    }

    #[test]
    fn scenarios_validate() {
        let mut r = rng(3);
        let net = random_network(&mut r, 6, 2);
        for _ in 0..50 {
            random_scenario(&mut r, &net).validate().unwrap();
        }
    }
}
