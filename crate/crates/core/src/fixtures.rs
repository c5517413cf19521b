//! Networks and scenarios bundled with the crate.

use crate::netmodel::{load_network, Network};
use crate::optimizer::Scenario;

const FIXTURE14: &str = include_str!("../fixtures/fixture14.json");
const FIXTURE14_SCENARIO: &str = include_str!("../fixtures/fixture14_scenario.json");
const T3: &str = include_str!("../fixtures/t3.json");

/// Names accepted by [`network`] and [`network_source`], sorted.
pub const NAMES: [&str; 2] = ["fixture14", "t3"];

pub fn network_source(name: &str) -> Option<&'static str> {
    match name {
        "fixture14" => Some(FIXTURE14),
        "t3" => Some(T3),
        _ => None,
    }
}

pub fn network(name: &str) -> Option<Network> {
    network_source(name).map(|src| load_network(src).expect("bundled fixture is valid"))
}

/// Seattle to Orlando, 250 containers, 36 hour deadline.
pub fn demo_scenario() -> Scenario {
    serde_json::from_str(FIXTURE14_SCENARIO).expect("bundled scenario parses")
}
