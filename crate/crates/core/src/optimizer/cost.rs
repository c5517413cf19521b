use serde::{Deserialize, Serialize};

use super::{Leg, OptimizeError, RoutePlan, Scenario, TransferEvent};
use crate::canon::money;
use crate::netmodel::{Network, NetworkGraph};

/// Cost components of a plan. `total_usd` is always
/// `linehaul_usd + transfer_usd + ghg_tax_usd`, evaluated in that order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    #[serde(serialize_with = "money::serialize")]
    pub linehaul_usd: f64,
    #[serde(serialize_with = "money::serialize")]
    pub transfer_usd: f64,
    #[serde(serialize_with = "money::serialize")]
    pub ghg_tax_usd: f64,
    #[serde(serialize_with = "money::serialize")]
    pub total_usd: f64,
    pub emissions_kg: f64,
}

impl CostBreakdown {
    pub fn from_components(linehaul_usd: f64, transfer_usd: f64, ghg_tax_usd: f64, emissions_kg: f64) -> Self {
        CostBreakdown {
            linehaul_usd,
            transfer_usd,
            ghg_tax_usd,
            total_usd: linehaul_usd + transfer_usd + ghg_tax_usd,
            emissions_kg,
        }
    }

    pub const ZERO: CostBreakdown = CostBreakdown {
        linehaul_usd: 0.0,
        transfer_usd: 0.0,
        ghg_tax_usd: 0.0,
        total_usd: 0.0,
        emissions_kg: 0.0,
    };
}

/// Per-container sums, scaled by the container count last so that cost is
/// exactly linear in the count.
fn scale(unit_linehaul: f64, unit_transfer: f64, unit_emission: f64, s: &Scenario) -> CostBreakdown {
    let n = s.containers as f64;
    let emissions = n * unit_emission;
    CostBreakdown::from_components(n * unit_linehaul, n * unit_transfer, emissions * s.carbon_price_usd_per_kg, emissions)
}

/// Recomputes the cost decomposition of `plan` for the scenario's container
/// count and carbon price from the network's edge and transfer data.
pub fn cost_breakdown(net: &Network, plan: &RoutePlan, s: &Scenario) -> Result<CostBreakdown, OptimizeError> {
    let (mut linehaul, mut emission, mut transfer) = (0.0, 0.0, 0.0);
    for leg in &plan.legs {
        let e = net.edge(leg.edge_id).ok_or(OptimizeError::UnknownEdge { edge_id: leg.edge_id })?;
        linehaul += e.distance_miles * e.op_cost_per_container_mile;
        emission += e.distance_miles * e.emission_kg_per_container_mile;
    }
    for t in &plan.transfers {
        let rule = net.transfer(t.node_id, t.from_mode, t.to_mode).ok_or(OptimizeError::UnknownTransfer {
            node_id: t.node_id,
            from_mode: t.from_mode,
            to_mode: t.to_mode,
        })?;
        transfer += rule.transfer_cost_per_container;
    }
    Ok(scale(linehaul, transfer, emission, s))
}

/// Builds the timed plan for a sequence of arcs starting at t = 0. Every
/// mode change must be covered by a transfer rule.
pub(crate) fn plan_from_arcs(
    g: &NetworkGraph<'_>,
    s: &Scenario,
    arcs: &[usize],
    optimal: bool,
) -> Result<RoutePlan, OptimizeError> {
    let mut legs = Vec::with_capacity(arcs.len());
    let mut transfers = Vec::new();
    let (mut t, mut linehaul, mut emission, mut transfer) = (0.0, 0.0, 0.0, 0.0);
    let mut last_mode = None;
    for &ai in arcs {
        let arc = &g.arcs[ai];
        let here = g.node_id(arc.from);
        if let Some(prev) = last_mode {
            if prev != arc.mode {
                let rule = g.transfer(here, prev, arc.mode).ok_or(OptimizeError::UnknownTransfer {
                    node_id: here,
                    from_mode: prev,
                    to_mode: arc.mode,
                })?;
                let end = t + rule.transfer_time_hours;
                transfers.push(TransferEvent { node_id: here, from_mode: prev, to_mode: arc.mode, start_hours: t, end_hours: end });
                transfer += rule.transfer_cost_per_container;
                t = end;
            }
        }
        let arrive = t + arc.hours;
        legs.push(Leg {
            edge_id: arc.edge_id,
            mode: arc.mode,
            from_node: here,
            to_node: g.node_id(arc.to),
            depart_hours: t,
            arrive_hours: arrive,
        });
        linehaul += arc.unit_linehaul;
        emission += arc.unit_emission;
        t = arrive;
        last_mode = Some(arc.mode);
    }
    let costs = scale(linehaul, transfer, emission, s);
    Ok(RoutePlan {
        origin: s.origin,
        destination: s.destination,
        legs,
        transfers,
        linehaul_usd: costs.linehaul_usd,
        transfer_usd: costs.transfer_usd,
        ghg_tax_usd: costs.ghg_tax_usd,
        total_usd: costs.total_usd,
        total_time_hours: t,
        emissions_kg: costs.emissions_kg,
        optimal,
    })
}
