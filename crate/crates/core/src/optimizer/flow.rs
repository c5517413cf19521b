use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{cost_breakdown, OptimizeError, RoutePlan, Scenario, DEADLINE_EPS};
use crate::canon::money;
use crate::netmodel::Network;

/// Pool size used when callers don't pick one.
pub const DEFAULT_POOL_SIZE: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteAllocation {
    /// The route, costed for `containers`.
    pub plan: RoutePlan,
    pub containers: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowAssignment {
    pub routes: Vec<RouteAllocation>,
    #[serde(serialize_with = "money::serialize")]
    pub total_usd: f64,
    pub max_completion_hours: f64,
}

/// Greedily fills the pool, cheapest plan first, up to the tightest residual
/// edge capacity along each plan. Capacity is per edge id and shared by both
/// directions of a bidirectional edge.
pub fn assign_flow(net: &Network, s: &Scenario, pool: &[RoutePlan]) -> Result<FlowAssignment, OptimizeError> {
    s.validate()?;
    if pool.is_empty() {
        return Err(OptimizeError::InvalidPool { message: "pool is empty".into() });
    }
    let mut residual: HashMap<u64, u64> = net
        .edges
        .iter()
        .filter_map(|e| e.capacity_containers.map(|c| (e.id, c)))
        .collect();

    let mut order: Vec<&RoutePlan> = pool.iter().collect();
    order.sort_by(|a, b| a.total_usd.total_cmp(&b.total_usd));

    let mut remaining = s.containers;
    let mut routes = Vec::new();
    for plan in order {
        if remaining == 0 {
            break;
        }
        if plan.total_time_hours > s.deadline_hours + DEADLINE_EPS {
            return Err(OptimizeError::InvalidPool {
                message: format!("plan over edges {:?} misses the deadline", plan.edge_ids()),
            });
        }
        let mut uses: HashMap<u64, u64> = HashMap::new();
        for leg in &plan.legs {
            if net.edge(leg.edge_id).is_none() {
                return Err(OptimizeError::UnknownEdge { edge_id: leg.edge_id });
            }
            *uses.entry(leg.edge_id).or_default() += 1;
        }
        let room = uses
            .iter()
            .filter_map(|(id, n)| residual.get(id).map(|r| r / n))
            .min()
            .unwrap_or(u64::MAX);
        let take = room.min(remaining);
        if take == 0 {
            continue;
        }
        for (id, n) in &uses {
            if let Some(r) = residual.get_mut(id) {
                *r -= take * n;
            }
        }
        remaining -= take;
        let share = Scenario { containers: take, ..s.clone() };
        let costs = cost_breakdown(net, plan, &share)?;
        routes.push(RouteAllocation {
            plan: RoutePlan {
                linehaul_usd: costs.linehaul_usd,
                transfer_usd: costs.transfer_usd,
                ghg_tax_usd: costs.ghg_tax_usd,
                total_usd: costs.total_usd,
                emissions_kg: costs.emissions_kg,
                ..plan.clone()
            },
            containers: take,
        });
    }
    if remaining > 0 {
        return Err(OptimizeError::CapacityInfeasible { containers: s.containers, shortfall: remaining });
    }
    Ok(FlowAssignment {
        total_usd: routes.iter().map(|r| r.plan.total_usd).sum(),
        max_completion_hours: routes.iter().map(|r| r.plan.total_time_hours).fold(0.0, f64::max),
        routes,
    })
}
