use std::sync::Arc;

use ft_core::canon;
use ft_core::geoviz::{build_wms_query, plan_bbox, plan_to_geojson, WmsLayer};
use ft_core::netmodel::{network_from_value, NetworkError};
use ft_core::optimizer::DEFAULT_POOL_SIZE;
use ft_core::{assign_flow, k_best_plans, monte_carlo, solve_rcsp, Network, RoutePlan, Scenario};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::registry::{Registry, ToolDescriptor, ToolError};

/// Base URL used in `render_route` WMS queries.
pub const DEFAULT_WMS_BASE: &str = "http://<geoserver-host>/geoserver/wms";

const MAP_WIDTH: u32 = 800;
const MAP_HEIGHT: u32 = 600;

/// JSON-schema documents for the tool payloads. Schemas check structure
/// and types; value constraints are enforced by the engines and reported as
/// tool errors.
pub mod schemas {
    use serde_json::{json, Value};

    fn strict(required: &[&str], properties: Value) -> Value {
        json!({"type": "object", "additionalProperties": false, "required": required, "properties": properties})
    }

    fn mode() -> Value {
        json!({"enum": ["Highway", "Rail", "Water"]})
    }

    pub fn network() -> Value {
        let node = strict(
            &["id", "name", "kind", "lat", "lon"],
            json!({
                "id": {"type": "integer"},
                "name": {"type": "string"},
                "kind": {"enum": ["City", "Terminal", "RailStation", "Seaport", "Warehouse", "Junction"]},
                "lat": {"type": "number"},
                "lon": {"type": "number"},
            }),
        );
        let edge = strict(
            &["id", "from_node", "to_node", "mode", "distance_miles", "speed_mph", "op_cost_per_container_mile", "emission_kg_per_container_mile"],
            json!({
                "id": {"type": "integer"},
                "from_node": {"type": "integer"},
                "to_node": {"type": "integer"},
                "mode": mode(),
                "distance_miles": {"type": "number"},
                "speed_mph": {"type": "number"},
                "op_cost_per_container_mile": {"type": "number"},
                "emission_kg_per_container_mile": {"type": "number"},
                "capacity_containers": {"type": "integer"},
                "bidirectional": {"type": "boolean"},
            }),
        );
        let transfer = strict(
            &["node_id", "from_mode", "to_mode", "transfer_time_hours", "transfer_cost_per_container"],
            json!({
                "node_id": {"type": "integer"},
                "from_mode": mode(),
                "to_mode": mode(),
                "transfer_time_hours": {"type": "number"},
                "transfer_cost_per_container": {"type": "number"},
            }),
        );
        strict(
            &["name", "nodes", "edges", "transfers"],
            json!({
                "name": {"type": "string"},
                "nodes": {"type": "array", "items": node},
                "edges": {"type": "array", "items": edge},
                "transfers": {"type": "array", "items": transfer},
            }),
        )
    }

    pub fn scenario() -> Value {
        strict(
            &["origin", "destination", "containers", "deadline_hours", "carbon_price_usd_per_kg", "allowed_modes"],
            json!({
                "origin": {"type": "integer"},
                "destination": {"type": "integer"},
                "containers": {"type": "integer"},
                "deadline_hours": {"type": "number"},
                "carbon_price_usd_per_kg": {"type": "number"},
                "allowed_modes": {"type": "array", "items": mode()},
                "travel_time_cv": {"type": "number"},
                "seed": {"type": "integer"},
            }),
        )
    }

    pub fn route_plan() -> Value {
        let leg = strict(
            &["edge_id", "mode", "from_node", "to_node", "depart_hours", "arrive_hours"],
            json!({
                "edge_id": {"type": "integer"},
                "mode": mode(),
                "from_node": {"type": "integer"},
                "to_node": {"type": "integer"},
                "depart_hours": {"type": "number"},
                "arrive_hours": {"type": "number"},
            }),
        );
        let transfer = strict(
            &["node_id", "from_mode", "to_mode", "start_hours", "end_hours"],
            json!({
                "node_id": {"type": "integer"},
                "from_mode": mode(),
                "to_mode": mode(),
                "start_hours": {"type": "number"},
                "end_hours": {"type": "number"},
            }),
        );
        strict(
            &["origin", "destination", "legs", "transfers", "linehaul_usd", "transfer_usd", "ghg_tax_usd", "total_usd", "total_time_hours", "emissions_kg", "optimal"],
            json!({
                "origin": {"type": "integer"},
                "destination": {"type": "integer"},
                "legs": {"type": "array", "items": leg},
                "transfers": {"type": "array", "items": transfer},
                "linehaul_usd": {"type": "number"},
                "transfer_usd": {"type": "number"},
                "ghg_tax_usd": {"type": "number"},
                "total_usd": {"type": "number"},
                "total_time_hours": {"type": "number"},
                "emissions_kg": {"type": "number"},
                "optimal": {"type": "boolean"},
            }),
        )
    }

    pub fn flow_assignment() -> Value {
        let allocation = strict(
            &["plan", "containers"],
            json!({"plan": route_plan(), "containers": {"type": "integer", "minimum": 1}}),
        );
        strict(
            &["routes", "total_usd", "max_completion_hours"],
            json!({
                "routes": {"type": "array", "items": allocation},
                "total_usd": {"type": "number"},
                "max_completion_hours": {"type": "number"},
            }),
        )
    }

    pub fn simulation_report() -> Value {
        strict(
            &["samples", "on_time_probability", "completion_p50_hours", "completion_p95_hours", "mean_completion_hours", "per_leg_mean_hours", "seed_used"],
            json!({
                "samples": {"type": "integer", "minimum": 1},
                "on_time_probability": {"type": "number", "minimum": 0, "maximum": 1},
                "completion_p50_hours": {"type": "number"},
                "completion_p95_hours": {"type": "number"},
                "mean_completion_hours": {"type": "number"},
                "per_leg_mean_hours": {"type": "array", "items": {"type": "number"}},
                "seed_used": {"type": "integer"},
            }),
        )
    }

    pub fn violation() -> Value {
        strict(
            &["code", "message", "entity_id"],
            json!({"code": {"type": "string"}, "message": {"type": "string"}, "entity_id": {"type": "integer"}}),
        )
    }
}

fn parse_network(args: &Value) -> Result<Network, ToolError> {
    network_from_value(&args["network"]).map_err(|e| match &e {
        NetworkError::Parse(msg) => ToolError::new("ParseError", format!("network: {msg}")),
        NetworkError::Validation(violations) => {
            let message = e.to_string();
            ToolError { data: json!({"kind": "ValidationError", "message": message, "violations": violations}), message }
        }
    })
}

fn parse<T: DeserializeOwned>(args: &Value, field: &str, kind: &str) -> Result<T, ToolError> {
    T::deserialize(&args[field]).map_err(|e| ToolError::new(kind, format!("{field}: {e}")))
}

fn scenario(args: &Value) -> Result<Scenario, ToolError> {
    let s: Scenario = parse(args, "scenario", "InvalidScenario")?;
    s.validate().map_err(|e| ToolError::from_domain(&e))?;
    Ok(s)
}

fn validate_network_tool(args: &Value) -> Result<Value, ToolError> {
    let net = parse_network(args)?;
    Ok(json!({
        "valid": true,
        "violations": [],
        "node_count": net.nodes.len(),
        "edge_count": net.edges.len(),
        "transfer_count": net.transfers.len(),
        "network": canon::to_value(&net),
    }))
}

fn solve_route_tool(args: &Value) -> Result<Value, ToolError> {
    let net = parse_network(args)?;
    let s = scenario(args)?;
    let plan = solve_rcsp(&net, &s).map_err(|e| ToolError::from_domain(&e))?;
    Ok(canon::to_value(&plan))
}

fn assign_flow_tool(args: &Value) -> Result<Value, ToolError> {
    let net = parse_network(args)?;
    let s = scenario(args)?;
    let pool: Vec<RoutePlan> = if args.get("pool").is_some() {
        parse(args, "pool", "InvalidPool")?
    } else {
        let k = args.get("k").and_then(Value::as_u64).unwrap_or(DEFAULT_POOL_SIZE as u64) as usize;
        k_best_plans(&net, &s, k).map_err(|e| ToolError::from_domain(&e))?
    };
    let fa = assign_flow(&net, &s, &pool).map_err(|e| ToolError::from_domain(&e))?;
    Ok(canon::to_value(&fa))
}

fn simulate_plan_tool(args: &Value) -> Result<Value, ToolError> {
    let net = parse_network(args)?;
    let s = scenario(args)?;
    let plan: RoutePlan = parse(args, "plan", "InvalidPlan")?;
    let samples = args["samples"].as_u64().unwrap_or(0);
    let report = monte_carlo(&net, &plan, &s, samples).map_err(|e| ToolError::from_domain(&e))?;
    Ok(canon::to_value(&report))
}

/// Default route id: `R<origin>-<destination>` followed by the edge ids.
fn default_route_id(plan: &RoutePlan) -> String {
    let mut id = format!("R{}-{}", plan.origin, plan.destination);
    for leg in &plan.legs {
        id.push('_');
        id.push_str(&leg.edge_id.to_string());
    }
    id
}

fn render_route_tool(args: &Value) -> Result<Value, ToolError> {
    let net = parse_network(args)?;
    let plan: RoutePlan = parse(args, "plan", "InvalidPlan")?;
    let render = |e: ft_core::geoviz::GeoError| ToolError::new("RenderError", e.to_string());
    let route_id = args.get("route_id").and_then(Value::as_str).map(str::to_string).unwrap_or_else(|| default_route_id(&plan));
    let geojson = plan_to_geojson(&net, &plan).map_err(render)?;
    let bbox = plan_bbox(&net, &plan, 1.0).map_err(render)?;
    let layers = [
        WmsLayer::route("osm_base"),
        WmsLayer::route("faf:freight_flows"),
        WmsLayer::include("sim:nodes"),
        WmsLayer::include("sim:links"),
    ];
    let wms = build_wms_query(DEFAULT_WMS_BASE, &layers, bbox, MAP_WIDTH, MAP_HEIGHT, &route_id).map_err(render)?;
    Ok(json!({"geojson": geojson, "wms_query": wms, "bbox": canon::to_value(&bbox), "route_id": route_id}))
}

fn object(required: &[&str], properties: Value) -> Value {
    json!({"type": "object", "required": required, "properties": properties})
}

/// A registry with the five freight tools.
pub fn builtin_registry() -> Registry {
    let net = || json!({"type": "object"});
    let tools: Vec<(ToolDescriptor, crate::registry::Handler)> = vec![
        (
            ToolDescriptor {
                name: "validate_network".into(),
                description: "Parse and validate a network document; fails with the full violation list.".into(),
                input_schema: object(&["network"], json!({"network": net()})),
                output_schema: object(
                    &["valid", "violations", "node_count", "edge_count", "transfer_count", "network"],
                    json!({
                        "valid": {"const": true},
                        "violations": {"type": "array", "items": schemas::violation()},
                        "node_count": {"type": "integer"},
                        "edge_count": {"type": "integer"},
                        "transfer_count": {"type": "integer"},
                        "network": schemas::network(),
                    }),
                ),
            },
            Arc::new(validate_network_tool),
        ),
        (
            ToolDescriptor {
                name: "solve_route".into(),
                description: "Minimum-cost route meeting the scenario deadline.".into(),
                input_schema: object(&["network", "scenario"], json!({"network": net(), "scenario": schemas::scenario()})),
                output_schema: schemas::route_plan(),
            },
            Arc::new(solve_route_tool),
        ),
        (
            ToolDescriptor {
                name: "assign_flow".into(),
                description: "Split containers over a pool of feasible routes within edge capacities.".into(),
                input_schema: object(
                    &["network", "scenario"],
                    json!({
                        "network": net(),
                        "scenario": schemas::scenario(),
                        "k": {"type": "integer", "minimum": 1},
                        "pool": {"type": "array", "items": schemas::route_plan()},
                    }),
                ),
                output_schema: schemas::flow_assignment(),
            },
            Arc::new(assign_flow_tool),
        ),
        (
            ToolDescriptor {
                name: "simulate_plan".into(),
                description: "Monte Carlo on-time probability of a plan under travel-time uncertainty.".into(),
                input_schema: object(
                    &["network", "plan", "scenario", "samples"],
                    json!({
                        "network": net(),
                        "plan": schemas::route_plan(),
                        "scenario": schemas::scenario(),
                        "samples": {"type": "integer", "minimum": 1},
                    }),
                ),
                output_schema: schemas::simulation_report(),
            },
            Arc::new(simulate_plan_tool),
        ),
        (
            ToolDescriptor {
                name: "render_route".into(),
                description: "GeoJSON features and a WMS GetMap query for a plan.".into(),
                input_schema: object(
                    &["network", "plan"],
                    json!({"network": net(), "plan": schemas::route_plan(), "route_id": {"type": "string"}}),
                ),
                output_schema: object(
                    &["geojson", "wms_query", "bbox", "route_id"],
                    json!({
                        "geojson": object(&["type", "features"], json!({"type": {"const": "FeatureCollection"}, "features": {"type": "array"}})),
                        "wms_query": {"type": "string"},
                        "bbox": {"type": "object"},
                        "route_id": {"type": "string"},
                    }),
                ),
            },
            Arc::new(render_route_tool),
        ),
    ];
    let mut registry = Registry::new();
    for (descriptor, handler) in tools {
        registry.register_tool(descriptor, handler).expect("built-in tools register");
    }
    registry
}
