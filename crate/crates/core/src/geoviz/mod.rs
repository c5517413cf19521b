//! Route export: GeoJSON feature collections for plans and WMS 1.1.1
//! GetMap query strings for the map server layers.

mod wms;

use serde_json::{json, Value};
use thiserror::Error;

use crate::netmodel::{Network, NetworkNode};
use crate::optimizer::RoutePlan;

pub use wms::{build_wms_query, parse_wms_query, BBox, WmsLayer, WmsQuery};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("unknown node {0}")]
    UnknownNode(u64),
    #[error("unknown edge {0}")]
    UnknownEdge(u64),
    #[error("invalid bbox: {0}")]
    InvalidBBox(String),
    #[error("layer list is empty")]
    EmptyLayers,
    #[error("invalid layer name {0:?}")]
    InvalidLayer(String),
    #[error("invalid route id {0:?}")]
    InvalidRouteId(String),
    #[error("width and height must be positive")]
    InvalidDimensions,
    #[error("malformed WMS query: {0}")]
    Malformed(String),
}

fn point(node: &NetworkNode) -> Value {
    json!({"type": "Point", "coordinates": [node.lon, node.lat]})
}

/// One LineString per leg, one Point per transfer and origin/destination
/// Points. Coordinates are `[lon, lat]`. Legs are straight segments between
/// their endpoint nodes.
pub fn plan_to_geojson(net: &Network, plan: &RoutePlan) -> Result<Value, GeoError> {
    let node = |id: u64| net.node(id).ok_or(GeoError::UnknownNode(id));
    let mut features = Vec::new();
    if !plan.legs.is_empty() {
        let origin = node(plan.origin)?;
        features.push(json!({
            "type": "Feature",
            "geometry": point(origin),
            "properties": {"role": "origin", "node_id": origin.id, "name": origin.name},
        }));
        let mut transfers = plan.transfers.iter().peekable();
        for leg in &plan.legs {
            if net.edge(leg.edge_id).is_none() {
                return Err(GeoError::UnknownEdge(leg.edge_id));
            }
            let (from, to) = (node(leg.from_node)?, node(leg.to_node)?);
            if let Some(t) = transfers.next_if(|t| t.node_id == leg.from_node && t.to_mode == leg.mode) {
                features.push(json!({
                    "type": "Feature",
                    "geometry": point(from),
                    "properties": {
                        "role": "transfer",
                        "node_id": t.node_id,
                        "from_mode": t.from_mode,
                        "to_mode": t.to_mode,
                    },
                }));
            }
            features.push(json!({
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": [[from.lon, from.lat], [to.lon, to.lat]]},
                "properties": {
                    "role": "leg",
                    "edge_id": leg.edge_id,
                    "mode": leg.mode,
                    "depart_hours": leg.depart_hours,
                    "arrive_hours": leg.arrive_hours,
                },
            }));
        }
        let dest = node(plan.destination)?;
        features.push(json!({
            "type": "Feature",
            "geometry": point(dest),
            "properties": {"role": "destination", "node_id": dest.id, "name": dest.name},
        }));
    }
    Ok(json!({"type": "FeatureCollection", "features": features}))
}

/// Bounding box of every node the plan touches, padded by `pad_degrees` and
/// clamped to valid WGS84 ranges.
pub fn plan_bbox(net: &Network, plan: &RoutePlan, pad_degrees: f64) -> Result<BBox, GeoError> {
    let mut ids = vec![plan.origin, plan.destination];
    for leg in &plan.legs {
        ids.push(leg.from_node);
        ids.push(leg.to_node);
    }
    let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
    for id in ids {
        let n = net.node(id).ok_or(GeoError::UnknownNode(id))?;
        b = [b[0].min(n.lon), b[1].min(n.lat), b[2].max(n.lon), b[3].max(n.lat)];
    }
    let pad = pad_degrees.max(1e-6);
    Ok(BBox {
        min_lon: (b[0] - pad).max(-180.0),
        min_lat: (b[1] - pad).max(-90.0),
        max_lon: (b[2] + pad).min(180.0),
        max_lat: (b[3] + pad).min(90.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::solve_rcsp;
    use crate::optimizer::testnet::*;

    #[test]
    fn empty_plan_has_no_features() {
        let fc = plan_to_geojson(&t3(), &RoutePlan::empty(1)).unwrap();
        assert_eq!(fc["type"], "FeatureCollection");
        assert_eq!(fc["features"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn t3_feature_layout() {
        let plan = solve_rcsp(&t3(), &t3_scenario(12.0)).unwrap();
        let fc = plan_to_geojson(&t3(), &plan).unwrap();
        let f = fc["features"].as_array().unwrap();
        assert_eq!(f.len(), 5);
        let roles: Vec<_> = f.iter().map(|x| x["properties"]["role"].as_str().unwrap()).collect();
        assert_eq!(roles, ["origin", "leg", "transfer", "leg", "destination"]);
        let lines: Vec<_> = f.iter().filter(|x| x["geometry"]["type"] == "LineString").collect();
        assert_eq!(lines[0]["properties"]["mode"], "Highway");
        assert_eq!(lines[1]["properties"]["mode"], "Rail");
        assert_eq!(f[2]["properties"]["node_id"], 2);
        // [lon, lat]
        let n1 = t3().nodes[0].clone();
        assert_eq!(f[0]["geometry"]["coordinates"], json!([n1.lon, n1.lat]));
    }

    #[test]
    fn unknown_edge_rejected() {
        let mut plan = solve_rcsp(&t3(), &t3_scenario(12.0)).unwrap();
        plan.legs[1].edge_id = 99;
        assert_eq!(plan_to_geojson(&t3(), &plan), Err(GeoError::UnknownEdge(99)));
    }

    #[test]
    fn bbox_covers_route() {
        let plan = solve_rcsp(&t3(), &t3_scenario(12.0)).unwrap();
        let b = plan_bbox(&t3(), &plan, 0.5).unwrap();
        assert_eq!((b.min_lon, b.min_lat, b.max_lon, b.max_lat), (-99.5, 40.5, -96.5, 43.5));
    }
}
