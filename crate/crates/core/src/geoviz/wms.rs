use serde::{Deserialize, Serialize};

use super::GeoError;

/// `(min lon, min lat, max lon, max lat)` in EPSG:4326 degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min_lon: f64,
    pub min_lat: f64,
    pub max_lon: f64,
    pub max_lat: f64,
}

impl BBox {
    pub fn new(min_lon: f64, min_lat: f64, max_lon: f64, max_lat: f64) -> Self {
        BBox { min_lon, min_lat, max_lon, max_lat }
    }

    fn check(&self) -> Result<(), GeoError> {
        let all = [self.min_lon, self.min_lat, self.max_lon, self.max_lat];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(GeoError::InvalidBBox("non-finite coordinate".into()));
        }
        if self.min_lon >= self.max_lon {
            return Err(GeoError::InvalidBBox(format!("min lon {} >= max lon {}", self.min_lon, self.max_lon)));
        }
        if self.min_lat >= self.max_lat {
            return Err(GeoError::InvalidBBox(format!("min lat {} >= max lat {}", self.min_lat, self.max_lat)));
        }
        Ok(())
    }
}

/// A requested layer. Route-filtered layers get `route_id='<id>'` in the CQL
/// filter, the others `INCLUDE`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WmsLayer {
    pub name: String,
    pub route_filtered: bool,
}

impl WmsLayer {
    pub fn route(name: &str) -> Self {
        WmsLayer { name: name.to_string(), route_filtered: true }
    }

    pub fn include(name: &str) -> Self {
        WmsLayer { name: name.to_string(), route_filtered: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WmsQuery {
    pub base_url: String,
    pub layers: Vec<WmsLayer>,
    pub bbox: BBox,
    pub width: u32,
    pub height: u32,
    /// Absent when no layer is route-filtered.
    pub route_id: Option<String>,
}

fn token_ok(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | ':'))
}

/// Emits a WMS 1.1.1 GetMap URL. The CQL filter has one entry per layer,
/// in layer order, joined by `;`.
pub fn build_wms_query(
    base_url: &str,
    layers: &[WmsLayer],
    bbox: BBox,
    width: u32,
    height: u32,
    route_id: &str,
) -> Result<String, GeoError> {
    if layers.is_empty() {
        return Err(GeoError::EmptyLayers);
    }
    if let Some(bad) = layers.iter().find(|l| !token_ok(&l.name)) {
        return Err(GeoError::InvalidLayer(bad.name.clone()));
    }
    if layers.iter().any(|l| l.route_filtered) && !token_ok(route_id) {
        return Err(GeoError::InvalidRouteId(route_id.to_string()));
    }
    bbox.check()?;
    if width == 0 || height == 0 {
        return Err(GeoError::InvalidDimensions);
    }
    let names: Vec<&str> = layers.iter().map(|l| l.name.as_str()).collect();
    let filters: Vec<String> = layers
        .iter()
        .map(|l| if l.route_filtered { format!("route_id='{route_id}'") } else { "INCLUDE".to_string() })
        .collect();
    Ok(format!(
        "{base_url}?service=WMS&version=1.1.1&request=GetMap&layers={}&styles=&bbox={},{},{},{}&width={width}&height={height}&srs=EPSG:4326&format=image/png&CQL_FILTER={}",
        names.join(","),
        bbox.min_lon,
        bbox.min_lat,
        bbox.max_lon,
        bbox.max_lat,
        filters.join(";"),
    ))
}

/// Inverse of [`build_wms_query`].
pub fn parse_wms_query(url: &str) -> Result<WmsQuery, GeoError> {
    let bad = |m: &str| GeoError::Malformed(m.to_string());
    let (base, query) = url.split_once('?').ok_or_else(|| bad("missing '?'"))?;
    let mut params = std::collections::BTreeMap::new();
    for pair in query.split('&') {
        let (k, v) = pair.split_once('=').ok_or_else(|| bad(pair))?;
        if params.insert(k, v).is_some() {
            return Err(bad(&format!("duplicate key {k}")));
        }
    }
    let get = |k: &str| params.get(k).copied().ok_or_else(|| bad(&format!("missing {k}")));
    for (k, want) in [("service", "WMS"), ("version", "1.1.1"), ("request", "GetMap"), ("srs", "EPSG:4326"), ("format", "image/png"), ("styles", "")] {
        if get(k)? != want {
            return Err(bad(&format!("{k} must be {want:?}")));
        }
    }
    let names: Vec<&str> = get("layers")?.split(',').collect();
    let filters: Vec<&str> = get("CQL_FILTER")?.split(';').collect();
    if names.len() != filters.len() {
        return Err(bad("layer and filter counts differ"));
    }
    let mut route_id: Option<String> = None;
    let mut layers = Vec::new();
    for (name, filter) in names.iter().zip(&filters) {
        let filtered = if *filter == "INCLUDE" {
            false
        } else {
            let id = filter
                .strip_prefix("route_id='")
                .and_then(|r| r.strip_suffix('\''))
                .ok_or_else(|| bad(filter))?;
            match &route_id {
                Some(prev) if prev != id => return Err(bad("conflicting route ids")),
                _ => route_id = Some(id.to_string()),
            }
            true
        };
        layers.push(WmsLayer { name: name.to_string(), route_filtered: filtered });
    }
    let coords: Vec<f64> = get("bbox")?
        .split(',')
        .map(|c| c.parse::<f64>().map_err(|_| bad("bbox")))
        .collect::<Result<_, _>>()?;
    if coords.len() != 4 {
        return Err(bad("bbox needs 4 values"));
    }
    let dim = |k: &str| -> Result<u32, GeoError> { get(k)?.parse().map_err(|_| bad(k)) };
    Ok(WmsQuery {
        base_url: base.to_string(),
        layers,
        bbox: BBox::new(coords[0], coords[1], coords[2], coords[3]),
        width: dim("width")?,
        height: dim("height")?,
        route_id,
    })
}
