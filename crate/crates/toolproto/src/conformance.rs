//! Fixed request set covering the handshake, discovery, a successful call
//! and every error code. Golden responses live in `tests/golden/`.

use ft_core::fixtures;
use serde_json::{json, Value};

use crate::rpc::codes;

pub struct ConformanceCase {
    pub name: &'static str,
    pub request: String,
    /// Expected error code, `None` for a successful response.
    pub expected_code: Option<i64>,
}

/// `solve_route` arguments on the bundled three-node network. Without a
/// deadline the arguments fail schema validation.
pub fn t3_solve_arguments(deadline: Option<f64>) -> Value {
    let mut scenario = json!({
        "origin": 1, "destination": 3, "containers": 10,
        "carbon_price_usd_per_kg": 1.0, "allowed_modes": ["Highway", "Rail"],
    });
    if let Some(d) = deadline {
        scenario["deadline_hours"] = json!(d);
    }
    let network: Value = serde_json::from_str(fixtures::network_source("t3").expect("bundled")).expect("bundled fixture parses");
    json!({"network": network, "scenario": scenario})
}

fn t3_call(id: u64, deadline: Option<f64>) -> String {
    json!({
        "jsonrpc": "2.0", "id": id, "method": "tools/call",
        "params": {"name": "solve_route", "arguments": t3_solve_arguments(deadline)},
    })
    .to_string()
}

pub fn cases() -> Vec<ConformanceCase> {
    let case = |name, request: String, expected_code| ConformanceCase { name, request, expected_code };
    vec![
        case("initialize", r#"{"jsonrpc":"2.0","id":1,"method":"initialize","params":{}}"#.into(), None),
        case("tools_list", r#"{"jsonrpc":"2.0","id":"list","method":"tools/list"}"#.into(), None),
        case("call_solve_route_t3", t3_call(3, Some(12.0)), None),
        case("error_parse", r#"{"jsonrpc":"2.0","id":4,"method":"#.into(), Some(codes::PARSE_ERROR)),
        case("error_invalid_request", r#"{"jsonrpc":"1.0","id":5,"method":"initialize"}"#.into(), Some(codes::INVALID_REQUEST)),
        case(
            "error_method_not_found",
            r#"{"jsonrpc":"2.0","id":6,"method":"tools/call","params":{"name":"foo","arguments":{}}}"#.into(),
            Some(codes::METHOD_NOT_FOUND),
        ),
        case("error_invalid_params", t3_call(7, None), Some(codes::INVALID_PARAMS)),
        case("error_tool_error", t3_call(8, Some(4.0)), Some(codes::TOOL_ERROR)),
    ]
}
