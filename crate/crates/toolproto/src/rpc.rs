use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::registry::Registry;

pub const PROTOCOL: &str = "mcp-lite/1";
pub const SERVER_NAME: &str = "freight-twin";

/// JSON-RPC error codes used by the protocol. Every failed call maps to
/// exactly one of them.
pub mod codes {
    pub const PARSE_ERROR: i64 = -32700;
    pub const INVALID_REQUEST: i64 = -32600;
    pub const METHOD_NOT_FOUND: i64 = -32601;
    pub const INVALID_PARAMS: i64 = -32602;
    pub const TOOL_ERROR: i64 = -32000;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpcError {
    pub code: i64,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
}

impl RpcError {
    pub fn new(code: i64, message: impl Into<String>) -> Self {
        RpcError { code, message: message.into(), data: None }
    }

    pub fn with_data(code: i64, message: impl Into<String>, data: Value) -> Self {
        RpcError { code, message: message.into(), data: Some(data) }
    }
}

impl std::fmt::Display for RpcError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({})", self.message, self.code)
    }
}

impl std::error::Error for RpcError {}

pub fn handshake() -> Value {
    json!({
        "protocol": PROTOCOL,
        "server": {"name": SERVER_NAME, "version": env!("CARGO_PKG_VERSION")},
        "capabilities": {"tools": true},
    })
}

fn envelope(id: Value, outcome: Result<Value, RpcError>) -> Value {
    match outcome {
        Ok(result) => json!({"jsonrpc": "2.0", "id": id, "result": result}),
        Err(error) => json!({"jsonrpc": "2.0", "id": id, "error": error}),
    }
}

fn valid_id(id: &Value) -> bool {
    matches!(id, Value::Null | Value::String(_) | Value::Number(_))
}

impl Registry {
    /// Handles one raw request body and returns the canonical response text.
    pub fn handle_message(&self, raw: &str) -> String {
        let response = match serde_json::from_str::<Value>(raw) {
            Ok(request) => self.handle_value(&request),
            Err(e) => envelope(Value::Null, Err(RpcError::new(codes::PARSE_ERROR, format!("parse error: {e}")))),
        };
        ft_core::canon::to_string(&response)
    }

    /// Handles one parsed request. Requests without an id are answered with
    /// `"id": null`; batches are not supported.
    pub fn handle_value(&self, request: &Value) -> Value {
        let Value::Object(obj) = request else {
            let what = if request.is_array() { "batch requests are not supported" } else { "request must be an object" };
            return envelope(Value::Null, Err(RpcError::new(codes::INVALID_REQUEST, what)));
        };
        let id = obj.get("id").cloned().unwrap_or(Value::Null);
        if !valid_id(&id) {
            return envelope(Value::Null, Err(RpcError::new(codes::INVALID_REQUEST, "id must be a string, number or null")));
        }
        if obj.get("jsonrpc").and_then(Value::as_str) != Some("2.0") {
            return envelope(id, Err(RpcError::new(codes::INVALID_REQUEST, "jsonrpc must be \"2.0\"")));
        }
        let Some(method) = obj.get("method").and_then(Value::as_str) else {
            return envelope(id, Err(RpcError::new(codes::INVALID_REQUEST, "method must be a string")));
        };
        let empty = Value::Object(Map::new());
        let params = obj.get("params").unwrap_or(&empty);
        let outcome = match method {
            "initialize" => Ok(handshake()),
            "tools/list" => Ok(json!({"tools": self.list_tools()})),
            "tools/call" => self.dispatch_call(params),
            other => Err(RpcError::new(codes::METHOD_NOT_FOUND, format!("unknown method {other:?}"))),
        };
        envelope(id, outcome)
    }

    fn dispatch_call(&self, params: &Value) -> Result<Value, RpcError> {
        let name = params
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| RpcError::new(codes::INVALID_PARAMS, "tools/call params need a string \"name\""))?;
        let empty = Value::Object(Map::new());
        let arguments = params.get("arguments").unwrap_or(&empty);
        self.call_tool(name, arguments)
    }
}
