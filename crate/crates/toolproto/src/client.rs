use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use serde_json::{json, Value};
use thiserror::Error;

use crate::registry::{Registry, ToolDescriptor};
use crate::rpc::RpcError;

/// The call never produced a protocol-level answer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransportError {
    #[error("transport failure: {0}")]
    Io(String),
    #[error("malformed response: {0}")]
    Protocol(String),
}

/// A way to reach a tool registry. The outer `Result` is the transport, the
/// inner one the JSON-RPC outcome.
pub trait ToolClient: Send + Sync {
    fn call_tool(&self, id: &Value, name: &str, arguments: &Value) -> Result<Result<Value, RpcError>, TransportError>;
    fn list_tools(&self) -> Result<Vec<ToolDescriptor>, TransportError>;
}

#[derive(Clone)]
pub struct InProcessClient {
    registry: Arc<Registry>,
}

impl InProcessClient {
    pub fn new(registry: Arc<Registry>) -> Self {
        InProcessClient { registry }
    }
}

impl ToolClient for InProcessClient {
    fn call_tool(&self, _id: &Value, name: &str, arguments: &Value) -> Result<Result<Value, RpcError>, TransportError> {
        Ok(self.registry.call_tool(name, arguments))
    }

    fn list_tools(&self) -> Result<Vec<ToolDescriptor>, TransportError> {
        Ok(self.registry.list_tools().into_iter().cloned().collect())
    }
}

/// Blocking JSON-RPC client for a server's `POST /rpc`. Must not be used
/// from inside an async runtime thread.
pub struct HttpClient {
    endpoint: String,
    http: reqwest::blocking::Client,
    next_id: AtomicU64,
}

impl HttpClient {
    /// `base_url` is the server root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base_url: &str) -> Self {
        HttpClient {
            endpoint: format!("{}/rpc", base_url.trim_end_matches('/')),
            http: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(60))
                .build()
                .expect("http client builds"),
            next_id: AtomicU64::new(1),
        }
    }

    /// Sends a raw request body and returns the parsed response.
    pub fn send_raw(&self, body: String) -> Result<Value, TransportError> {
        let resp = self
            .http
            .post(&self.endpoint)
            .header(reqwest::header::CONTENT_TYPE, "application/json")
            .body(body)
            .send()
            .map_err(|e| TransportError::Io(e.to_string()))?;
        if !resp.status().is_success() {
            return Err(TransportError::Io(format!("HTTP {}", resp.status())));
        }
        let text = resp.text().map_err(|e| TransportError::Io(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| TransportError::Protocol(e.to_string()))
    }

    /// Sends one request and splits the response into result or error,
    /// checking the id echo.
    pub fn request(&self, id: &Value, method: &str, params: Value) -> Result<Result<Value, RpcError>, TransportError> {
        let body = ft_core::canon::to_string(&json!({"jsonrpc": "2.0", "id": id, "method": method, "params": params}));
        let mut resp = self.send_raw(body)?;
        if &resp["id"] != id {
            return Err(TransportError::Protocol(format!("id {} does not echo {}", resp["id"], id)));
        }
        if let Some(err) = resp.get_mut("error") {
            let err: RpcError = serde_json::from_value(err.take()).map_err(|e| TransportError::Protocol(e.to_string()))?;
            return Ok(Err(err));
        }
        match resp.get_mut("result") {
            Some(result) => Ok(Ok(result.take())),
            None => Err(TransportError::Protocol("response has neither result nor error".into())),
        }
    }

    fn fresh_id(&self) -> Value {
        json!(self.next_id.fetch_add(1, Ordering::Relaxed))
    }

    pub fn initialize(&self) -> Result<Value, TransportError> {
        match self.request(&self.fresh_id(), "initialize", json!({}))? {
            Ok(v) => Ok(v),
            Err(e) => Err(TransportError::Protocol(e.to_string())),
        }
    }
}

impl ToolClient for HttpClient {
    fn call_tool(&self, id: &Value, name: &str, arguments: &Value) -> Result<Result<Value, RpcError>, TransportError> {
        self.request(id, "tools/call", json!({"name": name, "arguments": arguments}))
    }

    fn list_tools(&self) -> Result<Vec<ToolDescriptor>, TransportError> {
        let listed = self.request(&self.fresh_id(), "tools/list", json!({}))?.map_err(|e| TransportError::Protocol(e.to_string()))?;
        serde_json::from_value(listed["tools"].clone()).map_err(|e| TransportError::Protocol(e.to_string()))
    }
}
