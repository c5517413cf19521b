//! `mcp-lite/1`: a small JSON-RPC 2.0 tool protocol.
//!
//! A [`Registry`] holds named tools, each described by a [`ToolDescriptor`]
//! with JSON-schema documents for its input and output. The registry answers
//! three methods:
//!
//! - `initialize` returns the handshake document
//!   `{"protocol": "mcp-lite/1", "server": {...}, "capabilities": {"tools": true}}`
//! - `tools/list` returns the descriptors sorted by name
//! - `tools/call` with params `{"name", "arguments"}` validates the arguments,
//!   runs the handler, validates its output and returns it as `result`
//!
//! Every outcome maps to either a result or one of the error codes in
//! [`codes`]. Requests are served over newline-delimited stdio
//! ([`serve_stdio`]) or HTTP `POST /rpc` ([`spawn_http`], [`rpc_router`]).
//! The [`ToolClient`] trait gives the orchestrator one interface over an
//! in-process registry and a remote server.
//!
//! [`builtin_registry`] registers the five freight tools:
//! `assign_flow`, `render_route`, `simulate_plan`, `solve_route` and
//! `validate_network`.

mod builtins;
mod client;
pub mod conformance;
mod registry;
mod rpc;
mod server;

pub use builtins::{builtin_registry, schemas, DEFAULT_WMS_BASE};
pub use client::{HttpClient, InProcessClient, ToolClient, TransportError};
pub use registry::{Handler, Registry, RegistryError, ToolDescriptor, ToolError};
pub use rpc::{codes, handshake, RpcError, PROTOCOL, SERVER_NAME};
pub use server::{rpc_router, serve_stdio, spawn_http, ServeError, ServerHandle};
