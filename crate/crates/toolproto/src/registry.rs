use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use jsonschema::Validator;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::rpc::{codes, RpcError};

/// Public description of a tool, as returned by `tools/list`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolDescriptor {
    pub name: String,
    pub description: String,
    pub input_schema: Value,
    pub output_schema: Value,
}

/// A domain failure reported by a handler. `data` carries the structured
/// error (it always has a `kind` field) and is passed to the caller
/// unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct ToolError {
    pub message: String,
    pub data: Value,
}

impl ToolError {
    /// Builds a tool error from any serializable domain error whose JSON
    /// form carries a `kind` tag.
    pub fn from_domain<E: Serialize + fmt::Display>(err: &E) -> Self {
        let mut data = ft_core::canon::to_value(err);
        if let Value::Object(map) = &mut data {
            map.insert("message".into(), Value::String(err.to_string()));
        }
        ToolError { message: err.to_string(), data }
    }

    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        let message = message.into();
        ToolError { data: json!({"kind": kind, "message": message}), message }
    }
}

pub type Handler = Arc<dyn Fn(&Value) -> Result<Value, ToolError> + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("tool {0:?} is already registered")]
    DuplicateTool(String),
    #[error("tool name {0:?} must be lowercase snake case")]
    InvalidName(String),
    #[error("tool {tool:?}: invalid {which} schema: {message}")]
    InvalidSchema { tool: String, which: &'static str, message: String },
}

struct Entry {
    descriptor: ToolDescriptor,
    input: Validator,
    output: Validator,
    handler: Handler,
}

/// Name-keyed tool table. Immutable once shared with a server.
#[derive(Default)]
pub struct Registry {
    tools: BTreeMap<String, Entry>,
}

fn snake_case(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

fn compile(tool: &str, which: &'static str, schema: &Value) -> Result<Validator, RegistryError> {
    let invalid = |message: String| RegistryError::InvalidSchema { tool: tool.to_string(), which, message };
    jsonschema::meta::validate(schema).map_err(|e| invalid(e.to_string()))?;
    jsonschema::validator_for(schema).map_err(|e| invalid(e.to_string()))
}

fn schema_errors(validator: &Validator, value: &Value) -> Vec<(String, String)> {
    validator.iter_errors(value).map(|e| (e.instance_path().to_string(), e.to_string())).collect()
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register_tool(&mut self, descriptor: ToolDescriptor, handler: Handler) -> Result<(), RegistryError> {
        let name = descriptor.name.clone();
        if !snake_case(&name) {
            return Err(RegistryError::InvalidName(name));
        }
        if self.tools.contains_key(&name) {
            return Err(RegistryError::DuplicateTool(name));
        }
        let input = compile(&name, "input", &descriptor.input_schema)?;
        let output = compile(&name, "output", &descriptor.output_schema)?;
        self.tools.insert(name, Entry { descriptor, input, output, handler });
        Ok(())
    }

    /// Descriptors sorted by name.
    pub fn list_tools(&self) -> Vec<&ToolDescriptor> {
        self.tools.values().map(|e| &e.descriptor).collect()
    }

    pub fn len(&self) -> usize {
        self.tools.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tools.is_empty()
    }

    /// Validates `arguments`, runs the handler and validates its output.
    pub fn call_tool(&self, name: &str, arguments: &Value) -> Result<Value, RpcError> {
        let entry = self
            .tools
            .get(name)
            .ok_or_else(|| RpcError::new(codes::METHOD_NOT_FOUND, format!("unknown tool {name:?}")))?;
        let problems = schema_errors(&entry.input, arguments);
        if !problems.is_empty() {
            return Err(schema_violation(name, "arguments", problems));
        }
        let value = (entry.handler)(arguments)
            .map_err(|e| RpcError::with_data(codes::TOOL_ERROR, e.message, e.data))?;
        let problems = schema_errors(&entry.output, &value);
        if !problems.is_empty() {
            let detail: Vec<_> = problems.iter().map(|(p, m)| json!({"path": p, "message": m})).collect();
            return Err(RpcError::with_data(
                codes::TOOL_ERROR,
                format!("tool {name:?} produced output violating its schema"),
                json!({"kind": "OutputSchemaViolation", "errors": detail}),
            ));
        }
        Ok(value)
    }
}

fn schema_violation(tool: &str, what: &str, problems: Vec<(String, String)>) -> RpcError {
    let first = &problems[0];
    let location = if first.0.is_empty() { String::new() } else { format!(" at {}", first.0) };
    let detail: Vec<_> = problems.iter().map(|(p, m)| json!({"path": p, "message": m})).collect();
    RpcError::with_data(
        codes::INVALID_PARAMS,
        format!("invalid {what} for {tool}{location}: {}", first.1),
        json!({"errors": detail}),
    )
}
