use std::collections::BTreeMap;
use std::thread;
use std::time::{Duration, Instant};

use ft_toolproto::{RpcError, ToolClient, TransportError};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::planner::{resolve_path, WorkflowPlan, WorkflowStep};

/// Pause before the single retry of a call that failed in transport.
pub const RETRY_BACKOFF: Duration = Duration::from_millis(100);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolResult {
    /// Request id used for the call, `"{plan_id}:{step index}"`.
    pub id: String,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
    /// The JSON-RPC error object, or `{kind: "BindingError", ...}` when the
    /// arguments could not be built.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub step_id: String,
    pub tool: String,
    /// Arguments after binding resolution; null when resolution failed.
    pub arguments: Value,
    pub result: ToolResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state")]
pub enum WorkflowStatus {
    Completed,
    FailedAtStep { step_id: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkflowResult {
    pub plan_id: String,
    pub step_results: Vec<StepResult>,
    pub status: WorkflowStatus,
    /// Value of the last successful step, null if none succeeded.
    pub final_value: Value,
    /// Wall time of each executed step in milliseconds, keyed by step id.
    pub timings_ms: BTreeMap<String, f64>,
}

impl WorkflowResult {
    pub fn is_completed(&self) -> bool {
        self.status == WorkflowStatus::Completed
    }

    pub fn step(&self, step_id: &str) -> Option<&StepResult> {
        self.step_results.iter().find(|s| s.step_id == step_id)
    }

    /// Successful value of a step.
    pub fn value_of(&self, step_id: &str) -> Option<&Value> {
        self.step(step_id).and_then(|s| s.result.value.as_ref())
    }

    /// Canonical form without `timings_ms`, equal across runs of the same
    /// plan.
    pub fn deterministic_view(&self) -> Value {
        let mut v = ft_core::canon::to_value(self);
        if let Value::Object(m) = &mut v {
            m.remove("timings_ms");
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecError {
    #[error("step {step_id}: {source} (after retry)")]
    Transport { step_id: String, source: TransportError },
}

fn substitute(template: &Value, bound: &BTreeMap<&str, Value>) -> Value {
    match template {
        Value::String(s) => s
            .strip_prefix("${")
            .and_then(|r| r.strip_suffix('}'))
            .and_then(|name| bound.get(name))
            .cloned()
            .unwrap_or_else(|| template.clone()),
        Value::Array(items) => Value::Array(items.iter().map(|t| substitute(t, bound)).collect()),
        Value::Object(m) => Value::Object(m.iter().map(|(k, t)| (k.clone(), substitute(t, bound))).collect()),
        other => other.clone(),
    }
}

fn resolve_arguments(step: &WorkflowStep, done: &[StepResult]) -> Result<Value, Value> {
    let mut bound = BTreeMap::new();
    for (name, b) in &step.bindings {
        let source = done
            .iter()
            .find(|r| r.step_id == b.step_id)
            .and_then(|r| r.result.value.as_ref())
            .ok_or_else(|| {
                json!({"kind": "BindingError", "path": b.path, "step_id": b.step_id,
                       "message": format!("binding {name}: no result from step {}", b.step_id)})
            })?;
        let v = resolve_path(source, &b.path).map_err(|e| {
            json!({"kind": "BindingError", "path": b.path, "step_id": b.step_id,
                   "message": format!("binding {name}: {e}")})
        })?;
        bound.insert(name.as_str(), v.clone());
    }
    Ok(substitute(&step.argument_template, &bound))
}

fn call_with_retry(client: &dyn ToolClient, id: &Value, step: &WorkflowStep, args: &Value) -> Result<Result<Value, RpcError>, TransportError> {
    match client.call_tool(id, &step.tool_name, args) {
        Err(_) => {
            thread::sleep(RETRY_BACKOFF);
            client.call_tool(id, &step.tool_name, args)
        }
        answered => answered,
    }
}

/// Runs the steps in order, stopping at the first failed step.
pub fn execute_workflow(plan: &WorkflowPlan, client: &dyn ToolClient) -> Result<WorkflowResult, ExecError> {
    let mut out = WorkflowResult {
        plan_id: plan.id.clone(),
        step_results: Vec::with_capacity(plan.steps.len()),
        status: WorkflowStatus::Completed,
        final_value: Value::Null,
        timings_ms: BTreeMap::new(),
    };
    for (i, step) in plan.steps.iter().enumerate() {
        let id = format!("{}:{i}", plan.id);
        let started = Instant::now();
        let (arguments, result) = match resolve_arguments(step, &out.step_results) {
            Err(e) => (Value::Null, ToolResult { id, ok: false, value: None, error: Some(e) }),
            Ok(args) => {
                let answer = call_with_retry(client, &json!(id), step, &args)
                    .map_err(|source| ExecError::Transport { step_id: step.step_id.clone(), source })?;
                let result = match answer {
                    Ok(v) => ToolResult { id, ok: true, value: Some(v), error: None },
                    Err(e) => ToolResult { id, ok: false, value: None, error: Some(ft_core::canon::to_value(&e)) },
                };
                (args, result)
            }
        };
        out.timings_ms.insert(step.step_id.clone(), started.elapsed().as_secs_f64() * 1e3);
        let ok = result.ok;
        if let Some(v) = &result.value {
            out.final_value = v.clone();
        }
        out.step_results.push(StepResult { step_id: step.step_id.clone(), tool: step.tool_name.clone(), arguments, result });
        if !ok {
            out.status = WorkflowStatus::FailedAtStep { step_id: step.step_id.clone() };
            break;
        }
    }
    Ok(out)
}
