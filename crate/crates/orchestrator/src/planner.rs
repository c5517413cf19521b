use std::collections::BTreeMap;

use ft_core::{canon, fixtures};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::request::{NetworkRef, ScenarioRequest};

/// Where a placeholder's value comes from: a JSON path into an earlier
/// step's result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub step_id: String,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkflowStep {
    pub step_id: String,
    pub tool_name: String,
    /// Tool arguments. A string equal to `${name}` is replaced by the value
    /// of binding `name`.
    pub argument_template: Value,
    pub bindings: BTreeMap<String, Binding>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkflowPlan {
    pub id: String,
    pub steps: Vec<WorkflowStep>,
}

impl WorkflowPlan {
    pub fn tool_names(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.tool_name.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "kind")]
pub enum PlanError {
    #[error("unknown fixture {name:?}")]
    UnknownFixture { name: String },
    #[error("invalid scenario: {message}")]
    InvalidScenario { message: String },
    #[error("invalid request: {message}")]
    InvalidRequest { message: String },
}

fn network_document(req: &ScenarioRequest) -> Result<Value, PlanError> {
    match &req.network_ref {
        NetworkRef::Fixture(name) => fixtures::network_source(name)
            .map(|src| serde_json::from_str(src).expect("bundled fixture parses"))
            .ok_or_else(|| PlanError::UnknownFixture { name: name.clone() }),
        NetworkRef::Inline(v) if v.is_object() => Ok(v.clone()),
        NetworkRef::Inline(_) => Err(PlanError::InvalidRequest { message: "inline network must be a JSON object".into() }),
    }
}

fn capacitated(network: &Value) -> bool {
    network["edges"]
        .as_array()
        .is_some_and(|edges| edges.iter().any(|e| e.get("capacity_containers").is_some_and(|c| !c.is_null())))
}

fn bind(step_id: &str, path: &str) -> Binding {
    Binding { step_id: step_id.into(), path: path.into() }
}

fn step(tool: &str, template: Value, bindings: &[(&str, &Binding)]) -> WorkflowStep {
    WorkflowStep {
        step_id: tool.into(),
        tool_name: tool.into(),
        argument_template: template,
        bindings: bindings.iter().map(|(k, b)| (k.to_string(), (*b).clone())).collect(),
    }
}

/// Maps a request to its tool chain: validate, solve, assign flow when any
/// edge has a capacity, simulate, and render when a map is wanted.
pub fn plan_workflow(req: &ScenarioRequest) -> Result<WorkflowPlan, PlanError> {
    req.scenario.validate().map_err(|e| PlanError::InvalidScenario { message: e.to_string() })?;
    if req.options.samples == 0 {
        return Err(PlanError::InvalidRequest { message: "options.samples must be at least 1".into() });
    }
    if req.options.k_pool == 0 {
        return Err(PlanError::InvalidRequest { message: "options.k_pool must be at least 1".into() });
    }
    let network = network_document(req)?;
    let scenario = canon::to_value(&req.scenario);
    let net = bind("validate_network", "$.network");
    let plan = bind("solve_route", "$");

    let mut steps = vec![
        step("validate_network", json!({"network": network}), &[]),
        step("solve_route", json!({"network": "${net}", "scenario": scenario}), &[("net", &net)]),
    ];
    if capacitated(&network) {
        steps.push(step(
            "assign_flow",
            json!({"network": "${net}", "scenario": scenario, "k": req.options.k_pool}),
            &[("net", &net)],
        ));
    }
    steps.push(step(
        "simulate_plan",
        json!({"network": "${net}", "plan": "${plan}", "scenario": scenario, "samples": req.options.samples}),
        &[("net", &net), ("plan", &plan)],
    ));
    if req.options.want_map {
        steps.push(step("render_route", json!({"network": "${net}", "plan": "${plan}"}), &[("net", &net), ("plan", &plan)]));
    }
    Ok(WorkflowPlan { id: format!("wf-{}", req.hash16()), steps })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("path {path:?}: {reason}")]
pub struct PathError {
    pub path: String,
    pub reason: String,
}

/// Resolves `$`, `$.a.b` and `$.a[0].b` style paths.
pub fn resolve_path<'v>(root: &'v Value, path: &str) -> Result<&'v Value, PathError> {
    let fail = |reason: String| PathError { path: path.to_string(), reason };
    let rest = path.strip_prefix('$').ok_or_else(|| fail("must start with '$'".into()))?;
    let mut cur = root;
    let mut chars = rest.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '.' => {
                let mut key = String::new();
                while let Some(&n) = chars.peek() {
                    if n == '.' || n == '[' {
                        break;
                    }
                    key.push(n);
                    chars.next();
                }
                if key.is_empty() {
                    return Err(fail("empty key".into()));
                }
                cur = cur.get(&key).ok_or_else(|| fail(format!("no key {key:?}")))?;
            }
            '[' => {
                let mut digits = String::new();
                for n in chars.by_ref() {
                    if n == ']' {
                        break;
                    }
                    digits.push(n);
                }
                let i: usize = digits.parse().map_err(|_| fail(format!("bad index {digits:?}")))?;
                cur = cur.get(i).ok_or_else(|| fail(format!("no index {i}")))?;
            }
            other => return Err(fail(format!("unexpected {other:?}"))),
        }
    }
    Ok(cur)
}
