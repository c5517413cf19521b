use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use ft_toolproto::ToolClient;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::executor::{execute_workflow, ExecError, WorkflowResult, WorkflowStatus};
use crate::explain::explain_result;
use crate::planner::{plan_workflow, PlanError, WorkflowPlan};
use crate::request::ScenarioRequest;

/// Environment variable naming the journal file.
pub const JOURNAL_ENV: &str = "FT_JOURNAL_PATH";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Pending,
    Running,
    Completed,
    Failed,
}

/// Everything known about one run. This is the body of `GET /runs/{id}`
/// and one journal line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub status: RunStatus,
    pub request: ScenarioRequest,
    pub plan: Option<WorkflowPlan>,
    pub result: Option<WorkflowResult>,
    pub explanation: Option<String>,
    pub geojson: Option<Value>,
    pub wms_query: Option<String>,
    pub error: Option<Value>,
}

impl RunRecord {
    pub fn pending(run_id: String, request: ScenarioRequest, plan: WorkflowPlan) -> Self {
        RunRecord {
            run_id,
            status: RunStatus::Pending,
            request,
            plan: Some(plan),
            result: None,
            explanation: None,
            geojson: None,
            wms_query: None,
            error: None,
        }
    }

    /// Fills in the outcome of executing the plan.
    pub fn finish(&mut self, outcome: Result<WorkflowResult, ExecError>) {
        match outcome {
            Err(e) => {
                self.status = RunStatus::Failed;
                self.error = Some(json!({"kind": "TransportError", "message": e.to_string()}));
            }
            Ok(result) => {
                match &result.status {
                    WorkflowStatus::Completed => {
                        self.status = RunStatus::Completed;
                        self.explanation = explain_result(&result, &self.request).ok();
                        if let Some(map) = result.value_of("render_route") {
                            self.geojson = map.get("geojson").cloned();
                            self.wms_query = map.get("wms_query").and_then(Value::as_str).map(String::from);
                        }
                    }
                    WorkflowStatus::FailedAtStep { step_id } => {
                        self.status = RunStatus::Failed;
                        self.error = result.step(step_id).and_then(|s| s.result.error.clone());
                    }
                }
                self.result = Some(result);
            }
        }
    }

    /// Canonical form without step timings or the explanation, which
    /// quotes them.
    pub fn deterministic_view(&self) -> Value {
        let mut v = ft_core::canon::to_value(self);
        if let Some(r) = self.result.as_ref() {
            v["result"] = r.deterministic_view();
        }
        if let Value::Object(m) = &mut v {
            m.remove("explanation");
        }
        v
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Plan(#[from] PlanError),
}

/// Plans and executes `req` in the calling thread.
pub fn run_request(run_id: &str, req: &ScenarioRequest, client: &dyn ToolClient) -> Result<RunRecord, RunError> {
    let plan = plan_workflow(req)?;
    let mut record = RunRecord::pending(run_id.to_string(), req.clone(), plan);
    record.status = RunStatus::Running;
    let outcome = execute_workflow(record.plan.as_ref().expect("planned"), client);
    record.finish(outcome);
    Ok(record)
}

/// Append-only JSON-lines log of finished runs.
pub struct Journal {
    path: PathBuf,
    file: Mutex<File>,
}

impl Journal {
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Journal { path, file: Mutex::new(file) })
    }

    /// Opens the file named by `FT_JOURNAL_PATH`, if set and non-empty.
    pub fn from_env() -> io::Result<Option<Self>> {
        match std::env::var_os(JOURNAL_ENV) {
            Some(p) if !p.is_empty() => Self::open(p).map(Some),
            _ => Ok(None),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, record: &RunRecord) -> io::Result<()> {
        let line = format!("{}\n", ft_core::canon::to_string(record));
        let mut f = self.file.lock().unwrap_or_else(|e| e.into_inner());
        f.write_all(line.as_bytes())?;
        f.flush()
    }
}
