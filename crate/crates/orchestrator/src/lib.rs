//! Request planning, tool-chain execution, plain-language explanation and
//! the HTTP gateway.
//!
//! A [`ScenarioRequest`] is mapped by [`plan_workflow`] to a fixed chain of
//! tool calls. [`execute_workflow`] runs the chain through any
//! [`ft_toolproto::ToolClient`], wiring each step's output into later
//! arguments by JSON path. [`explain_result`] renders a completed run as
//! text. [`Gateway`] exposes the whole pipeline over HTTP:
//!
//! | route | result |
//! |---|---|
//! | `POST /scenarios` | 202 `{"run_id"}`, 400 on an invalid request |
//! | `GET /runs/{run_id}` | 200 [`RunRecord`], 404 when unknown |
//! | `GET /fixtures` | bundled networks with their nodes |
//! | `GET /health` | `{"ok":true}` |
//! | `POST /rpc` | the tool protocol |
//!
//! All bodies are canonical JSON. Finished runs are appended to the journal
//! named by `FT_JOURNAL_PATH` when it is set.

pub mod executor;
pub mod explain;
pub mod gateway;
pub mod planner;
pub mod request;
pub mod run;

pub use executor::{execute_workflow, ExecError, StepResult, ToolResult, WorkflowResult, WorkflowStatus};
pub use explain::{explain_result, unsupported_numerals, ExplainError};
pub use gateway::{fixture_summaries, port_from_env, Gateway, DEFAULT_PORT};
pub use planner::{plan_workflow, resolve_path, Binding, PlanError, WorkflowPlan, WorkflowStep};
pub use request::{NetworkRef, RequestOptions, ScenarioRequest};
pub use run::{run_request, Journal, RunError, RunRecord, RunStatus, JOURNAL_ENV};
