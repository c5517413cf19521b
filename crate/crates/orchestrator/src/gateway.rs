use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use axum::extract::{Path, State};
use axum::http::header::CONTENT_TYPE;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use ft_core::{canon, fixtures, TransportMode};
use ft_toolproto::{rpc_router, spawn_http, InProcessClient, Registry, ServeError, ServerHandle};
use serde::Serialize;
use serde_json::{json, Value};

use crate::executor::execute_workflow;
use crate::planner::{plan_workflow, PlanError};
use crate::request::ScenarioRequest;
use crate::run::{Journal, RunRecord, RunStatus};

/// Default listening port, overridden by `FT_PORT`.
pub const DEFAULT_PORT: u16 = 8080;

/// Run store and executor behind the HTTP API.
pub struct Gateway {
    registry: Arc<Registry>,
    runs: Mutex<HashMap<String, RunRecord>>,
    repeats: Mutex<HashMap<String, u64>>,
    journal: Option<Journal>,
}

impl Gateway {
    pub fn new(registry: Arc<Registry>, journal: Option<Journal>) -> Arc<Self> {
        Arc::new(Gateway { registry, runs: Mutex::default(), repeats: Mutex::default(), journal })
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.registry
    }

    /// `{request hash}-{n}` where `n` counts submissions of that request.
    fn next_run_id(&self, req: &ScenarioRequest) -> String {
        let hash = req.hash16();
        let mut repeats = self.repeats.lock().unwrap_or_else(|e| e.into_inner());
        let n = repeats.entry(hash.clone()).or_insert(0);
        *n += 1;
        format!("{hash}-{n}")
    }

    fn update(&self, record: RunRecord) {
        self.runs.lock().unwrap_or_else(|e| e.into_inner()).insert(record.run_id.clone(), record);
    }

    pub fn get(&self, run_id: &str) -> Option<RunRecord> {
        self.runs.lock().unwrap_or_else(|e| e.into_inner()).get(run_id).cloned()
    }

    /// Plans `req`, stores it as pending and starts it on a worker thread.
    pub fn submit(self: &Arc<Self>, req: ScenarioRequest) -> Result<String, PlanError> {
        let plan = plan_workflow(&req)?;
        let run_id = self.next_run_id(&req);
        let mut record = RunRecord::pending(run_id.clone(), req, plan);
        self.update(record.clone());
        let gw = Arc::clone(self);
        let work = move || {
            record.status = RunStatus::Running;
            gw.update(record.clone());
            let client = InProcessClient::new(Arc::clone(&gw.registry));
            let plan = record.plan.clone().expect("planned");
            let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| execute_workflow(&plan, &client)));
            match outcome {
                Ok(outcome) => record.finish(outcome),
                Err(_) => {
                    record.status = RunStatus::Failed;
                    record.error = Some(json!({"kind": "InternalError", "message": "run panicked"}));
                }
            }
            if let Some(j) = &gw.journal {
                if let Err(e) = j.append(&record) {
                    eprintln!("journal {}: {e}", j.path().display());
                }
            }
            gw.update(record);
        };
        match tokio::runtime::Handle::try_current() {
            Ok(rt) => drop(rt.spawn_blocking(work)),
            Err(_) => drop(std::thread::spawn(work)),
        }
        Ok(run_id)
    }

    /// Gateway routes plus `POST /rpc` over the same registry.
    pub fn router(self: &Arc<Self>) -> Router {
        Router::new()
            .route("/scenarios", post(post_scenario))
            .route("/runs/{run_id}", get(get_run))
            .route("/fixtures", get(get_fixtures))
            .route("/health", get(health))
            .with_state(Arc::clone(self))
            .merge(rpc_router(Arc::clone(&self.registry)))
    }

    pub fn serve(self: &Arc<Self>, addr: SocketAddr) -> Result<ServerHandle, ServeError> {
        spawn_http(self.router(), addr)
    }
}

/// Port from `FT_PORT`, else [`DEFAULT_PORT`].
pub fn port_from_env() -> Result<u16, String> {
    match std::env::var("FT_PORT") {
        Ok(p) if !p.is_empty() => p.parse().map_err(|_| format!("FT_PORT is not a port number: {p:?}")),
        _ => Ok(DEFAULT_PORT),
    }
}

fn canonical<T: Serialize>(status: StatusCode, body: &T) -> Response {
    (status, [(CONTENT_TYPE, "application/json")], canon::to_string(body)).into_response()
}

async fn post_scenario(State(gw): State<Arc<Gateway>>, body: String) -> Response {
    let req: ScenarioRequest = match serde_json::from_str(&body) {
        Ok(r) => r,
        Err(e) => {
            return canonical(StatusCode::BAD_REQUEST, &json!({"error": {"kind": "InvalidRequest", "message": e.to_string()}}))
        }
    };
    match gw.submit(req) {
        Ok(run_id) => canonical(StatusCode::ACCEPTED, &json!({"run_id": run_id})),
        Err(e) => {
            let mut err = canon::to_value(&e);
            err["message"] = json!(e.to_string());
            canonical(StatusCode::BAD_REQUEST, &json!({"error": err}))
        }
    }
}

async fn get_run(State(gw): State<Arc<Gateway>>, Path(run_id): Path<String>) -> Response {
    match gw.get(&run_id) {
        Some(record) => canonical(StatusCode::OK, &record),
        None => canonical(StatusCode::NOT_FOUND, &json!({"error": {"kind": "UnknownRun", "run_id": run_id}})),
    }
}

/// Summary of every bundled network, for scenario forms.
pub fn fixture_summaries() -> Value {
    let list: Vec<Value> = fixtures::NAMES
        .iter()
        .map(|name| {
            let net = fixtures::network(name).expect("bundled fixture");
            let mut modes: Vec<TransportMode> = net.edges.iter().map(|e| e.mode).collect();
            modes.sort();
            modes.dedup();
            json!({
                "name": name,
                "node_count": net.nodes.len(),
                "edge_count": net.edges.len(),
                "modes": modes,
                "nodes": net.nodes,
            })
        })
        .collect();
    json!({ "fixtures": list })
}

async fn get_fixtures() -> Response {
    canonical(StatusCode::OK, &fixture_summaries())
}

async fn health() -> Response {
    canonical(StatusCode::OK, &json!({"ok": true}))
}
