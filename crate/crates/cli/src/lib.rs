//! Command implementations behind the `ft` binary.
//!
//! Each command returns its standard output text or a [`Failure`] carrying
//! the process exit code. Codes:
//!
//! | code | meaning |
//! |---|---|
//! | 0 | success |
//! | 1 | unreadable or invalid input, or a failed pipeline stage |
//! | 2 | no route meets the deadline |
//! | 3 | no route connects origin and destination |
//! | 4 | `oracle-check` found a disagreement |

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use ft_core::optimizer::{outcomes_agree, oracle_hop_bound, solve_rcsp_with, SolverOptions};
use ft_core::synth::{random_scenario, rng};
use ft_core::{canon, enumerate_paths_oracle, load_network, monte_carlo, Network, RoutePlan, Scenario};
use ft_orchestrator::{run_request, Journal, NetworkRef, RequestOptions, RunRecord, RunStatus, ScenarioRequest};
use ft_toolproto::{builtin_registry, InProcessClient};
use serde_json::Value;

pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 1;
    pub const DEADLINE_INFEASIBLE: i32 = 2;
    pub const NO_PATH: i32 = 3;
    pub const ORACLE_MISMATCH: i32 = 4;
}

/// Largest network `oracle-check` accepts.
pub const ORACLE_MAX_NODES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: exit::INPUT, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_network(path: &Path) -> Result<Network, Failure> {
    load_network(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn shared_client() -> InProcessClient {
    InProcessClient::new(Arc::new(builtin_registry()))
}

/// Maps a failed run to its exit code and message.
fn run_failure(record: &RunRecord) -> Failure {
    let error = record.error.clone().unwrap_or(Value::Null);
    let data = error.get("data").unwrap_or(&error);
    let code = match data["kind"].as_str() {
        Some("DeadlineInfeasible") => exit::DEADLINE_INFEASIBLE,
        Some("NoPath") => exit::NO_PATH,
        _ => exit::INPUT,
    };
    let message = data["message"].as_str().or(error["message"].as_str()).map_or_else(|| canon::to_string(&error), String::from);
    let message = match data["violations"].as_array() {
        Some(vs) => std::iter::once(message)
            .chain(vs.iter().map(|v| format!("  {}", v["message"].as_str().unwrap_or_default())))
            .collect::<Vec<_>>()
            .join("\n"),
        None => message,
    };
    Failure { code, message }
}

/// `ft solve`: explanation text, or the canonical route plan with `json`.
pub fn solve(network: &Path, scenario: &Path, json: bool, samples: u64) -> Result<String, Failure> {
    let doc: Value = read_json(network)?;
    let scenario: Scenario = read_json(scenario)?;
    let req = ScenarioRequest {
        network_ref: NetworkRef::Inline(doc),
        scenario,
        options: RequestOptions { samples, want_map: false, ..RequestOptions::default() },
    };
    let record = run_request(&format!("{}-1", req.hash16()), &req, &shared_client()).map_err(|e| Failure::input(e.to_string()))?;
    if record.status != RunStatus::Completed {
        return Err(run_failure(&record));
    }
    if json {
        let result = record.result.as_ref().expect("completed run has a result");
        Ok(canon::to_string(result.value_of("solve_route").expect("completed run solved")))
    } else {
        record.explanation.ok_or_else(|| Failure::input("run completed without an explanation"))
    }
}

/// `ft simulate`: Monte Carlo report for a saved plan, as canonical JSON.
pub fn simulate(network: &Path, plan: &Path, scenario: &Path, samples: u64) -> Result<String, Failure> {
    let net = read_network(network)?;
    let plan: RoutePlan = read_json(plan)?;
    let scenario: Scenario = read_json(scenario)?;
    let report = monte_carlo(&net, &plan, &scenario, samples).map_err(|e| Failure::input(e.to_string()))?;
    Ok(canon::to_string(&report))
}

/// `ft oracle-check`: compares the solver with the exhaustive oracle on
/// `trials` seeded random scenarios.
pub fn oracle_check(network: &Path, trials: u64, seed: u64, dominance_tol: Option<f64>) -> Result<String, Failure> {
    let net = read_network(network)?;
    if net.nodes.len() > ORACLE_MAX_NODES {
        return Err(Failure::input(format!(
            "{}: {} nodes; oracle-check accepts at most {ORACLE_MAX_NODES}",
            network.display(),
            net.nodes.len()
        )));
    }
    if trials == 0 {
        return Ok("0 trials requested; nothing to check".into());
    }
    let mut opts = SolverOptions::default();
    if let Some(tol) = dominance_tol {
        opts.dominance_tol = tol;
    }
    let hops = oracle_hop_bound(&net);
    let mut r = rng(seed);
    for trial in 0..trials {
        let s = random_scenario(&mut r, &net);
        let fast = solve_rcsp_with(&net, &s, &opts);
        let slow = enumerate_paths_oracle(&net, &s, hops);
        if let Err(diff) = outcomes_agree(&fast, &slow) {
            return Err(Failure {
                code: exit::ORACLE_MISMATCH,
                message: format!(
                    "counterexample at trial {trial} (seed {seed}): solver vs oracle: {diff}\nscenario: {}",
                    canon::to_string(&s)
                ),
            });
        }
    }
    Ok(format!("{trials} trials on {} ({} nodes, seed {seed}): solver and oracle agree", net.name, net.nodes.len()))
}

/// Files written by [`demo`], relative to the output directory.
pub const DEMO_ARTIFACTS: [&str; 6] = ["request.json", "plan.json", "result.json", "route.geojson", "wms_query.txt", "explanation.txt"];

pub struct DemoOutcome {
    pub record: RunRecord,
    pub out_dir: PathBuf,
    pub seconds: f64,
}

/// Runs the bundled Seattle to Orlando request through the full pipeline
/// and writes its artifacts to `out_dir`.
pub fn run_demo(out_dir: &Path) -> Result<DemoOutcome, Failure> {
    let journal = Journal::from_env().map_err(|e| Failure::input(format!("journal: {e}")))?;
    let started = Instant::now();
    let req = ScenarioRequest::demo();
    let record = run_request(&format!("{}-1", req.hash16()), &req, &shared_client()).map_err(|e| Failure::input(e.to_string()))?;
    let seconds = started.elapsed().as_secs_f64();
    if let Some(j) = &journal {
        j.append(&record).map_err(|e| Failure::input(format!("journal {}: {e}", j.path().display())))?;
    }
    if record.status != RunStatus::Completed {
        let f = run_failure(&record);
        return Err(Failure::input(format!("demo run failed: {}", f.message)));
    }
    let result = record.result.as_ref().expect("completed run has a result");
    let files: [(&str, String); 6] = [
        ("request.json", canon::to_string(&record.request)),
        ("plan.json", canon::to_string(&record.plan)),
        ("result.json", canon::to_string(&result.deterministic_view())),
        ("route.geojson", canon::to_string(&record.geojson)),
        ("wms_query.txt", record.wms_query.clone().unwrap_or_default()),
        ("explanation.txt", record.explanation.clone().unwrap_or_default()),
    ];
    fs::create_dir_all(out_dir).map_err(|e| Failure::input(format!("{}: {e}", out_dir.display())))?;
    for (name, body) in files {
        let path = out_dir.join(name);
        fs::write(&path, format!("{body}\n")).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    }
    Ok(DemoOutcome { record, out_dir: out_dir.to_path_buf(), seconds })
}

/// `ft demo`: explanation, artifact paths and wall time.
pub fn demo(out_dir: &Path) -> Result<String, Failure> {
    let d = run_demo(out_dir)?;
    Ok(format!(
        "{}\n\nGeoJSON route: {}\nWMS query: {}\nArtifacts: {}\nWall time: {:.3} s",
        d.record.explanation.as_deref().unwrap_or_default(),
        d.out_dir.join("route.geojson").display(),
        d.record.wms_query.as_deref().unwrap_or_default(),
        d.out_dir.display(),
        d.seconds,
    ))
}
