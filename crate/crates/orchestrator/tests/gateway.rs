use std::net::SocketAddr;
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use ft_core::Scenario;
use ft_orchestrator::{run_request, Gateway, Journal, RunRecord, RunStatus, ScenarioRequest};
use ft_toolproto::{builtin_registry, HttpClient, InProcessClient, ServerHandle};
use reqwest::blocking::Client;
use serde_json::{json, Value};

fn start(journal: Option<Journal>) -> (Arc<Gateway>, ServerHandle) {
    let gw = Gateway::new(Arc::new(builtin_registry()), journal);
    let server = gw.serve(SocketAddr::from(([127, 0, 0, 1], 0))).unwrap();
    (gw, server)
}

fn http() -> Client {
    Client::builder().timeout(Duration::from_secs(60)).build().unwrap()
}

fn post(c: &Client, base: &str, body: &str) -> (u16, Value) {
    let r = c.post(format!("{base}/scenarios")).body(body.to_string()).send().unwrap();
    let status = r.status().as_u16();
    (status, serde_json::from_str(&r.text().unwrap()).unwrap())
}

fn get(c: &Client, url: &str) -> (u16, Value) {
    let r = c.get(url).send().unwrap();
    let status = r.status().as_u16();
    (status, serde_json::from_str(&r.text().unwrap()).unwrap())
}

fn wait(c: &Client, base: &str, run_id: &str) -> RunRecord {
    let deadline = Instant::now() + Duration::from_secs(60);
    loop {
        let (code, body) = get(c, &format!("{base}/runs/{run_id}"));
        assert_eq!(code, 200);
        let record: RunRecord = serde_json::from_value(body).unwrap();
        if matches!(record.status, RunStatus::Completed | RunStatus::Failed) {
            return record;
        }
        assert!(Instant::now() < deadline, "run {run_id} did not finish");
        thread::sleep(Duration::from_millis(5));
    }
}

fn t3_body(deadline: f64) -> String {
    json!({
        "network_ref": "t3",
        "scenario": {"origin": 1, "destination": 3, "containers": 10, "deadline_hours": deadline,
                     "carbon_price_usd_per_kg": 1.0, "allowed_modes": ["Highway", "Rail"]},
        "options": {"samples": 500},
    })
    .to_string()
}

#[test]
fn fixture14_end_to_end() {
    let (_gw, server) = start(None);
    let c = http();
    let req = ScenarioRequest::demo();
    let (code, body) = post(&c, &server.url(), &ft_core::canon::to_string(&req));
    assert_eq!(code, 202);
    let run_id = body["run_id"].as_str().unwrap().to_string();
    assert_eq!(run_id, format!("{}-1", req.hash16()));
    let record = wait(&c, &server.url(), &run_id);
    assert_eq!(record.status, RunStatus::Completed);
    assert!(record.explanation.as_deref().unwrap().contains("250 containers"));
    assert_eq!(record.geojson.as_ref().unwrap()["type"], json!("FeatureCollection"));

    let direct = run_request(&run_id, &req, &InProcessClient::new(Arc::new(builtin_registry()))).unwrap();
    assert_eq!(record.deterministic_view(), direct.deterministic_view());
}

#[test]
fn unknown_run_is_404() {
    let (_gw, server) = start(None);
    let (code, body) = get(&http(), &format!("{}/runs/nonexistent", server.url()));
    assert_eq!(code, 404);
    assert_eq!(body["error"]["run_id"], json!("nonexistent"));
}

#[test]
fn health_and_fixtures() {
    let (_gw, server) = start(None);
    let c = http();
    assert_eq!(get(&c, &format!("{}/health", server.url())), (200, json!({"ok": true})));
    let (code, body) = get(&c, &format!("{}/fixtures", server.url()));
    assert_eq!(code, 200);
    let list = body["fixtures"].as_array().unwrap();
    let names: Vec<_> = list.iter().map(|f| f["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["fixture14", "t3"]);
    assert_eq!(list[0]["node_count"], json!(14));
    assert_eq!(list[0]["nodes"][0]["name"], json!("Seattle"));
    assert_eq!(list[0]["modes"], json!(["Highway", "Rail"]));
}

#[test]
fn bad_requests_are_400() {
    let (_gw, server) = start(None);
    let c = http();
    for body in [
        "{not json".to_string(),
        json!({"scenario": {}}).to_string(),
        t3_body(12.0).replace("\"t3\"", "\"atlantis\""),
        t3_body(12.0).replace("\"containers\":10", "\"containers\":0"),
        t3_body(12.0).replace("\"samples\":500", "\"samples\":500,\"colour\":1"),
    ] {
        let (code, reply) = post(&c, &server.url(), &body);
        assert_eq!(code, 400, "{body}");
        assert!(reply["error"]["kind"].is_string(), "{reply}");
    }
}

#[test]
fn repeated_requests_get_distinct_ids() {
    let (_gw, server) = start(None);
    let c = http();
    let a = post(&c, &server.url(), &t3_body(12.0)).1["run_id"].as_str().unwrap().to_string();
    let b = post(&c, &server.url(), &t3_body(12.0)).1["run_id"].as_str().unwrap().to_string();
    assert_ne!(a, b);
    assert_eq!(a.rsplit_once('-').unwrap().0, b.rsplit_once('-').unwrap().0);
    assert!(a.ends_with("-1") && b.ends_with("-2"));
    let (ra, rb) = (wait(&c, &server.url(), &a), wait(&c, &server.url(), &b));
    assert_eq!(ra.result.unwrap().deterministic_view(), rb.result.unwrap().deterministic_view());
}

#[test]
fn failing_runs_are_isolated() {
    let (_gw, server) = start(None);
    let c = http();
    let ids: Vec<(bool, String)> = (0..10)
        .map(|i| {
            let ok = i % 2 == 0;
            let body = t3_body(if ok { 12.0 + i as f64 } else { 4.0 });
            (ok, post(&c, &server.url(), &body).1["run_id"].as_str().unwrap().to_string())
        })
        .collect();
    for (ok, id) in ids {
        let record = wait(&c, &server.url(), &id);
        if ok {
            assert_eq!(record.status, RunStatus::Completed);
        } else {
            assert_eq!(record.status, RunStatus::Failed);
            assert_eq!(record.error.unwrap()["data"]["kind"], json!("DeadlineInfeasible"));
            assert!(record.explanation.is_none());
        }
    }
    assert_eq!(get(&c, &format!("{}/health", server.url())).0, 200);
}

#[test]
fn concurrent_submissions_match_serial() {
    let (_gw, server) = start(None);
    let base = server.url();
    let requests: Vec<String> = (0..50)
        .map(|i| {
            let scenario: Scenario = serde_json::from_value(json!({
                "origin": 1, "destination": 14, "containers": 50 + 10 * i, "deadline_hours": 36.0 + (i % 5) as f64,
                "carbon_price_usd_per_kg": 0.02 * (i % 7) as f64, "allowed_modes": ["Highway", "Rail"],
                "travel_time_cv": 0.1,
            }))
            .unwrap();
            ft_core::canon::to_string(&ScenarioRequest::fixture("fixture14", scenario))
        })
        .collect();
    let handles: Vec<_> = requests
        .iter()
        .cloned()
        .map(|body| {
            let base = base.clone();
            thread::spawn(move || {
                let c = http();
                let started = Instant::now();
                let (code, reply) = post(&c, &base, &body);
                assert_eq!(code, 202);
                let record = wait(&c, &base, reply["run_id"].as_str().unwrap());
                (record, started.elapsed())
            })
        })
        .collect();
    let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();

    let mut ids: Vec<_> = results.iter().map(|(r, _)| r.run_id.clone()).collect();
    ids.sort();
    ids.dedup();
    assert_eq!(ids.len(), 50);

    let serial = InProcessClient::new(Arc::new(builtin_registry()));
    for ((record, _), body) in results.iter().zip(&requests) {
        assert_eq!(record.status, RunStatus::Completed);
        let req: ScenarioRequest = serde_json::from_str(body).unwrap();
        let direct = run_request(&record.run_id, &req, &serial).unwrap();
        assert_eq!(record.result.as_ref().unwrap().deterministic_view(), direct.result.unwrap().deterministic_view());
    }
    let mut latencies: Vec<Duration> = results.iter().map(|(_, d)| *d).collect();
    latencies.sort();
    assert!(latencies[47] <= Duration::from_secs(3), "p95 {:?}", latencies[47]);
}

#[test]
fn journal_gets_one_line_per_finished_run() {
    let path = std::env::temp_dir().join(format!("ft-journal-{}-{}.jsonl", std::process::id(), line!()));
    let _ = std::fs::remove_file(&path);
    let (gw, server) = start(Some(Journal::open(&path).unwrap()));
    let c = http();
    let ok = post(&c, &server.url(), &t3_body(12.0)).1["run_id"].as_str().unwrap().to_string();
    let bad = post(&c, &server.url(), &t3_body(4.0)).1["run_id"].as_str().unwrap().to_string();
    wait(&c, &server.url(), &ok);
    wait(&c, &server.url(), &bad);
    drop(server);
    drop(gw);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<RunRecord> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    lines.sort_by(|a, b| a.run_id.cmp(&b.run_id));
    assert_eq!(lines.len(), 2);
    for l in text.lines() {
        assert_eq!(ft_core::canon::canonicalize(l).unwrap(), l);
    }
    let _ = std::fs::remove_file(&path);
}

#[test]
fn tool_protocol_is_served_alongside() {
    let (_gw, server) = start(None);
    let rpc = HttpClient::new(&server.url());
    assert_eq!(rpc.initialize().unwrap()["protocol"], json!("mcp-lite/1"));
}
