use std::sync::Arc;
use std::thread;

use ft_core::synth::{random_network, random_scenario, rng};
use ft_core::{canon, fixtures};
use ft_toolproto::{builtin_registry, rpc_router, spawn_http, HttpClient, InProcessClient, ToolClient};
use serde_json::{json, Value};

fn outcome_text(r: Result<Value, ft_toolproto::RpcError>) -> String {
    match r {
        Ok(v) => canon::to_string(&v),
        Err(e) => canon::to_string(&e),
    }
}

#[test]
fn randomized_solve_route_calls_are_bit_identical() {
    let registry = Arc::new(builtin_registry());
    let server = spawn_http(rpc_router(registry.clone()), "127.0.0.1:0".parse().unwrap()).unwrap();
    let remote = HttpClient::new(&server.url());
    let local = InProcessClient::new(registry);
    let mut r = rng(2024);
    let mut ok = 0;
    for i in 0..100u64 {
        let net = random_network(&mut r, 3 + (i as usize % 8), 3);
        let s = random_scenario(&mut r, &net);
        let args = json!({"network": canon::to_value(&net), "scenario": canon::to_value(&s)});
        let id = json!(i);
        let a = local.call_tool(&id, "solve_route", &args).unwrap();
        let b = remote.call_tool(&id, "solve_route", &args).unwrap();
        ok += a.is_ok() as u32;
        assert_eq!(outcome_text(a), outcome_text(b), "call {i}");
    }
    assert!(ok > 30, "only {ok} feasible instances");
}

#[test]
fn fifty_concurrent_calls_match_serial() {
    let registry = Arc::new(builtin_registry());
    let server = spawn_http(rpc_router(registry.clone()), "127.0.0.1:0".parse().unwrap()).unwrap();
    let net: Value = serde_json::from_str(fixtures::network_source("fixture14").unwrap()).unwrap();
    let base = canon::to_value(&fixtures::demo_scenario());
    let args: Vec<Value> = (0..50)
        .map(|i| {
            let mut s = base.clone();
            s["deadline_hours"] = json!(34.5 + i as f64 * 0.25);
            json!({"network": net, "scenario": s})
        })
        .collect();
    let serial: Vec<String> = args.iter().map(|a| outcome_text(registry.call_tool("solve_route", a))).collect();
    let url = server.url();
    let handles: Vec<_> = args
        .into_iter()
        .enumerate()
        .map(|(i, a)| {
            let url = url.clone();
            thread::spawn(move || {
                let c = HttpClient::new(&url);
                outcome_text(c.call_tool(&json!(format!("c{i}")), "solve_route", &a).unwrap())
            })
        })
        .collect();
    let concurrent: Vec<String> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    assert_eq!(concurrent, serial);
}

#[test]
fn ids_are_echoed_for_every_outcome() {
    let registry = Arc::new(builtin_registry());
    let server = spawn_http(rpc_router(registry), "127.0.0.1:0".parse().unwrap()).unwrap();
    let c = HttpClient::new(&server.url());
    for id in [json!(0), json!("abc"), json!(-5), json!(1.5)] {
        let resp = c.send_raw(json!({"jsonrpc": "2.0", "id": id, "method": "nope"}).to_string()).unwrap();
        assert_eq!(resp["id"], id);
        let resp = c.send_raw(json!({"jsonrpc": "2.0", "id": id, "method": "initialize"}).to_string()).unwrap();
        assert_eq!(resp["id"], id);
    }
    assert_eq!(c.initialize().unwrap()["protocol"], "mcp-lite/1");
    assert_eq!(c.list_tools().unwrap().len(), 5);
}

#[test]
fn shutdown_then_calls_fail_as_transport_errors() {
    let server = spawn_http(rpc_router(Arc::new(builtin_registry())), "127.0.0.1:0".parse().unwrap()).unwrap();
    let url = server.url();
    server.shutdown();
    let c = HttpClient::new(&url);
    assert!(c.initialize().is_err());
}
