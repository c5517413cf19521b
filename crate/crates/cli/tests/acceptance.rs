//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.
//!
//! Run with `cargo test -p ft-cli --test acceptance`.

use std::net::SocketAddr;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use ft_core::geoviz::{build_wms_query, BBox, WmsLayer};
use ft_core::optimizer::{oracle_hop_bound, outcomes_agree, CostBreakdown};
use ft_core::simulator::unit_mean_lognormal;
use ft_core::synth::{random_network, random_scenario, rng};
use ft_core::{
    canon, cost_breakdown, enumerate_paths_oracle, fixtures, monte_carlo, solve_rcsp, Network, RoutePlan, Scenario,
};
use ft_orchestrator::{run_request, Gateway, RunRecord, RunStatus, ScenarioRequest};
use ft_toolproto::conformance::cases;
use ft_toolproto::{builtin_registry, codes, HttpClient, InProcessClient, RpcError, ToolClient};
use rand_distr::Distribution;
use serde_json::{json, Value};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Every plan solved by the suites, for the cost identity check.
#[derive(Default)]
struct Solved(Vec<(Network, Scenario, RoutePlan)>);

impl Solved {
    fn keep(&mut self, net: &Network, s: &Scenario, r: &Result<RoutePlan, ft_core::OptimizeError>) {
        if let Ok(p) = r {
            self.0.push((net.clone(), s.clone(), p.clone()));
        }
    }
}

fn oracle_equivalence(solved: &mut Solved) -> Outcome {
    let started = Instant::now();
    let mut agreed = 0;
    for net_seed in 0..25u64 {
        let mut r = rng(1000 + net_seed);
        let nodes = 3 + (net_seed as usize % 8);
        let net = random_network(&mut r, nodes, 3);
        for i in 0..40 {
            let s = random_scenario(&mut r, &net);
            let fast = solve_rcsp(&net, &s);
            let slow = enumerate_paths_oracle(&net, &s, oracle_hop_bound(&net));
            outcomes_agree(&fast, &slow).map_err(|d| format!("network {net_seed} scenario {i}: {d}"))?;
            solved.keep(&net, &s, &fast);
            agreed += 1;
        }
    }
    let secs = started.elapsed().as_secs_f64();
    check(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{agreed} scenarios on 25 networks (3 to 10 nodes) agree; {secs:.2} s"))
}

fn monotonicity(solved: &mut Solved) -> Outcome {
    let (mut deadline_pairs, mut price_pairs) = (0, 0);
    for trial in 0..200u64 {
        let mut r = rng(5000 + trial);
        let net = random_network(&mut r, 2 + (trial as usize % 9), 3);
        let s = random_scenario(&mut r, &net);
        let base = solve_rcsp(&net, &s);
        solved.keep(&net, &s, &base);

        let mut relaxed = s.clone();
        relaxed.deadline_hours += 1.0 + (trial % 13) as f64 * 2.5;
        let looser = solve_rcsp(&net, &relaxed);
        solved.keep(&net, &relaxed, &looser);
        if let Ok(b) = &base {
            let l = looser.as_ref().map_err(|e| format!("trial {trial}: relaxed deadline became infeasible: {e}"))?;
            check(l.total_usd <= b.total_usd * (1.0 + 1e-12), || format!("trial {trial}: {} > {}", l.total_usd, b.total_usd))?;
            deadline_pairs += 1;
        }

        let mut pricier = s.clone();
        pricier.carbon_price_usd_per_kg += 0.05 + (trial % 7) as f64 * 0.3;
        let dearer = solve_rcsp(&net, &pricier);
        solved.keep(&net, &pricier, &dearer);
        if let (Ok(b), Ok(d)) = (&base, &dearer) {
            check(d.total_usd >= b.total_usd * (1.0 - 1e-12), || format!("trial {trial}: {} < {}", d.total_usd, b.total_usd))?;
            price_pairs += 1;
        }
    }
    Ok(format!("200 trials each; {deadline_pairs} deadline and {price_pairs} carbon-price comparisons on feasible instances"))
}

fn fixture_performance(solved: &mut Solved) -> Outcome {
    let net = fixtures::network("fixture14").ok_or("fixture14 missing")?;
    let s = fixtures::demo_scenario();
    let started = Instant::now();
    let plan = solve_rcsp(&net, &s);
    let solve_s = started.elapsed().as_secs_f64();
    solved.keep(&net, &s, &plan);
    let plan = plan.map_err(|e| e.to_string())?;
    check(plan.edge_ids() == [5, 1, 9, 25, 31, 29, 19], || format!("route {:?}", plan.edge_ids()))?;
    check(canon::round_to(plan.total_usd, 2) == 66395.0, || format!("total {}", plan.total_usd))?;
    check(solve_s <= 0.1, || format!("solve took {solve_s:.4} s"))?;

    let started = Instant::now();
    let client = InProcessClient::new(Arc::new(builtin_registry()));
    let record = run_request("acceptance", &ScenarioRequest::demo(), &client).map_err(|e| e.to_string())?;
    let pipeline_s = started.elapsed().as_secs_f64();
    check(record.status == RunStatus::Completed, || format!("pipeline status {:?}", record.status))?;
    check(record.geojson.is_some(), || "no GeoJSON".into())?;
    let samples = record.result.as_ref().and_then(|r| r.value_of("simulate_plan")).map(|v| v["samples"].clone());
    check(samples == Some(json!(10_000)), || format!("samples {samples:?}"))?;
    check(pipeline_s <= 2.0, || format!("pipeline took {pipeline_s:.3} s"))?;
    Ok(format!("solve {:.2} ms (limit 100 ms); pipeline {:.1} ms (limit 2000 ms)", solve_s * 1e3, pipeline_s * 1e3))
}

fn cost_identity(solved: &Solved) -> Outcome {
    for (i, (net, s, plan)) in solved.0.iter().enumerate() {
        check(plan.total_usd == plan.linehaul_usd + plan.transfer_usd + plan.ghg_tax_usd, || format!("plan {i}: total is not the sum"))?;
        let recomputed = cost_breakdown(net, plan, s).map_err(|e| format!("plan {i}: {e}"))?;
        check(recomputed == plan.costs(), || format!("plan {i}: {recomputed:?} vs {:?}", plan.costs()))?;
    }
    let example = CostBreakdown::from_components(45065.13, 1231.63, 29371.77, 0.0);
    check(canon::round_to(example.total_usd, 2) == 75668.53, || format!("example total {}", example.total_usd))?;
    check(canon::format_usd(example.total_usd) == "75,668.53", || canon::format_usd(example.total_usd))?;
    Ok(format!("{} solved plans; 45,065.13 + 1,231.63 + 29,371.77 = 75,668.53", solved.0.len()))
}

fn outcome_text(r: Result<Value, RpcError>) -> String {
    match r {
        Ok(v) => canon::to_string(&v),
        Err(e) => canon::to_string(&e),
    }
}

fn protocol_conformance() -> Outcome {
    let golden_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../toolproto/tests/golden");
    let registry = Arc::new(builtin_registry());
    let gateway = Gateway::new(registry.clone(), None);
    let server = gateway.serve(SocketAddr::from(([127, 0, 0, 1], 0))).map_err(|e| e.to_string())?;
    let remote = HttpClient::new(&server.url());
    let mut seen_codes = Vec::new();
    let all = cases();
    for case in &all {
        let local = registry.handle_message(&case.request);
        let over_http = canon::to_string(&remote.send_raw(case.request.clone()).map_err(|e| e.to_string())?);
        check(local == over_http, || format!("{}: serve path differs", case.name))?;
        let golden = std::fs::read_to_string(golden_dir.join(format!("{}.json", case.name))).map_err(|e| format!("{}: {e}", case.name))?;
        check(local == golden.trim_end(), || format!("{}: differs from golden", case.name))?;
        let parsed: Value = serde_json::from_str(&local).map_err(|e| e.to_string())?;
        check(parsed["error"]["code"].as_i64() == case.expected_code, || format!("{}: code {}", case.name, parsed["error"]["code"]))?;
        seen_codes.extend(case.expected_code);
    }
    seen_codes.sort();
    let mut expected =
        vec![codes::PARSE_ERROR, codes::INVALID_REQUEST, codes::METHOD_NOT_FOUND, codes::INVALID_PARAMS, codes::TOOL_ERROR];
    expected.sort();
    check(seen_codes == expected, || format!("error codes covered: {seen_codes:?}"))?;

    let local = InProcessClient::new(registry.clone());
    for i in 0..100u64 {
        let mut r = rng(9000 + i);
        let net = random_network(&mut r, 2 + (i as usize % 9), 3);
        let s = random_scenario(&mut r, &net);
        let args = json!({"network": canon::to_value(&net), "scenario": canon::to_value(&s)});
        let id = json!(i);
        let a = outcome_text(local.call_tool(&id, "solve_route", &args).map_err(|e| e.to_string())?);
        let b = outcome_text(remote.call_tool(&id, "solve_route", &args).map_err(|e| e.to_string())?);
        check(a == b, || format!("call {i}: {a} vs {b}"))?;
    }
    Ok(format!("{} golden exchanges incl. all five error codes; 100 randomized solve_route calls bit-identical", all.len()))
}

fn concurrency() -> Outcome {
    let gateway = Gateway::new(Arc::new(builtin_registry()), None);
    let server = gateway.serve(SocketAddr::from(([127, 0, 0, 1], 0))).map_err(|e| e.to_string())?;
    let base = server.url();
    let requests: Vec<ScenarioRequest> = (0..50)
        .map(|i| {
            let mut s = fixtures::demo_scenario();
            s.containers = 50 + 10 * i;
            s.deadline_hours = 36.0 + (i % 5) as f64;
            s.carbon_price_usd_per_kg = 0.02 * (i % 7) as f64;
            ScenarioRequest::fixture("fixture14", s)
        })
        .collect();
    let handles: Vec<_> = requests
        .iter()
        .map(|req| {
            let (base, body) = (base.clone(), canon::to_string(req));
            thread::spawn(move || -> Result<(RunRecord, Duration), String> {
                let http = reqwest::blocking::Client::builder().timeout(Duration::from_secs(60)).build().map_err(|e| e.to_string())?;
                let started = Instant::now();
                let reply: Value = http.post(format!("{base}/scenarios")).body(body).send().and_then(|r| r.json()).map_err(|e| e.to_string())?;
                let run_id = reply["run_id"].as_str().ok_or_else(|| format!("no run id: {reply}"))?.to_string();
                loop {
                    let record: RunRecord =
                        http.get(format!("{base}/runs/{run_id}")).send().and_then(|r| r.json()).map_err(|e| e.to_string())?;
                    if matches!(record.status, RunStatus::Completed | RunStatus::Failed) {
                        return Ok((record, started.elapsed()));
                    }
                    if started.elapsed() > Duration::from_secs(60) {
                        return Err(format!("{run_id} did not finish"));
                    }
                    thread::sleep(Duration::from_millis(5));
                }
            })
        })
        .collect();
    let mut results = Vec::new();
    for h in handles {
        results.push(h.join().map_err(|_| "client thread panicked".to_string())??);
    }
    let mut ids: Vec<&str> = results.iter().map(|(r, _)| r.run_id.as_str()).collect();
    ids.sort();
    ids.dedup();
    check(ids.len() == 50, || format!("{} distinct run ids", ids.len()))?;
    let serial = InProcessClient::new(Arc::new(builtin_registry()));
    for ((record, _), req) in results.iter().zip(&requests) {
        check(record.status == RunStatus::Completed, || format!("{} {:?}", record.run_id, record.status))?;
        let direct = run_request(&record.run_id, req, &serial).map_err(|e| e.to_string())?;
        check(record.deterministic_view() == direct.deterministic_view(), || format!("{} differs from serial execution", record.run_id))?;
    }
    let mut latencies: Vec<Duration> = results.iter().map(|(_, d)| *d).collect();
    latencies.sort();
    let p95 = latencies[(latencies.len() * 95).div_ceil(100) - 1];
    check(p95 <= Duration::from_secs(3), || format!("p95 {p95:?}"))?;
    Ok(format!("50 runs, 50 distinct ids, all equal to serial; p95 {:.0} ms (limit 3000 ms)", p95.as_secs_f64() * 1e3))
}

fn simulation_statistics() -> Outcome {
    let n = 100_000;
    for cv in [0.1, 0.25, 0.5] {
        let d = unit_mean_lognormal(cv).map_err(|e| e.to_string())?;
        let mut r = rng(77);
        let xs: Vec<f64> = (0..n).map(|_| d.sample(&mut r)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        let se_mean = sd / (n as f64).sqrt();
        check((mean - 1.0).abs() < 3.0 * se_mean, || format!("cv {cv}: mean {mean} (se {se_mean})"))?;
        let s2 = (1.0 + cv * cv).ln();
        let kurt_excess = (4.0 * s2).exp() + 2.0 * (3.0 * s2).exp() + 3.0 * (2.0 * s2).exp() - 6.0;
        let se_sd = cv * ((kurt_excess + 2.0) / (4.0 * n as f64)).sqrt();
        let se_cv = (se_sd.powi(2) + (cv * se_mean).powi(2)).sqrt();
        check((sd / mean - cv).abs() < 3.0 * se_cv, || format!("cv {cv}: sample cv {} (se {se_cv})", sd / mean))?;
    }

    let net = fixtures::network("fixture14").ok_or("fixture14 missing")?;
    let s = fixtures::demo_scenario();
    let plan = solve_rcsp(&net, &s).map_err(|e| e.to_string())?;
    let a = monte_carlo(&net, &plan, &s, 10_000).map_err(|e| e.to_string())?;
    let b = monte_carlo(&net, &plan, &s, 10_000).map_err(|e| e.to_string())?;
    check(a == b && canon::to_string(&a) == canon::to_string(&b), || "reports differ across runs".into())?;

    let mut feasible = 0;
    for i in 0..100u64 {
        let mut r = rng(12_000 + i);
        let net = random_network(&mut r, 2 + (i as usize % 9), 3);
        let s = random_scenario(&mut r, &net);
        if let Ok(plan) = solve_rcsp(&net, &s) {
            let report = monte_carlo(&net, &plan, &s, 200).map_err(|e| e.to_string())?;
            check(report.on_time_probability == 1.0, || format!("instance {i}: p = {}", report.on_time_probability))?;
            feasible += 1;
        }
    }
    let mut zero = s.clone();
    zero.travel_time_cv = 0.0;
    let report = monte_carlo(&net, &plan, &zero, 10_000).map_err(|e| e.to_string())?;
    check(report.on_time_probability == 1.0, || format!("fixture14 cv=0: p = {}", report.on_time_probability))?;
    Ok(format!("moments within 3 SE at 1e5 samples for cv 0.1/0.25/0.5; reports bit-identical; p = 1 at cv = 0 on {} feasible plans", feasible + 1))
}

fn wms_golden() -> Outcome {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden/wms_getmap.txt");
    let golden = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let layers = [
        WmsLayer::route("osm_base"),
        WmsLayer::route("faf:freight_flows"),
        WmsLayer::include("sim:nodes"),
        WmsLayer::include("sim:links"),
    ];
    let q = build_wms_query(
        "http://<geoserver-host>/geoserver/wms",
        &layers,
        BBox::new(-125.0, 24.0, -66.0, 50.0),
        800,
        600,
        "OPT12345",
    )
    .map_err(|e| e.to_string())?;
    check(q == golden, || format!("got {q}"))?;
    Ok(format!("{} bytes identical", q.len()))
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".into()))
    });
    match outcome {
        Ok(detail) => {
            println!("PASS  {name}: {detail}");
            true
        }
        Err(why) => {
            println!("FAIL  {name}: {why}");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut solved = Solved::default();
    let results = [
        run("oracle equivalence", || oracle_equivalence(&mut solved)),
        run("monotonicity", || monotonicity(&mut solved)),
        run("fixture performance", || fixture_performance(&mut solved)),
        run("cost decomposition identity", || cost_identity(&solved)),
        run("protocol conformance", protocol_conformance),
        run("gateway concurrency", concurrency),
        run("simulation statistics", simulation_statistics),
        run("WMS golden", wms_golden),
    ];
    let passed = results.iter().filter(|r| **r).count();
    println!("{passed}/{} acceptance criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
