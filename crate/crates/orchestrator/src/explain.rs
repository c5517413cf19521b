use std::collections::HashMap;

use ft_core::canon::format_usd;
use ft_core::{Network, RoutePlan, SimulationReport, TransportMode};
use serde_json::Value;
use thiserror::Error;

use crate::executor::WorkflowResult;
use crate::request::ScenarioRequest;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExplainError {
    #[error("result is incomplete: {0}")]
    IncompleteResult(String),
}

fn incomplete(msg: impl Into<String>) -> ExplainError {
    ExplainError::IncompleteResult(msg.into())
}

fn step_value<T: serde::de::DeserializeOwned>(result: &WorkflowResult, step: &str, path: Option<&str>) -> Result<T, ExplainError> {
    let mut v = result.value_of(step).ok_or_else(|| incomplete(format!("no {step} output")))?;
    if let Some(key) = path {
        v = v.get(key).ok_or_else(|| incomplete(format!("{step} output has no {key}")))?;
    }
    serde_json::from_value(v.clone()).map_err(|e| incomplete(format!("{step} output: {e}")))
}

fn join_words(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

fn route_sentence(plan: &RoutePlan, name: &dyn Fn(u64) -> String) -> String {
    if plan.legs.is_empty() {
        return "The shipment is already at its destination, so no transport legs required.".into();
    }
    let mut runs: Vec<(TransportMode, Vec<u64>, u64, u64)> = Vec::new();
    for leg in &plan.legs {
        match runs.last_mut() {
            Some(run) if run.0 == leg.mode => {
                run.1.push(leg.edge_id);
                run.3 = leg.to_node;
            }
            _ => runs.push((leg.mode, vec![leg.edge_id], leg.from_node, leg.to_node)),
        }
    }
    let mut parts = Vec::new();
    for (i, (mode, edges, from, to)) in runs.iter().enumerate() {
        let ids: Vec<String> = edges.iter().map(u64::to_string).collect();
        let noun = if edges.len() == 1 { "edge" } else { "edges" };
        let leg = format!("by {mode} along {noun} {} from {} to {}", join_words(&ids), name(*from), name(*to));
        if i == 0 {
            parts.push(format!("The shipment travels {leg}"));
        } else {
            parts.push(format!("transfers to {mode} at {}, then travels {leg}", name(*from)));
        }
    }
    format!("{}.", parts.join(", "))
}

/// Renders a completed run as plain English. Every figure in the text is
/// taken from `result`.
pub fn explain_result(result: &WorkflowResult, req: &ScenarioRequest) -> Result<String, ExplainError> {
    if !result.is_completed() {
        return Err(incomplete("workflow did not complete"));
    }
    let network: Network = step_value(result, "validate_network", Some("network"))?;
    let plan: RoutePlan = step_value(result, "solve_route", None)?;
    let report: SimulationReport = step_value(result, "simulate_plan", None)?;
    let solve_ms = *result.timings_ms.get("solve_route").ok_or_else(|| incomplete("no solve_route timing"))?;

    let names: HashMap<u64, &str> = network.nodes.iter().map(|n| (n.id, n.name.as_str())).collect();
    let name = |id: u64| names.get(&id).map_or_else(|| format!("node {id}"), |n| n.to_string());
    let s = &req.scenario;

    let mut modes: Vec<TransportMode> = plan.legs.iter().map(|l| l.mode).collect();
    modes.sort();
    modes.dedup();
    let strategy = match modes.as_slice() {
        [] => String::new(),
        [one] => format!(" The plan is a {one}-only route chosen to minimize operational costs and GHG emissions."),
        many => format!(
            " The plan is an intermodal route combining {} chosen to minimize operational costs and GHG emissions.",
            join_words(&many.iter().map(|m| m.to_string()).collect::<Vec<_>>())
        ),
    };

    let mut text = format!(
        "To fulfill your request of transporting {} containers from {} to {} within {} hours, the workflow solved the routing problem and simulated the result.{strategy} ",
        s.containers,
        name(s.origin),
        name(s.destination),
        s.deadline_hours,
    );
    text.push_str(&route_sentence(&plan, &name));
    text.push_str(&format!(
        " This route results in a total cost of ${}, including ${} in operational expenses, ${} in transfer charges and ${} in GHG tax for {:.1} kg of CO₂.",
        format_usd(plan.total_usd),
        format_usd(plan.linehaul_usd),
        format_usd(plan.transfer_usd),
        format_usd(plan.ghg_tax_usd),
        plan.emissions_kg,
    ));
    if !plan.legs.is_empty() {
        text.push_str(&format!(" Planned transit time is {:.2} hours.", plan.total_time_hours));
    }
    text.push_str(&format!(
        " Across {} simulated runs the plan has an on-time probability {:.1}%.",
        report.samples,
        report.on_time_probability * 100.0,
    ));
    text.push_str(&format!(
        " The route was solved{} in {solve_ms:.3} ms.",
        if plan.optimal { " optimally" } else { "" }
    ));
    Ok(text)
}

/// Decimal numerals in `text`, commas removed. Digits glued to letters
/// (as in `N3`) are still extracted.
pub fn numerals(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let chars: Vec<char> = text.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        let next_digit = chars.get(i + 1).is_some_and(|n| n.is_ascii_digit());
        if c.is_ascii_digit() || (!cur.is_empty() && (c == '.' || c == ',') && next_digit) {
            if c != ',' {
                cur.push(c);
            }
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn collect_numbers(v: &Value, out: &mut Vec<f64>) {
    match v {
        Value::Number(n) => out.extend(n.as_f64()),
        Value::String(s) => out.extend(numerals(s).iter().filter_map(|n| n.parse::<f64>().ok())),
        Value::Array(a) => a.iter().for_each(|x| collect_numbers(x, out)),
        Value::Object(m) => m.values().for_each(|x| collect_numbers(x, out)),
        _ => {}
    }
}

/// Numerals in `text` that match no number of `document` at the precision
/// they are printed with. A percentage may match a probability times 100.
pub fn unsupported_numerals(text: &str, document: &Value) -> Vec<String> {
    let mut known = Vec::new();
    collect_numbers(document, &mut known);
    let scaled: Vec<f64> = known.iter().map(|x| x * 100.0).collect();
    numerals(text)
        .into_iter()
        .filter(|n| {
            let places = n.split_once('.').map_or(0, |(_, f)| f.len());
            !known.iter().chain(&scaled).any(|x| format!("{x:.places$}") == *n)
        })
        .collect()
}
