//! JSON and table rendering. Rationals are written as `"p/q"` strings,
//! receivers and messages as 1-based labels.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::clique::{BoundReport, Certificate, CoverEntry, GroupEntry, Param};
use crate::digraph::bits;
use crate::lp::{format_rational, parse_rational, Rational};
use crate::matrix::FqMatrix;
use crate::schemes::{DecodeTrace, SchemeSummary, Simulation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

pub fn rational(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

/// 1-based member labels of a receiver mask.
pub fn members(mask: u64) -> Value {
    bits(mask).map(|i| i + 1).collect()
}

pub fn matrix_rows(m: &FqMatrix) -> Value {
    json!(m.row_vecs())
}

fn cover_entry(c: &CoverEntry) -> Value {
    json!({ "members": members(c.members), "weight": rational(&c.weight), "vector": c.vector })
}

fn group_entry(g: &GroupEntry) -> Value {
    let mut v = json!({ "members": members(g.members), "weight": rational(&g.weight), "cost": rational(&g.cost) });
    if !g.cliques.is_empty() {
        v["cliques"] = g.cliques.iter().map(cover_entry).collect();
    }
    v
}

pub fn certificate(c: &Certificate) -> Value {
    match c {
        Certificate::Cover { cliques } => json!({ "cliques": cliques.iter().map(cover_entry).collect::<Vec<_>>() }),
        Certificate::Local { k, cliques } => {
            json!({ "k": rational(k), "cliques": cliques.iter().map(cover_entry).collect::<Vec<_>>() })
        }
        Certificate::Groups { groups } => json!({ "groups": groups.iter().map(group_entry).collect::<Vec<_>>() }),
    }
}

/// `{"phi":"3","phi_f":"5/2",...}` in parameter order, plus `certificates`
/// when asked and `inexact` when a heuristic was used.
pub fn bounds_json(report: &BoundReport, with_certificates: bool) -> Value {
    let mut out = Map::new();
    for (p, b) in &report.bounds {
        out.insert(p.name().to_string(), rational(&b.value));
    }
    let inexact: Vec<&str> = report.bounds.iter().filter(|(_, b)| !b.exact).map(|(p, _)| p.name()).collect();
    if !inexact.is_empty() {
        out.insert("inexact".into(), json!(inexact));
    }
    if with_certificates {
        let certs: Map<String, Value> =
            report.bounds.iter().map(|(p, b)| (p.name().to_string(), certificate(&b.certificate))).collect();
        out.insert("certificates".into(), Value::Object(certs));
    }
    Value::Object(out)
}

/// Reads parameter values back from [`bounds_json`] output.
pub fn parse_bounds_json(v: &Value) -> Result<BTreeMap<Param, Rational>, String> {
    let obj = v.as_object().ok_or("expected a JSON object")?;
    let mut out = BTreeMap::new();
    for (k, val) in obj {
        if k == "certificates" || k == "inexact" {
            continue;
        }
        let p: Param = k.parse().map_err(|e| format!("{e}"))?;
        let s = val.as_str().ok_or_else(|| format!("{k}: expected a string"))?;
        out.insert(p, parse_rational(s).ok_or_else(|| format!("{k}: bad rational {s:?}"))?);
    }
    Ok(out)
}

/// One row per parameter, smaller bounds first.
pub fn bounds_table(report: &BoundReport) -> String {
    let mut s = format!("{:<12} {:>8}  {}\n", "parameter", "value", "exact");
    for (p, b) in &report.bounds {
        let _ = writeln!(s, "{:<12} {:>8}  {}", p.name(), format_rational(&b.value), if b.exact { "yes" } else { "no" });
    }
    s
}

pub fn scheme_summary(s: &SchemeSummary) -> Value {
    json!({
        "scheme": s.name,
        "fractional": s.fractional,
        "base_field": s.base_field,
        "field": s.field,
        "extension_degree": s.extension_degree,
        "sub_packets": s.sub_packets,
        "transmissions": s.transmissions,
        "rate": rational(&s.rate),
        "codes": s.codes.iter().map(|&(n, k)| json!([n, k])).collect::<Vec<_>>(),
        "groups": s.groups.iter().map(|&(m, rows)| json!({ "members": members(m), "rows": rows })).collect::<Vec<_>>(),
    })
}

fn decode_trace(d: &DecodeTrace) -> Value {
    json!({
        "receiver": d.receiver + 1,
        "heard": d.heard,
        "stripped": d.stripped,
        "solved": d.solved,
        "gathered": d.gathered,
        "recovered": d.recovered,
        "expected": d.expected,
        "success": d.success,
    })
}

pub fn simulation_json(sim: &Simulation) -> Value {
    let mut v = scheme_summary(&sim.scheme);
    v["trials"] = json!(sim.trials);
    v["seed"] = json!(sim.seed);
    v["failures"] = json!(sim.failures);
    v["failed_receivers"] = sim.failed_receivers.iter().map(|j| j + 1).collect();
    if let Some(t) = &sim.first {
        v["first_trial"] = json!({
            "transmitted": t.transmitted,
            "decodes": t.decodes.iter().map(decode_trace).collect::<Vec<_>>(),
        });
    }
    v
}

pub fn simulation_table(sim: &Simulation) -> String {
    let s = &sim.scheme;
    let mut out = String::new();
    let _ = writeln!(out, "scheme         {}{}", s.name, if s.fractional { " (fractional)" } else { "" });
    let _ = writeln!(out, "field          GF({}) over GF({})", s.field, s.base_field);
    let _ = writeln!(out, "sub-packets    {}", s.sub_packets);
    let _ = writeln!(out, "transmissions  {}", s.transmissions);
    let _ = writeln!(out, "rate           {}", format_rational(&s.rate));
    let _ = writeln!(out, "trials         {} (seed {})", sim.trials, sim.seed);
    let _ = writeln!(out, "failures       {}", sim.failures);
    out
}

/// Pretty JSON with a trailing newline.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}
