//! JSON forms of parse trees, termination reports and engine statistics.
//!
//! Field order is fixed by the struct definitions, so equal values always
//! serialize to identical bytes.

use std::collections::BTreeMap;

use ipg_core::engine::{ParseTree, Stats};
use ipg_core::terminate::TerminationReport;
use serde::Serialize;
use serde_json::Value;

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TreeJson<'a> {
    Node {
        nt: &'a str,
        attrs: BTreeMap<&'a str, i64>,
        start: i64,
        end: i64,
        children: Vec<TreeJson<'a>>,
    },
    Array {
        elems: Vec<TreeJson<'a>>,
    },
    Leaf {
        bytes: String,
    },
}

impl<'a> From<&'a ParseTree> for TreeJson<'a> {
    fn from(t: &'a ParseTree) -> Self {
        match t {
            ParseTree::Node(n) => TreeJson::Node {
                nt: &n.name,
                attrs: n.env.attrs.iter().map(|(k, v)| (&**k, *v)).collect(),
                start: n.env.start,
                end: n.env.end,
                children: n.children.iter().map(TreeJson::from).collect(),
            },
            ParseTree::Array(es) => TreeJson::Array {
                elems: es.iter().map(TreeJson::from).collect(),
            },
            ParseTree::Leaf(b) => TreeJson::Leaf { bytes: hex::encode(b) },
        }
    }
}

pub fn tree_json(t: &ParseTree) -> String {
    serde_json::to_string(&TreeJson::from(t)).expect("tree serializes")
}

#[derive(Serialize)]
struct CycleJson<'a> {
    path: &'a [String],
    intervals: Vec<[&'a str; 2]>,
    result: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    hint: Option<&'a str>,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    verdict: &'static str,
    cycles: Vec<CycleJson<'a>>,
    ms: f64,
}

/// `ms` is reported as given; pass `timing = false` for reproducible output.
pub fn report_json(r: &TerminationReport, timing: bool) -> String {
    let j = ReportJson {
        verdict: r.verdict.as_str(),
        cycles: r
            .cycles
            .iter()
            .map(|c| CycleJson {
                path: &c.path,
                intervals: c.intervals.iter().map(|(l, r)| [l.as_str(), r.as_str()]).collect(),
                result: c.result.as_str(),
                hint: c.hint.as_deref(),
            })
            .collect(),
        ms: if timing { r.ms } else { 0.0 },
    };
    serde_json::to_string(&j).expect("report serializes")
}

#[derive(Serialize)]
struct StatsJson {
    invocations: u64,
    memo_hits: u64,
    max_depth: usize,
}

pub fn stats_json(s: &Stats) -> String {
    serde_json::to_string(&StatsJson {
        invocations: s.invocations,
        memo_hits: s.memo_hits,
        max_depth: s.max_depth,
    })
    .expect("stats serialize")
}

/// Checks that `v` has the shape [`TreeJson`] produces.
pub fn validate_tree(v: &Value) -> Result<(), String> {
    let obj = v.as_object().ok_or("tree value is not an object")?;
    let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    let int = |k: &str| obj.get(k).and_then(Value::as_i64).ok_or(format!("`{k}` is not an integer"));
    match obj.get("kind").and_then(Value::as_str) {
        Some("node") => {
            let mut want = ["kind", "nt", "attrs", "start", "end", "children"];
            want.sort_unstable();
            let mut got = keys.clone();
            got.sort_unstable();
            if got != want {
                return Err(format!("node has keys {keys:?}"));
            }
            obj["nt"].as_str().ok_or("`nt` is not a string")?;
            let attrs = obj["attrs"].as_object().ok_or("`attrs` is not an object")?;
            if let Some((k, _)) = attrs.iter().find(|(_, v)| !v.is_i64()) {
                return Err(format!("attribute `{k}` is not an integer"));
            }
            if attrs.contains_key("EOI") {
                return Err("`attrs` contains EOI".into());
            }
            int("start")?;
            int("end")?;
            children(&obj["children"])
        }
        Some("array") if keys.len() == 2 => children(&obj["elems"]),
        Some("leaf") if keys.len() == 2 => {
            let b = obj["bytes"].as_str().ok_or("`bytes` is not a string")?;
            hex::decode(b).map(drop).map_err(|e| format!("`bytes`: {e}"))
        }
        _ => Err(format!("bad tree object with keys {keys:?}")),
    }
}

fn children(v: &Value) -> Result<(), String> {
    v.as_array().ok_or("children are not an array")?.iter().try_for_each(validate_tree)
}
