//! Machine-readable and human-readable renderings of an analysis.
//!
//! Terms and atoms are printed in problem-file syntax so that they can be
//! pasted back into a `join` query.

use std::fmt::Write as _;

use egtrs::analysis::{Blocker, PairOutcome, RouteResult};
use egtrs::joinability::PairJoin;
use egtrs::{Bounds, Feasibility, Report, Verdict};
use serde::Serialize;

/// The JSON report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct JsonReport {
    pub verdict: JsonVerdict,
    /// The route that proved E-confluence, if any.
    pub route: Option<String>,
    pub families: Vec<JsonFamily>,
    pub validation: Vec<JsonDiagnostic>,
    pub bounds: JsonBounds,
    pub annotations_used: Vec<String>,
}

/// The verdict and its justification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct JsonVerdict {
    pub result: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<JsonWitness>,
    pub blockers: Vec<JsonBlocker>,
    pub routes: Vec<JsonRoute>,
}

/// A non-joinable instance of a pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JsonWitness {
    pub pair: String,
    pub sigma: Vec<(String, String)>,
    pub certificate: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JsonBlocker {
    pub pair: String,
    pub route: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JsonRoute {
    pub route: String,
    pub theorem: String,
    pub succeeded: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JsonFamily {
    pub id: String,
    pub pairs: Vec<JsonPair>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JsonPair {
    pub id: String,
    pub peak: JsonPeak,
    pub condition: Vec<String>,
    pub feasibility: String,
    pub joinability: JsonJoinability,
    pub evidence: String,
}

/// The two sides of a pair and the overlap that produced them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JsonPeak {
    pub left: String,
    pub right: String,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JsonJoinability {
    pub status: String,
    pub mode: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JsonDiagnostic {
    pub code: String,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct JsonBounds {
    pub depth: usize,
    pub size: usize,
    pub class: usize,
    pub solutions: usize,
}

impl From<Bounds> for JsonBounds {
    fn from(b: Bounds) -> JsonBounds {
        JsonBounds { depth: b.max_depth, size: b.max_term_size, class: b.max_class_size, solutions: b.max_solutions }
    }
}

fn feasibility_text(f: &Feasibility) -> String {
    match f {
        Feasibility::Feasible(_) => "Feasible".into(),
        Feasibility::Infeasible(why) => format!("Infeasible ({why})"),
        Feasibility::Unknown => "Unknown".into(),
    }
}

/// The join status and the evidence behind it.
pub fn join_text(o: &PairOutcome) -> (&'static str, String) {
    match &o.join {
        PairJoin::Joinable(ev) => ("Joinable", ev.to_string()),
        PairJoin::NotJoinable { sigma, certificate } => ("NotJoinable", format!("instance {sigma}: {certificate}")),
        PairJoin::Unknown(why) => ("Unknown", why.clone()),
    }
}

fn blocker_json(b: &Blocker) -> JsonBlocker {
    JsonBlocker { pair: b.pair.clone(), route: b.route.label().into(), reason: b.reason.clone() }
}

fn route_json(r: &RouteResult) -> JsonRoute {
    JsonRoute { route: r.route.label().into(), theorem: r.theorem.into(), succeeded: r.succeeded }
}

fn pair_json(o: &PairOutcome) -> JsonPair {
    let (status, evidence) = join_text(o);
    JsonPair {
        id: o.pair.id.clone(),
        peak: JsonPeak { left: o.pair.left.to_string(), right: o.pair.right.to_string(), source: o.pair.peak() },
        condition: o.pair.cond.iter().map(|a| a.to_string()).collect(),
        feasibility: feasibility_text(&o.feasibility),
        joinability: JsonJoinability { status: status.into(), mode: o.mode.to_string() },
        evidence,
    }
}

/// Converts a report to its JSON form.
pub fn to_json(report: &Report) -> JsonReport {
    let (theorem, witness, blockers, route) = match &report.verdict {
        Verdict::EConfluent { route, theorem } => {
            (Some(theorem.to_string()), None, Vec::new(), Some(route.label().to_string()))
        }
        Verdict::NotEConfluent { pair, sigma, certificate } => (
            None,
            Some(JsonWitness {
                pair: pair.clone(),
                sigma: sigma.iter().map(|(x, t)| (x.to_string(), t.to_string())).collect(),
                certificate: certificate.to_string(),
            }),
            Vec::new(),
            None,
        ),
        Verdict::Maybe { blockers } => (None, None, blockers.iter().map(blocker_json).collect(), None),
    };
    JsonReport {
        verdict: JsonVerdict {
            result: report.verdict.label().into(),
            theorem,
            witness,
            blockers,
            routes: report.routes.iter().map(route_json).collect(),
        },
        route,
        families: report
            .families
            .iter()
            .map(|f| JsonFamily { id: f.family.id().into(), pairs: f.pairs.iter().map(pair_json).collect() })
            .collect(),
        validation: report
            .validation
            .iter()
            .map(|d| JsonDiagnostic { code: d.code.into(), message: d.message.clone() })
            .collect(),
        bounds: report.bounds.into(),
        annotations_used: report.annotations_used.clone(),
    }
}

/// Renders the JSON report with a trailing newline.
pub fn json_text(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(&to_json(report)).expect("report serializes");
    s.push('\n');
    s
}

/// Renders a report for the terminal.
pub fn text(report: &Report) -> String {
    let mut out = String::new();
    match &report.verdict {
        Verdict::EConfluent { route, theorem } => {
            let _ = writeln!(out, "verdict: EConfluent (route {}, {theorem})", route.label());
        }
        Verdict::NotEConfluent { pair, sigma, certificate } => {
            let _ = writeln!(out, "verdict: NotEConfluent");
            let _ = writeln!(out, "  witness pair {pair} under {sigma}");
            let _ = writeln!(out, "  {certificate}");
        }
        Verdict::Maybe { blockers } => {
            let _ = writeln!(out, "verdict: Maybe");
            for b in blockers {
                let _ = writeln!(out, "  blocked by {} on route {}: {}", b.pair, b.route.label(), b.reason);
            }
        }
    }
    for r in &report.routes {
        let status = if r.succeeded { "succeeded" } else { "failed" };
        let _ = writeln!(out, "route {} ({}): {status}", r.route.label(), r.theorem);
    }
    for d in &report.validation {
        let _ = writeln!(out, "note [{}]: {}", d.code, d.message);
    }
    for a in &report.annotations_used {
        let _ = writeln!(out, "annotation used: {a}");
    }
    for f in &report.families {
        let _ = writeln!(out, "\n{} ({} pairs)", f.family.id(), f.pairs.len());
        for o in &f.pairs {
            let (status, evidence) = join_text(o);
            let _ = writeln!(out, "  {}  {}", o.pair.id, o.pair);
            let _ = writeln!(out, "    {} / {status} in {}: {evidence}", feasibility_text(&o.feasibility), o.mode);
        }
    }
    out
}
