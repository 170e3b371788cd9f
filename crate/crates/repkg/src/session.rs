//! Analysis sessions driven by JSON envelopes.
//!
//! Requests are `{"type": "open" | "command", "session"?: id, "payload": ...}`.
//! Replies use the types `state`, `membership`, `measures`, `suggestions`,
//! `instability`, `graph` and `error`. Errors carry `code` and `message` at
//! the top level instead of a payload.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use repkg_core::community::fast_greedy;
use repkg_core::membership::ensure_labels;
use repkg_core::metrics::instability_report;
use repkg_core::modularity::modularity_directed;
use repkg_core::refactor::{naive_transform, refactor};
use repkg_core::{
    membership_from_labels, DependencyGraph, Edit, Error, Membership, Mode, PackageTable, RefactorResult,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::format::{parse_gml, parse_json, read_graph, Format, GraphDocument, IngestError};
use crate::report::{instability_rows, movement_rows, movement_sentence, round_to};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub payload: Value,
}

impl Envelope {
    pub fn new(kind: &str, session: Option<&str>, payload: Value) -> Self {
        Envelope {
            kind: kind.into(),
            session: session.map(str::to_string),
            code: None,
            message: None,
            payload,
        }
    }

    pub fn error(session: Option<&str>, code: &str, message: impl Into<String>) -> Self {
        Envelope {
            kind: "error".into(),
            session: session.map(str::to_string),
            code: Some(code.into()),
            message: Some(message.into()),
            payload: Value::Null,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("envelopes always serialize")
    }
}

fn core_code(e: &Error) -> &'static str {
    match e {
        Error::NodeNotFound(_) | Error::EdgeNotFound(..) | Error::PackageNotFound(_) => "not-found",
        Error::UndefinedModularity | Error::UndefinedFraction | Error::EmptyGraph => "undefined",
        _ => "invalid",
    }
}

/// A partition of the working graph with a name per community id.
#[derive(Debug, Clone, PartialEq)]
struct Labeled {
    membership: Membership,
    names: Vec<String>,
}

impl Labeled {
    fn table(&self) -> PackageTable {
        let mut t = PackageTable::new();
        for name in &self.names {
            t.intern(name);
        }
        t
    }

    fn payload(&self, source: &str) -> Value {
        json!({
            "source": source,
            "membership": self.membership.assignment(),
            "packages": self.names,
        })
    }
}

fn from_labels(g: &DependencyGraph) -> Labeled {
    let (membership, table) = membership_from_labels(g);
    Labeled {
        membership,
        names: table.names().to_vec(),
    }
}

fn modularity_or_null(g: &DependencyGraph, m: &Membership) -> Value {
    match modularity_directed(g, m) {
        Ok(q) => json!(q.value),
        Err(_) => Value::Null,
    }
}

fn instability_payload(g: &DependencyGraph, p: &Labeled) -> Result<Value, Error> {
    let report = instability_report(g, &p.membership, &p.table())?;
    Ok(json!(instability_rows(&report)))
}

/// Immutable view of the graph as it was opened.
#[derive(Debug, Clone)]
struct Snapshot {
    packaging: Labeled,
    modularity: Value,
    instability: Value,
}

#[derive(Debug)]
pub struct Session {
    id: String,
    graph: DependencyGraph,
    original: Snapshot,
    current: Labeled,
    last: BTreeMap<&'static str, RefactorResult>,
    closed: bool,
}

impl Session {
    fn open(id: String, graph: DependencyGraph) -> Result<(Session, Envelope), Error> {
        let graph = ensure_labels(&graph.simplify());
        let packaging = from_labels(&graph);
        let original = Snapshot {
            modularity: modularity_or_null(&graph, &packaging.membership),
            instability: instability_payload(&graph, &packaging)?,
            packaging: packaging.clone(),
        };
        let session = Session {
            id,
            graph,
            original,
            current: packaging,
            last: BTreeMap::new(),
            closed: false,
        };
        let state = session.state()?;
        Ok((session, state))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    fn envelope(&self, kind: &str, payload: Value) -> Envelope {
        Envelope::new(kind, Some(&self.id), payload)
    }

    /// Full description of the working graph with its label-derived
    /// packaging.
    fn state(&self) -> Result<Envelope, Error> {
        let packaging = from_labels(&self.graph);
        Ok(self.envelope(
            "state",
            json!({
                "graph": GraphDocument::from(&self.graph),
                "labels": self.graph.nodes().iter().map(|n| n.label.as_str()).collect::<Vec<_>>(),
                "packages": packaging.names,
                "membership": packaging.membership.assignment(),
                "modularity": modularity_or_null(&self.graph, &packaging.membership),
                "instability": instability_payload(&self.graph, &packaging)?,
            }),
        ))
    }

    fn graph_message(&self, view: &str, g: &DependencyGraph) -> Envelope {
        self.envelope("graph", json!({ "view": view, "graph": GraphDocument::from(g) }))
    }

    /// Runs one command. Replies are returned in the order they are sent.
    pub fn handle(&mut self, command: &Value) -> Vec<Envelope> {
        if self.closed {
            return vec![Envelope::error(Some(&self.id), "no-session", "session is closed")];
        }
        let Some(name) = command.get("name").and_then(Value::as_str) else {
            return vec![Envelope::error(
                Some(&self.id),
                "bad-request",
                "command payload needs a `name`",
            )];
        };
        let result = match name {
            "get-original" => Ok(self.get_original()),
            "refactor-directed" => self.refactor(Mode::Directed),
            "refactor-undirected" => self.refactor(Mode::Undirected),
            "fast-greedy" => self.fast_greedy(),
            "cluster-graph" => self.cluster_graph(),
            "instability" => {
                instability_payload(&self.graph, &self.current).map(|p| vec![self.envelope("instability", p)])
            }
            "edit" => return self.edit(command),
            "close" => {
                self.closed = true;
                Ok(vec![self.envelope("state", json!({ "closed": true }))])
            }
            other => {
                return vec![Envelope::error(
                    Some(&self.id),
                    "unknown-command",
                    format!("unknown command `{other}`"),
                )]
            }
        };
        result.unwrap_or_else(|e| vec![Envelope::error(Some(&self.id), core_code(&e), e.to_string())])
    }

    fn get_original(&mut self) -> Vec<Envelope> {
        let original = self.original.clone();
        if original.packaging.membership.len() == self.graph.node_count() {
            self.current = original.packaging.clone();
        }
        vec![
            self.envelope("membership", original.packaging.payload("original")),
            self.envelope("measures", json!({ "modularity": original.modularity })),
            self.envelope("instability", original.instability),
        ]
    }

    fn refactor(&mut self, mode: Mode) -> Result<Vec<Envelope>, Error> {
        let r = refactor(&self.graph, mode)?;
        let packaging = Labeled {
            membership: r.membership.clone(),
            names: r.packages.names().to_vec(),
        };
        let movements: Vec<Value> = movement_rows(&r)
            .into_iter()
            .map(|m| {
                json!({
                    "class": m.class,
                    "label": m.label,
                    "from": m.from,
                    "to": m.to,
                    "sentence": movement_sentence(&m.class, &m.from, &m.to),
                })
            })
            .collect();
        let replies = vec![
            self.envelope("membership", packaging.payload(mode.as_str())),
            self.envelope("measures", json!({ "modularity": r.final_q })),
            self.envelope(
                "suggestions",
                json!({
                    "mode": mode.as_str(),
                    "initialQ": round_to(r.initial_q, 2),
                    "finalQ": round_to(r.final_q, 2),
                    "finalQExact": r.final_q,
                    "movements": movements,
                }),
            ),
            self.envelope("instability", instability_payload(&self.graph, &packaging)?),
        ];
        self.current = packaging;
        self.last.insert(mode.as_str(), r);
        Ok(replies)
    }

    fn fast_greedy(&mut self) -> Result<Vec<Envelope>, Error> {
        let symmetric = if self.graph.is_symmetric() {
            self.graph.clone()
        } else {
            naive_transform(&self.graph)
        };
        let (d, m) = fast_greedy(&symmetric)?;
        let packaging = Labeled {
            names: (0..m.community_count()).map(|c| format!("community{c}")).collect(),
            membership: m,
        };
        let replies = vec![
            self.envelope("membership", packaging.payload("fast-greedy")),
            self.envelope("measures", json!({ "modularity": d.q[d.best_cut] })),
        ];
        self.current = packaging;
        Ok(replies)
    }

    /// Condensed view of the current packaging; the session is not changed.
    fn cluster_graph(&self) -> Result<Vec<Envelope>, Error> {
        let raw = self.current.membership.assignment();
        let mut order: Vec<usize> = Vec::new();
        for &c in raw {
            if !order.contains(&c) {
                order.push(c);
            }
        }
        let dense = Membership::compacted_from(raw);
        let mut condensed = self.graph.condense(&dense)?;
        for (new, old) in order.iter().enumerate() {
            condensed.set_label(new, self.current.names[*old].clone())?;
        }
        Ok(vec![self.graph_message("clusters", &condensed)])
    }

    fn edit(&mut self, command: &Value) -> Vec<Envelope> {
        let edit = match parse_edit(command) {
            Ok(e) => e,
            Err(message) => return vec![Envelope::error(Some(&self.id), "bad-request", message)],
        };
        let applied = self.graph.apply_edit(&edit).map(|g| ensure_labels(&g));
        match applied.and_then(|g| {
            self.graph = g;
            self.current = from_labels(&self.graph);
            self.state()
        }) {
            Ok(state) => vec![self.graph_message("working", &self.graph), state],
            Err(e) => vec![Envelope::error(Some(&self.id), core_code(&e), e.to_string())],
        }
    }
}

fn parse_edit(command: &Value) -> Result<Edit, String> {
    let op = command.get("op").and_then(Value::as_str).ok_or("edit needs an `op`")?;
    let index = |key: &str| {
        command
            .get(key)
            .and_then(Value::as_u64)
            .map(|v| v as usize)
            .ok_or(format!("`{op}` needs a nonnegative integer `{key}`"))
    };
    Ok(match op {
        "add-node" => Edit::AddNode {
            label: command
                .get("label")
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string(),
        },
        "remove-node" => Edit::RemoveNode { index: index("index")? },
        "add-edge" => Edit::AddEdge {
            source: index("source")?,
            target: index("target")?,
        },
        "remove-edge" => Edit::RemoveEdge {
            source: index("source")?,
            target: index("target")?,
        },
        "set-locked" => Edit::SetLocked {
            index: index("index")?,
            locked: command
                .get("locked")
                .and_then(Value::as_bool)
                .ok_or("`set-locked` needs a boolean `locked`")?,
        },
        other => return Err(format!("unknown edit op `{other}`")),
    })
}

fn open_graph(payload: &Value) -> Result<DependencyGraph, IngestError> {
    if let Some(doc) = payload.get("graph") {
        return GraphDocument::from_value(doc)?.into_graph();
    }
    if let Some(text) = payload.get("gml").and_then(Value::as_str) {
        return parse_gml(text);
    }
    if let Some(text) = payload.get("json").and_then(Value::as_str) {
        return parse_json(text);
    }
    if let Some(path) = payload.get("path").and_then(Value::as_str) {
        return read_graph(Path::new(path), Format::Auto);
    }
    Err(IngestError::Schema {
        field: "payload".into(),
        message: "expected one of `graph`, `gml`, `json` or `path`".into(),
    })
}

/// All live sessions. Commands on one session run one at a time; distinct
/// sessions proceed independently.
#[derive(Debug, Default)]
pub struct Registry {
    sessions: Mutex<BTreeMap<String, Arc<Mutex<Session>>>>,
    next: AtomicUsize,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn handle_text(&self, text: &str) -> Vec<Envelope> {
        match serde_json::from_str::<Envelope>(text) {
            Ok(env) => self.handle(&env),
            Err(e) => vec![Envelope::error(None, "bad-request", format!("invalid envelope: {e}"))],
        }
    }

    pub fn handle(&self, env: &Envelope) -> Vec<Envelope> {
        match env.kind.as_str() {
            "open" => vec![self.open(&env.payload)],
            "command" => {
                let Some(id) = env.session.as_deref() else {
                    return vec![Envelope::error(None, "no-session", "command without `session`")];
                };
                let Some(session) = self.get(id) else {
                    return vec![Envelope::error(Some(id), "no-session", format!("no session `{id}`"))];
                };
                let mut s = session.lock().unwrap_or_else(|p| p.into_inner());
                let replies = s.handle(&env.payload);
                if s.closed {
                    self.remove(id);
                }
                replies
            }
            other => vec![Envelope::error(
                env.session.as_deref(),
                "unknown-type",
                format!("unknown message type `{other}`"),
            )],
        }
    }

    pub fn open(&self, payload: &Value) -> Envelope {
        let graph = match open_graph(payload) {
            Ok(g) => g,
            Err(e) => return Envelope::error(None, "parse", e.to_string()),
        };
        let id = format!("s{}", self.next.fetch_add(1, Ordering::SeqCst) + 1);
        match Session::open(id.clone(), graph) {
            Ok((session, state)) => {
                self.lock().insert(id, Arc::new(Mutex::new(session)));
                state
            }
            Err(e) => Envelope::error(None, core_code(&e), e.to_string()),
        }
    }

    pub fn get(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        self.lock().get(id).cloned()
    }

    pub fn remove(&self, id: &str) -> bool {
        self.lock().remove(id).is_some()
    }

    pub fn len(&self) -> usize {
        self.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, BTreeMap<String, Arc<Mutex<Session>>>> {
        self.sessions.lock().unwrap_or_else(|p| p.into_inner())
    }
}
