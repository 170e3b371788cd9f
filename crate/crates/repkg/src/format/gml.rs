//! Reader and writer for the GML subset emitted by bytecode dependency
//! extractors:
//!
//! ```text
//! graph [
//!   directed 1
//!   node [ id 0 label "pkg.A" ]
//!   edge [ source 0 target 1 value 2 ]
//! ]
//! ```
//!
//! Unknown keys are skipped on read. A missing `directed` key means
//! directed. Nodes are ordered by id.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use repkg_core::{DependencyGraph, Edge, Node};

use super::IngestError;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Key(String),
    Int(i64),
    Float(f64),
    Str(String),
    Open,
    Close,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
    line: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.char_indices().peekable(),
            text,
            line: 1,
        }
    }

    fn error(&self, message: impl Into<String>) -> IngestError {
        IngestError::Syntax {
            line: self.line,
            message: message.into(),
        }
    }

    fn next_token(&mut self) -> Result<Option<(Token, usize)>, IngestError> {
        loop {
            match self.chars.peek() {
                None => return Ok(None),
                Some(&(_, '\n')) => {
                    self.line += 1;
                    self.chars.next();
                }
                Some(&(_, c)) if c.is_whitespace() => {
                    self.chars.next();
                }
                Some(&(_, '#')) => {
                    while let Some(&(_, c)) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.chars.next();
                    }
                }
                Some(_) => break,
            }
        }
        let line = self.line;
        let (start, c) = self.chars.next().expect("peeked");
        let token = match c {
            '[' => Token::Open,
            ']' => Token::Close,
            '"' => Token::Str(self.string()?),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut end = start + c.len_utf8();
                while let Some(&(i, c)) = self.chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        end = i + c.len_utf8();
                        self.chars.next();
                    } else {
                        break;
                    }
                }
                Token::Key(self.text[start..end].to_string())
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                let mut end = start + 1;
                while let Some(&(i, c)) = self.chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '.' || c == '-' || c == '+' {
                        end = i + 1;
                        self.chars.next();
                    } else {
                        break;
                    }
                }
                let raw = &self.text[start..end];
                if let Ok(i) = raw.parse::<i64>() {
                    Token::Int(i)
                } else if let Ok(f) = raw.parse::<f64>() {
                    Token::Float(f)
                } else {
                    return Err(self.error(format!("invalid number `{raw}`")));
                }
            }
            other => return Err(self.error(format!("unexpected character `{other}`"))),
        };
        Ok(Some((token, line)))
    }

    fn string(&mut self) -> Result<String, IngestError> {
        let mut out = String::new();
        loop {
            match self.chars.next() {
                None => return Err(self.error("unterminated string")),
                Some((_, '"')) => return Ok(out),
                Some((_, '\\')) => match self.chars.next() {
                    Some((_, c @ ('"' | '\\'))) => out.push(c),
                    Some((_, c)) => {
                        out.push('\\');
                        out.push(c);
                    }
                    None => return Err(self.error("unterminated string")),
                },
                Some((_, c)) => {
                    if c == '\n' {
                        self.line += 1;
                    }
                    out.push(c);
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Value {
    Int(i64),
    Float(f64),
    Str(String),
    List(Vec<Entry>),
}

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: Value,
    line: usize,
}

fn parse_list(lexer: &mut Lexer<'_>, nested: bool) -> Result<Vec<Entry>, IngestError> {
    let mut entries = Vec::new();
    loop {
        let (token, line) = match lexer.next_token()? {
            Some(t) => t,
            None if nested => return Err(lexer.error("missing `]`")),
            None => return Ok(entries),
        };
        let key = match token {
            Token::Key(k) => k,
            Token::Close if nested => return Ok(entries),
            other => {
                return Err(IngestError::Syntax {
                    line,
                    message: format!("expected a key, found {}", describe(&other)),
                })
            }
        };
        let value = match lexer.next_token()? {
            Some((Token::Int(i), _)) => Value::Int(i),
            Some((Token::Float(f), _)) => Value::Float(f),
            Some((Token::Str(s), _)) => Value::Str(s),
            Some((Token::Open, _)) => Value::List(parse_list(lexer, true)?),
            Some((other, line)) => {
                return Err(IngestError::Syntax {
                    line,
                    message: format!("expected a value for `{key}`, found {}", describe(&other)),
                })
            }
            None => return Err(lexer.error(format!("missing value for `{key}`"))),
        };
        entries.push(Entry { key, value, line });
    }
}

fn describe(t: &Token) -> String {
    match t {
        Token::Key(k) => format!("key `{k}`"),
        Token::Int(i) => format!("number {i}"),
        Token::Float(f) => format!("number {f}"),
        Token::Str(_) => "a string".into(),
        Token::Open => "`[`".into(),
        Token::Close => "`]`".into(),
    }
}

fn int_field(entries: &[Entry], key: &str, owner_line: usize) -> Result<Option<i64>, IngestError> {
    match entries.iter().find(|e| e.key == key) {
        None => Ok(None),
        Some(Entry {
            value: Value::Int(i), ..
        }) => Ok(Some(*i)),
        Some(e) => Err(IngestError::Syntax {
            line: e.line.max(owner_line),
            message: format!("`{key}` must be an integer"),
        }),
    }
}

/// Parses a GML document into a simplified graph.
pub fn parse_gml(text: &str) -> Result<DependencyGraph, IngestError> {
    if text.trim().is_empty() {
        return Err(IngestError::Empty);
    }
    let mut lexer = Lexer::new(text);
    let top = parse_list(&mut lexer, false)?;
    let graph = top
        .iter()
        .find_map(|e| match (&e.key[..], &e.value) {
            ("graph", Value::List(items)) => Some(items),
            _ => None,
        })
        .ok_or(IngestError::Syntax {
            line: 1,
            message: "no `graph [ ... ]` block".into(),
        })?;

    let directed = match int_field(graph, "directed", 1)? {
        None => true,
        Some(0) => false,
        Some(1) => true,
        Some(other) => {
            let line = graph.iter().find(|e| e.key == "directed").map_or(1, |e| e.line);
            return Err(IngestError::Syntax {
                line,
                message: format!("`directed` must be 0 or 1, found {other}"),
            });
        }
    };

    let mut nodes: BTreeMap<i64, Node> = BTreeMap::new();
    let mut raw_edges = Vec::new();
    for entry in graph {
        let Value::List(items) = &entry.value else { continue };
        match entry.key.as_str() {
            "node" => {
                let id = int_field(items, "id", entry.line)?.ok_or(IngestError::Syntax {
                    line: entry.line,
                    message: "node without `id`".into(),
                })?;
                let label = match items.iter().find(|e| e.key == "label").map(|e| &e.value) {
                    None => String::new(),
                    Some(Value::Str(s)) => s.clone(),
                    Some(Value::Int(i)) => i.to_string(),
                    Some(Value::Float(f)) => f.to_string(),
                    Some(Value::List(_)) => {
                        return Err(IngestError::Syntax {
                            line: entry.line,
                            message: "`label` must be a string".into(),
                        })
                    }
                };
                if nodes.insert(id, Node::new(label)).is_some() {
                    return Err(IngestError::Syntax {
                        line: entry.line,
                        message: format!("duplicate node id {id}"),
                    });
                }
            }
            "edge" => {
                let missing = |k: &str| IngestError::Syntax {
                    line: entry.line,
                    message: format!("edge without `{k}`"),
                };
                let source = int_field(items, "source", entry.line)?.ok_or_else(|| missing("source"))?;
                let target = int_field(items, "target", entry.line)?.ok_or_else(|| missing("target"))?;
                let weight = match items.iter().find(|e| e.key == "value").map(|e| &e.value) {
                    None => 1.0,
                    Some(Value::Int(i)) => *i as f64,
                    Some(Value::Float(f)) => *f,
                    Some(_) => {
                        return Err(IngestError::Syntax {
                            line: entry.line,
                            message: "edge `value` must be a number".into(),
                        })
                    }
                };
                if !weight.is_finite() || weight < 0.0 {
                    return Err(IngestError::Syntax {
                        line: entry.line,
                        message: format!("edge weight must be a nonnegative number, found {weight}"),
                    });
                }
                raw_edges.push((source, target, weight, entry.line));
            }
            _ => {}
        }
    }

    let index: BTreeMap<i64, usize> = nodes.keys().enumerate().map(|(i, id)| (*id, i)).collect();
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (source, target, weight, line) in raw_edges {
        let resolve = |id: i64| {
            index
                .get(&id)
                .copied()
                .ok_or(IngestError::DanglingReference { id, line })
        };
        edges.push(Edge::new(resolve(source)?, resolve(target)?, weight));
    }
    let g = DependencyGraph::from_parts(nodes.into_values().collect(), edges, directed).map_err(|e| {
        IngestError::Syntax {
            line: 1,
            message: e.to_string(),
        }
    })?;
    Ok(g.simplify())
}

fn escape(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Writes `g` as GML. Undirected graphs list each pair once; `value` is only
/// written for non-unit weights.
pub fn write_gml(g: &DependencyGraph) -> String {
    let mut out = String::from("graph [\n");
    let _ = writeln!(out, "  directed {}", u8::from(g.is_directed()));
    for (i, node) in g.nodes().iter().enumerate() {
        let _ = writeln!(out, "  node [\n    id {i}\n    label \"{}\"\n  ]", escape(&node.label));
    }
    for e in g.edges() {
        if !g.is_directed() && e.source > e.target {
            continue;
        }
        let _ = write!(out, "  edge [\n    source {}\n    target {}\n", e.source, e.target);
        if e.weight != 1.0 {
            let _ = writeln!(out, "    value {}", e.weight);
        }
        out.push_str("  ]\n");
    }
    out.push_str("]\n");
    out
}
