//! Graph file formats.

mod gml;
mod json;

use std::path::Path;

use repkg_core::DependencyGraph;
use thiserror::Error;

pub use gml::{parse_gml, write_gml};
pub use json::{parse_json, write_json, GraphDocument};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: edge references unknown node id {id}")]
    DanglingReference { id: i64, line: usize },
    #[error("field `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("input is empty")]
    Empty,
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Gml,
    Json,
    Auto,
}

impl Format {
    /// Resolves `Auto` from the file extension, then from the content.
    pub fn resolve(self, path: Option<&Path>, text: &str) -> Format {
        if self != Format::Auto {
            return self;
        }
        let ext = path
            .and_then(|p| p.extension())
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("gml") => Format::Gml,
            Some("json") => Format::Json,
            _ if text.trim_start().starts_with('{') => Format::Json,
            _ => Format::Gml,
        }
    }
}

pub fn parse(text: &str, format: Format, path: Option<&Path>) -> Result<DependencyGraph, IngestError> {
    match format.resolve(path, text) {
        Format::Json => parse_json(text),
        _ => parse_gml(text),
    }
}

pub fn read_graph(path: &Path, format: Format) -> Result<DependencyGraph, IngestError> {
    let text = std::fs::read_to_string(path)?;
    parse(&text, format, Some(path))
}
