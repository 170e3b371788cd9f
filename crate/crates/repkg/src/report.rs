//! JSON and plain-text renderings of analysis and refactoring results.

use std::fmt::Write as _;

use repkg_core::membership::ensure_labels;
use repkg_core::metrics::{
    instability_report, main_sequence_distance, package_abstractness, sdp_violations, zone, Zone,
};
use repkg_core::modularity::modularity_directed;
use repkg_core::refactor::{compare_report, refactor, ComparisonRow};
use repkg_core::{
    membership_from_labels, DependencyGraph, Error, InstabilityReport, Mode, RefactorResult, SdpViolation,
};
use serde::Serialize;

/// Rounds to `digits` decimals; negative zero becomes zero.
pub fn round_to(x: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits);
    (x * scale).round() / scale + 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstabilityRow {
    pub package: String,
    pub ca: usize,
    pub ce: usize,
    pub instability: f64,
}

pub fn instability_rows(report: &InstabilityReport) -> Vec<InstabilityRow> {
    report
        .rows
        .iter()
        .map(|r| InstabilityRow {
            package: r.package.clone(),
            ca: r.afferent,
            ce: r.efferent,
            instability: round_to(r.instability, 3),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationRow {
    pub source: String,
    pub target: String,
    #[serde(rename = "sourceInstability")]
    pub source_instability: f64,
    #[serde(rename = "targetInstability")]
    pub target_instability: f64,
    pub witnesses: Vec<[String; 2]>,
}

impl From<&SdpViolation> for ViolationRow {
    fn from(v: &SdpViolation) -> Self {
        ViolationRow {
            source: v.source.clone(),
            target: v.target.clone(),
            source_instability: round_to(v.source_instability, 3),
            target_instability: round_to(v.target_instability, 3),
            witnesses: v.witnesses.iter().map(|(a, b)| [a.clone(), b.clone()]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AbstractnessRow {
    pub package: String,
    pub abstractness: f64,
    pub distance: f64,
    pub normalized_distance: f64,
    pub zone: &'static str,
}

/// Everything `repkg analyze` reports for the label-derived packaging.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub packages: usize,
    pub classes: usize,
    pub modularity: f64,
    pub instability: Vec<InstabilityRow>,
    pub violations: Vec<ViolationRow>,
    pub abstractness: Vec<AbstractnessRow>,
}

fn zone_name(z: Zone) -> &'static str {
    match z {
        Zone::Pain => "pain",
        Zone::Uselessness => "uselessness",
        Zone::MainSequence => "main-sequence",
    }
}

pub fn analyze(g: &DependencyGraph) -> Result<Analysis, Error> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let g = ensure_labels(&g.simplify());
    let (m, table) = membership_from_labels(&g);
    let q = modularity_directed(&g, &m)?;
    let report = instability_report(&g, &m, &table)?;
    let violations = sdp_violations(&g, &m, &table)?;
    let abstractness = package_abstractness(&g, &m, &table)?
        .into_iter()
        .filter_map(|(package, a)| {
            let a = a?;
            let i = report.get(&package)?.instability;
            let d = main_sequence_distance(a, i);
            Some(AbstractnessRow {
                package,
                abstractness: round_to(a, 3),
                distance: round_to(d.distance, 3),
                normalized_distance: round_to(d.normalized, 3),
                zone: zone_name(zone(a, i)),
            })
        })
        .collect();
    Ok(Analysis {
        packages: m.community_count(),
        classes: g.node_count(),
        modularity: q.value,
        instability: instability_rows(&report),
        violations: violations.iter().map(ViolationRow::from).collect(),
        abstractness,
    })
}

pub fn analysis_table(a: &Analysis) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "packages: {}, classes: {}", a.packages, a.classes);
    let _ = writeln!(out, "modularity (directed): {:.2}", round_to(a.modularity, 2));
    out.push('\n');
    out.push_str(&instability_table(&a.instability));
    out.push('\n');
    if a.violations.is_empty() {
        out.push_str("stable dependencies: no violations\n");
    } else {
        let _ = writeln!(out, "stable dependencies: {} violation(s)", a.violations.len());
        for v in &a.violations {
            let _ = writeln!(
                out,
                "  {} ({:.3}) -> {} ({:.3})",
                v.source, v.source_instability, v.target, v.target_instability
            );
            for [x, y] in &v.witnesses {
                let _ = writeln!(out, "    {x} -> {y}");
            }
        }
    }
    if !a.abstractness.is_empty() {
        out.push('\n');
        let width = name_width(a.abstractness.iter().map(|r| r.package.as_str()));
        let _ = writeln!(out, "{:<width$}  {:>5}  {:>5}  {:>5}  zone", "package", "A", "D", "D'");
        for r in &a.abstractness {
            let _ = writeln!(
                out,
                "{:<width$}  {:>5.3}  {:>5.3}  {:>5.3}  {}",
                r.package, r.abstractness, r.distance, r.normalized_distance, r.zone
            );
        }
    }
    out
}

fn name_width<'a>(names: impl Iterator<Item = &'a str>) -> usize {
    names.map(|n| n.chars().count()).max().unwrap_or(0).max("package".len())
}

pub fn instability_table(rows: &[InstabilityRow]) -> String {
    let width = name_width(rows.iter().map(|r| r.package.as_str()));
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>4}  {:>4}  {:>5}", "package", "Ca", "Ce", "I");
    for r in rows {
        let _ = writeln!(
            out,
            "{:<width$}  {:>4}  {:>4}  {:>5.3}",
            r.package, r.ca, r.ce, r.instability
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MovementRow {
    pub class: String,
    pub label: String,
    pub from: String,
    pub to: String,
}

/// Serialized [`RefactorResult`]. `membership` holds package ids indexing
/// `packages`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RefactorSummary {
    pub mode: &'static str,
    pub initial_q: f64,
    pub final_q: f64,
    pub final_q_exact: f64,
    pub membership: Vec<usize>,
    pub packages: Vec<String>,
    pub movements: Vec<MovementRow>,
}

impl From<&RefactorResult> for RefactorSummary {
    fn from(r: &RefactorResult) -> Self {
        RefactorSummary {
            mode: r.mode.as_str(),
            initial_q: round_to(r.initial_q, 2),
            final_q: round_to(r.final_q, 2),
            final_q_exact: r.final_q,
            membership: r.membership.assignment().to_vec(),
            packages: r.packages.names().to_vec(),
            movements: movement_rows(r),
        }
    }
}

pub fn movement_rows(r: &RefactorResult) -> Vec<MovementRow> {
    r.movements
        .iter()
        .map(|m| MovementRow {
            class: m.class_name().to_string(),
            label: m.class_label.clone(),
            from: m.from.clone(),
            to: m.to.clone(),
        })
        .collect()
}

pub fn movement_sentence(class: &str, from: &str, to: &str) -> String {
    format!("Move class {class} from package {from} to package {to}")
}

/// OI/DI/UI row; `None` marks a package emptied by the refactoring.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonJson {
    pub package: String,
    #[serde(rename = "OI")]
    pub original: Option<f64>,
    #[serde(rename = "DI")]
    pub directed: Option<f64>,
    #[serde(rename = "UI")]
    pub undirected: Option<f64>,
}

impl From<&ComparisonRow> for ComparisonJson {
    fn from(r: &ComparisonRow) -> Self {
        let round = |x: Option<f64>| x.map(|v| round_to(v, 3));
        ComparisonJson {
            package: r.package.clone(),
            original: round(r.original),
            directed: round(r.directed),
            undirected: round(r.undirected),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BothSummary {
    pub directed: RefactorSummary,
    pub undirected: RefactorSummary,
    pub comparison: Vec<ComparisonJson>,
}

/// Output of `repkg refactor` for one or both modes.
#[derive(Debug, Clone, PartialEq)]
pub enum RefactorOutput {
    Single(RefactorResult),
    Both {
        directed: RefactorResult,
        undirected: RefactorResult,
        comparison: Vec<ComparisonRow>,
    },
}

/// Instability of each package after `r`, measured on the original
/// dependency directions.
pub fn refactored_instability(g: &DependencyGraph, r: &RefactorResult) -> Result<InstabilityReport, Error> {
    instability_report(&ensure_labels(&g.simplify()), &r.membership, &r.packages)
}

pub fn run_refactor(g: &DependencyGraph, modes: &[Mode]) -> Result<RefactorOutput, Error> {
    match modes {
        [mode] => Ok(RefactorOutput::Single(refactor(g, *mode)?)),
        _ => {
            let directed = refactor(g, Mode::Directed)?;
            let undirected = refactor(g, Mode::Undirected)?;
            let labeled = ensure_labels(&g.simplify());
            let original = instability_report(&labeled, &directed.initial_membership, &directed.packages)?;
            let comparison = compare_report(
                &original,
                &refactored_instability(g, &directed)?,
                &refactored_instability(g, &undirected)?,
            );
            Ok(RefactorOutput::Both {
                directed,
                undirected,
                comparison,
            })
        }
    }
}

pub fn refactor_json(out: &RefactorOutput) -> String {
    let text = match out {
        RefactorOutput::Single(r) => serde_json::to_string_pretty(&RefactorSummary::from(r)),
        RefactorOutput::Both {
            directed,
            undirected,
            comparison,
        } => serde_json::to_string_pretty(&BothSummary {
            directed: directed.into(),
            undirected: undirected.into(),
            comparison: comparison.iter().map(ComparisonJson::from).collect(),
        }),
    };
    text.expect("summaries always serialize")
}

fn result_table(out: &mut String, r: &RefactorResult) {
    let _ = writeln!(out, "mode: {}", r.mode.as_str());
    let _ = writeln!(out, "initial Q: {:.2}", round_to(r.initial_q, 2));
    let _ = writeln!(out, "final Q: {:.2}", round_to(r.final_q, 2));
    if r.movements.is_empty() {
        out.push_str("no movements suggested\n");
    }
    for m in &r.movements {
        let _ = writeln!(out, "{}", movement_sentence(m.class_name(), &m.from, &m.to));
    }
}

pub fn comparison_table(rows: &[ComparisonRow]) -> String {
    let width = name_width(rows.iter().map(|r| r.package.as_str()));
    let cell = |x: Option<f64>| x.map_or_else(|| "absent".to_string(), |v| format!("{:.3}", round_to(v, 3)));
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>6}  {:>6}  {:>6}", "package", "OI", "DI", "UI");
    for r in rows {
        let _ = writeln!(
            out,
            "{:<width$}  {:>6}  {:>6}  {:>6}",
            r.package,
            cell(r.original),
            cell(r.directed),
            cell(r.undirected)
        );
    }
    out
}

pub fn refactor_table(out: &RefactorOutput) -> String {
    let mut text = String::new();
    match out {
        RefactorOutput::Single(r) => result_table(&mut text, r),
        RefactorOutput::Both {
            directed,
            undirected,
            comparison,
        } => {
            result_table(&mut text, directed);
            text.push('\n');
            result_table(&mut text, undirected);
            text.push('\n');
            text.push_str(&comparison_table(comparison));
        }
    }
    text
}
