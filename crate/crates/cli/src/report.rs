//! Report documents for the analyze, check, and oracle commands.
//!
//! Field order of the JSON output is fixed by struct order here; all
//! collections iterate in their deterministic sorted orders, so a given
//! input always produces the same report bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use sensheaf::{consistency, sections, AnalysisResult, AnalyzeOptions, Cell, Complex};

use crate::error::CliError;
use crate::problem::{value_to_json, ProblemDocument};

/// Result of an analyze or oracle run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub sections: Vec<SectionReport>,
    pub bad_cells: Vec<Vec<String>>,
    pub minimal_bad_cells: Vec<Vec<String>>,
    pub complex_summary: ComplexSummary,
    pub structure: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionReport {
    pub vertices: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub glued: Option<BTreeMap<String, Json>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexSummary {
    pub cell_count_by_dimension: BTreeMap<usize, usize>,
}

/// Per-cell verdict table produced by the check command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub verdicts: Vec<VerdictEntry>,
    pub complex_summary: ComplexSummary,
    pub structure: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictEntry {
    pub cell: Vec<String>,
    pub consistent: bool,
}

/// Full pipeline: bad cells, maximal consistent sections, glued values.
pub fn run_analyze(
    problem: &ProblemDocument,
    options: AnalyzeOptions,
) -> Result<ReportDocument, CliError> {
    let structure = problem.structure.build()?;
    let result = sections::analyze(
        &problem.network,
        &problem.assignment,
        structure.as_ref(),
        options,
    )
    .map_err(CliError::Analysis)?;
    build_report(problem, &result, options.cell_budget)
}

/// Same report as [`run_analyze`], but the maximal sets come from the
/// exhaustive oracle instead of the worklist engine.
pub fn run_oracle(
    problem: &ProblemDocument,
    options: AnalyzeOptions,
) -> Result<ReportDocument, CliError> {
    let structure = problem.structure.build()?;
    let complex = Complex::build(problem.network.clone());
    let bad = consistency::bad_cells(
        structure.as_ref(),
        &complex,
        &problem.assignment,
        options.cell_budget,
    )
    .map_err(CliError::Analysis)?;
    let minimal = consistency::minimal_bad_cells(&bad);
    let sets = sections::oracle_maximal_sets(&problem.network.vertex_set(), &minimal)
        .map_err(CliError::Analysis)?;
    let glue_applied = options.glue && structure.admits_gluing();
    let maximal_sections = if glue_applied {
        sections::glue_maximal_sections(&problem.assignment, &sets).map_err(CliError::Analysis)?
    } else {
        sets.into_iter()
            .map(|vertex_set| sensheaf::MaximalSection {
                vertex_set,
                glued: None,
            })
            .collect()
    };
    let result = AnalysisResult {
        sections: maximal_sections,
        bad_cells: bad,
        structure_name: structure.name().to_string(),
        glue_applied,
    };
    build_report(problem, &result, options.cell_budget)
}

/// Per-cell verdicts only; no section computation.
pub fn run_check(
    problem: &ProblemDocument,
    options: AnalyzeOptions,
) -> Result<VerdictReport, CliError> {
    let structure = problem.structure.build()?;
    let complex = Complex::build(problem.network.clone());
    let verdicts = consistency::verdicts(
        structure.as_ref(),
        &complex,
        &problem.assignment,
        options.cell_budget,
    )
    .map_err(CliError::Analysis)?;
    Ok(VerdictReport {
        verdicts: verdicts
            .into_iter()
            .map(|v| VerdictEntry {
                cell: cell_labels(&v.cell),
                consistent: v.consistent,
            })
            .collect(),
        complex_summary: summarize(&complex, options.cell_budget)?,
        structure: structure.name().to_string(),
    })
}

fn build_report(
    problem: &ProblemDocument,
    result: &AnalysisResult,
    budget: usize,
) -> Result<ReportDocument, CliError> {
    let complex = Complex::build(problem.network.clone());
    Ok(ReportDocument {
        sections: result
            .sections
            .iter()
            .map(|section| SectionReport {
                vertices: section
                    .vertex_set
                    .iter()
                    .map(|v| v.as_str().to_string())
                    .collect(),
                glued: section.glued.as_ref().map(|glued| {
                    glued
                        .iter()
                        .map(|(x, value)| (x.as_str().to_string(), value_to_json(value)))
                        .collect()
                }),
            })
            .collect(),
        bad_cells: result.bad_cells.iter().map(cell_labels).collect(),
        minimal_bad_cells: consistency::minimal_bad_cells(&result.bad_cells)
            .iter()
            .map(cell_labels)
            .collect(),
        complex_summary: summarize(&complex, budget)?,
        structure: result.structure_name.clone(),
    })
}

fn summarize(complex: &Complex, budget: usize) -> Result<ComplexSummary, CliError> {
    let mut cell_count_by_dimension = BTreeMap::new();
    for cell in complex.enumerate_cells(budget).map_err(CliError::Analysis)? {
        *cell_count_by_dimension.entry(cell.dimension()).or_insert(0) += 1;
    }
    Ok(ComplexSummary {
        cell_count_by_dimension,
    })
}

fn cell_labels(cell: &Cell) -> Vec<String> {
    cell.vertices()
        .iter()
        .map(|v| v.as_str().to_string())
        .collect()
}

/// Renders a report as the CLI prints it: pretty JSON plus a newline.
pub fn to_json_text<T: Serialize>(report: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}
