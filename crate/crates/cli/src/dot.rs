//! Graphviz DOT rendering of a network, its readings, and the verdicts.
//!
//! Sensors become labeled nodes and 1-cells become edges. DOT has no native
//! notion of a higher cell, so cells of dimension >= 2 appear as labeled
//! comment lines and their boundary edges are drawn thick. Inconsistent
//! elements are styled distinctly and tagged with the word "inconsistent".

use std::collections::BTreeSet;
use std::fmt::Write;

use sensheaf::Complex;

use crate::error::CliError;
use crate::problem::ProblemDocument;
use crate::report::ReportDocument;

pub fn export_dot(
    problem: &ProblemDocument,
    report: &ReportDocument,
    cell_budget: usize,
) -> Result<String, CliError> {
    let complex = Complex::build(problem.network.clone());
    let cells = complex.enumerate_cells(cell_budget).map_err(CliError::Analysis)?;
    let bad: BTreeSet<&Vec<String>> = report.bad_cells.iter().collect();

    let edges: Vec<Vec<String>> = cells
        .iter()
        .filter(|c| c.dimension() == 1)
        .map(|c| c.vertices().iter().map(|v| v.as_str().to_string()).collect())
        .collect();
    let higher: Vec<Vec<String>> = cells
        .iter()
        .filter(|c| c.dimension() >= 2)
        .map(|c| c.vertices().iter().map(|v| v.as_str().to_string()).collect())
        .collect();

    // boundary edges of higher cells are drawn thick
    let mut thick: BTreeSet<Vec<String>> = BTreeSet::new();
    for cell in &higher {
        for i in 0..cell.len() {
            for j in (i + 1)..cell.len() {
                thick.insert(vec![cell[i].clone(), cell[j].clone()]);
            }
        }
    }

    let mut out = String::from("graph sensor_network {\n");
    if !problem.network.is_empty() {
        out.push_str("  node [shape=box];\n");
    }
    for (vertex, _) in problem.network.iter() {
        let section = problem.assignment.section(vertex).expect("assignment is total");
        let mut label = vertex.as_str().to_string();
        if !section.is_empty() {
            let values: Vec<String> = section
                .iter()
                .map(|(x, value)| format!("{}={}", x.as_str(), value))
                .collect();
            label.push_str("\\n(");
            label.push_str(&values.join(", "));
            label.push(')');
        }
        writeln!(out, "  \"{}\" [label=\"{}\"];", escape(vertex.as_str()), escape_label(&label))
            .expect("writing to String");
    }
    for edge in &edges {
        let mut attrs: Vec<&str> = Vec::new();
        if thick.contains(edge) {
            attrs.push("penwidth=2");
        }
        let is_bad = bad.contains(edge);
        if is_bad {
            attrs.push("color=red");
            attrs.push("style=dashed");
        }
        let attr_text = if attrs.is_empty() {
            String::new()
        } else {
            format!(" [{}]", attrs.join(", "))
        };
        let suffix = if is_bad { "  // inconsistent" } else { "" };
        writeln!(
            out,
            "  \"{}\" -- \"{}\"{};{}",
            escape(&edge[0]),
            escape(&edge[1]),
            attr_text,
            suffix
        )
        .expect("writing to String");
    }
    for cell in &higher {
        let marker = if bad.contains(cell) { " (inconsistent)" } else { "" };
        writeln!(
            out,
            "  // {}-cell {{{}}}{}",
            cell.len() - 1,
            cell.join(", "),
            marker
        )
        .expect("writing to String");
    }
    out.push_str("}\n");
    Ok(out)
}

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

// labels already contain intentional \n separators, so only quotes need care
fn escape_label(text: &str) -> String {
    text.replace('"', "\\\"")
}
