use thiserror::Error;

use crate::complex::{Cell, VariableId, VertexId};
use crate::sheaf::Value;

/// Errors raised by complex construction, sheaf operations, consistency
/// evaluation, and the maximal-section engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("labels must be nonempty")]
    EmptyLabel,

    #[error("duplicate sensor label {0}")]
    DuplicateVertex(VertexId),

    #[error("unknown sensor {0}")]
    UnknownVertex(VertexId),

    #[error("a cell needs at least one vertex")]
    EmptyCell,

    #[error("{0} is not a cell of this complex")]
    NotACell(Cell),

    #[error("{cell} has dimension 0; consistency is only defined on cells of dimension >= 1")]
    ZeroDimensionalCell { cell: Cell },

    #[error("cell budget {budget} exceeded while expanding a variable support of {support_size} sensors")]
    CellBudgetExceeded { budget: usize, support_size: usize },

    #[error("real values must be finite, got {0}")]
    NonFiniteReal(f64),

    #[error("cannot restrict: {variable} is outside the section's domain")]
    RestrictionOutsideDomain { variable: VariableId },

    #[error("cannot glue: sections disagree at {variable} (values {})", fmt_values(.values))]
    GluingConflict {
        variable: VariableId,
        values: Vec<Value>,
    },

    #[error("assignment keys do not match the network (missing {missing:?}, extra {extra:?})")]
    AssignmentVertexMismatch {
        missing: Vec<VertexId>,
        extra: Vec<VertexId>,
    },

    #[error("assignment for {vertex} does not cover its observed variables exactly (missing {missing:?}, extra {extra:?})")]
    AssignmentDomainMismatch {
        vertex: VertexId,
        missing: Vec<VariableId>,
        extra: Vec<VariableId>,
    },

    #[error("{vertex} is not a vertex of {cell}")]
    VertexNotInCell { vertex: VertexId, cell: Cell },

    #[error("tolerance for {variable} must be finite and nonnegative, got {value}")]
    InvalidTolerance { variable: VariableId, value: f64 },

    #[error("non-numeric value for {variable} on {cell}; tolerance comparison needs numeric data")]
    NonNumericValue { variable: VariableId, cell: Cell },

    #[error("bad cell {cell} mentions {vertex}, which is outside the vertex set under analysis")]
    BadCellOutsideVertices { cell: Cell, vertex: VertexId },

    #[error("exhaustive oracle supports at most {limit} vertices, got {vertices}")]
    OracleLimitExceeded { vertices: usize, limit: usize },
}

fn fmt_values(values: &[Value]) -> String {
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    parts.join(", ")
}
