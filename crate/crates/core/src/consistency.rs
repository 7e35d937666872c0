//! Consistency structures: pluggable boolean predicates on cells.
//!
//! A structure judges, for each cell of dimension >= 1, the family of
//! per-vertex sections restricted to the cell's shared variables. 0-cells
//! are axiomatically consistent and never evaluated. Three structures are
//! built in: exact agreement, agreement on at least one shared variable,
//! and numeric agreement within per-variable tolerances.

use std::collections::{BTreeMap, BTreeSet};

use crate::complex::{Cell, Complex, VariableId};
use crate::error::Error;
use crate::sheaf::{Assignment, Section, Value};

/// A family of per-cell consistency predicates.
///
/// Implementations must be pure: the verdict may depend only on the
/// arguments, never on evaluation order or external state. The analysis
/// pipeline evaluates each cell exactly once and treats the verdict as
/// final.
pub trait ConsistencyStructure {
    /// Name used in reports.
    fn name(&self) -> &str;

    /// Whether a true verdict means the restricted sections are all equal,
    /// so that a consistent subcomplex admits a glued local section. Only
    /// structures with exact-agreement semantics should return true.
    fn admits_gluing(&self) -> bool {
        false
    }

    /// Judges one cell. `restricted` holds the per-vertex sections over
    /// `shared` (the cell's shared variables), in the cell's sorted vertex
    /// order.
    fn evaluate(
        &self,
        cell: &Cell,
        shared: &BTreeSet<VariableId>,
        restricted: &[Section],
    ) -> Result<bool, Error>;
}

/// Exact agreement: a cell is consistent iff every vertex restricts to one
/// identical section on the shared variables.
#[derive(Clone, Copy, Debug, Default)]
pub struct Standard;

impl ConsistencyStructure for Standard {
    fn name(&self) -> &str {
        "standard"
    }

    fn admits_gluing(&self) -> bool {
        true
    }

    fn evaluate(
        &self,
        _cell: &Cell,
        _shared: &BTreeSet<VariableId>,
        restricted: &[Section],
    ) -> Result<bool, Error> {
        Ok(restricted.windows(2).all(|pair| pair[0] == pair[1]))
    }
}

/// Consistent iff the vertices agree on at least one shared variable.
#[derive(Clone, Copy, Debug, Default)]
pub struct AgreeAny;

impl ConsistencyStructure for AgreeAny {
    fn name(&self) -> &str {
        "agree_any"
    }

    fn evaluate(
        &self,
        _cell: &Cell,
        shared: &BTreeSet<VariableId>,
        restricted: &[Section],
    ) -> Result<bool, Error> {
        Ok(shared.iter().any(|variable| {
            let mut values = restricted.iter().map(|s| s.value(variable));
            match values.next() {
                Some(first) => values.all(|v| v == first),
                None => false,
            }
        }))
    }
}

/// Numeric agreement within a per-variable tolerance: a cell is consistent
/// iff for every shared variable the spread (max minus min) stays within
/// that variable's tolerance. Variables without an entry get tolerance
/// zero, and non-numeric values are a type error rather than a verdict.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Tolerance {
    tolerances: BTreeMap<VariableId, f64>,
}

impl Tolerance {
    pub fn new(tolerances: BTreeMap<VariableId, f64>) -> Result<Self, Error> {
        for (variable, &value) in &tolerances {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidTolerance {
                    variable: variable.clone(),
                    value,
                });
            }
        }
        Ok(Self { tolerances })
    }

    fn tolerance(&self, variable: &VariableId) -> f64 {
        self.tolerances.get(variable).copied().unwrap_or(0.0)
    }
}

impl ConsistencyStructure for Tolerance {
    fn name(&self) -> &str {
        "tolerance"
    }

    fn evaluate(
        &self,
        cell: &Cell,
        shared: &BTreeSet<VariableId>,
        restricted: &[Section],
    ) -> Result<bool, Error> {
        // Type-check everything first so an error is never masked by an
        // inconsistency found on an earlier variable.
        for variable in shared {
            for section in restricted {
                let value = section.value(variable);
                if !value.map(Value::is_numeric).unwrap_or(false) {
                    return Err(Error::NonNumericValue {
                        variable: variable.clone(),
                        cell: cell.clone(),
                    });
                }
            }
        }
        for variable in shared {
            let within = if restricted
                .iter()
                .all(|s| matches!(s.value(variable), Some(Value::Int(_))))
            {
                // integer-only spread computed exactly
                let ints = restricted.iter().map(|s| match s.value(variable) {
                    Some(Value::Int(i)) => *i as i128,
                    _ => unreachable!("type-checked above"),
                });
                let (min, max) = min_max(ints);
                (max - min) as f64 <= self.tolerance(variable)
            } else {
                let reals = restricted
                    .iter()
                    .map(|s| s.value(variable).and_then(Value::as_f64).expect("numeric"));
                let (min, max) = min_max(reals);
                max - min <= self.tolerance(variable)
            };
            if !within {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn min_max<T: PartialOrd + Copy>(values: impl Iterator<Item = T>) -> (T, T) {
    let mut values = values;
    let first = values.next().expect("cells have at least one vertex");
    values.fold((first, first), |(min, max), v| {
        (
            if v < min { v } else { min },
            if v > max { v } else { max },
        )
    })
}

/// Verdict for one evaluated cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellVerdict {
    pub cell: Cell,
    pub consistent: bool,
}

/// Evaluates one cell of dimension >= 1: restricts every vertex's section to
/// the shared variables and applies the structure.
pub fn eval_cell(
    structure: &dyn ConsistencyStructure,
    complex: &Complex,
    assignment: &Assignment,
    cell: &Cell,
) -> Result<bool, Error> {
    if cell.dimension() == 0 {
        return Err(Error::ZeroDimensionalCell { cell: cell.clone() });
    }
    let shared = complex.cell_variables(cell)?;
    let restricted = restricted_sections(assignment, cell, &shared)?;
    structure.evaluate(cell, &shared, &restricted)
}

/// Verdicts for every cell of dimension >= 1, in (dimension, lexicographic)
/// order. Each cell is evaluated exactly once.
pub fn verdicts(
    structure: &dyn ConsistencyStructure,
    complex: &Complex,
    assignment: &Assignment,
    budget: usize,
) -> Result<Vec<CellVerdict>, Error> {
    let mut out = Vec::new();
    for cell in complex.enumerate_cells(budget)? {
        if cell.dimension() == 0 {
            continue;
        }
        let shared = complex.cell_variables(&cell)?;
        let restricted = restricted_sections(assignment, &cell, &shared)?;
        let consistent = structure.evaluate(&cell, &shared, &restricted)?;
        out.push(CellVerdict { cell, consistent });
    }
    Ok(out)
}

/// The cells of dimension >= 1 on which the assignment is inconsistent,
/// in (dimension, lexicographic) order.
pub fn bad_cells(
    structure: &dyn ConsistencyStructure,
    complex: &Complex,
    assignment: &Assignment,
    budget: usize,
) -> Result<Vec<Cell>, Error> {
    Ok(verdicts(structure, complex, assignment, budget)?
        .into_iter()
        .filter(|v| !v.consistent)
        .map(|v| v.cell)
        .collect())
}

/// Inclusion-minimal members of `bad`, sorted. A vertex set avoids every
/// bad cell iff it avoids the minimal ones, so the section engine only
/// needs these.
pub fn minimal_bad_cells(bad: &[Cell]) -> Vec<Cell> {
    let unique: BTreeSet<&Cell> = bad.iter().collect();
    unique
        .iter()
        .filter(|cell| {
            !unique
                .iter()
                .any(|other| other != *cell && other.is_face_of(cell))
        })
        .map(|cell| (*cell).clone())
        .collect()
}

fn restricted_sections(
    assignment: &Assignment,
    cell: &Cell,
    shared: &BTreeSet<VariableId>,
) -> Result<Vec<Section>, Error> {
    cell.vertices()
        .iter()
        .map(|vertex| {
            let section = assignment
                .section(vertex)
                .ok_or_else(|| Error::UnknownVertex(vertex.clone()))?;
            section.restrict(shared)
        })
        .collect()
}
