//! Sections of the sheaf of data assignments, with projection restriction
//! maps and gluing.
//!
//! A section assigns one value to each variable in its domain. Restriction
//! drops variables outside a subdomain, and gluing merges sections that
//! agree on every shared variable. Equality of sections is variable-wise
//! and exact; approximate comparison is the business of consistency
//! structures, not of the sheaf.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::complex::{Cell, Complex, SensorNetwork, VariableId, VertexId};
use crate::error::Error;

/// A single data value.
///
/// Equality is exact per tag and never coerces across tags: the integer 1
/// and the real 1.0 are different values. Construct reals through
/// [`Value::real`], which rejects NaN and infinities so that equality and
/// ordering stay total.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
}

impl Value {
    /// A finite real value.
    pub fn real(value: f64) -> Result<Self, Error> {
        if !value.is_finite() {
            return Err(Error::NonFiniteReal(value));
        }
        Ok(Self::Real(value))
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Self::Int(_) | Self::Real(_))
    }

    /// Numeric view, for tolerance comparisons.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Self::Int(i) => Some(*i as f64),
            Self::Real(r) => Some(*r),
            _ => None,
        }
    }
}

// Finite by construction, so equality is reflexive.
impl Eq for Value {}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        use Value::*;
        fn rank(v: &Value) -> u8 {
            match v {
                Int(_) => 0,
                Real(_) => 1,
                Text(_) => 2,
                Bool(_) => 3,
            }
        }
        match (self, other) {
            (Int(a), Int(b)) => a.cmp(b),
            (Real(a), Real(b)) => a.total_cmp(b),
            (Text(a), Text(b)) => a.cmp(b),
            (Bool(a), Bool(b)) => a.cmp(b),
            _ => rank(self).cmp(&rank(other)).then(Ordering::Equal),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            // Debug formatting keeps the decimal point ("2.0", not "2"),
            // so real and integer values stay distinguishable.
            Value::Real(r) => write!(f, "{r:?}"),
            Value::Text(s) => write!(f, "{s:?}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl From<i64> for Value {
    fn from(value: i64) -> Self {
        Self::Int(value)
    }
}

impl From<bool> for Value {
    fn from(value: bool) -> Self {
        Self::Bool(value)
    }
}

impl From<&str> for Value {
    fn from(value: &str) -> Self {
        Self::Text(value.to_string())
    }
}

/// A section: exactly one value for each variable in its domain. The domain
/// is the key set of the value map, so the two cannot drift apart.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Section {
    values: BTreeMap<VariableId, Value>,
}

impl Section {
    pub fn new(values: BTreeMap<VariableId, Value>) -> Self {
        Self { values }
    }

    /// The section over the empty domain.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn domain(&self) -> BTreeSet<VariableId> {
        self.values.keys().cloned().collect()
    }

    pub fn value(&self, variable: &VariableId) -> Option<&Value> {
        self.values.get(variable)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VariableId, &Value)> {
        self.values.iter()
    }

    /// Projection restriction: the section over `subdomain` agreeing with
    /// this one. Fails if `subdomain` is not contained in the domain.
    pub fn restrict(&self, subdomain: &BTreeSet<VariableId>) -> Result<Section, Error> {
        for variable in subdomain {
            if !self.values.contains_key(variable) {
                return Err(Error::RestrictionOutsideDomain {
                    variable: variable.clone(),
                });
            }
        }
        Ok(Section {
            values: self
                .values
                .iter()
                .filter(|(x, _)| subdomain.contains(*x))
                .map(|(x, v)| (x.clone(), v.clone()))
                .collect(),
        })
    }
}

impl FromIterator<(VariableId, Value)> for Section {
    fn from_iter<T: IntoIterator<Item = (VariableId, Value)>>(iter: T) -> Self {
        Self {
            values: iter.into_iter().collect(),
        }
    }
}

/// An assignment φ: one section over D(v) for every sensor v of a network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    per_vertex: BTreeMap<VertexId, Section>,
}

impl Assignment {
    /// Validates totality against `network`: the map must cover exactly the
    /// network's sensors, and each section's domain must equal that sensor's
    /// observed variables.
    pub fn new(
        network: &SensorNetwork,
        per_vertex: BTreeMap<VertexId, Section>,
    ) -> Result<Self, Error> {
        let missing: Vec<VertexId> = network
            .vertices()
            .filter(|v| !per_vertex.contains_key(v))
            .cloned()
            .collect();
        let extra: Vec<VertexId> = per_vertex
            .keys()
            .filter(|v| !network.contains(v))
            .cloned()
            .collect();
        if !missing.is_empty() || !extra.is_empty() {
            return Err(Error::AssignmentVertexMismatch { missing, extra });
        }
        for (vertex, section) in &per_vertex {
            let observed = network.observed(vertex).expect("checked above");
            let domain = section.domain();
            if &domain != observed {
                return Err(Error::AssignmentDomainMismatch {
                    vertex: vertex.clone(),
                    missing: observed.difference(&domain).cloned().collect(),
                    extra: domain.difference(observed).cloned().collect(),
                });
            }
        }
        Ok(Self { per_vertex })
    }

    pub fn section(&self, vertex: &VertexId) -> Option<&Section> {
        self.per_vertex.get(vertex)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, &Section)> {
        self.per_vertex.iter()
    }
}

/// φ(v) restricted to the variables shared on `cell`, which must contain
/// `vertex`. This is the value tuple entry the consistency functions see.
pub fn restrict_to_cell(
    complex: &Complex,
    assignment: &Assignment,
    vertex: &VertexId,
    cell: &Cell,
) -> Result<Section, Error> {
    if !cell.contains(vertex) {
        return Err(Error::VertexNotInCell {
            vertex: vertex.clone(),
            cell: cell.clone(),
        });
    }
    let shared = complex.cell_variables(cell)?;
    let section = assignment
        .section(vertex)
        .ok_or_else(|| Error::UnknownVertex(vertex.clone()))?;
    section.restrict(&shared)
}

/// Glues sections into one over the union of their domains.
///
/// Succeeds iff every variable carries a single value across all pieces
/// defining it; the result then restricts back to each piece, and it is the
/// unique such section. On disagreement the error names the smallest
/// conflicting variable and the full set of values seen there, so the
/// verdict does not depend on the order of the pieces.
pub fn glue(pieces: &[Section]) -> Result<Section, Error> {
    let mut seen: BTreeMap<VariableId, BTreeSet<Value>> = BTreeMap::new();
    for piece in pieces {
        for (variable, value) in piece.iter() {
            seen.entry(variable.clone())
                .or_default()
                .insert(value.clone());
        }
    }
    if let Some((variable, values)) = seen.iter().find(|(_, values)| values.len() > 1) {
        return Err(Error::GluingConflict {
            variable: variable.clone(),
            values: values.iter().cloned().collect(),
        });
    }
    Ok(Section {
        values: seen
            .into_iter()
            .map(|(variable, values)| {
                let value = values.into_iter().next().expect("nonempty by construction");
                (variable, value)
            })
            .collect(),
    })
}
