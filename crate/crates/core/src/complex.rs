//! The abstract simplicial complex generated by shared variables.
//!
//! Sensors are the vertices. A set of sensors spans a cell exactly when all
//! of them observe a common variable, so the complex is the nerve of the
//! per-variable supports. Only the maximal cells are stored; the full cell
//! list is materialized on demand behind a budget, because a variable shared
//! by k sensors contributes 2^k - 1 cells.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::Error;

/// Identifier of a sensor. Ordered by label; every deterministic ordering in
/// the crate derives from this one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(String);

impl VertexId {
    pub fn new(label: impl Into<String>) -> Result<Self, Error> {
        let label = label.into();
        if label.is_empty() {
            return Err(Error::EmptyLabel);
        }
        Ok(Self(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Identifier of an observed variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VariableId(String);

impl VariableId {
    pub fn new(label: impl Into<String>) -> Result<Self, Error> {
        let label = label.into();
        if label.is_empty() {
            return Err(Error::EmptyLabel);
        }
        Ok(Self(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A finite set of sensors together with the variables each one observes.
///
/// Sensors observing no variable at all are allowed; they become isolated
/// 0-cells of the complex.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SensorNetwork {
    observed: BTreeMap<VertexId, BTreeSet<VariableId>>,
}

impl SensorNetwork {
    /// Builds a network from `(sensor, observed variables)` pairs, rejecting
    /// duplicate sensor labels.
    pub fn new(
        sensors: impl IntoIterator<Item = (VertexId, BTreeSet<VariableId>)>,
    ) -> Result<Self, Error> {
        let mut observed = BTreeMap::new();
        for (vertex, variables) in sensors {
            if observed.contains_key(&vertex) {
                return Err(Error::DuplicateVertex(vertex));
            }
            observed.insert(vertex, variables);
        }
        Ok(Self { observed })
    }

    pub fn is_empty(&self) -> bool {
        self.observed.is_empty()
    }

    pub fn len(&self) -> usize {
        self.observed.len()
    }

    pub fn contains(&self, vertex: &VertexId) -> bool {
        self.observed.contains_key(vertex)
    }

    /// The variables observed by `vertex` (its D(v)), if the vertex exists.
    pub fn observed(&self, vertex: &VertexId) -> Option<&BTreeSet<VariableId>> {
        self.observed.get(vertex)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.observed.keys()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.observed.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, &BTreeSet<VariableId>)> {
        self.observed.iter()
    }

    /// The network on a subset of the sensors, with observations restricted
    /// accordingly.
    fn restricted_to(&self, vertices: &BTreeSet<VertexId>) -> Result<Self, Error> {
        let mut observed = BTreeMap::new();
        for vertex in vertices {
            let variables = self
                .observed
                .get(vertex)
                .ok_or_else(|| Error::UnknownVertex(vertex.clone()))?;
            observed.insert(vertex.clone(), variables.clone());
        }
        Ok(Self { observed })
    }
}

/// A cell of the complex: a nonempty, sorted, duplicate-free set of sensors.
/// A cell on k+1 sensors has dimension k.
///
/// Cells order by dimension first and lexicographically by vertex labels
/// within a dimension, which is the order used by every enumeration and
/// report in the crate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    vertices: Vec<VertexId>,
}

impl Cell {
    pub fn new(vertices: impl IntoIterator<Item = VertexId>) -> Result<Self, Error> {
        let set: BTreeSet<VertexId> = vertices.into_iter().collect();
        if set.is_empty() {
            return Err(Error::EmptyCell);
        }
        Ok(Self {
            vertices: set.into_iter().collect(),
        })
    }

    /// Vertices in sorted order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn contains(&self, vertex: &VertexId) -> bool {
        self.vertices.binary_search(vertex).is_ok()
    }

    /// True when every vertex of `self` belongs to `other`.
    pub fn is_face_of(&self, other: &Cell) -> bool {
        self.vertices.iter().all(|v| other.contains(v))
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.vertices.iter().cloned().collect()
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.vertices
            .len()
            .cmp(&other.vertices.len())
            .then_with(|| self.vertices.cmp(&other.vertices))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// The abstract simplicial complex of a sensor network.
///
/// A vertex set is a cell iff it is a singleton or lies inside the support
/// of some variable. Immutable after construction; all queries are pure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    network: SensorNetwork,
    variable_support: BTreeMap<VariableId, BTreeSet<VertexId>>,
    maximal_cells: Vec<Cell>,
}

impl Complex {
    /// Builds the complex generated by `network`.
    ///
    /// The maximal cells are the inclusion-maximal variable supports plus a
    /// singleton for every sensor that observes nothing.
    pub fn build(network: SensorNetwork) -> Self {
        let mut variable_support: BTreeMap<VariableId, BTreeSet<VertexId>> = BTreeMap::new();
        for (vertex, variables) in network.iter() {
            for variable in variables {
                variable_support
                    .entry(variable.clone())
                    .or_default()
                    .insert(vertex.clone());
            }
        }

        let mut candidates: BTreeSet<BTreeSet<VertexId>> =
            variable_support.values().cloned().collect();
        for (vertex, variables) in network.iter() {
            if variables.is_empty() {
                candidates.insert(BTreeSet::from([vertex.clone()]));
            }
        }

        let maximal_cells = antichain_of_maximal(candidates)
            .into_iter()
            .map(|set| Cell {
                vertices: set.into_iter().collect(),
            })
            .collect::<BTreeSet<Cell>>()
            .into_iter()
            .collect();

        Self {
            network,
            variable_support,
            maximal_cells,
        }
    }

    pub fn network(&self) -> &SensorNetwork {
        &self.network
    }

    /// Maximal cells in (dimension, lexicographic) order; an antichain that
    /// covers every vertex.
    pub fn maximal_cells(&self) -> &[Cell] {
        &self.maximal_cells
    }

    /// Sensors observing `variable`.
    pub fn variable_support(&self, variable: &VariableId) -> Option<&BTreeSet<VertexId>> {
        self.variable_support.get(variable)
    }

    pub fn variables(&self) -> impl Iterator<Item = &VariableId> {
        self.variable_support.keys()
    }

    /// Whether `vertex_set` spans a cell: a singleton always does, a larger
    /// set does iff its members share at least one variable.
    pub fn is_cell(&self, vertex_set: &BTreeSet<VertexId>) -> Result<bool, Error> {
        if vertex_set.is_empty() {
            return Err(Error::EmptyCell);
        }
        for vertex in vertex_set {
            if !self.network.contains(vertex) {
                return Err(Error::UnknownVertex(vertex.clone()));
            }
        }
        if vertex_set.len() == 1 {
            return Ok(true);
        }
        Ok(!self.shared_variables(vertex_set).is_empty())
    }

    /// D(σ): the variables shared by every vertex of `cell`.
    ///
    /// For a 0-cell this is the vertex's own observed set, which may be
    /// empty; for higher cells it is nonempty by the cell condition.
    pub fn cell_variables(&self, cell: &Cell) -> Result<BTreeSet<VariableId>, Error> {
        let vertex_set = cell.vertex_set();
        if !self.is_cell(&vertex_set)? {
            return Err(Error::NotACell(cell.clone()));
        }
        Ok(self.shared_variables(&vertex_set))
    }

    /// The star of `cell`: every cell containing it, itself included. This
    /// is the smallest open set of the Alexandrov topology containing the
    /// cell.
    pub fn star(&self, cell: &Cell) -> Result<BTreeSet<Cell>, Error> {
        let vertex_set = cell.vertex_set();
        if !self.is_cell(&vertex_set)? {
            return Err(Error::NotACell(cell.clone()));
        }
        let mut out = BTreeSet::new();
        for maximal in &self.maximal_cells {
            if !cell.is_face_of(maximal) {
                continue;
            }
            let extras: Vec<&VertexId> = maximal
                .vertices()
                .iter()
                .filter(|v| !cell.contains(v))
                .collect();
            for mask in 0u64..(1u64 << extras.len()) {
                let mut vertices = cell.vertices.clone();
                for (i, extra) in extras.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        vertices.push((*extra).clone());
                    }
                }
                vertices.sort();
                out.insert(Cell { vertices });
            }
        }
        Ok(out)
    }

    /// Every cell of the complex exactly once, in (dimension, lexicographic)
    /// order. Fails with a budget error before materializing more than
    /// `budget` cells.
    pub fn enumerate_cells(&self, budget: usize) -> Result<Vec<Cell>, Error> {
        let mut cells: BTreeSet<Cell> = BTreeSet::new();
        for maximal in &self.maximal_cells {
            let k = maximal.vertices.len();
            let subsets = if k >= 64 {
                u128::MAX
            } else {
                (1u128 << k) - 1
            };
            if subsets > budget as u128 {
                return Err(Error::CellBudgetExceeded {
                    budget,
                    support_size: k,
                });
            }
            for mask in 1u64..=(subsets as u64) {
                let vertices: Vec<VertexId> = maximal
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, v)| v.clone())
                    .collect();
                cells.insert(Cell { vertices });
                if cells.len() > budget {
                    return Err(Error::CellBudgetExceeded {
                        budget,
                        support_size: k,
                    });
                }
            }
        }
        Ok(cells.into_iter().collect())
    }

    /// The subcomplex induced by `vertex_set`: all cells whose vertices lie
    /// inside it, as a complex over the restricted network.
    pub fn induced_subcomplex(&self, vertex_set: &BTreeSet<VertexId>) -> Result<Complex, Error> {
        let restricted = self.network.restricted_to(vertex_set)?;
        Ok(Complex::build(restricted))
    }

    fn shared_variables(&self, vertex_set: &BTreeSet<VertexId>) -> BTreeSet<VariableId> {
        let mut iter = vertex_set.iter();
        let first = match iter.next() {
            Some(v) => v,
            None => return BTreeSet::new(),
        };
        let mut shared = self
            .network
            .observed(first)
            .cloned()
            .unwrap_or_default();
        for vertex in iter {
            let observed = match self.network.observed(vertex) {
                Some(vars) => vars,
                None => return BTreeSet::new(),
            };
            shared.retain(|x| observed.contains(x));
            if shared.is_empty() {
                break;
            }
        }
        shared
    }
}

/// Inclusion-maximal members of a family of sets.
fn antichain_of_maximal(candidates: BTreeSet<BTreeSet<VertexId>>) -> Vec<BTreeSet<VertexId>> {
    let mut sorted: Vec<BTreeSet<VertexId>> = candidates.into_iter().collect();
    sorted.sort_by_key(|s| std::cmp::Reverse(s.len()));
    let mut kept: Vec<BTreeSet<VertexId>> = Vec::new();
    for candidate in sorted {
        if !kept.iter().any(|k| candidate.is_subset(k)) {
            kept.push(candidate);
        }
    }
    kept
}
