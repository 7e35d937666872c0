//! The engine that computes maximal consistent sections.
//!
//! Given the vertex set and the family of inconsistent cells, the engine
//! finds the unique antichain of maximal vertex sets whose induced
//! subcomplexes contain no bad cell. It works the way the existence proof
//! does: start from the full vertex set; while a candidate still contains a
//! bad cell, branch by deleting one vertex of that cell at a time; drop
//! candidates contained in other candidates; the surviving maximal sets are
//! the answer, and they do not depend on any of the choices made along the
//! way.
//!
//! An exhaustive oracle (`oracle_maximal_sets`) double-checks the engine on
//! small inputs without sharing any of its code. Worst-case output size is
//! exponential: the maximal sets are the complements of the minimal
//! transversals of the bad-cell hypergraph.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use crate::complex::{Cell, Complex, SensorNetwork, VertexId};
use crate::consistency::{self, ConsistencyStructure};
use crate::error::Error;
use crate::sheaf::{self, Assignment, Section};

/// Default guard on the number of cells materialized during analysis.
pub const DEFAULT_CELL_BUDGET: usize = 1_000_000;

/// Largest vertex count the exhaustive oracle will accept.
pub const ORACLE_VERTEX_LIMIT: usize = 20;

/// One maximal consistent vertex set, with its glued local section when the
/// structure admits one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximalSection {
    pub vertex_set: BTreeSet<VertexId>,
    pub glued: Option<Section>,
}

/// Outcome of a full analysis run.
///
/// `sections` is an antichain sorted lexicographically by vertex set, and
/// every vertex of the network appears in at least one of its members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisResult {
    pub sections: Vec<MaximalSection>,
    pub bad_cells: Vec<Cell>,
    pub structure_name: String,
    pub glue_applied: bool,
}

/// Knobs for [`analyze`].
#[derive(Clone, Copy, Debug)]
pub struct AnalyzeOptions {
    pub cell_budget: usize,
    pub glue: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            cell_budget: DEFAULT_CELL_BUDGET,
            glue: true,
        }
    }
}

/// Which bad cell a candidate branches on. All rules produce the same
/// antichain; the default exists because splitting on the smallest cell
/// creates the fewest children. The alternatives are only exercised by the
/// invariance tests.
#[cfg_attr(not(test), allow(dead_code))]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum BranchRule {
    SmallestCell,
    FirstListed,
    LargestCell,
}

/// The unique antichain of maximal vertex subsets containing no bad cell.
///
/// Every bad cell must have at least two vertices, all drawn from
/// `all_vertices`. The result is sorted lexicographically; for an empty
/// vertex set it is empty.
pub fn maximal_consistent_vertex_sets(
    all_vertices: &BTreeSet<VertexId>,
    bad: &[Cell],
) -> Result<Vec<BTreeSet<VertexId>>, Error> {
    maximal_sets_with(all_vertices, bad, BranchRule::SmallestCell)
}

pub(crate) fn maximal_sets_with(
    all_vertices: &BTreeSet<VertexId>,
    bad: &[Cell],
    rule: BranchRule,
) -> Result<Vec<BTreeSet<VertexId>>, Error> {
    for cell in bad {
        if cell.dimension() == 0 {
            return Err(Error::ZeroDimensionalCell { cell: cell.clone() });
        }
        for vertex in cell.vertices() {
            if !all_vertices.contains(vertex) {
                return Err(Error::BadCellOutsideVertices {
                    cell: cell.clone(),
                    vertex: vertex.clone(),
                });
            }
        }
    }
    if all_vertices.is_empty() {
        return Ok(Vec::new());
    }

    let order: Vec<&VertexId> = all_vertices.iter().collect();
    let index: BTreeMap<&VertexId, usize> =
        order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let n = order.len();

    // Branching only ever needs the inclusion-minimal bad cells: a set
    // avoids all bad cells iff it avoids these.
    let mut cells: Vec<Bits> = Vec::new();
    let mut seen_cells: HashSet<Bits> = HashSet::new();
    for cell in bad {
        let mut bits = Bits::zero(n);
        for vertex in cell.vertices() {
            bits.set(index[vertex]);
        }
        if seen_cells.insert(bits.clone()) {
            cells.push(bits);
        }
    }
    let minimal: Vec<Bits> = cells
        .iter()
        .filter(|c| !cells.iter().any(|o| o != *c && o.is_subset(c)))
        .cloned()
        .collect();
    let branch_cells = match rule {
        BranchRule::SmallestCell => {
            let mut sorted = minimal;
            sorted.sort_by_key(|c| (c.count(), c.clone()));
            sorted
        }
        BranchRule::FirstListed => minimal,
        BranchRule::LargestCell => {
            let mut sorted = minimal;
            sorted.sort_by_key(|c| (std::cmp::Reverse(c.count()), c.clone()));
            sorted
        }
    };

    let mut queue: VecDeque<Bits> = VecDeque::from([Bits::full(n)]);
    let mut expanded: HashSet<Bits> = HashSet::new();
    let mut finished: Vec<Bits> = Vec::new();
    while let Some(candidate) = queue.pop_front() {
        if expanded.contains(&candidate) {
            continue;
        }
        // A candidate strictly inside another live candidate is redundant:
        // everything consistent below it survives below the bigger one.
        if finished
            .iter()
            .chain(queue.iter())
            .any(|other| candidate.is_proper_subset(other))
        {
            expanded.insert(candidate);
            continue;
        }
        expanded.insert(candidate.clone());
        match branch_cells.iter().find(|c| c.is_subset(&candidate)) {
            None => finished.push(candidate),
            Some(cell) => {
                for i in cell.ones() {
                    let child = candidate.without(i);
                    if !expanded.contains(&child) {
                        queue.push_back(child);
                    }
                }
            }
        }
    }

    let mut result: Vec<BTreeSet<VertexId>> = finished
        .iter()
        .filter(|f| !finished.iter().any(|g| f.is_proper_subset(g)))
        .map(|f| f.ones().map(|i| order[i].clone()).collect())
        .collect();
    result.sort();
    Ok(result)
}

/// Exhaustive reference for [`maximal_consistent_vertex_sets`], limited to
/// [`ORACLE_VERTEX_LIMIT`] vertices: enumerate every subset, keep those
/// containing no bad cell, return the inclusion-maximal ones. Deliberately
/// shares no code with the worklist engine.
pub fn oracle_maximal_sets(
    all_vertices: &BTreeSet<VertexId>,
    bad: &[Cell],
) -> Result<Vec<BTreeSet<VertexId>>, Error> {
    for cell in bad {
        if cell.dimension() == 0 {
            return Err(Error::ZeroDimensionalCell { cell: cell.clone() });
        }
        for vertex in cell.vertices() {
            if !all_vertices.contains(vertex) {
                return Err(Error::BadCellOutsideVertices {
                    cell: cell.clone(),
                    vertex: vertex.clone(),
                });
            }
        }
    }
    let n = all_vertices.len();
    if n > ORACLE_VERTEX_LIMIT {
        return Err(Error::OracleLimitExceeded {
            vertices: n,
            limit: ORACLE_VERTEX_LIMIT,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }

    let order: Vec<&VertexId> = all_vertices.iter().collect();
    let bad_masks: Vec<u32> = bad
        .iter()
        .map(|cell| {
            cell.vertices()
                .iter()
                .map(|v| {
                    let i = order.iter().position(|o| *o == v).expect("validated");
                    1u32 << i
                })
                .sum()
        })
        .collect();

    let total: u32 = 1 << n;
    let mut keeps = vec![false; total as usize];
    for mask in 0..total {
        keeps[mask as usize] = bad_masks.iter().all(|b| mask & b != *b);
    }

    let mut result: Vec<BTreeSet<VertexId>> = (0..total)
        .filter(|&mask| {
            keeps[mask as usize]
                && (0..n).all(|j| mask & (1 << j) != 0 || !keeps[(mask | (1 << j)) as usize])
        })
        .map(|mask| {
            (0..n)
                .filter(|j| mask & (1 << j) != 0)
                .map(|j| order[j].clone())
                .collect()
        })
        .collect();
    result.sort();
    Ok(result)
}

/// Glues φ over each vertex set into one local section. The caller must
/// guarantee each set is consistent under an exact-agreement structure; a
/// gluing conflict here means that precondition was violated.
pub fn glue_maximal_sections(
    assignment: &Assignment,
    sets: &[BTreeSet<VertexId>],
) -> Result<Vec<MaximalSection>, Error> {
    sets.iter()
        .map(|vertex_set| {
            let pieces: Vec<Section> = vertex_set
                .iter()
                .map(|vertex| {
                    assignment
                        .section(vertex)
                        .cloned()
                        .ok_or_else(|| Error::UnknownVertex(vertex.clone()))
                })
                .collect::<Result<_, _>>()?;
            Ok(MaximalSection {
                vertex_set: vertex_set.clone(),
                glued: Some(sheaf::glue(&pieces)?),
            })
        })
        .collect()
}

/// End-to-end pipeline: build the complex, evaluate every cell once, reduce
/// to minimal bad cells, run the engine, and glue local sections when the
/// structure admits it and `options.glue` is set.
pub fn analyze(
    network: &SensorNetwork,
    assignment: &Assignment,
    structure: &dyn ConsistencyStructure,
    options: AnalyzeOptions,
) -> Result<AnalysisResult, Error> {
    let complex = Complex::build(network.clone());
    let bad = consistency::bad_cells(structure, &complex, assignment, options.cell_budget)?;
    let minimal = consistency::minimal_bad_cells(&bad);
    let sets = maximal_consistent_vertex_sets(&network.vertex_set(), &minimal)?;
    let glue_applied = options.glue && structure.admits_gluing();
    let sections = if glue_applied {
        glue_maximal_sections(assignment, &sets)?
    } else {
        sets.into_iter()
            .map(|vertex_set| MaximalSection {
                vertex_set,
                glued: None,
            })
            .collect()
    };
    Ok(AnalysisResult {
        sections,
        bad_cells: bad,
        structure_name: structure.name().to_string(),
        glue_applied,
    })
}

/// Fixed-width bitset over the vertex indices of one engine run.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn zero(n: usize) -> Self {
        Self {
            words: vec![0; n.div_ceil(64)],
        }
    }

    fn full(n: usize) -> Self {
        let mut bits = Self::zero(n);
        for i in 0..n {
            bits.set(i);
        }
        bits
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn without(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.words[i / 64] &= !(1 << (i % 64));
        out
    }

    fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    fn is_proper_subset(&self, other: &Self) -> bool {
        self.is_subset(other) && self != other
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, word)| {
            let mut w = *word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let bit = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + bit)
                }
            })
        })
    }
}
