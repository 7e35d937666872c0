//! Sheaf-based consistency analysis for sensor networks.
//!
//! A sensor network generates an abstract simplicial complex: sensors are
//! vertices, and any set of sensors observing a common variable spans a
//! cell. A reading of the network assigns a section of data values to every
//! sensor, and a consistency structure judges each cell of the complex with
//! a boolean predicate. From the failed cells, the section engine computes
//! the unique antichain of maximal vertex sets on which the reading is
//! consistent, and under the exact-agreement structure it glues one local
//! section of values over each of them.
//!
//! The modules follow that pipeline:
//!
//! - [`complex`]: the network, its cells, stars, and induced subcomplexes;
//! - [`sheaf`]: values, sections, projection restriction, and gluing;
//! - [`consistency`]: the predicate contract and the built-in structures;
//! - [`sections`]: the maximal-section engine, its exhaustive oracle, and
//!   the end-to-end [`analyze`] entry point.

pub mod complex;
pub mod consistency;
mod error;
pub mod sections;
pub mod sheaf;

pub use complex::{Cell, Complex, SensorNetwork, VariableId, VertexId};
pub use consistency::{AgreeAny, CellVerdict, ConsistencyStructure, Standard, Tolerance};
pub use error::Error;
pub use sections::{
    analyze, AnalysisResult, AnalyzeOptions, MaximalSection, DEFAULT_CELL_BUDGET,
    ORACLE_VERTEX_LIMIT,
};
pub use sheaf::{Assignment, Section, Value};
