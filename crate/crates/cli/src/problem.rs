//! Parsing and validation of JSON problem documents.
//!
//! Schema:
//!
//! ```json
//! {
//!   "sensors":     { "<sensor>": ["<variable>", ...], ... },
//!   "assignment":  { "<sensor>": { "<variable>": <scalar>, ... }, ... },
//!   "consistency": { "kind": "standard" | "agree_any" | "tolerance",
//!                    "tolerances": { "<variable>": <number>, ... } },
//!   "options":     { "cell_budget": <count>, "glue": <bool> }
//! }
//! ```
//!
//! `assignment` must cover exactly the sensors and, per sensor, exactly its
//! declared variables. Scalars are integers, reals, strings, or booleans;
//! a variable whose occurrences mix integers and reals has them all
//! promoted to real, so each variable carries one tag across the document.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::marker::PhantomData;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer};
use serde_json::{json, Map as JsonMap, Value as Json};

use sensheaf::{Assignment, AnalyzeOptions, Section, SensorNetwork, Value, VariableId, VertexId};

use crate::error::CliError;

/// A fully validated problem: typed network, assignment, structure choice,
/// and any options carried by the document.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemDocument {
    pub network: SensorNetwork,
    pub assignment: Assignment,
    pub structure: StructureSpec,
    pub options: ProblemOptions,
}

/// Which consistency structure the document selects.
#[derive(Clone, Debug, PartialEq)]
pub enum StructureSpec {
    Standard,
    AgreeAny,
    Tolerance(BTreeMap<VariableId, f64>),
}

impl StructureSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Standard => "standard",
            Self::AgreeAny => "agree_any",
            Self::Tolerance(_) => "tolerance",
        }
    }

    pub fn build(&self) -> Result<Box<dyn sensheaf::ConsistencyStructure>, CliError> {
        Ok(match self {
            Self::Standard => Box::new(sensheaf::Standard),
            Self::AgreeAny => Box::new(sensheaf::AgreeAny),
            Self::Tolerance(tolerances) => {
                Box::new(sensheaf::Tolerance::new(tolerances.clone()).map_err(CliError::Analysis)?)
            }
        })
    }
}

/// Options carried by the document; command-line flags override them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProblemOptions {
    pub cell_budget: Option<usize>,
    pub glue: Option<bool>,
}

impl ProblemDocument {
    /// Resolves effective analysis options: flag beats document beats
    /// default.
    pub fn resolve_options(&self, budget_flag: Option<usize>, no_glue_flag: bool) -> AnalyzeOptions {
        let defaults = AnalyzeOptions::default();
        AnalyzeOptions {
            cell_budget: budget_flag
                .or(self.options.cell_budget)
                .unwrap_or(defaults.cell_budget),
            glue: if no_glue_flag {
                false
            } else {
                self.options.glue.unwrap_or(defaults.glue)
            },
        }
    }
}

// Raw document shape. Object entries are kept as listed so duplicate keys
// can be reported instead of silently collapsed.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    sensors: KeyedList<Vec<String>>,
    assignment: KeyedList<KeyedList<Json>>,
    consistency: RawConsistency,
    #[serde(default)]
    options: Option<RawOptions>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConsistency {
    kind: String,
    #[serde(default)]
    tolerances: Option<BTreeMap<String, f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptions {
    #[serde(default)]
    cell_budget: Option<u64>,
    #[serde(default)]
    glue: Option<bool>,
}

struct KeyedList<T>(Vec<(String, T)>);

impl<'de, T: Deserialize<'de>> Deserialize<'de> for KeyedList<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct KeyedListVisitor<T>(PhantomData<T>);

        impl<'de, T: Deserialize<'de>> Visitor<'de> for KeyedListVisitor<T> {
            type Value = KeyedList<T>;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a JSON object")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut entries = Vec::new();
                while let Some((key, value)) = map.next_entry::<String, T>()? {
                    entries.push((key, value));
                }
                Ok(KeyedList(entries))
            }
        }

        deserializer.deserialize_map(KeyedListVisitor(PhantomData))
    }
}

/// Parses and validates a UTF-8 JSON problem document.
pub fn parse_problem(bytes: &[u8]) -> Result<ProblemDocument, CliError> {
    let raw: RawProblem = serde_json::from_slice(bytes)?;

    // sensors
    let mut declared: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (label, variables) in &raw.sensors.0 {
        if label.is_empty() {
            return Err(CliError::schema("sensors", "sensor labels must be nonempty"));
        }
        if declared.contains_key(label) {
            return Err(CliError::schema(
                "sensors",
                format!("duplicate sensor {label:?}"),
            ));
        }
        let mut set = BTreeSet::new();
        for variable in variables {
            if variable.is_empty() {
                return Err(CliError::schema(
                    format!("sensors.{label}"),
                    "variable labels must be nonempty",
                ));
            }
            if !set.insert(variable.clone()) {
                return Err(CliError::schema(
                    format!("sensors.{label}"),
                    format!("duplicate variable {variable:?}"),
                ));
            }
        }
        declared.insert(label.clone(), set);
    }

    // assignment keys must be exactly the sensors
    let mut values: BTreeMap<String, BTreeMap<String, Value>> = BTreeMap::new();
    for (label, entries) in &raw.assignment.0 {
        if !declared.contains_key(label) {
            return Err(CliError::schema(
                format!("assignment.{label}"),
                "sensor not declared in sensors",
            ));
        }
        if values.contains_key(label) {
            return Err(CliError::schema(
                "assignment",
                format!("duplicate sensor {label:?}"),
            ));
        }
        let declared_vars = &declared[label];
        let mut section = BTreeMap::new();
        for (variable, scalar) in &entries.0 {
            let path = format!("assignment.{label}.{variable}");
            if !declared_vars.contains(variable) {
                return Err(CliError::schema(path, format!(
                    "variable not declared in sensors.{label}"
                )));
            }
            if section.contains_key(variable) {
                return Err(CliError::schema(
                    format!("assignment.{label}"),
                    format!("duplicate variable {variable:?}"),
                ));
            }
            section.insert(variable.clone(), scalar_value(scalar, &path)?);
        }
        for variable in declared_vars {
            if !section.contains_key(variable) {
                return Err(CliError::schema(
                    format!("assignment.{label}"),
                    format!("missing value for variable {variable:?} declared in sensors.{label}"),
                ));
            }
        }
        values.insert(label.clone(), section);
    }
    for label in declared.keys() {
        if !values.contains_key(label) {
            return Err(CliError::schema(
                "assignment",
                format!("missing entry for sensor {label:?}"),
            ));
        }
    }

    promote_mixed_numerics(&mut values);

    // consistency
    let structure = match raw.consistency.kind.as_str() {
        "standard" | "agree_any" => {
            if raw.consistency.tolerances.is_some() {
                return Err(CliError::schema(
                    "consistency.tolerances",
                    format!(
                        "only valid for kind \"tolerance\", not {:?}",
                        raw.consistency.kind
                    ),
                ));
            }
            if raw.consistency.kind == "standard" {
                StructureSpec::Standard
            } else {
                StructureSpec::AgreeAny
            }
        }
        "tolerance" => {
            let mut tolerances = BTreeMap::new();
            for (variable, epsilon) in raw.consistency.tolerances.unwrap_or_default() {
                if !epsilon.is_finite() || epsilon < 0.0 {
                    return Err(CliError::schema(
                        format!("consistency.tolerances.{variable}"),
                        format!("must be a finite nonnegative number, got {epsilon}"),
                    ));
                }
                let variable = VariableId::new(variable)
                    .map_err(|_| CliError::schema("consistency.tolerances", "variable labels must be nonempty"))?;
                tolerances.insert(variable, epsilon);
            }
            StructureSpec::Tolerance(tolerances)
        }
        other => {
            return Err(CliError::schema(
                "consistency.kind",
                format!("unknown kind {other:?}; expected \"standard\", \"agree_any\", or \"tolerance\""),
            ));
        }
    };

    // options
    let options = match raw.options {
        None => ProblemOptions::default(),
        Some(raw_options) => {
            let cell_budget = match raw_options.cell_budget {
                None => None,
                Some(0) => {
                    return Err(CliError::schema(
                        "options.cell_budget",
                        "must be a positive count",
                    ))
                }
                Some(budget) => Some(usize::try_from(budget).map_err(|_| {
                    CliError::schema("options.cell_budget", "does not fit this platform")
                })?),
            };
            ProblemOptions {
                cell_budget,
                glue: raw_options.glue,
            }
        }
    };

    // assemble typed network and assignment; label validity was checked above
    let network = SensorNetwork::new(declared.iter().map(|(label, variables)| {
        (
            VertexId::new(label.clone()).expect("validated"),
            variables
                .iter()
                .map(|x| VariableId::new(x.clone()).expect("validated"))
                .collect(),
        )
    }))
    .map_err(CliError::Analysis)?;

    let per_vertex: BTreeMap<VertexId, Section> = values
        .into_iter()
        .map(|(label, section)| {
            (
                VertexId::new(label).expect("validated"),
                section
                    .into_iter()
                    .map(|(x, value)| (VariableId::new(x).expect("validated"), value))
                    .collect(),
            )
        })
        .collect();
    let assignment = Assignment::new(&network, per_vertex).map_err(CliError::Analysis)?;

    Ok(ProblemDocument {
        network,
        assignment,
        structure,
        options,
    })
}

/// Serializes a problem document back to its JSON shape (pretty-printed,
/// trailing newline). `parse_problem` of the output reproduces the input
/// document.
pub fn serialize_problem(problem: &ProblemDocument) -> String {
    let mut sensors = JsonMap::new();
    for (vertex, variables) in problem.network.iter() {
        sensors.insert(
            vertex.as_str().to_string(),
            Json::Array(
                variables
                    .iter()
                    .map(|x| Json::String(x.as_str().to_string()))
                    .collect(),
            ),
        );
    }

    let mut assignment = JsonMap::new();
    for (vertex, section) in problem.assignment.iter() {
        let mut entries = JsonMap::new();
        for (variable, value) in section.iter() {
            entries.insert(variable.as_str().to_string(), value_to_json(value));
        }
        assignment.insert(vertex.as_str().to_string(), Json::Object(entries));
    }

    let mut consistency = JsonMap::new();
    consistency.insert(
        "kind".to_string(),
        Json::String(problem.structure.kind().to_string()),
    );
    if let StructureSpec::Tolerance(tolerances) = &problem.structure {
        let mut entries = JsonMap::new();
        for (variable, epsilon) in tolerances {
            entries.insert(variable.as_str().to_string(), json!(epsilon));
        }
        consistency.insert("tolerances".to_string(), Json::Object(entries));
    }

    let mut document = JsonMap::new();
    document.insert("sensors".to_string(), Json::Object(sensors));
    document.insert("assignment".to_string(), Json::Object(assignment));
    document.insert("consistency".to_string(), Json::Object(consistency));
    if problem.options != ProblemOptions::default() {
        let mut entries = JsonMap::new();
        if let Some(budget) = problem.options.cell_budget {
            entries.insert("cell_budget".to_string(), json!(budget));
        }
        if let Some(glue) = problem.options.glue {
            entries.insert("glue".to_string(), json!(glue));
        }
        document.insert("options".to_string(), Json::Object(entries));
    }

    let mut text = serde_json::to_string_pretty(&Json::Object(document))
        .expect("JSON maps of scalars always serialize");
    text.push('\n');
    text
}

/// Converts a library value to its JSON form. Reals keep their tag because
/// serde_json prints them in shortest round-trip form with a decimal point.
pub(crate) fn value_to_json(value: &Value) -> Json {
    match value {
        Value::Int(i) => json!(i),
        Value::Real(r) => json!(r),
        Value::Text(s) => json!(s),
        Value::Bool(b) => json!(b),
    }
}

fn scalar_value(scalar: &Json, path: &str) -> Result<Value, CliError> {
    match scalar {
        Json::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Value::Int(i))
            } else if let Some(f) = n.as_f64() {
                Value::real(f).map_err(|_| {
                    CliError::schema(path, format!("number {n} is not a finite real"))
                })
            } else {
                Err(CliError::schema(path, format!("number {n} is out of range")))
            }
        }
        Json::String(s) => Ok(Value::Text(s.clone())),
        Json::Bool(b) => Ok(Value::Bool(*b)),
        other => Err(CliError::schema(
            path,
            format!("expected a scalar (number, string, or boolean), got {other}"),
        )),
    }
}

/// A variable is numeric iff every occurrence is numeric; occurrences that
/// mix integers and reals are all promoted to real.
fn promote_mixed_numerics(values: &mut BTreeMap<String, BTreeMap<String, Value>>) {
    let mut saw_real: BTreeSet<String> = BTreeSet::new();
    let mut saw_int: BTreeSet<String> = BTreeSet::new();
    for section in values.values() {
        for (variable, value) in section {
            match value {
                Value::Real(_) => {
                    saw_real.insert(variable.clone());
                }
                Value::Int(_) => {
                    saw_int.insert(variable.clone());
                }
                _ => {}
            }
        }
    }
    let promote: BTreeSet<&String> = saw_real.intersection(&saw_int).collect();
    if promote.is_empty() {
        return;
    }
    for section in values.values_mut() {
        for (variable, value) in section.iter_mut() {
            if let Value::Int(i) = value {
                if promote.contains(variable) {
                    *value = Value::Real(*i as f64);
                }
            }
        }
    }
}
