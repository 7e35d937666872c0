//! Property tests: the complex against a brute-force nerve, the sheaf
//! axioms, the structure cross-checks, and the section engine against the
//! exhaustive oracle.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use sensheaf::{
    analyze, consistency, sections, AgreeAny, AnalyzeOptions, Assignment, Cell, Complex, Section,
    SensorNetwork, Standard, Tolerance, Value, VariableId, VertexId,
};

fn v(i: usize) -> VertexId {
    VertexId::new(format!("s{i}")).unwrap()
}

fn x(i: usize) -> VariableId {
    VariableId::new(format!("x{i}")).unwrap()
}

#[derive(Clone, Debug)]
struct Instance {
    network: SensorNetwork,
    assignment: Assignment,
}

/// Small value pools per tag; every occurrence of a variable shares one tag,
/// which is what document ingestion guarantees.
fn pool(tag: u8) -> Vec<Value> {
    match tag {
        0 => vec![Value::Int(0), Value::Int(1), Value::Int(2)],
        1 => vec![
            Value::real(0.0).unwrap(),
            Value::real(0.5).unwrap(),
            Value::real(1.0).unwrap(),
        ],
        2 => vec![Value::from("a"), Value::from("b"), Value::from("c")],
        _ => vec![Value::Bool(false), Value::Bool(true), Value::Bool(true)],
    }
}

fn arb_instance(numeric_only: bool) -> impl Strategy<Value = Instance> {
    let tag_limit = if numeric_only { 2u8 } else { 4u8 };
    (1usize..=7, 1usize..=6)
        .prop_flat_map(move |(n, m)| {
            (
                Just(n),
                proptest::collection::vec(proptest::collection::vec(any::<bool>(), m), n),
                proptest::collection::vec(0..tag_limit, m),
                proptest::collection::vec(proptest::collection::vec(0usize..3, m), n),
            )
        })
        .prop_map(|(n, membership, tags, choices)| {
            let network = SensorNetwork::new((0..n).map(|i| {
                (
                    v(i),
                    membership[i]
                        .iter()
                        .enumerate()
                        .filter(|(_, observes)| **observes)
                        .map(|(j, _)| x(j))
                        .collect::<BTreeSet<_>>(),
                )
            }))
            .unwrap();
            let per_vertex: BTreeMap<VertexId, Section> = (0..n)
                .map(|i| {
                    (
                        v(i),
                        membership[i]
                            .iter()
                            .enumerate()
                            .filter(|(_, observes)| **observes)
                            .map(|(j, _)| {
                                let values = pool(tags[j]);
                                (x(j), values[choices[i][j] % values.len()].clone())
                            })
                            .collect(),
                    )
                })
                .collect();
            let assignment = Assignment::new(&network, per_vertex).unwrap();
            Instance {
                network,
                assignment,
            }
        })
}

/// Nerve membership computed directly from the observation sets, with no
/// help from the library.
fn brute_force_cells(network: &SensorNetwork) -> BTreeSet<BTreeSet<VertexId>> {
    let vertices: Vec<VertexId> = network.vertex_set().into_iter().collect();
    let n = vertices.len();
    let mut cells = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        let subset: BTreeSet<VertexId> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| vertices[i].clone())
            .collect();
        if subset.len() == 1 {
            cells.insert(subset);
            continue;
        }
        let mut shared: Option<BTreeSet<VariableId>> = None;
        for vertex in &subset {
            let observed = network.observed(vertex).unwrap().clone();
            shared = Some(match shared {
                None => observed,
                Some(acc) => acc.intersection(&observed).cloned().collect(),
            });
        }
        if !shared.unwrap().is_empty() {
            cells.insert(subset);
        }
    }
    cells
}

fn all_cells(complex: &Complex) -> Vec<Cell> {
    complex.enumerate_cells(1_000_000).unwrap()
}

proptest! {
    #[test]
    fn enumeration_matches_the_brute_force_nerve(instance in arb_instance(false)) {
        let complex = Complex::build(instance.network.clone());
        let enumerated: BTreeSet<BTreeSet<VertexId>> =
            all_cells(&complex).iter().map(Cell::vertex_set).collect();
        prop_assert_eq!(enumerated, brute_force_cells(&instance.network));
    }

    #[test]
    fn enumeration_is_downward_closed(instance in arb_instance(false)) {
        let complex = Complex::build(instance.network);
        let cells: BTreeSet<BTreeSet<VertexId>> =
            all_cells(&complex).iter().map(Cell::vertex_set).collect();
        for cell in &cells {
            let members: Vec<&VertexId> = cell.iter().collect();
            for mask in 1u32..(1 << members.len()) {
                let face: BTreeSet<VertexId> = members
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, v)| (*v).clone())
                    .collect();
                prop_assert!(cells.contains(&face));
            }
        }
    }

    #[test]
    fn is_cell_agrees_with_the_brute_force_nerve(instance in arb_instance(false)) {
        let complex = Complex::build(instance.network.clone());
        let truth = brute_force_cells(&instance.network);
        let vertices: Vec<VertexId> = instance.network.vertex_set().into_iter().collect();
        for mask in 1u32..(1 << vertices.len()) {
            let subset: BTreeSet<VertexId> = (0..vertices.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| vertices[i].clone())
                .collect();
            prop_assert_eq!(complex.is_cell(&subset).unwrap(), truth.contains(&subset));
        }
    }

    #[test]
    fn stars_are_antitone_and_share_the_cell_variables(instance in arb_instance(false)) {
        let complex = Complex::build(instance.network);
        let cells = all_cells(&complex);
        for sigma in &cells {
            let star = complex.star(sigma).unwrap();
            prop_assert!(star.contains(sigma));
            // the union of shared variables over the star is exactly D(sigma)
            let union: BTreeSet<VariableId> = star
                .iter()
                .flat_map(|tau| complex.cell_variables(tau).unwrap())
                .collect();
            prop_assert_eq!(union, complex.cell_variables(sigma).unwrap());
            for tau in &cells {
                if tau.is_face_of(sigma) {
                    let bigger = complex.star(tau).unwrap();
                    prop_assert!(star.is_subset(&bigger));
                }
            }
        }
    }

    #[test]
    fn induced_subcomplexes_are_idempotent_and_monotone(
        instance in arb_instance(false),
        picks in proptest::collection::vec(any::<bool>(), 7),
    ) {
        let complex = Complex::build(instance.network.clone());
        let full = instance.network.vertex_set();
        prop_assert_eq!(complex.induced_subcomplex(&full).unwrap(), complex.clone());

        let subset: BTreeSet<VertexId> = full
            .iter()
            .enumerate()
            .filter(|(i, _)| picks.get(*i).copied().unwrap_or(false))
            .map(|(_, v)| v.clone())
            .collect();
        let induced = complex.induced_subcomplex(&subset).unwrap();
        prop_assert_eq!(induced.induced_subcomplex(&subset).unwrap(), induced.clone());

        let sub_cells: BTreeSet<BTreeSet<VertexId>> =
            all_cells(&induced).iter().map(Cell::vertex_set).collect();
        let cells: BTreeSet<BTreeSet<VertexId>> =
            all_cells(&complex).iter().map(Cell::vertex_set).collect();
        // exactly the cells of the big complex that fit inside the subset
        let expected: BTreeSet<BTreeSet<VertexId>> = cells
            .into_iter()
            .filter(|c| c.is_subset(&subset))
            .collect();
        prop_assert_eq!(sub_cells, expected);
    }
}

fn arb_domain() -> impl Strategy<Value = BTreeSet<VariableId>> {
    proptest::collection::vec(any::<bool>(), 6).prop_map(|picks| {
        picks
            .iter()
            .enumerate()
            .filter(|(_, p)| **p)
            .map(|(i, _)| x(i))
            .collect()
    })
}

fn arb_section_over(domain: BTreeSet<VariableId>) -> impl Strategy<Value = Section> {
    let size = domain.len();
    (
        Just(domain),
        proptest::collection::vec((0u8..4, 0usize..3), size),
    )
        .prop_map(|(domain, picks)| {
            domain
                .into_iter()
                .zip(picks)
                .map(|(variable, (tag, i))| {
                    let values = pool(tag);
                    (variable, values[i % values.len()].clone())
                })
                .collect()
        })
}

proptest! {
    #[test]
    fn restriction_is_functorial(
        section in arb_domain().prop_flat_map(arb_section_over),
        keep_v in proptest::collection::vec(any::<bool>(), 6),
        keep_w in proptest::collection::vec(any::<bool>(), 6),
    ) {
        let domain: Vec<VariableId> = section.domain().into_iter().collect();
        let middle: BTreeSet<VariableId> = domain
            .iter()
            .enumerate()
            .filter(|(i, _)| keep_v[*i % keep_v.len()])
            .map(|(_, x)| x.clone())
            .collect();
        let inner: BTreeSet<VariableId> = middle
            .iter()
            .enumerate()
            .filter(|(i, _)| keep_w[*i % keep_w.len()])
            .map(|(_, x)| x.clone())
            .collect();
        let via_middle = section.restrict(&middle).unwrap().restrict(&inner).unwrap();
        let direct = section.restrict(&inner).unwrap();
        prop_assert_eq!(via_middle, direct);
    }

    #[test]
    fn sections_agreeing_on_a_cover_are_equal(
        section in arb_domain().prop_flat_map(arb_section_over),
        splits in proptest::collection::vec(0usize..3, 6),
        tweak in proptest::option::of((0usize..6, 0u8..4, 0usize..3)),
    ) {
        // carve the domain into up to three covering pieces
        let domain: Vec<VariableId> = section.domain().into_iter().collect();
        let mut pieces: Vec<BTreeSet<VariableId>> = vec![BTreeSet::new(); 3];
        for (i, variable) in domain.iter().enumerate() {
            pieces[splits[i % splits.len()]].insert(variable.clone());
        }

        // the other section is equal or differs at exactly one variable
        let mut other_values: BTreeMap<VariableId, Value> =
            section.iter().map(|(x, value)| (x.clone(), value.clone())).collect();
        let mut tweaked = false;
        if let Some((slot, tag, choice)) = tweak {
            if !domain.is_empty() {
                let target = domain[slot % domain.len()].clone();
                let values = pool(tag);
                let replacement = values[choice % values.len()].clone();
                if other_values[&target] != replacement {
                    other_values.insert(target, replacement);
                    tweaked = true;
                }
            }
        }
        let other = Section::new(other_values);

        let premise = pieces.iter().all(|piece| {
            section.restrict(piece).unwrap() == other.restrict(piece).unwrap()
        });
        // locality: agreement on every piece of a cover is equality
        prop_assert_eq!(premise, !tweaked);
        prop_assert_eq!(premise, section == other);
    }

    #[test]
    fn gluing_restrictions_recovers_the_global_section(
        global in arb_domain().prop_flat_map(arb_section_over),
        splits in proptest::collection::vec(0usize..3, 6),
        order in Just(vec![0usize, 1, 2]).prop_shuffle(),
    ) {
        let domain: Vec<VariableId> = global.domain().into_iter().collect();
        let mut pieces: Vec<BTreeSet<VariableId>> = vec![BTreeSet::new(); 3];
        for (i, variable) in domain.iter().enumerate() {
            pieces[splits[i % splits.len()]].insert(variable.clone());
        }
        let restricted: Vec<Section> = order
            .iter()
            .map(|&i| global.restrict(&pieces[i]).unwrap())
            .collect();
        // gluing exists and is the unique section restricting to the pieces
        let glued = sensheaf::sheaf::glue(&restricted).unwrap();
        prop_assert_eq!(glued, global);
    }

    #[test]
    fn gluing_verdict_ignores_piece_order(
        sections in proptest::collection::vec(arb_domain().prop_flat_map(arb_section_over), 0..4),
        order in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
    ) {
        let permuted: Vec<Section> = order
            .iter()
            .filter(|i| **i < sections.len())
            .map(|&i| sections[i].clone())
            .collect();
        match (sensheaf::sheaf::glue(&sections), sensheaf::sheaf::glue(&permuted)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(false, "one order glued, the other did not: {a:?} vs {b:?}"),
        }
    }
}

proptest! {
    #[test]
    fn standard_verdict_means_gluable_and_equal(instance in arb_instance(false)) {
        let complex = Complex::build(instance.network.clone());
        for cell in all_cells(&complex) {
            if cell.dimension() == 0 {
                continue;
            }
            let verdict =
                consistency::eval_cell(&Standard, &complex, &instance.assignment, &cell).unwrap();
            let shared = complex.cell_variables(&cell).unwrap();
            let restricted: Vec<Section> = cell
                .vertices()
                .iter()
                .map(|vertex| {
                    instance.assignment.section(vertex).unwrap().restrict(&shared).unwrap()
                })
                .collect();
            let gluable = match sensheaf::sheaf::glue(&restricted) {
                Ok(glued) => restricted.iter().all(|piece| piece == &glued),
                Err(_) => false,
            };
            prop_assert_eq!(verdict, gluable);
        }
    }

    #[test]
    fn zero_tolerance_matches_standard_on_numeric_instances(instance in arb_instance(true)) {
        let complex = Complex::build(instance.network.clone());
        let zero = Tolerance::new(BTreeMap::new()).unwrap();
        let lhs =
            consistency::bad_cells(&zero, &complex, &instance.assignment, 1_000_000).unwrap();
        let rhs =
            consistency::bad_cells(&Standard, &complex, &instance.assignment, 1_000_000).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn agree_any_is_monotone_under_taking_faces(instance in arb_instance(false)) {
        let complex = Complex::build(instance.network.clone());
        let cells = all_cells(&complex);
        let verdict = |cell: &Cell| {
            consistency::eval_cell(&AgreeAny, &complex, &instance.assignment, cell).unwrap()
        };
        for sigma in cells.iter().filter(|c| c.dimension() >= 1) {
            if !verdict(sigma) {
                continue;
            }
            for tau in cells.iter().filter(|c| c.dimension() >= 1) {
                if tau.is_face_of(sigma) {
                    prop_assert!(verdict(tau), "face {tau} of agreeing cell {sigma} disagrees");
                }
            }
        }
    }
}

fn arb_bad_family(n: usize) -> impl Strategy<Value = Vec<Cell>> {
    proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), 0..8).prop_map(
        move |masks| {
            masks
                .into_iter()
                .filter_map(|mask| {
                    let members: Vec<VertexId> = mask
                        .iter()
                        .enumerate()
                        .filter(|(_, inside)| **inside)
                        .map(|(i, _)| v(i))
                        .collect();
                    if members.len() >= 2 {
                        Some(Cell::new(members).unwrap())
                    } else {
                        None
                    }
                })
                .collect()
        },
    )
}

fn engine_case() -> impl Strategy<Value = (BTreeSet<VertexId>, Vec<Cell>)> {
    (2usize..=8).prop_flat_map(|n| {
        (
            Just((0..n).map(v).collect::<BTreeSet<_>>()),
            arb_bad_family(n),
        )
    })
}

proptest! {
    #[test]
    fn engine_matches_the_exhaustive_oracle((vertices, bad) in engine_case()) {
        let engine = sections::maximal_consistent_vertex_sets(&vertices, &bad).unwrap();
        let oracle = sections::oracle_maximal_sets(&vertices, &bad).unwrap();
        prop_assert_eq!(engine, oracle);
    }

    #[test]
    fn engine_output_is_a_sound_maximal_cover((vertices, bad) in engine_case()) {
        let sets = sections::maximal_consistent_vertex_sets(&vertices, &bad).unwrap();

        // antichain
        for (i, a) in sets.iter().enumerate() {
            for (j, b) in sets.iter().enumerate() {
                if i != j {
                    prop_assert!(!a.is_subset(b));
                }
            }
        }
        // soundness: no output contains a bad cell
        for set in &sets {
            for cell in &bad {
                prop_assert!(!cell.vertices().iter().all(|v| set.contains(v)));
            }
        }
        // cover: every vertex appears somewhere
        for vertex in &vertices {
            prop_assert!(sets.iter().any(|set| set.contains(vertex)));
        }
        // maximality: every subset avoiding the bad cells sits inside an output
        let order: Vec<&VertexId> = vertices.iter().collect();
        for mask in 0u32..(1 << order.len()) {
            let subset: BTreeSet<VertexId> = (0..order.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| order[i].clone())
                .collect();
            let consistent = bad
                .iter()
                .all(|cell| !cell.vertices().iter().all(|v| subset.contains(v)));
            if consistent {
                prop_assert!(sets.iter().any(|set| subset.is_subset(set)));
            }
        }
    }

    #[test]
    fn engine_ignores_bad_cell_order_and_reduction(
        (vertices, bad) in engine_case(),
        order in Just((0usize..8).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let baseline = sections::maximal_consistent_vertex_sets(&vertices, &bad).unwrap();
        let permuted: Vec<Cell> = order
            .iter()
            .filter(|i| **i < bad.len())
            .map(|&i| bad[i].clone())
            .collect();
        prop_assert_eq!(
            sections::maximal_consistent_vertex_sets(&vertices, &permuted).unwrap(),
            baseline.clone()
        );
        let minimal = consistency::minimal_bad_cells(&bad);
        prop_assert_eq!(
            sections::maximal_consistent_vertex_sets(&vertices, &minimal).unwrap(),
            baseline
        );
    }

    #[test]
    fn engine_commutes_with_vertex_relabeling(
        (vertices, bad) in engine_case(),
        permutation in Just((0usize..8).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        // rename s_i -> t_{p(i)}; lexicographic order of the labels changes
        let rename = |vertex: &VertexId| -> VertexId {
            let i: usize = vertex.as_str()[1..].parse().unwrap();
            VertexId::new(format!("t{}", permutation[i])).unwrap()
        };
        let renamed_vertices: BTreeSet<VertexId> = vertices.iter().map(&rename).collect();
        let renamed_bad: Vec<Cell> = bad
            .iter()
            .map(|cell| Cell::new(cell.vertices().iter().map(&rename)).unwrap())
            .collect();
        let renamed_result: BTreeSet<BTreeSet<VertexId>> =
            sections::maximal_consistent_vertex_sets(&renamed_vertices, &renamed_bad)
                .unwrap()
                .into_iter()
                .collect();
        let expected: BTreeSet<BTreeSet<VertexId>> =
            sections::maximal_consistent_vertex_sets(&vertices, &bad)
                .unwrap()
                .into_iter()
                .map(|set| set.iter().map(&rename).collect())
                .collect();
        prop_assert_eq!(renamed_result, expected);
    }

    #[test]
    fn glued_sections_restrict_back_to_the_assignment(instance in arb_instance(false)) {
        let result = analyze(
            &instance.network,
            &instance.assignment,
            &Standard,
            AnalyzeOptions::default(),
        )
        .unwrap();
        prop_assert!(result.glue_applied);
        for section in &result.sections {
            let glued = section.glued.as_ref().unwrap();
            for vertex in &section.vertex_set {
                let observed = instance.network.observed(vertex).unwrap();
                prop_assert_eq!(
                    &glued.restrict(observed).unwrap(),
                    instance.assignment.section(vertex).unwrap()
                );
            }
        }
    }
}
