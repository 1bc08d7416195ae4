use patternforge::{
    builtin_agile_lite, generate, mutate_to_distractor, plant_minimal, EdgeType, GenConfig, GenError, GraphStore,
    Matcher, PropertyValue, Strategy, Var,
};

#[test]
fn planted_root_is_unique_under_every_strategy() {
    let p = builtin_agile_lite();
    let m = Matcher::new();
    for (seed, edges) in [(1, 5_000), (2, 2_000), (3, 800)] {
        let (g, r) = generate(&GenConfig::new(seed, edges)).unwrap();
        for s in Strategy::ALL {
            assert_eq!(m.run(s, &g, &p).unwrap().roots, vec![r.planted_root], "seed {seed} {s}");
        }
    }
}

#[test]
fn every_clause_is_necessary_on_the_minimal_instance() {
    let p = builtin_agile_lite();
    let (g, r) = plant_minimal();
    for s in Strategy::ALL {
        assert_eq!(Matcher::new().run(s, &g, &p).unwrap().roots, vec![r.planted_root]);
    }
    for i in 0..p.clause_count() {
        let mutated = mutate_to_distractor(&g, &r, i).unwrap();
        for s in Strategy::ALL {
            let res = Matcher::new().run(s, &mutated, &p).unwrap();
            assert!(res.roots.is_empty(), "clause {i} ({}) under {s}", p.atom(i).unwrap());
        }
    }
}

#[test]
fn deleting_a_c_edge_or_rekeying_t22_breaks_the_match() {
    let p = builtin_agile_lite();
    let (g, r) = plant_minimal();
    let root = r.planted_root;
    let id_of = |v: &str| r.planted_witness[&Var::new(v)].as_id().unwrap();

    let edges: Vec<_> = g.edges().to_vec();
    let c = edges
        .iter()
        .position(|e| e.etype == EdgeType::C && e.src == root)
        .unwrap();
    let mut fewer = GraphStore::new(g.schema().clone());
    for v in g.vertices() {
        fewer.add_vertex(v.clone()).unwrap();
    }
    for (i, e) in edges.iter().enumerate() {
        if i != c {
            fewer.add_edge(e.clone()).unwrap();
        }
    }
    assert!(Matcher::new().unified(&fewer, &p).unwrap().roots.is_empty());

    let t22 = id_of("T22");
    let mut rekeyed = GraphStore::new(g.schema().clone());
    for v in g.vertices() {
        let mut v = v.clone();
        if v.id == t22 {
            v.props[1] = PropertyValue(v.props[1].0 + 1);
        }
        rekeyed.add_vertex(v).unwrap();
    }
    for e in g.edges() {
        rekeyed.add_edge(e.clone()).unwrap();
    }
    assert!(Matcher::new().unified(&rekeyed, &p).unwrap().roots.is_empty());
}

#[test]
fn out_of_range_clause_is_rejected() {
    let (g, r) = plant_minimal();
    let n = builtin_agile_lite().clause_count();
    assert!(matches!(
        mutate_to_distractor(&g, &r, n),
        Err(GenError::UnknownClause { index, count }) if index == n && count == n
    ));
}

/// Reference scale. Needs roughly 7 GB of memory.
#[test]
#[ignore]
fn thirty_eight_million_edges() {
    let target = 38_000_000usize;
    let (g, r) = generate(&GenConfig::new(2, target)).unwrap();
    assert!(g.edge_count().abs_diff(target) <= target / 100);
    let res = Matcher::new().unified(&g, &builtin_agile_lite()).unwrap();
    assert_eq!(res.roots, vec![r.planted_root]);
}

#[test]
fn two_disjoint_instances_give_two_roots() {
    let p = builtin_agile_lite();
    let (g, r) = plant_minimal();
    let shift = 1000;
    let mut both = g.clone();
    for v in g.vertices() {
        let mut v = v.clone();
        v.id.0 += shift;
        both.add_vertex(v).unwrap();
    }
    for e in g.edges() {
        let mut e = e.clone();
        e.src.0 += shift;
        e.dst.0 += shift;
        both.add_edge(e).unwrap();
    }
    let mut expected = vec![r.planted_root, patternforge::ObjectId(r.planted_root.0 + shift)];
    expected.sort();
    for s in Strategy::ALL {
        assert_eq!(Matcher::new().run(s, &both, &p).unwrap().roots, expected, "{s}");
    }
}

#[test]
fn restoring_a_deleted_fact_restores_the_match() {
    let p = builtin_agile_lite();
    let (g, r) = plant_minimal();
    let mut restored = 0;
    for i in 0..p.clause_count() {
        let mutated = mutate_to_distractor(&g, &r, i).unwrap();
        // Edges of the original that the mutation dropped, as a multiset.
        let mut missing = g.edges().to_vec();
        let subset = mutated
            .edges()
            .iter()
            .all(|e| match missing.iter().position(|x| x == e) {
                Some(k) => {
                    missing.swap_remove(k);
                    true
                }
                None => false,
            });
        if !subset || !mutated.vertices().iter().all(|v| g.vertices().contains(v)) {
            continue;
        }
        let mut vertices = mutated.vertices().to_vec();
        vertices.extend(g.vertices().iter().filter(|v| !mutated.vertices().contains(v)).cloned());
        let edges = mutated.edges().iter().cloned().chain(missing);
        let back = GraphStore::from_records(g.schema().clone(), vertices, edges).unwrap();
        assert_eq!(back.digest(), g.digest(), "clause {i}");
        assert_eq!(Matcher::new().unified(&back, &p).unwrap().roots, vec![r.planted_root]);
        restored += 1;
    }
    assert!(restored >= 20, "only {restored} deletions restored");
}
