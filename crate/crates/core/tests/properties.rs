use std::collections::BTreeSet;

use proptest::prelude::*;

use patternforge::io::{load_facts, load_tsv, save_facts, save_tsv, FactSchema};
use patternforge::pattern::unparse;
use patternforge::{
    builtin_agile_lite, generate, parse_pattern, EdgeRecord, EdgeType, GenConfig, GraphStore, Matcher, Pattern, Schema,
    Strategy as Plan, VertexRecord, VertexType,
};

/// Vertex ids `1..=n`, plus edges that may dangle up to `n + 2`.
fn graph(max_vertices: u64, max_edges: usize) -> impl proptest::strategy::Strategy<Value = GraphStore> {
    (1..=max_vertices).prop_flat_map(move |n| {
        let vertex = (0..5usize, 0..3i64, 0..3i64);
        let edge = (1..=n + 2, 1..=n + 2, 0..6usize, 0..3i64);
        (
            prop::collection::vec(vertex, n as usize),
            prop::collection::vec(edge, 0..=max_edges),
        )
            .prop_map(|(vs, es)| {
                let mut g = GraphStore::new(Schema::default());
                for (i, (t, a, b)) in vs.into_iter().enumerate() {
                    let vt = VertexType::ALL[t];
                    let props = [a, b];
                    let k = g.schema().vertex_props(vt);
                    g.add_vertex(VertexRecord::new(i as u64 + 1, vt, &props[..k])).unwrap();
                }
                for (s, d, t, p) in es {
                    let et = EdgeType::ALL[t];
                    let k = g.schema().edge_props(et);
                    g.add_edge(EdgeRecord::new(s, d, et, &[p][..k])).unwrap();
                }
                g
            })
    })
}

const IDS: [&str; 4] = ["X", "A", "B", "C"];
const PROPS: [&str; 2] = ["P", "Q"];

fn id_term() -> impl proptest::strategy::Strategy<Value = String> {
    prop::sample::select(&IDS[..]).prop_map(str::to_string)
}

fn prop_term() -> impl proptest::strategy::Strategy<Value = String> {
    prop_oneof![
        3 => prop::sample::select(&PROPS[..]).prop_map(str::to_string),
        1 => (0..3i64).prop_map(|c| c.to_string()),
        1 => Just("_".to_string()),
    ]
}

fn atom() -> impl proptest::strategy::Strategy<Value = String> {
    let vertex = (1..=5u8, id_term(), prop_term(), prop_term()).prop_map(|(t, v, a, b)| match t {
        2 => format!("vertex2({v}, {a}, {b})"),
        4 => format!("vertex4({a}, {v}, {b})"),
        _ => format!("vertex{t}({v})"),
    });
    let edge = (0..6usize, id_term(), id_term(), prop_term()).prop_map(|(t, s, d, p)| match t {
        0 | 3 => format!("edge{}({s}, {d}, {p})", "ABCDEF".as_bytes()[t] as char),
        _ => format!("edge{}({s}, {d})", "ABCDEF".as_bytes()[t] as char),
    });
    let pterm = || {
        prop_oneof![
            3 => prop::sample::select(&PROPS[..]).prop_map(str::to_string),
            1 => (0..3i64).prop_map(|c| c.to_string()),
        ]
    };
    let constraint = prop_oneof![
        (id_term(), id_term()).prop_map(|(a, b)| format!("neq({a}, {b})")),
        (id_term(), id_term()).prop_map(|(a, b)| format!("red({a}, {b})")),
        (
            prop::sample::select(&["eq", "lt", "leq", "green"][..]),
            pterm(),
            pterm()
        )
            .prop_map(|(k, a, b)| format!("{k}({a}, {b})")),
    ];
    prop_oneof![3 => vertex, 4 => edge, 2 => constraint]
}

/// Well-formed patterns rooted at `X`, one to three subpatterns.
fn pattern() -> impl proptest::strategy::Strategy<Value = Pattern> {
    (
        prop::sample::select(&["vertex1(X)", "edgeC(X, A)", "edgeF(A, X)", "edgeA(X, A, P)"][..]),
        prop::collection::vec(atom(), 0..6),
        0..3usize,
        0..3usize,
    )
        .prop_filter_map("ill-formed pattern", |(first, rest, cut1, cut2)| {
            let mut atoms = vec![first.to_string()];
            atoms.extend(rest);
            let n = atoms.len();
            let (a, b) = (cut1.min(n), (cut1 + cut2).min(n));
            let mut src = String::from("root X.\n");
            for (k, chunk) in [&atoms[..a], &atoms[a..b], &atoms[b..]].into_iter().enumerate() {
                if !chunk.is_empty() {
                    src.push_str(&format!("sub s{k}: {}.\n", chunk.join(", ")));
                }
            }
            let p = parse_pattern(&src).ok()?;
            p.validate(&Schema::default()).is_empty().then_some(p)
        })
}

fn roots(m: &Matcher, s: Plan, g: &GraphStore, p: &Pattern) -> Vec<patternforge::ObjectId> {
    m.run(s, g, p).unwrap().roots
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn strategies_agree_on_random_graphs(g in graph(8, 24), p in pattern()) {
        let m = Matcher::new();
        let oracle = roots(&m, Plan::Bruteforce, &g, &p);
        prop_assert_eq!(&roots(&m, Plan::Unified, &g, &p), &oracle, "{}", unparse(&p));
        prop_assert_eq!(&roots(&m, Plan::Subpattern, &g, &p), &oracle, "{}", unparse(&p));
    }

    #[test]
    fn every_root_has_a_certified_witness(g in graph(8, 24), p in pattern()) {
        let m = Matcher::new();
        for r in roots(&m, Plan::Unified, &g, &p) {
            let w = m.witness(&g, &p, r).unwrap().expect("reported root has a witness");
            prop_assert!(m.certify(&g, &p, &w).is_ok());
        }
    }

    #[test]
    fn counters_are_deterministic(g in graph(8, 24), p in pattern()) {
        let m = Matcher::new();
        for s in Plan::ALL {
            let a = m.run(s, &g, &p).unwrap();
            let b = m.run(s, &g, &p).unwrap();
            prop_assert_eq!(a.roots, b.roots);
            prop_assert_eq!(
                (a.stats.atom_matches, a.stats.rule_firings, a.stats.backtracks),
                (b.stats.atom_matches, b.stats.rule_firings, b.stats.backtracks)
            );
        }
    }

    #[test]
    fn adding_facts_never_removes_a_root(g in graph(6, 16), extra in graph(6, 16), p in pattern()) {
        let m = Matcher::new();
        let before = roots(&m, Plan::Unified, &g, &p);
        let mut bigger = g.clone();
        let shift = 6;
        for v in extra.vertices() {
            let props: Vec<i64> = v.props.iter().map(|p| p.0).collect();
            bigger.add_vertex(VertexRecord::new(v.id.0 + shift, v.vtype, &props)).unwrap();
        }
        for e in extra.edges() {
            let props: Vec<i64> = e.props.iter().map(|p| p.0).collect();
            // Endpoints land on both the old and the new id ranges.
            bigger.add_edge(EdgeRecord::new(e.src.0 + shift, e.dst.0, e.etype, &props)).unwrap();
        }
        let after: BTreeSet<_> = roots(&m, Plan::Unified, &bigger, &p).into_iter().collect();
        prop_assert!(before.iter().all(|r| after.contains(r)));
    }

    #[test]
    fn pattern_text_round_trips(p in pattern()) {
        let text = unparse(&p);
        prop_assert_eq!(parse_pattern(&text).unwrap(), p);
    }

    #[test]
    fn graph_files_round_trip(g in graph(12, 40)) {
        let mut facts = Vec::new();
        save_facts(&g, &mut facts).unwrap();
        let (back, _) = load_facts(facts.as_slice(), &FactSchema::default()).unwrap();
        prop_assert_eq!(back.digest(), g.digest());

        let mut tsv = Vec::new();
        save_tsv(&g, &mut tsv).unwrap();
        let back = load_tsv(tsv.as_slice(), &Schema::default()).unwrap();
        prop_assert_eq!(back.digest(), g.digest());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_graphs_hold_their_contract(seed in any::<u64>(), edges in 15usize..3000) {
        let cfg = GenConfig::new(seed, edges);
        let (g, r) = generate(&cfg).unwrap();
        prop_assert_eq!(g.edge_count(), edges);
        prop_assert_eq!(r.digest, g.digest());
        prop_assert_eq!(generate(&cfg).unwrap().1.digest, r.digest);

        let pairs: BTreeSet<_> = g.edges().iter().filter(|e| e.etype == EdgeType::F).map(|e| (e.src, e.dst)).collect();
        let a: Vec<_> = g.edges().iter().filter(|e| e.etype == EdgeType::A).collect();
        prop_assert_eq!(a.len(), g.edges().iter().filter(|e| e.etype == EdgeType::F).count());
        prop_assert!(a.iter().all(|e| pairs.contains(&(e.dst, e.src))));

        let p = builtin_agile_lite();
        let m = Matcher::new();
        prop_assert!(m.certify(&g, &p, &r.planted_witness).is_ok());
        let u = m.unified(&g, &p).unwrap();
        let s = m.subpattern(&g, &p).unwrap();
        prop_assert_eq!(&u.roots, &vec![r.planted_root]);
        prop_assert_eq!(&s.roots, &u.roots);
        prop_assert!(s.stats.atom_matches >= u.stats.atom_matches);
    }
}
