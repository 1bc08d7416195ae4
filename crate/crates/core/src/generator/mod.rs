//! Seeded synthesis of graphs with exactly one agile-lite match.
//!
//! A generated graph has three parts:
//!
//! * one planted instance, realizing every atom of the pattern;
//! * near misses: up to three copies of the instance whose core fails
//!   (`sub1`, `sub2` or red), and copies of the root side that reuse the
//!   planted core and each fail one root-side atom, cycling through them;
//! * background vertices and edges drawn among themselves only.
//!
//! Uniqueness holds by construction: the star marker is never carried by a
//! background A edge or a background D edge into a starred vertex, red keys
//! of instance vertices come from a range background never uses, and every
//! near miss lacks one fact the root needs.
//!
//! Randomness comes from ChaCha8 seeded with `seed`, one stream per phase.

mod config;
mod plant;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use config::ConfigParseError;
pub use plant::INSTANCE_EDGES;

use crate::engine::{Binding, Value};
use crate::graph::{EdgeRecord, EdgeType, GraphStore, ObjectId, PropertyValue, Schema, VertexType};
use crate::pattern::{builtin_agile_lite, Atom, ConstraintKind, Term, STAR};
use plant::{emit_instance, emit_root_distractor, Builder, CoreBreak, InstanceValues, RootBreak};

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    pub target_edges: usize,
    /// Fraction of edges spent on near misses.
    pub distractor_ratio: f64,
    /// Background vertex weights, indexed by [`VertexType::index`].
    pub type_mix: [f64; 5],
    /// Fraction of background type-2 vertices carrying the star marker.
    pub star_density: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            target_edges: 5_000,
            distractor_ratio: 0.1,
            type_mix: [0.30, 0.25, 0.05, 0.30, 0.10],
            star_density: 0.01,
        }
    }
}

impl GenConfig {
    pub fn new(seed: u64, target_edges: usize) -> Self {
        GenConfig {
            seed,
            target_edges,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.target_edges < INSTANCE_EDGES {
            return Err(GenError::ConfigTooSmall {
                target: self.target_edges,
                minimum: INSTANCE_EDGES,
            });
        }
        for (name, r) in [
            ("distractor_ratio", self.distractor_ratio),
            ("star_density", self.star_density),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return Err(GenError::InvalidConfig(format!("{name} must lie in [0, 1], got {r}")));
            }
        }
        if self.type_mix.iter().any(|w| !w.is_finite() || *w < 0.0) || self.type_mix.iter().sum::<f64>() <= 0.0 {
            return Err(GenError::InvalidConfig(
                "type_mix weights must be non-negative with a positive sum".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenReport {
    pub planted_root: ObjectId,
    /// Binding of every agile-lite variable for the planted instance.
    pub planted_witness: Binding,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub digest: u64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("target of {target} edges is below the planted instance size of {minimum}")]
    ConfigTooSmall { target: usize, minimum: usize },
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("clause index {index} out of range (pattern has {count} atoms)")]
    UnknownClause { index: usize, count: usize },
    #[error("planted witness lacks a value for {0}")]
    IncompleteWitness(String),
}

const PHASE_VALUES: u64 = 0;
const PHASE_VERTICES: u64 = 1;
const PHASE_EDGES: u64 = 2;
const PHASE_DISTRACTORS: u64 = 3;
const PHASE_SHUFFLE: u64 = 4;

/// Background red keys and wide property values lie at or above this.
const BACKGROUND_KEY_MIN: i64 = 1 << 32;
const BACKGROUND_KEY_MAX: i64 = 1 << 48;
/// Range of background type-4 first properties and A-edge properties.
const WIDE_MIN: i64 = 2;
const WIDE_MAX: i64 = 1 << 40;
/// Instance red keys: planted in `[2^16, 2^31)`, near-miss copies from `2^31`.
const PLANTED_KEY_MIN: i64 = 1 << 16;
const COPY_KEY_BASE: i64 = 1 << 31;
/// A-edge properties of `PaNotStar` near misses: above every wide value.
const ALT_PA_BASE: i64 = 1 << 41;
/// Background D edges into starred vertices draw from `[2, 100)`.
const OFF_STAR_MAX: i64 = 100;

/// Background vertices per requested edge.
const VERTICES_PER_EDGE: f64 = 0.25;
/// Background edge type weights; an A draw emits an A edge and its F reverse.
const EDGE_WEIGHTS: [(EdgeType, u32); 5] = [
    (EdgeType::A, 15),
    (EdgeType::B, 10),
    (EdgeType::C, 20),
    (EdgeType::D, 20),
    (EdgeType::E, 20),
];

fn instance_values(rng: &mut ChaCha8Rng, key1: i64, key2: i64, with_g4: bool) -> InstanceValues {
    InstanceValues {
        key1,
        key2,
        v4_p0: std::array::from_fn(|_| rng.gen_range(WIDE_MIN..WIDE_MAX)),
        v4_p2: rng.gen_range(0..1 << 20),
        a_to_z2: rng.gen_range(WIDE_MIN..WIDE_MAX),
        with_g4,
    }
}

fn phase(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Builds the graph described by `cfg`.
pub fn generate(cfg: &GenConfig) -> Result<(GraphStore, GenReport), GenError> {
    cfg.validate()?;
    let target = cfg.target_edges;

    let mut vrng = phase(cfg.seed, PHASE_VALUES);
    let salt = vrng.gen::<u64>();
    let bg_vertices = ((target as f64) * VERTICES_PER_EDGE).ceil() as usize;
    let mut b = Builder::scrambled(salt, bg_vertices + target / 4, target);

    let key = vrng.gen_range(PLANTED_KEY_MIN..COPY_KEY_BASE);
    let planted_values = instance_values(&mut vrng, key, key, true);
    let planted = emit_instance(&mut b, &planted_values, CoreBreak::None);

    let mut drng = phase(cfg.seed, PHASE_DISTRACTORS);
    let mut budget = ((target - INSTANCE_EDGES) as f64 * cfg.distractor_ratio).floor() as usize;
    for (j, brk) in [CoreBreak::Red, CoreBreak::Sub1, CoreBreak::Sub2]
        .into_iter()
        .enumerate()
    {
        if budget < INSTANCE_EDGES {
            break;
        }
        let k = COPY_KEY_BASE + 2 * j as i64;
        let k2 = if brk == CoreBreak::Red { k + 1 } else { k };
        let values = instance_values(&mut drng, k, k2, false);
        let before = b.edges.len();
        emit_instance(&mut b, &values, brk);
        budget -= b.edges.len() - before;
    }
    let mut near_misses = 0usize;
    loop {
        let brk = RootBreak::CYCLE[near_misses % RootBreak::CYCLE.len()];
        if budget < brk.edge_count() {
            break;
        }
        let values = instance_values(&mut drng, 0, 0, false);
        emit_root_distractor(&mut b, planted.v3, brk, &values, ALT_PA_BASE + near_misses as i64);
        budget -= brk.edge_count();
        near_misses += 1;
    }

    let remaining = target - b.edges.len();
    background(&mut b, cfg, remaining, bg_vertices)?;
    debug_assert_eq!(b.edges.len(), target);

    let mut srng = phase(cfg.seed, PHASE_SHUFFLE);
    b.vertices.shuffle(&mut srng);
    b.edges.shuffle(&mut srng);
    let g = GraphStore::from_records(Schema::default(), b.vertices, b.edges).expect("generated records fit the schema");
    let report = GenReport {
        planted_root: planted.x,
        planted_witness: planted.binding(planted.g4.expect("planted instance has G4")),
        vertex_count: g.vertex_count(),
        edge_count: g.edge_count(),
        digest: g.digest(),
    };
    log::info!(
        "generated {} vertices, {} edges ({} root-side near misses), planted root {}",
        report.vertex_count,
        report.edge_count,
        near_misses,
        report.planted_root
    );
    Ok((g, report))
}

fn background(b: &mut Builder, cfg: &GenConfig, edges: usize, vertices: usize) -> Result<(), GenError> {
    if edges == 0 {
        return Ok(());
    }
    let mut rng = phase(cfg.seed, PHASE_VERTICES);
    let total: f64 = cfg.type_mix.iter().sum();
    let mut pools: [Vec<ObjectId>; 5] = Default::default();
    let mut starred: Vec<bool> = Vec::new();
    for t in VertexType::ALL {
        let w = cfg.type_mix[t.index()];
        let n = if w > 0.0 {
            ((vertices as f64 * w / total).round() as usize).max(1)
        } else {
            0
        };
        for _ in 0..n {
            let id = match t {
                VertexType::V2 => {
                    let star = rng.gen_bool(cfg.star_density);
                    starred.push(star);
                    let key = rng.gen_range(BACKGROUND_KEY_MIN..BACKGROUND_KEY_MAX);
                    b.vertex(t, &[if star { STAR } else { 0 }, key])
                }
                VertexType::V4 => {
                    let p0 = rng.gen_range(WIDE_MIN..WIDE_MAX);
                    let p2 = rng.gen_range(0..1 << 20);
                    b.vertex(t, &[p0, p2])
                }
                _ => b.vertex(t, &[]),
            };
            pools[t.index()].push(id);
        }
    }

    let has = |t: VertexType| !pools[t.index()].is_empty();
    let feasible = |e: EdgeType| match e {
        EdgeType::A => has(VertexType::V1),
        EdgeType::B => has(VertexType::V3) && has(VertexType::V4),
        EdgeType::C => has(VertexType::V1) && has(VertexType::V4),
        EdgeType::D => has(VertexType::V4) && has(VertexType::V2),
        EdgeType::E => has(VertexType::V1) && has(VertexType::V5),
        EdgeType::F => false,
    };
    let kinds: Vec<(EdgeType, u32)> = EDGE_WEIGHTS.into_iter().filter(|&(e, _)| feasible(e)).collect();
    let singles: Vec<(EdgeType, u32)> = kinds.iter().copied().filter(|&(e, _)| e != EdgeType::A).collect();
    if singles.is_empty() {
        return Err(GenError::InvalidConfig(
            "type_mix leaves no background edge type with both endpoint types present".into(),
        ));
    }
    let pick_all = WeightedIndex::new(kinds.iter().map(|k| k.1)).expect("positive weights");
    let pick_single = WeightedIndex::new(singles.iter().map(|k| k.1)).expect("positive weights");

    let mut rng = phase(cfg.seed, PHASE_EDGES);
    let mut left = edges;
    let pick = |rng: &mut ChaCha8Rng, t: VertexType| -> (usize, ObjectId) {
        let pool = &pools[t.index()];
        let i = rng.gen_range(0..pool.len());
        (i, pool[i])
    };
    while left > 0 {
        let etype = if left >= 2 {
            kinds[pick_all.sample(&mut rng)].0
        } else {
            singles[pick_single.sample(&mut rng)].0
        };
        match etype {
            EdgeType::A => {
                let (_, src) = pick(&mut rng, VertexType::V1);
                let dst_type = if has(VertexType::V2) && rng.gen_bool(0.5) {
                    VertexType::V2
                } else {
                    VertexType::V1
                };
                let (_, dst) = pick(&mut rng, dst_type);
                b.a_pair(src, dst, rng.gen_range(WIDE_MIN..WIDE_MAX));
                left -= 2;
                continue;
            }
            EdgeType::B => {
                let (_, s) = pick(&mut rng, VertexType::V3);
                let (_, d) = pick(&mut rng, VertexType::V4);
                b.edge(s, d, etype, &[]);
            }
            EdgeType::C => {
                let (_, s) = pick(&mut rng, VertexType::V1);
                let (_, d) = pick(&mut rng, VertexType::V4);
                b.edge(s, d, etype, &[]);
            }
            EdgeType::D => {
                let (_, s) = pick(&mut rng, VertexType::V4);
                let (i, d) = pick(&mut rng, VertexType::V2);
                let p = if starred[i] {
                    rng.gen_range(2..OFF_STAR_MAX)
                } else {
                    STAR
                };
                b.edge(s, d, etype, &[p]);
            }
            EdgeType::E => {
                let (_, s) = pick(&mut rng, VertexType::V1);
                let (_, d) = pick(&mut rng, VertexType::V5);
                b.edge(s, d, etype, &[]);
            }
            EdgeType::F => unreachable!("F edges only pair A edges"),
        }
        left -= 1;
    }
    Ok(())
}

/// The smallest agile-lite graph: one vertex per pattern variable, ids
/// 1..=13 in the order `T21 T22 W1 W2 V3 X S5 Y1 G4 Z2 U1 U2 U3`.
pub fn plant_minimal() -> (GraphStore, GenReport) {
    let mut b = Builder::sequential();
    let values = InstanceValues {
        key1: 7,
        key2: 7,
        v4_p0: [40, 41, 42, 43, 44],
        v4_p2: 0,
        a_to_z2: 9,
        with_g4: true,
    };
    let inst = emit_instance(&mut b, &values, CoreBreak::None);
    let g = GraphStore::from_records(Schema::default(), b.vertices, b.edges).expect("fixture fits the schema");
    let report = GenReport {
        planted_root: inst.x,
        planted_witness: inst.binding(inst.g4.expect("minimal instance has G4")),
        vertex_count: g.vertex_count(),
        edge_count: g.edge_count(),
        digest: g.digest(),
    };
    (g, report)
}

/// Property value no generated fact carries.
const POISON: i64 = i64::MIN;

/// Copy of `g` in which the fact supporting agile-lite atom `clause_index`
/// under the report's witness is removed or altered:
///
/// * vertex atom: the vertex is removed;
/// * edge atom: the matching edge is removed;
/// * `eq`, `lt`, `leq`, `green`: the property feeding the second argument is
///   set to a value no fact carries;
/// * `red`: the key of the second vertex is poisoned;
/// * `neq(A, B)`: `B` is merged into `A` (its edges redirected, it removed).
pub fn mutate_to_distractor(g: &GraphStore, report: &GenReport, clause_index: usize) -> Result<GraphStore, GenError> {
    let p = builtin_agile_lite();
    let count = p.clause_count();
    let atom = p.atom(clause_index).ok_or(GenError::UnknownClause {
        index: clause_index,
        count,
    })?;
    let w = &report.planted_witness;
    let value = |t: &Term| -> Result<Option<Value>, GenError> {
        Ok(match t {
            Term::Var(v) => Some(*w.get(v).ok_or_else(|| GenError::IncompleteWitness(v.to_string()))?),
            Term::Id(id) => Some(Value::Id(*id)),
            Term::Prop(pv) => Some(Value::Prop(*pv)),
            Term::Wild => None,
        })
    };
    let id_of = |t: &Term| -> Result<ObjectId, GenError> {
        value(t)?
            .and_then(Value::as_id)
            .ok_or_else(|| GenError::IncompleteWitness(t.to_string()))
    };

    let mut vertices = g.vertices().to_vec();
    let mut edges = g.edges().to_vec();
    let schema = g.schema().clone();

    match atom {
        Atom::Vertex { vtype, args } => {
            let id = id_of(&args[schema.vertex(*vtype).id_pos])?;
            vertices.retain(|v| v.id != id);
        }
        Atom::Edge { etype, src, dst, props } => {
            let want: Vec<Option<Value>> = [src, dst]
                .into_iter()
                .chain(props)
                .map(value)
                .collect::<Result<_, _>>()?;
            let fits = |e: &EdgeRecord| {
                let have = [Value::Id(e.src), Value::Id(e.dst)]
                    .into_iter()
                    .chain(e.props.iter().map(|&p| Value::Prop(p)));
                e.etype == *etype && want.iter().zip(have).all(|(w, h)| w.is_none_or(|w| w == h))
            };
            if let Some(i) = edges.iter().position(fits) {
                edges.remove(i);
            }
        }
        Atom::Constraint { kind, args } => match kind {
            ConstraintKind::Neq => {
                let (keep, gone) = (id_of(&args[0])?, id_of(&args[1])?);
                vertices.retain(|v| v.id != gone);
                for e in &mut edges {
                    if e.src == gone {
                        e.src = keep;
                    }
                    if e.dst == gone {
                        e.dst = keep;
                    }
                }
            }
            ConstraintKind::Red => {
                let t = id_of(&args[1])?;
                let rk = crate::relations::RED_KEY;
                for v in vertices.iter_mut().filter(|v| v.id == t) {
                    v.props[rk] = PropertyValue(POISON);
                }
            }
            ConstraintKind::Eq | ConstraintKind::Lt | ConstraintKind::Leq | ConstraintKind::Green => {
                let var = args[1]
                    .as_var()
                    .or_else(|| args[0].as_var())
                    .ok_or_else(|| GenError::IncompleteWitness(atom.to_string()))?;
                poison_source(&p, w, var, &schema, &mut vertices, &mut edges)?;
            }
        },
    }
    Ok(GraphStore::from_records(schema, vertices, edges).expect("mutation keeps arities"))
}

/// Sets the property behind `var` in the first positive atom mentioning it.
fn poison_source(
    p: &crate::pattern::Pattern,
    w: &Binding,
    var: &crate::pattern::Var,
    schema: &Schema,
    vertices: &mut [crate::graph::VertexRecord],
    edges: &mut [EdgeRecord],
) -> Result<(), GenError> {
    let bound = |t: &Term| match t {
        Term::Var(v) => w.get(v).copied(),
        Term::Id(id) => Some(Value::Id(*id)),
        Term::Prop(pv) => Some(Value::Prop(*pv)),
        Term::Wild => None,
    };
    for (_, atom) in p.atoms() {
        match atom {
            Atom::Vertex { vtype, args } => {
                let shape = schema.vertex(*vtype);
                let Some(pos) = args.iter().position(|t| t.as_var() == Some(var)) else {
                    continue;
                };
                let Some(prop) = shape.arg_prop(pos) else { continue };
                let Some(Value::Id(id)) = bound(&args[shape.id_pos]) else {
                    continue;
                };
                for v in vertices.iter_mut().filter(|v| v.id == id) {
                    v.props[prop] = PropertyValue(POISON);
                }
                return Ok(());
            }
            Atom::Edge { etype, src, dst, props } => {
                let Some(pos) = props.iter().position(|t| t.as_var() == Some(var)) else {
                    continue;
                };
                let want: Vec<Option<Value>> = [src, dst].into_iter().chain(props).map(bound).collect();
                for e in edges.iter_mut().filter(|e| e.etype == *etype) {
                    let have = [Value::Id(e.src), Value::Id(e.dst)]
                        .into_iter()
                        .chain(e.props.iter().map(|&p| Value::Prop(p)));
                    if want.iter().zip(have).all(|(w, h)| w.is_none_or(|w| w == h)) {
                        e.props[pos] = PropertyValue(POISON);
                        return Ok(());
                    }
                }
                return Ok(());
            }
            Atom::Constraint { .. } => {}
        }
    }
    Err(GenError::IncompleteWitness(var.to_string()))
}
