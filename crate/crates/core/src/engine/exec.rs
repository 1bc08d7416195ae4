//! Depth-first, chronologically backtracking evaluation of a scheduled program.

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::plan::{Access, CAtom, CTerm, Compiled, Goal, Program, Raw};
use crate::graph::{GraphStore, ObjectId, PropertyValue};
use crate::pattern::{ConstraintKind, Role};
use crate::relations::Relations;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct Counters {
    pub atom_matches: u64,
    pub rule_firings: u64,
    pub backtracks: u64,
}

impl Counters {
    pub(crate) fn add(&mut self, other: Counters) {
        self.atom_matches += other.atom_matches;
        self.rule_firings += other.rule_firings;
        self.backtracks += other.backtracks;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Flow {
    Continue,
    Stop,
}

/// A materialized relation: `len` distinct rows of `width` values, row-major.
#[derive(Debug, Clone, Default)]
pub(crate) struct Table {
    pub width: usize,
    pub len: usize,
    pub data: Vec<Raw>,
}

impl Table {
    pub(crate) fn new(width: usize) -> Self {
        Table {
            width,
            len: 0,
            data: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, row: &[Raw]) {
        debug_assert_eq!(row.len(), self.width);
        self.data.extend_from_slice(row);
        self.len += 1;
    }

    pub(crate) fn row(&self, r: usize) -> &[Raw] {
        &self.data[r * self.width..(r + 1) * self.width]
    }
}

/// A relation prepared for one probe shape: rows grouped by key columns.
pub(crate) struct Probe {
    pub table: Table,
    pub by_key: FxHashMap<SmallVec<[Raw; 4]>, Vec<u32>>,
    pub all: Vec<u32>,
}

impl Probe {
    pub(crate) fn new(table: Table, key: &[usize]) -> Self {
        let mut by_key: FxHashMap<SmallVec<[Raw; 4]>, Vec<u32>> = FxHashMap::default();
        let n = table.len;
        let all: Vec<u32> = (0..n as u32).collect();
        if !key.is_empty() {
            for r in 0..n {
                let row = table.row(r);
                by_key
                    .entry(key.iter().map(|&c| row[c]).collect())
                    .or_default()
                    .push(r as u32);
            }
        }
        Probe { table, by_key, all }
    }
}

pub(crate) fn check(kind: ConstraintKind, role: Role, a: Raw, b: Raw, g: &GraphStore, rel: &dyn Relations) -> bool {
    match kind {
        ConstraintKind::Eq => a == b,
        ConstraintKind::Neq => a != b,
        ConstraintKind::Lt => match role {
            Role::Id => a < b,
            Role::Prop => (a as i64) < (b as i64),
        },
        ConstraintKind::Leq => match role {
            Role::Id => a <= b,
            Role::Prop => (a as i64) <= (b as i64),
        },
        ConstraintKind::Red => rel.red(g, ObjectId(a), ObjectId(b)),
        ConstraintKind::Green => rel.green(PropertyValue(a as i64), PropertyValue(b as i64)),
    }
}

pub(crate) struct Exec<'a> {
    g: &'a GraphStore,
    c: &'a Compiled,
    prog: &'a Program,
    rel: &'a dyn Relations,
    probes: &'a [Probe],
    heads: &'a [Vec<usize>],
    pub slots: Vec<Option<Raw>>,
    pub counters: Counters,
}

type Undo = SmallVec<[usize; 4]>;

impl<'a> Exec<'a> {
    pub(crate) fn new(
        g: &'a GraphStore,
        c: &'a Compiled,
        prog: &'a Program,
        rel: &'a dyn Relations,
        probes: &'a [Probe],
        heads: &'a [Vec<usize>],
        init: Vec<Option<Raw>>,
    ) -> Self {
        debug_assert_eq!(init.len(), c.slot_count());
        Exec {
            g,
            c,
            prog,
            rel,
            probes,
            heads,
            slots: init,
            counters: Counters::default(),
        }
    }

    pub(crate) fn run(&mut self, on_solution: &mut dyn FnMut(&[Option<Raw>]) -> Flow) -> Flow {
        self.step(0, on_solution)
    }

    fn value(&self, t: CTerm) -> Option<Raw> {
        match t {
            CTerm::Slot(s) => self.slots[s],
            CTerm::Const(v) => Some(v),
            CTerm::Wild => None,
        }
    }

    /// Unifies `t` with `v`, recording fresh bindings in `undo`.
    #[inline]
    fn unify(&mut self, t: CTerm, v: Raw, undo: &mut Undo) -> bool {
        match t {
            CTerm::Wild => true,
            CTerm::Const(c) => c == v,
            CTerm::Slot(s) => match self.slots[s] {
                Some(b) => b == v,
                None => {
                    self.slots[s] = Some(v);
                    undo.push(s);
                    true
                }
            },
        }
    }

    fn reset(&mut self, undo: &mut Undo) {
        for s in undo.drain(..) {
            self.slots[s] = None;
        }
    }

    fn step(&mut self, i: usize, cb: &mut dyn FnMut(&[Option<Raw>]) -> Flow) -> Flow {
        let (g, c, prog) = (self.g, self.c, self.prog);
        let Some(step) = prog.steps.get(i) else {
            return cb(&self.slots);
        };
        match step.goal {
            Goal::End(_) => {
                self.counters.rule_firings += 1;
                self.step(i + 1, cb)
            }
            Goal::Atom(ai) => match &c.atoms[ai] {
                CAtom::Check { kind, role, a, b } => {
                    let (a, b) = (
                        self.value(*a).expect("scheduled after binders"),
                        self.value(*b).expect("scheduled after binders"),
                    );
                    if check(*kind, *role, a, b, g, self.rel) {
                        self.counters.atom_matches += 1;
                        self.step(i + 1, cb)
                    } else {
                        Flow::Continue
                    }
                }
                CAtom::Vertex { vtype, id, props } => {
                    let (vtype, id) = (*vtype, *id);
                    let candidates: &[u32] = match &step.access {
                        Access::VertexById => {
                            let want = ObjectId(self.value(id).expect("bound id"));
                            return self.vertex_by_id(i, vtype, want, props, cb);
                        }
                        Access::VertexByProp { prop, value } => {
                            let v = self.value(*value).expect("bound property");
                            g.vertex_slots_with_prop(vtype, *prop, PropertyValue(v as i64))
                        }
                        _ => g.vertex_slots_of_type(vtype),
                    };
                    let mut undo = Undo::new();
                    for &vs in candidates {
                        let rec = g.vertex_at(vs);
                        let ok = self.unify(id, rec.id.0, &mut undo)
                            && props
                                .iter()
                                .zip(&rec.props)
                                .all(|(&t, p)| self.unify(t, p.0 as u64, &mut undo));
                        if ok {
                            self.counters.atom_matches += 1;
                            if self.step(i + 1, cb) == Flow::Stop {
                                self.reset(&mut undo);
                                return Flow::Stop;
                            }
                        }
                        self.reset(&mut undo);
                    }
                    self.counters.backtracks += 1;
                    Flow::Continue
                }
                CAtom::Edge { etype, src, dst, props } => {
                    let (etype, src, dst) = (*etype, *src, *dst);
                    let candidates: &[u32] = match step.access {
                        Access::EdgeOut => g.out_slots(ObjectId(self.value(src).expect("bound")), etype),
                        Access::EdgeIn => g.in_slots(ObjectId(self.value(dst).expect("bound")), etype),
                        Access::EdgeShorter => {
                            let out = g.out_slots(ObjectId(self.value(src).expect("bound")), etype);
                            let inc = g.in_slots(ObjectId(self.value(dst).expect("bound")), etype);
                            if inc.len() < out.len() {
                                inc
                            } else {
                                out
                            }
                        }
                        _ => g.edge_slots_of_type(etype),
                    };
                    let mut undo = Undo::new();
                    for &es in candidates {
                        let e = g.edge(es);
                        let ok = self.unify(src, e.src.0, &mut undo)
                            && self.unify(dst, e.dst.0, &mut undo)
                            && props
                                .iter()
                                .zip(&e.props)
                                .all(|(&t, p)| self.unify(t, p.0 as u64, &mut undo));
                        if ok {
                            self.counters.atom_matches += 1;
                            if self.step(i + 1, cb) == Flow::Stop {
                                self.reset(&mut undo);
                                return Flow::Stop;
                            }
                        }
                        self.reset(&mut undo);
                    }
                    self.counters.backtracks += 1;
                    Flow::Continue
                }
            },
            Goal::Relation(k) => {
                let Access::Relation { key, bind } = &step.access else {
                    unreachable!("relation step without relation access")
                };
                let probe = &self.probes[k];
                let head = &self.heads[k];
                let (probe, head): (&'a Probe, &'a Vec<usize>) = (probe, head);
                let rows: &[u32] = if key.is_empty() {
                    &probe.all
                } else {
                    let want: SmallVec<[Raw; 4]> = key
                        .iter()
                        .map(|&col| self.slots[head[col]].expect("key column bound"))
                        .collect();
                    probe.by_key.get(&want).map_or(&[], Vec::as_slice)
                };
                for &r in rows {
                    let row = probe.table.row(r as usize);
                    for &col in bind {
                        self.slots[head[col]] = Some(row[col]);
                    }
                    self.counters.atom_matches += 1;
                    let flow = self.step(i + 1, cb);
                    for &col in bind {
                        self.slots[head[col]] = None;
                    }
                    if flow == Flow::Stop {
                        return Flow::Stop;
                    }
                }
                self.counters.backtracks += 1;
                Flow::Continue
            }
        }
    }

    fn vertex_by_id(
        &mut self,
        i: usize,
        vtype: crate::graph::VertexType,
        want: ObjectId,
        props: &[CTerm],
        cb: &mut dyn FnMut(&[Option<Raw>]) -> Flow,
    ) -> Flow {
        let g = self.g;
        let mut flow = Flow::Continue;
        if let Some(rec) = g.vertex(want).filter(|r| r.vtype == vtype) {
            let mut undo = Undo::new();
            let ok = props
                .iter()
                .zip(&rec.props)
                .all(|(&t, p)| self.unify(t, p.0 as u64, &mut undo));
            if ok {
                self.counters.atom_matches += 1;
                flow = self.step(i + 1, cb);
            }
            self.reset(&mut undo);
        }
        if flow == Flow::Continue {
            self.counters.backtracks += 1;
        }
        flow
    }
}
