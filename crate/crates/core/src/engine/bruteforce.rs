//! Index-free reference evaluation, used as the oracle for the other
//! strategies. Works on the source pattern, not on the compiled form.
//!
//! Positive atoms are enumerated in written order against every fact of
//! their predicate; each constraint is tested once its variables are bound.

use std::collections::BTreeSet;

use super::exec::Counters;
use super::{MatchError, Value};
use crate::graph::{EdgeType, GraphStore, ObjectId, PropertyValue, VertexType};
use crate::pattern::{Atom, ConstraintKind, Pattern, Term, Var};
use crate::relations::Relations;

/// A fact as a flat argument tuple in surface order.
type Fact = Vec<Value>;

struct Search<'a> {
    g: &'a GraphStore,
    rel: &'a dyn Relations,
    positives: Vec<(Vec<BTerm>, &'a [Fact])>,
    /// Constraints to test right after positive atom `i` (index `i + 1`), or
    /// before any positive atom (index 0).
    checks_after: Vec<Vec<(ConstraintKind, [BTerm; 2])>>,
    root: usize,
    binding: Vec<Option<Value>>,
    examined: u64,
    limit: u64,
    counters: Counters,
    roots: BTreeSet<ObjectId>,
}

pub(super) fn run(
    g: &GraphStore,
    p: &Pattern,
    rel: &dyn Relations,
    limit: u64,
) -> Result<(BTreeSet<ObjectId>, Counters), MatchError> {
    let schema = g.schema();
    let mut vfacts: Vec<Vec<Fact>> = vec![Vec::new(); VertexType::ALL.len()];
    for v in g.vertices() {
        let shape = schema.vertex(v.vtype);
        let fact = (0..shape.arity)
            .map(|i| match shape.arg_prop(i) {
                None => Value::Id(v.id),
                Some(pi) => Value::Prop(v.props[pi]),
            })
            .collect();
        vfacts[v.vtype.index()].push(fact);
    }
    let mut efacts: Vec<Vec<Fact>> = vec![Vec::new(); EdgeType::ALL.len()];
    for e in g.edges() {
        let mut fact = vec![Value::Id(e.src), Value::Id(e.dst)];
        fact.extend(e.props.iter().map(|&p| Value::Prop(p)));
        efacts[e.etype.index()].push(fact);
    }

    let vars = p.vars();
    let mut positives = Vec::new();
    let mut checks_after = vec![Vec::new()];
    let mut pending: Vec<(ConstraintKind, [BTerm; 2])> = Vec::new();
    let mut bound: BTreeSet<usize> = BTreeSet::new();
    let ready = |c: &(ConstraintKind, [BTerm; 2]), bound: &BTreeSet<usize>| {
        c.1.iter().all(|t| !matches!(t, BTerm::Slot(s) if !bound.contains(s)))
    };
    for (_, atom) in p.atoms() {
        match atom {
            Atom::Constraint { kind, args } => {
                let c = (*kind, [BTerm::new(&args[0], &vars), BTerm::new(&args[1], &vars)]);
                if ready(&c, &bound) {
                    checks_after.last_mut().expect("nonempty").push(c);
                } else {
                    pending.push(c);
                }
            }
            Atom::Vertex { .. } | Atom::Edge { .. } => {
                let facts: &[Fact] = match atom {
                    Atom::Vertex { vtype, .. } => &vfacts[vtype.index()],
                    Atom::Edge { etype, .. } => &efacts[etype.index()],
                    Atom::Constraint { .. } => unreachable!(),
                };
                let terms = atom.terms().into_iter().map(|t| BTerm::new(t, &vars)).collect();
                positives.push((terms, facts));
                bound.extend(
                    atom.vars()
                        .map(|v| vars.iter().position(|w| w == v).expect("pattern variable")),
                );
                let mut now = Vec::new();
                pending.retain(|c| {
                    if ready(c, &bound) {
                        now.push(*c);
                        false
                    } else {
                        true
                    }
                });
                checks_after.push(now);
            }
        }
    }
    debug_assert!(pending.is_empty());

    let mut s = Search {
        g,
        rel,
        root: vars
            .iter()
            .position(|v| v == p.projection())
            .expect("projection occurs"),
        binding: vec![None; vars.len()],
        positives,
        checks_after,
        examined: 0,
        limit,
        counters: Counters::default(),
        roots: BTreeSet::new(),
    };
    if s.checks(0) {
        s.descend(0)?;
    }
    Ok((s.roots, s.counters))
}

#[derive(Debug, Clone, Copy)]
enum BTerm {
    Slot(usize),
    Const(Value),
    Wild,
}

impl BTerm {
    fn new(t: &Term, vars: &[Var]) -> Self {
        match t {
            Term::Var(v) => BTerm::Slot(vars.iter().position(|w| w == v).expect("pattern variable")),
            Term::Id(id) => BTerm::Const(Value::Id(*id)),
            Term::Prop(p) => BTerm::Const(Value::Prop(*p)),
            Term::Wild => BTerm::Wild,
        }
    }
}

impl Search<'_> {
    fn value(&self, t: BTerm) -> Value {
        match t {
            BTerm::Slot(s) => self.binding[s].expect("bound before check"),
            BTerm::Const(v) => v,
            BTerm::Wild => unreachable!("wildcard in constraint"),
        }
    }

    fn holds(&self, kind: ConstraintKind, a: Value, b: Value) -> bool {
        let ord = || match (a, b) {
            (Value::Id(x), Value::Id(y)) => Some(x.0.cmp(&y.0)),
            (Value::Prop(x), Value::Prop(y)) => Some(x.0.cmp(&y.0)),
            _ => None,
        };
        match kind {
            ConstraintKind::Eq => ord() == Some(std::cmp::Ordering::Equal),
            ConstraintKind::Neq => ord() != Some(std::cmp::Ordering::Equal),
            ConstraintKind::Lt => ord() == Some(std::cmp::Ordering::Less),
            ConstraintKind::Leq => matches!(ord(), Some(o) if o.is_le()),
            ConstraintKind::Red => match (a, b) {
                (Value::Id(x), Value::Id(y)) => self.rel.red(self.g, x, y),
                _ => false,
            },
            ConstraintKind::Green => {
                let p = |v: Value| match v {
                    Value::Prop(p) => p,
                    Value::Id(id) => PropertyValue(id.0 as i64),
                };
                self.rel.green(p(a), p(b))
            }
        }
    }

    fn checks(&mut self, i: usize) -> bool {
        for k in 0..self.checks_after[i].len() {
            let (kind, [a, b]) = self.checks_after[i][k];
            let (a, b) = (self.value(a), self.value(b));
            if !self.holds(kind, a, b) {
                return false;
            }
            self.counters.atom_matches += 1;
        }
        true
    }

    fn descend(&mut self, i: usize) -> Result<(), MatchError> {
        if i == self.positives.len() {
            self.counters.rule_firings += 1;
            if let Some(Value::Id(r)) = self.binding[self.root] {
                self.roots.insert(r);
            }
            return Ok(());
        }
        let facts = self.positives[i].1;
        for fact in facts {
            self.examined += 1;
            if self.examined > self.limit {
                return Err(MatchError::SizeGuard { limit: self.limit });
            }
            let mut fresh: Vec<usize> = Vec::new();
            let mut ok = true;
            for (k, &val) in fact.iter().enumerate() {
                match self.positives[i].0[k] {
                    BTerm::Wild => {}
                    BTerm::Const(c) => ok = c == val,
                    BTerm::Slot(s) => match self.binding[s] {
                        Some(b) => ok = b == val,
                        None => {
                            self.binding[s] = Some(val);
                            fresh.push(s);
                        }
                    },
                }
                if !ok {
                    break;
                }
            }
            if ok {
                self.counters.atom_matches += 1;
                if self.checks(i + 1) {
                    self.descend(i + 1)?;
                }
            }
            for s in fresh {
                self.binding[s] = None;
            }
        }
        Ok(())
    }
}
