//! Compilation of a pattern into slot-addressed atoms, and scheduling of a
//! goal sequence into a program with one access path per step.
//!
//! Evaluation is strictly left to right, so the set of bound variables before
//! each goal is known statically. Access paths are picked from that set:
//!
//! * vertex atom: id bound -> id lookup; a property bound -> property index;
//!   otherwise a property equated by a later `eq` (or equality `green`) with
//!   an already bound value -> property index; otherwise type scan.
//! * edge atom: both ends bound -> shorter of out/in list; src bound -> out
//!   index; dst bound -> in index; otherwise scan of the edge type.
//!
//! Constraints run as soon as all their variables are bound; one written
//! before its binder is deferred to just after the binding atom.

use std::ops::Range;

use crate::graph::{EdgeType, Schema, VertexType};
use crate::pattern::{Atom, ConstraintKind, Pattern, PatternReport, Role, Term, Var};

/// Bit pattern of a bound value. Properties are stored as their two's
/// complement bits; the slot's [`Role`] says how to order them.
pub(crate) type Raw = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum CTerm {
    Slot(usize),
    Const(Raw),
    Wild,
}

impl CTerm {
    fn slot(self) -> Option<usize> {
        match self {
            CTerm::Slot(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum CAtom {
    Vertex {
        vtype: VertexType,
        id: CTerm,
        /// In property order (fact layout minus the id argument).
        props: Vec<CTerm>,
    },
    Edge {
        etype: EdgeType,
        src: CTerm,
        dst: CTerm,
        props: Vec<CTerm>,
    },
    Check {
        kind: ConstraintKind,
        role: Role,
        a: CTerm,
        b: CTerm,
    },
}

impl CAtom {
    pub(crate) fn slots(&self) -> impl Iterator<Item = usize> + '_ {
        let terms: Vec<CTerm> = match self {
            CAtom::Vertex { id, props, .. } => std::iter::once(*id).chain(props.iter().copied()).collect(),
            CAtom::Edge { src, dst, props, .. } => [*src, *dst].into_iter().chain(props.iter().copied()).collect(),
            CAtom::Check { a, b, .. } => vec![*a, *b],
        };
        terms.into_iter().filter_map(CTerm::slot)
    }

    fn is_check(&self) -> bool {
        matches!(self, CAtom::Check { .. })
    }
}

/// A validated pattern with variables numbered by first occurrence.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub vars: Vec<Var>,
    pub roles: Vec<Role>,
    pub root: usize,
    pub atoms: Vec<CAtom>,
    pub subs: Vec<Range<usize>>,
}

impl Compiled {
    pub(crate) fn new(p: &Pattern, schema: &Schema) -> Result<Self, PatternReport> {
        let report = p.validate(schema);
        if !report.is_empty() {
            return Err(report);
        }
        let roles_by_var = p.var_roles(schema).expect("validated pattern has consistent roles");
        let vars = p.vars();
        let slot = |v: &Var| vars.iter().position(|w| w == v).expect("variable collected");
        let term = |t: &Term| match t {
            Term::Var(v) => CTerm::Slot(slot(v)),
            Term::Id(id) => CTerm::Const(id.0),
            Term::Prop(pv) => CTerm::Const(pv.0 as u64),
            Term::Wild => CTerm::Wild,
        };

        let mut atoms = Vec::with_capacity(p.clause_count());
        let mut subs = Vec::with_capacity(p.subpatterns().len());
        for s in p.subpatterns() {
            let start = atoms.len();
            for a in &s.atoms {
                atoms.push(match a {
                    Atom::Vertex { vtype, args } => {
                        let shape = schema.vertex(*vtype);
                        let props = (0..shape.props()).map(|i| term(&args[shape.prop_arg(i)])).collect();
                        CAtom::Vertex {
                            vtype: *vtype,
                            id: term(&args[shape.id_pos]),
                            props,
                        }
                    }
                    Atom::Edge { etype, src, dst, props } => CAtom::Edge {
                        etype: *etype,
                        src: term(src),
                        dst: term(dst),
                        props: props.iter().map(term).collect(),
                    },
                    Atom::Constraint { kind, args } => {
                        let role = kind.arg_role().unwrap_or_else(|| {
                            args.iter()
                                .filter_map(Term::as_var)
                                .map(|v| roles_by_var[v])
                                .next()
                                .unwrap_or(match &args[0] {
                                    Term::Id(_) => Role::Id,
                                    _ => Role::Prop,
                                })
                        });
                        CAtom::Check {
                            kind: *kind,
                            role,
                            a: term(&args[0]),
                            b: term(&args[1]),
                        }
                    }
                });
            }
            subs.push(start..atoms.len());
        }
        let roles = vars.iter().map(|v| roles_by_var[v]).collect();
        Ok(Compiled {
            root: slot(p.projection()),
            vars,
            roles,
            atoms,
            subs,
        })
    }

    pub(crate) fn slot_count(&self) -> usize {
        self.vars.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Rule {
    Root,
    Sub(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Goal {
    Atom(usize),
    /// A rule body has been satisfied; its head is asserted.
    End(Rule),
    /// Probe a materialized relation (subpattern join phase).
    Relation(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Access {
    Direct,
    VertexById,
    VertexByProp {
        prop: usize,
        value: CTerm,
    },
    VertexScan,
    EdgeOut,
    EdgeIn,
    EdgeShorter,
    EdgeScan,
    /// Relation probe: `key` columns are bound on entry, `bind` columns are not.
    Relation {
        key: Vec<usize>,
        bind: Vec<usize>,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct Step {
    pub goal: Goal,
    pub access: Access,
}

#[derive(Debug, Clone)]
pub(crate) struct Program {
    pub steps: Vec<Step>,
}

/// Schedules `goals` for left-to-right evaluation. `heads[k]` lists the slots
/// of relation `k` for `Goal::Relation(k)`.
pub(crate) fn schedule(
    c: &Compiled,
    goals: &[Goal],
    prebound: Vec<bool>,
    heads: &[Vec<usize>],
    green_is_equality: bool,
) -> Program {
    let mut bound = prebound;
    let mut steps: Vec<Step> = Vec::with_capacity(goals.len());
    let mut bound_before: Vec<Vec<bool>> = Vec::with_capacity(goals.len());
    let mut pending: Vec<usize> = Vec::new();

    let ready = |a: &CAtom, bound: &[bool]| a.slots().all(|s| bound[s]);
    let flush = |bound: &[bool], steps: &mut Vec<Step>, before: &mut Vec<Vec<bool>>, pending: &mut Vec<usize>| {
        pending.retain(|&i| {
            if ready(&c.atoms[i], bound) {
                before.push(bound.to_vec());
                steps.push(Step {
                    goal: Goal::Atom(i),
                    access: Access::Direct,
                });
                false
            } else {
                true
            }
        });
    };

    for &goal in goals {
        match goal {
            Goal::Atom(i) if c.atoms[i].is_check() => {
                if ready(&c.atoms[i], &bound) {
                    bound_before.push(bound.clone());
                    steps.push(Step {
                        goal,
                        access: Access::Direct,
                    });
                } else {
                    pending.push(i);
                }
            }
            Goal::Atom(i) => {
                let is_bound = |t: CTerm| match t {
                    CTerm::Slot(s) => bound[s],
                    CTerm::Const(_) => true,
                    CTerm::Wild => false,
                };
                let access = match &c.atoms[i] {
                    CAtom::Vertex { id, props, .. } => {
                        if is_bound(*id) {
                            Access::VertexById
                        } else if let Some(p) = props.iter().position(|&t| is_bound(t)) {
                            Access::VertexByProp {
                                prop: p,
                                value: props[p],
                            }
                        } else {
                            Access::VertexScan
                        }
                    }
                    CAtom::Edge { src, dst, .. } => match (is_bound(*src), is_bound(*dst)) {
                        (true, true) => Access::EdgeShorter,
                        (true, false) => Access::EdgeOut,
                        (false, true) => Access::EdgeIn,
                        (false, false) => Access::EdgeScan,
                    },
                    CAtom::Check { .. } => unreachable!(),
                };
                bound_before.push(bound.clone());
                steps.push(Step { goal, access });
                for s in c.atoms[i].slots() {
                    bound[s] = true;
                }
                flush(&bound, &mut steps, &mut bound_before, &mut pending);
            }
            Goal::Relation(k) => {
                let (key, bind) = (0..heads[k].len()).partition(|&col| bound[heads[k][col]]);
                bound_before.push(bound.clone());
                steps.push(Step {
                    goal,
                    access: Access::Relation { key, bind },
                });
                for &s in &heads[k] {
                    bound[s] = true;
                }
                flush(&bound, &mut steps, &mut bound_before, &mut pending);
            }
            Goal::End(_) => {
                bound_before.push(bound.clone());
                steps.push(Step {
                    goal,
                    access: Access::Direct,
                });
            }
        }
    }
    assert!(
        pending.is_empty(),
        "constraint variables never bound; validation should have rejected the pattern"
    );

    push_down_equalities(c, &mut steps, &bound_before, green_is_equality);
    Program { steps }
}

/// Turns vertex scans into property-index lookups when a later equality
/// constraint pins one of the scanned properties to an already bound value.
fn push_down_equalities(c: &Compiled, steps: &mut [Step], bound_before: &[Vec<bool>], green_eq: bool) {
    for i in 0..steps.len() {
        if steps[i].access != Access::VertexScan {
            continue;
        }
        let Goal::Atom(ai) = steps[i].goal else { continue };
        let CAtom::Vertex { props, .. } = &c.atoms[ai] else {
            continue;
        };
        let bound = &bound_before[i];
        let known = |t: CTerm| match t {
            CTerm::Slot(s) => bound[s],
            CTerm::Const(_) => true,
            CTerm::Wild => false,
        };
        let found = steps[i + 1..].iter().find_map(|later| {
            let Goal::Atom(j) = later.goal else { return None };
            let CAtom::Check { kind, a, b, .. } = c.atoms[j] else {
                return None;
            };
            let equality = kind == ConstraintKind::Eq || (kind == ConstraintKind::Green && green_eq);
            if !equality {
                return None;
            }
            props.iter().enumerate().find_map(|(p, &t)| {
                let s = t.slot().filter(|&s| !bound[s])?;
                if a == CTerm::Slot(s) && known(b) {
                    Some((p, b))
                } else if b == CTerm::Slot(s) && known(a) {
                    Some((p, a))
                } else {
                    None
                }
            })
        });
        if let Some((prop, value)) = found {
            steps[i].access = Access::VertexByProp { prop, value };
        }
    }
}
