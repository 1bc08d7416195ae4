//! Patterns as conjunctive queries: typed vertex and edge atoms plus
//! constraint atoms, grouped into ordered subpatterns, projecting one root
//! variable.

mod builtin;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::graph::{EdgeType, ObjectId, PropertyValue, Schema, VertexType};

pub use builtin::{builtin_agile_lite, AGILE_LITE_SOURCE, STAR};
pub use parse::{parse_pattern, parse_pattern_with, unparse, ParseError};

/// A pattern variable. Names start with an uppercase letter.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    Id(ObjectId),
    Prop(PropertyValue),
    Wild,
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Var::new(name))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Id(id) => write!(f, "{id}"),
            Term::Prop(p) => write!(f, "{p}"),
            Term::Wild => f.write_str("_"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    Eq,
    Neq,
    Lt,
    Leq,
    /// Relation between the two starred type-2 vertices (arguments are ids).
    Red,
    /// Relation between an A-edge property and a type-4 vertex property.
    Green,
}

impl ConstraintKind {
    pub const ALL: [ConstraintKind; 6] = [Self::Eq, Self::Neq, Self::Lt, Self::Leq, Self::Red, Self::Green];

    pub fn name(self) -> &'static str {
        match self {
            Self::Eq => "eq",
            Self::Neq => "neq",
            Self::Lt => "lt",
            Self::Leq => "leq",
            Self::Red => "red",
            Self::Green => "green",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn arity(self) -> usize {
        2
    }

    /// Role forced on the arguments, if the relation fixes one.
    pub fn arg_role(self) -> Option<Role> {
        match self {
            Self::Red => Some(Role::Id),
            Self::Green => Some(Role::Prop),
            _ => None,
        }
    }
}

/// What a variable ranges over: vertex ids or property values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Id,
    Prop,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    /// Type membership; `args` follow the fact layout of `vtype` (id included).
    Vertex {
        vtype: VertexType,
        args: Vec<Term>,
    },
    Edge {
        etype: EdgeType,
        src: Term,
        dst: Term,
        props: Vec<Term>,
    },
    Constraint {
        kind: ConstraintKind,
        args: Vec<Term>,
    },
}

impl Atom {
    pub fn is_positive(&self) -> bool {
        !matches!(self, Atom::Constraint { .. })
    }

    pub fn predicate(&self) -> String {
        match self {
            Atom::Vertex { vtype, .. } => format!("vertex{}", vtype.number()),
            Atom::Edge { etype, .. } => format!("edge{}", etype.letter()),
            Atom::Constraint { kind, .. } => kind.name().to_string(),
        }
    }

    /// Arguments in surface order.
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Vertex { args, .. } | Atom::Constraint { args, .. } => args.iter().collect(),
            Atom::Edge { src, dst, props, .. } => {
                let mut out = vec![src, dst];
                out.extend(props);
                out
            }
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.terms().into_iter().filter_map(Term::as_var)
    }

    /// `(variable, role)` pairs fixed by the atom's position layout.
    fn roles(&self, schema: &Schema) -> Vec<(&Var, Role)> {
        let mut out = Vec::new();
        match self {
            Atom::Vertex { vtype, args } => {
                let shape = schema.vertex(*vtype);
                for (i, t) in args.iter().enumerate() {
                    if let Term::Var(v) = t {
                        let role = if i == shape.id_pos { Role::Id } else { Role::Prop };
                        out.push((v, role));
                    }
                }
            }
            Atom::Edge { src, dst, props, .. } => {
                for t in [src, dst] {
                    if let Term::Var(v) = t {
                        out.push((v, Role::Id));
                    }
                }
                out.extend(props.iter().filter_map(Term::as_var).map(|v| (v, Role::Prop)));
            }
            Atom::Constraint { kind, args } => {
                if let Some(role) = kind.arg_role() {
                    out.extend(args.iter().filter_map(Term::as_var).map(|v| (v, role)));
                }
            }
        }
        out
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate())?;
        for (i, t) in self.terms().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subpattern {
    pub name: String,
    pub atoms: Vec<Atom>,
    /// Variables first bound here that later subpatterns (or the projection) use.
    pub exports: Vec<Var>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    subpatterns: Vec<Subpattern>,
    projection: Var,
}

impl Pattern {
    /// Builds a pattern; exports are derived from variable usage.
    pub fn new(projection: Var, subpatterns: Vec<(String, Vec<Atom>)>) -> Self {
        let mut subs: Vec<Subpattern> = subpatterns
            .into_iter()
            .map(|(name, atoms)| Subpattern {
                name,
                atoms,
                exports: Vec::new(),
            })
            .collect();
        let mut bound: BTreeSet<Var> = BTreeSet::new();
        for k in 0..subs.len() {
            let mut exports = Vec::new();
            for atom in subs[k].atoms.iter().filter(|a| a.is_positive()) {
                for v in atom.vars() {
                    if bound.contains(v) || exports.contains(v) {
                        continue;
                    }
                    let used_later = *v == projection
                        || subs[k + 1..]
                            .iter()
                            .any(|s| s.atoms.iter().any(|a| a.vars().any(|w| w == v)));
                    if used_later {
                        exports.push(v.clone());
                    }
                }
            }
            for atom in subs[k].atoms.iter().filter(|a| a.is_positive()) {
                bound.extend(atom.vars().cloned());
            }
            subs[k].exports = exports;
        }
        Pattern {
            subpatterns: subs,
            projection,
        }
    }

    pub fn projection(&self) -> &Var {
        &self.projection
    }

    pub fn subpatterns(&self) -> &[Subpattern] {
        &self.subpatterns
    }

    /// Total number of atoms (clauses) across all subpatterns.
    pub fn clause_count(&self) -> usize {
        self.subpatterns.iter().map(|s| s.atoms.len()).sum()
    }

    /// All atoms in evaluation order, tagged with their subpattern index.
    pub fn atoms(&self) -> impl Iterator<Item = (usize, &Atom)> {
        self.subpatterns
            .iter()
            .enumerate()
            .flat_map(|(k, s)| s.atoms.iter().map(move |a| (k, a)))
    }

    /// The atom at flat clause index `i`.
    pub fn atom(&self, i: usize) -> Option<&Atom> {
        self.atoms().nth(i).map(|(_, a)| a)
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<Var> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (_, a) in self.atoms() {
            for v in a.vars() {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    /// Role of every variable, or the first variable used in both roles.
    pub fn var_roles(&self, schema: &Schema) -> Result<BTreeMap<Var, Role>, Var> {
        let mut roles: BTreeMap<Var, Role> = BTreeMap::new();
        for (_, a) in self.atoms() {
            for (v, r) in a.roles(schema) {
                match roles.get(v) {
                    Some(&prev) if prev != r => return Err(v.clone()),
                    _ => {
                        roles.insert(v.clone(), r);
                    }
                }
            }
        }
        // Variables seen only in eq/neq/lt/leq fall back to property role.
        for v in self.vars() {
            roles.entry(v).or_insert(Role::Prop);
        }
        Ok(roles)
    }

    /// Checks arity, wildcard placement, roles, range restriction and exports.
    pub fn validate(&self, schema: &Schema) -> PatternReport {
        validate_pattern(self, schema)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternFinding {
    /// A projected or constrained variable never occurs in a positive atom
    /// early enough to be bound.
    RangeRestriction {
        var: Var,
        context: String,
    },
    Arity {
        atom: usize,
        predicate: String,
        expected: usize,
        got: usize,
    },
    WildcardMisplaced {
        atom: usize,
    },
    RoleConflict {
        var: Var,
    },
    ExportUnbound {
        subpattern: String,
        var: Var,
    },
    ConstantRole {
        atom: usize,
    },
    EmptySubpattern {
        subpattern: String,
    },
    DuplicateSubpattern {
        subpattern: String,
    },
    NoSubpatterns,
}

impl fmt::Display for PatternFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RangeRestriction { var, context } => {
                write!(f, "range restriction: {var} ({context})")
            }
            Self::Arity {
                atom,
                predicate,
                expected,
                got,
            } => write!(f, "atom #{atom} {predicate}: expected {expected} arguments, got {got}"),
            Self::WildcardMisplaced { atom } => {
                write!(f, "atom #{atom}: wildcard not allowed in a constraint")
            }
            Self::RoleConflict { var } => {
                write!(f, "{var} is used both as a vertex id and as a property")
            }
            Self::ExportUnbound { subpattern, var } => {
                write!(f, "{subpattern} exports {var}, which no positive atom binds")
            }
            Self::ConstantRole { atom } => {
                write!(f, "atom #{atom}: constant kind does not match argument role")
            }
            Self::EmptySubpattern { subpattern } => write!(f, "{subpattern} has no atoms"),
            Self::DuplicateSubpattern { subpattern } => {
                write!(f, "subpattern name {subpattern} used twice")
            }
            Self::NoSubpatterns => f.write_str("pattern has no subpatterns"),
        }
    }
}

pub type PatternReport = Vec<PatternFinding>;

/// Empty result means the pattern is well-formed against `schema`.
pub fn validate_pattern(p: &Pattern, schema: &Schema) -> PatternReport {
    let mut out = Vec::new();
    if p.subpatterns.is_empty() {
        out.push(PatternFinding::NoSubpatterns);
    }
    let mut names = BTreeSet::new();
    for s in &p.subpatterns {
        if s.atoms.is_empty() {
            out.push(PatternFinding::EmptySubpattern {
                subpattern: s.name.clone(),
            });
        }
        if !names.insert(&s.name) {
            out.push(PatternFinding::DuplicateSubpattern {
                subpattern: s.name.clone(),
            });
        }
    }

    let roles = match p.var_roles(schema) {
        Ok(r) => Some(r),
        Err(var) => {
            out.push(PatternFinding::RoleConflict { var });
            None
        }
    };

    for (i, (_, atom)) in p.atoms().enumerate() {
        let (expected, got) = match atom {
            Atom::Vertex { vtype, args } => (schema.vertex(*vtype).arity, args.len()),
            Atom::Edge { etype, props, .. } => (schema.edge_props(*etype) + 2, props.len() + 2),
            Atom::Constraint { kind, args } => (kind.arity(), args.len()),
        };
        if expected != got {
            out.push(PatternFinding::Arity {
                atom: i,
                predicate: atom.predicate(),
                expected,
                got,
            });
        }
        if let Atom::Constraint { args, .. } = atom {
            if args.contains(&Term::Wild) {
                out.push(PatternFinding::WildcardMisplaced { atom: i });
            }
        }
        if !constants_fit(atom, schema, roles.as_ref()) {
            out.push(PatternFinding::ConstantRole { atom: i });
        }
    }

    let mut bound: BTreeSet<&Var> = BTreeSet::new();
    for s in &p.subpatterns {
        for a in s.atoms.iter().filter(|a| a.is_positive()) {
            bound.extend(a.vars());
        }
        for a in s.atoms.iter().filter(|a| !a.is_positive()) {
            for v in a.vars() {
                if !bound.contains(v) {
                    out.push(PatternFinding::RangeRestriction {
                        var: v.clone(),
                        context: format!("{} in {}", a.predicate(), s.name),
                    });
                }
            }
        }
        for v in &s.exports {
            if !bound.contains(v) {
                out.push(PatternFinding::ExportUnbound {
                    subpattern: s.name.clone(),
                    var: v.clone(),
                });
            }
        }
    }
    if !bound.contains(&p.projection) {
        out.push(PatternFinding::RangeRestriction {
            var: p.projection.clone(),
            context: "projection".into(),
        });
    }
    out
}

fn constants_fit(atom: &Atom, schema: &Schema, roles: Option<&BTreeMap<Var, Role>>) -> bool {
    let fits = |t: &Term, role: Role| match t {
        Term::Id(_) => role == Role::Id,
        Term::Prop(_) => role == Role::Prop,
        _ => true,
    };
    match atom {
        Atom::Vertex { vtype, args } => {
            let id_pos = schema.vertex(*vtype).id_pos;
            args.iter()
                .enumerate()
                .all(|(i, t)| fits(t, if i == id_pos { Role::Id } else { Role::Prop }))
        }
        Atom::Edge { src, dst, props, .. } => {
            fits(src, Role::Id) && fits(dst, Role::Id) && props.iter().all(|t| fits(t, Role::Prop))
        }
        Atom::Constraint { kind, args } => {
            let role = kind.arg_role().or_else(|| {
                args.iter()
                    .filter_map(Term::as_var)
                    .find_map(|v| roles.and_then(|r| r.get(v).copied()))
            });
            match role {
                Some(r) => args.iter().all(|t| fits(t, r)),
                None => true,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn exports_are_derived() {
        let p = Pattern::new(
            Var::new("X"),
            vec![
                (
                    "a".into(),
                    vec![Atom::Vertex {
                        vtype: VertexType::V3,
                        args: vec![v("Y")],
                    }],
                ),
                (
                    "b".into(),
                    vec![Atom::Edge {
                        etype: EdgeType::B,
                        src: v("Y"),
                        dst: v("X"),
                        props: vec![],
                    }],
                ),
            ],
        );
        assert_eq!(p.subpatterns()[0].exports, vec![Var::new("Y")]);
        assert_eq!(p.subpatterns()[1].exports, vec![Var::new("X")]);
        assert!(p.validate(&Schema::default()).is_empty());
        assert_eq!(p.clause_count(), 2);
    }

    #[test]
    fn projection_must_be_bound() {
        let p = Pattern::new(
            Var::new("R"),
            vec![(
                "a".into(),
                vec![Atom::Vertex {
                    vtype: VertexType::V1,
                    args: vec![v("X")],
                }],
            )],
        );
        let report = p.validate(&Schema::default());
        assert!(matches!(
            report.as_slice(),
            [PatternFinding::RangeRestriction { var, .. }] if var.name() == "R"
        ));
    }

    #[test]
    fn unbound_constraint_variable() {
        let p = Pattern::new(
            Var::new("X"),
            vec![(
                "a".into(),
                vec![
                    Atom::Vertex {
                        vtype: VertexType::V1,
                        args: vec![v("X")],
                    },
                    Atom::Constraint {
                        kind: ConstraintKind::Neq,
                        args: vec![v("X"), v("Y")],
                    },
                ],
            )],
        );
        let report = p.validate(&Schema::default());
        assert!(matches!(
            report.as_slice(),
            [PatternFinding::RangeRestriction { var, .. }] if var.name() == "Y"
        ));
    }

    #[test]
    fn role_conflict_detected() {
        let p = Pattern::new(
            Var::new("X"),
            vec![(
                "a".into(),
                vec![
                    Atom::Vertex {
                        vtype: VertexType::V1,
                        args: vec![v("X")],
                    },
                    Atom::Edge {
                        etype: EdgeType::A,
                        src: v("X"),
                        dst: v("Y"),
                        props: vec![v("X")],
                    },
                ],
            )],
        );
        assert!(p
            .validate(&Schema::default())
            .contains(&PatternFinding::RoleConflict { var: Var::new("X") }));
    }

    #[test]
    fn wildcard_in_constraint_flagged() {
        let p = Pattern::new(
            Var::new("X"),
            vec![(
                "a".into(),
                vec![
                    Atom::Vertex {
                        vtype: VertexType::V1,
                        args: vec![v("X")],
                    },
                    Atom::Constraint {
                        kind: ConstraintKind::Neq,
                        args: vec![v("X"), Term::Wild],
                    },
                ],
            )],
        );
        assert!(p
            .validate(&Schema::default())
            .contains(&PatternFinding::WildcardMisplaced { atom: 1 }));
    }
}
