//! Export of a graph and a pattern as a standalone Prolog program.
//!
//! The program declares every fact predicate dynamic, lists the facts,
//! defines the pattern as rules and prints each root on its own line when
//! loaded:
//!
//! * unified style: one rule `root(X)` whose body is every atom, in order;
//! * subpattern style: one rule per subpattern over its interface
//!   variables, calling the earlier rules it depends on, and a `root(X)`
//!   rule joining them.
//!
//! A constraint is placed after the atom that binds its last variable.
//! `red` and `green` follow [`crate::relations::KeyEquality`].

use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::engine::{subpattern_rules, MatchError};
use crate::graph::{GraphStore, VertexType};
use crate::io::facts::{save_facts, FactSchema, Predicate};
use crate::pattern::{Atom, ConstraintKind, Pattern, Var};
use crate::relations::RED_KEY;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrologStyle {
    Unified,
    Subpattern,
}

impl FromStr for PrologStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unified" => Ok(Self::Unified),
            "subpattern" => Ok(Self::Subpattern),
            _ => Err(format!("unknown style `{s}` (expected unified or subpattern)")),
        }
    }
}

impl fmt::Display for PrologStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Unified => "unified",
            Self::Subpattern => "subpattern",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error(transparent)]
    Pattern(#[from] MatchError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn goal(a: &Atom) -> String {
    match a {
        Atom::Constraint { kind, args } => {
            let (x, y) = (&args[0], &args[1]);
            match kind {
                ConstraintKind::Eq => format!("{x} =:= {y}"),
                ConstraintKind::Neq => format!("{x} \\== {y}"),
                ConstraintKind::Lt => format!("{x} < {y}"),
                ConstraintKind::Leq => format!("{x} =< {y}"),
                ConstraintKind::Red | ConstraintKind::Green => a.to_string(),
            }
        }
        _ => a.to_string(),
    }
}

/// `atoms` with each constraint moved right after its last binder.
fn ordered<'a>(atoms: impl IntoIterator<Item = &'a Atom>, bound: &mut BTreeSet<Var>) -> Vec<String> {
    let mut out = Vec::new();
    let mut pending: Vec<&Atom> = Vec::new();
    let ready = |a: &Atom, bound: &BTreeSet<Var>| a.vars().all(|v| bound.contains(v));
    for a in atoms {
        if a.is_positive() {
            out.push(goal(a));
            bound.extend(a.vars().cloned());
            pending.retain(|c| {
                let now = ready(c, bound);
                if now {
                    out.push(goal(c));
                }
                !now
            });
        } else if ready(a, bound) {
            out.push(goal(a));
        } else {
            pending.push(a);
        }
    }
    out.extend(pending.into_iter().map(goal));
    out
}

fn head(name: &str, vars: &[Var]) -> String {
    let args: Vec<&str> = vars.iter().map(Var::name).collect();
    format!("{name}({})", args.join(", "))
}

fn rule(w: &mut impl Write, head: &str, body: &[String]) -> io::Result<()> {
    writeln!(w, "{head} :-")?;
    for (i, g) in body.iter().enumerate() {
        let end = if i + 1 == body.len() { "." } else { "," };
        writeln!(w, "    {g}{end}")?;
    }
    Ok(())
}

pub fn export_prolog(g: &GraphStore, p: &Pattern, style: PrologStyle, mut w: impl Write) -> Result<(), ExportError> {
    let schema = g.schema();
    let rules = subpattern_rules(p, schema)?;
    let fs = FactSchema::new(schema.clone());

    writeln!(w, "% {style} program for pattern root {}", p.projection())?;
    for pred in Predicate::all() {
        writeln!(w, ":- dynamic {}/{}.", pred.name(), fs.arity(pred))?;
    }
    writeln!(w)?;
    save_facts(g, &mut w)?;
    writeln!(w)?;

    let v2 = schema.vertex(VertexType::V2);
    let mut red_a = vec!["_"; v2.arity];
    let mut red_b = vec!["_"; v2.arity];
    red_a[v2.id_pos] = "A";
    red_b[v2.id_pos] = "B";
    red_a[v2.prop_arg(RED_KEY)] = "K";
    red_b[v2.prop_arg(RED_KEY)] = "K";
    writeln!(
        w,
        "red(A, B) :- vertex2({}), vertex2({}), A \\== B.",
        red_a.join(", "),
        red_b.join(", ")
    )?;
    writeln!(w, "green(P, Q) :- P =:= Q.")?;
    writeln!(w)?;

    let root = std::slice::from_ref(p.projection());
    match style {
        PrologStyle::Unified => {
            let body = ordered(p.atoms().map(|(_, a)| a), &mut BTreeSet::new());
            rule(&mut w, &head("root", root), &body)?;
        }
        PrologStyle::Subpattern => {
            for (k, (sub, r)) in p.subpatterns().iter().zip(&rules).enumerate() {
                let mut bound = BTreeSet::new();
                let mut body: Vec<String> = r
                    .calls
                    .iter()
                    .map(|&d| {
                        bound.extend(rules[d].head.iter().cloned());
                        head(&rules[d].name, &rules[d].head)
                    })
                    .collect();
                body.extend(ordered(&sub.atoms, &mut bound));
                debug_assert_eq!(rules[k].name, sub.name);
                rule(&mut w, &head(&r.name, &r.head), &body)?;
            }
            let body: Vec<String> = rules.iter().map(|r| head(&r.name, &r.head)).collect();
            rule(&mut w, &head("root", root), &body)?;
        }
    }
    writeln!(w)?;
    writeln!(
        w,
        "main :- forall(setof(X, root(X), Xs), forall(member(X, Xs), (write(X), nl)))."
    )?;
    writeln!(w, ":- initialization((main, halt)).")?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::plant_minimal;
    use crate::graph::Schema;
    use crate::pattern::{builtin_agile_lite, parse_pattern};

    fn export(g: &GraphStore, p: &Pattern, style: PrologStyle) -> String {
        let mut out = Vec::new();
        export_prolog(g, p, style, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn unified_has_one_rule_with_every_atom() {
        let (g, _) = plant_minimal();
        let p = builtin_agile_lite();
        let text = export(&g, &p, PrologStyle::Unified);
        assert_eq!(text.matches(":-\n").count(), 1);
        let body: Vec<&str> = text
            .split("root(X) :-\n")
            .nth(1)
            .unwrap()
            .lines()
            .take_while(|l| l.starts_with("    "))
            .collect();
        assert_eq!(body.len(), p.clause_count());
        assert!(body.last().unwrap().ends_with('.'));
        assert!(body[..body.len() - 1].iter().all(|l| l.ends_with(',')));
        assert!(text.contains("    Pa =:= 1,"));
        assert!(text.contains("vertex1(6).") && text.contains("edgeD(3, 1, 1)."));
    }

    #[test]
    fn subpattern_has_a_rule_per_subpattern() {
        let (g, _) = plant_minimal();
        let text = export(&g, &builtin_agile_lite(), PrologStyle::Subpattern);
        for k in 1..=6 {
            assert_eq!(text.matches(&format!("\nsub{k}(")).count(), 1, "sub{k}");
        }
        assert!(text.contains("sub6(X, V3, T21, T22) :-\n    sub1(W1, T21, T22),\n    sub2("));
        assert!(text.contains("root(X) :-\n    sub1(W1, T21, T22),"));
    }

    #[test]
    fn empty_graph_still_defines_rules() {
        let g = GraphStore::new(Schema::default());
        let text = export(&g, &builtin_agile_lite(), PrologStyle::Unified);
        assert!(text.contains(":- dynamic vertex4/3."));
        assert!(!text.lines().any(|l| l.starts_with("vertex") || l.starts_with("edge")));
    }

    #[test]
    fn early_constraint_is_placed_after_binder() {
        let g = GraphStore::new(Schema::default());
        let p = parse_pattern("root X. sub s: vertex1(X), neq(X, Y), edgeC(X, Y).").unwrap();
        let text = export(&g, &p, PrologStyle::Unified);
        assert!(text.contains("    edgeC(X, Y),\n    X \\== Y."));
    }
}
