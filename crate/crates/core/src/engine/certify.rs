//! Independent re-check of a full binding against the store.

use thiserror::Error;

use super::{Binding, Value};
use crate::graph::GraphStore;
use crate::pattern::{Atom, ConstraintKind, Pattern, Term, Var};
use crate::relations::Relations;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertifyError {
    #[error("variable {0} has no value in the binding")]
    Unbound(Var),
    #[error("atom #{index} `{atom}` does not hold")]
    Violated { index: usize, atom: String },
}

pub(super) fn certify(g: &GraphStore, p: &Pattern, binding: &Binding, rel: &dyn Relations) -> Result<(), CertifyError> {
    for v in p.vars() {
        if !binding.contains_key(&v) {
            return Err(CertifyError::Unbound(v));
        }
    }
    let val = |t: &Term| -> Option<Value> {
        match t {
            Term::Var(v) => Some(binding[v]),
            Term::Id(id) => Some(Value::Id(*id)),
            Term::Prop(p) => Some(Value::Prop(*p)),
            Term::Wild => None,
        }
    };
    let fits = |t: &Term, actual: Value| val(t).is_none_or(|want| want == actual);

    for (index, (_, atom)) in p.atoms().enumerate() {
        let ok = match atom {
            Atom::Vertex { vtype, args } => {
                let shape = g.schema().vertex(*vtype);
                let fits_rec = |rec: &crate::graph::VertexRecord| {
                    rec.vtype == *vtype
                        && args.iter().enumerate().all(|(i, t)| match shape.arg_prop(i) {
                            None => fits(t, Value::Id(rec.id)),
                            Some(pi) => fits(t, Value::Prop(rec.props[pi])),
                        })
                };
                match val(&args[shape.id_pos]) {
                    Some(Value::Id(id)) => g.vertex(id).is_some_and(fits_rec),
                    Some(Value::Prop(_)) => false,
                    None => g.vertices_of_type(*vtype).any(fits_rec),
                }
            }
            Atom::Edge { etype, src, dst, props } => {
                let fits_edge = |e: &crate::graph::EdgeRecord| {
                    fits(src, Value::Id(e.src))
                        && fits(dst, Value::Id(e.dst))
                        && props.iter().zip(&e.props).all(|(t, &p)| fits(t, Value::Prop(p)))
                };
                match val(src) {
                    Some(Value::Id(s)) => g.out_edges(s, *etype).any(fits_edge),
                    Some(Value::Prop(_)) => false,
                    None => g.edges().iter().filter(|e| e.etype == *etype).any(fits_edge),
                }
            }
            Atom::Constraint { kind, args } => match (val(&args[0]), val(&args[1])) {
                (Some(a), Some(b)) => constraint_holds(*kind, a, b, g, rel),
                _ => false,
            },
        };
        if !ok {
            return Err(CertifyError::Violated {
                index,
                atom: atom.to_string(),
            });
        }
    }
    Ok(())
}

fn constraint_holds(kind: ConstraintKind, a: Value, b: Value, g: &GraphStore, rel: &dyn Relations) -> bool {
    use std::cmp::Ordering::*;
    let ord = match (a, b) {
        (Value::Id(x), Value::Id(y)) => Some(x.cmp(&y)),
        (Value::Prop(x), Value::Prop(y)) => Some(x.cmp(&y)),
        _ => None,
    };
    match kind {
        ConstraintKind::Eq => ord == Some(Equal),
        ConstraintKind::Neq => ord.is_some_and(|o| o != Equal),
        ConstraintKind::Lt => ord == Some(Less),
        ConstraintKind::Leq => ord.is_some_and(|o| o != Greater),
        ConstraintKind::Red => match (a, b) {
            (Value::Id(x), Value::Id(y)) => rel.red(g, x, y),
            _ => false,
        },
        ConstraintKind::Green => match (a, b) {
            (Value::Prop(x), Value::Prop(y)) => rel.green(x, y),
            _ => false,
        },
    }
}
