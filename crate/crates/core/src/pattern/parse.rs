//! Pattern DSL.
//!
//! ```text
//! pattern  := "root" VAR "." subpat+
//! subpat   := "sub" NAME ":" atom ("," atom)* "."
//! atom     := IDENT "(" term ("," term)* ")"
//! term     := VAR | INT | "_"
//! ```
//!
//! Atom names are `vertex1`..`vertex5`, `edgeA`..`edgeF` and the constraints
//! `eq`, `neq`, `lt`, `leq`, `red`, `green`. `%` starts a line comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Atom, ConstraintKind, Pattern, Role, Term, Var};
use crate::graph::{EdgeType, ObjectId, PropertyValue, Schema, VertexType};
use crate::lexer::{Lexer, Pos, Tok};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: unknown atom name `{name}`")]
    UnknownTypeName { pos: Pos, name: String },
    #[error("{pos}: `{name}` takes {expected} arguments, got {got}")]
    ArityMismatch {
        pos: Pos,
        name: String,
        expected: usize,
        got: usize,
    },
}

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { pos, msg: msg.into() }
}

enum RawTerm<'a> {
    Var(&'a str),
    Int(i128),
    Wild,
}

struct RawAtom<'a> {
    name: &'a str,
    pos: Pos,
    args: Vec<(Pos, RawTerm<'a>)>,
}

enum Head {
    Vertex(VertexType),
    Edge(EdgeType),
    Constraint(ConstraintKind),
}

/// Resolves an atom name to what it denotes.
fn classify(name: &str) -> Option<Head> {
    if let Some(k) = ConstraintKind::from_name(name) {
        return Some(Head::Constraint(k));
    }
    if let Some(rest) = name.strip_prefix("vertex") {
        let n: u8 = rest.parse().ok()?;
        return VertexType::from_number(n).map(Head::Vertex);
    }
    let rest = name.strip_prefix("edge")?;
    let mut chars = rest.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => EdgeType::from_letter(c).map(Head::Edge),
        _ => None,
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<(Pos, Tok<'a>)>,
}

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Result<Option<&(Pos, Tok<'a>)>, ParseError> {
        if self.peeked.is_none() {
            self.peeked = self.lexer.next_token().map_err(|e| syntax(e.pos, e.msg))?;
        }
        Ok(self.peeked.as_ref())
    }

    fn next(&mut self) -> Result<(Pos, Tok<'a>), ParseError> {
        self.peek()?;
        self.peeked
            .take()
            .ok_or_else(|| syntax(self.lexer.pos(), "unexpected end of input"))
    }

    fn expect(&mut self, want: Tok<'static>) -> Result<Pos, ParseError> {
        let (pos, tok) = self.next()?;
        if tok == want {
            Ok(pos)
        } else {
            Err(syntax(pos, format!("expected {want}, found {tok}")))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.next()? {
            (_, Tok::Ident(w)) if w == kw => Ok(()),
            (pos, tok) => Err(syntax(pos, format!("expected `{kw}`, found {tok}"))),
        }
    }

    fn atom(&mut self) -> Result<RawAtom<'a>, ParseError> {
        let (pos, name) = match self.next()? {
            (pos, Tok::Ident(name)) => (pos, name),
            (pos, tok) => return Err(syntax(pos, format!("expected an atom, found {tok}"))),
        };
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        loop {
            let (tpos, tok) = self.next()?;
            let term = match tok {
                Tok::Var(v) => RawTerm::Var(v),
                Tok::Int(n) => RawTerm::Int(n),
                Tok::Wild => RawTerm::Wild,
                other => return Err(syntax(tpos, format!("expected a term, found {other}"))),
            };
            args.push((tpos, term));
            match self.next()? {
                (_, Tok::Comma) => continue,
                (_, Tok::RParen) => break,
                (p, other) => return Err(syntax(p, format!("expected `,` or `)`, found {other}"))),
            }
        }
        Ok(RawAtom { name, pos, args })
    }
}

/// Parses a pattern against the default schema.
pub fn parse_pattern(text: &str) -> Result<Pattern, ParseError> {
    parse_pattern_with(text, &Schema::default())
}

pub fn parse_pattern_with(text: &str, schema: &Schema) -> Result<Pattern, ParseError> {
    let mut p = Parser {
        lexer: Lexer::new(text),
        peeked: None,
    };
    p.keyword("root")?;
    let projection = match p.next()? {
        (_, Tok::Var(v)) => Var::new(v),
        (pos, tok) => return Err(syntax(pos, format!("expected the root variable, found {tok}"))),
    };
    p.expect(Tok::Dot)?;

    let mut raw: Vec<(String, Vec<RawAtom>)> = Vec::new();
    while p.peek()?.is_some() {
        p.keyword("sub")?;
        let name = match p.next()? {
            (_, Tok::Ident(n)) | (_, Tok::Var(n)) => n.to_string(),
            (pos, tok) => return Err(syntax(pos, format!("expected a subpattern name, found {tok}"))),
        };
        p.expect(Tok::Colon)?;
        let mut atoms = vec![p.atom()?];
        loop {
            match p.next()? {
                (_, Tok::Comma) => atoms.push(p.atom()?),
                (_, Tok::Dot) => break,
                (pos, tok) => return Err(syntax(pos, format!("expected `,` or `.`, found {tok}"))),
            }
        }
        raw.push((name, atoms));
    }
    if raw.is_empty() {
        return Err(syntax(p.lexer.pos(), "pattern has no subpatterns"));
    }

    // Resolve heads and arities, then fix variable roles before typing constants.
    let mut heads = Vec::new();
    for (_, atoms) in &raw {
        for a in atoms {
            let head = classify(a.name).ok_or_else(|| ParseError::UnknownTypeName {
                pos: a.pos,
                name: a.name.to_string(),
            })?;
            let expected = match &head {
                Head::Vertex(t) => schema.vertex(*t).arity,
                Head::Edge(t) => schema.edge_props(*t) + 2,
                Head::Constraint(k) => k.arity(),
            };
            if a.args.len() != expected {
                return Err(ParseError::ArityMismatch {
                    pos: a.pos,
                    name: a.name.to_string(),
                    expected,
                    got: a.args.len(),
                });
            }
            heads.push(head);
        }
    }

    let mut roles: BTreeMap<&str, Role> = BTreeMap::new();
    for (head, a) in heads.iter().zip(raw.iter().flat_map(|(_, atoms)| atoms)) {
        for (i, (_, t)) in a.args.iter().enumerate() {
            let RawTerm::Var(v) = t else { continue };
            let role = match head {
                Head::Vertex(vt) if i == schema.vertex(*vt).id_pos => Role::Id,
                Head::Vertex(_) => Role::Prop,
                Head::Edge(_) if i < 2 => Role::Id,
                Head::Edge(_) => Role::Prop,
                Head::Constraint(k) => match k.arg_role() {
                    Some(r) => r,
                    None => continue,
                },
            };
            roles.entry(v).or_insert(role);
        }
    }

    let mut heads = heads.into_iter();
    let mut subs = Vec::with_capacity(raw.len());
    for (name, atoms) in raw {
        let mut built = Vec::with_capacity(atoms.len());
        for a in atoms {
            let head = heads.next().expect("one head per atom");
            built.push(build_atom(head, a, schema, &roles)?);
        }
        subs.push((name, built));
    }
    Ok(Pattern::new(projection, subs))
}

fn build_atom(head: Head, a: RawAtom<'_>, schema: &Schema, roles: &BTreeMap<&str, Role>) -> Result<Atom, ParseError> {
    let term = |pos: Pos, t: &RawTerm<'_>, role: Role| -> Result<Term, ParseError> {
        Ok(match *t {
            RawTerm::Var(v) => Term::var(v),
            RawTerm::Wild => Term::Wild,
            RawTerm::Int(n) => match role {
                Role::Id => Term::Id(ObjectId(
                    u64::try_from(n).map_err(|_| syntax(pos, format!("id {n} out of range")))?,
                )),
                Role::Prop => Term::Prop(PropertyValue(
                    i64::try_from(n).map_err(|_| syntax(pos, format!("property {n} out of range")))?,
                )),
            },
        })
    };
    Ok(match head {
        Head::Vertex(vtype) => {
            let id_pos = schema.vertex(vtype).id_pos;
            let args = a
                .args
                .iter()
                .enumerate()
                .map(|(i, (p, t))| term(*p, t, if i == id_pos { Role::Id } else { Role::Prop }))
                .collect::<Result<_, _>>()?;
            Atom::Vertex { vtype, args }
        }
        Head::Edge(etype) => {
            let mut it = a.args.iter();
            let (sp, s) = it.next().expect("arity checked");
            let (dp, d) = it.next().expect("arity checked");
            Atom::Edge {
                etype,
                src: term(*sp, s, Role::Id)?,
                dst: term(*dp, d, Role::Id)?,
                props: it.map(|(p, t)| term(*p, t, Role::Prop)).collect::<Result<_, _>>()?,
            }
        }
        Head::Constraint(kind) => {
            let role = kind
                .arg_role()
                .or_else(|| {
                    a.args.iter().find_map(|(_, t)| match t {
                        RawTerm::Var(v) => roles.get(v).copied(),
                        _ => None,
                    })
                })
                .unwrap_or(Role::Prop);
            let mut args = Vec::with_capacity(a.args.len());
            for (p, t) in &a.args {
                if matches!(t, RawTerm::Wild) {
                    return Err(syntax(*p, format!("wildcard not allowed in `{}`", a.name)));
                }
                args.push(term(*p, t, role)?);
            }
            Atom::Constraint { kind, args }
        }
    })
}

/// Renders a pattern in the DSL, one subpattern per line.
pub fn unparse(p: &Pattern) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "root {}.", p.projection());
    for s in p.subpatterns() {
        let _ = write!(out, "sub {}: ", s.name);
        for (i, a) in s.atoms.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{a}");
        }
        out.push_str(".\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_subpattern_rule_body() {
        let p = parse_pattern(
            "root Vertex4.\n\
             sub subpattern1: edgeD(Vertex4, 69871376, 1), edgeD(Vertex4, 1049632, 1), \
             vertex4(_, Vertex4, _).",
        )
        .unwrap();
        assert_eq!(p.clause_count(), 3);
        assert_eq!(p.projection().name(), "Vertex4");
        assert_eq!(
            p.atom(1),
            Some(&Atom::Edge {
                etype: EdgeType::D,
                src: Term::var("Vertex4"),
                dst: Term::Id(ObjectId(1049632)),
                props: vec![Term::Prop(PropertyValue(1))],
            })
        );
        assert!(p.validate(&Schema::default()).is_empty());
    }

    #[test]
    fn empty_body_is_syntax_error() {
        assert!(matches!(parse_pattern("root X."), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse_pattern("root X. sub s: ."),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(parse_pattern(""), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn arity_checked_against_schema() {
        let err = parse_pattern("root V. sub s: edgeD(V, W).").unwrap_err();
        assert!(matches!(
            err,
            ParseError::ArityMismatch {
                expected: 3,
                got: 2,
                ..
            }
        ));
        let err = parse_pattern("root V. sub s: vertex4(V).").unwrap_err();
        assert!(matches!(err, ParseError::ArityMismatch { expected: 3, .. }));
    }

    #[test]
    fn unknown_names() {
        for bad in ["vertex6(X)", "edgeG(X, Y)", "edgeAB(X, Y)", "foo(X)"] {
            let err = parse_pattern(&format!("root X. sub s: {bad}.")).unwrap_err();
            assert!(matches!(err, ParseError::UnknownTypeName { .. }), "{bad}");
        }
    }

    #[test]
    fn constraint_constants_follow_variable_role() {
        let p = parse_pattern("root X. sub s: vertex1(X), edgeA(X, Y, P), neq(X, 5), eq(P, 1), lt(P, -2).").unwrap();
        let consts: Vec<&Term> = p
            .atoms()
            .filter(|(_, a)| !a.is_positive())
            .map(|(_, a)| a.terms()[1])
            .collect();
        assert_eq!(
            consts,
            vec![
                &Term::Id(ObjectId(5)),
                &Term::Prop(PropertyValue(1)),
                &Term::Prop(PropertyValue(-2)),
            ]
        );
    }

    #[test]
    fn wildcard_in_constraint_rejected() {
        let err = parse_pattern("root X. sub s: vertex1(X), neq(X, _).").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn error_positions() {
        let err = parse_pattern("root X.\nsub s: vertex1(X) vertex1(Y).").unwrap_err();
        assert_eq!(
            err,
            ParseError::Syntax {
                pos: Pos { line: 2, col: 19 },
                msg: "expected `,` or `.`, found `vertex1`".into()
            }
        );
        let err = parse_pattern("root X. sub s: edgeD(X, -1, 1).").unwrap_err();
        assert!(err.to_string().contains("out of range"));
    }

    #[test]
    fn unparse_shapes() {
        let p = parse_pattern("root X. % the root\nsub only: vertex1(X).").unwrap();
        assert_eq!(unparse(&p), "root X.\nsub only: vertex1(X).\n");
        let p = parse_pattern("root X. sub s: edgeA(X, 735713441679521195, -7).").unwrap();
        assert!(unparse(&p).contains("edgeA(X, 735713441679521195, -7)"));
        assert_eq!(parse_pattern(&unparse(&p)).unwrap(), p);
    }
}
