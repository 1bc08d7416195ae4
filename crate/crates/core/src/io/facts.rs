//! The fact-file format: one `name(arg, ...).` clause per record.
//!
//! ```text
//! vertex1(735713441679521195).
//! edgeD(932362105613871012, 60, 1).
//! ```

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::graph::{
    EdgeRecord, EdgeType, GraphError, GraphStore, ObjectId, PropertyValue, Schema, ValidationReport, VertexRecord,
    VertexType,
};
use crate::lexer::{Lexer, Pos, Tok};

/// What a fact predicate denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predicate {
    Vertex(VertexType),
    Edge(EdgeType),
}

impl Predicate {
    pub fn name(self) -> String {
        match self {
            Predicate::Vertex(t) => format!("vertex{}", t.number()),
            Predicate::Edge(t) => format!("edge{}", t.letter()),
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        if let Some(n) = name.strip_prefix("vertex") {
            let [d] = n.as_bytes() else { return None };
            return VertexType::from_number(d.wrapping_sub(b'0')).map(Predicate::Vertex);
        }
        if let Some(l) = name.strip_prefix("edge") {
            let mut cs = l.chars();
            return match (cs.next(), cs.next()) {
                (Some(c), None) => EdgeType::from_letter(c).map(Predicate::Edge),
                _ => None,
            };
        }
        None
    }

    pub fn all() -> impl Iterator<Item = Predicate> {
        VertexType::ALL
            .into_iter()
            .map(Predicate::Vertex)
            .chain(EdgeType::ALL.into_iter().map(Predicate::Edge))
    }
}

/// Argument layout of every fact predicate.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactSchema {
    pub schema: Schema,
}

impl FactSchema {
    pub fn new(schema: Schema) -> Self {
        FactSchema { schema }
    }

    pub fn arity(&self, p: Predicate) -> usize {
        match p {
            Predicate::Vertex(t) => self.schema.vertex(t).arity,
            Predicate::Edge(t) => 2 + self.schema.edge_props(t),
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: unknown predicate `{name}`")]
    UnknownPredicate { pos: Pos, name: String },
    #[error("{pos}: `{name}` takes {expected} arguments, got {got}")]
    ArityMismatch {
        pos: Pos,
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("{pos}: {source}")]
    Graph { pos: Pos, source: GraphError },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Reads a fact file. The returned report lists dangling edge endpoints and
/// other store findings; they do not stop the load.
pub fn load_facts(mut r: impl Read, schema: &FactSchema) -> Result<(GraphStore, ValidationReport), LoadError> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let g = parse_facts(&text, schema)?;
    let report = g.validate();
    for f in &report.findings {
        log::debug!("fact file: {f}");
    }
    Ok((g, report))
}

fn parse_facts(text: &str, schema: &FactSchema) -> Result<GraphStore, LoadError> {
    let mut lx = Lexer::new(text);
    let mut g = GraphStore::new(schema.schema.clone());
    let mut vertices = Vec::new();
    let mut edges: Vec<(Pos, EdgeRecord)> = Vec::new();
    let syntax = |pos, msg: String| LoadError::Syntax { pos, msg };
    fn next<'t>(lx: &mut Lexer<'t>) -> Result<Option<(Pos, Tok<'t>)>, LoadError> {
        lx.next_token()
            .map_err(|e| LoadError::Syntax { pos: e.pos, msg: e.msg })
    }
    let expect = |lx: &mut Lexer<'_>, want: Tok<'static>| -> Result<Pos, LoadError> {
        match lx.next_token().map_err(|e| syntax(e.pos, e.msg))? {
            Some((pos, t)) if t == want => Ok(pos),
            Some((pos, t)) => Err(syntax(pos, format!("expected {want}, found {t}"))),
            None => Err(syntax(lx.pos(), format!("expected {want}, found end of input"))),
        }
    };

    while let Some((pos, tok)) = next(&mut lx)? {
        let Tok::Ident(name) = tok else {
            return Err(syntax(pos, format!("expected a predicate name, found {tok}")));
        };
        let pred = Predicate::parse(name).ok_or_else(|| LoadError::UnknownPredicate {
            pos,
            name: name.to_string(),
        })?;
        expect(&mut lx, Tok::LParen)?;
        let mut args: Vec<(Pos, i128)> = Vec::new();
        loop {
            match next(&mut lx)? {
                Some((p, Tok::Int(n))) => args.push((p, n)),
                Some((p, t)) => return Err(syntax(p, format!("expected an integer, found {t}"))),
                None => return Err(syntax(lx.pos(), "unterminated fact".into())),
            }
            match next(&mut lx)? {
                Some((_, Tok::Comma)) => {}
                Some((_, Tok::RParen)) => break,
                Some((p, t)) => return Err(syntax(p, format!("expected `,` or `)`, found {t}"))),
                None => return Err(syntax(lx.pos(), "unterminated fact".into())),
            }
        }
        expect(&mut lx, Tok::Dot)?;
        let expected = schema.arity(pred);
        if args.len() != expected {
            return Err(LoadError::ArityMismatch {
                pos,
                name: name.to_string(),
                expected,
                got: args.len(),
            });
        }
        let id = |(p, n): (Pos, i128)| {
            u64::try_from(n)
                .map(ObjectId)
                .map_err(|_| syntax(p, format!("id `{n}` is not in 0..2^64")))
        };
        let prop = |(p, n): (Pos, i128)| {
            i64::try_from(n)
                .map(PropertyValue)
                .map_err(|_| syntax(p, format!("property `{n}` does not fit in 64 signed bits")))
        };
        match pred {
            Predicate::Vertex(t) => {
                let shape = schema.schema.vertex(t);
                let mut rec = VertexRecord {
                    id: ObjectId(0),
                    vtype: t,
                    props: Default::default(),
                };
                for (i, &a) in args.iter().enumerate() {
                    match shape.arg_prop(i) {
                        None => rec.id = id(a)?,
                        Some(_) => rec.props.push(prop(a)?),
                    }
                }
                vertices.push((pos, rec));
            }
            Predicate::Edge(t) => {
                let rec = EdgeRecord {
                    src: id(args[0])?,
                    dst: id(args[1])?,
                    etype: t,
                    props: args[2..].iter().map(|&a| prop(a)).collect::<Result<_, _>>()?,
                };
                edges.push((pos, rec));
            }
        }
    }
    g.reserve(vertices.len(), edges.len());
    for (pos, v) in vertices {
        g.add_vertex(v).map_err(|source| LoadError::Graph { pos, source })?;
    }
    for (pos, e) in edges {
        g.add_edge(e).map_err(|source| LoadError::Graph { pos, source })?;
    }
    Ok(g)
}

/// Writes every vertex, then every edge, in store order.
pub fn save_facts(g: &GraphStore, mut w: impl Write) -> io::Result<()> {
    let schema = g.schema();
    writeln!(w, "% {} vertices, {} edges", g.vertex_count(), g.edge_count())?;
    for v in g.vertices() {
        let shape = schema.vertex(v.vtype);
        write!(w, "vertex{}(", v.vtype.number())?;
        for i in 0..shape.arity {
            if i > 0 {
                w.write_all(b", ")?;
            }
            match shape.arg_prop(i) {
                None => write!(w, "{}", v.id)?,
                Some(p) => write!(w, "{}", v.props[p])?,
            }
        }
        w.write_all(b").\n")?;
    }
    for e in g.edges() {
        write!(w, "edge{}({}, {}", e.etype.letter(), e.src, e.dst)?;
        for p in &e.props {
            write!(w, ", {p}")?;
        }
        w.write_all(b").\n")?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<GraphStore, LoadError> {
        load_facts(text.as_bytes(), &FactSchema::default()).map(|(g, _)| g)
    }

    #[test]
    fn literal_facts() {
        let g = load("vertex1(735713441679521195).").unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.vertices()[0].vtype, VertexType::V1);
        assert_eq!(g.vertices()[0].id, ObjectId(735713441679521195));

        let (g, report) = load_facts("edgeD(932362105613871012, 60, 1).".as_bytes(), &FactSchema::default()).unwrap();
        let e = &g.edges()[0];
        assert_eq!(
            (e.src, e.dst, e.etype, e.props.as_slice()),
            (
                ObjectId(932362105613871012),
                ObjectId(60),
                EdgeType::D,
                &[PropertyValue(1)][..]
            )
        );
        assert_eq!(report.len(), 2);
    }

    #[test]
    fn type4_id_is_second_argument() {
        let g = load("% header\nvertex4(5, 99, -3).\n").unwrap();
        let v = &g.vertices()[0];
        assert_eq!(v.id, ObjectId(99));
        assert_eq!(v.props.as_slice(), &[PropertyValue(5), PropertyValue(-3)]);
    }

    #[test]
    fn diagnostics() {
        match load("edgeD(1,2).") {
            Err(LoadError::ArityMismatch {
                pos,
                expected: 3,
                got: 2,
                ..
            }) => assert_eq!(pos.line, 1),
            other => panic!("{other:?}"),
        }
        match load("vertex1(1).\nvertex9(2).") {
            Err(LoadError::UnknownPredicate { pos, name }) => {
                assert_eq!((pos.line, pos.col, name.as_str()), (2, 1, "vertex9"))
            }
            other => panic!("{other:?}"),
        }
        match load("vertex1(1)\nvertex1(2).") {
            Err(LoadError::Syntax { pos, .. }) => assert_eq!((pos.line, pos.col), (2, 1)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(load("vertex1(-1)."), Err(LoadError::Syntax { .. })));
        assert!(matches!(load("vertex1(X)."), Err(LoadError::Syntax { .. })));
        assert!(matches!(
            load("vertex1(1).\nvertex1(1)."),
            Err(LoadError::Graph {
                source: GraphError::DuplicateId(_),
                ..
            })
        ));
    }

    #[test]
    fn empty_store_saves_comments_only() {
        let mut out = Vec::new();
        save_facts(&GraphStore::new(Schema::default()), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.lines().all(|l| l.starts_with('%')));
        assert_eq!(load(&text).unwrap().digest(), crate::graph::EMPTY_DIGEST);
    }

    #[test]
    fn predicate_names() {
        for p in Predicate::all() {
            assert_eq!(Predicate::parse(&p.name()), Some(p));
        }
        for bad in ["vertex", "vertex0", "vertex12", "edgeG", "edgeAB", "edge"] {
            assert_eq!(Predicate::parse(bad), None, "{bad}");
        }
    }
}
