//! Columnar interchange format for large graphs.
//!
//! ```text
//! #patternforge-tsv 1
//! [vertices]
//! <id>\t<type 1-5>\t<prop>...
//! [edges]
//! <src>\t<dst>\t<type A-F>\t<prop>...
//! ```
//!
//! Properties appear in property order (the fact layout minus the id).

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::graph::{
    EdgeRecord, EdgeType, GraphError, GraphStore, ObjectId, PropertyValue, Schema, VertexRecord, VertexType,
};

pub const TSV_MAGIC: &str = "#patternforge-tsv 1";

#[derive(Debug, Error)]
pub enum TsvError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn save_tsv(g: &GraphStore, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "{TSV_MAGIC}")?;
    writeln!(w, "[vertices]")?;
    for v in g.vertices() {
        write!(w, "{}\t{}", v.id, v.vtype.number())?;
        for p in &v.props {
            write!(w, "\t{p}")?;
        }
        w.write_all(b"\n")?;
    }
    writeln!(w, "[edges]")?;
    for e in g.edges() {
        write!(w, "{}\t{}\t{}", e.src, e.dst, e.etype.letter())?;
        for p in &e.props {
            write!(w, "\t{p}")?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn load_tsv(r: impl BufRead, schema: &Schema) -> Result<GraphStore, TsvError> {
    enum Section {
        Head,
        Vertices,
        Edges,
    }
    let mut g = GraphStore::new(schema.clone());
    let mut section = Section::Head;
    for (i, line) in r.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let err = |msg: String| TsvError::Syntax { line: line_no, msg };
        if line.is_empty() {
            continue;
        }
        match (&section, line.as_str()) {
            (Section::Head, TSV_MAGIC) => {
                section = Section::Vertices;
                continue;
            }
            (Section::Head, _) => return Err(err(format!("expected `{TSV_MAGIC}`"))),
            (_, "[vertices]") => {
                section = Section::Vertices;
                continue;
            }
            (_, "[edges]") => {
                section = Section::Edges;
                continue;
            }
            _ => {}
        }
        let mut cols = line.split('\t');
        let mut col = |what: &str| cols.next().ok_or_else(|| err(format!("missing {what} column")));
        let num = |s: &str| -> Result<i64, TsvError> { s.parse().map_err(|_| err(format!("malformed number `{s}`"))) };
        let id = |s: &str| -> Result<ObjectId, TsvError> {
            s.parse().map(ObjectId).map_err(|_| err(format!("malformed id `{s}`")))
        };
        match section {
            Section::Vertices => {
                let vid = id(col("id")?)?;
                let t = col("type")?;
                let vtype = t
                    .parse::<u8>()
                    .ok()
                    .and_then(VertexType::from_number)
                    .ok_or_else(|| err(format!("unknown vertex type `{t}`")))?;
                let props: Vec<i64> = cols.map(num).collect::<Result<_, _>>()?;
                g.add_vertex(VertexRecord::new(vid.0, vtype, &props))
                    .map_err(|source| TsvError::Graph { line: line_no, source })?;
            }
            Section::Edges => {
                let src = id(col("src")?)?;
                let dst = id(col("dst")?)?;
                let t = col("type")?;
                let mut cs = t.chars();
                let etype = match (cs.next(), cs.next()) {
                    (Some(c), None) => EdgeType::from_letter(c),
                    _ => None,
                }
                .ok_or_else(|| err(format!("unknown edge type `{t}`")))?;
                let props = cols.map(|s| num(s).map(PropertyValue)).collect::<Result<_, _>>()?;
                g.add_edge(EdgeRecord { src, dst, etype, props })
                    .map_err(|source| TsvError::Graph { line: line_no, source })?;
            }
            Section::Head => unreachable!(),
        }
    }
    if matches!(section, Section::Head) {
        return Err(TsvError::Syntax {
            line: 1,
            msg: format!("expected `{TSV_MAGIC}`"),
        });
    }
    Ok(g)
}
