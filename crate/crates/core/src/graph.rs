//! Typed property graph: five vertex types, six directed edge types, integer
//! properties, and the indexed access paths the matcher relies on.
//!
//! The store is append-only. It is filled by a single writer (a loader or the
//! generator) and afterwards shared read-only between queries.

use std::fmt;
use std::hash::Hasher;

use fnv::FnvHasher;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;
use thiserror::Error;

/// Identifier of a vertex. Unique within one [`GraphStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ObjectId(pub u64);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A vertex or edge property. Every property in the ontology is an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PropertyValue(pub i64);

impl fmt::Display for PropertyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type Props = SmallVec<[PropertyValue; 2]>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexType {
    V1,
    V2,
    V3,
    V4,
    V5,
}

impl VertexType {
    pub const ALL: [VertexType; 5] = [Self::V1, Self::V2, Self::V3, Self::V4, Self::V5];

    pub fn index(self) -> usize {
        self as usize
    }

    /// The digit used in fact and pattern predicate names (`vertex4`).
    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Self::ALL.get((n as usize).wrapping_sub(1)).copied()
    }
}

impl fmt::Display for VertexType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeType {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl EdgeType {
    pub const ALL: [EdgeType; 6] = [Self::A, Self::B, Self::C, Self::D, Self::E, Self::F];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        (b'A' + self as u8) as char
    }

    pub fn from_letter(c: char) -> Option<Self> {
        let i = (c as u32).checked_sub('A' as u32)? as usize;
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Shape of a vertex fact: total argument count and which argument carries
/// the vertex id. The remaining arguments are properties, in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexShape {
    pub arity: usize,
    pub id_pos: usize,
}

impl VertexShape {
    pub fn props(&self) -> usize {
        self.arity - 1
    }

    /// Fact argument position of property `prop`.
    pub fn prop_arg(&self, prop: usize) -> usize {
        if prop < self.id_pos {
            prop
        } else {
            prop + 1
        }
    }

    /// Property index of fact argument `arg`, or `None` for the id argument.
    pub fn arg_prop(&self, arg: usize) -> Option<usize> {
        match arg.cmp(&self.id_pos) {
            std::cmp::Ordering::Less => Some(arg),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(arg - 1),
        }
    }
}

/// Per-type property arities. Edge facts are always `(src, dst, props..)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    vertex: [VertexShape; 5],
    edge_props: [usize; 6],
}

impl Default for Schema {
    /// `vertex1(Id)`, `vertex2(Id,Starred,Key)`, `vertex3(Id)`,
    /// `vertex4(P0,Id,P2)`, `vertex5(Id)`; `edgeA(S,D,P)`, `edgeD(S,D,P)`,
    /// the other edge types carry no properties.
    fn default() -> Self {
        let plain = VertexShape { arity: 1, id_pos: 0 };
        Schema {
            vertex: [
                plain,
                VertexShape { arity: 3, id_pos: 0 },
                plain,
                VertexShape { arity: 3, id_pos: 1 },
                plain,
            ],
            edge_props: [1, 0, 0, 1, 0, 0],
        }
    }
}

impl Schema {
    pub fn new(vertex: [VertexShape; 5], edge_props: [usize; 6]) -> Result<Self, GraphError> {
        for (t, shape) in VertexType::ALL.iter().zip(&vertex) {
            if shape.arity == 0 || shape.id_pos >= shape.arity {
                return Err(GraphError::BadSchema(format!(
                    "{t}: id position {} outside arity {}",
                    shape.id_pos, shape.arity
                )));
            }
        }
        Ok(Schema { vertex, edge_props })
    }

    pub fn vertex(&self, t: VertexType) -> VertexShape {
        self.vertex[t.index()]
    }

    pub fn vertex_props(&self, t: VertexType) -> usize {
        self.vertex[t.index()].props()
    }

    pub fn edge_props(&self, t: EdgeType) -> usize {
        self.edge_props[t.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexRecord {
    pub id: ObjectId,
    pub vtype: VertexType,
    pub props: Props,
}

impl VertexRecord {
    pub fn new(id: u64, vtype: VertexType, props: &[i64]) -> Self {
        VertexRecord {
            id: ObjectId(id),
            vtype,
            props: props.iter().map(|&p| PropertyValue(p)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeRecord {
    pub src: ObjectId,
    pub dst: ObjectId,
    pub etype: EdgeType,
    pub props: Props,
}

impl EdgeRecord {
    pub fn new(src: u64, dst: u64, etype: EdgeType, props: &[i64]) -> Self {
        EdgeRecord {
            src: ObjectId(src),
            dst: ObjectId(dst),
            etype,
            props: props.iter().map(|&p| PropertyValue(p)).collect(),
        }
    }

    fn sort_key(&self) -> (u64, u64, EdgeType, &[PropertyValue]) {
        (self.src.0, self.dst.0, self.etype, &self.props)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate vertex id {0}")]
    DuplicateId(ObjectId),
    #[error("{what} expects {expected} properties, got {got}")]
    ArityMismatch { what: String, expected: usize, got: usize },
    #[error("invalid schema: {0}")]
    BadSchema(String),
}

/// A finding reported by [`GraphStore::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Finding {
    DanglingEndpoint { edge: usize, endpoint: ObjectId },
    IndexInconsistency(String),
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::DanglingEndpoint { edge, endpoint } => {
                write!(f, "edge #{edge} references absent vertex {endpoint}")
            }
            Finding::IndexInconsistency(msg) => write!(f, "index inconsistency: {msg}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.findings.len()
    }
}

type Slots = SmallVec<[u32; 4]>;

/// The graph store and its indices.
///
/// Edge lists in every index hold positions into `edges`, in insertion order.
#[derive(Debug, Clone, Default)]
pub struct GraphStore {
    schema: Schema,
    vertices: Vec<VertexRecord>,
    edges: Vec<EdgeRecord>,
    by_id: FxHashMap<ObjectId, u32>,
    by_vtype: [Vec<u32>; 5],
    by_etype: [Vec<u32>; 6],
    out: FxHashMap<(ObjectId, EdgeType), Slots>,
    inc: FxHashMap<(ObjectId, EdgeType), Slots>,
    by_prop: FxHashMap<(VertexType, u8, PropertyValue), Slots>,
}

impl GraphStore {
    pub fn new(schema: Schema) -> Self {
        GraphStore {
            schema,
            ..Default::default()
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn reserve(&mut self, vertices: usize, edges: usize) {
        self.vertices.reserve(vertices);
        self.edges.reserve(edges);
        self.by_id.reserve(vertices);
        self.out.reserve(edges);
        self.inc.reserve(edges);
    }

    pub fn add_vertex(&mut self, v: VertexRecord) -> Result<(), GraphError> {
        let expected = self.schema.vertex_props(v.vtype);
        if v.props.len() != expected {
            return Err(GraphError::ArityMismatch {
                what: format!("vertex{}", v.vtype.number()),
                expected,
                got: v.props.len(),
            });
        }
        if self.by_id.contains_key(&v.id) {
            return Err(GraphError::DuplicateId(v.id));
        }
        let slot = u32::try_from(self.vertices.len()).expect("vertex count exceeds u32");
        self.by_id.insert(v.id, slot);
        self.by_vtype[v.vtype.index()].push(slot);
        for (pos, &p) in v.props.iter().enumerate() {
            self.by_prop.entry((v.vtype, pos as u8, p)).or_default().push(slot);
        }
        self.vertices.push(v);
        Ok(())
    }

    /// Adds an edge. Endpoint existence is not checked here; see [`GraphStore::validate`].
    pub fn add_edge(&mut self, e: EdgeRecord) -> Result<(), GraphError> {
        let expected = self.schema.edge_props(e.etype);
        if e.props.len() != expected {
            return Err(GraphError::ArityMismatch {
                what: format!("edge{}", e.etype.letter()),
                expected,
                got: e.props.len(),
            });
        }
        let slot = u32::try_from(self.edges.len()).expect("edge count exceeds u32");
        self.by_etype[e.etype.index()].push(slot);
        self.out.entry((e.src, e.etype)).or_default().push(slot);
        self.inc.entry((e.dst, e.etype)).or_default().push(slot);
        self.edges.push(e);
        Ok(())
    }

    /// Builds a store from records, in the given order.
    pub fn from_records(
        schema: Schema,
        vertices: impl IntoIterator<Item = VertexRecord>,
        edges: impl IntoIterator<Item = EdgeRecord>,
    ) -> Result<Self, GraphError> {
        let mut g = GraphStore::new(schema);
        for v in vertices {
            g.add_vertex(v)?;
        }
        for e in edges {
            g.add_edge(e)?;
        }
        Ok(g)
    }

    pub fn vertices(&self) -> &[VertexRecord] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn vertex(&self, id: ObjectId) -> Option<&VertexRecord> {
        self.by_id.get(&id).map(|&i| &self.vertices[i as usize])
    }

    pub fn edge(&self, slot: u32) -> &EdgeRecord {
        &self.edges[slot as usize]
    }

    pub fn vertex_at(&self, slot: u32) -> &VertexRecord {
        &self.vertices[slot as usize]
    }

    /// Edges leaving `src` with type `etype`, in insertion order.
    pub fn out_edges(&self, src: ObjectId, etype: EdgeType) -> impl Iterator<Item = &EdgeRecord> {
        self.out_slots(src, etype).iter().map(|&i| self.edge(i))
    }

    /// Edges entering `dst` with type `etype`, in insertion order.
    pub fn in_edges(&self, dst: ObjectId, etype: EdgeType) -> impl Iterator<Item = &EdgeRecord> {
        self.in_slots(dst, etype).iter().map(|&i| self.edge(i))
    }

    pub fn vertices_of_type(&self, t: VertexType) -> impl Iterator<Item = &VertexRecord> {
        self.by_vtype[t.index()].iter().map(|&i| self.vertex_at(i))
    }

    pub fn out_slots(&self, src: ObjectId, etype: EdgeType) -> &[u32] {
        self.out.get(&(src, etype)).map_or(&[], |s| s.as_slice())
    }

    pub fn in_slots(&self, dst: ObjectId, etype: EdgeType) -> &[u32] {
        self.inc.get(&(dst, etype)).map_or(&[], |s| s.as_slice())
    }

    pub fn edge_slots_of_type(&self, etype: EdgeType) -> &[u32] {
        &self.by_etype[etype.index()]
    }

    pub fn vertex_slots_of_type(&self, t: VertexType) -> &[u32] {
        &self.by_vtype[t.index()]
    }

    /// Vertices of type `t` whose property `pos` equals `value`.
    pub fn vertex_slots_with_prop(&self, t: VertexType, pos: usize, value: PropertyValue) -> &[u32] {
        match u8::try_from(pos) {
            Ok(pos) => self.by_prop.get(&(t, pos, value)).map_or(&[], |s| s.as_slice()),
            Err(_) => &[],
        }
    }

    /// Checks endpoint existence and index/record consistency.
    pub fn validate(&self) -> ValidationReport {
        let mut findings = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            for endpoint in [e.src, e.dst] {
                if !self.by_id.contains_key(&endpoint) {
                    findings.push(Finding::DanglingEndpoint { edge: i, endpoint });
                }
            }
        }

        let mut seen_out = vec![0u8; self.edges.len()];
        let mut seen_in = vec![0u8; self.edges.len()];
        let mut check = |index: &FxHashMap<(ObjectId, EdgeType), Slots>,
                         seen: &mut [u8],
                         name: &str,
                         pick: fn(&EdgeRecord) -> ObjectId| {
            for (&(id, t), slots) in index {
                for &s in slots {
                    match self.edges.get(s as usize) {
                        Some(e) if pick(e) == id && e.etype == t => seen[s as usize] += 1,
                        Some(_) => findings.push(Finding::IndexInconsistency(format!(
                            "{name} index lists edge #{s} under ({id}, {t})"
                        ))),
                        None => findings.push(Finding::IndexInconsistency(format!(
                            "{name} index references missing edge #{s}"
                        ))),
                    }
                }
            }
        };
        check(&self.out, &mut seen_out, "out", |e| e.src);
        check(&self.inc, &mut seen_in, "in", |e| e.dst);
        for (i, (&o, &n)) in seen_out.iter().zip(&seen_in).enumerate() {
            if o != 1 || n != 1 {
                findings.push(Finding::IndexInconsistency(format!(
                    "edge #{i} indexed {o} times outgoing and {n} times incoming"
                )));
            }
        }

        let typed: usize = self.by_vtype.iter().map(Vec::len).sum();
        if typed != self.vertices.len() || self.by_id.len() != self.vertices.len() {
            findings.push(Finding::IndexInconsistency(format!(
                "{} vertices but {typed} typed and {} by id",
                self.vertices.len(),
                self.by_id.len()
            )));
        }
        ValidationReport { findings }
    }

    /// Order-independent FNV-1a digest of the store contents.
    ///
    /// Vertices are hashed sorted by id and edges sorted by
    /// `(src, dst, type, props)`, each field as little-endian bytes. The
    /// empty store hashes to [`EMPTY_DIGEST`].
    pub fn digest(&self) -> u64 {
        let mut vs: Vec<&VertexRecord> = self.vertices.iter().collect();
        vs.sort_unstable_by_key(|v| v.id);
        let mut es: Vec<&EdgeRecord> = self.edges.iter().collect();
        es.sort_unstable_by(|a, b| a.sort_key().cmp(&b.sort_key()));

        let mut h = FnvHasher::default();
        for v in vs {
            h.write(&[b'v', v.vtype.number()]);
            h.write(&v.id.0.to_le_bytes());
            h.write(&(v.props.len() as u32).to_le_bytes());
            for p in &v.props {
                h.write(&p.0.to_le_bytes());
            }
        }
        for e in es {
            h.write(&[b'e', e.etype.letter() as u8]);
            h.write(&e.src.0.to_le_bytes());
            h.write(&e.dst.0.to_le_bytes());
            h.write(&(e.props.len() as u32).to_le_bytes());
            for p in &e.props {
                h.write(&p.0.to_le_bytes());
            }
        }
        h.finish()
    }
}

/// Digest of a store with no records: the 64-bit FNV-1a offset basis.
pub const EMPTY_DIGEST: u64 = 0xcbf2_9ce4_8422_2325;
