//! Construction of agile-lite instances and their near-miss variants.

use crate::engine::{Binding, Value};
use crate::graph::{EdgeRecord, EdgeType, ObjectId, PropertyValue, VertexRecord, VertexType};
use crate::pattern::{Var, STAR};

/// Edges in one complete instance, including the F reverse of each A edge.
pub const INSTANCE_EDGES: usize = 15;
#[cfg(test)]
const INSTANCE_VERTICES: usize = 13;

/// Record sink with an id allocator.
pub(crate) struct Builder {
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    next: u64,
    salt: Option<u64>,
}

const MASK63: u64 = (1 << 63) - 1;

/// A bijection on 63-bit integers (splitmix64 finalizer restricted to 63 bits).
pub(crate) fn mix63(mut x: u64) -> u64 {
    x &= MASK63;
    x = ((x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9)) & MASK63;
    x = ((x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb)) & MASK63;
    x ^ (x >> 31)
}

impl Builder {
    /// Ids 1, 2, 3, ... in allocation order.
    pub(crate) fn sequential() -> Self {
        Builder {
            vertices: Vec::new(),
            edges: Vec::new(),
            next: 1,
            salt: None,
        }
    }

    /// Ids scrambled by [`mix63`] around `salt`; distinct while fewer than
    /// 2^63 are drawn.
    pub(crate) fn scrambled(salt: u64, vertices: usize, edges: usize) -> Self {
        Builder {
            vertices: Vec::with_capacity(vertices),
            edges: Vec::with_capacity(edges),
            next: 0,
            salt: Some(salt),
        }
    }

    fn fresh_id(&mut self) -> ObjectId {
        loop {
            let n = self.next;
            self.next += 1;
            let id = match self.salt {
                None => n,
                Some(s) => mix63(s.wrapping_add(n)),
            };
            if id != 0 {
                return ObjectId(id);
            }
        }
    }

    pub(crate) fn vertex(&mut self, vtype: VertexType, props: &[i64]) -> ObjectId {
        let id = self.fresh_id();
        self.vertices.push(VertexRecord::new(id.0, vtype, props));
        id
    }

    pub(crate) fn edge(&mut self, src: ObjectId, dst: ObjectId, etype: EdgeType, props: &[i64]) {
        self.edges.push(EdgeRecord::new(src.0, dst.0, etype, props));
    }

    /// An A edge and its F reverse.
    pub(crate) fn a_pair(&mut self, src: ObjectId, dst: ObjectId, prop: i64) {
        self.edge(src, dst, EdgeType::A, &[prop]);
        self.edge(dst, src, EdgeType::F, &[]);
    }
}

/// Property values for one instance.
#[derive(Debug, Clone, Copy)]
pub(crate) struct InstanceValues {
    /// Red key of `T21`.
    pub key1: i64,
    /// Red key of `T22`; equal to `key1` unless red is meant to fail.
    pub key2: i64,
    /// Type-4 first properties of `W1, W2, U1, U2, U3`; none may be 1.
    pub v4_p0: [i64; 5],
    pub v4_p2: i64,
    /// Property of the A edge from `X` to `Z2`.
    pub a_to_z2: i64,
    /// Whether to emit `G4` (type-4 vertex with first property equal to the
    /// root's A-edge property).
    pub with_g4: bool,
}

/// Ways an instance's core (`sub1`, `sub2`, red) can be made to fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum CoreBreak {
    None,
    /// `W1 -> T22` carries a non-star property.
    Sub1,
    /// No B edge from `V3` to `W2`.
    Sub2,
    /// `T21` and `T22` keys differ (`InstanceValues::key2`).
    Red,
}

/// Vertex ids of one emitted instance.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Instance {
    pub w1: ObjectId,
    pub w2: ObjectId,
    pub t21: ObjectId,
    pub t22: ObjectId,
    pub v3: ObjectId,
    pub x: ObjectId,
    pub s5: ObjectId,
    pub y1: ObjectId,
    pub z2: ObjectId,
    pub u: [ObjectId; 3],
    pub g4: Option<ObjectId>,
}

impl Instance {
    /// Full binding for the agile-lite variables. `G4` falls back to `g4`.
    pub(crate) fn binding(&self, g4: ObjectId) -> Binding {
        let id = |o: ObjectId| Value::Id(o);
        let star = Value::Prop(PropertyValue(STAR));
        [
            ("W1", id(self.w1)),
            ("T21", id(self.t21)),
            ("T22", id(self.t22)),
            ("W2", id(self.w2)),
            ("V3", id(self.v3)),
            ("X", id(self.x)),
            ("S5", id(self.s5)),
            ("Y1", id(self.y1)),
            ("Pa", star),
            ("Pg", star),
            ("G4", id(self.g4.unwrap_or(g4))),
            ("Z2", id(self.z2)),
            ("U1", id(self.u[0])),
            ("U2", id(self.u[1])),
            ("U3", id(self.u[2])),
        ]
        .into_iter()
        .map(|(n, v)| (Var::new(n), v))
        .collect()
    }
}

/// Emits one instance, realizing the pattern with one vertex per variable.
pub(crate) fn emit_instance(b: &mut Builder, v: &InstanceValues, brk: CoreBreak) -> Instance {
    let t21 = b.vertex(VertexType::V2, &[STAR, v.key1]);
    let t22 = b.vertex(VertexType::V2, &[STAR, v.key2]);
    let w1 = b.vertex(VertexType::V4, &[v.v4_p0[0], v.v4_p2]);
    let w2 = b.vertex(VertexType::V4, &[v.v4_p0[1], v.v4_p2]);
    let v3 = b.vertex(VertexType::V3, &[]);
    let x = b.vertex(VertexType::V1, &[]);
    let s5 = b.vertex(VertexType::V5, &[]);
    let y1 = b.vertex(VertexType::V1, &[]);
    let g4 = v.with_g4.then(|| b.vertex(VertexType::V4, &[STAR, v.v4_p2]));
    let z2 = b.vertex(VertexType::V2, &[0, 0]);
    let u = [
        b.vertex(VertexType::V4, &[v.v4_p0[2], v.v4_p2]),
        b.vertex(VertexType::V4, &[v.v4_p0[3], v.v4_p2]),
        b.vertex(VertexType::V4, &[v.v4_p0[4], v.v4_p2]),
    ];

    let w1_t22 = if brk == CoreBreak::Sub1 { STAR + 1 } else { STAR };
    b.edge(w1, t21, EdgeType::D, &[STAR]);
    b.edge(w1, t22, EdgeType::D, &[w1_t22]);
    b.edge(w2, t21, EdgeType::D, &[STAR]);
    b.edge(w2, t22, EdgeType::D, &[STAR]);
    b.edge(v3, w1, EdgeType::B, &[]);
    if brk != CoreBreak::Sub2 {
        b.edge(v3, w2, EdgeType::B, &[]);
    }
    b.edge(x, s5, EdgeType::E, &[]);
    b.a_pair(x, y1, STAR);
    b.a_pair(x, z2, v.a_to_z2);
    for &ui in &u {
        b.edge(x, ui, EdgeType::C, &[]);
    }
    b.edge(v3, u[0], EdgeType::B, &[]);

    Instance {
        w1,
        w2,
        t21,
        t22,
        v3,
        x,
        s5,
        y1,
        z2,
        u,
        g4,
    }
}

/// Root-side near misses, each failing one agile-lite atom that involves
/// the root's own neighbourhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RootBreak {
    RootNotType1,
    NoE,
    S5NotType5,
    NoStarA,
    NoA2Parent,
    Z2NotType2,
    PaNotStar,
    Y1NotType1,
    TwoC,
    RepeatedC,
    U1NotType4,
    U2NotType4,
    U3NotType4,
    NoB,
}

impl RootBreak {
    pub(crate) const CYCLE: [RootBreak; 14] = [
        Self::RootNotType1,
        Self::NoE,
        Self::S5NotType5,
        Self::NoStarA,
        Self::NoA2Parent,
        Self::Z2NotType2,
        Self::PaNotStar,
        Self::Y1NotType1,
        Self::TwoC,
        Self::RepeatedC,
        Self::U1NotType4,
        Self::U2NotType4,
        Self::U3NotType4,
        Self::NoB,
    ];

    /// Edges emitted by [`emit_root_distractor`].
    pub(crate) fn edge_count(self) -> usize {
        match self {
            Self::NoE | Self::TwoC | Self::NoB => 8,
            Self::NoStarA | Self::NoA2Parent => 7,
            _ => 9,
        }
    }
}

/// Emits a copy of the root side of an instance that hangs off `v3` and
/// fails exactly the atom named by `brk`. `pa_alt` is used for the A edge
/// when `brk` is [`RootBreak::PaNotStar`], paired with a fresh type-4 vertex
/// carrying it so that green still holds.
pub(crate) fn emit_root_distractor(b: &mut Builder, v3: ObjectId, brk: RootBreak, v: &InstanceValues, pa_alt: i64) {
    use RootBreak::*;
    let ty = |hit: bool, want: VertexType| if hit { VertexType::V3 } else { want };
    let x = b.vertex(
        if brk == RootNotType1 {
            VertexType::V5
        } else {
            VertexType::V1
        },
        &[],
    );
    let s5 = b.vertex(ty(brk == S5NotType5, VertexType::V5), &[]);
    let y1 = b.vertex(ty(brk == Y1NotType1, VertexType::V1), &[]);
    let z2 = if brk == Z2NotType2 {
        b.vertex(VertexType::V3, &[])
    } else {
        b.vertex(VertexType::V2, &[0, 0])
    };
    let mut u = [ObjectId(0); 3];
    for (i, (slot, hit)) in u
        .iter_mut()
        .zip([brk == U1NotType4, brk == U2NotType4, brk == U3NotType4])
        .enumerate()
    {
        *slot = if hit {
            b.vertex(VertexType::V3, &[])
        } else {
            b.vertex(VertexType::V4, &[v.v4_p0[2 + i], v.v4_p2])
        };
    }

    if brk != NoE {
        b.edge(x, s5, EdgeType::E, &[]);
    }
    match brk {
        NoStarA => {}
        PaNotStar => {
            b.vertex(VertexType::V4, &[pa_alt, v.v4_p2]);
            b.a_pair(x, y1, pa_alt);
        }
        _ => b.a_pair(x, y1, STAR),
    }
    if brk != NoA2Parent {
        b.a_pair(x, z2, v.a_to_z2);
    }
    let targets: &[ObjectId] = match brk {
        TwoC => &u[..2],
        RepeatedC => &[u[0], u[0], u[2]],
        _ => &u,
    };
    for &t in targets {
        b.edge(x, t, EdgeType::C, &[]);
    }
    if brk != NoB {
        b.edge(v3, u[0], EdgeType::B, &[]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix63_is_injective_on_a_window() {
        let mut seen = std::collections::HashSet::new();
        for i in 0..100_000u64 {
            let m = mix63(i.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            assert!(m <= MASK63);
            assert!(seen.insert(m));
        }
    }

    #[test]
    fn edge_counts_match_emission() {
        let v = InstanceValues {
            key1: 5,
            key2: 5,
            v4_p0: [2, 3, 4, 5, 6],
            v4_p2: 0,
            a_to_z2: 9,
            with_g4: true,
        };
        let mut b = Builder::sequential();
        emit_instance(&mut b, &v, CoreBreak::None);
        assert_eq!(b.edges.len(), INSTANCE_EDGES);
        assert_eq!(b.vertices.len(), INSTANCE_VERTICES);
        for brk in RootBreak::CYCLE {
            let mut b = Builder::sequential();
            emit_root_distractor(&mut b, ObjectId(1), brk, &v, 77);
            assert_eq!(b.edges.len(), brk.edge_count(), "{brk:?}");
        }
    }
}
