//! Semantics of the two cross-cutting constraints, `red` and `green`.
//!
//! Both are pluggable. [`KeyEquality`] is the default instantiation: red holds
//! for two distinct vertices with equal key property, green holds when the
//! edge property equals the vertex property.

use crate::graph::{GraphStore, ObjectId, PropertyValue};

/// Property index compared by the default red relation (the key of a
/// `vertex2(Id, Starred, Key)` fact).
pub const RED_KEY: usize = 1;

pub trait Relations: Send + Sync {
    fn red(&self, g: &GraphStore, a: ObjectId, b: ObjectId) -> bool;

    fn green(&self, edge_prop: PropertyValue, vertex_prop: PropertyValue) -> bool;

    /// Whether `green(a, b)` holds exactly when `a == b`. Lets the matcher
    /// look type-4 vertices up by property instead of scanning them.
    fn green_is_equality(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeyEquality {
    pub red_key: usize,
}

impl Default for KeyEquality {
    fn default() -> Self {
        KeyEquality { red_key: RED_KEY }
    }
}

impl Relations for KeyEquality {
    fn red(&self, g: &GraphStore, a: ObjectId, b: ObjectId) -> bool {
        if a == b {
            return false;
        }
        let key = |id| g.vertex(id).and_then(|v| v.props.get(self.red_key).copied());
        matches!((key(a), key(b)), (Some(x), Some(y)) if x == y)
    }

    fn green(&self, edge_prop: PropertyValue, vertex_prop: PropertyValue) -> bool {
        edge_prop == vertex_prop
    }

    fn green_is_equality(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Schema, VertexRecord, VertexType};

    #[test]
    fn red_needs_distinct_vertices_with_equal_keys() {
        let g = GraphStore::from_records(
            Schema::default(),
            [
                VertexRecord::new(1, VertexType::V2, &[1, 42]),
                VertexRecord::new(2, VertexType::V2, &[1, 42]),
                VertexRecord::new(3, VertexType::V2, &[1, 43]),
                VertexRecord::new(4, VertexType::V1, &[]),
            ],
            [],
        )
        .unwrap();
        let r = KeyEquality::default();
        assert!(r.red(&g, ObjectId(1), ObjectId(2)));
        assert!(!r.red(&g, ObjectId(1), ObjectId(1)));
        assert!(!r.red(&g, ObjectId(1), ObjectId(3)));
        assert!(!r.red(&g, ObjectId(1), ObjectId(4)));
        assert!(!r.red(&g, ObjectId(1), ObjectId(99)));
    }

    #[test]
    fn green_is_plain_equality() {
        let r = KeyEquality::default();
        assert!(r.green(PropertyValue(5), PropertyValue(5)));
        assert!(!r.green(PropertyValue(5), PropertyValue(6)));
        assert!(r.green_is_equality());
    }
}
