use std::sync::OnceLock;

use super::{parse_pattern, Pattern};

/// Property value marking a starred vertex or edge.
pub const STAR: i64 = 1;

/// DSL source of the built-in `agile-lite` pattern.
///
/// Root `X` (type 1) is reported when: two type-4 vertices `W1 != W2` both
/// have starred D edges to the starred type-2 pair `T21`/`T22` and share a
/// type-3 parent `V3` through B edges; `X` has an E edge to a type-5 vertex,
/// an A edge whose property matches some type-4 vertex (green) and is
/// starred, an incoming F edge from a type-2 vertex, and C edges to three
/// distinct type-4 vertices, one of which is a B child of `V3`; and the
/// `T21`/`T22` pair satisfies the red relation.
pub const AGILE_LITE_SOURCE: &str = "\
% agile-lite: six subpatterns, root X.
root X.
sub sub1: edgeD(W1, T21, 1), edgeD(W1, T22, 1), vertex4(_, W1, _), vertex2(T21, 1, _), vertex2(T22, 1, _).
sub sub2: edgeD(W2, T21, 1), edgeD(W2, T22, 1), vertex4(_, W2, _), neq(W1, W2), edgeB(V3, W1), edgeB(V3, W2), vertex3(V3).
sub sub3: vertex1(X), edgeE(X, S5), vertex5(S5), edgeA(X, Y1, Pa), vertex4(Pg, G4, _), green(Pa, Pg).
sub sub4: edgeF(Z2, X), vertex2(Z2, _, _).
sub sub5: edgeA(X, Y1, Pa), eq(Pa, 1), vertex1(Y1).
sub sub6: edgeC(X, U1), edgeC(X, U2), edgeC(X, U3), vertex4(_, U1, _), vertex4(_, U2, _), vertex4(_, U3, _), neq(U1, U2), neq(U1, U3), neq(U2, U3), edgeB(V3, U1), red(T21, T22).
";

/// The built-in pattern, parsed against the default schema.
pub fn builtin_agile_lite() -> Pattern {
    static CELL: OnceLock<Pattern> = OnceLock::new();
    CELL.get_or_init(|| parse_pattern(AGILE_LITE_SOURCE).expect("built-in pattern parses"))
        .clone()
}
