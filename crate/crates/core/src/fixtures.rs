//! The presentations used throughout the tests, benches and CLI examples.

use crate::group::GroupModel;
use crate::presentation::parse_presentation;

/// `F(a,b)` relative to `<a>`.
pub fn free_rel_a() -> GroupModel {
    parse_presentation("family = free\ngenerators = a b\nperipheral A = a\n").expect("fixture parses")
}

/// Genus two surface group `F(a,b) *_C F(c,d)` relative to `C = <[a,b]>`.
pub fn surface() -> GroupModel {
    parse_presentation(SURFACE).expect("fixture parses")
}

pub const SURFACE: &str = "family = surface-amalgam
generators = a b c d
relator = a b a^-1 b^-1 c d c^-1 d^-1
peripheral C = a b a^-1 b^-1
";

/// `F(a,b)` relative to `<[a,b]>`, the vertex group `A` of [`surface`].
pub fn surface_vertex_group() -> GroupModel {
    parse_presentation("family = free\ngenerators = a b\nperipheral C = a b a^-1 b^-1\n").expect("fixture parses")
}

/// `F(a,b) *_{t a t^-1 = b}` relative to `<b>`.
pub fn hnn() -> GroupModel {
    parse_presentation(HNN).expect("fixture parses")
}

pub const HNN: &str = "family = hnn
generators = a b t
split.stable = t
split.edge = a | b
peripheral C = b
";
